"""Edge-colored graph encodings of closed 3-manifolds and dipole surgery on them.

A graph here is 4-regular on vertices 1..2n with colors 0..3, each color class
a perfect matching.  The encoded space is a manifold exactly when the counting
identity  bigons == vertices + residues  holds (bigons summed over the six
color pairs, residues over the four color triples).  Every operation in this
module either preserves that identity or refuses to run.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Collection, Iterable, Iterator, Mapping, Sequence

COLORS = (0, 1, 2, 3)
COLOR_PAIRS = tuple((c, d) for c in COLORS for d in COLORS if c < d)
COLOR_TRIPLES = tuple(tuple(c for c in COLORS if c != omit) for omit in COLORS)


class GemError(Exception):
    """The graph is not a valid colored matching system, or fails the sphere count."""


class MoveError(GemError):
    """A surgery instruction cannot be applied where requested."""


@dataclass(frozen=True)
class Instruction:
    """One surgery step: cancel the 3-fold pair at ``blob``, split the tail edge at ``tail``.

    ``color`` is the tail-edge color (0 or 1); ``blob`` and ``tail`` are the odd
    representatives of the cancelled pair and of the split edge.
    """

    color: int
    blob: int
    tail: int

    def __str__(self) -> str:
        return f"{self.color}: {self.blob}-{self.tail}"


_INSTR_RE = re.compile(r"^\(?\s*(\d+)\s*:\s*(\d+)\s*-\s*(\d+)\s*\)?$")


def parse_instruction(text: str) -> Instruction:
    m = _INSTR_RE.match(text.strip())
    if m is None:
        raise GemError(f"malformed instruction {text.strip()!r}, expected '<c>: <u>-<r>'")
    c, u, r = int(m.group(1)), int(m.group(2)), int(m.group(3))
    if c not in (0, 1):
        raise GemError(f"tail color must be 0 or 1, got {c}")
    if u % 2 == 0:
        raise GemError(f"pair representative {u} must be odd")
    if r % 2 == 0:
        raise GemError(f"tail representative {r} must be odd")
    return Instruction(c, u, r)


def parse_script(text: str) -> list[Instruction]:
    """Parse one instruction per line; blank lines and ``#`` comments are skipped."""
    out = []
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            out.append(parse_instruction(line))
        except GemError as exc:
            raise GemError(f"line {ln}: {exc}") from None
    return out


def format_script(script: Iterable[Instruction]) -> str:
    return "\n".join(str(instr) for instr in script) + "\n"


@dataclass(frozen=True)
class MoveData:
    """Everything a dual-complex rebuild needs to know about one applied move.

    ``u``/``v`` are the cancelled pair (labels reused by the two new vertices:
    u caps the arc holding the tail's odd end, v the other).  ``x``/``y`` are
    the old color-3 partners of u and v.  ``far_u``/``far_v`` are the far
    color-3 stubs the caps close.  ``arc_u``/``arc_v`` list the surviving
    vertices of each arc of the split cycle, cap end first.
    """

    color: int
    u: int
    v: int
    r: int
    s: int
    x: int
    y: int
    far_u: int
    far_v: int
    dipole_colors: tuple[int, int]
    arc_u: tuple[int, ...]
    arc_v: tuple[int, ...]

    @property
    def fresh_on_u_side(self) -> bool:
        # The fresh side of the split cycle is the arc that kept y.
        return self.far_u == self.y

    @property
    def fresh_arc(self) -> tuple[int, ...]:
        return self.arc_u if self.fresh_on_u_side else self.arc_v

    @property
    def old_arc(self) -> tuple[int, ...]:
        return self.arc_v if self.fresh_on_u_side else self.arc_u

    @property
    def fresh_c_edge(self) -> tuple[int, int]:
        """The new tail-colored edge whose dual page is the fresh copy."""
        a, b = (self.u, self.r) if self.fresh_on_u_side else (self.v, self.s)
        return (a, b) if a < b else (b, a)

    @property
    def inplace_c_edge(self) -> tuple[int, int]:
        a, b = (self.v, self.s) if self.fresh_on_u_side else (self.u, self.r)
        return (a, b) if a < b else (b, a)


def arc_edges(arc: Sequence[int], color: int) -> list[tuple[int, int, int]]:
    """Edges along a split-cycle arc.  The arc alternates colors 3, c, 3, ..."""
    out = []
    for i in range(len(arc) - 1):
        a, b = arc[i], arc[i + 1]
        if a > b:
            a, b = b, a
        out.append((a, b, 3 if i % 2 == 0 else color))
    return out


class Gem:
    """Immutable 4-regular properly 4-edge-colored multigraph on vertices 1..2n.

    Stored as four involution tables, one per color; index 0 of each table is
    unused padding so vertices are addressed 1-based.
    """

    __slots__ = ("_adj",)

    def __init__(self, adj: Sequence[Sequence[int]]) -> None:
        adj = tuple(tuple(row) for row in adj)
        if len(adj) != 4:
            raise GemError("expected exactly four color tables")
        size = len(adj[0])
        if size < 3 or size % 2 == 0:
            raise GemError("vertex count must be positive and even")
        for c, row in enumerate(adj):
            if len(row) != size:
                raise GemError("color tables must agree on vertex count")
            for v in range(1, size):
                w = row[v]
                if not 1 <= w < size or w == v:
                    raise GemError(f"color {c}: entry for vertex {v} is not a valid partner")
                if row[w] != v:
                    raise GemError(f"color {c}: table is not an involution at {v}")
        self._adj = adj

    # -- basic queries ---------------------------------------------------

    @property
    def n_vertices(self) -> int:
        return len(self._adj[0]) - 1

    def neighbor(self, v: int, color: int) -> int:
        return self._adj[color][v]

    def pairs(self, color: int) -> tuple[tuple[int, int], ...]:
        row = self._adj[color]
        return tuple((v, row[v]) for v in range(1, self.n_vertices + 1) if v < row[v])

    def edges(self) -> Iterator[tuple[int, int, int]]:
        for c in COLORS:
            for a, b in self.pairs(c):
                yield a, b, c

    def shared_colors(self, a: int, b: int) -> frozenset[int]:
        return frozenset(c for c in COLORS if self._adj[c][a] == b)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Gem) and self._adj == other._adj

    def __hash__(self) -> int:
        return hash(self._adj)

    def __repr__(self) -> str:
        return f"Gem(vertices={self.n_vertices})"

    @classmethod
    def from_pairs(
        cls, n_vertices: int, pairs_by_color: Mapping[int, Iterable[tuple[int, int]]]
    ) -> "Gem":
        adj = [[0] * (n_vertices + 1) for _ in COLORS]
        for c in COLORS:
            for a, b in pairs_by_color[c]:
                if not (1 <= a <= n_vertices and 1 <= b <= n_vertices) or a == b:
                    raise GemError(f"color {c}: bad pair ({a}, {b})")
                if adj[c][a] or adj[c][b]:
                    raise GemError(f"color {c}: vertex matched twice")
                adj[c][a], adj[c][b] = b, a
        for c in COLORS:
            for v in range(1, n_vertices + 1):
                if not adj[c][v]:
                    raise GemError(f"color {c}: vertex {v} unmatched")
        return cls(adj)

    # -- cycles, residues, counting ---------------------------------------

    def bigon_through(self, v: int, c: int, d: int) -> tuple[int, ...]:
        """The {c,d}-cycle containing v, canonicalized: starts at its smallest
        vertex and steps along min(c,d) first."""
        lo, hi = (c, d) if c < d else (d, c)
        seq = [v]
        cur, col = self._adj[lo][v], hi
        while cur != v:
            seq.append(cur)
            cur, col = self._adj[col][cur], lo if col == hi else hi
        i = seq.index(min(seq))
        if i % 2 == 0:
            seq = seq[i:] + seq[:i]
        else:
            seq = seq[i::-1] + seq[:i:-1]
        return tuple(seq)

    def bigons(self, c: int, d: int) -> list[tuple[int, ...]]:
        seen: set[int] = set()
        out = []
        for v in range(1, self.n_vertices + 1):
            if v not in seen:
                cyc = self.bigon_through(v, c, d)
                seen.update(cyc)
                out.append(cyc)
        return out

    def bigon_count(self) -> int:
        return sum(len(self.bigons(c, d)) for c, d in COLOR_PAIRS)

    def residues(self, colors: Collection[int]) -> list[frozenset[int]]:
        """Connected components of the subgraph using only the given colors."""
        colors = tuple(colors)
        seen: set[int] = set()
        out = []
        for v in range(1, self.n_vertices + 1):
            if v in seen:
                continue
            comp = {v}
            stack = [v]
            while stack:
                w = stack.pop()
                for c in colors:
                    p = self._adj[c][w]
                    if p not in comp:
                        comp.add(p)
                        stack.append(p)
            seen |= comp
            out.append(frozenset(comp))
        return out

    def residue_count(self) -> int:
        return sum(len(self.residues(t)) for t in COLOR_TRIPLES)

    def census(self) -> tuple[int, int, int]:
        """(vertices, bigons, residues)."""
        return self.n_vertices, self.bigon_count(), self.residue_count()

    def validate(self) -> tuple[int, int, int]:
        """Check connectivity and the sphere-count identity; return the census."""
        if len(self.residues(COLORS)) != 1:
            raise GemError("graph is not connected")
        v, b, t = self.census()
        if b != v + t:
            raise GemError(f"sphere count fails: {b} bigons != {v} vertices + {t} residues")
        return v, b, t

    # -- dipoles -----------------------------------------------------------

    def blobs(self) -> list[tuple[int, int, int]]:
        """Pairs joined by exactly three colors, as (low, high, missing_color)."""
        out = []
        for v in range(1, self.n_vertices + 1):
            w = self._adj[0][v]
            if w < v:
                continue
            shared = self.shared_colors(v, w)
            if len(shared) == 3:
                (missing,) = set(COLORS) - shared
                out.append((v, w, missing))
        return out

    def _blob_of(self, u: int) -> tuple[int, int]:
        """(partner, missing_color) of the 3-fold pair containing u."""
        for c in COLORS:
            w = self._adj[c][u]
            shared = self.shared_colors(u, w)
            if len(shared) == 3:
                (missing,) = set(COLORS) - shared
                return w, missing
        raise MoveError(f"vertex {u} is not part of a 3-fold pair")

    def cancel_blob(self, u: int) -> "Gem":
        """Cancel the 3-fold pair containing u and splice its free stubs.

        Survivors are relabeled onto 1..2n-2 preserving order.
        """
        v, missing = self._blob_of(u)
        x, y = self._adj[missing][u], self._adj[missing][v]
        if len(self.shared_colors(x, y)) >= 3:
            raise MoveError("splice would close off a 2-vertex component")
        survivors = [w for w in range(1, self.n_vertices + 1) if w not in (u, v)]
        new = {w: i + 1 for i, w in enumerate(survivors)}
        adj = [[0] * (len(survivors) + 1) for _ in COLORS]
        for c in COLORS:
            for w in survivors:
                p = self._adj[c][w]
                if p in (u, v):
                    # only the missing color can reach the cancelled pair
                    p = y if w == x else x
                adj[c][new[w]] = new[p]
        return Gem(adj)

    def thicken_2_dipole(self, edge: tuple[int, int], colors: Collection[int]) -> "Gem":
        """Insert a pair joined in the two given colors at a doubled edge.

        The site (r, s) must be joined in both complementary colors; the new
        vertices take labels 2n+1 (capping r) and 2n+2 (capping s).
        """
        dip = sorted(set(colors))
        if len(dip) != 2 or any(c not in COLORS for c in dip):
            raise MoveError("need exactly two distinct dipole colors")
        host = [c for c in COLORS if c not in dip]
        r, s = edge
        if self._adj[host[0]][r] != s or self._adj[host[1]][r] != s:
            raise MoveError(f"site {edge} is not doubled in colors {host[0]} and {host[1]}")
        n = self.n_vertices
        p, q = n + 1, n + 2
        adj = [list(row) + [0, 0] for row in self._adj]
        for c in host:
            adj[c][p], adj[c][r] = r, p
            adj[c][q], adj[c][s] = s, q
        for c in dip:
            adj[c][p], adj[c][q] = q, p
        return Gem(adj)

    # -- the composite move ------------------------------------------------

    def move_data(self, instr: Instruction, protected: Collection[int] = ()) -> MoveData:
        """Validate an instruction and work out the rewiring, without applying it."""
        c, u, r = instr.color, instr.blob, instr.tail
        if c not in (0, 1):
            raise MoveError(f"tail color must be 0 or 1, got {c}")
        if u % 2 == 0 or r % 2 == 0:
            raise MoveError("instructions use odd representatives")
        if not (1 <= u <= self.n_vertices and 1 <= r <= self.n_vertices):
            raise MoveError("instruction vertex out of range")
        v, missing = self._blob_of(u)
        if missing != 3:
            raise MoveError("the cancelled pair must be joined in colors 0, 1, 2")
        s = self._adj[c][r]
        if r in (u, v) or s in (u, v):
            raise MoveError("tail edge must be disjoint from the cancelled pair")
        bad = set(protected) & {u, v, r, s}
        if bad:
            raise MoveError(f"move touches protected vertex {min(bad)}")
        x, y = self._adj[3][u], self._adj[3][v]
        if len(self.shared_colors(x, y)) >= 3:
            raise MoveError("splice would close off a 2-vertex component")
        cycle = self.bigon_through(u, c, 3)
        if r not in cycle:
            raise MoveError("tail edge does not lie on the pair's split cycle")

        # Post-cancel, the cycle loses u and v and gains the splice edge (x, y).
        # Cutting that edge and the tail edge leaves two arcs; walk each from its
        # free tail-colored stub to its free color-3 stub.
        def walk(start: int) -> tuple[int, ...]:
            arc = [start]
            cur = start
            while True:
                nxt = self._adj[3][cur]
                if nxt in (u, v):  # the splice replaces x-u-v-y by a direct edge
                    nxt = y if cur == x else x
                if {cur, nxt} == {x, y}:
                    return tuple(arc)
                arc.append(nxt)
                cur = self._adj[c][nxt]
                arc.append(cur)

        arc_u = walk(r)
        arc_v = walk(s)
        far_u, far_v = arc_u[-1], arc_v[-1]
        dip = tuple(d for d in (0, 1, 2) if d != c)
        return MoveData(
            color=c, u=u, v=v, r=r, s=s, x=x, y=y,
            far_u=far_u, far_v=far_v, dipole_colors=dip,
            arc_u=arc_u, arc_v=arc_v,
        )

    def apply_primal_bp(
        self, instr: Instruction, protected: Collection[int] = ()
    ) -> tuple["Gem", MoveData]:
        """Cancel the 3-fold pair and re-insert a 2-fold pair across the tail edge.

        The vertex count is unchanged: the cancelled labels u, v are reassigned
        to the two cap vertices (u on the arc holding the tail's odd end r, v on
        the arc holding s) and every other vertex keeps its label.
        """
        md = self.move_data(instr, protected)
        adj = [list(row) for row in self._adj]
        c, u, v = md.color, md.u, md.v
        # The 2-fold pair keeps the old pair's edges in the two dipole colors.
        adj[c][u], adj[c][md.r] = md.r, u
        adj[c][v], adj[c][md.s] = md.s, v
        adj[3][u], adj[3][md.far_u] = md.far_u, u
        adj[3][v], adj[3][md.far_v] = md.far_v, v
        return Gem(adj), md

    def legal_instructions(self, protected: Collection[int] = ()) -> list[Instruction]:
        """All instructions move_data would accept, in deterministic order."""
        out = []
        for lo, hi, missing in self.blobs():
            if missing != 3:
                continue
            u = lo if lo % 2 else hi
            if u % 2 == 0:
                continue
            for c in (0, 1):
                for r in self.bigon_through(u, c, 3):
                    if r % 2 == 0:
                        continue
                    instr = Instruction(c, u, r)
                    try:
                        self.move_data(instr, protected)
                    except MoveError:
                        continue
                    out.append(instr)
        return out


# -- construction and text form -------------------------------------------


def bloboid(n: int) -> Gem:
    """Ring of n pairs, each joined in colors 0, 1, 2, chained up by color 3.

    bloboid(1) is the 2-vertex graph encoding the 3-sphere.
    """
    if n < 1:
        raise GemError("need at least one pair")
    shared = [(2 * i - 1, 2 * i) for i in range(1, n + 1)]
    chain = [(2 * i, 2 * i + 1) for i in range(1, n)] + [(2 * n, 1)]
    return Gem.from_pairs(2 * n, {0: shared, 1: shared, 2: shared, 3: chain})


def format_gem(g: Gem) -> str:
    """Header ``gem <count>`` then one line per vertex: its four neighbors by color."""
    lines = [f"gem {g.n_vertices}"]
    for v in range(1, g.n_vertices + 1):
        lines.append(f"{v}: " + " ".join(str(g.neighbor(v, c)) for c in COLORS))
    return "\n".join(lines) + "\n"


_VERTEX_RE = re.compile(r"^(\d+)\s*:\s*(\d+)\s+(\d+)\s+(\d+)\s+(\d+)$")


def parse_gem(text: str) -> Gem:
    """Inverse of format_gem.  ``#`` comments and blank lines are skipped.

    Every malformed input is reported with the 1-based line number it was
    found on; matching conflicts point at the later of the two lines involved.
    """
    count = 0
    claims: dict[int, tuple[int, tuple[int, int, int, int]]] = {}
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if not count:
            parts = line.split()
            if len(parts) != 2 or parts[0] != "gem":
                raise GemError(f"line {ln}: expected header 'gem <vertex count>'")
            try:
                count = int(parts[1])
            except ValueError:
                raise GemError(f"line {ln}: bad vertex count {parts[1]!r}") from None
            if count < 2 or count % 2:
                raise GemError(f"line {ln}: vertex count must be even and positive, got {count}")
            continue
        m = _VERTEX_RE.match(line)
        if m is None:
            raise GemError(f"line {ln}: expected '<vertex>: <n0> <n1> <n2> <n3>'")
        v = int(m.group(1))
        if not 1 <= v <= count:
            raise GemError(f"line {ln}: vertex {v} out of range 1..{count}")
        if v in claims:
            raise GemError(f"line {ln}: vertex {v} already defined on line {claims[v][0]}")
        ns = tuple(int(m.group(2 + c)) for c in COLORS)
        for c, w in enumerate(ns):
            if not 1 <= w <= count:
                raise GemError(f"line {ln}: color-{c} neighbor {w} of vertex {v} out of range")
            if w == v:
                raise GemError(f"line {ln}: vertex {v} is its own color-{c} neighbor")
        claims[v] = (ln, ns)
    if not count:
        raise GemError("line 1: missing 'gem <vertex count>' header")
    adj = [[0] * (count + 1) for _ in COLORS]
    for v, (ln, ns) in sorted(claims.items()):
        for c, w in enumerate(ns):
            if w not in claims:
                raise GemError(f"line {ln}: vertex {v} references undefined vertex {w}")
            back = claims[w][1][c]
            if back != v:
                raise GemError(
                    f"line {max(ln, claims[w][0])}: color {c} repeated at vertex {w} "
                    f"(edges {v}-{w} and {w}-{back} disagree)"
                )
            adj[c][v] = w
    missing = [v for v in range(1, count + 1) if v not in claims]
    if missing:
        raise GemError(f"vertex {missing[0]} declared by the header but never defined")
    return Gem(adj)
