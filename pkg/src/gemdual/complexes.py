"""Mutable triangulated 2-skeleton of the dual ball, with open-cell bookkeeping.

The complex stores simplices (vertices, triangles) plus the open cells they
assemble into: 2-dimensional faces (triangle patches), 1-dimensional arcs
(edge paths between corner vertices) and 0-dimensional corner cells.  Every
simplex is owned by exactly one cell: a triangle by its face, an edge by the
arc it lies on or else by the face it is interior to, a vertex by its corner
cell, its arc, or its face.  ``check`` verifies all of this.

Cells carry back-references into the colored graph they are dual to; those are
plain data here and are maintained by the surgery engine.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator

from gemdual.face_types import FaceType

Coord = tuple[float, float, float]
Tri = tuple[int, int, int]
E2 = tuple[int, int]

VERTEX_KINDS = ("z0", "z1", "z2", "z3", "a", "b", "B", "m")

COLOR_NAMES = {0: "pink", 1: "blue", 2: "red", 3: "green"}


class ComplexError(Exception):
    """The complex violates a structural requirement."""


def tri_key(a: int, b: int, c: int) -> Tri:
    if a == b or b == c or a == c:
        raise ComplexError(f"degenerate triangle ({a}, {b}, {c})")
    return tuple(sorted((a, b, c)))  # type: ignore[return-value]


def edge_key(a: int, b: int) -> E2:
    if a == b:
        raise ComplexError(f"degenerate edge ({a}, {b})")
    return (a, b) if a < b else (b, a)


def tri_edges(t: Tri) -> tuple[E2, E2, E2]:
    a, b, c = t
    return (a, b), (a, c), (b, c)


@dataclass
class Vertex0:
    vid: int
    kind: str
    index: int
    coord: Coord
    depth: int = 0

    @property
    def name(self) -> str:
        if self.kind in ("z0", "z1", "z2"):
            return self.kind
        if self.kind == "z3":
            return f"z3^{self.index}"
        return f"{self.kind}{self.index}"


@dataclass
class Face:
    """Open 2-cell: a disk of triangles dual to one colored graph edge."""

    fid: int
    color: int
    triangles: set[Tri]
    gem_edge: tuple[int, int, int]
    ftype: FaceType
    medial: int | None = None
    hub: int | None = None
    zeta: int | None = None
    refined: bool = False

    @property
    def color_name(self) -> str:
        return COLOR_NAMES[self.color]


@dataclass
class Arc:
    """Open 1-cell: an edge path whose endpoints are corner cells."""

    aid: int
    path: tuple[int, ...]
    colors: tuple[int, int]
    gem_cycle: tuple[int, ...]

    @property
    def edges(self) -> tuple[E2, ...]:
        return tuple(edge_key(self.path[i], self.path[i + 1]) for i in range(len(self.path) - 1))


@dataclass
class Node:
    """0-cell at a corner vertex, dual to one residue of the colored graph."""

    nid: int
    vid: int
    gem_ref: tuple


@dataclass
class Complex:
    vertices: dict[int, Vertex0] = field(default_factory=dict)
    faces: dict[int, Face] = field(default_factory=dict)
    arcs: dict[int, Arc] = field(default_factory=dict)
    nodes: dict[int, Node] = field(default_factory=dict)
    # incremental simplex indexes
    tri_face: dict[Tri, int] = field(default_factory=dict)
    edge_tris: dict[E2, set[Tri]] = field(default_factory=dict)
    _serials: dict[str, int] = field(default_factory=dict)
    _next: dict[str, int] = field(
        default_factory=lambda: {"v": 1, "f": 1, "a": 1, "n": 1}
    )

    # -- construction ------------------------------------------------------

    def _take(self, key: str) -> int:
        i = self._next[key]
        self._next[key] = i + 1
        return i

    def add_vertex(self, kind: str, coord: Coord, depth: int = 0, index: int | None = None) -> int:
        if kind not in VERTEX_KINDS:
            raise ComplexError(f"unknown vertex kind {kind!r}")
        if index is None:
            index = self._serials.get(kind, 0) + 1
        self._serials[kind] = max(self._serials.get(kind, 0), index)
        vid = self._take("v")
        self.vertices[vid] = Vertex0(vid, kind, index, tuple(float(x) for x in coord), depth)
        return vid

    def add_face(
        self,
        color: int,
        triangles: Iterable[Tri],
        gem_edge: tuple[int, int, int],
        ftype: FaceType,
        medial: int | None = None,
        hub: int | None = None,
        zeta: int | None = None,
        refined: bool = False,
    ) -> int:
        fid = self._take("f")
        face = Face(fid, color, set(), gem_edge, ftype, medial, hub, zeta, refined)
        self.faces[fid] = face
        for t in triangles:
            self.attach_triangle(fid, t)
        return fid

    def add_arc(self, path: Iterable[int], colors: tuple[int, int], gem_cycle: tuple[int, ...]) -> int:
        aid = self._take("a")
        self.arcs[aid] = Arc(aid, tuple(path), tuple(sorted(colors)), gem_cycle)  # type: ignore[arg-type]
        return aid

    def add_node(self, vid: int, gem_ref: tuple) -> int:
        nid = self._take("n")
        self.nodes[nid] = Node(nid, vid, gem_ref)
        return nid

    # -- mutation ------------------------------------------------------------

    def attach_triangle(self, fid: int, t: Tri) -> None:
        t = tri_key(*t)
        if t in self.tri_face:
            raise ComplexError(f"triangle {t} already belongs to face {self.tri_face[t]}")
        self.faces[fid].triangles.add(t)
        self.tri_face[t] = fid
        for e in tri_edges(t):
            self.edge_tris.setdefault(e, set()).add(t)

    def detach_triangle(self, t: Tri) -> None:
        t = tri_key(*t)
        fid = self.tri_face.pop(t, None)
        if fid is None:
            raise ComplexError(f"triangle {t} is not in the complex")
        self.faces[fid].triangles.discard(t)
        for e in tri_edges(t):
            tris = self.edge_tris.get(e)
            if tris is not None:
                tris.discard(t)
                if not tris:
                    del self.edge_tris[e]

    def remove_face(self, fid: int) -> None:
        for t in list(self.faces[fid].triangles):
            self.detach_triangle(t)
        del self.faces[fid]

    def remove_arc(self, aid: int) -> None:
        del self.arcs[aid]

    def remove_node(self, nid: int) -> None:
        del self.nodes[nid]

    def drop_vertex(self, vid: int) -> None:
        """Remove a vertex no triangle or arc uses anymore."""
        for t in self.tri_face:
            if vid in t:
                raise ComplexError(f"vertex {vid} still used by triangle {t}")
        for arc in self.arcs.values():
            if vid in arc.path:
                raise ComplexError(f"vertex {vid} still used by arc {arc.aid}")
        del self.vertices[vid]

    def swap_vertex_in_face(self, fid: int, old: int, new: int) -> int:
        """Replace ``old`` by ``new`` in every triangle of the face that uses it.

        Returns the number of rewritten triangles.  Face landmark fields that
        pointed at ``old`` follow the swap.
        """
        face = self.faces[fid]
        hit = [t for t in face.triangles if old in t]
        for t in hit:
            self.detach_triangle(t)
        for t in hit:
            self.attach_triangle(fid, tri_key(*(new if v == old else v for v in t)))
        if face.medial == old:
            face.medial = new
        if face.hub == old:
            face.hub = new
        if face.zeta == old:
            face.zeta = new
        return len(hit)

    # -- queries ---------------------------------------------------------------

    def edges(self) -> Iterator[E2]:
        return iter(self.edge_tris)

    def census(self) -> tuple[int, int, int]:
        """(vertices, edges, triangles)."""
        return len(self.vertices), len(self.edge_tris), len(self.tri_face)

    def face_edge_use(self, fid: int) -> dict[E2, int]:
        use: dict[E2, int] = {}
        for t in self.faces[fid].triangles:
            for e in tri_edges(t):
                use[e] = use.get(e, 0) + 1
        return use

    def face_boundary_edges(self, fid: int) -> set[E2]:
        return {e for e, n in self.face_edge_use(fid).items() if n == 1}

    def face_vertices(self, fid: int) -> set[int]:
        out: set[int] = set()
        for t in self.faces[fid].triangles:
            out.update(t)
        return out

    def face_interior_vertices(self, fid: int) -> set[int]:
        boundary = {v for e in self.face_boundary_edges(fid) for v in e}
        return self.face_vertices(fid) - boundary

    def arc_of_edge(self) -> dict[E2, int]:
        owner: dict[E2, int] = {}
        for arc in self.arcs.values():
            for e in arc.edges:
                if e in owner:
                    raise ComplexError(f"edge {e} lies on two arcs")
                owner[e] = arc.aid
        return owner

    def face_arcs(self, fid: int) -> list[int]:
        """Arcs making up the face's boundary, by edge ownership."""
        owned = self.arc_of_edge()
        aids = []
        for e in self.face_boundary_edges(fid):
            aid = owned.get(e)
            if aid is not None and aid not in aids:
                aids.append(aid)
        return sorted(aids)

    def node_at(self, vid: int) -> Node | None:
        for node in self.nodes.values():
            if node.vid == vid:
                return node
        return None

    def faces_on_arc(self, aid: int) -> list[int]:
        arc = self.arcs[aid]
        fids: set[int] = set()
        for e in arc.edges:
            for t in self.edge_tris.get(e, ()):
                fids.add(self.tri_face[t])
        return sorted(fids)

    def names(self) -> dict[int, str]:
        return {vid: v.name for vid, v in self.vertices.items()}

    def signature(self) -> tuple:
        """Canonical structural form, independent of id assignment order.

        Vertices are identified by (kind, index), which construction keeps
        unique; everything else is re-expressed in those labels and sorted.
        """
        label = {vid: (v.kind, v.index) for vid, v in self.vertices.items()}
        if len(set(label.values())) != len(label):
            raise ComplexError("vertex (kind, index) labels are not unique")
        faces = sorted(
            (
                f.color,
                str(f.ftype),
                f.gem_edge,
                tuple(sorted(tuple(sorted(label[v] for v in t)) for t in f.triangles)),
            )
            for f in self.faces.values()
        )
        arcs = sorted(
            (a.colors, tuple(label[v] for v in a.path), a.gem_cycle) for a in self.arcs.values()
        )
        nodes = sorted((label[n.vid], n.gem_ref) for n in self.nodes.values())
        return (tuple(faces), tuple(arcs), tuple(nodes))

    # -- validation --------------------------------------------------------------

    def check(self, level: int = 1) -> list[str]:
        """Structural invariants; returns human-readable problem strings."""
        problems: list[str] = []
        self._check_simplices(problems)
        if level >= 1 and not problems:
            self._check_cells(problems)
        return problems

    def _check_simplices(self, problems: list[str]) -> None:
        for t, fid in self.tri_face.items():
            if fid not in self.faces:
                problems.append(f"triangle {t} points at missing face {fid}")
            elif t not in self.faces[fid].triangles:
                problems.append(f"triangle {t} missing from face {fid}")
            for v in t:
                if v not in self.vertices:
                    problems.append(f"triangle {t} uses missing vertex {v}")
        for fid, face in self.faces.items():
            if not face.triangles:
                problems.append(f"face {fid} is empty")
            for t in face.triangles:
                if self.tri_face.get(t) != fid:
                    problems.append(f"face {fid} claims triangle {t} owned elsewhere")
        for arc in self.arcs.values():
            if len(arc.path) < 2:
                problems.append(f"arc {arc.aid} path too short")
            for v in arc.path:
                if v not in self.vertices:
                    problems.append(f"arc {arc.aid} uses missing vertex {v}")
        for node in self.nodes.values():
            if node.vid not in self.vertices:
                problems.append(f"node {node.nid} at missing vertex {node.vid}")

    def _check_cells(self, problems: list[str]) -> None:
        # faces must be connected disks
        for fid, face in self.faces.items():
            use = self.face_edge_use(fid)
            if any(n > 2 for n in use.values()):
                problems.append(f"face {fid} folds onto an edge three times")
                continue
            boundary = {e for e, n in use.items() if n == 1}
            verts = self.face_vertices(fid)
            chi = len(verts) - len(use) + len(face.triangles)
            if chi != 1:
                problems.append(f"face {fid} is not a disk (chi={chi})")
            if not self._single_cycle(boundary):
                problems.append(f"face {fid} boundary is not one closed cycle")
            if not self._tri_connected(face.triangles):
                problems.append(f"face {fid} is not connected")

        # arcs: pairwise edge-disjoint, endpoints at corner cells
        try:
            arc_owner = self.arc_of_edge()
        except ComplexError as exc:
            problems.append(str(exc))
            arc_owner = {}
        node_vids = {n.vid for n in self.nodes.values()}
        if len(node_vids) != len(self.nodes):
            problems.append("two corner cells share a vertex")
        for arc in self.arcs.values():
            if arc.path[0] not in node_vids or arc.path[-1] not in node_vids:
                problems.append(f"arc {arc.aid} endpoint is not a corner cell")
            for v in arc.path[1:-1]:
                if v in node_vids:
                    problems.append(f"arc {arc.aid} passes through corner vertex {v}")
            for e in arc.edges:
                if e not in self.edge_tris:
                    problems.append(f"arc {arc.aid} edge {e} bounds no triangle")

        # ownership partition for edges
        for fid in self.faces:
            for e in self.face_boundary_edges(fid):
                if e not in arc_owner:
                    problems.append(f"boundary edge {e} of face {fid} lies on no arc")
        for e, aid in arc_owner.items():
            for t in self.edge_tris.get(e, ()):
                fid = self.tri_face[t]
                if e not in self.face_boundary_edges(fid):
                    problems.append(f"arc edge {e} is interior to face {fid}")

        # ownership partition for vertices
        interior_owner: dict[int, int] = {}
        for fid in self.faces:
            for v in self.face_interior_vertices(fid):
                if v in interior_owner:
                    problems.append(f"vertex {v} interior to faces {interior_owner[v]} and {fid}")
                interior_owner[v] = fid
        arc_interior = {v for a in self.arcs.values() for v in a.path[1:-1]}
        for v in self.vertices:
            ways = (v in node_vids) + (v in arc_interior) + (v in interior_owner)
            if ways != 1:
                problems.append(f"vertex {v} owned {ways} ways")

    @staticmethod
    def _single_cycle(edges: set[E2]) -> bool:
        if not edges:
            return False
        deg: dict[int, int] = {}
        for a, b in edges:
            deg[a] = deg.get(a, 0) + 1
            deg[b] = deg.get(b, 0) + 1
        if any(d != 2 for d in deg.values()):
            return False
        # connected?
        start = next(iter(edges))[0]
        seen = {start}
        stack = [start]
        adj: dict[int, list[int]] = {}
        for a, b in edges:
            adj.setdefault(a, []).append(b)
            adj.setdefault(b, []).append(a)
        while stack:
            v = stack.pop()
            for w in adj[v]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return len(seen) == len(deg)

    @staticmethod
    def _tri_connected(tris: set[Tri]) -> bool:
        if not tris:
            return False
        index: dict[E2, list[Tri]] = {}
        for t in tris:
            for e in tri_edges(t):
                index.setdefault(e, []).append(t)
        start = next(iter(tris))
        seen = {start}
        stack = [start]
        while stack:
            t = stack.pop()
            for e in tri_edges(t):
                for t2 in index[e]:
                    if t2 not in seen:
                        seen.add(t2)
                        stack.append(t2)
        return len(seen) == len(tris)

    # -- shells (3-cells are derived, not stored) ---------------------------------

    def shell_is_sphere(self, fids: Iterable[int]) -> bool:
        """Do these faces' triangles together form a closed 2-sphere?"""
        tris: set[Tri] = set()
        for fid in fids:
            tris |= self.faces[fid].triangles
        use: dict[E2, int] = {}
        verts: set[int] = set()
        for t in tris:
            verts.update(t)
            for e in tri_edges(t):
                use[e] = use.get(e, 0) + 1
        if any(n != 2 for n in use.values()):
            return False
        if not self._tri_connected(tris):
            return False
        return len(verts) - len(use) + len(tris) == 2


def copy_face(
    cx: Complex,
    fid: int,
    fresh_arcs: Iterable[int],
    lift: Coord = (0.0, 0.0, 0.0),
) -> tuple[int, dict[int, int]]:
    """Duplicate a face, sharing its boundary except along the given arcs.

    Interior vertices of the listed arcs are recreated with their own kind and
    a fresh serial; interior vertices of the face reappear as anonymous
    interior points (kind m).  ``lift`` displaces every fresh vertex so copies
    do not sit inside their originals.  Returns the new face id and the vertex
    map (old id -> image) covering every vertex of the face.
    """
    face = cx.faces[fid]
    remap: dict[int, int] = {}
    for aid in fresh_arcs:
        for v in cx.arcs[aid].path[1:-1]:
            old = cx.vertices[v]
            coord = tuple(c + d for c, d in zip(old.coord, lift))
            remap[v] = cx.add_vertex(old.kind, coord, old.depth + 1)
    for v in cx.face_interior_vertices(fid):
        old = cx.vertices[v]
        coord = tuple(c + d for c, d in zip(old.coord, lift))
        remap[v] = cx.add_vertex("m", coord, old.depth + 1)
    vmap = {v: remap.get(v, v) for v in cx.face_vertices(fid)}
    new_fid = cx.add_face(
        color=face.color,
        triangles=[tri_key(*(vmap[v] for v in t)) for t in face.triangles],
        gem_edge=face.gem_edge,
        ftype=face.ftype,
        medial=vmap.get(face.medial, face.medial),
        hub=vmap.get(face.hub, face.hub),
        zeta=vmap.get(face.zeta, face.zeta),
        refined=face.refined,
    )
    return new_fid, vmap


def relabel_vertex0(cx: Complex, vid: int) -> None:
    """Promote a medial vertex to the wall kind, keeping its coordinates."""
    v = cx.vertices[vid]
    if v.kind not in ("a", "b"):
        raise ComplexError(f"vertex {vid} has kind {v.kind}, expected a medial")
    serial = cx._serials.get("B", 0) + 1
    cx._serials["B"] = serial
    v.kind = "B"
    v.index = serial


def vdist(p: Coord, q: Coord) -> float:
    return math.dist(p, q)
