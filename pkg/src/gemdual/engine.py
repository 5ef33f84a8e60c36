"""Surgery on the dual ball triangulation, one instruction at a time.

Each instruction cancels a three-fold pair of the colored graph and re-inserts
a two-fold pair across a tail edge.  On the dual side one move performs, in
order:

1. split the tail face toward its column corner, if it has not been split yet;
2. duplicate the split tail, sharing all boundary except its medial arc;
3. retire the shared medial vertex: each half gets a fresh medial of its own,
   and every surviving page of its half of the split 2-color cycle (cut cap
   included) re-hangs accordingly;
4. promote the retired medial to the wall's mid-air corner: the cancelled
   column's opposite-family page pair is kept and extended through it, the
   column's base fan is rebuilt from it, and the column's tail-family pair is
   removed (its apex becomes an interior vertex of the wall);
5. update arcs, cells and back-references against the new graph.

Every simplex and cell delta here was frozen against hand-worked runs before
the implementation, and the bookkeeping is re-checkable per step via
``Complex.check`` and ``verify_duality``.
"""

from __future__ import annotations

import copy as _copy
import logging
from dataclasses import dataclass, field

from gemdual import bounds
from gemdual.complexes import Complex, ComplexError, copy_face, relabel_vertex0, tri_key
from gemdual.dualizer import build_complex, face_index, ring_order, verify_duality
from gemdual.face_types import FaceType, expected_multiset, transition_outputs
from gemdual.gem import Gem, Instruction, MoveData, arc_edges
from gemdual.placement import SettleFrame, settle_move

logger = logging.getLogger(__name__)

# wall and fan retriangulations tried while settling, in order; the first
# entry is the plain construction below, later ones move the load-bearing
# blades onto other corners of the same polygons
_SITE_VARIANTS = (
    ("W", "W"),
    ("ro", "W"),
    ("z2", "W"),
    ("W", "zeta"),
    ("z2", "zeta"),
)


class EngineError(ComplexError):
    """The surgery bookkeeping reached an inconsistent state."""


@dataclass(frozen=True)
class PlacementParams:
    """Coordinates for the mid-air vertices a move creates.

    The closed forms below give every move its first guess.  The wall vertex
    takes the slot between the cut cap's apex and the cancelled column's
    apex, at height fraction ``wall_lift`` of that gap, offset radially by
    ``wall_door`` toward the doorway the retired medial leaves behind.
    Fresh copy vertices tuck into the slot between the tail's column corner
    and the cut cap's apex: they keep ``copy_keep`` of their radial offset
    and rise ``copy_lift`` of the gap.

    The guesses are exact for a move into empty space, but once several
    moves crowd one column no formula survives; with ``settle`` on (the
    default) each move then runs the placement search from placement.py
    until the touched triangles are conflict-free again.  Turn it off for
    runs that only need counts, the search is the expensive part.
    """

    wall_door: float = 0.2
    wall_lift: float = 0.6
    copy_keep: float = 0.05
    copy_lift: float = 0.7
    settle: bool = True

    def wall_point(self, door, cap, hub):
        t = self.wall_door
        return (
            hub[0] + t * (door[0] - hub[0]),
            hub[1] + t * (door[1] - hub[1]),
            cap[2] + self.wall_lift * (hub[2] - cap[2]),
        )

    def copy_point(self, p, zeta, cap):
        k = self.copy_keep
        return (
            zeta[0] + k * (p[0] - zeta[0]),
            zeta[1] + k * (p[1] - zeta[1]),
            zeta[2] + self.copy_lift * (cap[2] - zeta[2]),
        )


def _wall_variant(which: str, rim_other: int, hub: int, z2: int, zeta: int, w: int) -> list:
    """One triangulation of the wall pentagon (rim_other, hub, z2, zeta, w).

    The retired medial's two flaps onto the hub always stay; these three
    triangles cover the rest.  Fans from hub or zeta would run an edge up
    the column axis through intermediate apexes, so only the other three
    corners are offered.
    """
    if which == "W":
        tris = [(z2, zeta, w), (z2, w, hub), (rim_other, hub, w)]
    elif which == "ro":
        tris = [(rim_other, hub, z2), (rim_other, z2, zeta), (rim_other, zeta, w)]
    else:
        tris = [(z2, zeta, w), (z2, w, rim_other), (z2, rim_other, hub)]
    return [tri_key(*t) for t in tris]


def _fan_variant(which: str, w: int, z0v: int, z1v: int, fan_path: tuple) -> list:
    """One fan of the rebuilt base polygon (w, far rim corner, *fan path)."""
    other = z0v if fan_path[0] == z1v else z1v
    poly = [w, other, *fan_path]
    k = {"W": 0, "prev": len(poly) - 2, "zeta": len(poly) - 1}[which]
    n = len(poly)
    return [
        tri_key(poly[k], poly[(k + i) % n], poly[(k + i + 1) % n])
        for i in range(1, n - 1)
    ]


@dataclass
class MoveReport:
    step: int
    instruction: str
    tail_type: str
    delta: tuple[int, int, int]
    bound: tuple[int, int, int]
    census: tuple[int, int, int]
    produced: list[str]
    expected: list[str]
    notes: list[str] = field(default_factory=list)

    @property
    def within_bound(self) -> bool:
        return all(d <= b for d, b in zip(self.delta, self.bound))

    @property
    def conforms(self) -> bool:
        return self.produced == self.expected

    def stats_dict(self) -> dict:
        """Exactly the per-step fields the bound audit works with."""
        return {
            "step": self.step,
            "delta0": self.delta[0],
            "delta1": self.delta[1],
            "delta2": self.delta[2],
            "bound0": self.bound[0],
            "bound1": self.bound[1],
            "bound2": self.bound[2],
            "tail_type": self.tail_type,
        }

    def as_dict(self) -> dict:
        out = self.stats_dict()
        out.update(
            {
                "instruction": self.instruction,
                "within_bound": self.within_bound,
                "census": list(self.census),
                "produced": self.produced,
                "expected": self.expected,
                "conforms": self.conforms,
                "notes": self.notes,
            }
        )
        return out


@dataclass(frozen=True)
class Balloon:
    """The located site of one move: the two cells of the cancelled pair, the
    three faces they share, the two cut caps, and the tail face."""

    md: MoveData
    shared: tuple[int, int, int]  # fids dual to the pair's edges, by color 0,1,2
    green_x: int
    green_y: int
    tail: int


class Engine:
    """Holds a graph and its dual complex, and applies instructions to both."""

    def __init__(
        self,
        gem: Gem,
        rim: float = 1.0,
        rise: float = 1.0,
        placement: PlacementParams | None = None,
    ) -> None:
        self.start_order = ring_order(gem)
        self.gem = gem
        self.cx = build_complex(gem, rim, rise)
        self.rim = rim
        self.rise = rise
        self.placement = placement or PlacementParams()
        self.fidx = face_index(self.cx)
        self.aidx = {(a.colors, a.gem_cycle): a.aid for a in self.cx.arcs.values()}
        self.node_at_vid = {n.vid: n.nid for n in self.cx.nodes.values()}
        self.step = 0
        self.reports: list[MoveReport] = []
        self.refine_events: dict[int, int] = {}

    # -- small helpers -------------------------------------------------------

    def _rim_vid(self, kind: str) -> int:
        for vid, v in self.cx.vertices.items():
            if v.kind == kind:
                return vid
        raise EngineError(f"missing rim vertex {kind}")

    def _face_arc(self, fid: int, colors: tuple[int, int]) -> int:
        colors = tuple(sorted(colors))
        hits = [aid for aid in self.cx.face_arcs(fid) if self.cx.arcs[aid].colors == colors]
        if len(hits) != 1:
            raise EngineError(f"face {fid} has {len(hits)} boundary arcs of family {colors}")
        return hits[0]

    def _retag_arc(self, aid: int, cycle: tuple[int, ...]) -> None:
        arc = self.cx.arcs[aid]
        del self.aidx[(arc.colors, arc.gem_cycle)]
        arc.gem_cycle = cycle
        self.aidx[(arc.colors, cycle)] = aid

    def _drop_arc(self, aid: int) -> None:
        arc = self.cx.arcs[aid]
        del self.aidx[(arc.colors, arc.gem_cycle)]
        self.cx.remove_arc(aid)

    def _add_arc(self, path, colors, cycle) -> int:
        aid = self.cx.add_arc(path, colors, cycle)
        self.aidx[(tuple(sorted(colors)), cycle)] = aid
        return aid

    def _move_ref(self, old_key, new_key) -> int:
        fid = self.fidx.pop(old_key)
        self.fidx[new_key] = fid
        self.cx.faces[fid].gem_edge = new_key
        return fid

    def legal_instructions(self) -> list[Instruction]:
        return self.gem.legal_instructions()

    def locate_balloon(self, instr: Instruction) -> Balloon:
        """Validate an instruction against graph and complex, resolve the site.

        The two cells of the cancelled pair must share exactly the three faces
        dual to the pair's 2-fold-colored edges, and the tail face must share
        an edge with the tail-colored one of them.
        """
        md = self.gem.move_data(instr)

        def ekey(a: int, b: int, col: int) -> tuple[int, int, int]:
            return (a, b, col) if a < b else (b, a, col)

        try:
            shared = tuple(self.fidx[ekey(md.u, md.v, col)] for col in (0, 1, 2))
            green_x = self.fidx[ekey(md.u, md.x, 3)]
            green_y = self.fidx[ekey(md.v, md.y, 3)]
            tail = self.fidx[ekey(md.r, md.s, md.color)]
        except KeyError as exc:
            raise EngineError(f"no face is indexed at gem edge {exc}") from None
        u_cell = {self.fidx[ekey(md.u, self.gem.neighbor(md.u, col), col)] for col in range(4)}
        v_cell = {self.fidx[ekey(md.v, self.gem.neighbor(md.v, col), col)] for col in range(4)}
        if u_cell & v_cell != set(shared):
            raise EngineError(f"cells of pair ({md.u}, {md.v}) do not share exactly 3 faces")
        for fid, want in ((green_x, "G"), (green_y, "G")):
            if self.cx.faces[fid].ftype.kind != want:
                raise EngineError("cap bookkeeping is broken")
        tail_edges = set(self.cx.face_boundary_edges(tail))
        cone_edges = set(self.cx.face_boundary_edges(shared[md.color]))
        if not tail_edges & cone_edges:
            raise EngineError("tail face does not border the cancelled column")
        return Balloon(md=md, shared=shared, green_x=green_x, green_y=green_y, tail=tail)

    # -- split toward the column corner ----------------------------------------

    def refine_face(self, fid: int) -> bool:
        """Split the face along a triangle path from its medial to its column
        corner; returns False when the structure already provides the path
        (then only the flag is set)."""
        face = self.cx.faces[fid]
        if face.refined:
            return False
        if face.medial is None or face.zeta is None:
            raise EngineError(f"face {fid} has no medial/corner landmarks to split")
        self.refine_events[fid] = self.refine_events.get(fid, 0) + 1
        if self.refine_events[fid] > 1:
            raise EngineError(f"face {fid} got split twice")
        if self._m_path_exists(fid, face.medial, face.zeta):
            face.refined = True
            return False

        path = self._tri_path(fid, face.medial, face.zeta)
        crossed: list[tuple[int, int]] = []
        for t1, t2 in zip(path, path[1:]):
            shared = tuple(sorted(set(t1) & set(t2)))
            if len(shared) != 2:
                raise EngineError("split path steps over a non-edge")
            crossed.append(shared)  # type: ignore[arg-type]
        mids = []
        for a, b in crossed:
            pa, pb = self.cx.vertices[a], self.cx.vertices[b]
            coord = tuple((x + y) / 2.0 for x, y in zip(pa.coord, pb.coord))
            mids.append(self.cx.add_vertex("m", coord, max(pa.depth, pb.depth)))

        # first and last triangles split in two, interior ones in three
        for i, t in enumerate(path):
            self.cx.detach_triangle(t)
            if i == 0:
                (p, q), m = crossed[0], mids[0]
                v0 = face.medial
                self.cx.attach_triangle(fid, tri_key(v0, p, m))
                self.cx.attach_triangle(fid, tri_key(v0, m, q))
            elif i == len(path) - 1:
                (p, q), m = crossed[-1], mids[-1]
                self.cx.attach_triangle(fid, tri_key(face.zeta, p, m))
                self.cx.attach_triangle(fid, tri_key(face.zeta, m, q))
            else:
                e_in, e_out = crossed[i - 1], crossed[i]
                m_in, m_out = mids[i - 1], mids[i]
                (shared,) = set(e_in) & set(e_out)
                far_in = next(v for v in e_in if v != shared)
                far_out = next(v for v in e_out if v != shared)
                self.cx.attach_triangle(fid, tri_key(shared, m_in, m_out))
                self.cx.attach_triangle(fid, tri_key(m_in, far_in, m_out))
                self.cx.attach_triangle(fid, tri_key(far_in, far_out, m_out))
        face.refined = True
        return True

    def _m_path_exists(self, fid: int, start: int, goal: int) -> bool:
        adj: dict[int, set[int]] = {}
        for t in self.cx.faces[fid].triangles:
            for i in range(3):
                for j in range(3):
                    if i != j:
                        adj.setdefault(t[i], set()).add(t[j])
        seen = {start}
        stack = [start]
        while stack:
            v = stack.pop()
            for w in adj.get(v, ()):
                if w == goal:
                    return True
                if w not in seen and self.cx.vertices[w].kind == "m":
                    seen.add(w)
                    stack.append(w)
        return False

    def _tri_path(self, fid: int, medial: int, zeta: int):
        face = self.cx.faces[fid]
        use = self.cx.face_edge_use(fid)
        interior = {e for e, n in use.items() if n == 2}
        nbrs: dict[tuple, list[tuple]] = {}
        by_edge: dict[tuple[int, int], list] = {}
        for t in face.triangles:
            for e in ((t[0], t[1]), (t[0], t[2]), (t[1], t[2])):
                if e in interior:
                    by_edge.setdefault(e, []).append(t)
        for pair in by_edge.values():
            if len(pair) == 2:
                nbrs.setdefault(pair[0], []).append(pair[1])
                nbrs.setdefault(pair[1], []).append(pair[0])
        starts = sorted(t for t in face.triangles if medial in t)
        goals = {t for t in face.triangles if zeta in t}
        parent: dict[tuple, tuple | None] = {t: None for t in starts}
        queue = starts[:]
        while queue:
            queue.sort()
            nxt = []
            for t in queue:
                if t in goals:
                    out = [t]
                    while parent[out[-1]] is not None:
                        out.append(parent[out[-1]])
                    return out[::-1]
                for t2 in sorted(nbrs.get(t, [])):
                    if t2 not in parent:
                        parent[t2] = t
                        nxt.append(t2)
            queue = nxt
        raise EngineError(f"face {fid} has no split path from medial to corner")

    # -- the move ---------------------------------------------------------------

    def apply(self, instr: Instruction, check_level: int = 0) -> MoveReport:
        gem0 = self.gem
        site = self.locate_balloon(instr)
        md = site.md
        new_gem, _ = gem0.apply_primal_bp(instr)
        cx = self.cx
        before = cx.census()
        c, cbar = md.color, 1 - md.color
        rim_tail = self._rim_vid("z1" if c == 0 else "z0")
        rim_other = self._rim_vid("z0" if c == 0 else "z1")
        z2 = self._rim_vid("z2")

        def ekey(a: int, b: int, col: int) -> tuple[int, int, int]:
            return (a, b, col) if a < b else (b, a, col)

        tail_fid = site.tail
        tail = cx.faces[tail_fid]
        tail_type0 = tail.ftype
        if tail_type0.kind != ("P" if c == 0 else "B"):
            raise EngineError(
                f"tail face of color {c} carries tag {tail_type0}, bookkeeping is broken"
            )
        expected_types = transition_outputs(tail_type0)
        was_unsplit = not tail.refined

        cone_c_fid = site.shared[c]
        wall_fid = site.shared[cbar]
        red_fid = site.shared[2]
        green_x_fid, green_y_fid = site.green_x, site.green_y
        del self.fidx[ekey(md.u, md.v, c)]
        del self.fidx[ekey(md.u, md.x, 3)]
        del self.fidx[ekey(md.v, md.y, 3)]

        hub = cx.faces[wall_fid].hub
        if hub is None or cx.vertices[hub].kind != "z3":
            raise EngineError("cancelled column has no apex landmark")
        zeta = tail.zeta
        b_old = tail.medial
        if zeta is None or b_old is None:
            raise EngineError("tail face lost its landmarks")
        door_coord = cx.vertices[b_old].coord
        tris_before = set(cx.tri_face) if self.placement.settle else None

        # 1. split the tail if this move is the first to run over it
        structurally_split = self.refine_face(tail_fid)

        # the tail's three boundary arcs, resolved before any of them changes
        medial_arc = self._face_arc(tail_fid, (c, 3))
        tail_rim_arc = self._face_arc(tail_fid, (c, 2))
        tail_01_arc = self._face_arc(tail_fid, (0, 1))

        # 2. duplicate the split tail, fresh along the medial arc
        cap_hub = cx.faces[green_y_fid].hub
        cap_x_hub = cx.faces[green_x_fid].hub
        if cap_hub is None or cap_x_hub is None:
            raise EngineError("cut cap has no apex landmark")
        zeta_coord = cx.vertices[zeta].coord
        cap_coord = cx.vertices[cap_hub].coord
        copy_fid, vmap = copy_face(cx, tail_fid, [medial_arc])
        b_copy = vmap[b_old]
        copy_pairs = [(new, old) for old, new in vmap.items() if new != old]
        fresh_vids = [new for new, _ in copy_pairs]
        for new_vid in fresh_vids:
            v = cx.vertices[new_vid]
            v.coord = self.placement.copy_point(v.coord, zeta_coord, cap_coord)

        # 3. retire the shared medial: the in-place half gets a fresh medial at
        #    the same spot, and every surviving page of each half of the split
        #    2-color cycle (cut cap included) re-hangs on its half's medial
        old_medial = cx.vertices[b_old]
        b_inplace = cx.add_vertex(old_medial.kind, old_medial.coord, old_medial.depth)
        rehang = [(green_y_fid, b_copy), (green_x_fid, b_inplace), (tail_fid, b_inplace)]
        rehang += [
            (self.fidx[ekey(a, b, col)], b_copy) for a, b, col in arc_edges(md.fresh_arc, c)
        ]
        rehang += [
            (self.fidx[ekey(a, b, col)], b_inplace) for a, b, col in arc_edges(md.old_arc, c)
        ]
        for fid, b_new in rehang:
            swapped = cx.swap_vertex_in_face(fid, b_old, b_new)
            # a face split toward its corner carries one extra medial triangle
            if swapped not in (2, 3):
                raise EngineError(
                    f"face {fid} held {swapped} medial flaps, expected 2 or 3"
                )
        split_arc = cx.arcs[medial_arc]
        split_arc.path = (rim_tail, b_inplace, z2)
        self._add_arc(
            (rim_tail, b_copy, z2), (c, 3), new_gem.bigon_through(md.fresh_c_edge[0], c, 3)
        )

        # 4. promote the retired medial to the wall's mid-air corner
        cx.remove_face(cone_c_fid)
        for a, b in ((rim_tail, b_old), (b_old, z2)):
            if (a, b) in cx.edge_tris or (b, a) in cx.edge_tris:
                raise EngineError("a page still hangs on the retired medial")
        w_vid = b_old
        relabel_vertex0(cx, w_vid)
        cx.vertices[w_vid].coord = self.placement.wall_point(
            cx.vertices[w_vid].coord,
            cap_coord,
            cx.vertices[hub].coord,
        )
        wall = cx.faces[wall_fid]
        wall_cur = _wall_variant("W", rim_other, hub, z2, zeta, w_vid)
        for t in wall_cur:
            cx.attach_triangle(wall_fid, t)
        wall.ftype = expected_types["wall"]
        wall.zeta = zeta
        wall.refined = False

        red = cx.faces[red_fid]
        fan_path = cx.arcs[tail_rim_arc].path
        if cx.vertices[fan_path[0]].kind != ("z1" if c == 0 else "z0"):
            fan_path = fan_path[::-1]  # run rim corner -> column corner
        for t in list(red.triangles):
            cx.detach_triangle(t)
        z0v, z1v = (rim_other, rim_tail) if c == 0 else (rim_tail, rim_other)
        fan_cur = _fan_variant("W", w_vid, z0v, z1v, fan_path)
        for t in fan_cur:
            cx.attach_triangle(red_fid, t)
        red.ftype = expected_types["red"]
        red.hub = w_vid
        red.zeta = zeta
        red.medial = None
        red.refined = False

        # the cancelled column's three arcs: two die, one is re-threaded
        h_arcs = [a for a in cx.arcs.values() if hub in a.path]
        if sorted(a.colors for a in h_arcs) != [(0, 1), (0, 2), (1, 2)]:
            raise EngineError("cancelled column does not carry the three rim arcs")
        for arc in h_arcs:
            if arc.colors == (0, 1):
                self._drop_arc(arc.aid)  # its edge goes interior to the wall
            elif arc.colors == tuple(sorted((c, 2))):
                self._drop_arc(arc.aid)  # its edge disappears with the cone and fan
            else:
                del self.aidx[(arc.colors, arc.gem_cycle)]
                arc.path = (zeta, w_vid, rim_other)
                arc.gem_cycle = new_gem.bigon_through(md.u, cbar, 2)
                self.aidx[(arc.colors, arc.gem_cycle)] = arc.aid
        if (rim_tail, hub) in cx.edge_tris or (hub, rim_tail) in cx.edge_tris:
            raise EngineError("tail-side column edge survived the wall rebuild")

        # the column's corner cell dissolves into the tail's
        self.cx.remove_node(self.node_at_vid.pop(hub))
        zeta_node = self.cx.nodes[self.node_at_vid[zeta]]
        merged = next(res for res in new_gem.residues((0, 1, 2)) if md.u in res)
        zeta_node.gem_ref = ("res3", merged)

        # 5. cells and references against the new graph
        fresh_u = md.fresh_on_u_side
        new3_u = ekey(md.u, md.far_u, 3)
        new3_v = ekey(md.v, md.far_v, 3)
        self.fidx[new3_u if fresh_u else new3_v] = green_y_fid
        cx.faces[green_y_fid].gem_edge = new3_u if fresh_u else new3_v
        self.fidx[new3_v if fresh_u else new3_u] = green_x_fid
        cx.faces[green_x_fid].gem_edge = new3_v if fresh_u else new3_u

        self._move_ref(ekey(md.r, md.s, c), ekey(*md.inplace_c_edge, c))
        self.fidx[ekey(*md.fresh_c_edge, c)] = copy_fid
        cx.faces[copy_fid].gem_edge = ekey(*md.fresh_c_edge, c)

        self._retag_arc(medial_arc, new_gem.bigon_through(md.inplace_c_edge[0], c, 3))
        self._retag_arc(tail_01_arc, new_gem.bigon_through(md.u, 0, 1))
        self._retag_arc(tail_rim_arc, new_gem.bigon_through(md.u, c, 2))
        self._retag_arc(
            self.aidx[((tuple(sorted((cbar, 3)))), gem0.bigon_through(md.u, cbar, 3))],
            new_gem.bigon_through(md.u, cbar, 3),
        )
        self._retag_arc(
            self.aidx[((2, 3), gem0.bigon_through(md.u, 2, 3))],
            new_gem.bigon_through(md.u, 2, 3),
        )

        # face tags for the two tail descendants, hat on the lower cap
        copy_f = cx.faces[copy_fid]
        notes: list[str] = []
        if was_unsplit:
            primed = expected_types["copy"]
            hatted = FaceType(primed.kind, primed.k, True, True)
            cap_is_lower = cap_coord[2] < cx.vertices[cap_x_hub].coord[2]
            copy_f.ftype = hatted if cap_is_lower else primed
            tail.ftype = primed if cap_is_lower else hatted
            if not structurally_split:
                notes.append(f"degenerate-split (tail {tail_type0} already provides the path)")
            if tail_type0.k == 1:
                notes.append(
                    "stage-1 tail: the general four-output rule is enforced; the"
                    " narrower stage-1 convention (wall and fan only, fan written"
                    " one stage up) is deliberately not used, see README"
                )
        else:
            copy_f.ftype = expected_types["copy"]
            copy_f.refined = False

        if self.placement.settle:
            left = self._settle_site(
                door_coord,
                tris_before,
                [w_vid, b_inplace, *fresh_vids],
                copy_pairs,
                (wall_fid, red_fid, wall_cur, fan_cur),
                (rim_other, hub, z2, zeta, w_vid, z0v, z1v, fan_path),
            )
            if left:
                notes.append(f"{left} unresolved contacts after settling")

        self.gem = new_gem
        self.step += 1
        after = cx.census()
        produced = [str(cx.faces[f].ftype) for f in (copy_fid, wall_fid, red_fid)]
        if was_unsplit:
            produced.append(str(tail.ftype))
        report = MoveReport(
            step=self.step,
            instruction=str(instr),
            tail_type=str(tail_type0),
            delta=tuple(a - b for a, b in zip(after, before)),  # type: ignore[arg-type]
            bound=bounds.step_increment_bound(self.step),
            census=after,
            produced=sorted(produced),
            expected=expected_multiset(tail_type0),
            notes=notes,
        )
        self.reports.append(report)
        if check_level >= 1:
            problems = cx.check(1)
            if check_level >= 2:
                problems += verify_duality(cx, self.gem)
            if problems:
                raise EngineError(
                    f"step {self.step} left the complex inconsistent: " + "; ".join(problems)
                )
        logger.debug("step %d %s over %s: delta %s", self.step, instr, tail_type0, report.delta)
        return report

    # -- geometric settling ------------------------------------------------------

    def _dress_site(self, wall_fid, red_fid, wall_cur, fan_cur, wall_want, fan_want) -> bool:
        """Swap the site's wall and fan triangulations in place.  Refuses (and
        changes nothing) when a wanted triangle already exists elsewhere."""
        if wall_want == wall_cur and fan_want == fan_cur:
            return True
        removing = set(wall_cur) | set(fan_cur)
        existing = set(self.cx.tri_face) - removing
        want = list(wall_want) + list(fan_want)
        if len(set(want)) != len(want) or any(t in existing for t in want):
            return False
        for t in wall_cur:
            self.cx.detach_triangle(t)
        for t in fan_cur:
            self.cx.detach_triangle(t)
        for t in wall_want:
            self.cx.attach_triangle(wall_fid, t)
        for t in fan_want:
            self.cx.attach_triangle(red_fid, t)
        return True

    def _settle_site(self, door_coord, tris_before, movable, copy_pairs, site_fids, corners) -> int:
        """Search clean coordinates for this move's mid-air vertices, switching
        wall and fan triangulation whenever positions alone cannot reach zero.
        Returns the number of conflicts left (0 when the move settled)."""
        cx = self.cx
        wall_fid, red_fid, wall_cur, fan_cur = site_fids
        rim_other, hub, z2, zeta, w_vid, z0v, z1v, fan_path = corners
        frame = SettleFrame(
            door_xy=(door_coord[0], door_coord[1]),
            apex_zs=tuple(
                sorted({v.coord[2] for v in cx.vertices.values() if v.kind == "z3"})
            ),
            rim=self.rim,
            rise=self.rise,
        )
        midair0 = {
            vid: v.coord for vid, v in cx.vertices.items() if v.kind in ("B", "a", "b", "m")
        }
        best = None
        cur = None
        for wv, fv in _SITE_VARIANTS:
            wall_want = _wall_variant(wv, rim_other, hub, z2, zeta, w_vid)
            fan_want = _fan_variant(fv, w_vid, z0v, z1v, fan_path)
            if not self._dress_site(wall_fid, red_fid, wall_cur, fan_cur, wall_want, fan_want):
                continue
            wall_cur, fan_cur = wall_want, fan_want
            cur = (wv, fv)
            for vid, coord in midair0.items():
                cx.vertices[vid].coord = coord
            left = settle_move(
                cx, movable, set(cx.tri_face) - tris_before, frame, cluster=copy_pairs
            )
            if best is None or left < best[0]:
                best = (left, wv, fv, {vid: cx.vertices[vid].coord for vid in midair0})
            if left == 0:
                break
        left, wv, fv, state = best
        if (wv, fv) != cur:
            ok = self._dress_site(
                wall_fid,
                red_fid,
                wall_cur,
                fan_cur,
                _wall_variant(wv, rim_other, hub, z2, zeta, w_vid),
                _fan_variant(fv, w_vid, z0v, z1v, fan_path),
            )
            if not ok:
                raise EngineError("could not restore the best site triangulation")
        for vid, coord in state.items():
            cx.vertices[vid].coord = coord
        return left


def run_script(
    gem: Gem,
    script: list[Instruction],
    rim: float = 1.0,
    rise: float = 1.0,
    check_level: int = 0,
    keep_complexes: bool = False,
    placement: PlacementParams | None = None,
) -> tuple[Engine, list[Complex]]:
    """Apply a whole instruction list; optionally snapshot the complex per step.

    Snapshots include the starting complex, so with k instructions the list
    holds k+1 entries.
    """
    eng = Engine(gem, rim, rise, placement)
    snaps: list[Complex] = []
    if keep_complexes:
        snaps.append(_copy.deepcopy(eng.cx))
    for instr in script:
        eng.apply(instr, check_level=check_level)
        if keep_complexes:
            snaps.append(_copy.deepcopy(eng.cx))
    return eng, snaps
