"""Build the dual ball triangulation of a ring graph, and verify dualities.

The initial complex realizes the dual 2-skeleton of a ring of n three-fold
pairs as nested pyramids ("tents") over a fixed triangular rim: tent j has its
apex on the z-axis at height (2n - j) * rise, odd tents are single cap faces,
even tents split into a page pair per family plus a base fan.  The removed
open 3-cell is the one dual to vertex 2n, so the complex is a ball whose
boundary is tent 1 together with the flat tent 2n.
"""

from __future__ import annotations

import math

from gemdual.complexes import Complex, tri_key
from gemdual.face_types import GREEN, FaceType
from gemdual.gem import COLOR_PAIRS, Gem, GemError, bloboid

SQRT3 = math.sqrt(3.0)


def ring_order(g: Gem) -> int:
    """The n for which g is the standard ring, else raise."""
    n = g.n_vertices // 2
    if g != bloboid(n):
        raise GemError("graph is not the standard ring on labels 1..2n")
    return n


def build_complex(g: Gem, rim: float = 1.0, rise: float = 1.0) -> Complex:
    """Dual ball triangulation of the standard ring, with all cell references."""
    n = ring_order(g)
    if rim <= 0 or rise <= 0:
        raise ValueError("rim and rise scales must be positive")
    cx = Complex()

    z0 = cx.add_vertex("z0", (-rim / 2.0, rim * SQRT3 / 6.0, 0.0))
    z1 = cx.add_vertex("z1", (rim / 2.0, rim * SQRT3 / 6.0, 0.0))
    z2 = cx.add_vertex("z2", (0.0, -rim * SQRT3 / 3.0, 0.0))
    c0 = cx.vertices[z0].coord
    c1 = cx.vertices[z1].coord
    c2 = cx.vertices[z2].coord
    a1 = cx.add_vertex("a", tuple((p + q) / 2.0 for p, q in zip(c0, c2)))
    b1 = cx.add_vertex("b", tuple((p + q) / 2.0 for p, q in zip(c2, c1)))
    apex = {
        j: cx.add_vertex("z3", (0.0, 0.0, (2 * n - j) * rise), index=j)
        for j in range(1, 2 * n + 1)
    }

    for j in range(1, 2 * n + 1):
        zj = apex[j]
        if j % 2 == 1:
            gem_edge = (1, 2 * n, 3) if j == 1 else (j - 1, j, 3)
            cx.add_face(
                color=3,
                triangles=[
                    tri_key(z0, zj, z1),
                    tri_key(z1, zj, b1),
                    tri_key(z2, b1, zj),
                    tri_key(z2, zj, a1),
                    tri_key(z0, a1, zj),
                ],
                gem_edge=gem_edge,
                ftype=GREEN,
                hub=zj,
            )
        else:
            cx.add_face(
                color=0,
                triangles=[tri_key(z1, zj, b1), tri_key(z2, b1, zj)],
                gem_edge=(j - 1, j, 0),
                ftype=FaceType("P", 1),
                medial=b1,
                hub=zj,
                zeta=zj,
            )
            cx.add_face(
                color=1,
                triangles=[tri_key(z2, zj, a1), tri_key(z0, a1, zj)],
                gem_edge=(j - 1, j, 1),
                ftype=FaceType("B", 1),
                medial=a1,
                hub=zj,
                zeta=zj,
            )
            cx.add_face(
                color=2,
                triangles=[tri_key(z0, zj, z1)],
                gem_edge=(j - 1, j, 2),
                ftype=FaceType("Rb", 1),
                hub=zj,
                zeta=zj,
            )

    cx.add_arc([z1, b1, z2], (0, 3), g.bigon_through(1, 0, 3))
    cx.add_arc([z0, a1, z2], (1, 3), g.bigon_through(1, 1, 3))
    cx.add_arc([z0, z1], (2, 3), g.bigon_through(1, 2, 3))
    for i in range(1, n + 1):
        v = 2 * i
        cx.add_arc([z2, apex[v]], (0, 1), g.bigon_through(v, 0, 1))
        cx.add_arc([z1, apex[v]], (0, 2), g.bigon_through(v, 0, 2))
        cx.add_arc([z0, apex[v]], (1, 2), g.bigon_through(v, 1, 2))

    cx.add_node(z0, ("omit", 0))
    cx.add_node(z1, ("omit", 1))
    cx.add_node(z2, ("omit", 2))
    for i in range(1, n + 1):
        cx.add_node(apex[2 * i], ("res3", frozenset({2 * i - 1, 2 * i})))
    return cx


def face_index(cx: Complex) -> dict[tuple[int, int, int], int]:
    """Dual reference index: colored graph edge -> face id."""
    out: dict[tuple[int, int, int], int] = {}
    for fid, face in cx.faces.items():
        if face.gem_edge in out:
            raise GemError(f"two faces claim edge {face.gem_edge}")
        out[face.gem_edge] = fid
    return out


# endpoint kinds per arc family, a rigid feature of the rim layout
ARC_ENDPOINTS = {
    (0, 3): ("z1", "z2"),
    (1, 3): ("z0", "z2"),
    (2, 3): ("z0", "z1"),
    (0, 1): ("z2", "z3"),
    (0, 2): ("z1", "z3"),
    (1, 2): ("z0", "z3"),
}


def verify_duality(cx: Complex, g: Gem) -> list[str]:
    """Check every stored cross-reference against the graph; list the failures.

    Faces must biject with edges (colors agreeing), arcs with the closed
    2-color cycles (bounded by exactly the duals of the cycle's edges), corner
    cells with residues, and each vertex's four dual faces must close up into
    a 2-sphere.
    """
    problems: list[str] = []

    gem_edges = {(a, b, c) for a, b, c in g.edges()}
    claimed = [f.gem_edge for f in cx.faces.values()]
    if len(set(claimed)) != len(claimed):
        problems.append("two faces share a dual edge reference")
    if set(claimed) != gem_edges:
        problems.append("face references do not biject with graph edges")
    for f in cx.faces.values():
        if f.color != f.gem_edge[2]:
            problems.append(f"face {f.fid} color {f.color} != edge color {f.gem_edge[2]}")

    fidx = {f.gem_edge: f.fid for f in cx.faces.values()}
    for pair in COLOR_PAIRS:
        cycles = {cyc for cyc in g.bigons(*pair)}
        arcs = [a for a in cx.arcs.values() if a.colors == pair]
        refs = [a.gem_cycle for a in arcs]
        if len(set(refs)) != len(refs) or set(refs) != cycles:
            problems.append(f"arcs of family {pair} do not biject with {pair}-cycles")
            continue
        for arc in arcs:
            lo, hi = pair
            duals = set()
            cyc = arc.gem_cycle
            broken = False
            for i, v in enumerate(cyc):
                w = cyc[(i + 1) % len(cyc)]
                col = lo if i % 2 == 0 else hi
                key = (min(v, w), max(v, w), col)
                if key not in fidx:
                    problems.append(f"arc {arc.aid} cycle edge {key} has no dual face")
                    broken = True
                    break
                duals.add(fidx[key])
            if broken:
                continue
            against = set(cx.faces_on_arc(arc.aid))
            if duals != against:
                problems.append(
                    f"arc {arc.aid} {pair} bounded by faces {sorted(against)}, "
                    f"cycle demands {sorted(duals)}"
                )
            ka = cx.vertices[arc.path[0]].kind
            kb = cx.vertices[arc.path[-1]].kind
            if tuple(sorted((ka, kb))) != tuple(sorted(ARC_ENDPOINTS[pair])):
                problems.append(f"arc {arc.aid} {pair} runs {ka}..{kb}")

    node_refs = [n.gem_ref for n in cx.nodes.values()]
    if len(set(node_refs)) != len(node_refs):
        problems.append("two corner cells share a residue reference")
    want: set[tuple] = {("omit", c) for c in (0, 1, 2)}
    for res in g.residues((0, 1, 2)):
        want.add(("res3", res))
    for c in (0, 1, 2):
        colors = tuple(d for d in range(4) if d != c)
        if len(g.residues(colors)) != 1:
            problems.append(f"graph has split {colors} residue, layout cannot host it")
    if set(node_refs) != want:
        problems.append("corner cells do not biject with residues")

    for w in range(1, g.n_vertices + 1):
        fids = []
        for c in range(4):
            p = g.neighbor(w, c)
            key = (min(w, p), max(w, p), c)
            if key in fidx:
                fids.append(fidx[key])
        if len(fids) != 4 or not cx.shell_is_sphere(fids):
            problems.append(f"dual shell of vertex {w} is not a sphere")

    return problems
