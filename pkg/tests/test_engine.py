"""Surgery engine oracles.

The single-move facts on the 3-pair ring (every vertex, edge, triangle, arc,
node and tag after the move) were worked out by hand on paper before the
engine existed, and are frozen here verbatim.  The multi-step runs then pin
the branchy parts: fresh-vs-old side selection, primed tails, hat assignment,
and the split-flag lifecycle.
"""

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gemdual.complexes import tri_key
from gemdual.dualizer import verify_duality
from gemdual.engine import Engine, EngineError, run_script
from gemdual.gem import Gem, Instruction, MoveError, bloboid, parse_script
from gemdual.scripts import greedy_max_rank, random_script


def names(cx):
    return {vid: cx.vertices[vid].name for vid in cx.vertices}


def name_tris(cx, fid):
    nm = names(cx)
    return {tuple(sorted(nm[v] for v in t)) for t in cx.faces[fid].triangles}


def engine_after_one_move():
    eng = Engine(bloboid(3))
    eng.apply(Instruction(0, 1, 3), check_level=2)
    return eng


# -- one move on the 3-pair ring, frozen in full -----------------------------


def test_move1_census_and_bound():
    eng = engine_after_one_move()
    rep = eng.reports[0]
    assert rep.census == (13, 41, 34)
    assert rep.delta == (2, 6, 4)
    assert rep.bound == (2, 6, 4)
    assert rep.within_bound


def test_move1_vertex_names():
    eng = engine_after_one_move()
    got = sorted(names(eng.cx).values())
    assert got == sorted(
        ["z0", "z1", "z2", "a1", "B1", "b2", "b3",
         "z3^1", "z3^2", "z3^3", "z3^4", "z3^5", "z3^6"]
    )


def test_move1_edge_set():
    eng = engine_after_one_move()
    nm = names(eng.cx)
    got = {tuple(sorted((nm[a], nm[b]))) for a, b in eng.cx.edges()}
    rim = {("z0", "z1"), ("a1", "z0"), ("a1", "z2"),
           ("b2", "z1"), ("b2", "z2"), ("b3", "z1"), ("b3", "z2")}
    verticals = (
        {(f"z3^{j}", "z0") for j in range(1, 7)}
        | {(f"z3^{j}", "z2") for j in range(1, 7)}
        | {(f"z3^{j}", "a1") for j in range(1, 7)}
        | {(f"z3^{j}", "z1") for j in (1, 3, 4, 5, 6)}
        | {("b2", "z3^3"), ("b2", "z3^4")}
        | {("b3", "z3^1"), ("b3", "z3^4"), ("b3", "z3^5"), ("b3", "z3^6")}
        | {("B1", "z0"), ("B1", "z1"), ("B1", "z2"), ("B1", "z3^2"), ("B1", "z3^4")}
    )
    want = rim | {tuple(sorted(e)) for e in verticals}
    assert len(want) == 41
    assert got == want


def test_move1_faces_frozen():
    eng = engine_after_one_move()
    by_edge = {
        f.gem_edge: (str(f.ftype), f.refined, name_tris(eng.cx, f.fid))
        for f in eng.cx.faces.values()
    }
    assert by_edge == {
        (2, 4, 0): ("P1'", True,
                    {("b3", "z1", "z3^4"), ("b3", "z2", "z3^4")}),
        (1, 3, 0): ("P1'^", True,
                    {("b2", "z1", "z3^4"), ("b2", "z2", "z3^4")}),
        (5, 6, 0): ("P1", False,
                    {("b3", "z1", "z3^6"), ("b3", "z2", "z3^6")}),
        (1, 2, 1): ("B3", False,
                    {("a1", "z2", "z3^2"), ("a1", "z0", "z3^2"),
                     ("B1", "z2", "z3^4"), ("B1", "z2", "z3^2"),
                     ("B1", "z0", "z3^2")}),
        (3, 4, 1): ("B1", False,
                    {("a1", "z2", "z3^4"), ("a1", "z0", "z3^4")}),
        (5, 6, 1): ("B1", False,
                    {("a1", "z2", "z3^6"), ("a1", "z0", "z3^6")}),
        (1, 2, 2): ("Rb1", False,
                    {("B1", "z0", "z1"), ("B1", "z1", "z3^4")}),
        (3, 4, 2): ("Rb1", False, {("z0", "z1", "z3^4")}),
        (5, 6, 2): ("Rb1", False, {("z0", "z1", "z3^6")}),
        (2, 6, 3): ("G", False,
                    {("z0", "z1", "z3^1"), ("b3", "z1", "z3^1"),
                     ("b3", "z2", "z3^1"), ("a1", "z2", "z3^1"),
                     ("a1", "z0", "z3^1")}),
        (1, 3, 3): ("G", False,
                    {("z0", "z1", "z3^3"), ("b2", "z1", "z3^3"),
                     ("b2", "z2", "z3^3"), ("a1", "z2", "z3^3"),
                     ("a1", "z0", "z3^3")}),
        (4, 5, 3): ("G", False,
                    {("z0", "z1", "z3^5"), ("b3", "z1", "z3^5"),
                     ("b3", "z2", "z3^5"), ("a1", "z2", "z3^5"),
                     ("a1", "z0", "z3^5")}),
    }


def test_move1_arcs_frozen():
    eng = engine_after_one_move()
    nm = names(eng.cx)
    got = set()
    for a in eng.cx.arcs.values():
        p = tuple(nm[v] for v in a.path)
        got.add((a.colors, min(p, p[::-1]), a.gem_cycle))
    assert got == {
        ((0, 3), ("z1", "b3", "z2"), (2, 4, 5, 6)),
        ((0, 3), ("z1", "b2", "z2"), (1, 3)),
        ((1, 3), ("z0", "a1", "z2"), (1, 2, 6, 5, 4, 3)),
        ((2, 3), ("z0", "z1"), (1, 2, 6, 5, 4, 3)),
        ((1, 2), ("z0", "B1", "z3^4"), (1, 2)),
        ((1, 2), ("z0", "z3^4"), (3, 4)),
        ((1, 2), ("z0", "z3^6"), (5, 6)),
        ((0, 1), ("z2", "z3^4"), (1, 3, 4, 2)),
        ((0, 1), ("z2", "z3^6"), (5, 6)),
        ((0, 2), ("z1", "z3^4"), (1, 3, 4, 2)),
        ((0, 2), ("z1", "z3^6"), (5, 6)),
    }


def test_move1_nodes_frozen():
    eng = engine_after_one_move()
    nm = names(eng.cx)
    got = {(nm[n.vid], n.gem_ref) for n in eng.cx.nodes.values()}
    assert got == {
        ("z0", ("omit", 0)),
        ("z1", ("omit", 1)),
        ("z2", ("omit", 2)),
        ("z3^4", ("res3", frozenset({1, 2, 3, 4}))),
        ("z3^6", ("res3", frozenset({5, 6}))),
    }


def test_move1_gem_and_duality():
    eng = engine_after_one_move()
    assert eng.gem == Gem.from_pairs(6, {
        0: [(1, 3), (2, 4), (5, 6)],
        1: [(1, 2), (3, 4), (5, 6)],
        2: [(1, 2), (3, 4), (5, 6)],
        3: [(1, 3), (2, 6), (4, 5)],
    })
    assert verify_duality(eng.cx, eng.gem) == []
    assert eng.cx.check(2) == []


def test_move1_pillow_shells_are_spheres():
    eng = engine_after_one_move()
    for gv in range(1, 7):
        fids = [fd.fid for fd in eng.cx.faces.values() if gv in fd.gem_edge[:2]]
        assert eng.cx.shell_is_sphere(fids)
        if gv in (1, 2):
            # cell of a re-inserted vertex: 14 triangles over 9 vertices
            tris = set().union(*(eng.cx.faces[f].triangles for f in fids))
            verts = {v for t in tris for v in t}
            assert (len(verts), len(tris)) == (9, 14)


def test_move1_promotes_the_old_medial():
    eng = engine_after_one_move()
    nm = {v.name: vid for vid, v in eng.cx.vertices.items()}
    wall_vid = nm["B1"]
    # same vertex id the starting medial b1 had, relabeled and lifted mid-air
    assert eng.cx.vertices[wall_vid].kind == "B"
    assert eng.cx.vertices[wall_vid].coord[2] > 0.0
    # the in-place medial b3 sits exactly where b1 used to sit
    start = Engine(bloboid(3))
    b1 = next(v for v in start.cx.vertices.values() if v.name == "b1")
    assert eng.cx.vertices[nm["b3"]].coord == b1.coord


# -- multi-step runs ----------------------------------------------------------


def test_pump_step2_frozen():
    eng, _ = run_script(
        bloboid(4), parse_script("0: 1-3\n1: 5-1\n"), check_level=2
    )
    rep = eng.reports[1]
    assert rep.tail_type == "B3"
    assert rep.delta == (7, 23, 16)
    assert rep.bound == (8, 28, 20)
    assert rep.produced == ["B3'", "B3'^", "P5", "Rp3"]
    assert rep.conforms
    assert eng.cx.census() == (22, 74, 60)
    assert eng.gem == Gem.from_pairs(8, {
        0: [(1, 3), (2, 4), (5, 6), (7, 8)],
        1: [(1, 5), (2, 6), (3, 4), (7, 8)],
        2: [(1, 2), (3, 4), (5, 6), (7, 8)],
        3: [(1, 3), (4, 5), (6, 7), (2, 8)],
    })


def test_pump_step3_runs_over_the_new_wall():
    eng, _ = run_script(
        bloboid(4), parse_script("0: 1-3\n1: 5-1\n0: 7-5\n"), check_level=2
    )
    rep = eng.reports[2]
    assert rep.tail_type == "P5"
    assert rep.produced == ["B7", "P5'", "P5'^", "Rb5"]
    assert rep.delta == (7, 23, 16)
    assert eng.legal_instructions() == []


def test_primed_tail_yields_three_faces():
    eng, _ = run_script(
        bloboid(5), parse_script("0: 1-3\n1: 7-1\n1: 5-1\n"), check_level=2
    )
    rep = eng.reports[2]
    assert rep.tail_type == "B3'"
    assert rep.produced == ["B3", "P5", "Rp3"]
    assert rep.delta == (5, 17, 12)
    assert rep.conforms
    # the duplicate of a primed tail keeps the split structure, tagged unsplit
    copies = [f for f in eng.cx.faces.values() if str(f.ftype) == "B3"]
    assert len(copies) == 1 and not copies[0].refined
    assert len(copies[0].triangles) == 9


def test_copy_of_primed_tail_refines_as_noop():
    eng, _ = run_script(
        bloboid(5), parse_script("0: 1-3\n1: 7-1\n1: 5-1\n"), check_level=0
    )
    copy = next(f for f in eng.cx.faces.values() if str(f.ftype) == "B3")
    tris = set(copy.triangles)
    assert eng.refine_face(copy.fid) is False  # the split path is already there
    assert copy.refined and set(copy.triangles) == tris


def test_structural_refine_then_idempotent():
    eng, _ = run_script(bloboid(4), parse_script("0: 1-3\n1: 5-1\n"))
    wall = next(f for f in eng.cx.faces.values() if str(f.ftype) == "P5")
    assert len(wall.triangles) == 5
    assert eng.refine_face(wall.fid) is True
    first = set(wall.triangles)
    assert len(first) == 9
    assert eng.refine_face(wall.fid) is False
    # force a second pass from scratch: the path detector must make it a no-op
    wall.refined = False
    eng.refine_events.pop(wall.fid)
    assert eng.refine_face(wall.fid) is False
    assert set(wall.triangles) == first


def test_bottom_pair_is_cancellable():
    eng = Engine(bloboid(3))
    rep = eng.apply(Instruction(0, 5, 1), check_level=2)
    assert rep.conforms and rep.delta == (2, 6, 4)


def test_stage1_divergence_is_reported():
    eng = engine_after_one_move()
    assert any("stage-1" in note for note in eng.reports[0].notes)
    assert any("degenerate-split" in note for note in eng.reports[0].notes)


def test_locate_balloon():
    eng = Engine(bloboid(3))
    site = eng.locate_balloon(Instruction(0, 1, 3))
    assert [eng.cx.faces[f].gem_edge for f in site.shared] == [
        (1, 2, 0), (1, 2, 1), (1, 2, 2)
    ]
    assert eng.cx.faces[site.tail].gem_edge == (3, 4, 0)
    assert eng.cx.faces[site.green_x].gem_edge == (1, 6, 3)
    assert eng.cx.faces[site.green_y].gem_edge == (2, 3, 3)
    with pytest.raises(MoveError):
        eng.locate_balloon(Instruction(0, 1, 1))  # tail edge inside the pair


def test_tail_tag_guard():
    eng = Engine(bloboid(3))
    fid = eng.fidx[(3, 4, 0)]
    eng.cx.faces[fid].ftype = eng.cx.faces[eng.fidx[(3, 4, 1)]].ftype
    with pytest.raises(EngineError):
        eng.apply(Instruction(0, 1, 3))


def test_run_script_snapshots():
    script = parse_script("0: 1-3\n1: 5-1\n")
    eng, snaps = run_script(bloboid(4), script, keep_complexes=True)
    assert len(snaps) == 3
    assert snaps[0].census() == (13, 45, 40)
    assert snaps[1].census() == (15, 51, 44)
    assert snaps[2].census() == (22, 74, 60)
    # snapshots are decoupled from the live complex
    assert snaps[2].census() == eng.cx.census()
    eng.cx.add_vertex("m", (0.0, 0.0, 0.0))
    assert snaps[2].census() == (22, 74, 60)


def test_stats_dict_fields():
    eng = engine_after_one_move()
    stats = eng.reports[0].stats_dict()
    assert list(stats) == [
        "step", "delta0", "delta1", "delta2",
        "bound0", "bound1", "bound2", "tail_type",
    ]
    assert stats["tail_type"] == "P1"


# -- randomized behavior -------------------------------------------------------


@settings(max_examples=25, deadline=None)
@given(st.integers(min_value=3, max_value=8), st.randoms(use_true_random=False))
def test_random_runs_stay_consistent(n, rnd):
    eng = Engine(bloboid(n))
    for _ in range(n - 1):
        legal = eng.legal_instructions()
        if not legal:
            break
        rep = eng.apply(rnd.choice(legal), check_level=2)
        assert rep.within_bound
        assert rep.conforms
        v, b, t = eng.gem.census()
        assert b == v + t
    assert all(count == 1 for count in eng.refine_events.values())


@settings(max_examples=10, deadline=None)
@given(st.integers(min_value=3, max_value=9), st.integers(min_value=0, max_value=2**31))
def test_generated_scripts_replay(n, seed):
    script = random_script(n, random.Random(seed))
    eng, _ = run_script(bloboid(n), script, check_level=1)
    assert eng.step == len(script)


def test_greedy_pump_reaches_full_length():
    for n in (3, 4, 5, 7):
        script = greedy_max_rank(n)
        assert len(script) == n - 1
        eng, _ = run_script(bloboid(n), script, check_level=1)
        got = [rep.tail_type for rep in eng.reports]
        want = [("P" if m % 2 else "B") + str(2 * m - 1) for m in range(1, n)]
        assert got == want
        assert eng.legal_instructions() == []
    assert greedy_max_rank(2) == []
