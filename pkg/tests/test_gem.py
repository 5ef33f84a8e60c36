import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gemdual.gem import (
    COLOR_PAIRS,
    Gem,
    GemError,
    Instruction,
    MoveError,
    bloboid,
    format_gem,
    format_script,
    parse_gem,
    parse_instruction,
    parse_script,
)

# Hand-computed results of two consecutive moves on the 6-vertex ring,
# frozen before the implementation existed.
RING3 = {
    0: [(1, 2), (3, 4), (5, 6)],
    1: [(1, 2), (3, 4), (5, 6)],
    2: [(1, 2), (3, 4), (5, 6)],
    3: [(2, 3), (4, 5), (6, 1)],
}
AFTER_MOVE_1 = {  # (0: 1-3)
    0: [(1, 3), (2, 4), (5, 6)],
    1: [(1, 2), (3, 4), (5, 6)],
    2: [(1, 2), (3, 4), (5, 6)],
    3: [(1, 3), (2, 6), (4, 5)],
}
AFTER_MOVE_2 = {  # (1: 5-1)
    0: [(1, 3), (2, 4), (5, 6)],
    1: [(1, 5), (2, 6), (3, 4)],
    2: [(1, 2), (3, 4), (5, 6)],
    3: [(1, 3), (4, 5), (2, 6)],
}


def normalized(pairs):
    return sorted(tuple(sorted(p)) for p in pairs)


def assert_same_gem(g, pairs_by_color):
    for c, pairs in pairs_by_color.items():
        assert normalized(g.pairs(c)) == normalized(pairs), f"color {c} differs"


class TestConstruction:
    def test_two_vertex_census(self):
        g = bloboid(1)
        assert g.validate() == (2, 6, 4)

    def test_ring_census(self):
        for n in range(1, 9):
            v, b, t = bloboid(n).validate()
            assert (v, b, t) == (2 * n, 3 * n + 3, n + 3)

    def test_ring3_adjacency(self):
        assert_same_gem(bloboid(3), RING3)

    def test_from_pairs_rejects_partial_matching(self):
        bad = {c: [(1, 2)] for c in (0, 1, 2)}
        bad[3] = [(1, 2), (3, 4)]
        with pytest.raises(GemError):
            Gem.from_pairs(4, bad)

    def test_from_pairs_rejects_double_matching(self):
        bad = dict(RING3)
        bad[3] = [(2, 3), (4, 5), (6, 1), (2, 5)]
        with pytest.raises(GemError):
            Gem.from_pairs(6, bad)

    def test_validate_rejects_disconnected(self):
        two = {c: [(1, 2), (3, 4)] for c in (0, 1, 2, 3)}
        g = Gem.from_pairs(4, two)
        with pytest.raises(GemError, match="connected"):
            g.validate()


class TestCycles:
    def test_bigon_is_canonical(self):
        g = bloboid(3)
        cyc = g.bigon_through(4, 0, 3)
        assert cyc == (1, 2, 3, 4, 5, 6)
        assert g.bigon_through(1, 3, 0) == cyc

    def test_bigon_direction_starts_low_color(self):
        g = bloboid(3)
        cyc = g.bigon_through(1, 0, 3)
        # first step must be the color-0 edge (1, 2)
        assert cyc[:2] == (1, 2)

    def test_residue_counts(self):
        g = bloboid(4)
        assert len(g.residues((0, 1, 2))) == 4
        for omit in (0, 1, 2):
            colors = tuple(c for c in range(4) if c != omit)
            assert len(g.residues(colors)) == 1


class TestBlobs:
    def test_ring_blobs(self):
        assert bloboid(3).blobs() == [(1, 2, 3), (3, 4, 3), (5, 6, 3)]

    def test_two_vertex_has_no_blob(self):
        assert bloboid(1).blobs() == []

    def test_cancel_shrinks_ring(self):
        assert bloboid(3).cancel_blob(1) == bloboid(2)
        assert bloboid(5).cancel_blob(2) == bloboid(4)

    def test_cancel_guard(self):
        # splicing the last two pairs together would strand a 2-vertex piece
        with pytest.raises(MoveError):
            bloboid(2).cancel_blob(1)

    def test_thicken_round_trip(self):
        g = bloboid(2)
        fat = g.thicken_2_dipole((1, 2), (0, 3))
        assert fat.n_vertices == 6
        assert fat.validate() == (6, 11, 5)
        assert normalized(fat.pairs(1)) == [(1, 5), (2, 6), (3, 4)]
        assert normalized(fat.pairs(0)) == [(1, 2), (3, 4), (5, 6)]
        assert fat.shared_colors(5, 6) == {0, 3}

    def test_thicken_needs_doubled_site(self):
        with pytest.raises(MoveError):
            bloboid(2).thicken_2_dipole((2, 3), (0, 1))


class TestMove:
    def test_move_1_frozen(self):
        g, md = bloboid(3).apply_primal_bp(Instruction(0, 1, 3))
        assert_same_gem(g, AFTER_MOVE_1)
        assert (md.u, md.v, md.r, md.s) == (1, 2, 3, 4)
        assert (md.x, md.y) == (6, 3)
        assert (md.far_u, md.far_v) == (3, 6)
        assert md.dipole_colors == (1, 2)
        assert md.arc_u == (3,)
        assert md.arc_v == (4, 5, 6)
        assert md.fresh_on_u_side
        assert md.fresh_c_edge == (1, 3)
        assert md.inplace_c_edge == (2, 4)

    def test_move_2_frozen(self):
        g1, _ = bloboid(3).apply_primal_bp(Instruction(0, 1, 3))
        g2, md = g1.apply_primal_bp(Instruction(1, 5, 1))
        assert_same_gem(g2, AFTER_MOVE_2)
        assert (md.u, md.v, md.r, md.s) == (5, 6, 1, 2)
        assert (md.x, md.y) == (4, 2)
        assert (md.far_u, md.far_v) == (4, 2)
        assert not md.fresh_on_u_side
        assert md.arc_u == (1, 3, 4)
        assert md.arc_v == (2,)

    def test_census_shrinks_by_one_per_move(self):
        g = bloboid(3)
        assert g.census() == (6, 12, 6)
        g1, _ = g.apply_primal_bp(Instruction(0, 1, 3))
        assert g1.validate() == (6, 11, 5)
        g2, _ = g1.apply_primal_bp(Instruction(1, 5, 1))
        assert g2.validate() == (6, 10, 4)

    def test_untouched_vertices_keep_adjacency(self):
        g = bloboid(4)
        g1, md = g.apply_primal_bp(Instruction(0, 1, 3))
        touched = {md.u, md.v, md.r, md.s, md.x, md.y}
        for w in range(1, 9):
            if w in touched:
                continue
            for c in range(4):
                assert g1.neighbor(w, c) == g.neighbor(w, c)

    def test_rejections(self):
        g = bloboid(3)
        with pytest.raises(MoveError):  # even blob representative
            g.apply_primal_bp(Instruction(0, 2, 3))
        with pytest.raises(MoveError):  # even tail representative
            g.apply_primal_bp(Instruction(0, 1, 4))
        with pytest.raises(MoveError):  # bad color
            g.apply_primal_bp(Instruction(2, 1, 3))
        with pytest.raises(MoveError):  # tail inside the cancelled pair
            g.apply_primal_bp(Instruction(0, 1, 1))
        with pytest.raises(MoveError):  # not a 3-fold pair rep
            g1, _ = g.apply_primal_bp(Instruction(0, 1, 3))
            g1.apply_primal_bp(Instruction(0, 1, 5))

    def test_reject_tail_off_cycle(self):
        g1, _ = bloboid(3).apply_primal_bp(Instruction(0, 1, 3))
        # the {0,3} cycle through the remaining pair {5,6} is (2,4,5,6); the
        # only odd vertex on it belongs to the pair itself
        with pytest.raises(MoveError, match="cycle"):
            g1.apply_primal_bp(Instruction(0, 5, 1))

    def test_disconnection_guard(self):
        with pytest.raises(MoveError, match="component"):
            bloboid(2).apply_primal_bp(Instruction(0, 1, 3))

    def test_protected_vertices(self):
        g = bloboid(4)
        with pytest.raises(MoveError, match="protected"):
            g.apply_primal_bp(Instruction(0, 1, 3), protected=(4,))
        g.apply_primal_bp(Instruction(0, 1, 3), protected=(8,))

    def test_legal_instructions_listing(self):
        g = bloboid(3)
        legal = g.legal_instructions()
        assert Instruction(0, 1, 3) in legal
        assert Instruction(1, 3, 5) in legal
        assert all(i.blob % 2 == 1 and i.tail % 2 == 1 for i in legal)
        for instr in legal:
            g.apply_primal_bp(instr)
        protected = g.legal_instructions(protected=(6,))
        assert all(i.blob != 5 for i in protected)


# Per-move cycle bookkeeping, frozen from the two worked examples: splitting
# happens only in the {c,3} family; {c,other} and {c,1-c} each lose one.
def bigon_profile(g):
    return {pq: len(g.bigons(*pq)) for pq in COLOR_PAIRS}


def expected_profile_delta(c):
    other = 1 - c
    delta = {pq: 0 for pq in COLOR_PAIRS}
    delta[tuple(sorted((c, 3)))] = 1
    delta[tuple(sorted((c, other)))] = -1
    delta[tuple(sorted((c, 2)))] = -1
    return delta


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_move_properties(data):
    n = data.draw(st.integers(min_value=2, max_value=7), label="n")
    g = bloboid(n)
    for _ in range(data.draw(st.integers(min_value=1, max_value=3), label="depth")):
        legal = g.legal_instructions()
        if not legal:
            break
        instr = data.draw(st.sampled_from(legal), label="instr")
        before = bigon_profile(g)
        res_before = {omit: len(g.residues(tuple(c for c in range(4) if c != omit)))
                      for omit in range(4)}
        v0, b0, t0 = g.census()
        g, md = g.apply_primal_bp(instr)
        v1, b1, t1 = g.validate()
        assert (v1, b1 - b0, t1 - t0) == (v0, -1, -1)
        after = bigon_profile(g)
        delta = expected_profile_delta(instr.color)
        for pq in COLOR_PAIRS:
            assert after[pq] - before[pq] == delta[pq], pq
        # only the 3-omitting residue family shrinks
        for omit in range(4):
            n_res = len(g.residues(tuple(c for c in range(4) if c != omit)))
            assert n_res - res_before[omit] == (-1 if omit == 3 else 0)
        assert {md.far_u, md.far_v} == {md.x, md.y}
        assert md.fresh_arc == (md.arc_u if md.fresh_on_u_side else md.arc_v)


@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=1, max_value=12))
def test_text_round_trip(n):
    g = bloboid(n)
    assert parse_gem(format_gem(g)) == g


def test_gem_text_form_is_per_vertex():
    text = format_gem(bloboid(2))
    assert text.splitlines()[0] == "gem 4"
    assert text.splitlines()[1] == "1: 2 2 2 4"


def test_parse_gem_tolerates_comments():
    text = "# one pair\ngem 2\n1: 2 2 2 2\n\n2: 1 1 1 1  # closing\n"
    assert parse_gem(text) == bloboid(1)


@pytest.mark.parametrize(
    "text, fragment",
    [
        ("1: 2 2 2 2\n2: 1 1 1 1\n", "line 1"),  # header missing
        ("gem 3\n", "even"),
        ("gem 4\n1: 2 2 2 4\n", "undefined vertex"),
        ("gem 2\n1: 2 2 2 2\n2: 1 1 1 1\n2: 1 1 1 1\n", "line 4"),
        ("gem 2\n1: 1 2 2 2\n2: 1 1 1 1\n", "its own color-0 neighbor"),
        ("gem 2\n1: 2 2 2 3\n2: 1 1 1 1\n", "out of range"),
        ("gem 4\n1: 2 2 2 4\n2: 1 1 1 3\n3: 4 4 4 1\n4: 3 3 3 2\n", "color 3 repeated"),
    ],
)
def test_parse_gem_rejects_bad_input(text, fragment):
    with pytest.raises(GemError) as err:
        parse_gem(text)
    assert fragment in str(err.value)


def test_instruction_text_forms():
    for text in ("0: 1-3", "(0: 1-3)", "0:1-3"):
        assert parse_instruction(text) == Instruction(0, 1, 3)
    for text, fragment in [
        ("0 1 3", "malformed"),
        ("2: 1-3", "color"),
        ("0: 2-3", "odd"),
        ("0: 1-4", "odd"),
    ]:
        with pytest.raises(GemError) as err:
            parse_instruction(text)
        assert fragment in str(err.value)
    script = [Instruction(0, 1, 3), Instruction(1, 5, 1)]
    assert parse_script(format_script(script)) == script
    assert parse_script("# none\n") == []
    with pytest.raises(GemError) as err:
        parse_script("0: 1-3\n1: 2-5\n")
    assert "line 2" in str(err.value)
