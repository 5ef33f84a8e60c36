import pytest

from gemdual.complexes import Complex, ComplexError, copy_face, relabel_vertex0, tri_key
from gemdual.dualizer import build_complex, face_index, verify_duality
from gemdual.face_types import FaceType
from gemdual.gem import bloboid


@pytest.fixture
def ring3():
    g = bloboid(3)
    return g, build_complex(g)


class TestInitialComplex:
    def test_census_formulas(self):
        for n in (1, 2, 3, 5, 8):
            cx = build_complex(bloboid(n))
            assert cx.census() == (2 * n + 5, 10 * n + 5, 10 * n)

    def test_cells_clean(self, ring3):
        _, cx = ring3
        assert cx.check(1) == []

    def test_duality_clean(self, ring3):
        g, cx = ring3
        assert verify_duality(cx, g) == []

    def test_counts_per_cell_kind(self, ring3):
        g, cx = ring3
        assert len(cx.faces) == 12  # one per graph edge
        assert len(cx.arcs) == 12  # one per 2-color cycle
        assert len(cx.nodes) == 6  # one per residue

    def test_face_types(self, ring3):
        _, cx = ring3
        tags = sorted(str(f.ftype) for f in cx.faces.values())
        assert tags == ["B1", "B1", "B1", "G", "G", "G", "P1", "P1", "P1", "Rb1", "Rb1", "Rb1"]

    def test_boundary_shell(self, ring3):
        g, cx = ring3
        fidx = face_index(cx)
        boundary = [fidx[(5, 6, c)] for c in (0, 1, 2)] + [fidx[(1, 6, 3)]]
        assert cx.shell_is_sphere(boundary)

    def test_flat_bottom_tent(self, ring3):
        _, cx = ring3
        bottom = [v for v in cx.vertices.values() if v.kind == "z3" and v.index == 6]
        assert len(bottom) == 1 and bottom[0].coord[2] == 0.0

    def test_apex_heights_decrease(self, ring3):
        _, cx = ring3
        heights = {
            v.index: v.coord[2] for v in cx.vertices.values() if v.kind == "z3"
        }
        assert [heights[j] for j in range(1, 7)] == [5.0, 4.0, 3.0, 2.0, 1.0, 0.0]

    def test_scales(self):
        cx = build_complex(bloboid(2), rim=2.0, rise=0.5)
        names = {v.name: v.coord for v in cx.vertices.values()}
        assert names["z1"][0] - names["z0"][0] == pytest.approx(2.0)
        assert names["z3^1"][2] == pytest.approx(1.5)
        with pytest.raises(ValueError):
            build_complex(bloboid(2), rim=0.0)

    def test_rejects_non_ring(self, ring3):
        g, _ = ring3
        from gemdual.gem import GemError, Instruction

        moved, _ = g.apply_primal_bp(Instruction(0, 1, 3))
        with pytest.raises(GemError):
            build_complex(moved)

    def test_signature_stable(self, ring3):
        g, cx = ring3
        assert cx.signature() == build_complex(g).signature()
        assert cx.signature() != build_complex(bloboid(4)).signature()


class TestMutators:
    def test_attach_detach(self, ring3):
        _, cx = ring3
        fid = next(iter(cx.faces))
        t = next(iter(cx.faces[fid].triangles))
        cx.detach_triangle(t)
        assert t not in cx.tri_face
        cx.attach_triangle(fid, t)
        assert cx.tri_face[t] == fid
        with pytest.raises(ComplexError):
            cx.attach_triangle(fid, t)

    def test_drop_vertex_guard(self, ring3):
        _, cx = ring3
        some_used = next(iter(cx.tri_face))[0]
        with pytest.raises(ComplexError):
            cx.drop_vertex(some_used)

    def test_swap_vertex(self, ring3):
        _, cx = ring3
        fidx = {f.gem_edge: f.fid for f in cx.faces.values()}
        pink = cx.faces[fidx[(1, 2, 0)]]
        old_medial = pink.medial
        new = cx.add_vertex("b", (0.1, -0.4, 0.0))
        n_swapped = cx.swap_vertex_in_face(pink.fid, old_medial, new)
        assert n_swapped == 2
        assert pink.medial == new
        assert all(old_medial not in t for t in pink.triangles)

    def test_relabel_vertex0(self, ring3):
        _, cx = ring3
        b = next(v for v in cx.vertices.values() if v.kind == "b")
        coord = b.coord
        relabel_vertex0(cx, b.vid)
        assert b.kind == "B" and b.index == 1 and b.coord == coord
        with pytest.raises(ComplexError):
            relabel_vertex0(cx, b.vid)  # no longer a medial

    def test_copy_face_shares_boundary_except_fresh_arc(self, ring3):
        _, cx = ring3
        fidx = {f.gem_edge: f.fid for f in cx.faces.values()}
        pink = cx.faces[fidx[(1, 2, 0)]]
        medial_arc = next(
            a for a in cx.arcs.values() if a.colors == (0, 3)
        )
        v0, e0, t0 = cx.census()
        new_fid, vmap = copy_face(cx, pink.fid, [medial_arc.aid], lift=(0, 0, 0.25))
        v1, e1, t1 = cx.census()
        assert (v1 - v0, t1 - t0) == (1, 2)  # one fresh medial, two triangles
        new_face = cx.faces[new_fid]
        assert new_face.medial == vmap[pink.medial] != pink.medial
        assert cx.vertices[new_face.medial].kind == "b"
        assert cx.vertices[new_face.medial].depth == 1
        assert new_face.hub == pink.hub  # boundary corner stays shared
        # fresh medial is lifted off the original
        assert cx.vertices[new_face.medial].coord[2] == pytest.approx(0.25)

    def test_tri_key_rejects_degenerate(self):
        with pytest.raises(ComplexError):
            tri_key(1, 1, 2)


class TestChecks:
    def test_detects_orphan_triangle_owner(self, ring3):
        _, cx = ring3
        fid = next(iter(cx.faces))
        t = next(iter(cx.faces[fid].triangles))
        cx.faces[fid].triangles.discard(t)  # bypass the mutators
        assert any("claims" in p or "missing from" in p for p in cx.check(0))

    def test_detects_non_disk_face(self, ring3):
        _, cx = ring3
        # stitch two far-apart triangles into one "face"
        w = [cx.add_vertex("m", (float(i), 10.0, 0.0)) for i in range(6)]
        cx.add_face(
            color=2,
            triangles=[tri_key(w[0], w[1], w[2]), tri_key(w[3], w[4], w[5])],
            gem_edge=(99, 100, 2),
            ftype=FaceType("Rb", 1),
        )
        assert any("not connected" in p or "not a disk" in p for p in cx.check(1))

    def test_detects_bad_duality_ref(self, ring3):
        g, cx = ring3
        f = next(iter(cx.faces.values()))
        f.gem_edge = (1, 4, f.color)  # not an edge of g
        assert verify_duality(cx, g) != []
