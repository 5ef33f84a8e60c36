"""Geometric validation: is the triangulated complex actually embedded?

The combinatorial checks in complexes.py say nothing about coordinates.  Here
we test the straight-line realization: every triangle must be non-degenerate,
and two triangles may touch only along the simplices they share by label
(a common edge, a common corner, or nothing).

The pair predicate lives in a compiled kernel (_tritri) with a pure-Python
twin (_tritri_py); whichever imports is used.  A uniform grid over triangle
bounding boxes keeps the pair count near-linear for the sizes we build.
"""

from __future__ import annotations

from typing import Iterable

from .complexes import Complex, Tri

try:  # pragma: no cover - exercised via whichever build is present
    from . import _tritri as _kernel

    KERNEL_NAME = "compiled"
except ImportError:  # pragma: no cover
    from . import _tritri_py as _kernel

    KERNEL_NAME = "python"

improper_pair = _kernel.improper_pair


def triangle_area(p0, p1, p2) -> float:
    ux, uy, uz = p1[0] - p0[0], p1[1] - p0[1], p1[2] - p0[2]
    vx, vy, vz = p2[0] - p0[0], p2[1] - p0[1], p2[2] - p0[2]
    cx = uy * vz - uz * vy
    cy = uz * vx - ux * vz
    cz = ux * vy - uy * vx
    return 0.5 * (cx * cx + cy * cy + cz * cz) ** 0.5


def _gather(cx: Complex) -> list[tuple[Tri, tuple]]:
    out = []
    for t in cx.tri_face:
        out.append((t, tuple(cx.vertices[v].coord for v in t)))
    out.sort(key=lambda item: item[0])
    return out


def _tri_label(cx: Complex, t: Tri) -> str:
    names = ",".join(cx.vertices[v].name for v in t)
    return f"({names})[face {cx.tri_face[t]}]"


def degenerate_triangles(cx: Complex, area_eps: float) -> list[str]:
    """Triangles whose area falls below area_eps, as report strings."""
    bad = []
    for t, pts in _gather(cx):
        a = triangle_area(*pts)
        if a < area_eps:
            bad.append(f"degenerate triangle {_tri_label(cx, t)}: area {a:.3e}")
    return bad


def _candidate_pairs(boxes: list[tuple]) -> Iterable[tuple[int, int]]:
    """Index pairs whose bounding boxes land in a common grid cell."""
    if len(boxes) < 2:
        return
    spans = sorted(
        max(hi[k] - lo[k] for k in range(3)) for lo, hi in boxes
    )
    h = spans[len(spans) // 2] * 1.5
    if h <= 0.0:
        h = 1.0
    grid: dict[tuple[int, int, int], list[int]] = {}
    for i, (lo, hi) in enumerate(boxes):
        c0 = [int(lo[k] // h) for k in range(3)]
        c1 = [int(hi[k] // h) for k in range(3)]
        for x in range(c0[0], c1[0] + 1):
            for y in range(c0[1], c1[1] + 1):
                for z in range(c0[2], c1[2] + 1):
                    grid.setdefault((x, y, z), []).append(i)
    seen: set[tuple[int, int]] = set()
    for bucket in grid.values():
        for ai in range(len(bucket)):
            for bi in range(ai + 1, len(bucket)):
                p = (bucket[ai], bucket[bi])
                if p not in seen:
                    seen.add(p)
                    yield p


def _boxes(tris: list[tuple[Tri, tuple]]) -> list[tuple]:
    out = []
    for _, pts in tris:
        lo = tuple(min(p[k] for p in pts) for k in range(3))
        hi = tuple(max(p[k] for p in pts) for k in range(3))
        out.append((lo, hi))
    return out


def _boxes_meet(a, b, tol: float) -> bool:
    for k in range(3):
        if a[0][k] > b[1][k] + tol or b[0][k] > a[1][k] + tol:
            return False
    return True


def improper_contacts(cx: Complex, tol: float) -> list[str]:
    """All label-violating triangle contacts, as report strings."""
    tris = _gather(cx)
    boxes = _boxes(tris)
    bad = []
    for i, j in _candidate_pairs(boxes):
        if not _boxes_meet(boxes[i], boxes[j], tol):
            continue
        ta, pa = tris[i]
        tb, pb = tris[j]
        common = sorted(set(ta) & set(tb))
        shared = len(common)
        if shared == 3:
            continue
        # The kernel wants shared vertices first, same order on both sides.
        oa = tuple(common) + tuple(v for v in ta if v not in common)
        ob = tuple(common) + tuple(v for v in tb if v not in common)
        qa = tuple(cx.vertices[v].coord for v in oa)
        qb = tuple(cx.vertices[v].coord for v in ob)
        if improper_pair(qa, qb, shared, tol):
            bad.append(
                f"improper contact: {_tri_label(cx, ta)} meets "
                f"{_tri_label(cx, tb)} beyond their {shared} shared vertices"
            )
    bad.sort()
    return bad


def check_embedding(
    cx: Complex,
    rim: float = 1.0,
    rise: float = 1.0,
    max_reports: int = 50,
) -> list[str]:
    """Report everything that stops the complex from being embedded.

    rim and rise are the build scales; degeneracy cuts off at an area of
    1e-9 * rim * rise and contacts are tolerated up to a length of
    1e-9 * min(rim, rise).
    """
    area_eps = 1e-9 * rim * rise
    tol = 1e-9 * min(rim, rise)
    problems = degenerate_triangles(cx, area_eps)
    problems += improper_contacts(cx, tol)
    if len(problems) > max_reports:
        extra = len(problems) - max_reports
        problems = problems[:max_reports]
        problems.append(f"... and {extra} more")
    return problems
