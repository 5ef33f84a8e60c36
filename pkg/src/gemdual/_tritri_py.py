"""Pure-Python triangle contact kernel.

Twin of the optional compiled module ``_tritri``; geometry.py imports whichever
is available.  Both expose ``improper_pair(a, b, shared, tol)`` with identical
semantics, so they must be kept in sync.

The kernel decides whether two triangles touch each other in a way their
labels do not license.  ``shared`` is the number of vertex labels the two
triangles have in common, and the caller must rotate both triangles so the
shared vertices come first, in the same order on both sides:

* ``shared == 2``: a, b share the edge (a[0], a[1]) == (b[0], b[1]).  Proper
  contact is exactly that edge.
* ``shared == 1``: a[0] == b[0] is the one shared corner.
* ``shared == 0``: any contact at all is improper.

``tol`` is a length: features closer than ``tol`` count as touching, overlaps
shorter than ``tol`` are forgiven.  Returns True when the pair is improper.
"""

from __future__ import annotations

import math


def _sub(p, q):
    return (p[0] - q[0], p[1] - q[1], p[2] - q[2])


def _cross(u, v):
    return (
        u[1] * v[2] - u[2] * v[1],
        u[2] * v[0] - u[0] * v[2],
        u[0] * v[1] - u[1] * v[0],
    )


def _dot(u, v):
    return u[0] * v[0] + u[1] * v[1] + u[2] * v[2]


def _norm(u):
    return math.sqrt(_dot(u, u))


def _line_interval(tproj, dist, tol_d):
    """Parameter interval where a triangle meets the plane-intersection line.

    tproj[i] is vertex i projected onto the line direction, dist[i] its signed
    distance to the other triangle's plane.  Vertices within tol_d of the
    plane sit on the line themselves; edges whose endpoints straddle it
    contribute the interpolated crossing.  Returns (lo, hi) or None when the
    triangle misses the plane.
    """
    ts = []
    on = [abs(d) <= tol_d for d in dist]
    for i in range(3):
        if on[i]:
            ts.append(tproj[i])
    for i in range(3):
        j = (i + 1) % 3
        if on[i] or on[j]:
            continue
        if (dist[i] > 0.0) != (dist[j] > 0.0):
            f = dist[i] / (dist[i] - dist[j])
            ts.append(tproj[i] + f * (tproj[j] - tproj[i]))
    if not ts:
        return None
    return (min(ts), max(ts))


def _axis_gap(pts_a, pts_b, ax):
    """Separation along axis ax: positive means disjoint by that much."""
    amin = min(_dot2(p, ax) for p in pts_a)
    amax = max(_dot2(p, ax) for p in pts_a)
    bmin = min(_dot2(p, ax) for p in pts_b)
    bmax = max(_dot2(p, ax) for p in pts_b)
    return max(bmin - amax, amin - bmax)


def _dot2(p, q):
    return p[0] * q[0] + p[1] * q[1]


def _sat_overlap_2d(ta, tb, tol):
    """True when the projected triangles overlap by more than tol."""
    for tri_pts in (ta, tb):
        for i in range(3):
            j = (i + 1) % 3
            ex = tri_pts[j][0] - tri_pts[i][0]
            ey = tri_pts[j][1] - tri_pts[i][1]
            ln = math.hypot(ex, ey)
            if ln == 0.0:
                continue
            ax = (-ey / ln, ex / ln)
            if _axis_gap(ta, tb, ax) > -tol:
                return False
    return True


def _sector_dirs(tri, tol):
    """Unit directions of the two edges leaving tri[0], CCW ordered."""
    u = (tri[1][0] - tri[0][0], tri[1][1] - tri[0][1])
    w = (tri[2][0] - tri[0][0], tri[2][1] - tri[0][1])
    lu = math.hypot(*u)
    lw = math.hypot(*w)
    if lu <= tol or lw <= tol:
        return None
    u = (u[0] / lu, u[1] / lu)
    w = (w[0] / lw, w[1] / lw)
    if u[0] * w[1] - u[1] * w[0] < 0.0:
        u, w = w, u
    return u, w


def _in_sector(d, sector, ctol):
    u, w = sector
    return (u[0] * d[1] - u[1] * d[0] >= -ctol) and (d[0] * w[1] - d[1] * w[0] >= -ctol)


def _sectors_overlap(sa, sb, ctol):
    """Do two corner wedges (each spanning < pi) share a direction?"""
    for d in sb:
        if _in_sector(d, sa, ctol):
            return True
    for d in sa:
        if _in_sector(d, sb, ctol):
            return True
    return False


def improper_pair(a, b, shared, tol):
    """Classify contact between triangles a and b (see module docstring)."""
    n1 = _cross(_sub(a[1], a[0]), _sub(a[2], a[0]))
    n2 = _cross(_sub(b[1], b[0]), _sub(b[2], b[0]))
    s1 = _norm(n1)
    s2 = _norm(n2)
    if s1 == 0.0 or s2 == 0.0:
        # Degenerate triangles are reported separately; no contact verdict.
        return False

    db = [_dot(n2, _sub(a[i], b[0])) for i in range(3)]
    da = [_dot(n1, _sub(b[i], a[0])) for i in range(3)]
    tol_b = tol * s2
    tol_a = tol * s1
    coplanar = all(abs(d) <= tol_b for d in db) and all(abs(d) <= tol_a for d in da)

    if not coplanar:
        if shared == 2:
            # Non-coplanar neighbours can only meet along the shared edge.
            return False
        if all(d > tol_b for d in db) or all(d < -tol_b for d in db):
            return False
        if all(d > tol_a for d in da) or all(d < -tol_a for d in da):
            return False
        d = _cross(n1, n2)
        dl = _norm(d)
        if dl == 0.0:
            return False
        d = (d[0] / dl, d[1] / dl, d[2] / dl)
        ta = [_dot(d, p) for p in a]
        tb = [_dot(d, p) for p in b]
        ia = _line_interval(ta, db, tol_b)
        ib = _line_interval(tb, da, tol_a)
        if ia is None or ib is None:
            return False
        overlap = min(ia[1], ib[1]) - max(ia[0], ib[0])
        # shared == 1: the common corner always contributes a zero-length
        # overlap, anything longer means the triangles cross each other.
        return overlap > tol

    # Coplanar: work in the dominant 2D projection of the common plane.
    ax = max(range(3), key=lambda i: abs(n1[i]))
    keep = [i for i in range(3) if i != ax]
    pa = [(p[keep[0]], p[keep[1]]) for p in a]
    pb = [(p[keep[0]], p[keep[1]]) for p in b]

    if shared == 2:
        # Proper neighbours fold away from the shared edge; improper ones
        # fold over it, putting both apexes strictly on the same side.
        ex = pa[1][0] - pa[0][0]
        ey = pa[1][1] - pa[0][1]
        ln = math.hypot(ex, ey)
        if ln == 0.0:
            return False
        ctol = tol * ln
        sa = ex * (pa[2][1] - pa[0][1]) - ey * (pa[2][0] - pa[0][0])
        sb = ex * (pb[2][1] - pb[0][1]) - ey * (pb[2][0] - pb[0][0])
        return (sa > ctol and sb > ctol) or (sa < -ctol and sb < -ctol)

    if shared == 1:
        # Sharing one corner: by convexity the pair meets beyond that corner
        # exactly when their angular wedges at it overlap.
        sa = _sector_dirs(pa, tol)
        sb = _sector_dirs(pb, tol)
        if sa is None or sb is None:
            return False
        return _sectors_overlap(sa, sb, tol)

    return _sat_overlap_2d(pa, pb, tol)
