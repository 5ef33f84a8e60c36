# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled triangle contact kernel.

Twin of _tritri_py; geometry.py prefers this module when the extension built.
Semantics of improper_pair are documented there and must stay in sync.
"""

from libc.math cimport fabs, sqrt, hypot


cdef inline void _sub3(double* out, double* p, double* q) nogil:
    out[0] = p[0] - q[0]
    out[1] = p[1] - q[1]
    out[2] = p[2] - q[2]


cdef inline void _cross3(double* out, double* u, double* v) nogil:
    out[0] = u[1] * v[2] - u[2] * v[1]
    out[1] = u[2] * v[0] - u[0] * v[2]
    out[2] = u[0] * v[1] - u[1] * v[0]


cdef inline double _dot3(double* u, double* v) nogil:
    return u[0] * v[0] + u[1] * v[1] + u[2] * v[2]


cdef inline int _line_interval(double* tproj, double* dist, double tol_d,
                               double* lo, double* hi) nogil:
    cdef double ts[5]
    cdef int nts = 0
    cdef int on[3]
    cdef int i, j
    cdef double f
    for i in range(3):
        on[i] = fabs(dist[i]) <= tol_d
        if on[i]:
            ts[nts] = tproj[i]
            nts += 1
    for i in range(3):
        j = (i + 1) % 3
        if on[i] or on[j]:
            continue
        if (dist[i] > 0.0) != (dist[j] > 0.0):
            f = dist[i] / (dist[i] - dist[j])
            ts[nts] = tproj[i] + f * (tproj[j] - tproj[i])
            nts += 1
    if nts == 0:
        return 0
    lo[0] = ts[0]
    hi[0] = ts[0]
    for i in range(1, nts):
        if ts[i] < lo[0]:
            lo[0] = ts[i]
        if ts[i] > hi[0]:
            hi[0] = ts[i]
    return 1


cdef inline double _axis_gap(double (*pa)[2], double (*pb)[2], double ax, double ay) nogil:
    cdef double amin, amax, bmin, bmax, v
    cdef int i
    amin = amax = pa[0][0] * ax + pa[0][1] * ay
    bmin = bmax = pb[0][0] * ax + pb[0][1] * ay
    for i in range(1, 3):
        v = pa[i][0] * ax + pa[i][1] * ay
        if v < amin:
            amin = v
        if v > amax:
            amax = v
        v = pb[i][0] * ax + pb[i][1] * ay
        if v < bmin:
            bmin = v
        if v > bmax:
            bmax = v
    v = bmin - amax
    if amin - bmax > v:
        v = amin - bmax
    return v


cdef int _sat_overlap_2d(double (*pa)[2], double (*pb)[2], double tol) nogil:
    cdef int t, i, j
    cdef double ex, ey, ln
    cdef double (*tri)[2]
    for t in range(2):
        tri = pa if t == 0 else pb
        for i in range(3):
            j = (i + 1) % 3
            ex = tri[j][0] - tri[i][0]
            ey = tri[j][1] - tri[i][1]
            ln = hypot(ex, ey)
            if ln == 0.0:
                continue
            if _axis_gap(pa, pb, -ey / ln, ex / ln) > -tol:
                return 0
    return 1


cdef int _sector_dirs(double (*tri)[2], double tol, double* u, double* w) nogil:
    cdef double ux, uy, wx, wy, lu, lw, tmp
    ux = tri[1][0] - tri[0][0]
    uy = tri[1][1] - tri[0][1]
    wx = tri[2][0] - tri[0][0]
    wy = tri[2][1] - tri[0][1]
    lu = hypot(ux, uy)
    lw = hypot(wx, wy)
    if lu <= tol or lw <= tol:
        return 0
    ux /= lu
    uy /= lu
    wx /= lw
    wy /= lw
    if ux * wy - uy * wx < 0.0:
        tmp = ux; ux = wx; wx = tmp
        tmp = uy; uy = wy; wy = tmp
    u[0] = ux
    u[1] = uy
    w[0] = wx
    w[1] = wy
    return 1


cdef inline int _in_sector(double dx, double dy, double* u, double* w, double ctol) nogil:
    return (u[0] * dy - u[1] * dx >= -ctol) and (dx * w[1] - dy * w[0] >= -ctol)


def improper_pair(a, b, int shared, double tol):
    """Classify contact between triangles a and b (see _tritri_py)."""
    cdef double A[3][3]
    cdef double B[3][3]
    cdef double pa2[3][2]
    cdef double pb2[3][2]
    cdef int i, j, ax, k
    for i in range(3):
        for j in range(3):
            A[i][j] = a[i][j]
            B[i][j] = b[i][j]

    cdef double e1[3]
    cdef double e2[3]
    cdef double n1[3]
    cdef double n2[3]
    _sub3(e1, A[1], A[0])
    _sub3(e2, A[2], A[0])
    _cross3(n1, e1, e2)
    _sub3(e1, B[1], B[0])
    _sub3(e2, B[2], B[0])
    _cross3(n2, e1, e2)
    cdef double s1 = sqrt(_dot3(n1, n1))
    cdef double s2 = sqrt(_dot3(n2, n2))
    if s1 == 0.0 or s2 == 0.0:
        return False

    cdef double db[3]
    cdef double da[3]
    cdef double tmp[3]
    for i in range(3):
        _sub3(tmp, A[i], B[0])
        db[i] = _dot3(n2, tmp)
        _sub3(tmp, B[i], A[0])
        da[i] = _dot3(n1, tmp)
    cdef double tol_b = tol * s2
    cdef double tol_a = tol * s1
    cdef bint coplanar = True
    for i in range(3):
        if fabs(db[i]) > tol_b or fabs(da[i]) > tol_a:
            coplanar = False
            break

    cdef double d[3]
    cdef double dl, lo_a, hi_a, lo_b, hi_b, overlap
    cdef double ta[3]
    cdef double tb[3]
    cdef bint pos, neg
    if not coplanar:
        if shared == 2:
            return False
        pos = True
        neg = True
        for i in range(3):
            if db[i] <= tol_b:
                pos = False
            if db[i] >= -tol_b:
                neg = False
        if pos or neg:
            return False
        pos = True
        neg = True
        for i in range(3):
            if da[i] <= tol_a:
                pos = False
            if da[i] >= -tol_a:
                neg = False
        if pos or neg:
            return False
        _cross3(d, n1, n2)
        dl = sqrt(_dot3(d, d))
        if dl == 0.0:
            return False
        for i in range(3):
            d[i] /= dl
        for i in range(3):
            ta[i] = _dot3(d, A[i])
            tb[i] = _dot3(d, B[i])
        if not _line_interval(ta, db, tol_b, &lo_a, &hi_a):
            return False
        if not _line_interval(tb, da, tol_a, &lo_b, &hi_b):
            return False
        overlap = (hi_a if hi_a < hi_b else hi_b) - (lo_a if lo_a > lo_b else lo_b)
        return overlap > tol

    ax = 0
    for i in range(1, 3):
        if fabs(n1[i]) > fabs(n1[ax]):
            ax = i
    k = 0
    for i in range(3):
        if i == ax:
            continue
        for j in range(3):
            pa2[j][k] = A[j][i]
            pb2[j][k] = B[j][i]
        k += 1

    cdef double ex, ey, ln, ctol, sa, sb
    cdef double su[2]
    cdef double sw[2]
    cdef double bu[2]
    cdef double bw[2]
    if shared == 2:
        ex = pa2[1][0] - pa2[0][0]
        ey = pa2[1][1] - pa2[0][1]
        ln = hypot(ex, ey)
        if ln == 0.0:
            return False
        ctol = tol * ln
        sa = ex * (pa2[2][1] - pa2[0][1]) - ey * (pa2[2][0] - pa2[0][0])
        sb = ex * (pb2[2][1] - pb2[0][1]) - ey * (pb2[2][0] - pb2[0][0])
        return (sa > ctol and sb > ctol) or (sa < -ctol and sb < -ctol)

    if shared == 1:
        if not _sector_dirs(pa2, tol, su, sw):
            return False
        if not _sector_dirs(pb2, tol, bu, bw):
            return False
        if _in_sector(bu[0], bu[1], su, sw, tol) or _in_sector(bw[0], bw[1], su, sw, tol):
            return True
        if _in_sector(su[0], su[1], bu, bw, tol) or _in_sector(sw[0], sw[1], bu, bw, tol):
            return True
        return False

    return bool(_sat_overlap_2d(pa2, pb2, tol))
