"""Conflict-driven placement of the vertices a move leaves in mid air.

The closed forms in PlacementParams position one move well while the space
around its column is still empty.  After a few moves the same column is
wrapped in sheets left by every earlier move and no fixed formula survives,
so the engine settles each move by search instead.  Trial positions come
from the landmarks of the site itself: the stack of height slots between
consecutive column apexes, a ring at doorway radius, and the open region
outside the rim below the floor.  Each movable vertex walks its ladder of
trials under a local conflict count and keeps the best spot.  The count
covers every triangle the move touched, so a zero here means the complex
stayed embedded if it was embedded before the move.

A copied face hangs from the same boundary arcs as its source, so its
interior vertices are draped first as one sheet: every copy blends from its
source position toward a shared guide point and the blend with the fewest
conflicts wins.  Only then do single vertices refine their spots.

When the move's own vertices cannot reach zero, mid-air vertices planted by
earlier moves that take part in the surviving conflicts are drafted into the
search and the walk repeats.  Ladders, visit order and tie breaks are all
fixed, so a given complex always settles the same way.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .complexes import Complex, Tri
from .geometry import improper_pair, triangle_area

# trial families, in units of door radius (r) and rise (z); wide, not clever
_SLOT_FRACS = (0.5, 0.2, 0.8)
_SLOT_RADII = (0.12, 0.45)
_RING_RADII = (0.7, 1.2, 1.7)
_RING_FRACS = (0.25, 0.7, 1.4, 2.2)
_UNDER_RADII = (1.6, 2.4, 3.2)
_UNDER_FRACS = (-0.45, -0.95)
_SPINS = (0.0, math.pi / 3, -math.pi / 3, 2 * math.pi / 3, -2 * math.pi / 3, math.pi)
# sheets hung by earlier moves stand on vertical planes through the rim
# corners, and their spans end there; the passable slots hug those azimuths,
# so walk a fine fan just off each corner ray at door-like radii
_SEAM_BASES = (math.pi / 3, -math.pi / 3, 2 * math.pi / 3, -2 * math.pi / 3)
_SEAM_OFFS = tuple(math.radians(d) for d in (2.0, -2.0, 6.0, -6.0))
_SEAM_RADII = (0.95, 1.15)
# fine cylindrical nudges for the polish stage
_POLISH_AZ = (0.0, math.radians(2.0), math.radians(-2.0))
_POLISH_R = (1.0, 0.95, 1.1)
_POLISH_Z = (0.0, 0.1, -0.1)

# guide grid for draping a copied sheet, in door radii and source height
_GUIDE_RADII = (0.3, 1.0)
_GUIDE_ZFRACS = (0.25, 0.5, 0.75)
_BLEND_WEIGHTS = (0.3, 0.55, 0.85)
# radial offsets (in rim units) for nesting a copied sheet just outside or
# just inside its source; near-axis vertices shift vertically instead
_SHELL_OFFSETS = (0.05, 0.1, 0.18, -0.05, -0.1)

_PENALTY = 10**6  # a degenerate triangle is worse than any conflict count


@dataclass(frozen=True)
class SettleFrame:
    """Local landmarks of one move, in build units."""

    door_xy: tuple[float, float]
    apex_zs: tuple[float, ...]
    rim: float
    rise: float


def _ladder(frame: SettleFrame, current: tuple) -> list[tuple]:
    dx, dy = frame.door_xy
    dr = math.hypot(dx, dy)
    if dr <= 0.0:
        dx, dy, dr = frame.rim, 0.0, frame.rim
    spun = []
    for s in _SPINS:
        c, sn = math.cos(s), math.sin(s)
        spun.append(((dx * c - dy * sn) / dr, (dx * sn + dy * c) / dr))
    out = [tuple(current)]
    zs = sorted(set(frame.apex_zs))
    gaps = [(zs[-1], zs[-1] + 0.5 * frame.rise)]
    gaps += list(zip(zs[-2::-1], zs[:0:-1]))  # top slots first, they are emptiest
    for lo, hi in gaps:
        if hi - lo <= 1e-12:
            continue
        for f in _SLOT_FRACS:
            z = lo + f * (hi - lo)
            for rf in _SLOT_RADII:
                r = rf * dr
                for ux, uy in spun:
                    out.append((r * ux, r * uy, z))
    for rf in _RING_RADII:
        for zf in _RING_FRACS:
            for ux, uy in spun:
                out.append((rf * dr * ux, rf * dr * uy, zf * frame.rise))
    for rf in _UNDER_RADII:
        for zf in _UNDER_FRACS:
            for ux, uy in spun:
                out.append((rf * dr * ux, rf * dr * uy, zf * frame.rise))
    for base in _SEAM_BASES:
        for off in _SEAM_OFFS:
            c, sn = math.cos(base + off), math.sin(base + off)
            ux, uy = (dx * c - dy * sn) / dr, (dx * sn + dy * c) / dr
            for rf in _SEAM_RADII:
                for lo, hi in gaps:
                    if hi - lo <= 1e-12:
                        continue
                    z = lo + 0.5 * (hi - lo)
                    out.append((rf * dr * ux, rf * dr * uy, z))
    return out


def _draftable(cx: Complex, vid: int) -> bool:
    v = cx.vertices[vid]
    if v.kind in ("B", "m"):
        return True
    return v.kind in ("a", "b") and v.index >= 2


class _Settler:
    def __init__(
        self,
        cx: Complex,
        movable: list[int],
        new_tris: set[Tri],
        frame: SettleFrame,
        cluster: tuple = (),
    ):
        self.cx = cx
        self.frame = frame
        self.tol = 1e-9 * min(frame.rim, frame.rise)
        self.area_eps = 1e-9 * frame.rim * frame.rise
        self.movable = sorted(set(movable))
        self.new_tris = set(new_tris)
        self.cluster = tuple(cluster)
        self._split()

    def _split(self) -> None:
        mov = set(self.movable)
        self.moving = sorted(
            t for t in self.cx.tri_face if set(t) & mov or t in self.new_tris
        )
        in_moving = set(self.moving)
        self.static = sorted(t for t in self.cx.tri_face if t not in in_moving)
        pts = [
            [self.cx.vertices[v].coord for v in t] for t in self.static
        ]
        if pts:
            arr = np.asarray(pts)  # (N, 3, 3)
            self.static_lo = arr.min(axis=1) - self.tol
            self.static_hi = arr.max(axis=1) + self.tol
        else:
            self.static_lo = np.zeros((0, 3))
            self.static_hi = np.zeros((0, 3))
        self.by_vid = {
            vid: [t for t in self.moving if vid in t] for vid in self.movable
        }

    def _coords(self, t: Tri) -> tuple:
        return tuple(self.cx.vertices[v].coord for v in t)

    def _pair_bad(self, ta: Tri, tb: Tri) -> bool:
        common = sorted(set(ta) & set(tb))
        s = len(common)
        if s == 3:
            return False
        oa = tuple(common) + tuple(v for v in ta if v not in common)
        ob = tuple(common) + tuple(v for v in tb if v not in common)
        qa = tuple(self.cx.vertices[v].coord for v in oa)
        qb = tuple(self.cx.vertices[v].coord for v in ob)
        return improper_pair(qa, qb, s, self.tol)

    def _tris_score(self, tris: list[Tri], cutoff: int) -> int:
        """Conflicts of the given moving triangles against the world.

        Counts each offending pair once: tris vs static, tris vs the other
        moving triangles, and pairs inside tris itself.  Stops early once
        the score passes cutoff, callers only need the comparison.
        """
        score = 0
        for t in tris:
            p = self._coords(t)
            if triangle_area(*p) < self.area_eps:
                return _PENALTY
        if len(self.static) > 0 and tris:
            pts = np.asarray([[self.cx.vertices[v].coord for v in t] for t in tris])
            lo = pts.min(axis=1)
            hi = pts.max(axis=1)
            hits = np.nonzero(
                (lo[:, None, :] <= self.static_hi[None, :, :]).all(axis=2)
                & (self.static_lo[None, :, :] <= hi[:, None, :]).all(axis=2)
            )
            for i, j in zip(*hits):
                if self._pair_bad(tris[i], self.static[j]):
                    score += 1
                    if score > cutoff:
                        return score
        mine = set(tris)
        others = [t for t in self.moving if t not in mine]
        for ta in tris:
            for tb in others:
                if self._pair_bad(ta, tb):
                    score += 1
                    if score > cutoff:
                        return score
        for i in range(len(tris)):
            for j in range(i + 1, len(tris)):
                if self._pair_bad(tris[i], tris[j]):
                    score += 1
                    if score > cutoff:
                        return score
        return score

    def full_count(self) -> int:
        return self._tris_score(self.moving, _PENALTY)

    def _descend(self, rounds: int) -> int:
        total = self.full_count()
        if total == 0:
            return 0
        for _ in range(rounds):
            improved = False
            for vid in self.movable:
                tris = self.by_vid[vid]
                if not tris:
                    continue
                start = self.cx.vertices[vid].coord
                best_pos = start
                best = self._tris_score(tris, _PENALTY)
                if best > 0:
                    for cand in _ladder(self.frame, start)[1:]:
                        self.cx.vertices[vid].coord = cand
                        s = self._tris_score(tris, best - 1)
                        if s < best:
                            best, best_pos = s, cand
                            if best == 0:
                                break
                    self.cx.vertices[vid].coord = best_pos
                    if best_pos != start:
                        improved = True
            total = self.full_count()
            if total == 0 or not improved:
                break
        return total

    def _cluster_stage(self) -> None:
        """Drape copied vertices as one sheet before refining them one by one."""
        best = self._tris_score(self.moving, _PENALTY)
        if best == 0:
            return
        src = {vid: self.cx.vertices[s].coord for vid, s in self.cluster}
        zmax = max(c[2] for c in src.values())
        if zmax <= 0.0:
            return
        dx, dy = self.frame.door_xy
        dr = math.hypot(dx, dy)
        if dr <= 0.0:
            dx, dy, dr = self.frame.rim, 0.0, self.frame.rim
        drapes = []
        for d in _SHELL_OFFSETS:
            off = d * self.frame.rim
            lift = 0.3 * max(off, 0.0)
            drape = {}
            for vid, p in src.items():
                r = math.hypot(p[0], p[1])
                if r > abs(off):
                    s = (r + off) / r
                    drape[vid] = (p[0] * s, p[1] * s, p[2] + lift)
                else:
                    drape[vid] = (p[0], p[1], p[2] + off)
            drapes.append(drape)
        for base in _SEAM_BASES:
            c, sn = math.cos(base), math.sin(base)
            ux, uy = (dx * c - dy * sn) / dr, (dx * sn + dy * c) / dr
            for t in (0.05, 0.11):
                step = t * self.frame.rim
                drapes.append(
                    {
                        vid: (p[0] + step * ux, p[1] + step * uy, 0.97 * p[2])
                        for vid, p in src.items()
                    }
                )
        guides = []
        for s in _SPINS:
            c, sn = math.cos(s), math.sin(s)
            ux, uy = (dx * c - dy * sn) / dr, (dx * sn + dy * c) / dr
            for rf in _GUIDE_RADII:
                for zf in _GUIDE_ZFRACS:
                    guides.append((rf * dr * ux, rf * dr * uy, zf * zmax))
        for g, lam in itertools.product(guides, _BLEND_WEIGHTS):
            drapes.append(
                {
                    vid: (
                        p[0] + lam * (g[0] - p[0]),
                        p[1] + lam * (g[1] - p[1]),
                        p[2] + lam * (g[2] - p[2]),
                    )
                    for vid, p in src.items()
                }
            )
        hold = {vid: self.cx.vertices[vid].coord for vid in src}
        for drape in drapes:
            for vid, p in drape.items():
                self.cx.vertices[vid].coord = p
            sc = self._tris_score(self.moving, best - 1)
            if sc < best:
                best, hold = sc, drape
                if best == 0:
                    break
        for vid, p in hold.items():
            self.cx.vertices[vid].coord = p

    def _polish(self, rounds: int) -> int:
        """Fine cylindrical nudges around the current spots.

        The coarse ladder lands a vertex near a passable slot; slots between
        sheets can be a few degrees wide, so finish with small moves only.
        """
        total = self.full_count()
        for _ in range(rounds):
            if total == 0:
                break
            hot = set()
            for i, ta in enumerate(self.moving):
                for tb in itertools.chain(self.static, self.moving[i + 1 :]):
                    if self._pair_bad(ta, tb):
                        hot.update(ta)
                        hot.update(tb)
            improved = False
            for vid in self.movable:
                if vid not in hot or not self.by_vid[vid]:
                    continue
                start = self.cx.vertices[vid].coord
                x, y, z = start
                r, az = math.hypot(x, y), math.atan2(y, x)
                best_pos = start
                best = self._tris_score(self.by_vid[vid], _PENALTY)
                for da, fr, dz in itertools.product(
                    _POLISH_AZ, _POLISH_R, _POLISH_Z
                ):
                    if da == 0.0 and fr == 1.0 and dz == 0.0:
                        continue
                    cand = (
                        r * fr * math.cos(az + da),
                        r * fr * math.sin(az + da),
                        z + dz * self.frame.rise,
                    )
                    self.cx.vertices[vid].coord = cand
                    s = self._tris_score(self.by_vid[vid], best - 1)
                    if s < best:
                        best, best_pos = s, cand
                        if best == 0:
                            break
                self.cx.vertices[vid].coord = best_pos
                if best_pos != start:
                    improved = True
            new_total = self.full_count()
            if new_total >= total and not improved:
                break
            total = new_total
        return total

    def _conflict_verts(self) -> list[int]:
        out = set()
        for t in self.moving:
            p = self._coords(t)
            if triangle_area(*p) < self.area_eps:
                out.update(t)
        for i, ta in enumerate(self.moving):
            for tb in self.static:
                if self._pair_bad(ta, tb):
                    out.update(ta)
                    out.update(tb)
            for tb in self.moving[i + 1 :]:
                if self._pair_bad(ta, tb):
                    out.update(ta)
                    out.update(tb)
        return sorted(v for v in out if v not in self.movable and _draftable(self.cx, v))

    def run(self, rounds: int, max_drafts: int) -> int:
        if self.cluster:
            self._cluster_stage()
        total = self._descend(rounds)
        if total > 0:
            total = self._polish(rounds)
        for _ in range(max_drafts):
            if total == 0:
                break
            extra = self._conflict_verts()
            if not extra:
                break
            self.movable = sorted(set(self.movable) | set(extra))
            self._split()
            total = self._descend(rounds)
            if total > 0:
                total = self._polish(rounds)
        return total


def settle_move(
    cx: Complex,
    movable: list[int],
    new_tris: set[Tri],
    frame: SettleFrame,
    cluster: tuple = (),
    rounds: int = 2,
    max_drafts: int = 3,
) -> int:
    """Search positions for a move's mid-air vertices; return the number of
    improper contacts or degenerate triangles left among the touched
    triangles (0 means the move kept the complex embedded).

    cluster pairs each copied vertex with the vertex it was copied from, so
    the copies can be draped as one sheet before the per-vertex walk.
    """
    return _Settler(cx, movable, new_tris, frame, cluster).run(rounds, max_drafts)
