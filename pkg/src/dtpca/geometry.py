"""2D Delaunay triangulation and the triangle-area mesh descriptor.

A landmark set is triangulated so that no input point lies strictly inside
any triangle's circumcircle.  The mesh is then reduced to a scalar shape
descriptor: per-triangle areas from edge lengths (Heron), areas normalized
by the largest triangle, and the arithmetic mean of those ratios.

The triangulation is built by inserting points in lexicographic order
(each new point is outside the hull of its predecessors, so no point
location is needed) and restoring the empty-circumcircle property with
edge flips.  Degenerate cocircular quads are resolved deterministically:
the kept diagonal is the one whose lowest vertex index is smallest.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# Relative tolerance for predicate sign decisions: a determinant whose
# magnitude is within REL_EPS of its own term scale counts as zero ("on").
REL_EPS = 1e-12

# A triangle is a triple of point indices, stored in ascending order.
Triangle = tuple[int, int, int]


@dataclass(frozen=True)
class Triangulation:
    """A Delaunay mesh over a point set plus its derived area statistics.

    points: (n, 2) float array of the triangulated coordinates.
    triangles: ascending-index triples, sorted canonically.
    areas: per-triangle area in coordinate-unit**2 (Heron, from edge lengths).
    relative_areas: areas / max(areas), so max(relative_areas) == 1 exactly.
    average_relative_area: arithmetic mean of relative_areas.
    """

    points: np.ndarray
    triangles: list[Triangle]
    areas: np.ndarray
    relative_areas: np.ndarray
    average_relative_area: float

    def to_dict(self) -> dict:
        """JSON-ready mesh representation."""
        return {
            "points": [[float(x), float(y)] for x, y in self.points],
            "triangles": [[int(i), int(j), int(k)] for i, j, k in self.triangles],
            "areas": [float(a) for a in self.areas],
            "relative_areas": [float(r) for r in self.relative_areas],
            "average_relative_area": float(self.average_relative_area),
        }


def edge_length(p, q) -> float:
    """Euclidean distance between two 2D points."""
    return math.hypot(p[0] - q[0], p[1] - q[1])


def triangle_area(l1: float, l2: float, l3: float) -> float:
    """Triangle area from its three edge lengths (Heron's formula).

    A slightly negative radicand from rounding is clamped to zero; a
    radicand below -1e-9 * S**4 means the lengths genuinely violate the
    triangle inequality and raises ValueError.
    """
    if l1 < 0 or l2 < 0 or l3 < 0:
        raise ValueError("edge lengths must be non-negative")
    s = (l1 + l2 + l3) / 2.0
    radicand = s * (s - l1) * (s - l2) * (s - l3)
    if radicand < 0:
        if radicand < -1e-9 * s**4:
            raise ValueError(
                f"edge lengths ({l1}, {l2}, {l3}) violate the triangle inequality"
            )
        radicand = 0.0
    return math.sqrt(radicand)


def relative_areas(areas) -> np.ndarray:
    """Each area divided by the largest one. The maximum maps to exactly 1."""
    arr = np.asarray(areas, dtype=float)
    if arr.size == 0:
        raise ValueError("empty area sequence")
    if np.any(arr < 0):
        raise ValueError("areas must be non-negative")
    amax = arr.max()
    if amax <= 0:
        raise ValueError("all areas are zero")
    return arr / amax


def average_relative_area(ras) -> float:
    """Arithmetic mean of the relative areas (divisor = triangle count)."""
    arr = np.asarray(ras, dtype=float)
    if arr.size == 0:
        raise ValueError("empty relative-area sequence")
    return float(arr.mean())


def _orient(ax, ay, bx, by, cx, cy):
    """Raw signed orientation determinant and its term scale."""
    t1 = (ax - cx) * (by - cy)
    t2 = (ay - cy) * (bx - cx)
    return t1 - t2, abs(t1) + abs(t2)


def _incircle(ax, ay, bx, by, cx, cy, px, py):
    """Raw lifted 3x3 determinant for p against circle(a, b, c), plus scale.

    Positive when p is inside, for counterclockwise (a, b, c).
    """
    adx = ax - px
    ady = ay - py
    bdx = bx - px
    bdy = by - py
    cdx = cx - px
    cdy = cy - py
    alift = adx * adx + ady * ady
    blift = bdx * bdx + bdy * bdy
    clift = cdx * cdx + cdy * cdy
    bdxcdy = bdx * cdy
    cdxbdy = cdx * bdy
    cdxady = cdx * ady
    adxcdy = adx * cdy
    adxbdy = adx * bdy
    bdxady = bdx * ady
    det = alift * (bdxcdy - cdxbdy) + blift * (cdxady - adxcdy) + clift * (adxbdy - bdxady)
    scale = (
        alift * (abs(bdxcdy) + abs(cdxbdy))
        + blift * (abs(cdxady) + abs(adxcdy))
        + clift * (abs(adxbdy) + abs(bdxady))
    )
    return det, scale


def in_circumcircle(a, b, c, p) -> str:
    """Classify p against the circumcircle of triangle (a, b, c).

    Returns "inside", "on", or "outside", independent of the orientation
    in which a, b, c are given.  Raises ValueError if a, b, c are
    collinear (no circumcircle exists).
    """
    ax, ay = float(a[0]), float(a[1])
    bx, by = float(b[0]), float(b[1])
    cx, cy = float(c[0]), float(c[1])
    px, py = float(p[0]), float(p[1])
    odet, oscale = _orient(ax, ay, bx, by, cx, cy)
    if abs(odet) <= REL_EPS * oscale:
        raise ValueError("collinear points have no circumcircle")
    det, scale = _incircle(ax, ay, bx, by, cx, cy, px, py)
    if abs(det) <= REL_EPS * scale:
        return "on"
    if (det > 0) == (odet > 0):
        return "inside"
    return "outside"


def empty_circumcircle_violations(points, triangles, rel_eps: float = REL_EPS):
    """All (triangle_index, point_index) pairs with the point strictly
    inside that triangle's circumcircle.  Vectorized; "on" never counts.
    """
    pts = np.asarray(points, dtype=float)
    tris = np.asarray(triangles, dtype=int)
    if tris.size == 0:
        return []
    px = pts[:, 0][None, :]
    py = pts[:, 1][None, :]
    ax = pts[tris[:, 0], 0][:, None]
    ay = pts[tris[:, 0], 1][:, None]
    bx = pts[tris[:, 1], 0][:, None]
    by = pts[tris[:, 1], 1][:, None]
    cx = pts[tris[:, 2], 0][:, None]
    cy = pts[tris[:, 2], 1][:, None]

    osign = np.sign((ax - cx) * (by - cy) - (ay - cy) * (bx - cx))

    adx = ax - px
    ady = ay - py
    bdx = bx - px
    bdy = by - py
    cdx = cx - px
    cdy = cy - py
    alift = adx * adx + ady * ady
    blift = bdx * bdx + bdy * bdy
    clift = cdx * cdx + cdy * cdy
    bdxcdy = bdx * cdy
    cdxbdy = cdx * bdy
    cdxady = cdx * ady
    adxcdy = adx * cdy
    adxbdy = adx * bdy
    bdxady = bdx * ady
    det = alift * (bdxcdy - cdxbdy) + blift * (cdxady - adxcdy) + clift * (adxbdy - bdxady)
    scale = (
        alift * (np.abs(bdxcdy) + np.abs(cdxbdy))
        + blift * (np.abs(cdxady) + np.abs(adxcdy))
        + clift * (np.abs(adxbdy) + np.abs(bdxady))
    )
    strict = det * osign > rel_eps * scale
    return [(int(t), int(p)) for t, p in np.argwhere(strict)]


def delaunay(landmarks) -> Triangulation:
    """Delaunay-triangulate a landmark set and compute its area descriptors.

    Accepts a LandmarkSet or any (n, 2) coordinate array.  The output is
    deterministic: triangles are index triples in ascending order, listed
    in sorted order.  Raises ValueError on duplicate points or when all
    points are collinear.
    """
    pts = np.asarray(getattr(landmarks, "points", landmarks), dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ValueError("expected an (n, 2) coordinate array")
    n = len(pts)
    if n < 3:
        raise ValueError("need at least 3 points to triangulate")
    if not np.all(np.isfinite(pts)):
        raise ValueError("non-finite coordinate")

    order = np.lexsort((pts[:, 1], pts[:, 0]))
    sorted_pts = pts[order]
    dup = np.all(sorted_pts[1:] == sorted_pts[:-1], axis=1)
    if np.any(dup):
        i = int(np.argmax(dup))
        raise ValueError(
            f"duplicate point ({sorted_pts[i, 0]}, {sorted_pts[i, 1]})"
        )

    xs = pts[:, 0].tolist()
    ys = pts[:, 1].tolist()

    # Edge map: (u, v) with u < v  ->  list of opposite vertices (1 or 2).
    opposite: dict[tuple[int, int], list[int]] = {}

    def add_triangle(a, b, c):
        for u, v, w in ((a, b, c), (b, c, a), (a, c, b)):
            key = (u, v) if u < v else (v, u)
            opposite.setdefault(key, []).append(w)

    def legalize(stack):
        # Lawson flips: while an edge's opposite vertex lies strictly inside
        # the circumcircle across it, swap the quad's diagonal.
        while stack:
            u, v = stack.pop()
            key = (u, v) if u < v else (v, u)
            opp = opposite.get(key)
            if opp is None or len(opp) != 2:
                continue
            c, d = opp
            if not _illegal(u, v, c, d):
                continue
            _flip(u, v, c, d, key)
            stack.append((u, c))
            stack.append((v, c))
            stack.append((u, d))
            stack.append((v, d))

    def _illegal(u, v, c, d):
        odet, oscale = _orient(xs[u], ys[u], xs[v], ys[v], xs[c], ys[c])
        if abs(odet) <= REL_EPS * oscale:
            return False
        det, scale = _incircle(xs[u], ys[u], xs[v], ys[v], xs[c], ys[c], xs[d], ys[d])
        if odet < 0:
            det = -det
        return det > REL_EPS * scale

    def _convex_quad(u, v, c, d):
        # u and v strictly on opposite sides of line (c, d).
        d1, s1 = _orient(xs[c], ys[c], xs[d], ys[d], xs[u], ys[u])
        d2, s2 = _orient(xs[c], ys[c], xs[d], ys[d], xs[v], ys[v])
        if abs(d1) <= REL_EPS * s1 or abs(d2) <= REL_EPS * s2:
            return False
        return (d1 > 0) != (d2 > 0)

    def _flip(u, v, c, d, key):
        del opposite[key]
        for a, b, old, new in ((u, c, v, d), (v, c, u, d), (u, d, v, c), (v, d, u, c)):
            k = (a, b) if a < b else (b, a)
            lst = opposite[k]
            lst[lst.index(old)] = new
        kcd = (c, d) if c < d else (d, c)
        opposite[kcd] = [u, v]

    hull: list[int] = []  # counterclockwise vertex ring once 2D
    chain: list[int] = []  # leading collinear run, in sorted order

    for idx in order:
        i = int(idx)
        if not hull:
            if len(chain) < 2:
                chain.append(i)
                continue
            c0, cl = chain[0], chain[-1]
            det, scale = _orient(xs[c0], ys[c0], xs[cl], ys[cl], xs[i], ys[i])
            if abs(det) <= REL_EPS * scale:
                chain.append(i)
                continue
            # First off-line point: fan it against the whole chain.
            for a, b in zip(chain, chain[1:]):
                add_triangle(a, b, i)
            hull = chain + [i] if det > 0 else chain[::-1] + [i]
            chain = []
            continue

        h = len(hull)
        vis = []
        px, py = xs[i], ys[i]
        for j in range(h):
            a = hull[j]
            b = hull[(j + 1) % h]
            t1 = (xs[b] - xs[a]) * (py - ys[a])
            t2 = (ys[b] - ys[a]) * (px - xs[a])
            vis.append(t1 - t2 < -REL_EPS * (abs(t1) + abs(t2)))
        nvis = sum(vis)
        if nvis == 0 or nvis == h:
            raise ValueError("degenerate hull state; input may contain near-duplicates")
        # Rotate so the visible run starts at index 0.  The run is contiguous
        # for an exterior point; anything else means a corrupt hull.
        start = next(j for j in range(h) if vis[j] and not vis[j - 1])
        if not all(vis[(start + j) % h] for j in range(nvis)):
            raise ValueError("degenerate hull state; input may contain near-duplicates")
        hull = hull[start:] + hull[:start]
        stack = []
        for j in range(nvis):
            a, b = hull[j], hull[j + 1]
            add_triangle(a, b, i)
            stack.append((a, b))
        hull = [hull[0], i] + hull[nvis:]
        legalize(stack)

    if not opposite:
        raise ValueError("all points are collinear")

    _canonicalize_cocircular(xs, ys, opposite, _convex_quad)

    tri_set = set()
    for (u, v), opps in opposite.items():
        for w in opps:
            tri_set.add(tuple(sorted((u, v, w))))
    triangles = sorted(tri_set)

    areas = np.empty(len(triangles))
    for t, (a, b, c) in enumerate(triangles):
        pa, pb, pc = pts[a], pts[b], pts[c]
        areas[t] = triangle_area(
            edge_length(pa, pb), edge_length(pb, pc), edge_length(pc, pa)
        )
    ras = relative_areas(areas)
    return Triangulation(
        points=pts,
        triangles=triangles,
        areas=areas,
        relative_areas=ras,
        average_relative_area=average_relative_area(ras),
    )


def _canonicalize_cocircular(xs, ys, opposite, convex_quad):
    """Fix the diagonal of every cocircular quad deterministically.

    Both diagonals of a cocircular quad satisfy the empty-circumcircle
    condition; keep the one whose lowest vertex index is smallest.  Each
    swap strictly lowers the lowest index of the affected edge, so the
    pass terminates.
    """
    while True:
        flipped = False
        for key in sorted(opposite.keys()):
            opp = opposite.get(key)
            if opp is None or len(opp) != 2:
                continue
            u, v = key
            c, d = opp
            if min(c, d) >= min(u, v):
                continue
            odet, oscale = _orient(xs[u], ys[u], xs[v], ys[v], xs[c], ys[c])
            if abs(odet) <= REL_EPS * oscale:
                continue
            det, scale = _incircle(
                xs[u], ys[u], xs[v], ys[v], xs[c], ys[c], xs[d], ys[d]
            )
            if abs(det) > REL_EPS * scale:
                continue
            if not convex_quad(u, v, c, d):
                continue
            del opposite[key]
            for a, b, old, new in ((u, c, v, d), (v, c, u, d), (u, d, v, c), (v, d, u, c)):
                k = (a, b) if a < b else (b, a)
                lst = opposite[k]
                lst[lst.index(old)] = new
            kcd = (c, d) if c < d else (d, c)
            opposite[kcd] = [u, v]
            flipped = True
        if not flipped:
            return
