"""Exact enumeration of affine-separator dichotomies on a finite point set.

A labeling v in {-1,+1}^n is realizable iff some (w, b) has
v_i * (<w, x_i> + b) > 0 for every i, which after rescaling is the LP
feasibility question v_i * (<w, x_i> + b) >= 1.  Coordinates are converted
to exact rationals (floats are rationals), so the oracle has no tolerance:
near-degenerate labelings are classified exactly.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

__all__ = ["is_affinely_separable", "enumerate_separator_patterns"]


def _phase1_witness(rows: list[list[Fraction]]) -> list[Fraction] | None:
    """Phase-1 simplex (Bland's rule) for A z >= 1 with z free.

    rows[i] holds the coefficients of constraint i over the free variables.
    Standard form uses z = u - w with u, w >= 0, a slack and an artificial
    variable per constraint.  Returns a feasible z, or None.
    """
    m = len(rows)
    k = len(rows[0])
    ncols = 2 * k + 2 * m  # u, w, slacks, artificials
    one = Fraction(1)
    zero = Fraction(0)

    # tableau[i] = coefficients + rhs; basis starts at the artificials
    tableau = []
    for i, row in enumerate(rows):
        t = [zero] * (ncols + 1)
        for j, c in enumerate(row):
            t[j] = c
            t[k + j] = -c
        t[2 * k + i] = -one  # slack: A z - s = 1
        t[2 * k + m + i] = one
        t[ncols] = one
        tableau.append(t)
    basis = [2 * k + m + i for i in range(m)]

    # objective: minimize sum of artificials; reduced costs via big row
    obj = [zero] * (ncols + 1)
    for i in range(m):
        for j in range(ncols + 1):
            obj[j] -= tableau[i][j]
    for i in range(m):
        obj[2 * k + m + i] += one

    while True:
        enter = -1
        for j in range(ncols):
            if obj[j] < zero:
                enter = j  # Bland: lowest index with negative reduced cost
                break
        if enter < 0:
            break
        leave = -1
        best = None
        for i in range(m):
            a = tableau[i][enter]
            if a > zero:
                ratio = tableau[i][ncols] / a
                if best is None or ratio < best or (ratio == best and basis[i] < basis[leave]):
                    best = ratio
                    leave = i
        if leave < 0:
            break  # unbounded phase-1 cannot happen; defensive
        piv = tableau[leave][enter]
        tableau[leave] = [c / piv for c in tableau[leave]]
        for i in range(m):
            if i != leave and tableau[i][enter] != zero:
                f = tableau[i][enter]
                tableau[i] = [c - f * p for c, p in zip(tableau[i], tableau[leave])]
        if obj[enter] != zero:
            f = obj[enter]
            obj = [c - f * p for c, p in zip(obj, tableau[leave])]
        basis[leave] = enter

    if -obj[ncols] != zero:
        return None
    z = [zero] * k
    for i, b in enumerate(basis):
        if b < k:
            z[b] += tableau[i][ncols]
        elif b < 2 * k:
            z[b - k] -= tableau[i][ncols]
    return z


def _to_fractions(coords: np.ndarray) -> list[list[Fraction]]:
    return [[Fraction(float(c)) for c in row] + [Fraction(1)]
            for row in np.asarray(coords, dtype=float)]


def _feasible(aug: list[list[Fraction]], labels) -> list[Fraction] | None:
    rows = [[Fraction(int(v)) * c for c in p] for p, v in zip(aug, labels)]
    return _phase1_witness(rows)


# ---------------------------------------------------------------------------
# exact planar route: strict separability == disjoint convex hulls


def _cross(o, a, b) -> Fraction:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _hull(points: list[tuple]) -> list[tuple]:
    """Monotone-chain convex hull; collinear inputs collapse to a segment."""
    pts = sorted(set(points))
    if len(pts) <= 2:
        return pts
    lower: list[tuple] = []
    for p in pts:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list[tuple] = []
    for p in reversed(pts):
        while len(upper) >= 2 and _cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return lower[:-1] + upper[:-1]


def _on_segment(p, a, b) -> bool:
    if _cross(a, b, p) != 0:
        return False
    return (min(a[0], b[0]) <= p[0] <= max(a[0], b[0])
            and min(a[1], b[1]) <= p[1] <= max(a[1], b[1]))


def _segments_meet(a, b, c, d) -> bool:
    """Closed segment intersection (touching counts)."""
    o1, o2 = _cross(a, b, c), _cross(a, b, d)
    o3, o4 = _cross(c, d, a), _cross(c, d, b)
    if ((o1 > 0) != (o2 > 0) and o1 != 0 and o2 != 0
            and (o3 > 0) != (o4 > 0) and o3 != 0 and o4 != 0):
        return True
    return (_on_segment(c, a, b) or _on_segment(d, a, b)
            or _on_segment(a, c, d) or _on_segment(b, c, d))


def _point_in_hull(p, hull: list[tuple]) -> bool:
    """Closed membership: boundary counts as inside."""
    if len(hull) == 1:
        return p == hull[0]
    if len(hull) == 2:
        return _on_segment(p, hull[0], hull[1])
    sign = 0
    for i in range(len(hull)):
        c = _cross(hull[i], hull[(i + 1) % len(hull)], p)
        if c == 0:
            continue
        s = 1 if c > 0 else -1
        if sign == 0:
            sign = s
        elif s != sign:
            return False
    return True


def _hulls_disjoint(h1: list[tuple], h2: list[tuple]) -> bool:
    if not h1 or not h2:
        return True
    for p in h1:
        if _point_in_hull(p, h2):
            return False
    for p in h2:
        if _point_in_hull(p, h1):
            return False
    e1 = [(h1[i], h1[(i + 1) % len(h1)]) for i in range(len(h1))] if len(h1) > 1 else []
    e2 = [(h2[i], h2[(i + 1) % len(h2)]) for i in range(len(h2))] if len(h2) > 1 else []
    for a, b in e1:
        for c, d in e2:
            if _segments_meet(a, b, c, d):
                return False
    return True


def _separable_2d(pts: list[tuple], labels) -> bool:
    pos = [p for p, v in zip(pts, labels) if v > 0]
    neg = [p for p, v in zip(pts, labels) if v < 0]
    return _hulls_disjoint(_hull(pos), _hull(neg))


def _exact_points_2d(coords: np.ndarray) -> list[tuple]:
    return [(Fraction(float(x)), Fraction(float(y))) for x, y in coords]


def is_affinely_separable(coords: np.ndarray, labels) -> bool:
    """Whether labels in {-1,+1} are realized by sign(<w,x>+b) with no point
    on the boundary.

    In the plane this is decided by exact convex-hull disjointness (compact
    convex sets admit a strictly separating line iff they are disjoint);
    other dimensions go through the exact-rational LP.
    """
    coords = np.asarray(coords, dtype=float)
    labels = list(labels)
    if coords.shape[1] == 2:
        return _separable_2d(_exact_points_2d(coords), labels)
    return _feasible(_to_fractions(coords), labels) is not None


def enumerate_separator_patterns(coords: np.ndarray) -> np.ndarray:
    """All sign vectors realizable by affine separators on the given points.

    Incremental prefix extension: a labeling is realizable only if every
    prefix is, so infeasible prefixes prune whole subtrees.  Returns the
    patterns as an int8 matrix in lexicographic order (+1 before -1).
    """
    coords = np.asarray(coords, dtype=float)
    n = coords.shape[0]
    planar = coords.shape[1] == 2
    pts = _exact_points_2d(coords) if planar else None
    aug = None if planar else _to_fractions(coords)
    prefixes: list[tuple[int, ...]] = [()]
    for i in range(n):
        nxt = []
        for p in prefixes:
            for s in (1, -1):
                cand = p + (s,)
                if planar:
                    ok = _separable_2d(pts[: i + 1], cand)
                else:
                    ok = _feasible(aug[: i + 1], cand) is not None
                if ok:
                    nxt.append(cand)
        prefixes = nxt
    return np.array(prefixes, dtype=np.int8)
