"""Independent brute-force oracles: plain exhaustive enumeration, no search
tricks, kept deliberately separate from the library's algorithms."""

from itertools import combinations, combinations_with_replacement, product
import math

import numpy as np

_POP = {}


def _popcounts(k):
    if k not in _POP:
        _POP[k] = np.array([bin(m).count("1") for m in range(1 << k)], dtype=np.int32)
    return _POP[k]


def pairwise_dists(patterns, weights=None):
    a = np.asarray(patterns)
    if weights is None:
        weights = np.ones(a.shape[1])
    w = np.asarray(weights, dtype=float)
    return ((a[:, None, :] != a[None, :, :]) * w).sum(axis=2)


def brute_max_packing(dists, eps):
    """Maximum subset with pairwise distance > eps, over all 2^k subsets.

    Beyond 16 patterns the subset sweep is replaced by maximum clique in the
    complement graph via networkx Bron-Kerbosch: a different algorithm from
    a different codebase, still exact.
    """
    k = dists.shape[0]
    if k > 16:
        import networkx as nx
        g = nx.Graph()
        g.add_nodes_from(range(k))
        for i in range(k):
            for j in range(i + 1, k):
                if dists[i, j] > eps:
                    g.add_edge(i, j)
        return max(len(c) for c in nx.find_cliques(g))
    masks = np.arange(1 << k, dtype=np.int64)
    valid = np.ones(1 << k, dtype=bool)
    for i in range(k):
        for j in range(i + 1, k):
            if dists[i, j] <= eps:
                valid &= ((masks >> i) & 1 & (masks >> j)) == 0
    return int(_popcounts(k)[valid].max())


def project_multiset(cls, multiset):
    """Distinct restricted rows and the multiplicity weights of the support."""
    support, counts = np.unique(np.asarray(multiset), return_counts=True)
    sub = cls.patterns[:, support]
    seen = {}
    for row in sub:
        seen.setdefault(row.tobytes(), row)
    pats = np.array(list(seen.values()), dtype=np.int8)
    return pats, counts


def brute_global_packing(cls, gamma, n):
    best = 0
    for ms in combinations_with_replacement(range(cls.n_points), n):
        pats, w = project_multiset(cls, ms)
        d = pairwise_dists(pats, w)
        best = max(best, brute_max_packing(d, gamma))
    return best


def brute_local_packing(cls, gamma, n, h):
    """Triple max over multisets, centers, and radii eps in [gamma, n*h]."""
    hi = int(math.floor(n * h + 1e-12))
    if gamma > hi:
        return 1
    best = 1
    for ms in combinations_with_replacement(range(cls.n_points), n):
        pats, w = project_multiset(cls, ms)
        d = pairwise_dists(pats, w)
        total = w.sum()
        for f in range(pats.shape[0]):
            for eps in range(gamma, hi + 1):
                radius = min(math.floor(eps / h + 1e-12), total)
                sep = math.ceil(eps / 2 - 1e-12)
                ball = np.nonzero(d[f] <= radius)[0]
                sub = d[np.ix_(ball, ball)]
                best = max(best, brute_max_packing(sub, sep))
    return best


def brute_vc(cls):
    p = cls.n_points
    best = 0
    for k in range(1, p + 1):
        found = False
        for pts in combinations(range(p), k):
            realized = {tuple(row) for row in cls.patterns[:, list(pts)]}
            if len(realized) == 2 ** k:
                best, found = k, True
                break
        if not found:
            break
    return best


def brute_star(cls):
    p = cls.n_points
    best = 0
    for center in range(cls.n_rows):
        f0 = cls.patterns[center]
        for k in range(best + 1, p + 1):
            hit = False
            for pts in combinations(range(p), k):
                ok = True
                for x in pts:
                    has = False
                    for row in cls.patterns:
                        if row[x] != f0[x] and all(row[y] == f0[y] for y in pts if y != x):
                            has = True
                            break
                    if not has:
                        ok = False
                        break
                if ok:
                    hit = True
                    break
            if hit:
                best = k
            else:
                break
    return best


def brute_growth(cls, m):
    p = cls.n_points
    if m >= p:
        return len({tuple(r) for r in cls.patterns})
    best = 0
    for pts in combinations(range(p), m):
        best = max(best, len({tuple(row) for row in cls.patterns[:, list(pts)]}))
    return best


def brute_min_cover(dist_rows, ball, half):
    """Minimal number of balls of radius `half` centered in `ball` covering it."""
    k = len(ball)
    assert k <= 24
    covers = []
    for c in ball:
        mask = 0
        for idx, g in enumerate(ball):
            if dist_rows[c][g] <= half + 1e-12:
                mask |= 1 << idx
        covers.append(mask)
    universe = (1 << k) - 1
    for size in range(1, k + 1):
        for subset in combinations(range(k), size):
            m = 0
            for i in subset:
                m |= covers[i]
            if m == universe:
                return size
    return k


def brute_doubling(cls, px, gamma_frac):
    a = cls.patterns.astype(float)
    w = np.asarray(px.weights, dtype=float)
    rho = ((a[:, None, :] != a[None, :, :]) * w).sum(axis=2)
    best_size = 1
    for f in range(cls.n_rows):
        levels = sorted({gamma_frac} | {float(v) for v in rho[f] if v >= gamma_frac - 1e-12})
        for eps in levels:
            ball = [g for g in range(cls.n_rows) if rho[f][g] <= eps + 1e-12]
            best_size = max(best_size, brute_min_cover(rho, ball, eps / 2.0))
    return math.log(max(best_size, math.e))


def brute_offset_sup(values, c):
    """(1/n) E_eps max_g (sum eps_i g_i - c g_i^2) by explicit enumeration."""
    v = np.asarray(values, dtype=float)
    nvec, n = v.shape
    total = 0.0
    for signs in product((-1.0, 1.0), repeat=n):
        e = np.asarray(signs)
        total += max(float(e @ v[g] - c * (v[g] ** 2).sum()) for g in range(nvec))
    return total / (2 ** n) / n


def brute_kl_joint(b1, b2, weights, h, big_n, n):
    """Product KL via the explicit joint law over (point, label) outcomes."""
    b1 = np.asarray(b1)
    b2 = np.asarray(b2)
    w = np.asarray(weights, dtype=float) / np.asarray(weights, dtype=float).sum()
    kl = 0.0
    for i in range(b1.size):
        for y in (1, -1):
            p1 = (1 + (2 * b1[i] - 1) * h) / 2 if y == 1 else (1 - (2 * b1[i] - 1) * h) / 2
            p2 = (1 + (2 * b2[i] - 1) * h) / 2 if y == 1 else (1 - (2 * b2[i] - 1) * h) / 2
            q1 = w[i] * p1
            q2 = w[i] * p2
            if q1 > 0:
                kl += q1 * math.log(q1 / q2)
    return n * kl


def brute_excess_risk(instance, row):
    """R(f) - R(target) from the full joint law."""
    risk = 0.0
    risk_star = 0.0
    f = instance.cls.row(row)
    fstar = instance.fstar
    for i, px in enumerate(instance.px.weights):
        p_plus = (1.0 + instance.eta[i]) / 2.0
        for y, py in ((1, p_plus), (-1, 1.0 - p_plus)):
            risk += px * py * (f[i] != y)
            risk_star += px * py * (fstar[i] != y)
    return risk - risk_star
