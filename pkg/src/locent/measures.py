"""Exact desk-scale combinatorial measures: VC dimension, growth function, star number.

Searches are exhaustive with structural pruning and explicit budgets; every
result carries a witness that re-verifies by direct definitional replay, and
`exact=False` marks values that are only certified lower bounds because a
budget or cap stopped the search.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .classes import HypothesisClass
from .util import env_budget

__all__ = [
    "MeasureResult",
    "vc_dimension",
    "growth_function",
    "star_number",
    "verify_shattered",
    "verify_star_witness",
]


@dataclass(frozen=True)
class MeasureResult:
    value: int
    witness: tuple
    exact: bool
    search_budget_hit: bool = False


def _support_ints(cls: HypothesisClass) -> np.ndarray | None:
    """Rows as uint64 bitmasks of their +1 positions (None when > 64 points)."""
    if cls.n_points > 64:
        return None
    key = "support_u64"
    cache = cls.cache()
    if key not in cache:
        bits = (cls.patterns > 0).astype(np.uint64)
        weights = (np.uint64(1) << np.arange(cls.n_points, dtype=np.uint64))
        cache[key] = (bits * weights).sum(axis=1, dtype=np.uint64)
    return cache[key]


def _distinct_restrictions(cls: HypothesisClass, points: tuple[int, ...],
                           supports: np.ndarray | None) -> int:
    if supports is not None:
        mask = np.uint64(0)
        for p in points:
            mask |= np.uint64(1) << np.uint64(p)
        return int(np.unique(supports & mask).size)
    sub = cls.patterns[:, list(points)]
    return int(np.unique(sub, axis=0).shape[0])


def verify_shattered(cls: HypothesisClass, points: tuple[int, ...]) -> bool:
    """Definition replay: every +-1 assignment on `points` realized by some row."""
    if not points:
        return True
    realized = {tuple(row) for row in cls.patterns[:, list(points)]}
    return len(realized) == 2 ** len(points)


def _shattered_pairs(cls: HypothesisClass) -> list[tuple[int, int]]:
    """All shattered point pairs at once: four boolean Gram products count the
    label combinations realized on every pair."""
    plus = (cls.patterns > 0).astype(np.float32)
    minus = 1.0 - plus
    ok = ((plus.T @ plus) >= 1) & ((plus.T @ minus) >= 1) \
        & ((minus.T @ plus) >= 1) & ((minus.T @ minus) >= 1)
    i, j = np.nonzero(np.triu(ok, k=1))
    return list(zip(i.tolist(), j.tolist()))


def vc_dimension(cls: HypothesisClass, budget: int | None = None) -> MeasureResult:
    """Largest cardinality of a shattered point set, by level-wise extension.

    Every subset of a shattered set is shattered, so level k only extends
    shattered (k-1)-sets by larger indices (Apriori); levels 1 and 2 are
    fully vectorized.  `budget` caps the number of shatter checks from
    level 3 on; on exhaustion the best witness so far is returned with
    exact=False.
    """
    budget = env_budget("VC_BUDGET", 500_000) if budget is None else budget
    supports = _support_ints(cls)
    p = cls.n_points
    max_level = min(p, int(math.floor(math.log2(cls.n_rows))) if cls.n_rows > 1 else 0)

    cols = cls.patterns
    level1 = [(j,) for j in range(p)
              if cols[:, j].max() == 1 and cols[:, j].min() == -1]
    if not level1 or max_level == 0:
        return MeasureResult(value=0, witness=(), exact=True)
    best = level1[0]
    if max_level == 1:
        return MeasureResult(value=1, witness=best, exact=True)

    current = _shattered_pairs(cls)
    if current:
        best = current[0]
    k = 2
    checks = 0
    exact = True
    while k < max_level and current:
        nxt = []
        stop = False
        for s in current:
            for j in range(s[-1] + 1, p):
                cand = s + (j,)
                checks += 1
                if checks > budget:
                    stop = True
                    break
                if _distinct_restrictions(cls, cand, supports) == 2 ** (k + 1):
                    nxt.append(cand)
            if stop:
                break
        if stop:
            exact = False
            if nxt:
                best = nxt[0]
                k += 1
            break
        if nxt:
            best = nxt[0]
        current = nxt
        k += 1
    return MeasureResult(value=len(best), witness=best, exact=exact,
                         search_budget_hit=not exact)


def growth_function(cls: HypothesisClass, m: int, budget: int | None = None) -> MeasureResult:
    """Maximum number of distinct labelings of m points realized by the class.

    Repetitions never increase the count, so distinct subsets suffice; for
    m >= |domain| the full point set is optimal.  Exhaustive below the
    budget, otherwise a greedy forward selection flagged exact=False.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    budget = env_budget("GROWTH_BUDGET", 200_000) if budget is None else budget
    supports = _support_ints(cls)
    p = cls.n_points
    if m >= p:
        full = tuple(range(p))
        return MeasureResult(value=_distinct_restrictions(cls, full, supports),
                             witness=full, exact=True)
    if math.comb(p, m) <= budget:
        best_v, best_s = -1, None
        for s in combinations(range(p), m):
            v = _distinct_restrictions(cls, s, supports)
            if v > best_v:
                best_v, best_s = v, s
        return MeasureResult(value=best_v, witness=best_s, exact=True)
    chosen: list[int] = []
    for _ in range(m):
        best_v, best_j = -1, None
        for j in range(p):
            if j in chosen:
                continue
            v = _distinct_restrictions(cls, tuple(chosen + [j]), supports)
            if v > best_v:
                best_v, best_j = v, j
        chosen.append(best_j)
    return MeasureResult(value=_distinct_restrictions(cls, tuple(chosen), supports),
                         witness=tuple(chosen), exact=False, search_budget_hit=True)


def verify_star_witness(cls: HypothesisClass, center: int, points: tuple[int, ...],
                        witnesses: tuple[int, ...]) -> bool:
    """Definition replay: witness i flips the center exactly at points[i] within the set."""
    if len(points) != len(set(points)) or len(points) != len(witnesses):
        return False
    f0 = cls.patterns[center]
    pts = list(points)
    for x, w in zip(points, witnesses):
        fw = cls.patterns[w]
        dis = [q for q in pts if fw[q] != f0[q]]
        if dis != [x]:
            return False
    return True


def star_number(cls: HypothesisClass, cap: int | None = None,
                budget: int | None = None) -> MeasureResult:
    """Largest point set each of whose points is individually flippable
    around a center classifier while agreeing with it on the rest.

    Feasible sets are downward closed, so the search extends sets point by
    point in index order, maintaining for every chosen point the rows still
    able to witness it; a point whose witness pool empties prunes the
    branch.  `cap` truncates the reported value (exact=False once the
    search proves >= cap); `budget` caps search nodes.
    """
    cap = env_budget("STAR_CAP", 64) if cap is None else cap
    if cap < 1:
        raise ValueError("cap must be >= 1")
    budget = env_budget("STAR_BUDGET", 200_000) if budget is None else budget
    p = cls.n_points
    patterns = cls.patterns

    best_set: tuple[int, ...] = ()
    best_center = 0
    best_witnesses: tuple[int, ...] = ()
    nodes = 0
    budget_hit = False
    capped = False

    for center in range(cls.n_rows):
        if capped or budget_hit:
            break
        dif = patterns != patterns[center]  # (rows, points) bool
        has_flip = dif.any(axis=0)
        order = [j for j in range(p) if has_flip[j]]
        if len(best_set) >= len(order) and best_set:
            continue

        def extend(chosen: list[int], viable: list[np.ndarray], free: np.ndarray,
                   start: int) -> bool:
            """DFS over extensions; returns True to abort (cap/budget)."""
            nonlocal best_set, best_center, best_witnesses, nodes, budget_hit, capped
            if len(chosen) > len(best_set):
                best_set = tuple(chosen)
                best_center = center
                best_witnesses = tuple(int(np.argmax(v)) for v in viable)
                if len(best_set) >= cap:
                    capped = True
                    return True
            cands = []
            for idx in range(start, len(order)):
                x = order[idx]
                if (free & dif[:, x]).any():
                    cands.append((idx, x))
            if len(chosen) + len(cands) <= len(best_set):
                return False
            for pos, (idx, x) in enumerate(cands):
                if len(chosen) + (len(cands) - pos) <= len(best_set):
                    return False
                nodes += 1
                if nodes > budget:
                    budget_hit = True
                    return True
                col = dif[:, x]
                new_viable = [v & ~col for v in viable]
                if any(not v.any() for v in new_viable):
                    continue
                new_viable.append(free & col)
                if extend(chosen + [x], new_viable, free & ~col, idx + 1):
                    return True
            return False

        extend([], [], np.ones(cls.n_rows, dtype=bool), 0)

    value = len(best_set)
    exact = not (budget_hit or capped)
    return MeasureResult(value=value,
                         witness=(best_center, best_set, best_witnesses),
                         exact=exact, search_budget_hit=budget_hit or capped)
