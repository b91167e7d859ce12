"""Hamming-space packing machinery and entropy fixed points for explicit classes.

Covers maximal packings (exact branch-and-bound or greedy), worst-case
global and local empirical packing numbers over point multisets, the fixed
points of global and local empirical entropy, disagreement capacity, and
the distribution-dependent doubling dimension.

Separation convention: an eps-packing has pairwise distance STRICTLY
greater than eps, which makes every maximal-by-inclusion eps-packing an
eps-cover.  Real radii are discretized as floor(eps/h) ball radii and
ceil(eps/2) separation; scan tables record the discretized values so
alternate roundings can be audited.  All entropy logarithms are truncated:
log(x) = ln(max(x, e)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations, combinations_with_replacement

import numpy as np

from .classes import DomainDistribution, HypothesisClass, MassartInstance
from .util import env_budget, hamming_matrix, make_rng, tlog

__all__ = [
    "Projection",
    "PackingResult",
    "GlobalPackingResult",
    "LocalPackingResult",
    "FixedPointResult",
    "DoublingResult",
    "project",
    "max_packing",
    "verify_packing",
    "global_packing_number",
    "gamma_star",
    "local_packing_number",
    "gamma_loc",
    "alexander_capacity",
    "doubling_dimension",
    "pseudoconvexity_constant",
    "packing_log_vc_bound",
]


# ---------------------------------------------------------------------------
# projections


@dataclass(frozen=True)
class Projection:
    """A class restricted to a point multiset: distinct rows + column weights."""

    multiset: tuple[int, ...]
    support: np.ndarray          # distinct domain indices
    weights: np.ndarray          # multiplicity per support index
    patterns: np.ndarray         # distinct projected rows (u x |support|)
    row_map: np.ndarray          # representative class-row per projected row
    dists: np.ndarray            # pairwise weighted Hamming distances (u x u)

    @property
    def size(self) -> int:
        return int(self.weights.sum())

    @property
    def n_patterns(self) -> int:
        return self.patterns.shape[0]


def project(cls: HypothesisClass, multiset, cache: bool = True) -> Projection:
    """Restrict the class to a multiset of domain points (given as indices)."""
    ms = tuple(sorted(int(i) for i in multiset))
    if not ms:
        raise ValueError("multiset must be nonempty")
    if ms[0] < 0 or ms[-1] >= cls.n_points:
        raise ValueError("multiset index out of range")
    store = cls.cache().setdefault("proj_lru", {})
    if cache and ms in store:
        return store[ms]
    support, counts = np.unique(np.asarray(ms, dtype=np.int64), return_counts=True)
    sub = cls.patterns[:, support]
    first: dict[bytes, int] = {}
    for i, row in enumerate(sub):
        first.setdefault(row.tobytes(), i)
    reps = np.array(sorted(first.values()), dtype=np.int64)
    pats = sub[reps]
    dists = hamming_matrix(pats, weights=counts)
    proj = Projection(multiset=ms, support=support, weights=counts,
                      patterns=pats, row_map=reps, dists=dists)
    if cache:
        if len(store) >= 4:  # distance matrices can be large; keep a tiny LRU
            store.pop(next(iter(store)))
        store[ms] = proj
    return proj


# ---------------------------------------------------------------------------
# maximal packings


@dataclass(frozen=True)
class PackingResult:
    size: int
    witness: tuple[int, ...]
    radius: int
    mode: str                    # "exact" (certified) or "greedy"
    budget_hit: bool = False


def _greedy_pack(dists: np.ndarray, eps: int, subset: np.ndarray | None = None) -> list[int]:
    """Maximal-by-inclusion packing by minimum-index elimination."""
    if subset is None:
        subset = np.arange(dists.shape[0])
    chosen: list[int] = []
    cand = subset
    while cand.size:
        i = int(cand[0])
        chosen.append(i)
        cand = cand[dists[i, cand] > eps]
    return chosen


def _exact_pack(dists: np.ndarray, eps: int, subset: np.ndarray | None,
                node_budget: int) -> tuple[list[int], bool]:
    """Maximum packing as a maximum independent set in the conflict graph.

    Branch and bound over bitsets with the greedy packing as incumbent;
    returns (witness, certified).  certified=False when the node budget ran
    out, in which case the witness is the best packing found so far.
    """
    if subset is None:
        subset = np.arange(dists.shape[0])
    idx = np.asarray(subset)
    k = idx.size
    if k == 0:
        return [], True
    local = dists[np.ix_(idx, idx)]
    conflict = local <= eps
    np.fill_diagonal(conflict, False)
    adj = [int.from_bytes(np.packbits(conflict[i], bitorder="little").tobytes(), "little")
           for i in range(k)]
    greedy = _greedy_pack(local, eps)
    best_mask = 0
    for i in greedy:
        best_mask |= 1 << i
    best_size = len(greedy)
    full = (1 << k) - 1
    nodes = 0
    exhausted = True

    def expand(cand: int, cur: int, cur_size: int):
        nonlocal best_mask, best_size, nodes, exhausted
        if not exhausted:
            return
        nodes += 1
        if nodes > node_budget:
            exhausted = False
            return
        if cand == 0:
            if cur_size > best_size:
                best_size, best_mask = cur_size, cur
            return
        if cur_size + cand.bit_count() <= best_size:
            return
        # branch on the candidate with most conflicts among candidates
        rest = cand
        v, vdeg = -1, -1
        while rest:
            b = rest & -rest
            u = b.bit_length() - 1
            deg = (adj[u] & cand).bit_count()
            if deg > vdeg:
                v, vdeg = u, deg
            rest ^= b
        bit = 1 << v
        expand(cand & ~(adj[v] | bit), cur | bit, cur_size + 1)
        expand(cand & ~bit, cur, cur_size)

    expand(full, 0, 0)
    out = [int(idx[i]) for i in range(k) if best_mask >> i & 1]
    return out, exhausted


def max_packing(patterns, eps: int, mode: str = "exact", weights=None,
                node_budget: int | None = None, dists: np.ndarray | None = None) -> PackingResult:
    """Maximal subset with pairwise (weighted) Hamming distance > eps.

    Exact mode solves the conflict-graph maximum independent set by branch
    and bound (falling back to the greedy witness, flagged, when the node
    budget runs out); greedy mode returns a maximal-by-inclusion packing,
    which doubles as an eps-cover.
    """
    if eps < 0:
        raise ValueError("eps must be >= 0")
    if dists is None:
        pats = np.asarray(patterns)
        if pats.ndim != 2 or pats.shape[0] < 1:
            raise ValueError("patterns must be a nonempty matrix")
        dists = hamming_matrix(pats, weights=weights)
    if mode == "greedy":
        chosen = _greedy_pack(dists, eps)
        return PackingResult(size=len(chosen), witness=tuple(chosen), radius=eps, mode="greedy")
    if mode != "exact":
        raise ValueError(f"unknown packing mode {mode!r}")
    budget = env_budget("PACK_NODE_BUDGET", 200_000) if node_budget is None else node_budget
    witness, certified = _exact_pack(dists, eps, None, budget)
    if not certified:
        return PackingResult(size=len(witness), witness=tuple(witness), radius=eps,
                             mode="greedy", budget_hit=True)
    return PackingResult(size=len(witness), witness=tuple(witness), radius=eps, mode="exact")


def verify_packing(dists: np.ndarray, eps: int, witness) -> bool:
    """Replay check: witness indices pairwise separated by more than eps."""
    w = list(witness)
    return all(dists[a, b] > eps for a, b in combinations(w, 2)) if len(w) > 1 else True


# ---------------------------------------------------------------------------
# multiset search


def _canonical_multiset(m: int, n: int) -> tuple[int, ...]:
    """Evenly spread n picks over m points (all-distinct when n == m)."""
    if n <= m:
        idx = np.unique(np.round(np.linspace(0, m - 1, n)).astype(int))
        k = 0
        out = list(idx)
        while len(out) < n:  # fill collisions deterministically
            if k not in out:
                out.append(k)
            k += 1
        return tuple(sorted(out[:n]))
    base, extra = divmod(n, m)
    counts = [base + (1 if i < extra else 0) for i in range(m)]
    out = []
    for i, c in enumerate(counts):
        out.extend([i] * c)
    return tuple(out)


def _search_scale(cls: HypothesisClass) -> tuple[int, int]:
    """(restarts, swap tries) scaled down for large pattern matrices."""
    size = cls.n_rows * cls.n_points
    restarts = env_budget("RESTARTS", 32)
    swaps = env_budget("SWAP_TRIES", 8)
    if size >= 1 << 23:
        return min(restarts, 2), 0
    if size >= 1 << 21:
        return min(restarts, 4), 0
    if size >= 1 << 17:
        return min(restarts, 6), min(swaps, 2)
    if size >= 1 << 12:
        return min(restarts, 8), min(swaps, 4)
    return restarts, swaps


def _start_multisets(cls: HypothesisClass, n: int, seed: int, restarts: int) -> list[tuple[int, ...]]:
    m = cls.n_points
    starts = [_canonical_multiset(m, n)]
    rng = make_rng(seed, m, n, 77)
    for _ in range(max(0, restarts - 1)):
        starts.append(tuple(sorted(rng.integers(0, m, size=n).tolist())))
    seen, out = set(), []
    for s in starts:
        if s not in seen:
            seen.add(s)
            out.append(s)
    return out


def _exhaustive_multisets(cls: HypothesisClass, n: int, search: str,
                          eval_work: int = 1) -> bool:
    """Whether the multiset search will enumerate every n-point multiset.

    Enumeration must fit both the count cap and a total-work cap (count
    times the caller's per-evaluation cost estimate); past either, the
    search hill-climbs and results are flagged heuristic.
    """
    if search not in ("exact", "auto"):
        return False
    count = math.comb(cls.n_points + n - 1, n)
    if count > env_budget("MULTISET_CAP", 1_000_000):
        return False
    return count * max(eval_work, 1) <= env_budget("MULTISET_WORK", 120_000)


def _maximize_over_multisets(cls: HypothesisClass, n: int, objective, search: str,
                             seed: int, exhaustive: bool):
    """Maximize objective(Projection) -> (score, payload) over n-point multisets.

    exhaustive=True enumerates every multiset; otherwise canonical + random
    starts are evaluated and the incumbent is refined by single-point
    swaps.  Returns (score, payload, multiset, exhausted, evals).
    """
    m = cls.n_points
    use_exact = exhaustive

    best = (None, None, None)  # score, payload, multiset
    evals = 0

    def consider(ms, cache=True):
        nonlocal best, evals
        proj = project(cls, ms, cache=cache)
        score, payload = objective(proj)
        evals += 1
        if best[0] is None or score > best[0]:
            best = (score, payload, proj.multiset)
        return score

    if use_exact:
        for ms in combinations_with_replacement(range(m), n):
            consider(ms, cache=False)
        return best[0], best[1], best[2], True, evals

    # cap exceeded for search="exact": automatic hill climb, reported via exhausted=False
    restarts, swap_tries = _search_scale(cls)
    rng = make_rng(seed, m, n, 101)
    for start in _start_multisets(cls, n, seed, restarts):
        consider(start)
    # refine only the incumbent: single-point swaps, first improvement
    current = list(best[2])
    cur_score = best[0]
    for _ in range(swap_tries):
        pos = int(rng.integers(0, n))
        new_pt = int(rng.integers(0, m))
        if current[pos] == new_pt:
            continue
        cand = list(current)
        cand[pos] = new_pt
        s = consider(tuple(sorted(cand)))
        if s > cur_score:
            current, cur_score = cand, s
    return best[0], best[1], best[2], False, evals


# ---------------------------------------------------------------------------
# global packing numbers and their fixed point


@dataclass(frozen=True)
class GlobalPackingResult:
    packing: PackingResult
    multiset: tuple[int, ...]
    exact: bool                  # multiset search exhausted and packing certified

    @property
    def size(self) -> int:
        return self.packing.size


def _pack_on_projection(proj: Projection, eps: int, exact: bool,
                        node_budget: int | None = None) -> PackingResult:
    mode = "exact" if exact else "greedy"
    return max_packing(None, eps, mode=mode, dists=proj.dists, node_budget=node_budget)


def global_packing_number(cls: HypothesisClass, gamma: int, n: int,
                          search: str = "auto", seed: int = 0) -> GlobalPackingResult:
    """Worst case over n-point multisets of the maximal gamma-packing size."""
    if gamma < 0 or n < 1:
        raise ValueError("need gamma >= 0 and n >= 1")

    want_exact = _exhaustive_multisets(cls, n, search, eval_work=cls.n_rows)

    def objective(proj: Projection):
        res = _pack_on_projection(proj, gamma, exact=want_exact)
        return res.size, res

    score, payload, ms, exhausted, _ = _maximize_over_multisets(
        cls, n, objective, search, seed, exhaustive=want_exact)
    exact = exhausted and payload.mode == "exact"
    return GlobalPackingResult(packing=payload, multiset=ms, exact=exact)


@dataclass(frozen=True)
class FixedPointResult:
    gamma: int
    scan: tuple                  # per-gamma rows: dicts with the scan table columns
    params: dict
    exact: bool

    def scan_rows(self) -> list[dict]:
        return [dict(r) for r in self.scan]


def gamma_star(cls: HypothesisClass, c: float, n: int, search: str = "auto",
               seed: int = 0) -> FixedPointResult:
    """Largest gamma with c*gamma <= log of the worst-case gamma-packing on n points.

    The scan covers gamma in [1, min(n, floor(tlog(#patterns)/c))]; larger
    gamma cannot satisfy the inequality because a projection never has more
    patterns than the class.  Values of gamma up to floor(1/c) always
    satisfy it (truncated log >= 1), which also bounds the result from
    below when the scan window is empty.
    """
    if not (0 < c <= 1):
        raise ValueError("c must lie in (0, 1]")
    if n < 1:
        raise ValueError("n must be >= 1")
    g_cap = min(n, int(math.floor(tlog(cls.n_rows) / c + 1e-12)))
    floor_gamma = int(math.floor(1.0 / c + 1e-12))

    want_exact = _exhaustive_multisets(cls, n, search,
                                       eval_work=cls.n_rows * max(g_cap, 1))
    per_gamma: dict[int, PackingResult] = {}
    all_exact = True

    def objective(proj: Projection):
        nonlocal all_exact
        best_gamma = 0
        for g in range(1, g_cap + 1):
            res = _pack_on_projection(proj, g, exact=want_exact)
            if res.mode != "exact":
                all_exact = False
            prev = per_gamma.get(g)
            if prev is None or res.size > prev.size:
                per_gamma[g] = res
            if c * g <= tlog(res.size) + 1e-12:
                best_gamma = g
        return best_gamma, None

    _, _, _, exhausted, _ = _maximize_over_multisets(
        cls, n, objective, search, seed, exhaustive=want_exact)

    rows = []
    best = 0
    for g in range(1, g_cap + 1):
        res = per_gamma[g]
        lg = tlog(res.size)
        ok = c * g <= lg + 1e-12
        rows.append({"gamma": g, "log_packing": lg, "satisfied": ok,
                     "witness_size": res.size, "mode": res.mode})
        if ok:
            best = g
    gamma = max(best, floor_gamma, 1)
    return FixedPointResult(gamma=gamma, scan=tuple(rows),
                            params={"c": c, "n": n, "search": search, "seed": seed},
                            exact=exhausted and all_exact)


# ---------------------------------------------------------------------------
# local packing numbers and their fixed point


@dataclass(frozen=True)
class LocalPackingResult:
    value: int
    center_row: int | None       # class-row index achieving the max
    eps: int | None              # radius achieving the max (None if range empty)
    multiset: tuple[int, ...] | None
    witness: tuple[int, ...]     # class-row indices of the packing
    ball_radius: int | None
    separation: int | None
    mode: str
    exact: bool


def _eps_grid(lo: int, hi: int, exact: bool) -> list[int]:
    """Radii to scan: all integers when exact or short, else dense head
    plus a geometric tail (always including hi)."""
    if lo > hi:
        return []
    dense = env_budget("EPS_DENSE", 64)
    if exact or hi - lo + 1 <= dense:
        return list(range(lo, hi + 1))
    grid = list(range(lo, lo + dense))
    e = float(lo + dense - 1)
    while e < hi:
        e = max(e * 1.25, e + 1)
        grid.append(min(hi, int(round(e))))
    return sorted(set(grid))


def _center_indices(u: int, exact: bool) -> np.ndarray:
    if exact:
        return np.arange(u)
    cap = env_budget("CENTER_CAP", 96)
    if u <= cap:
        return np.arange(u)
    return np.unique(np.round(np.linspace(0, u - 1, cap)).astype(int))


def _local_profile(proj: Projection, h: float, eps_values: list[int], exact: bool,
                   node_budget: int | None = None):
    """Best packing per radius: eps -> (size, center_pattern_idx, witness_pattern_idxs).

    For a center f and radius eps the ball holds patterns within
    floor(eps/h) of f and the packing separation is ceil(eps/2) (strict).
    Returns (profile, all_certified).
    """
    out: dict[int, tuple[int, int, tuple]] = {}
    certified_all = True
    if not eps_values:
        return out, certified_all
    dists = proj.dists
    total = proj.size
    u = proj.n_patterns
    centers = _center_indices(u, exact)
    budget = node_budget or env_budget("PACK_NODE_BUDGET", 200_000)
    # precompute the discretizations once; they are shared by every center
    discr = [(eps, min(int(math.floor(eps / h + 1e-12)), total),
              int(math.ceil(eps / 2 - 1e-12))) for eps in eps_values]
    max_dist = int(dists.max()) if u > 1 else 0
    full_cache: dict[int, list[int]] = {}  # saturated balls are center-independent
    for f in centers:
        drow = dists[f]
        for eps, radius, sep in discr:
            prev = out.get(eps)
            if radius >= max_dist:
                if not exact:
                    if sep not in full_cache:
                        full_cache[sep] = _greedy_pack(dists, sep)
                        certified_all = False
                    witness = full_cache[sep]
                    if prev is None or len(witness) > prev[0]:
                        out[eps] = (len(witness), int(f), tuple(int(w) for w in witness))
                    continue
                ball = np.arange(u)
            else:
                ball = np.nonzero(drow <= radius)[0]
            if prev is not None and ball.size <= prev[0]:
                continue  # packing cannot beat current best
            if exact:
                witness, certified = _exact_pack(dists, sep, ball, budget)
                if not certified:
                    certified_all = False
                    witness = _greedy_pack(dists, sep, ball)
            else:
                witness = _greedy_pack(dists, sep, ball)
                certified_all = False
            if prev is None or len(witness) > prev[0]:
                out[eps] = (len(witness), int(f), tuple(int(w) for w in witness))
    return out, certified_all


def local_packing_number(cls: HypothesisClass, gamma: int, n: int, h: float,
                         search: str = "auto", seed: int = 0) -> LocalPackingResult:
    """Worst-case local packing: max over n-point multisets, centers f, and
    radii eps in [gamma, floor(n*h)] of the ceil(eps/2)-strict packing of
    the Hamming ball of radius floor(eps/h) around f.

    When the radius range is empty (gamma > n*h) the value is 1: only the
    center survives.
    """
    if gamma < 1 or n < 1 or not (0 < h <= 1):
        raise ValueError("need gamma >= 1, n >= 1, h in (0, 1]")
    hi = int(math.floor(n * h + 1e-12))
    if gamma > hi:
        return LocalPackingResult(value=1, center_row=None, eps=None, multiset=None,
                                  witness=(), ball_radius=None, separation=None,
                                  mode="exact", exact=True)
    want_exact = _exhaustive_multisets(cls, n, search,
                                       eval_work=cls.n_rows * (hi - gamma + 1))
    eps_values = _eps_grid(gamma, hi, want_exact)
    grid_complete = eps_values == list(range(gamma, hi + 1))
    packs_certified = True

    def objective(proj: Projection):
        nonlocal packs_certified
        prof, certified = _local_profile(proj, h, eps_values, exact=want_exact)
        packs_certified = packs_certified and certified
        if not prof:
            return (1, 0), None
        # lexicographic score: largest packing, then smallest achieving
        # radius, so the recorded argmax is the tightest certificate
        best_eps = max(prof, key=lambda e: (prof[e][0], -e))
        size, center, witness = prof[best_eps]
        return (size, -best_eps), (best_eps, center, witness, proj)

    score, payload, ms, exhausted, _ = _maximize_over_multisets(
        cls, n, objective, search, seed, exhaustive=want_exact)
    if payload is None:
        return LocalPackingResult(value=1, center_row=None, eps=None, multiset=ms,
                                  witness=(), ball_radius=None, separation=None,
                                  mode="exact" if exhausted else "greedy", exact=exhausted)
    eps, center, witness, proj = payload
    exact = exhausted and want_exact and grid_complete and packs_certified
    return LocalPackingResult(
        value=score[0],
        center_row=int(proj.row_map[center]),
        eps=eps,
        multiset=ms,
        witness=tuple(int(proj.row_map[w]) for w in witness),
        ball_radius=min(int(math.floor(eps / h + 1e-12)), proj.size),
        separation=int(math.ceil(eps / 2 - 1e-12)),
        mode="exact" if exact else "greedy",
        exact=exact,
    )


def gamma_loc(cls: HypothesisClass, h: float, h_prime: float, n: int,
              search: str = "auto", seed: int = 0) -> FixedPointResult:
    """Largest gamma with h*gamma <= log of the local packing number at gamma.

    The local packing number at gamma is the sup over radii eps >= gamma,
    so it equals the suffix maximum of the per-radius profile; one profile
    pass per candidate multiset serves the whole scan.  gamma values up to
    floor(1/h) always satisfy the inequality (truncated log >= 1), hence
    h * gamma_loc >= 1/2 always.
    """
    if not (0 < h <= 1) or not (0 < h_prime <= 1):
        raise ValueError("h and h' must lie in (0, 1]")
    if n < 1:
        raise ValueError("n must be >= 1")
    g_cap = min(n, int(math.floor(tlog(cls.n_rows) / h + 1e-12)))
    floor_gamma = max(1, int(math.floor(1.0 / h + 1e-12)))
    hi = int(math.floor(n * h_prime + 1e-12))

    want_exact = _exhaustive_multisets(cls, n, search,
                                       eval_work=cls.n_rows * max(hi, 1))
    eps_values = _eps_grid(1, hi, want_exact) if hi >= 1 else []
    grid_complete = eps_values == list(range(1, hi + 1))
    packs_certified = True

    best_profile: dict[int, tuple[int, int, tuple, tuple]] = {}

    def objective(proj: Projection):
        nonlocal packs_certified
        prof, certified = _local_profile(proj, h_prime, eps_values, exact=want_exact)
        packs_certified = packs_certified and certified
        for eps, (size, center, witness) in prof.items():
            prev = best_profile.get(eps)
            if prev is None or size > prev[0]:
                best_profile[eps] = (size, int(proj.row_map[center]),
                                     tuple(int(proj.row_map[w]) for w in witness),
                                     proj.multiset)
        # score a candidate multiset by the fixed point it certifies alone
        best_gamma = 0
        suffix = 0
        for eps in sorted(prof, reverse=True):
            suffix = max(suffix, prof[eps][0])
            if eps <= g_cap and h * eps <= tlog(suffix) + 1e-12:
                best_gamma = max(best_gamma, eps)
        return best_gamma, None

    _, _, _, exhausted, _ = _maximize_over_multisets(
        cls, n, objective, search, seed, exhaustive=want_exact)

    # suffix maxima of the pooled profile give M_loc(gamma) for every gamma
    fully_exact = exhausted and want_exact and grid_complete and packs_certified
    rows = []
    best = 0
    eps_sorted = sorted(best_profile)
    for g in range(1, g_cap + 1):
        size, argmax_eps, center, witness, ms = 1, None, None, (), None
        for eps in eps_sorted:
            if eps >= g and best_profile[eps][0] > size:
                size, center, witness, ms = best_profile[eps]
                argmax_eps = eps
        lg = tlog(size)
        ok = h * g <= lg + 1e-12
        rows.append({"gamma": g, "log_packing": lg, "satisfied": ok,
                     "witness_size": size, "mode": "exact" if fully_exact else "greedy",
                     "eps": argmax_eps, "center_row": center,
                     "ball_radius": None if argmax_eps is None else min(int(math.floor(argmax_eps / h_prime + 1e-12)), n),
                     "separation": None if argmax_eps is None else int(math.ceil(argmax_eps / 2 - 1e-12)),
                     "witness": witness, "multiset": ms})
        if ok:
            best = g
    gamma = max(best, floor_gamma)
    assert h * gamma >= 0.5 - 1e-12, "fixed point dropped below its guaranteed floor"
    return FixedPointResult(gamma=gamma, scan=tuple(rows),
                            params={"h": h, "h_prime": h_prime, "n": n,
                                    "search": search, "seed": seed},
                            exact=fully_exact)


# ---------------------------------------------------------------------------
# capacity, doubling dimension, pseudoconvexity


def alexander_capacity(instance: MassartInstance, eps: float) -> float:
    """Disagreement capacity: sup over attainable levels eps0 >= eps of the
    px-mass of the disagreement region of the eps0-ball around the target,
    divided by eps0, floored at 1."""
    if not (0 < eps <= 1):
        raise ValueError("eps must lie in (0, 1]")
    cls, px = instance.cls, instance.px.weights
    fstar = instance.fstar
    disagree = cls.patterns != fstar  # (rows, points)
    radii = disagree @ px             # px-mass of disagreement with target per row
    tol = 1e-12
    levels = {float(eps)} | {float(r) for r in radii if r >= eps - tol}
    best = 1.0
    for level in sorted(levels):
        ball = radii <= level + tol
        region = disagree[ball].any(axis=0)
        mass = float(px[region].sum())
        best = max(best, mass / level)
    return best


@dataclass(frozen=True)
class DoublingResult:
    value: float
    exact: bool
    center_row: int | None
    eps: float | None
    cover_size: int


def _greedy_cover(cover_masks: list[int], universe: int) -> list[int]:
    chosen: list[int] = []
    left = universe
    while left:
        best_i, best_gain = -1, -1
        for i, m in enumerate(cover_masks):
            gain = (m & left).bit_count()
            if gain > best_gain:
                best_i, best_gain = i, gain
        chosen.append(best_i)
        left &= ~cover_masks[best_i]
    return chosen


def _exact_cover_size(cover_masks: list[int], universe: int, node_budget: int) -> tuple[int, bool]:
    """Minimal number of sets covering the universe (branch and bound)."""
    ub = len(_greedy_cover(cover_masks, universe))
    best = ub
    nodes = 0
    exhausted = True
    max_gain = max((m.bit_count() for m in cover_masks), default=1)

    def expand(left: int, used: int):
        nonlocal best, nodes, exhausted
        if not exhausted:
            return
        nodes += 1
        if nodes > node_budget:
            exhausted = False
            return
        if left == 0:
            best = min(best, used)
            return
        if used + math.ceil(left.bit_count() / max_gain) >= best:
            return
        # branch on the uncovered element with the fewest covering sets
        elem, count = -1, None
        rest = left
        while rest:
            b = rest & -rest
            e = b.bit_length() - 1
            c = sum(1 for m in cover_masks if m >> e & 1)
            if count is None or c < count:
                elem, count = e, c
            rest ^= b
        options = [i for i, m in enumerate(cover_masks) if m >> elem & 1]
        options.sort(key=lambda i: -(cover_masks[i] & left).bit_count())
        for i in options:
            expand(left & ~cover_masks[i], used + 1)

    expand(universe, 0)
    return best, exhausted


def doubling_dimension(cls: HypothesisClass, px: DomainDistribution, gamma_frac: float,
                       exact: bool = True, node_budget: int | None = None) -> DoublingResult:
    """Max over centers f and radii eps >= gamma_frac of the truncated log of
    the minimal (eps/2)-cover of the px-ball of radius eps around f.

    The px pseudo-metric is P_X(f != g); covers use centers from the ball
    itself.  Candidate radii are the attainable distance levels (the cover
    is otherwise constant between levels).
    """
    if not (0 < gamma_frac <= 1):
        raise ValueError("gamma_frac must lie in (0, 1]")
    budget = env_budget("COVER_NODE_BUDGET", 100_000) if node_budget is None else node_budget
    a = cls.patterns.astype(np.float64)
    w = px.weights.astype(np.float64)
    gram = (a * w) @ a.T
    rho = (1.0 - gram) / 2.0
    tol = 1e-12
    best = DoublingResult(value=1.0, exact=True, center_row=None, eps=None, cover_size=1)
    all_exact = True
    for f in range(cls.n_rows):
        drow = rho[f]
        levels = {gamma_frac} | {float(v) for v in drow if v >= gamma_frac - tol}
        for eps in sorted(levels):
            ball = np.nonzero(drow <= eps + tol)[0]
            if ball.size <= best.cover_size:
                continue
            half = eps / 2.0
            masks = []
            for c in ball:
                covered = rho[c, ball] <= half + tol
                masks.append(int.from_bytes(np.packbits(covered, bitorder="little").tobytes(), "little"))
            universe = (1 << ball.size) - 1
            if exact:
                size, certified = _exact_cover_size(masks, universe, budget)
                if not certified:
                    all_exact = False
            else:
                size = len(_greedy_cover(masks, universe))
                certified = False
                all_exact = False
            if size > best.cover_size:
                best = DoublingResult(value=tlog(size), exact=True, center_row=f,
                                      eps=eps, cover_size=size)
    return DoublingResult(value=best.value, exact=all_exact, center_row=best.center_row,
                          eps=best.eps, cover_size=best.cover_size)


@dataclass(frozen=True)
class PseudoconvexityReport:
    constant: float
    gamma: int
    eps: int | None
    n: int
    exact: bool


def pseudoconvexity_constant(cls: HypothesisClass, h: float, n: int,
                             search: str = "auto", seed: int = 0) -> PseudoconvexityReport:
    """Smallest c certifying pseudoconvexity at this n: the ratio between the
    radius achieving the local packing supremum (with unit ball scale) at
    gamma_loc(h, 1) and the fixed point itself."""
    fp = gamma_loc(cls, h, 1.0, n, search=search, seed=seed)
    lp = local_packing_number(cls, fp.gamma, n, 1.0, search=search, seed=seed)
    if lp.eps is None:
        return PseudoconvexityReport(constant=1.0, gamma=fp.gamma, eps=None, n=n,
                                     exact=fp.exact and lp.exact)
    return PseudoconvexityReport(constant=max(1.0, lp.eps / fp.gamma), gamma=fp.gamma,
                                 eps=lp.eps, n=n, exact=fp.exact and lp.exact)


def packing_log_vc_bound(d: int, s: int, n: int, gamma: int, h: float) -> float:
    """Explicit entropy bound 2 d log(11 e^2 (n/gamma min s/h)) with truncated log."""
    return 2.0 * d * tlog(11.0 * math.e ** 2 * min(n / gamma, s / h))
