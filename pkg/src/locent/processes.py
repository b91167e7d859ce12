"""Offset Rademacher, shifted empirical, and multiplier processes for loss views.

Exact enumeration over all sign vectors is used up to a size cap, Monte
Carlo with per-replicate seeds beyond it.  The inequality checks are
one-sided statistical tests with 3-sigma slack: they can refute but not
prove, so they are calibrated to be stable under reseeding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .classes import HypothesisClass, LabeledSample, MassartInstance, sample
from .geometry import gamma_loc
from .util import make_rng, tlog

__all__ = [
    "ProcessEstimate",
    "LossClassView",
    "offset_rademacher_sup",
    "shifted_process_sup",
    "check_symmetrization_expectation",
    "check_contraction",
    "check_localization_bound",
    "sudakov_check",
    "InequalityReport",
]

ENUM_CAP = 16
NORMAL_99 = 2.5758293035489004  # two-sided 99% normal quantile


@dataclass(frozen=True)
class ProcessEstimate:
    value: float
    ci_halfwidth: float
    mode: str                    # "exact_enumeration" or "monte_carlo"
    replicates: int
    seed: int | None = None


@dataclass(frozen=True)
class InequalityReport:
    name: str
    lhs: float
    rhs: float
    lhs_ci: float
    rhs_ci: float
    passed: bool
    details: dict

    def as_dict(self) -> dict:
        return {"name": self.name, "lhs": self.lhs, "rhs": self.rhs,
                "lhs_ci": self.lhs_ci, "rhs_ci": self.rhs_ci,
                "pass": self.passed, **self.details}


@dataclass(frozen=True)
class LossClassView:
    """Pointwise derived function class around a target classifier.

    disagreement:       g_f(x)   = 1[f(x) != target(x)]      in {0, 1}
    halved_difference:  g_f(x)   = (f(x) - target(x)) / 2    in {-1, 0, 1}
    excess_loss:        g_f(x,y) = 1[f(x) != y] - 1[target(x) != y]
                                 = -y * (f(x) - target(x)) / 2
    """

    base: HypothesisClass
    target: int
    view: str

    def __post_init__(self):
        if self.view not in ("excess_loss", "disagreement", "halved_difference"):
            raise ValueError(f"unknown view {self.view!r}")
        if not (0 <= self.target < self.base.n_rows):
            raise ValueError("target row out of range")

    @property
    def uses_labels(self) -> bool:
        return self.view == "excess_loss"

    def domain_values(self) -> np.ndarray:
        """Per-point values for the x-only views; the halved difference for excess_loss."""
        fstar = self.base.row(self.target).astype(np.float64)
        diff = (self.base.patterns - fstar) / 2.0
        if self.view == "disagreement":
            return np.abs(diff)
        return diff

    def values(self, xs: np.ndarray, ys: np.ndarray | None = None) -> np.ndarray:
        """Matrix of g values on sample entries, one row per classifier."""
        base = self.domain_values()[:, xs]
        if self.view == "excess_loss":
            if ys is None:
                raise ValueError("excess_loss view needs labels")
            return -ys.astype(np.float64) * base
        return base

    def exact_means(self, instance: MassartInstance) -> np.ndarray:
        """P g per classifier, exact over the finite instance."""
        if instance.cls is not self.base and not instance.cls.equals(self.base):
            raise ValueError("instance class does not match the view")
        px = instance.px.weights
        if self.view == "excess_loss":
            dis = self.base.patterns != instance.fstar
            return dis @ (px * instance.abs_eta)
        return self.domain_values() @ px


_SIGN_CACHE: dict[int, np.ndarray] = {}


def _all_signs(n: int) -> np.ndarray:
    if n not in _SIGN_CACHE:
        k = np.arange(1 << n, dtype=np.uint32)
        bits = (k[:, None] >> np.arange(n, dtype=np.uint32)) & 1
        _SIGN_CACHE[n] = (2.0 * bits - 1.0).astype(np.float32)
    return _SIGN_CACHE[n]


def _sup_mean(values: np.ndarray, penalties: np.ndarray, mode: str, reps: int,
              rng: np.random.Generator | None) -> tuple[float, float, str, int]:
    """(mean, sd of per-replicate sup, mode, replicates) of
    E_eps max_g (sum_i eps_i g_i - penalty_g)."""
    v = np.asarray(values, dtype=np.float32)
    n = v.shape[1]
    if mode == "exact_enumeration":
        if n > ENUM_CAP:
            raise ValueError(
                f"exact enumeration is limited to n <= {ENUM_CAP}; use monte_carlo for n = {n}")
        signs = _all_signs(n)
        sups = (signs @ v.T - penalties.astype(np.float32)).max(axis=1)
        return float(sups.mean()), 0.0, "exact_enumeration", signs.shape[0]
    if mode != "monte_carlo":
        raise ValueError(f"unknown mode {mode!r}")
    signs = rng.choice(np.float32([-1.0, 1.0]), size=(reps, n))
    sups = (signs @ v.T - penalties.astype(np.float32)).max(axis=1)
    return float(sups.mean()), float(sups.std(ddof=1)) if reps > 1 else 0.0, "monte_carlo", reps


def _auto_mode(n: int) -> str:
    return "exact_enumeration" if n <= ENUM_CAP else "monte_carlo"


def offset_rademacher_sup(values, c: float, mode: str = "exact_enumeration",
                          reps: int = 2000, seed: int = 0) -> ProcessEstimate:
    """(1/n) E_eps sup_g (sum_i eps_i g_i - c g_i^2).

    For values in {-1, 0, 1} the quadratic penalty equals c sum |g_i|.
    Exact mode enumerates all 2^n sign vectors (n <= 16); Monte Carlo
    averages `reps` draws and reports a 99% CI half-width.
    """
    if c < 0:
        raise ValueError("c must be >= 0")
    v = np.asarray(values, dtype=np.float64)
    if v.ndim != 2 or v.shape[0] < 1:
        raise ValueError("values must be a nonempty matrix")
    n = v.shape[1]
    penalties = c * (v ** 2).sum(axis=1)
    rng = make_rng(seed, 11) if mode == "monte_carlo" else None
    mean, sd, used_mode, m = _sup_mean(v, penalties, mode, reps, rng)
    ci = 0.0 if used_mode == "exact_enumeration" else NORMAL_99 * sd / math.sqrt(m) / n
    return ProcessEstimate(value=mean / n, ci_halfwidth=ci, mode=used_mode,
                           replicates=m, seed=seed)


def shifted_process_sup(view: LossClassView, instance: MassartInstance,
                        smp: LabeledSample, c: float) -> float:
    """sup_g (P g - (1 + c) P_n g), with P g exact over the finite instance."""
    if c < 0:
        raise ValueError("c must be >= 0")
    if int(smp.xs.max()) >= instance.cls.n_points:
        raise ValueError("sample references unknown domain points")
    pg = view.exact_means(instance)
    vals = view.values(smp.xs, smp.ys)
    png = vals.mean(axis=1)
    return float((pg - (1.0 + c) * png).max())


def check_symmetrization_expectation(view: LossClassView, instance: MassartInstance,
                                     c: float, n: int, trials: int, seed: int,
                                     inner_reps: int = 256) -> InequalityReport:
    """Shifted symmetrization in expectation:
    E sup (P - (1+c)P_n) g  <=  ((c+2)/n) E E_eps sup (sum eps_i g_i - (c/(c+2)) g_i).
    """
    if trials < 100:
        raise ValueError("need at least 100 trials")
    shift = c / (c + 2.0)
    lhs = np.empty(trials)
    rhs = np.empty(trials)
    for t in range(trials):
        smp = sample(instance, n, seed=int(make_rng(seed, t, 1).integers(2 ** 31)))
        lhs[t] = shifted_process_sup(view, instance, smp, c)
        vals = view.values(smp.xs, smp.ys)
        penalties = shift * vals.sum(axis=1)
        mean, _, _, _ = _sup_mean(vals, penalties, _auto_mode(n), inner_reps,
                                  make_rng(seed, t, 2))
        rhs[t] = (c + 2.0) / n * mean
    lhs_m, rhs_m = float(lhs.mean()), float(rhs.mean())
    lhs_se = float(lhs.std(ddof=1) / math.sqrt(trials))
    rhs_se = float(rhs.std(ddof=1) / math.sqrt(trials))
    slack = 3.0 * math.hypot(lhs_se, rhs_se)
    return InequalityReport(
        name="shifted_symmetrization", lhs=lhs_m, rhs=rhs_m,
        lhs_ci=NORMAL_99 * lhs_se, rhs_ci=NORMAL_99 * rhs_se,
        passed=lhs_m <= rhs_m + slack,
        details={"c": c, "n": n, "trials": trials, "seed": seed, "view": view.view})


def check_contraction(instance: MassartInstance, c: float, n: int, trials: int,
                      seed: int, inner_reps: int = 256) -> InequalityReport:
    """Excess-loss contraction: the offset Rademacher expectation of the
    excess loss class is at most the halved-difference term plus (3c/2)
    times a multiplier term over the disagreement class, the multipliers
    being (2/3)(h'_i + 1[target != Y] - 1[target = Y])."""
    if not (0 <= c <= 1):
        raise ValueError("c must lie in [0, 1]")
    cls, target = instance.cls, instance.target
    excess = LossClassView(cls, target, "excess_loss")
    halved = LossClassView(cls, target, "halved_difference")
    disagree = LossClassView(cls, target, "disagreement")
    h = instance.margin
    lhs = np.empty(trials)
    rhs = np.empty(trials)
    for t in range(trials):
        smp = sample(instance, n, seed=int(make_rng(seed, t, 3).integers(2 ** 31)))
        xs, ys = smp.xs, smp.ys
        gy = excess.values(xs, ys)
        mean, _, _, _ = _sup_mean(gy, c * gy.sum(axis=1), _auto_mode(n), inner_reps,
                                  make_rng(seed, t, 4))
        lhs[t] = mean
        fv = halved.values(xs)
        mean1, _, _, _ = _sup_mean(fv, 0.5 * h * c * np.abs(fv).sum(axis=1),
                                   _auto_mode(n), inner_reps, make_rng(seed, t, 5))
        hp = instance.abs_eta[xs]
        flip = (instance.fstar[xs] != ys)
        xi = (2.0 / 3.0) * (hp + np.where(flip, 1.0, -1.0))
        gv = disagree.values(xs)
        term2 = float((gv @ xi - (h / 3.0) * gv.sum(axis=1)).max())
        rhs[t] = mean1 + 1.5 * c * term2
    lhs_m, rhs_m = float(lhs.mean()), float(rhs.mean())
    lhs_se = float(lhs.std(ddof=1) / math.sqrt(trials))
    rhs_se = float(rhs.std(ddof=1) / math.sqrt(trials))
    slack = 3.0 * math.hypot(lhs_se, rhs_se)
    return InequalityReport(
        name="excess_loss_contraction", lhs=lhs_m, rhs=rhs_m,
        lhs_ci=NORMAL_99 * lhs_se, rhs_ci=NORMAL_99 * rhs_se,
        passed=lhs_m <= rhs_m + slack,
        details={"c": c, "n": n, "h": h, "trials": trials, "seed": seed})


def check_localization_bound(instance: MassartInstance, view_kind: str, c: float,
                             n: int, trials: int, seed: int, k_loc: float = 64.0,
                             inner_reps: int = 256,
                             search: str = "auto") -> InequalityReport:
    """Localized multiplier bound: (1/n) E_xi sup (sum xi_i g_i - 4c|g_i|)
    against the fixed point gamma_loc(c, c, n) / n, with Rademacher xi.

    The ratio threshold k_loc is a recorded engineering constant, not a
    value the inequality pins down.
    """
    if not (0 < c <= 0.25):
        raise ValueError("c must lie in (0, 1/4]")
    if view_kind not in ("halved_difference", "disagreement"):
        raise ValueError("view must contain the zero function: use halved_difference or disagreement")
    view = LossClassView(instance.cls, instance.target, view_kind)
    vals_domain = view.domain_values()
    if not np.any(np.all(vals_domain == 0, axis=1)):
        vals_domain = np.vstack([vals_domain, np.zeros(vals_domain.shape[1])])
    totals = np.empty(trials)
    for t in range(trials):
        xs = make_rng(seed, t, 6).choice(instance.cls.n_points, size=n,
                                         p=instance.px.weights)
        vals = vals_domain[:, xs]
        mean, _, _, _ = _sup_mean(vals, 4.0 * c * np.abs(vals).sum(axis=1),
                                  _auto_mode(n), inner_reps, make_rng(seed, t, 7))
        totals[t] = mean / n
    fp = gamma_loc(instance.cls, c, c, n, search=search, seed=seed)
    bound = fp.gamma / n
    value = float(totals.mean())
    se = float(totals.std(ddof=1) / math.sqrt(trials))
    ratio = value / bound
    return InequalityReport(
        name="localization_bound", lhs=value, rhs=k_loc * bound,
        lhs_ci=NORMAL_99 * se, rhs_ci=0.0,
        passed=ratio <= k_loc,
        details={"c": c, "n": n, "trials": trials, "seed": seed, "view": view_kind,
                 "gamma_loc": fp.gamma, "ratio": ratio, "k_loc": k_loc})


def sudakov_check(vectors, trials: int = 4000, seed: int = 0) -> InequalityReport:
    """Minoration ratio for a separated bounded vector family (informational).

    Estimates E_eps sup_v sum eps_i v_i and divides by
    a sqrt(tlog N) min a^2/b, where a is the smallest pairwise l2 distance
    and b the largest sup-norm.  The implied constant is unspecified, so
    the report never fails; it records the fitted ratio.
    """
    v = np.unique(np.asarray(vectors, dtype=np.float64), axis=0)
    nvec, n = v.shape
    b = float(np.abs(v).max()) if nvec else 0.0
    if nvec > 1:
        diffs = v[:, None, :] - v[None, :, :]
        d2 = np.sqrt((diffs ** 2).sum(axis=2))
        a = float(d2[~np.eye(nvec, dtype=bool)].min())
    else:
        a = 0.0
    mode = _auto_mode(n)
    rng = make_rng(seed, 8) if mode == "monte_carlo" else None
    mean, sd, used_mode, m = _sup_mean(v, np.zeros(nvec), mode, trials, rng)
    denom = min(a * math.sqrt(tlog(nvec)), (a * a / b) if b > 0 else math.inf)
    ratio = 0.0 if denom == 0 or nvec == 1 else mean / denom
    se = 0.0 if used_mode == "exact_enumeration" else sd / math.sqrt(m)
    return InequalityReport(
        name="sudakov_minoration", lhs=mean, rhs=denom,
        lhs_ci=NORMAL_99 * se, rhs_ci=0.0, passed=True,
        details={"a": a, "b": b, "count": nvec, "ratio": ratio, "mode": used_mode,
                 "trials": m, "seed": seed})
