"""Empirical likelihood for the relative S-Gini index.

The relative index satisfies ``E[(1 - nu * Fbar(X)^(nu-1)) X - R X] = 0``.
With the survival function replaced by its empirical version, each
observation contributes one constraint value and the profile likelihood
ratio is obtained from a one-dimensional Lagrange multiplier.
"""

from __future__ import annotations

from dataclasses import dataclass
import math

import numpy as np

from .errors import InsufficientSampleError, ParameterDomainError
from .estimators import _survival_sorted
from .results import IntervalResult, bisect_boundary, check_level, chi2_1_quantile
from .sample import SGiniOrder, Sample, as_order, as_sample, require_size

__all__ = [
    "ConstraintVector",
    "LagrangeSolution",
    "VarianceEstimates",
    "constraint_values",
    "solve_lambda",
    "el_log_ratio",
    "el_root",
    "variance_estimates",
    "el_interval",
    "CALIBRATIONS",
]

CALIBRATIONS = ("h1-product", "linearized")

_MAX_ITER = 200


@dataclass(frozen=True)
class ConstraintVector:
    values: np.ndarray
    candidate: float

    def __len__(self) -> int:
        return self.values.size


@dataclass(frozen=True)
class LagrangeSolution:
    lam: float
    feasible: bool
    values: np.ndarray

    @property
    def weights(self) -> np.ndarray:
        """Optimal probabilities ``1 / (n (1 + lam v_i))``; NaN when infeasible."""
        if not self.feasible:
            return np.full(self.values.size, np.nan)
        return 1.0 / (self.values.size * (1.0 + self.lam * self.values))

    def log_ratio(self) -> float:
        if not self.feasible:
            return math.inf
        return 2.0 * float(np.sum(np.log1p(self.lam * self.values)))


@dataclass(frozen=True)
class VarianceEstimates:
    sigma1_sq: float
    sigma2_sq: float

    @property
    def scale(self) -> float:
        """Ratio ``sigma2_sq / sigma1_sq`` that multiplies the chi-square quantile."""
        if self.sigma1_sq <= 0:
            return math.nan
        return self.sigma2_sq / self.sigma1_sq


def _pow0(base: np.ndarray, expo: float) -> np.ndarray:
    # 0**0 == 1; a zero base with a negative exponent contributes nothing
    with np.errstate(divide="ignore"):
        out = np.power(base, expo)
    if expo < 0:
        out[base == 0] = 0.0
    return out


def _check_el_order(order: SGiniOrder) -> float:
    if order.nu < 1:
        raise ParameterDomainError(
            "the empirical-likelihood constraint needs nu > 1: "
            "the empirical survival vanishes at the sample maximum"
        )
    return order.nu


def _slopes_sorted(srt: np.ndarray, nu: float) -> np.ndarray:
    # constraint_i(R) = (slope_i - R) * x_i, with slope_i = 1 - nu * Fbar_n(x_i)^(nu-1)
    return 1.0 - nu * np.power(_survival_sorted(srt), nu - 1.0)


def constraint_values(sample, order, candidate: float) -> ConstraintVector:
    """Per-observation estimating-equation values at ``candidate``, in input order."""
    sample, order = as_sample(sample), as_order(order)
    nu = _check_el_order(order)
    slopes = np.empty(sample.n)
    slopes[sample.order] = _slopes_sorted(sample.sorted, nu)
    x = sample.values
    return ConstraintVector(values=slopes * x - candidate * x, candidate=float(candidate))


def solve_lambda_rows(v: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized Lagrange multiplier solve, one problem per row of ``v``.

    Returns ``(lam, feasible)``. Rows whose values are all zero are feasible
    with ``lam = 0``; rows without a sign change are infeasible (``lam`` NaN).

    Solves ``mean(v / (1 + lam v)) = 0`` on ``(-1/max v, -1/min v)`` with
    Newton steps kept inside a shrinking bracket; a step leaving the bracket
    is replaced by bisection. The function is strictly decreasing there, so
    the bracket update needs only the sign of the residual.
    """
    v = np.atleast_2d(np.asarray(v, dtype=np.float64))
    m, n = v.shape
    vmax = v.max(axis=1)
    vmin = v.min(axis=1)
    lam = np.full(m, np.nan)
    zero = (vmax == 0) & (vmin == 0)
    lam[zero] = 0.0
    ok = (vmin < 0) & (vmax > 0)
    feasible = ok | zero
    if not ok.any():
        return lam, feasible

    idx = np.flatnonzero(ok)
    V = v[idx]
    lo = -1.0 / vmax[idx]
    hi = -1.0 / vmin[idx]
    x = np.zeros(idx.size)
    active = np.ones(idx.size, dtype=bool)
    for _ in range(_MAX_ITER):
        a = np.flatnonzero(active)
        if a.size == 0:
            break
        Va, xa = V[a], x[a]
        r = Va / (1.0 + xa[:, None] * Va)
        g = r.mean(axis=1)
        gp = -(r * r).mean(axis=1)
        pos = g > 0
        lo[a] = np.where(pos, xa, lo[a])
        hi[a] = np.where(pos, hi[a], xa)
        newton = xa - g / gp
        bisect = ~((newton > lo[a]) & (newton < hi[a]))
        new = np.where(bisect, 0.5 * (lo[a] + hi[a]), newton)
        # relative to the terms, so sum(p) = 1 - lam * g stays exact
        solved = np.abs(g) <= 1e-15 * np.abs(r).mean(axis=1)
        stalled = ~bisect & (np.abs(new - xa) <= 2e-16 * np.abs(new))
        collapsed = (hi[a] - lo[a]) <= 4e-16 * np.maximum(np.abs(lo[a]), np.abs(hi[a]))
        x[a] = np.where(solved, xa, new)
        active[a[solved | stalled | collapsed]] = False
    lam[idx] = x
    return lam, feasible


def solve_lambda(values) -> LagrangeSolution:
    """Solve for the Lagrange multiplier of a single estimating-equation vector.

    Parameters
    ----------
    values : array_like
        Constraint values ``v_i``; must be nonempty.

    Returns
    -------
    LagrangeSolution
        ``feasible`` is False when zero is not strictly inside the range of
        the values (the candidate lies outside the convex hull).
    """
    v = np.asarray(getattr(values, "values", values), dtype=np.float64).ravel()
    if v.size == 0:
        raise InsufficientSampleError("solve_lambda needs at least one value")
    lam, feasible = solve_lambda_rows(v[None, :])
    return LagrangeSolution(lam=float(lam[0]), feasible=bool(feasible[0]), values=v)


def log_ratio_rows(v: np.ndarray) -> np.ndarray:
    """``2 sum log(1 + lam v)`` per row; ``inf`` where infeasible."""
    v = np.atleast_2d(v)
    lam, feasible = solve_lambda_rows(v)
    out = np.full(v.shape[0], np.inf)
    if feasible.any():
        f = np.flatnonzero(feasible)
        out[f] = 2.0 * np.log1p(lam[f, None] * v[f]).sum(axis=1)
    return np.maximum(out, 0.0)


class _Profile:
    """Constraint slopes for one sample, reused across candidate values."""

    def __init__(self, sample: Sample, nu: float):
        self.x = sample.sorted
        self.slopes = _slopes_sorted(self.x, nu)
        self.a = self.slopes * self.x
        self.root = math.fsum(self.a) / sample.total
        self.hull = (float(self.slopes.min()), float(self.slopes.max()))

    def values(self, r: float) -> np.ndarray:
        return self.a - r * self.x

    def log_ratio(self, r: float) -> float:
        if not self.hull[0] < r < self.hull[1]:
            if r == self.root:
                return 0.0
            return math.inf
        return float(log_ratio_rows(self.values(r)[None, :])[0])


def el_root(sample, order) -> float:
    """The candidate at which the constraint values sum to zero (``L = 0``)."""
    sample, order = as_sample(sample), as_order(order)
    return _Profile(sample, _check_el_order(order)).root


def el_log_ratio(sample, order, candidate: float) -> float:
    """Empirical log-likelihood ratio ``2 sum log(1 + lam C_i)`` at ``candidate``.

    Returns ``inf`` when the candidate is outside the feasible hull.
    """
    sample, order = as_sample(sample), as_order(order)
    return _Profile(sample, _check_el_order(order)).log_ratio(float(candidate))


def _h1_sorted(srt: np.ndarray, nu: float) -> np.ndarray:
    n = srt.size
    fbar = _survival_sorted(srt)
    term = srt * _pow0(fbar, nu - 2.0)
    # cumulative sum over all j with x_j <= x_i, ties included
    csum = np.cumsum(term)
    last = np.searchsorted(srt, srt, side="right") - 1
    return srt * np.power(fbar, nu - 1.0) + (nu - 1.0) * csum[last] / n


def variance_estimates(sample, order, candidate: float, calibration: str = "h1-product") -> VarianceEstimates:
    """Plug-in variance estimates for the scaled chi-square calibration.

    ``sigma1_sq`` is the mean squared constraint value at ``candidate``.
    ``sigma2_sq`` is the centered (divide-by-n) variance of ``Z_i`` where

    * ``calibration="h1-product"``: ``Z_i = (1 - 2 h1(X_i) - R) X_i``;
    * ``calibration="linearized"``: ``Z_i = (1 - R) X_i - nu h1(X_i)``, the
      influence function of the mean constraint once the estimated survival
      function is accounted for.

    ``h1(x) = x Fbar_n(x)^(nu-1) + (nu-1)/n * sum_{X_j <= x} X_j Fbar_n(X_j)^(nu-2)``.
    """
    sample, order = as_sample(sample), as_order(order)
    nu = _check_el_order(order)
    require_size(sample, 2, "variance estimates")
    r = float(candidate)
    srt = sample.sorted
    c = _slopes_sorted(srt, nu) * srt - r * srt
    s1 = float(np.mean(c * c))
    h1 = _h1_sorted(srt, nu)
    if calibration == "h1-product":
        z = (1.0 - 2.0 * h1 - r) * srt
    elif calibration == "linearized":
        z = (1.0 - r) * srt - nu * h1
    else:
        raise ValueError(f"unknown calibration {calibration!r}; choose from {CALIBRATIONS}")
    s2 = float(np.mean((z - z.mean()) ** 2))
    return VarianceEstimates(sigma1_sq=s1, sigma2_sq=s2)


def _profile_interval(profile: _Profile, threshold: float, tol: float) -> tuple[float, float, dict]:
    root = profile.root
    lo_edge, hi_edge = profile.hull
    diag = {}
    if not math.isfinite(threshold):
        diag["hull_edge"] = True
        return lo_edge, hi_edge, diag
    upper = bisect_boundary(profile.log_ratio, root, hi_edge, threshold, tol)
    lower = bisect_boundary(profile.log_ratio, root, lo_edge, threshold, tol)
    return lower, upper, diag


def el_interval(sample, order, level: float = 0.95, calibration: str = "linearized",
                tol: float = 1e-9) -> IntervalResult:
    """Scaled chi-square empirical-likelihood interval for the relative index.

    Returns ``{R : L(R) <= (sigma2_sq / sigma1_sq) * chi2_1(level)}`` with the
    variance estimates evaluated at the EL root ``R*``. The default
    ``"linearized"`` calibration attains nominal coverage; ``"h1-product"``
    mixes income units (``h1`` times ``X``) and over-covers badly, so it is
    kept only for comparison (see :func:`variance_estimates`). Since ``L`` grows
    monotonically away from ``R*`` and is infinite at the hull edges, each
    endpoint is found by bisection between ``R*`` and the corresponding edge.
    """
    sample, order = as_sample(sample), as_order(order)
    level = check_level(level)
    nu = _check_el_order(order)
    require_size(sample, 2, "EL interval")
    if sample.is_constant:
        return IntervalResult(0.0, 0.0, "el", level, 0.0, {"degenerate": True})
    profile = _Profile(sample, nu)
    var = variance_estimates(sample, order, profile.root, calibration)
    diag = {"sigma1_sq": var.sigma1_sq, "sigma2_sq": var.sigma2_sq, "calibration": calibration}
    if not var.sigma1_sq > 0 or not math.isfinite(var.scale):
        diag["degenerate"] = True
        return IntervalResult(profile.root, profile.root, "el", level, profile.root, diag)
    threshold = var.scale * chi2_1_quantile(level)
    diag["threshold"] = threshold
    lower, upper, extra = _profile_interval(profile, threshold, tol)
    diag.update(extra)
    return IntervalResult(lower, upper, "el", level, profile.root, diag)
