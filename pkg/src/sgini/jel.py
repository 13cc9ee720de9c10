"""Jackknife empirical likelihood for the relative S-Gini index.

For a candidate ``R`` the estimating U-statistic is ``R * mean - S_hat``, so
its jackknife pseudo-values are affine in ``R``::

    V_k(R) = n * (R * mean - S_hat) - (n - 1) * (R * mean_(-k) - S_hat_(-k))
           = R * X_k - w_k,     w_k = n * S_hat - (n - 1) * S_hat_(-k)

The ``w_k`` are computed once per sample; profiling over ``R`` then costs
O(n) per candidate.
"""

from __future__ import annotations

from dataclasses import dataclass
import math

import numpy as np

from .el import log_ratio_rows
from .errors import ParameterDomainError
from .estimators import ustat_absolute, ustat_weights
from .results import IntervalResult, bisect_boundary, check_level, chi2_1_quantile, chi2_1_sf
from .sample import as_order, as_sample, require_size

__all__ = [
    "PseudoValueProfile",
    "JELTestResult",
    "loo_ustats",
    "pseudo_value_profile",
    "pseudo_values",
    "jel_log_ratio",
    "jel_interval",
    "jel_test",
]


def _loo_sorted(srt: np.ndarray, total: float, nu: int) -> np.ndarray:
    n = srt.size
    w = ustat_weights(n - 1, nu)
    # deleting sorted position r shifts every later order statistic down one slot
    before = np.concatenate(([0.0], np.cumsum(w * srt[:-1])))
    after_terms = w * srt[1:]
    after = np.concatenate((np.cumsum(after_terms[::-1])[::-1], [0.0]))
    means = (total - srt) / (n - 1)
    return means - (before + after)


def loo_ustats(sample, order) -> np.ndarray:
    """Leave-one-out absolute U-statistics ``S_hat_(-k)``, in input order.

    Uses prefix and suffix sums over the order statistics, O(n) after sorting.
    """
    sample, order = as_sample(sample), as_order(order)
    nu = order.require_integer()
    require_size(sample, nu + 1, f"leave-one-out U-statistic of order {nu}")
    out = np.zeros(sample.n)
    if not sample.is_constant:
        out[sample.order] = _loo_sorted(sample.sorted, sample.total, nu)
    return out


@dataclass(frozen=True)
class PseudoValueProfile:
    """Candidate-independent part of the jackknife pseudo-values.

    Attributes
    ----------
    w : ndarray
        ``n * S_hat - (n - 1) * S_hat_(-k)`` for each observation, input order.
    xs : ndarray
        The observations, input order.
    s_hat : float
        Full-sample absolute U-statistic.
    mean : float
    nu : int
    """

    w: np.ndarray
    xs: np.ndarray
    s_hat: float
    mean: float
    nu: int

    @property
    def n(self) -> int:
        return self.xs.size

    @property
    def estimate(self) -> float:
        """Relative U-statistic ``S_hat / mean``; the JEL ratio vanishes here."""
        return self.s_hat / self.mean

    @property
    def hull(self) -> tuple[float, float]:
        """Open range of candidates for which zero lies inside the pseudo-value hull."""
        ratio = self.w / self.xs
        return float(ratio.min()), float(ratio.max())

    def values(self, candidate: float) -> np.ndarray:
        return candidate * self.xs - self.w

    def log_ratio(self, candidate: float) -> float:
        lo, hi = self.hull
        if not lo < candidate < hi:
            return 0.0 if candidate == self.estimate and lo == hi else math.inf
        return float(log_ratio_rows(self.values(candidate)[None, :])[0])


def pseudo_value_profile(sample, order) -> PseudoValueProfile:
    sample, order = as_sample(sample), as_order(order)
    nu = order.require_integer()
    loo = loo_ustats(sample, order)
    s_hat = ustat_absolute(sample, order)
    n = sample.n
    return PseudoValueProfile(w=n * s_hat - (n - 1) * loo, xs=sample.values,
                              s_hat=s_hat, mean=sample.mean, nu=nu)


def pseudo_values(sample, order, candidate: float) -> np.ndarray:
    return pseudo_value_profile(sample, order).values(float(candidate))


def jel_log_ratio(sample, order, candidate: float) -> float:
    """Jackknife empirical log-likelihood ratio ``2 sum log(1 + lam V_k)``.

    ``inf`` when zero is not strictly inside the range of the pseudo-values.
    """
    return pseudo_value_profile(sample, order).log_ratio(float(candidate))


def _interval_from_profile(prof: PseudoValueProfile, level: float, tol: float) -> IntervalResult:
    center = prof.estimate
    lo_edge, hi_edge = prof.hull
    if not lo_edge < center < hi_edge:
        return IntervalResult(center, center, "jel", level, center, {"degenerate": True})
    threshold = chi2_1_quantile(level)
    upper = bisect_boundary(prof.log_ratio, center, hi_edge, threshold, tol)
    lower = bisect_boundary(prof.log_ratio, center, lo_edge, threshold, tol)
    return IntervalResult(lower, upper, "jel", level, center, {"threshold": threshold})


def jel_interval(sample, order, level: float = 0.95, tol: float = 1e-9) -> IntervalResult:
    """JEL confidence interval ``{R : J(R) <= chi2_1(level)}``.

    Each endpoint is bisected between the point estimate and the matching
    hull edge, where ``J`` is infinite. A constant sample yields ``[0, 0]``.
    """
    sample = as_sample(sample)
    level = check_level(level)
    prof = pseudo_value_profile(sample, order)
    if sample.is_constant:
        return IntervalResult(0.0, 0.0, "jel", level, 0.0, {"degenerate": True})
    return _interval_from_profile(prof, level, tol)


@dataclass(frozen=True)
class JELTestResult:
    statistic: float
    p_value: float
    reject: bool
    r0: float
    level: float

    def to_dict(self) -> dict:
        return {"statistic": self.statistic, "p_value": self.p_value,
                "reject": self.reject, "r0": self.r0, "level": self.level}


def jel_test(sample, order, r0: float, level: float = 0.05) -> JELTestResult:
    """Test ``R_nu = r0`` with the JEL ratio against chi-square(1).

    ``level`` is the significance level; the hypothesis is rejected when
    ``J(r0)`` exceeds the ``1 - level`` quantile.
    """
    level = check_level(level)
    r0 = float(r0)
    if not 0.0 <= r0 <= 1.0:
        raise ParameterDomainError(f"null value must lie in [0, 1], got {r0!r}")
    stat = jel_log_ratio(sample, order, r0)
    p = chi2_1_sf(stat)
    return JELTestResult(statistic=stat, p_value=p, reject=bool(p < level), r0=r0, level=level)
