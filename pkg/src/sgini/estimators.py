"""Point estimators for the Gini mean difference and the S-Gini family.

Two routes are provided for the absolute index ``S_nu = mu - E[min(X_1..X_nu)]``
and its relative form ``R_nu = S_nu / mu``:

* plug-in: an L-statistic with weights ``((n-i+1)^nu - (n-i)^nu) / n^nu``,
  valid for any real ``nu > 0, nu != 1``;
* U-statistic: the unbiased average of the kernel
  ``(x_1 + ... + x_nu - nu * min) / nu`` over all ``nu``-subsets, for integer
  ``nu >= 2``, evaluated in O(n log n) through order-statistic weights.

:func:`ustat_brute_force` enumerates the subsets directly and exists to check
the closed form.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
import math

import numpy as np

from .errors import OracleSizeError
from .sample import SGiniOrder, Sample, as_order, as_sample, require_size

__all__ = [
    "EstimateResult",
    "empirical_survival_ranks",
    "plug_in_weights",
    "plug_in_absolute",
    "plug_in_relative",
    "ustat_weights",
    "ustat_absolute",
    "ustat_relative",
    "ustat_brute_force",
    "gmd_and_gini",
    "estimate",
]

BRUTE_FORCE_CAP = 2_000_000


@dataclass(frozen=True)
class EstimateResult:
    absolute: float
    relative: float
    estimator: str  # "plug-in" or "u-statistic"


def _survival_sorted(srt: np.ndarray) -> np.ndarray:
    n = srt.size
    return (n - np.searchsorted(srt, srt, side="right")) / n


def empirical_survival_ranks(sample) -> np.ndarray:
    """Empirical survival ``#{j : X_j > X_i} / n`` for each observation.

    Values are returned in the sample's original order. Tied observations
    share a value, and the largest observation always maps to 0.
    """
    sample = as_sample(sample)
    out = np.empty(sample.n)
    out[sample.order] = _survival_sorted(sample.sorted)
    return out


def plug_in_weights(n: int, nu: float) -> np.ndarray:
    """Weights attached to the ascending order statistics by the plug-in estimator.

    Computed from ratios ``(n-i+1)/n`` so large ``n`` never overflows; they
    sum to one.
    """
    upper = np.arange(n, 0, -1, dtype=np.float64) / n
    lower = np.arange(n - 1, -1, -1, dtype=np.float64) / n
    return upper**nu - lower**nu


def plug_in_absolute(sample, order) -> float:
    sample, order = as_sample(sample), as_order(order)
    if sample.is_constant:
        return 0.0
    w = plug_in_weights(sample.n, order.nu)
    return sample.mean - float(np.dot(w, sample.sorted))


def plug_in_relative(sample, order) -> float:
    sample = as_sample(sample)
    return plug_in_absolute(sample, order) / sample.mean


def ustat_weights(n: int, nu: int) -> np.ndarray:
    """``C(n-i, nu-1) / C(n, nu)`` for i = 1..n, built by a ratio recurrence.

    The first weight is ``nu / n`` and each next one is multiplied by
    ``(n-i-nu+1) / (n-i)``; weights past ``i = n-nu+1`` are zero.
    """
    w = np.zeros(n)
    m = n - nu + 1  # number of nonzero weights
    if m <= 0:
        return w
    i = np.arange(1, m, dtype=np.float64)
    ratios = (n - i - nu + 1) / (n - i)
    w[0] = nu / n
    if m > 1:
        w[1:m] = (nu / n) * np.cumprod(ratios)
    return w


def _ustat_absolute_sorted(srt: np.ndarray, mean: float, nu: int) -> float:
    if srt[0] == srt[-1]:
        return 0.0
    return mean - float(np.dot(ustat_weights(srt.size, nu), srt))


def ustat_absolute(sample, order) -> float:
    """Unbiased U-statistic estimate of the absolute S-Gini index.

    Parameters
    ----------
    sample : Sample or array_like
    order : SGiniOrder or int
        Must be an integer ``>= 2`` and no larger than the sample size.

    Returns
    -------
    float
        ``mean - sum_i C(n-i, nu-1)/C(n, nu) * X_(i)``, which equals the
        average of ``(sum(x) - nu*min(x)) / nu`` over every ``nu``-subset.
    """
    sample, order = as_sample(sample), as_order(order)
    nu = order.require_integer()
    require_size(sample, nu, f"U-statistic of order {nu}")
    return _ustat_absolute_sorted(sample.sorted, sample.mean, nu)


def ustat_relative(sample, order) -> float:
    sample = as_sample(sample)
    return ustat_absolute(sample, order) / sample.mean


def ustat_brute_force(sample, order, cap: int = BRUTE_FORCE_CAP) -> float:
    """Average the degree-``nu`` kernel over every subset, by enumeration.

    Testing oracle only; raises :class:`OracleSizeError` when ``C(n, nu)``
    exceeds ``cap``.
    """
    sample, order = as_sample(sample), as_order(order)
    nu = order.require_integer()
    require_size(sample, nu, f"U-statistic of order {nu}")
    count = math.comb(sample.n, nu)
    if count > cap:
        raise OracleSizeError(f"C({sample.n}, {nu}) = {count} subsets exceeds cap {cap}")
    x = sample.values
    total = math.fsum(
        (math.fsum(sub) - nu * min(sub)) / nu for sub in combinations(x.tolist(), nu)
    )
    return total / count


def gmd_and_gini(sample) -> tuple[float, float]:
    """Gini mean difference ``E|X1 - X2|`` and Gini index ``GMD / (2 mean)``.

    Uses ``|a - b| = 2 max(a, b) - a - b``, so the GMD is twice the order-2
    U-statistic; the Gini index is therefore identical, bit for bit, to
    ``ustat_relative(sample, 2)``.
    """
    sample = as_sample(sample)
    require_size(sample, 2, "Gini mean difference")
    gmd = 2.0 * _ustat_absolute_sorted(sample.sorted, sample.mean, 2)
    return gmd, gmd / (2.0 * sample.mean)


def estimate(sample, order, estimator: str = "u-statistic") -> EstimateResult:
    sample = as_sample(sample)
    if estimator == "u-statistic":
        a = ustat_absolute(sample, order)
    elif estimator == "plug-in":
        a = plug_in_absolute(sample, order)
    else:
        raise ValueError(f"unknown estimator {estimator!r}")
    return EstimateResult(absolute=a, relative=a / sample.mean, estimator=estimator)


def batch_ustat_relative(sorted_rows: np.ndarray, nu: int) -> np.ndarray:
    """Relative U-statistic for each row of an array of ascending samples."""
    n = sorted_rows.shape[-1]
    w = ustat_weights(n, nu)
    mean = sorted_rows.mean(axis=-1)
    out = 1.0 - (sorted_rows @ w) / mean
    out[sorted_rows[..., 0] == sorted_rows[..., -1]] = 0.0
    return out

