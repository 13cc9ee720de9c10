"""Result containers and small statistical helpers shared by the inference modules."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
import math

import numpy as np
from scipy import optimize, special

from .errors import ParameterDomainError


@dataclass(frozen=True)
class IntervalResult:
    """A confidence interval for the relative S-Gini index.

    ``center`` is the estimate the interval was grown around (the EL root for
    ``el``/``bcel``, the U-statistic ratio for ``jel``/``boot_t``).
    """

    lower: float
    upper: float
    method: str
    level: float
    center: float
    diagnostics: dict = field(default_factory=dict, compare=False)

    @property
    def length(self) -> float:
        return self.upper - self.lower

    def contains(self, value: float) -> bool:
        return self.lower <= value <= self.upper

    def to_dict(self) -> dict:
        d = asdict(self)
        d["length"] = self.length
        return d


def check_level(level: float) -> float:
    level = float(level)
    if not 0.0 < level < 1.0:
        raise ParameterDomainError(f"confidence level must lie in (0, 1), got {level!r}")
    return level


def chi2_1_quantile(p: float) -> float:
    """Quantile of the chi-square distribution with one degree of freedom.

    Inverts the regularized incomplete gamma function ``P(1/2, x/2)``.
    """
    return 2.0 * float(special.gammaincinv(0.5, p))


def chi2_1_sf(x: float) -> float:
    """Survival function of chi-square(1): ``Q(1/2, x/2)``."""
    if math.isinf(x):
        return 0.0
    return float(special.gammaincc(0.5, 0.5 * x))


def order_quantile(values, q: float) -> float:
    """Sample quantile taken as the ``ceil(q * B)``-th smallest of ``B`` values.

    The index is 1-based and clipped to ``[1, B]``. Infinite values sort last.
    """
    v = np.sort(np.asarray(values, dtype=np.float64))
    b = v.size
    if b == 0:
        raise ValueError("quantile of an empty set")
    # guard against 0.95 * 1000 landing a hair above 950
    k = math.ceil(q * b - 1e-9)
    k = min(max(k, 1), b)
    return float(v[k - 1])


def binomial_se(p: float, m: int) -> float:
    if m <= 0:
        return math.nan
    return math.sqrt(max(p * (1.0 - p), 0.0) / m)


def bisect_boundary(f, inside: float, outside: float, threshold: float, tol: float = 1e-10):
    """Locate where a monotone ``f`` crosses ``threshold`` between two points.

    ``f(inside) <= threshold`` is assumed; ``f(outside)`` may be infinite.
    Bisection runs until the outer bracket end has a finite value, then
    Brent's method finishes. The returned point always satisfies
    ``f(x) <= threshold``.
    """
    a, b = inside, outside
    fb = math.inf
    while abs(b - a) > tol:
        mid = 0.5 * (a + b)
        if mid == a or mid == b:
            return a
        fm = f(mid)
        if fm <= threshold:
            a = mid
        else:
            b, fb = mid, fm
            if math.isfinite(fb):
                break
    if abs(b - a) <= tol or not math.isfinite(fb):
        return a
    x = optimize.brentq(lambda r: f(r) - threshold, a, b, xtol=tol * 0.5, rtol=4 * np.finfo(float).eps)
    # keep the accepted side of the root
    if f(x) > threshold:
        step = math.copysign(tol * 0.5, a - b)
        x = x + step if f(x + step) <= threshold else a
    return x
