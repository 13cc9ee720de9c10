"""Bootstrap-t and bootstrap-calibrated EL intervals for the relative S-Gini index.

Resample ``b`` is always drawn from ``streams.stream(seed, b)``. Both
procedures take sample quantiles with :func:`sgini.results.order_quantile`
(the ``ceil(q B)``-th smallest value).
"""

from __future__ import annotations

from dataclasses import dataclass
import math

import numpy as np

from .el import _Profile, _check_el_order, _profile_interval, log_ratio_rows
from .errors import CalibrationError, ParameterDomainError
from .estimators import batch_ustat_relative, plug_in_relative, ustat_relative
from .results import IntervalResult, check_level, order_quantile
from .sample import as_order, as_sample, require_size
from .streams import DEFAULT_SEED, check_seed, stream

__all__ = ["BootstrapConfig", "bcel_interval", "boot_t_interval", "MAX_DROP_FRACTION"]

MAX_DROP_FRACTION = 0.10

# upper bound on resampled values held in memory at once
_CHUNK_ELEMENTS = 2_000_000


@dataclass(frozen=True)
class BootstrapConfig:
    outer_b: int = 1000
    inner_b: int = 50
    seed: int = DEFAULT_SEED
    method: str = "boot_t"

    def __post_init__(self):
        if self.method not in ("boot_t", "bcel"):
            raise ParameterDomainError(f"unknown bootstrap method {self.method!r}")
        if int(self.outer_b) < 2:
            raise ParameterDomainError("outer_b must be at least 2")
        if self.method == "boot_t" and int(self.inner_b) < 2:
            raise ParameterDomainError("inner_b must be at least 2 for bootstrap-t")
        object.__setattr__(self, "seed", check_seed(self.seed))


def _resample_indices(seed: int, b: int, n: int, inner_b: int = 0):
    rng = stream(seed, b)
    outer = rng.integers(0, n, size=n)
    if not inner_b:
        return outer, None
    inner = outer[rng.integers(0, n, size=(inner_b, n))]
    return outer, inner


def _survival_rows(rows: np.ndarray) -> np.ndarray:
    """Empirical survival (strictly greater count / n) for each ascending row."""
    m, n = rows.shape
    last = np.empty((m, n), dtype=bool)
    last[:, :-1] = rows[:, :-1] != rows[:, 1:]
    last[:, -1] = True
    pos = np.where(last, np.arange(n), n)
    # index of the last member of each tie block
    block_end = np.minimum.accumulate(pos[:, ::-1], axis=1)[:, ::-1]
    return (n - 1 - block_end) / n


def bootstrap_log_ratios(sample, order, candidate: float, outer_b: int, seed: int):
    """EL log-ratios at ``candidate`` for ``outer_b`` resamples.

    Each resample uses its own empirical survival function. Returns the
    ratios (``inf`` for constant or infeasible resamples) and the number of
    constant resamples.
    """
    sample, order = as_sample(sample), as_order(order)
    nu = _check_el_order(order)
    n = sample.n
    idx = np.stack([_resample_indices(seed, b, n)[0] for b in range(outer_b)])
    idx.sort(axis=1)
    rows = sample.sorted[idx]
    constant = rows[:, 0] == rows[:, -1]
    slopes = 1.0 - nu * np.power(_survival_rows(rows), nu - 1.0)
    ratios = log_ratio_rows((slopes - candidate) * rows)
    ratios[constant] = np.inf
    return ratios, int(constant.sum())


def bcel_interval(sample, order, level: float = 0.95, config: BootstrapConfig | None = None,
                  tol: float = 1e-9) -> IntervalResult:
    """Bootstrap-calibrated empirical likelihood interval.

    The critical value is the ``level`` sample quantile of the resampled EL
    ratios, each evaluated at the full-sample plug-in estimate. The
    interval is then ``{R : L(R) <= critical}`` on the original sample.

    Raises
    ------
    CalibrationError
        When more than 10% of resamples are constant.
    """
    sample, order = as_sample(sample), as_order(order)
    level = check_level(level)
    config = config or BootstrapConfig(method="bcel")
    nu = _check_el_order(order)
    require_size(sample, 2, "BCEL interval")
    b = int(config.outer_b)
    target = plug_in_relative(sample, order)
    ratios, n_constant = bootstrap_log_ratios(sample, order, target, b, config.seed)
    if n_constant > MAX_DROP_FRACTION * b:
        raise CalibrationError(f"{n_constant} of {b} bootstrap resamples are constant")
    critical = order_quantile(ratios, level)
    profile = _Profile(sample, nu)
    diag = {
        "critical": critical,
        "calibration_target": target,
        "constant_resamples": n_constant,
        "infinite_ratios": int(np.isinf(ratios).sum()),
        "outer_b": b,
        "seed": config.seed,
    }
    lower, upper, extra = _profile_interval(profile, critical, tol)
    diag.update(extra)
    return IntervalResult(lower, upper, "bcel", level, profile.root, diag)


def boot_t_interval(sample, order, level: float = 0.95,
                    config: BootstrapConfig | None = None) -> IntervalResult:
    """Studentized bootstrap interval around the U-statistic estimate.

    Each outer resample is studentized by the standard deviation of
    ``inner_b`` second-level resamples drawn from it. Replicates whose inner
    standard deviation is zero are dropped; more than 10% dropped raises
    :class:`CalibrationError`.
    """
    sample, order = as_sample(sample), as_order(order)
    level = check_level(level)
    config = config or BootstrapConfig()
    nu = order.require_integer()
    require_size(sample, nu + 1, f"bootstrap-t of order {nu}")
    n = sample.n
    outer_b, inner_b = int(config.outer_b), int(config.inner_b)
    estimate = ustat_relative(sample, order)

    reps = np.empty(outer_b)
    inner_se = np.empty(outer_b)
    chunk = max(1, _CHUNK_ELEMENTS // ((inner_b + 1) * n))
    for start in range(0, outer_b, chunk):
        stop = min(outer_b, start + chunk)
        drawn = [_resample_indices(config.seed, b, n, inner_b) for b in range(start, stop)]
        outer = np.stack([d[0] for d in drawn])
        inner = np.stack([d[1] for d in drawn])
        outer.sort(axis=-1)
        inner.sort(axis=-1)
        reps[start:stop] = batch_ustat_relative(sample.sorted[outer], nu)
        inner_reps = batch_ustat_relative(sample.sorted[inner], nu)
        inner_se[start:stop] = inner_reps.std(axis=1, ddof=1)

    se = float(np.std(reps, ddof=1))
    keep = np.isfinite(inner_se) & (inner_se > 0)
    dropped = int(outer_b - keep.sum())
    if dropped > MAX_DROP_FRACTION * outer_b or not se > 0:
        raise CalibrationError(
            f"{dropped} of {outer_b} bootstrap-t replicates have zero inner standard error"
        )
    t = (reps[keep] - estimate) / inner_se[keep]
    alpha = 1.0 - level
    t_lo = order_quantile(t, alpha / 2)
    t_hi = order_quantile(t, 1.0 - alpha / 2)
    lower = estimate - t_hi * se
    upper = estimate - t_lo * se
    diag = {"se": se, "t_lower": t_lo, "t_upper": t_hi, "dropped": dropped,
            "outer_b": outer_b, "inner_b": inner_b, "seed": config.seed}
    if not math.isfinite(lower) or not math.isfinite(upper):
        raise CalibrationError("bootstrap-t produced a non-finite endpoint")
    return IntervalResult(lower, upper, "boot_t", level, estimate, diag)
