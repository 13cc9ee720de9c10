"""Monte-Carlo studies: true index values, samplers, coverage and rejection rates."""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
import math

import numpy as np
from scipy import integrate, special

from .bootstrap import BootstrapConfig, bcel_interval, boot_t_interval
from .el import el_interval
from .errors import ParameterDomainError, SGiniError
from .jel import jel_interval, jel_test
from .results import binomial_se, check_level
from .sample import Sample, as_order
from .streams import SIMULATION, check_seed, open_uniform, stream

__all__ = [
    "DistributionSpec",
    "SimReport",
    "true_r_nu",
    "quadrature_r_nu",
    "sample_distribution",
    "coverage_study",
    "type1_power_study",
    "METHODS",
    "CSV_FIELDS",
]

METHODS = ("el", "jel", "boot_t", "bcel")
FAILURE_FLAG_FRACTION = 0.05
QUAD_TOL = 1e-10

_FAMILY_ALIASES = {
    "exp": "exponential", "exponential": "exponential",
    "pareto": "pareto",
    "lognormal": "lognormal", "lnorm": "lognormal", "log-normal": "lognormal",
}
_PARAM_NAMES = {
    "exponential": ("rate",),
    "pareto": ("scale", "shape"),
    "lognormal": ("mu", "sigma2"),
}


@dataclass(frozen=True)
class DistributionSpec:
    """A parametric income distribution.

    ``exponential(rate)``, ``pareto(scale k, shape alpha)`` with survival
    ``(k/x)^alpha`` on ``x > k``, or ``lognormal(mu, sigma2)`` where
    ``sigma2`` is the variance of the log.
    """

    family: str
    params: tuple

    def __post_init__(self):
        family = _FAMILY_ALIASES.get(self.family.lower())
        if family is None:
            raise ParameterDomainError(f"unknown distribution family {self.family!r}")
        params = tuple(float(p) for p in self.params)
        if len(params) != len(_PARAM_NAMES[family]):
            raise ParameterDomainError(
                f"{family} takes parameters {_PARAM_NAMES[family]}, got {len(params)} values"
            )
        if family == "exponential" and not params[0] > 0:
            raise ParameterDomainError("exponential rate must be positive")
        if family == "pareto" and not (params[0] > 0 and params[1] > 1):
            raise ParameterDomainError("pareto needs scale > 0 and shape > 1 (finite mean)")
        if family == "lognormal" and not params[1] > 0:
            raise ParameterDomainError("lognormal variance of the log must be positive")
        object.__setattr__(self, "family", family)
        object.__setattr__(self, "params", params)

    @classmethod
    def exponential(cls, rate: float = 1.0) -> "DistributionSpec":
        return cls("exponential", (rate,))

    @classmethod
    def pareto(cls, scale: float, shape: float) -> "DistributionSpec":
        return cls("pareto", (scale, shape))

    @classmethod
    def lognormal(cls, mu: float = 0.0, sigma2: float = 1.0) -> "DistributionSpec":
        return cls("lognormal", (mu, sigma2))

    @classmethod
    def parse(cls, family: str, params: str) -> "DistributionSpec":
        """Build from CLI strings such as ``("pareto", "1,10")``."""
        try:
            values = tuple(float(p) for p in params.replace(";", ",").split(",") if p.strip())
        except ValueError:
            raise ParameterDomainError(f"cannot parse distribution parameters {params!r}") from None
        return cls(family, values)

    @property
    def label(self) -> str:
        return ";".join(f"{k}={v:g}" for k, v in zip(_PARAM_NAMES[self.family], self.params))

    def survival(self, x):
        x = np.asarray(x, dtype=np.float64)
        if self.family == "exponential":
            return np.exp(-self.params[0] * x)
        if self.family == "pareto":
            k, a = self.params
            with np.errstate(divide="ignore"):
                return np.where(x > k, (k / np.maximum(x, k)) ** a, 1.0)
        mu, s2 = self.params
        with np.errstate(divide="ignore"):
            z = (np.log(x) - mu) / math.sqrt(s2)
        return special.ndtr(-z)

    def mean(self) -> float:
        if self.family == "exponential":
            return 1.0 / self.params[0]
        if self.family == "pareto":
            k, a = self.params
            return a * k / (a - 1.0)
        mu, s2 = self.params
        return math.exp(mu + s2 / 2.0)


def _quad_survival_power(dist: DistributionSpec, p: float) -> float:
    # x = t / (1 - t) maps (0, inf) onto (0, 1)
    def integrand(t):
        x = t / (1.0 - t)
        return float(dist.survival(x)) ** p / (1.0 - t) ** 2

    points = None
    if dist.family == "pareto":
        k = dist.params[0]
        points = [k / (1.0 + k)]
    elif dist.family == "lognormal":
        m = math.exp(dist.params[0])
        points = [m / (1.0 + m)]
    val, _ = integrate.quad(integrand, 0.0, 1.0, points=points, epsabs=QUAD_TOL,
                            epsrel=QUAD_TOL, limit=500)
    return val


def quadrature_r_nu(dist: DistributionSpec, order) -> float:
    """``1 - int Fbar^nu / int Fbar`` by adaptive quadrature."""
    nu = as_order(order).nu
    return 1.0 - _quad_survival_power(dist, nu) / _quad_survival_power(dist, 1.0)


def true_r_nu(dist: DistributionSpec, order) -> float:
    """Population relative S-Gini index ``1 - E[min of nu draws] / mean``.

    Closed forms for the exponential (``1 - 1/nu``, free of the rate) and
    Pareto (``1 - nu (alpha-1) / (nu alpha - 1)``, free of the scale);
    quadrature for the lognormal.
    """
    order = as_order(order)
    nu = order.nu
    if nu < 1:
        raise ParameterDomainError("true index values are provided for nu > 1")
    if dist.family == "exponential":
        return 1.0 - 1.0 / nu
    if dist.family == "pareto":
        a = dist.params[1]
        return 1.0 - nu * (a - 1.0) / (nu * a - 1.0)
    return quadrature_r_nu(dist, order)


def sample_distribution(dist: DistributionSpec, n: int, rng: np.random.Generator) -> Sample:
    """Draw ``n`` observations by inversion of open-interval uniforms.

    Exponential: ``-log(U)/rate``; Pareto: ``k U^(-1/alpha)``; lognormal:
    ``exp(mu + sigma * Phi^-1(U))`` with the normal quantile from
    :func:`scipy.special.ndtri`.
    """
    if n < 1:
        raise ParameterDomainError("sample size must be at least 1")
    u = open_uniform(rng, n)
    if dist.family == "exponential":
        x = -np.log(u) / dist.params[0]
    elif dist.family == "pareto":
        k, a = dist.params
        x = k * u ** (-1.0 / a)
    else:
        mu, s2 = dist.params
        x = np.exp(mu + math.sqrt(s2) * special.ndtri(u))
    return Sample._from_trusted(x)


CSV_FIELDS = ("method", "family", "params", "nu", "n", "level", "coverage",
              "avg_length", "rejection_rate", "replicates", "seed")


@dataclass(frozen=True)
class SimReport:
    """Aggregated Monte-Carlo result for one configuration.

    Proportions are over the ``replicates`` runs that completed; ``failures``
    counts runs that raised a library error and were left out.
    """

    method: str
    family: str
    params: str
    nu: float
    n: int
    level: float
    coverage: float
    avg_length: float
    rejection_rate: float
    replicates: int
    seed: int
    failures: int = 0
    truth: float = math.nan
    r0: float = math.nan
    extra: dict = field(default_factory=dict)

    @property
    def flagged(self) -> bool:
        total = self.replicates + self.failures
        return total > 0 and self.failures > FAILURE_FLAG_FRACTION * total

    @property
    def coverage_se(self) -> float:
        return binomial_se(self.coverage, self.replicates)

    @property
    def rejection_se(self) -> float:
        return binomial_se(self.rejection_rate, self.replicates)

    def csv_row(self) -> dict:
        d = asdict(self)
        return {k: d[k] for k in CSV_FIELDS}

    def to_dict(self) -> dict:
        d = asdict(self)
        d.update(flagged=self.flagged, coverage_se=self.coverage_se,
                 rejection_se=self.rejection_se)
        return d


def _interval(method, x, order, level, bseed, outer_b, inner_b):
    if method == "el":
        return el_interval(x, order, level)
    if method == "jel":
        return jel_interval(x, order, level)
    if method == "boot_t":
        return boot_t_interval(x, order, level, BootstrapConfig(outer_b, inner_b, bseed, "boot_t"))
    return bcel_interval(x, order, level, BootstrapConfig(outer_b, inner_b, bseed, "bcel"))


def _coverage_chunk(args):
    dist, order, n, level, method, seed, truth, outer_b, inner_b, indices = args
    out = np.full((len(indices), 2), np.nan)
    for j, r in enumerate(indices):
        rng = stream(seed, r, SIMULATION)
        x = sample_distribution(dist, n, rng)
        bseed = int(rng.integers(0, 2**63))
        try:
            ci = _interval(method, x, order, level, bseed, outer_b, inner_b)
        except SGiniError:
            continue
        out[j] = (float(ci.contains(truth)), ci.length)
    return out


def _test_chunk(args):
    dist, order, n, r0, alpha, seed, indices = args
    out = np.full(len(indices), np.nan)
    for j, r in enumerate(indices):
        x = sample_distribution(dist, n, stream(seed, r, SIMULATION))
        try:
            out[j] = float(jel_test(x, order, r0, alpha).reject)
        except SGiniError:
            continue
    return out


def _run(func, make_args, replicates: int, workers: int):
    chunks = np.array_split(np.arange(replicates), max(1, min(workers, replicates)) * 4)
    tasks = [make_args(c.tolist()) for c in chunks if c.size]
    if workers <= 1:
        parts = [func(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            parts = list(ex.map(func, tasks))
    # chunks come back in submission order, so the merge is schedule-independent
    return np.concatenate(parts)


def coverage_study(dist: DistributionSpec, nu, n: int, level: float = 0.95, method: str = "jel",
                   replicates: int = 1000, seed: int = 0, outer_b: int = 1000,
                   inner_b: int = 50, workers: int = 1) -> SimReport:
    """Coverage probability and average length of one interval method.

    Replicate ``r`` draws its sample from ``stream(seed, r)``; bootstrap
    methods derive their resampling seed from the same stream.
    """
    if method not in METHODS:
        raise ParameterDomainError(f"method must be one of {METHODS}, got {method!r}")
    order = as_order(nu)
    level = check_level(level)
    seed = check_seed(seed)
    truth = true_r_nu(dist, order)
    res = _run(_coverage_chunk,
               lambda idx: (dist, order, n, level, method, seed, truth, outer_b, inner_b, idx),
               replicates, workers)
    done = res[~np.isnan(res[:, 0])]
    m = done.shape[0]
    return SimReport(
        method=method, family=dist.family, params=dist.label, nu=order.nu, n=n, level=level,
        coverage=float(done[:, 0].mean()) if m else math.nan,
        avg_length=float(done[:, 1].mean()) if m else math.nan,
        rejection_rate=math.nan, replicates=m, seed=seed,
        failures=replicates - m, truth=truth,
    )


def type1_power_study(dist: DistributionSpec, nu, n: int, r0: float | None = None,
                      level: float = 0.05, replicates: int = 1000, seed: int = 0,
                      workers: int = 1) -> SimReport:
    """Rejection rate of the JEL test of ``R_nu = r0`` at significance ``level``.

    ``r0=None`` tests the true value (empirical type-1 error); any fixed
    other value gives the power against the data-generating distribution.
    """
    order = as_order(nu)
    order.require_integer()
    level = check_level(level)
    seed = check_seed(seed)
    truth = true_r_nu(dist, order)
    r0 = truth if r0 is None else float(r0)
    res = _run(_test_chunk, lambda idx: (dist, order, n, r0, level, seed, idx), replicates, workers)
    done = res[~np.isnan(res)]
    m = done.size
    return SimReport(
        method="jel_test", family=dist.family, params=dist.label, nu=order.nu, n=n, level=level,
        coverage=math.nan, avg_length=math.nan,
        rejection_rate=float(done.mean()) if m else math.nan,
        replicates=m, seed=seed, failures=replicates - m, truth=truth, r0=r0,
    )
