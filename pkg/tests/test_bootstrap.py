import math

import numpy as np
import pytest

from sgini import (BootstrapConfig, CalibrationError, ParameterDomainError, bcel_interval,
                   boot_t_interval, el_log_ratio, empirical_survival_ranks, plug_in_relative,
                   ustat_relative)
from sgini.bootstrap import _resample_indices, _survival_rows, bootstrap_log_ratios
from sgini.results import order_quantile


@pytest.fixture(scope="module")
def income():
    return np.random.default_rng(42).lognormal(mean=10, sigma=0.6, size=60)


def test_config_validation():
    with pytest.raises(ParameterDomainError):
        BootstrapConfig(outer_b=1)
    with pytest.raises(ParameterDomainError):
        BootstrapConfig(inner_b=1, method="boot_t")
    BootstrapConfig(inner_b=1, method="bcel")
    with pytest.raises(ParameterDomainError):
        BootstrapConfig(method="percentile")
    with pytest.raises(ValueError):
        BootstrapConfig(seed=-1)


def test_quantile_convention():
    v = np.arange(1, 11, dtype=float)[::-1]
    assert order_quantile(v, 0.95) == 10.0  # ceil(9.5) = 10th smallest
    assert order_quantile(v, 0.9) == 9.0
    assert order_quantile(v, 0.025) == 1.0
    assert order_quantile(np.arange(1000.0), 0.95) == 949.0
    assert order_quantile([1.0, math.inf], 0.95) == math.inf


def test_survival_rows_match_per_row_counts():
    rng = np.random.default_rng(0)
    rows = np.sort(rng.integers(1, 6, size=(50, 12)).astype(float), axis=1)
    got = _survival_rows(rows)
    for r, g in zip(rows, got):
        assert np.array_equal(g, empirical_survival_ranks(r))


def test_bootstrap_ratios_match_scalar_path(income):
    target = plug_in_relative(income, 3)
    ratios, n_const = bootstrap_log_ratios(income, 3, target, 25, seed=5)
    assert n_const == 0
    srt = np.sort(income)
    for b in range(25):
        idx, _ = _resample_indices(5, b, income.size)
        want = el_log_ratio(srt[idx], 3, target)
        assert ratios[b] == pytest.approx(want, rel=1e-9, abs=1e-12)


class TestBCEL:
    def test_deterministic(self, income):
        cfg = BootstrapConfig(outer_b=300, seed=17, method="bcel")
        assert bcel_interval(income, 3, 0.95, cfg) == bcel_interval(income, 3, 0.95, cfg)

    def test_seed_matters(self, income):
        a = bcel_interval(income, 3, 0.95, BootstrapConfig(outer_b=300, seed=1, method="bcel"))
        b = bcel_interval(income, 3, 0.95, BootstrapConfig(outer_b=300, seed=2, method="bcel"))
        assert a.diagnostics["critical"] != b.diagnostics["critical"]

    def test_widens_with_level(self, income):
        cfg = BootstrapConfig(outer_b=300, seed=3, method="bcel")
        cis = [bcel_interval(income, 3, lv, cfg) for lv in (0.8, 0.9, 0.95, 0.99)]
        for a, b in zip(cis, cis[1:]):
            assert b.lower <= a.lower and a.upper <= b.upper

    def test_contains_center(self, income):
        ci = bcel_interval(income, 2, 0.9, BootstrapConfig(outer_b=200, seed=4, method="bcel"))
        assert ci.lower <= ci.center <= ci.upper

    def test_constant_sample_fails(self):
        with pytest.raises(CalibrationError):
            bcel_interval([3.0] * 20, 3, 0.95, BootstrapConfig(outer_b=50, method="bcel"))

    def test_tiny_sample_has_many_degenerate_resamples(self):
        # with n = 2 half of all resamples are constant
        with pytest.raises(CalibrationError):
            bcel_interval([1.0, 5.0], 2, 0.95, BootstrapConfig(outer_b=400, method="bcel"))


class TestBootT:
    def test_deterministic(self, income):
        cfg = BootstrapConfig(outer_b=200, inner_b=20, seed=9)
        assert boot_t_interval(income, 3, 0.95, cfg) == boot_t_interval(income, 3, 0.95, cfg)

    def test_contains_estimate_when_t_straddles_zero(self, income):
        ci = boot_t_interval(income, 3, 0.95, BootstrapConfig(outer_b=300, inner_b=25, seed=1))
        assert ci.diagnostics["t_lower"] < 0 < ci.diagnostics["t_upper"]
        assert ci.lower < ustat_relative(income, 3) < ci.upper
        assert ci.center == ustat_relative(income, 3)

    def test_constant_sample_fails(self):
        with pytest.raises(CalibrationError):
            boot_t_interval([2.0] * 15, 3, 0.95, BootstrapConfig(outer_b=50, inner_b=10))

    def test_chunking_does_not_change_result(self, income, monkeypatch):
        cfg = BootstrapConfig(outer_b=120, inner_b=10, seed=21)
        whole = boot_t_interval(income, 2, 0.9, cfg)
        monkeypatch.setattr("sgini.bootstrap._CHUNK_ELEMENTS", 2000)
        chunked = boot_t_interval(income, 2, 0.9, cfg)
        assert chunked.lower == pytest.approx(whole.lower, rel=1e-12)
        assert chunked.upper == pytest.approx(whole.upper, rel=1e-12)

    def test_interval_formula(self, income):
        ci = boot_t_interval(income, 3, 0.9, BootstrapConfig(outer_b=100, inner_b=10, seed=2))
        d = ci.diagnostics
        est = ustat_relative(income, 3)
        assert ci.lower == pytest.approx(est - d["t_upper"] * d["se"])
        assert ci.upper == pytest.approx(est - d["t_lower"] * d["se"])
