import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from greencell.metrics import (
    eci,
    energy_efficiency,
    grid_savings_eq8,
    hourly_report,
    mean_defined_ee,
    mean_stderr,
    network_throughput,
    ratio_stats,
    savings_vs_conventional,
)
from greencell.power import PowerModelParams, bs_input_power


def test_solar_share_savings():
    assert grid_savings_eq8([100] * 19, [200] * 19) == 50.0
    assert grid_savings_eq8([200] * 19, [200] * 19) == 100.0
    assert grid_savings_eq8([0] * 19, [228] * 19) == 0.0
    with pytest.raises(ZeroDivisionError):
        grid_savings_eq8([0], [0])


def test_savings_vs_conventional():
    assert savings_vs_conventional([0, 0], [150, 150]) == 100.0
    assert savings_vs_conventional([150, 150], [150, 150]) == 0.0


def test_night_sleep_savings():
    p = PowerModelParams()
    awake = bs_input_power(p, 0.0, sleep=False)
    hybrid = [awake] * 14 + [bs_input_power(p, 0.0)] * 5
    got = savings_vs_conventional(hybrid, [awake] * 19)
    assert got == pytest.approx(100 * (1 - (14 * awake + 5 * 54) / (19 * awake)), rel=1e-12)
    assert got == pytest.approx(16.46, abs=0.01)


def test_network_throughput():
    assert network_throughput([1.0]) == pytest.approx(180e3)
    assert network_throughput([3.0, 3.0]) == pytest.approx(2 * network_throughput([3.0]))
    s = 10 ** 3.325
    assert network_throughput([s] * 50) == pytest.approx(50 * 180e3 * math.log2(1 + s))
    assert network_throughput([]) == 0.0


def test_ee_and_eci():
    assert energy_efficiency(99.35e6, 1000.0) == pytest.approx(99_350)
    assert eci(1000.0, 99.35e6) == pytest.approx(1.0065e-5, rel=1e-4)
    assert math.isnan(energy_efficiency(1e6, 0.0))
    assert eci(0.0, 1e6) == 0.0
    assert energy_efficiency(0.0, 500.0) == 0.0
    with pytest.raises(ValueError):
        energy_efficiency(1.0, -1.0)


@given(st.floats(1e3, 1e9), st.floats(1e-3, 1e5))
def test_eci_reciprocal_of_ee(thr, grid):
    assert eci(grid, thr) * energy_efficiency(thr, grid) == pytest.approx(1.0, rel=1e-12)


@given(st.floats(1e3, 1e9), st.floats(1e-3, 1e5), st.floats(0, 1e5))
def test_ee_non_increasing_in_grid(thr, grid, extra):
    assert energy_efficiency(thr, grid + extra) <= energy_efficiency(thr, grid)


def test_hourly_report_undefined_hours():
    r = hourly_report([1e6, 2e6], [0.0, 100.0], [300.0, 50.0], [300.0, 150.0], [400.0, 400.0])
    assert list(r["ee_defined"]) == [False, True]
    assert math.isnan(r["ee_bits_per_j"][0]) and r["eci_j_per_bit"][0] == 0
    assert r["savings_eq8_pct"][0] == 100.0
    assert r["ee_bits_per_j"][1] == pytest.approx(2e4)
    assert mean_defined_ee(r["ee_bits_per_j"]) == (pytest.approx(2e4), 1)


def test_ratio_stats_against_bootstrap():
    rng = np.random.default_rng(0)
    den = rng.uniform(50, 150, 400)
    num = 3 * den + rng.normal(0, 20, 400)
    r, se = ratio_stats(num, den)
    assert r == pytest.approx(num.mean() / den.mean())
    boots = []
    for _ in range(2000):
        i = rng.integers(0, 400, 400)
        boots.append(num[i].mean() / den[i].mean())
    assert se == pytest.approx(np.std(boots), rel=0.1)


def test_mean_stderr():
    m, se = mean_stderr([1.0, 2.0, 3.0, 4.0])
    assert m == 2.5 and se == pytest.approx(np.std([1, 2, 3, 4], ddof=1) / 2)
    assert math.isnan(mean_stderr([1.0])[1])
