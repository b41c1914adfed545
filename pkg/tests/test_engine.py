import math
from dataclasses import replace

import numpy as np
import pytest
from scipy import stats

from greencell.energy import Redraw
from greencell.engine import (
    LoadMode,
    ScenarioConfig,
    draw_load,
    draw_loads,
    draw_spatial_factors,
    place_ues,
    run_iteration,
    run_monte_carlo,
    sinr_samples,
    traffic_trace,
    traffic_traces,
    ue_counts,
    with_overrides,
)
from greencell.power import bs_input_power
from greencell.profiles import HourlyProfile
from greencell.radio import CompMode

SMALL = ScenarioConfig(tiers=1, horizon_days=2, iterations=3, master_seed=11)


def test_draw_load_modes():
    assert draw_load(0.0, LoadMode.PROFILE_TIMES_UNIFORM, 0.7) == 0.0
    assert draw_load(1.0, LoadMode.PROFILE_ONLY, 0.2) == 1.0
    assert draw_load(0.8, LoadMode.PROFILE_TIMES_UNIFORM, 0.5) == pytest.approx(0.4)


def test_profile_times_uniform_distribution():
    prof = HourlyProfile((0.8,) * 24)
    x = draw_loads(prof, 10_000, 1, np.random.default_rng(5))[0]
    assert x.min() >= 0 and x.max() <= 0.8
    assert stats.kstest(x, stats.uniform(0, 0.8).cdf).pvalue > 0.01


def test_load_factor_fixed_or_hourly():
    prof = HourlyProfile(tuple(np.linspace(0.1, 1.0, 24)))
    fixed = draw_loads(prof, 5, 48, np.random.default_rng(1))
    ratio = fixed / prof.as_array()[np.arange(48) % 24, None]
    assert np.allclose(ratio, ratio[0])
    hourly = draw_loads(prof, 5, 48, np.random.default_rng(1), redraw_hourly=True)
    assert not np.allclose(hourly / prof.as_array()[np.arange(48) % 24, None], ratio[0])
    only = draw_loads(prof, 5, 24, np.random.default_rng(1), LoadMode.PROFILE_ONLY)
    assert np.all(only == prof.as_array()[:, None])


def test_spatial_factor_shapes():
    rng = np.random.default_rng(0)
    assert draw_spatial_factors(rng, 7, 3, Redraw.ITERATION).shape == (7,)
    day = draw_spatial_factors(rng, 7, 3, Redraw.DAY)
    assert day.shape == (72, 7) and np.all(day[0] == day[23]) and not np.all(day[0] == day[24])
    assert draw_spatial_factors(rng, 7, 3, Redraw.HOUR).shape == (72, 7)


def test_ue_counts():
    assert list(ue_counts(np.array([1.0, 0.0, 0.3, 0.01]), 50)) == [50, 0, 15, 1]


def test_place_ues_distinct_rbs(layout7):
    loads = np.array([[1.0, 0.0, 0.3, 0.5, 0.02, 1.0, 0.9]])
    drop = place_ues(layout7, loads, np.random.default_rng(0), np.random.default_rng(1))
    assert len(drop) == 50 + 0 + 15 + 25 + 1 + 50 + 45
    for b in range(7):
        rbs = drop.rb[drop.home == b]
        assert len(set(rbs)) == len(rbs) and np.all((rbs >= 0) & (rbs < 50))
    assert sorted(drop.rb[drop.home == 0]) == list(range(50))


def test_sleep_iff_no_ues_served():
    cfg = replace(SMALL, comp_mode=CompMode.DPS)
    tr = traffic_trace(cfg, 0)
    asleep = tr.demand_w == cfg.power.p_sleep
    np.testing.assert_array_equal(asleep, tr.served == 0)
    np.testing.assert_allclose(tr.demand_w, bs_input_power(cfg.power, np.minimum(tr.served / 50, 1)))


def test_no_sharing_grid_is_unmet_storage():
    trace, energy, _ = run_iteration(SMALL, 0)
    avail = SMALL.storage_factor * energy.level_start + energy.generation
    np.testing.assert_allclose(energy.grid_used, np.maximum(0, energy.demand - avail), atol=1e-9)


def test_zero_solar_means_all_grid():
    dark = with_overrides(SMALL, profile=HourlyProfile((0.0,) * 24))
    _, energy, report = run_iteration(dark, 1)
    np.testing.assert_allclose(energy.grid_used, energy.demand)
    assert np.all(report["savings_eq8_pct"] == 0)


def test_jt_demand_at_least_dps():
    base = replace(SMALL, iterations=1)
    for it in range(3):
        dps = traffic_trace(replace(base, comp_mode=CompMode.DPS), it)
        jt = traffic_trace(replace(base, comp_mode=CompMode.JT), it)
        assert jt.demand_w.sum() >= dps.demand_w.sum()
        # each JT UE occupies an RB at two sites
        np.testing.assert_array_equal(jt.served.sum(axis=1), 2 * jt.home_ues.sum(axis=1))
        np.testing.assert_array_equal(dps.served.sum(axis=1), dps.home_ues.sum(axis=1))


def test_noncomp_serves_home_cell():
    tr = traffic_trace(SMALL, 0)
    np.testing.assert_array_equal(tr.served, tr.home_ues)


def test_single_iteration_matches_run_iteration():
    cfg = replace(SMALL, iterations=1, sharing_enabled=True)
    res = run_monte_carlo(cfg)
    trace, energy, report = run_iteration(cfg, 0)
    for k in ("grid_w", "solar_w", "throughput_bps", "eci_j_per_bit"):
        np.testing.assert_array_equal(res.hourly[k], report[k])
    assert res.summary["grid_wh"][0] == energy.grid_used.sum()


def test_same_seed_same_result_any_workers():
    a = run_monte_carlo(SMALL)
    b = run_monte_carlo(SMALL, workers=2)
    for k in a.per_iteration:
        np.testing.assert_array_equal(a.per_iteration[k], b.per_iteration[k])
    c = run_monte_carlo(replace(SMALL, master_seed=12))
    assert not np.array_equal(a.per_iteration["grid_wh"], c.per_iteration["grid_wh"])


def test_substreams_independent():
    # solar redraw cadence must not disturb the radio draws
    a = traffic_trace(SMALL, 0)
    b = traffic_trace(with_overrides(SMALL, redraw=Redraw.ITERATION), 0)
    np.testing.assert_array_equal(a.throughput_bps, b.throughput_bps)


def test_cached_traces_reused_for_energy_changes():
    traces = traffic_traces(SMALL)
    bigger = replace(SMALL, storage_capacity=3000.0)
    assert bigger.traffic_key() == SMALL.traffic_key()
    direct = run_monte_carlo(bigger)
    cached = run_monte_carlo(bigger, traces=traces)
    np.testing.assert_array_equal(direct.per_iteration["grid_wh"], cached.per_iteration["grid_wh"])
    with pytest.raises(ValueError):
        run_monte_carlo(replace(SMALL, iterations=2), traces=traces)


def test_conservation_in_full_run():
    res = run_monte_carlo(replace(SMALL, sharing_enabled=True, alpha=0.8), keep_ledger=True)
    gen = res.ledger.generation.sum(axis=2)
    assert np.all(np.abs(res.ledger.balance_residual()) <= 1e-9 * np.maximum(gen, 1.0))


def test_warmup_window():
    full = run_monte_carlo(SMALL)
    cut = run_monte_carlo(replace(SMALL, discard_warmup=True), traces=traffic_traces(SMALL))
    assert cut.summary["grid_wh"][0] < full.summary["grid_wh"][0]
    with pytest.raises(ValueError):
        replace(SMALL, horizon_days=1, discard_warmup=True)


def test_config_validation():
    for bad in ({"storage_capacity": -5}, {"iterations": 0}, {"storage_factor": 1.2}, {"alpha": -0.1}):
        with pytest.raises(ValueError):
            replace(SMALL, **bad)
    cfg = ScenarioConfig(alpha_links={(0, 1): 0.5})
    assert cfg.alpha_links == (((0, 1), 0.5),)


def test_sinr_samples_share_drops():
    s = sinr_samples(SMALL, 300)
    assert set(s) == set(CompMode)
    assert np.all(s[CompMode.JT] >= s[CompMode.DPS] * (1 - 1e-12))
    assert np.all(s[CompMode.DPS] >= s[CompMode.NONCOMP] * (1 - 1e-12))
    centre = sinr_samples(SMALL, 50, center_only=True)
    assert len(centre[CompMode.DPS]) == 50


@pytest.mark.slow
def test_stderr_shrinks_with_more_iterations():
    base = ScenarioConfig(horizon_days=1, iterations=400, master_seed=3)
    traces = traffic_traces(base)
    se400 = run_monte_carlo(base, traces=traces).summary["savings_eq8_pct"][1]
    se200 = run_monte_carlo(replace(base, iterations=200), traces=traces[:200]).summary["savings_eq8_pct"][1]
    assert se400 / se200 == pytest.approx(1 / math.sqrt(2), abs=0.1)
