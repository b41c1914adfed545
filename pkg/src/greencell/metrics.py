"""Grid savings, throughput, energy efficiency and ECI."""

from __future__ import annotations

import math
from collections.abc import Iterable

import numpy as np

from .radio import ue_throughput


def grid_savings_eq8(solar_used, demand) -> float:
    """Share of total demand served by solar, in percent."""
    total = float(np.sum(demand))
    if total <= 0:
        raise ZeroDivisionError("total demand is zero")
    return 100.0 * float(np.sum(solar_used)) / total


def savings_vs_conventional(grid_used, conventional_demand) -> float:
    """Grid energy avoided relative to an always-on, grid-only network, in percent."""
    conv = float(np.sum(conventional_demand))
    if conv <= 0:
        raise ZeroDivisionError("conventional demand is zero")
    return 100.0 * (conv - float(np.sum(grid_used))) / conv


def network_throughput(sinrs: Iterable[float], rb_bandwidth: float = 180e3) -> float:
    """Sum of per-UE Shannon rates; a JT UE appears once with its joint SINR."""
    s = np.fromiter(sinrs, dtype=float)
    return float(np.sum(ue_throughput(s, rb_bandwidth))) if s.size else 0.0


def energy_efficiency(throughput_bps: float, grid_power_w: float) -> float:
    """bits/J, or NaN when no grid power is drawn."""
    if grid_power_w < 0:
        raise ValueError("grid power must be >= 0")
    if grid_power_w == 0:
        return math.nan
    return throughput_bps / grid_power_w


def eci(grid_power_w: float, throughput_bps: float) -> float:
    """J/bit of grid energy; 0 when the grid is idle."""
    if grid_power_w == 0:
        return 0.0
    if throughput_bps <= 0:
        raise ZeroDivisionError("ECI undefined for zero throughput")
    return grid_power_w / throughput_bps


def hourly_report(throughput, grid, solar, demand, conventional) -> dict[str, np.ndarray]:
    """Per-hour metric series from network-wide (H,) totals.

    EE and ECI use grid power only. ``ee`` is NaN wherever the grid is idle.
    """
    throughput = np.asarray(throughput, dtype=float)
    grid = np.asarray(grid, dtype=float)
    solar = np.asarray(solar, dtype=float)
    demand = np.asarray(demand, dtype=float)
    conventional = np.asarray(conventional, dtype=float)
    defined = grid > 0
    with np.errstate(divide="ignore", invalid="ignore"):
        ee = np.where(defined, throughput / grid, np.nan)
        eci_ = np.where(defined, grid / throughput, 0.0)
    return {
        "throughput_bps": throughput,
        "grid_w": grid,
        "solar_w": solar,
        "demand_w": demand,
        "conventional_w": conventional,
        "savings_eq8_pct": 100.0 * solar / demand,
        "savings_conv_pct": 100.0 * (conventional - grid) / conventional,
        "ee_bits_per_j": ee,
        "eci_j_per_bit": eci_,
        "ee_defined": defined,
    }


def mean_defined_ee(ee_series) -> tuple[float, int]:
    """Mean of the finite hourly EE values and the number of hours left out."""
    ee = np.asarray(ee_series, dtype=float)
    ok = np.isfinite(ee)
    mean = float(ee[ok].mean()) if ok.any() else math.nan
    return mean, int((~ok).sum())


def ratio_stats(num: np.ndarray, den: np.ndarray) -> tuple[float, float]:
    """Ratio of sample means with a delta-method standard error."""
    num = np.asarray(num, dtype=float)
    den = np.asarray(den, dtype=float)
    n = num.size
    mu_n, mu_d = num.mean(), den.mean()
    if mu_d == 0:
        return math.inf if mu_n > 0 else math.nan, math.nan
    r = mu_n / mu_d
    if n < 2:
        return r, math.nan
    resid = num - r * den
    se = math.sqrt(resid.var(ddof=1) / n) / abs(mu_d)
    return r, se


def mean_stderr(values) -> tuple[float, float]:
    v = np.asarray(values, dtype=float)
    if v.size < 2:
        return float(v.mean()), math.nan
    return float(v.mean()), float(v.std(ddof=1) / math.sqrt(v.size))
