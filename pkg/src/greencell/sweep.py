"""Parameter sweeps over energy-side axes."""

from __future__ import annotations

import enum
import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass, replace

from .engine import RunResult, ScenarioConfig, run_monte_carlo, traffic_traces, with_overrides
from .radio import CompMode


class SweepAxis(str, enum.Enum):
    STORAGE_CAPACITY = "STORAGE_CAPACITY"
    STORAGE_FACTOR = "STORAGE_FACTOR"
    LINE_LOSS_PCT = "LINE_LOSS_PCT"
    SOLAR_CAPACITY = "SOLAR_CAPACITY"


@dataclass(frozen=True)
class Scenario:
    comp_mode: CompMode
    sharing: bool

    @property
    def label(self) -> str:
        return f"{CompMode(self.comp_mode).value}/{'share' if self.sharing else 'no-share'}"


ALL_SCENARIOS = tuple(Scenario(m, s) for m in CompMode for s in (False, True))

SWEEP_METRICS = (
    "ee_bits_per_j",
    "eci_j_per_bit",
    "mean_hourly_ee",
    "ee_undefined_hours",
    "grid_wh",
    "solar_wh",
    "demand_wh",
    "conventional_wh",
    "throughput_bits",
    "savings_eq8_pct",
    "savings_conv_pct",
    "wastage_wh",
    "line_loss_wh",
    "shared_wh",
    "zero_grid",
)


@dataclass(frozen=True)
class SweepSpec:
    axis: SweepAxis
    values: tuple[float, ...]
    scenarios: tuple[Scenario, ...] = ALL_SCENARIOS

    def __post_init__(self):
        object.__setattr__(self, "axis", SweepAxis(self.axis))
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        if not self.values:
            raise ValueError("sweep needs at least one value")
        if any(b <= a for a, b in zip(self.values, self.values[1:])):
            raise ValueError("sweep values must be strictly increasing")
        lo, hi = self.values[0], self.values[-1]
        if self.axis is SweepAxis.LINE_LOSS_PCT and not (0 <= lo and hi <= 100):
            raise ValueError("line loss values must lie in [0, 100]")
        if self.axis is SweepAxis.STORAGE_FACTOR and not (0 <= lo and hi <= 1):
            raise ValueError("storage factor values must lie in [0, 1]")
        if self.axis in (SweepAxis.STORAGE_CAPACITY, SweepAxis.SOLAR_CAPACITY) and lo < 0:
            raise ValueError("capacities must be >= 0")
        if not self.scenarios:
            raise ValueError("sweep needs at least one scenario")


def apply_axis(config: ScenarioConfig, axis: SweepAxis, value: float) -> ScenarioConfig:
    """Config for one sweep point."""
    axis = SweepAxis(axis)
    if axis is SweepAxis.STORAGE_CAPACITY:
        return replace(config, storage_capacity=value)
    if axis is SweepAxis.STORAGE_FACTOR:
        return replace(config, storage_factor=value)
    if axis is SweepAxis.LINE_LOSS_PCT:
        return replace(config, alpha=1.0 - value / 100.0, alpha_links=())
    # storage grows in proportion to the panel so extra generation can be banked
    base_panel = config.solar.panel_capacity
    if base_panel <= 0:
        raise ValueError("SOLAR_CAPACITY sweep needs a positive base panel capacity")
    return with_overrides(
        config,
        panel_capacity=value,
        c_s=value,
        storage_capacity=config.storage_capacity * value / base_panel,
    )


@dataclass(frozen=True)
class SweepRow:
    axis_value: float
    scenario: str
    metric: str
    mean: float
    stderr: float


def _rows(value: float, label: str, result: RunResult) -> list[SweepRow]:
    return [
        SweepRow(value, label, m, *result.summary.get(m, (math.nan, math.nan)))
        for m in SWEEP_METRICS
    ]


def run_sweep(
    config: ScenarioConfig,
    sweep: SweepSpec,
    workers: int = 1,
    on_point: Callable[[list[SweepRow]], None] | None = None,
    trace_cache: dict | None = None,
) -> tuple[list[SweepRow], dict[tuple[float, str], RunResult]]:
    """Run every (axis value, scenario) pair.

    Radio traces are computed once per CoMP mode and shared by all sweep
    points. ``on_point`` receives each point's rows as soon as they exist.
    """
    cache = {} if trace_cache is None else trace_cache
    rows: list[SweepRow] = []
    results: dict[tuple[float, str], RunResult] = {}
    for value in sweep.values:
        point = apply_axis(config, sweep.axis, value)
        for sc in sweep.scenarios:
            cfg = replace(point, comp_mode=CompMode(sc.comp_mode), sharing_enabled=sc.sharing)
            key = cfg.traffic_key() + (cfg.iterations,)
            if key not in cache:
                cache[key] = traffic_traces(cfg, workers)
            result = run_monte_carlo(cfg, traces=cache[key])
            results[(value, sc.label)] = result
            new = _rows(value, sc.label, result)
            rows.extend(new)
            if on_point is not None:
                on_point(new)
    return rows, results


def parse_sweep_arg(text: str) -> tuple[SweepAxis, tuple[float, ...]]:
    """``AXIS=v1,v2,...`` as given on the command line."""
    axis, sep, vals = text.partition("=")
    if not sep:
        raise ValueError(f"expected AXIS=v1,v2,..., got {text!r}")
    try:
        ax = SweepAxis(axis.strip().upper())
    except ValueError:
        raise ValueError(
            f"unknown sweep axis {axis!r}; choose from {', '.join(a.value for a in SweepAxis)}"
        ) from None
    return ax, tuple(float(v) for v in vals.split(",") if v.strip())


def parse_modes_arg(text: str, default_sharing: bool) -> tuple[Scenario, ...]:
    """``noncomp,dps:on,jt:off`` -> scenarios; a bare mode uses ``default_sharing``.

    ``all`` expands to every mode with and without sharing.
    """
    out: list[Scenario] = []
    for tok in filter(None, (t.strip() for t in text.split(","))):
        if tok.lower() == "all":
            out.extend(ALL_SCENARIOS)
            continue
        mode, _, share = tok.partition(":")
        try:
            m = CompMode(mode.upper())
        except ValueError:
            raise ValueError(f"unknown CoMP mode {mode!r}") from None
        if share == "":
            s = default_sharing
        elif share.lower() in ("on", "share"):
            s = True
        elif share.lower() in ("off", "no-share", "noshare"):
            s = False
        else:
            raise ValueError(f"bad sharing flag {share!r} in {tok!r}")
        out.append(Scenario(m, s))
    if not out:
        raise ValueError("no modes given")
    return tuple(dict.fromkeys(out))


def crossover(xs: Sequence[float], gains: Sequence[float]) -> float | None:
    """First x where a positive gain turns non-positive, linearly interpolated."""
    for (x0, g0), (x1, g1) in zip(zip(xs, gains), zip(xs[1:], gains[1:])):
        if g0 > 0 >= g1:
            return x0 + (x1 - x0) * g0 / (g0 - g1)
    return None
