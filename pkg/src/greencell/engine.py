"""Seeded Monte Carlo driver.

One iteration simulates ``horizon_days`` of hourly slots. The radio side
(loads, UE drops, association, throughput, BS power demand) does not depend
on any energy parameter, so it is computed once per iteration as a
:class:`TrafficTrace` and can be reused across storage, solar and line-loss
variations. The energy side is then run for all iterations in one batch.
"""

from __future__ import annotations

import enum
import math
from collections.abc import Mapping, Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields, replace

import numpy as np

from . import metrics
from .energy import (
    EnergyTrace,
    Redraw,
    SolarConfig,
    alpha_matrix,
    generation_matrix,
    simulate_energy,
)
from .geometry import Layout, build_hex_layout, first_tier_neighbors, sample_in_hexagons
from .power import PowerModelParams, bs_input_power
from .profiles import HOURS_PER_DAY, HourlyProfile, default_traffic_profile
from .radio import (
    ChannelParams,
    CompMode,
    associate_batch,
    noise_power,
    received_power,
    ue_throughput,
)

SECONDS_PER_HOUR = 3600.0


class LoadMode(str, enum.Enum):
    PROFILE_ONLY = "PROFILE_ONLY"
    PROFILE_TIMES_UNIFORM = "PROFILE_TIMES_UNIFORM"


class _Stream(enum.IntEnum):
    # fixed ids so each concern owns its own substream
    LOAD = 0
    DROPS = 1
    RB = 2
    SHADOW = 3
    SOLAR = 4


@dataclass(frozen=True)
class ScenarioConfig:
    cell_radius: float = 1000.0
    tiers: int = 2
    channel: ChannelParams = field(default_factory=ChannelParams)
    power: PowerModelParams = field(default_factory=PowerModelParams)
    solar: SolarConfig = field(default_factory=SolarConfig)
    storage_capacity: float = 2000.0  # Wh
    storage_factor: float = 0.96
    traffic_profile: HourlyProfile = field(default_factory=default_traffic_profile)
    comp_mode: CompMode = CompMode.NONCOMP
    sharing_enabled: bool = False
    alpha: float = 1.0
    alpha_links: tuple[tuple[tuple[int, int], float], ...] = ()  # per-link overrides
    compensate_line_loss: bool = False
    horizon_days: int = 7
    iterations: int = 200
    master_seed: int = 0
    spatial_load_mode: LoadMode = LoadMode.PROFILE_TIMES_UNIFORM
    load_redraw_hourly: bool = False
    discard_warmup: bool = False

    def __post_init__(self):
        object.__setattr__(self, "comp_mode", CompMode(self.comp_mode))
        object.__setattr__(self, "spatial_load_mode", LoadMode(self.spatial_load_mode))
        if not self.cell_radius > 0:
            raise ValueError("cell_radius must be positive")
        if self.tiers not in (1, 2):
            raise ValueError("tiers must be 1 or 2")
        if self.storage_capacity < 0:
            raise ValueError("storage_capacity must be >= 0")
        if not 0.0 <= self.storage_factor <= 1.0:
            raise ValueError("storage_factor must be in [0, 1]")
        if self.horizon_days < 1:
            raise ValueError("horizon_days must be >= 1")
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")
        if not 0 <= self.master_seed < 2**64:
            raise ValueError("master_seed must be a 64-bit unsigned integer")
        if max(self.traffic_profile.values) > 1.0:
            raise ValueError("traffic profile must be normalised to [0, 1]")
        if self.discard_warmup and self.horizon_days < 2:
            raise ValueError("discard_warmup needs at least two days")
        if not 0.0 <= float(self.alpha) <= 1.0:
            raise ValueError("alpha must be in [0, 1]")
        if isinstance(self.alpha_links, Mapping):
            object.__setattr__(self, "alpha_links", tuple(sorted(self.alpha_links.items())))
        for (a, b), v in self.alpha_links:
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"alpha for link {a}-{b} must be in [0, 1]")

    @property
    def n_hours(self) -> int:
        return HOURS_PER_DAY * self.horizon_days

    def traffic_key(self) -> tuple:
        """Everything a TrafficTrace depends on."""
        return (
            self.cell_radius, self.tiers, self.channel, self.power,
            self.traffic_profile.values, self.comp_mode, self.horizon_days,
            self.master_seed, self.spatial_load_mode, self.load_redraw_hourly,
            self.solar.redraw,
        )


def _rng(master_seed: int, iteration: int, stream: _Stream) -> np.random.Generator:
    ss = np.random.SeedSequence(entropy=master_seed, spawn_key=(iteration, int(stream)))
    return np.random.default_rng(ss)


def draw_load(profile_value: float, mode: LoadMode, u: float = 1.0) -> float:
    """Load of one BS in one hour."""
    if LoadMode(mode) is LoadMode.PROFILE_ONLY:
        return float(profile_value)
    return float(profile_value) * u


def draw_loads(
    profile: HourlyProfile,
    n_sites: int,
    n_hours: int,
    rng: np.random.Generator,
    mode: LoadMode = LoadMode.PROFILE_TIMES_UNIFORM,
    redraw_hourly: bool = False,
) -> np.ndarray:
    """(n_hours, n_sites) loads in [0, 1].

    In PROFILE_TIMES_UNIFORM mode each BS scales the profile by a U[0, 1]
    factor fixed for the iteration, or redrawn every hour with
    ``redraw_hourly``.
    """
    prof = np.resize(profile.as_array(), n_hours)[:, None]
    if LoadMode(mode) is LoadMode.PROFILE_ONLY:
        return np.broadcast_to(prof, (n_hours, n_sites)).copy()
    shape = (n_hours, n_sites) if redraw_hourly else (1, n_sites)
    return prof * rng.random(shape)


def draw_spatial_factors(
    rng: np.random.Generator, n_sites: int, n_days: int, redraw: Redraw
) -> np.ndarray:
    """U[0, 1] solar factors: (N,) per iteration, else (H, N)."""
    redraw = Redraw(redraw)
    if redraw is Redraw.ITERATION:
        return rng.random(n_sites)
    if redraw is Redraw.DAY:
        return np.repeat(rng.random((n_days, n_sites)), HOURS_PER_DAY, axis=0)
    return rng.random((n_days * HOURS_PER_DAY, n_sites))


def ue_counts(loads: np.ndarray, rb_count: int) -> np.ndarray:
    # round before ceil so that e.g. 0.3 * 50 gives 15, not 16
    return np.ceil(np.round(np.asarray(loads) * rb_count, 9)).astype(int)


@dataclass
class UEDrop:
    """Flat arrays describing every UE of a set of hourly drops."""

    hour: np.ndarray
    home: np.ndarray
    rb: np.ndarray
    position: np.ndarray  # (U, 2)

    def __len__(self) -> int:
        return len(self.hour)


def place_ues(
    layout: Layout,
    loads: np.ndarray,
    drop_rng: np.random.Generator,
    rb_rng: np.random.Generator,
    rb_count: int = 50,
) -> UEDrop:
    """Drop ceil(x * rb_count) UEs uniformly in each hexagon.

    ``loads`` is (H, N) or (N,). Each UE of a cell gets a distinct RB drawn
    uniformly without replacement.
    """
    loads = np.atleast_2d(loads)
    counts = ue_counts(loads, rb_count)
    H, N = counts.shape
    perm = np.argsort(rb_rng.random((H, N, rb_count)), axis=2)
    take = np.arange(rb_count)[None, None, :] < counts[:, :, None]
    h_idx, b_idx, _ = np.nonzero(take)
    rb = perm[take]
    pos = sample_in_hexagons(layout, b_idx, drop_rng)
    return UEDrop(hour=h_idx, home=b_idx, rb=rb, position=pos)


@dataclass
class TrafficTrace:
    """Radio-side outcome of one iteration."""

    demand_w: np.ndarray  # (H, N) input power after association
    conventional_w: np.ndarray  # (H, N) grid-only, no-sleep, nearest-BS baseline
    throughput_bps: np.ndarray  # (H,)
    served: np.ndarray  # (H, N) RBs in use after association
    home_ues: np.ndarray  # (H, N) UEs dropped in each cell
    solar_factors: np.ndarray  # (N,) or (H, N) U[0, 1] spatial generation factors


def _link_budget(config: ScenarioConfig, layout: Layout, drop: UEDrop, shadow_rng):
    ch = config.channel
    diff = drop.position[:, None, :] - layout.positions[None, :, :]
    dist = np.hypot(diff[..., 0], diff[..., 1])
    shadow = shadow_rng.normal(0.0, ch.shadow_sigma, size=dist.shape)
    rx = received_power(ch, ch.tx_power_per_rb, dist, shadow)
    return dist, rx


def traffic_trace(config: ScenarioConfig, iteration: int, layout: Layout | None = None) -> TrafficTrace:
    layout = layout or build_hex_layout(config.cell_radius, config.tiers)
    seed = config.master_seed
    ch = config.channel
    H, N, K = config.n_hours, layout.n_sites, ch.rb_count

    loads = draw_loads(
        config.traffic_profile, N, H, _rng(seed, iteration, _Stream.LOAD),
        config.spatial_load_mode, config.load_redraw_hourly,
    )
    solar_factors = draw_spatial_factors(
        _rng(seed, iteration, _Stream.SOLAR), N, config.horizon_days, config.solar.redraw
    )
    drop = place_ues(
        layout, loads, _rng(seed, iteration, _Stream.DROPS), _rng(seed, iteration, _Stream.RB), K
    )
    home_ues = np.bincount(drop.hour * N + drop.home, minlength=H * N).reshape(H, N)

    dist, rx = _link_budget(config, layout, drop, _rng(seed, iteration, _Stream.SHADOW))
    occ = np.zeros((H, N, K), dtype=bool)
    occ[drop.hour, drop.home, drop.rb] = True
    occupied = occ[drop.hour, :, drop.rb]
    servers, sinr = associate_batch(rx, occupied, dist, config.comp_mode, noise_power(ch.rb_bandwidth))

    thr = ue_throughput(sinr, ch.rb_bandwidth)
    throughput = np.bincount(drop.hour, weights=thr, minlength=H)
    served = np.zeros(H * N, dtype=int)
    for col in range(servers.shape[1]):
        ok = servers[:, col] >= 0
        served += np.bincount(drop.hour[ok] * N + servers[ok, col], minlength=H * N)
    served = served.reshape(H, N)

    load_eff = np.minimum(served / K, 1.0)
    demand = bs_input_power(config.power, load_eff)
    conventional = bs_input_power(config.power, np.minimum(home_ues / K, 1.0), sleep=False)
    return TrafficTrace(demand, conventional, throughput, served, home_ues, solar_factors)


def _trace_worker(args):
    config, idx = args
    layout = build_hex_layout(config.cell_radius, config.tiers)
    return [traffic_trace(config, i, layout) for i in idx]


def traffic_traces(config: ScenarioConfig, workers: int = 1) -> list[TrafficTrace]:
    """Traces for iterations 0..iterations-1, identical for any worker count."""
    n = config.iterations
    if workers <= 1 or n == 1:
        return _trace_worker((config, range(n)))
    chunks = [list(range(i, n, workers)) for i in range(workers)]
    out: list[TrafficTrace | None] = [None] * n
    with ProcessPoolExecutor(max_workers=workers) as pool:
        for idx, traces in zip(chunks, pool.map(_trace_worker, [(config, c) for c in chunks])):
            for i, t in zip(idx, traces):
                out[i] = t
    return out  # type: ignore[return-value]


def _stack(traces: Sequence[TrafficTrace], name: str) -> np.ndarray:
    return np.stack([getattr(t, name) for t in traces])


def energy_for_traces(
    config: ScenarioConfig, traces: Sequence[TrafficTrace], layout: Layout | None = None
) -> EnergyTrace:
    layout = layout or build_hex_layout(config.cell_radius, config.tiers)
    neighbors = [first_tier_neighbors(layout, b) for b in layout.site_ids]
    gen = np.stack([generation_matrix(config.solar, config.n_hours, t.solar_factors) for t in traces])
    demand_wh = _stack(traces, "demand_w") * 1.0  # one-hour slots: W -> Wh
    return simulate_energy(
        gen, demand_wh, neighbors, config.storage_capacity, config.storage_factor,
        alpha=alpha_matrix(config.alpha, layout.n_sites, dict(config.alpha_links)),
        enabled=config.sharing_enabled,
        compensate_loss=config.compensate_line_loss,
    )


@dataclass
class RunResult:
    config: ScenarioConfig
    seed: int
    hourly: dict[str, np.ndarray]  # iteration-mean series, see metrics.hourly_report
    hourly_stderr: dict[str, np.ndarray]
    summary: dict[str, tuple[float, float]]  # metric -> (mean, stderr)
    per_iteration: dict[str, np.ndarray]
    ledger: EnergyTrace | None = None

    @property
    def n_hours(self) -> int:
        return len(self.hourly["grid_w"])


_HOURLY_INPUTS = ("throughput_bps", "grid_w", "solar_w", "demand_w", "conventional_w")


def summarize(
    config: ScenarioConfig, traces: Sequence[TrafficTrace], energy: EnergyTrace,
    keep_ledger: bool = False,
) -> RunResult:
    per_hour = {
        "throughput_bps": _stack(traces, "throughput_bps"),
        "grid_w": energy.grid_used.sum(axis=2),
        "solar_w": energy.solar_used.sum(axis=2),
        "demand_w": energy.demand.sum(axis=2),
        "conventional_w": _stack(traces, "conventional_w").sum(axis=2),
    }
    B = len(traces)
    means = {k: v.mean(axis=0) for k, v in per_hour.items()}
    stderr = {
        k: (v.std(axis=0, ddof=1) / math.sqrt(B) if B > 1 else np.full(v.shape[1], np.nan))
        for k, v in per_hour.items()
    }
    hourly = metrics.hourly_report(*(means[k] for k in _HOURLY_INPUTS))

    start = HOURS_PER_DAY if config.discard_warmup else 0
    window = slice(start, None)
    per_iter = {
        "grid_wh": per_hour["grid_w"][:, window].sum(axis=1),
        "solar_wh": per_hour["solar_w"][:, window].sum(axis=1),
        "demand_wh": per_hour["demand_w"][:, window].sum(axis=1),
        "conventional_wh": per_hour["conventional_w"][:, window].sum(axis=1),
        "throughput_bits": per_hour["throughput_bps"][:, window].sum(axis=1) * SECONDS_PER_HOUR,
        "wastage_wh": energy.wastage[:, window].sum(axis=(1, 2)),
        "line_loss_wh": energy.line_loss[:, window].sum(axis=(1, 2)),
        "shared_wh": energy.shared_out[:, window].sum(axis=(1, 2)),
    }
    per_iter["savings_eq8_pct"] = 100.0 * per_iter["solar_wh"] / per_iter["demand_wh"]
    per_iter["savings_conv_pct"] = (
        100.0 * (per_iter["conventional_wh"] - per_iter["grid_wh"]) / per_iter["conventional_wh"]
    )
    per_iter["zero_grid"] = (per_iter["grid_wh"] == 0).astype(float)

    summary = {k: metrics.mean_stderr(v) for k, v in per_iter.items()}
    grid_j = per_iter["grid_wh"] * SECONDS_PER_HOUR
    summary["ee_bits_per_j"] = metrics.ratio_stats(per_iter["throughput_bits"], grid_j)
    summary["eci_j_per_bit"] = metrics.ratio_stats(grid_j, per_iter["throughput_bits"])
    mean_ee, undefined = metrics.mean_defined_ee(hourly["ee_bits_per_j"][window])
    summary["mean_hourly_ee"] = (mean_ee, math.nan)
    summary["ee_undefined_hours"] = (float(undefined), math.nan)

    return RunResult(
        config=config,
        seed=config.master_seed,
        hourly=hourly,
        hourly_stderr=stderr,
        summary=summary,
        per_iteration=per_iter,
        ledger=energy if keep_ledger else None,
    )


def run_iteration(config: ScenarioConfig, iteration: int = 0) -> tuple[TrafficTrace, EnergyTrace, dict]:
    """One iteration: its traffic trace, energy ledger and hourly metrics."""
    layout = build_hex_layout(config.cell_radius, config.tiers)
    trace = traffic_trace(config, iteration, layout)
    energy = energy_for_traces(config, [trace], layout)
    report = metrics.hourly_report(
        trace.throughput_bps,
        energy.grid_used[0].sum(axis=1),
        energy.solar_used[0].sum(axis=1),
        energy.demand[0].sum(axis=1),
        trace.conventional_w.sum(axis=1),
    )
    return trace, energy, report


def run_monte_carlo(
    config: ScenarioConfig,
    workers: int = 1,
    traces: Sequence[TrafficTrace] | None = None,
    keep_ledger: bool = False,
) -> RunResult:
    """Average ``config.iterations`` seeded iterations.

    Pass ``traces`` (from :func:`traffic_traces` on a config with the same
    ``traffic_key``) to skip the radio simulation.
    """
    if traces is None:
        traces = traffic_traces(config, workers)
    elif len(traces) != config.iterations:
        raise ValueError("number of traces does not match config.iterations")
    energy = energy_for_traces(config, traces)
    return summarize(config, traces, energy, keep_ledger)


def sinr_samples(
    config: ScenarioConfig,
    n_drops: int = 1000,
    modes: Sequence[CompMode] = tuple(CompMode),
    seed: int | None = None,
    center_only: bool = False,
) -> dict[CompMode, np.ndarray]:
    """Linear SINR of ``n_drops`` UEs under full load (every RB busy everywhere).

    The same drops and shadowing are reused for every mode.
    """
    seed = config.master_seed if seed is None else seed
    layout = build_hex_layout(config.cell_radius, config.tiers)
    drop_rng = _rng(seed, 0, _Stream.DROPS)
    if center_only:
        home = np.zeros(n_drops, dtype=int)
    else:
        home = drop_rng.integers(0, layout.n_sites, size=n_drops)
    pos = sample_in_hexagons(layout, home, drop_rng)
    drop = UEDrop(np.zeros(n_drops, dtype=int), home, np.zeros(n_drops, dtype=int), pos)
    dist, rx = _link_budget(config, layout, drop, _rng(seed, 0, _Stream.SHADOW))
    occupied = np.ones_like(rx, dtype=bool)
    noise = noise_power(config.channel.rb_bandwidth)
    return {CompMode(m): associate_batch(rx, occupied, dist, m, noise)[1] for m in modes}


def with_overrides(config: ScenarioConfig, **changes) -> ScenarioConfig:
    """``dataclasses.replace`` that also reaches into the solar sub-config."""
    solar_keys = {f.name for f in fields(SolarConfig)}
    solar_changes = {k: changes.pop(k) for k in list(changes) if k in solar_keys}
    if solar_changes:
        changes["solar"] = replace(config.solar, **solar_changes)
    return replace(config, **changes)
