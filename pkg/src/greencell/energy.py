"""Solar generation, battery storage and neighbour-to-neighbour energy sharing.

Two implementations of the hourly sharing step live here. ``run_sharing``
works on one network-hour and records every transaction; ``simulate_energy``
runs whole horizons for a batch of Monte Carlo iterations at once. They follow
the same arithmetic in the same order and are cross-checked in the tests.
"""

from __future__ import annotations

import enum
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field, replace

import numpy as np

from .profiles import HourlyProfile, default_solar_profile

# Overdraw slack for float round-off, relative to the amount available.
_OVERDRAW_RTOL = 1e-9


class SpatialMode(str, enum.Enum):
    EQUAL = "EQUAL"
    UNIFORM_RANDOM = "UNIFORM_RANDOM"


class Redraw(str, enum.Enum):
    """How often a per-BS random factor is redrawn."""

    ITERATION = "ITERATION"
    DAY = "DAY"
    HOUR = "HOUR"


@dataclass(frozen=True)
class SolarConfig:
    panel_capacity: float = 1000.0  # W nameplate, EQUAL mode
    profile: HourlyProfile = field(default_factory=default_solar_profile)  # Wh per hour per kW
    spatial_mode: SpatialMode = SpatialMode.EQUAL
    c_s: float = 1000.0  # W, scale of the per-BS uniform factor in UNIFORM_RANDOM mode
    redraw: Redraw = Redraw.HOUR

    def __post_init__(self):
        if self.panel_capacity < 0 or self.c_s < 0:
            raise ValueError("panel_capacity and c_s must be >= 0")
        object.__setattr__(self, "spatial_mode", SpatialMode(self.spatial_mode))
        object.__setattr__(self, "redraw", Redraw(self.redraw))


@dataclass(frozen=True)
class StorageState:
    level: float  # Wh
    capacity: float = 2000.0  # Wh
    storage_factor: float = 0.96

    def __post_init__(self):
        if self.capacity < 0:
            raise ValueError("capacity must be >= 0")
        if not 0.0 <= self.storage_factor <= 1.0:
            raise ValueError("storage_factor must be in [0, 1]")
        if not 0.0 <= self.level <= self.capacity:
            raise ValueError(f"level {self.level} outside [0, {self.capacity}]")

    def available(self, inflow: float) -> float:
        """Energy on hand this hour: retained charge plus fresh generation."""
        return self.storage_factor * self.level + inflow


def step_storage(state: StorageState, inflow: float, drawn: float) -> tuple[StorageState, float]:
    """Advance one hour. Returns the new state and the energy spilled over capacity."""
    if inflow < 0 or drawn < 0:
        raise ValueError("inflow and drawn must be >= 0")
    avail = state.available(inflow)
    if drawn > avail * (1.0 + _OVERDRAW_RTOL) + _OVERDRAW_RTOL:
        raise ValueError(f"cannot draw {drawn} Wh, only {avail} Wh available")
    raw = max(avail - drawn, 0.0)
    wastage = max(raw - state.capacity, 0.0)
    return replace(state, level=min(raw, state.capacity)), wastage


def shareable_surplus(available: float, demand: float) -> float:
    return max(0.0, available - demand)


def generation(
    hour: int, solar: SolarConfig, spatial_factor: float = 1.0
) -> float:
    """Wh produced by one BS in ``hour``.

    ``spatial_factor`` is the BS's U[0, 1] draw and only matters in
    UNIFORM_RANDOM mode.
    """
    if not 0 <= hour < 24:
        raise ValueError("hour must be in 0..23")
    if solar.spatial_mode is SpatialMode.EQUAL:
        return solar.panel_capacity / 1000.0 * solar.profile[hour]
    return spatial_factor * solar.c_s / 1000.0 * solar.profile[hour]


def generation_matrix(
    solar: SolarConfig, n_hours: int, spatial_factors: np.ndarray
) -> np.ndarray:
    """(n_hours, N) generation for one iteration.

    ``spatial_factors`` is (N,) for factors fixed over the iteration or
    (n_hours, N) when they vary in time.
    """
    prof = np.resize(solar.profile.as_array(), n_hours)[:, None]
    factors = np.atleast_2d(np.asarray(spatial_factors, dtype=float))
    if solar.spatial_mode is SpatialMode.EQUAL:
        return prof * np.full(factors.shape[1], solar.panel_capacity / 1000.0)[None, :]
    return prof * factors * (solar.c_s / 1000.0)


def alpha_matrix(alpha, n_sites: int, links: Mapping | None = None) -> np.ndarray:
    """Normalise a scalar, an (N, N) array or a ``{(a, b): alpha}`` map.

    Mapping entries are symmetric; unlisted links default to 1. ``links``
    overrides individual links on top of a scalar or array ``alpha``.
    """
    if isinstance(alpha, Mapping):
        links, alpha = alpha, 1.0
    mat = np.broadcast_to(np.asarray(alpha, dtype=float), (n_sites, n_sites)).copy()
    for (a, b), v in (links or {}).items():
        mat[a, b] = mat[b, a] = v
    if np.any(mat < 0) or np.any(mat > 1) or np.any(np.isnan(mat)):
        raise ValueError("utilization factor alpha must lie in [0, 1]")
    return mat


@dataclass(frozen=True)
class Transfer:
    donor: int
    recipient: int
    sent: float  # Wh leaving the donor
    delivered: float  # Wh arriving after line loss


def draw_from_donors(
    need: float,
    surpluses: Sequence[float],
    alphas: Sequence[float],
    compensate_loss: bool = False,
) -> tuple[list[float], list[float], float]:
    """Walk an already-ordered donor list until ``need`` is met.

    Each donor is asked for the outstanding need. A donor that can cover it
    sends exactly that amount (or ``need/alpha`` with ``compensate_loss``);
    otherwise it sends its whole surplus. Only ``alpha`` of what is sent
    arrives. Returns ``(sent, delivered, remaining)``.
    """
    sent, delivered = [], []
    remaining = need
    for surplus, a in zip(surpluses, alphas):
        if remaining <= 0:
            sent.append(0.0)
            delivered.append(0.0)
            continue
        if compensate_loss:
            with np.errstate(over="ignore"):
                ask = remaining / a if a > 0 else np.inf
            if surplus >= ask:
                eps, dlv, remaining = ask, remaining, 0.0
            else:
                eps = surplus
                dlv = a * eps
                remaining = remaining - dlv
        else:
            eps = remaining if surplus >= remaining else surplus
            dlv = a * eps
            remaining = remaining - dlv
        sent.append(eps)
        delivered.append(dlv)
    return sent, delivered, remaining


@dataclass
class HourLedger:
    """Per-BS energy flows (Wh) for one hour."""

    generation: np.ndarray
    demand: np.ndarray
    own_used: np.ndarray
    solar_used: np.ndarray
    grid_used: np.ndarray
    shared_out: np.ndarray
    shared_in: np.ndarray
    line_loss: np.ndarray
    wastage: np.ndarray
    level_start: np.ndarray
    level_end: np.ndarray
    transfers: list[Transfer]


def run_sharing(
    available: Sequence[float],
    demand: Sequence[float],
    neighbors: Sequence[Sequence[int]],
    alpha=1.0,
    enabled: bool = True,
    compensate_loss: bool = False,
) -> dict:
    """Cover each BS's demand for one hour from storage, neighbours, then grid.

    BSs whose stored energy covers demand use it directly. Deficit BSs drain
    their own storage, then (when ``enabled``) ask first-tier neighbours in
    order of descending shareable surplus. Deficit BSs are served in
    ascending id order and donors are debited as they give, so later
    requesters see what is left.
    """
    avail = np.asarray(available, dtype=float)
    dem = np.asarray(demand, dtype=float)
    n = len(avail)
    alpha = alpha_matrix(alpha, n)

    own = np.minimum(avail, dem)
    deficit = dem - own
    surplus = np.maximum(avail - dem, 0.0)
    shared_out = np.zeros(n)
    shared_in = np.zeros(n)
    line_loss = np.zeros(n)
    grid = deficit.copy()
    transfers: list[Transfer] = []

    if enabled:
        for b in range(n):
            if deficit[b] <= 0:
                continue
            donors = sorted(neighbors[b], key=lambda m: (-surplus[m], m))
            sent, dlv, remaining = draw_from_donors(
                deficit[b], [surplus[m] for m in donors], [alpha[b, m] for m in donors],
                compensate_loss,
            )
            for m, eps, got in zip(donors, sent, dlv):
                if eps == 0:
                    continue
                surplus[m] -= eps
                shared_out[m] += eps
                shared_in[b] += got
                line_loss[b] += eps - got
                transfers.append(Transfer(m, b, eps, got))
            grid[b] = remaining

    return {
        "own_used": own,
        "solar_used": own + shared_in,
        "grid_used": grid,
        "shared_out": shared_out,
        "shared_in": shared_in,
        "line_loss": line_loss,
        "transfers": transfers,
    }


def advance_hour(
    storages: Sequence[StorageState],
    generation_wh: Sequence[float],
    demand_wh: Sequence[float],
    neighbors: Sequence[Sequence[int]],
    alpha=1.0,
    enabled: bool = True,
    compensate_loss: bool = False,
) -> tuple[list[StorageState], HourLedger]:
    """Availability, sharing and exactly one storage step per BS."""
    gen = np.asarray(generation_wh, dtype=float)
    avail = np.array([s.available(g) for s, g in zip(storages, gen)])
    flows = run_sharing(avail, demand_wh, neighbors, alpha, enabled, compensate_loss)
    new_states, wastage = [], np.zeros(len(storages))
    for i, s in enumerate(storages):
        drawn = flows["own_used"][i] + flows["shared_out"][i]
        new, wastage[i] = step_storage(s, gen[i], min(drawn, s.available(gen[i])))
        new_states.append(new)
    ledger = HourLedger(
        generation=gen,
        demand=np.asarray(demand_wh, dtype=float),
        wastage=wastage,
        level_start=np.array([s.level for s in storages]),
        level_end=np.array([s.level for s in new_states]),
        **flows,
    )
    return new_states, ledger


@dataclass
class EnergyTrace:
    """Per-iteration, per-hour, per-BS flows; every array is (B, H, N) in Wh."""

    generation: np.ndarray
    demand: np.ndarray
    own_used: np.ndarray
    solar_used: np.ndarray
    grid_used: np.ndarray
    shared_out: np.ndarray
    shared_in: np.ndarray
    line_loss: np.ndarray
    wastage: np.ndarray
    level_start: np.ndarray
    level_end: np.ndarray
    storage_factor: float

    @property
    def leakage(self) -> np.ndarray:
        return (1.0 - self.storage_factor) * self.level_start

    def balance_residual(self) -> np.ndarray:
        """(B, H) network-wide generation minus its accounted destinations."""
        accounted = (
            self.solar_used + self.line_loss + (self.level_end - self.level_start)
            + self.leakage + self.wastage
        )
        return self.generation.sum(axis=2) - accounted.sum(axis=2)


def simulate_energy(
    generation_wh: np.ndarray,
    demand_wh: np.ndarray,
    neighbors: Sequence[Sequence[int]],
    capacity: float,
    storage_factor: float,
    alpha=1.0,
    enabled: bool = True,
    compensate_loss: bool = False,
    initial_level: float = 0.0,
) -> EnergyTrace:
    """Batched hourly storage and sharing over (B, H, N) inputs.

    Hours are sequential; the batch axis (independent iterations) is
    vectorised. Produces the same numbers as repeated ``advance_hour`` calls.
    """
    gen = np.asarray(generation_wh, dtype=float)
    dem = np.asarray(demand_wh, dtype=float)
    if gen.shape != dem.shape or gen.ndim != 3:
        raise ValueError("generation and demand must share a (B, H, N) shape")
    if not 0.0 <= storage_factor <= 1.0:
        raise ValueError("storage_factor must be in [0, 1]")
    if not 0.0 <= initial_level <= capacity:
        raise ValueError("initial_level must lie in [0, capacity]")
    B, H, N = gen.shape
    alpha = alpha_matrix(alpha, N)
    nbrs = [np.asarray(sorted(nb), dtype=int) for nb in neighbors]
    alpha_nb = [alpha[b, nbrs[b]] for b in range(N)]

    out = {k: np.zeros((B, H, N)) for k in (
        "own_used", "solar_used", "grid_used", "shared_out", "shared_in",
        "line_loss", "wastage", "level_start", "level_end")}
    level = np.full((B, N), float(initial_level))

    for h in range(H):
        g, d = gen[:, h, :], dem[:, h, :]
        avail = storage_factor * level + g
        own = np.minimum(avail, d)
        deficit = d - own
        surplus = np.maximum(avail - d, 0.0)
        grid = deficit.copy()
        s_out = np.zeros((B, N))
        s_in = np.zeros((B, N))
        loss = np.zeros((B, N))

        if enabled:
            for b in range(N):
                nb = nbrs[b]
                if nb.size == 0:
                    continue
                rows = np.flatnonzero(deficit[:, b] > 0)
                if rows.size == 0:
                    continue
                sur = surplus[np.ix_(rows, nb)]
                order = np.argsort(-sur, axis=1, kind="stable")
                rem = deficit[rows, b].copy()
                r_idx = np.arange(rows.size)
                for k in range(nb.size):
                    j = order[:, k]
                    s_k = sur[r_idx, j]
                    a = alpha_nb[b][j]
                    active = rem > 0
                    if compensate_loss:
                        with np.errstate(divide="ignore", invalid="ignore"):
                            ask = np.where(a > 0, rem / a, np.inf)
                        covers = s_k >= ask
                        eps = np.where(covers, ask, s_k)
                        dlv = np.where(covers, rem, a * eps)
                        new_rem = np.where(covers, 0.0, rem - dlv)
                    else:
                        eps = np.where(s_k >= rem, rem, s_k)
                        dlv = a * eps
                        new_rem = rem - dlv
                    eps = np.where(active, eps, 0.0)
                    dlv = np.where(active, dlv, 0.0)
                    rem = np.where(active, new_rem, rem)
                    donor = nb[j]
                    surplus[rows, donor] -= eps
                    s_out[rows, donor] += eps
                    s_in[rows, b] += dlv
                    loss[rows, b] += eps - dlv
                grid[rows, b] = rem

        raw = np.maximum(avail - np.minimum(own + s_out, avail), 0.0)
        waste = np.maximum(raw - capacity, 0.0)
        new_level = np.minimum(raw, capacity)

        out["own_used"][:, h] = own
        out["solar_used"][:, h] = own + s_in
        out["grid_used"][:, h] = grid
        out["shared_out"][:, h] = s_out
        out["shared_in"][:, h] = s_in
        out["line_loss"][:, h] = loss
        out["wastage"][:, h] = waste
        out["level_start"][:, h] = level
        out["level_end"][:, h] = new_level
        level = new_level

    return EnergyTrace(generation=gen, demand=dem, storage_factor=storage_factor, **out)
