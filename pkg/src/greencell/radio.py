"""Log-distance channel, per-RB SINR and CoMP user association."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

SPEED_OF_LIGHT = 299_792_458.0
THERMAL_NOISE_DBM_HZ = -174.0
# Intra-cell RBs are orthogonal, so the intra-cell term of the SINR denominator vanishes.
INTRACELL_INTERFERENCE_MW = 0.0


class CompMode(str, enum.Enum):
    NONCOMP = "NONCOMP"
    DPS = "DPS"
    JT = "JT"


@dataclass(frozen=True)
class ChannelParams:
    ref_distance: float = 100.0  # m
    pathloss_exponent: float = 3.574
    shadow_sigma: float = 8.0  # dB
    carrier_freq: float = 2e9  # Hz
    rb_bandwidth: float = 180e3  # Hz
    rb_count: int = 50
    bs_tx_power: float = 43.0  # dBm over the whole carrier

    def __post_init__(self):
        if not self.ref_distance > 0:
            raise ValueError("ref_distance must be positive")
        if self.shadow_sigma < 0:
            raise ValueError("shadow_sigma must be >= 0")
        if self.rb_count < 1:
            raise ValueError("rb_count must be >= 1")
        if not self.carrier_freq > 0 or not self.rb_bandwidth > 0:
            raise ValueError("carrier_freq and rb_bandwidth must be positive")

    @property
    def tx_power_per_rb(self) -> float:
        """dBm per RB with the carrier power split evenly over all RBs."""
        return self.bs_tx_power - 10.0 * math.log10(self.rb_count)

    @property
    def ref_path_loss(self) -> float:
        """Free-space loss at the reference distance, dB."""
        return 20.0 * math.log10(
            4.0 * math.pi * self.ref_distance * self.carrier_freq / SPEED_OF_LIGHT
        )


@dataclass(frozen=True)
class ServingSet:
    ue_id: int
    mode: CompMode
    servers: tuple[int, ...]
    sinr: float  # linear

    def __post_init__(self):
        want = 2 if self.mode is CompMode.JT else 1
        if len(self.servers) != want:
            raise ValueError(f"{self.mode.value} needs {want} server(s), got {self.servers}")


def path_loss(params: ChannelParams, d):
    """Log-distance path loss in dB; distances under d0 are clamped to d0."""
    d = np.asarray(d, dtype=float)
    if np.any(d <= 0):
        raise ValueError("distance must be positive")
    d = np.maximum(d, params.ref_distance)
    pl = params.ref_path_loss + 10.0 * params.pathloss_exponent * np.log10(d / params.ref_distance)
    return float(pl) if pl.ndim == 0 else pl


def received_power(params: ChannelParams, tx_dbm_per_rb, d, shadow_db=0.0):
    return tx_dbm_per_rb - path_loss(params, d) + shadow_db


def noise_power(bandwidth_hz: float) -> float:
    if not bandwidth_hz > 0:
        raise ValueError("bandwidth must be positive")
    return THERMAL_NOISE_DBM_HZ + 10.0 * math.log10(bandwidth_hz)


def dbm_to_mw(dbm):
    return np.power(10.0, np.asarray(dbm, dtype=float) / 10.0)


def linear_to_db(x):
    return 10.0 * np.log10(x)


def sinr(rx_dbm, servers, occupied, noise_dbm: float) -> float:
    """Linear SINR of one UE served jointly by ``servers``.

    ``rx_dbm`` holds the UE's received power from every site on its RB and
    ``occupied`` says which sites transmit on that RB. Serving sites never
    count as interference.
    """
    servers = list(servers)
    if not servers:
        raise ValueError("server list is empty")
    p = dbm_to_mw(rx_dbm)
    occupied = np.asarray(occupied, dtype=bool).copy()
    signal = p[servers].sum()
    occupied[servers] = False
    interference = p[occupied].sum()
    return float(signal / (interference + INTRACELL_INTERFERENCE_MW + dbm_to_mw(noise_dbm)))


def associate_batch(
    rx_dbm: np.ndarray,
    occupied: np.ndarray,
    distances: np.ndarray,
    mode: CompMode,
    noise_dbm: float,
) -> tuple[np.ndarray, np.ndarray]:
    """Vectorised association for U UEs against N sites.

    Returns ``(servers, sinr)`` where ``servers`` is (U, 2) with -1 in the
    second column unless the mode is JT. Ties go to the lowest site id.
    """
    mode = CompMode(mode)
    p = dbm_to_mw(rx_dbm)
    occ_p = np.where(occupied, p, 0.0)
    noise = float(dbm_to_mw(noise_dbm))
    total = occ_p.sum(axis=1, keepdims=True)
    rows = np.arange(p.shape[0])
    servers = np.full((p.shape[0], 2), -1, dtype=int)

    if mode is CompMode.NONCOMP:
        first = np.argmin(distances, axis=1)
        servers[:, 0] = first
        s = p[rows, first] / (total[:, 0] - occ_p[rows, first] + noise)
        return servers, s

    single = p / (total - occ_p + noise)
    if mode is CompMode.DPS:
        first = np.argmax(single, axis=1)
        servers[:, 0] = first
        return servers, single[rows, first]

    order = np.argsort(-single, axis=1, kind="stable")
    a, b = order[:, 0], order[:, 1]
    servers[:, 0], servers[:, 1] = a, b
    num = p[rows, a] + p[rows, b]
    den = total[:, 0] - occ_p[rows, a] - occ_p[rows, b] + noise
    return servers, num / den


def associate(
    ue_id: int,
    rx_dbm,
    occupied,
    distances,
    mode: CompMode,
    noise_dbm: float,
) -> ServingSet:
    """Single-UE form of :func:`associate_batch`."""
    mode = CompMode(mode)
    servers, s = associate_batch(
        np.atleast_2d(rx_dbm), np.atleast_2d(occupied), np.atleast_2d(distances), mode, noise_dbm
    )
    chosen = tuple(int(x) for x in servers[0] if x >= 0)
    return ServingSet(ue_id, mode, chosen, float(s[0]))


def ue_throughput(sinr_linear, rb_bandwidth: float):
    """Shannon rate of one RB in bps."""
    s = np.asarray(sinr_linear, dtype=float)
    if np.any(s < 0):
        raise ValueError("sinr must be >= 0")
    out = rb_bandwidth * np.log2(1.0 + s)
    return float(out) if out.ndim == 0 else out
