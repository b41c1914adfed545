"""Load-dependent input power of a macro base station, with sleep mode."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


def dbm_to_watts(dbm: float) -> float:
    return 10.0 ** (dbm / 10.0) / 1000.0


@dataclass(frozen=True)
class PowerModelParams:
    eta_pa: float = 0.306
    p_bb: float = 29.4  # W
    p_rf: float = 12.9  # W
    sigma_feed: float = 0.5
    sigma_dc: float = 0.075
    sigma_ms: float = 0.09
    sigma_cool: float = 0.1
    m_sec: int = 1
    p_max_dbm: float = 43.0
    delta_p: float = 4.2
    p_sleep: float = 54.0  # W
    gamma: float = 0.15  # listed with the macro parameters but used by no formula

    def __post_init__(self):
        for name in ("sigma_feed", "sigma_dc", "sigma_ms", "sigma_cool"):
            v = getattr(self, name)
            if not 0.0 <= v < 1.0:
                raise ValueError(f"{name} must be in [0, 1), got {v}")
        if not 0.0 < self.eta_pa <= 1.0:
            raise ValueError(f"eta_pa must be in (0, 1], got {self.eta_pa}")
        if self.m_sec < 1:
            raise ValueError("m_sec must be >= 1")
        if self.p_sleep < 0:
            raise ValueError("p_sleep must be >= 0")
        if self.p_sleep >= sector_power_p1(self):
            raise ValueError("p_sleep must be below the full-load sector power")

    @property
    def p_max(self) -> float:
        return dbm_to_watts(self.p_max_dbm)


def pa_power(params: PowerModelParams) -> float:
    """Power amplifier draw at full RF output."""
    denom = params.eta_pa * (1.0 - params.sigma_feed)
    if denom == 0:
        raise ZeroDivisionError("eta_pa * (1 - sigma_feed) is zero")
    return params.p_max / denom


def sector_power_p1(params: PowerModelParams, p_pa: float | None = None) -> float:
    """Full-load consumption of one sector (``p_pa`` overrides the PA term)."""
    if p_pa is None:
        p_pa = pa_power(params)
    denom = (1.0 - params.sigma_dc) * (1.0 - params.sigma_ms) * (1.0 - params.sigma_cool)
    if denom == 0:
        raise ZeroDivisionError("loss factors leave no deliverable power")
    return (params.p_bb + params.p_rf + p_pa) / denom


def bs_input_power(params: PowerModelParams, x, sleep: bool = True):
    """Input power in W for load ``x`` in [0, 1].

    With ``sleep=False`` an idle BS is billed at the awake idle level
    ``P1 - delta_p * P_MAX`` instead of the sleep power.
    """
    x_arr = np.asarray(x, dtype=float)
    if np.any((x_arr < 0) | (x_arr > 1)) or np.any(np.isnan(x_arr)):
        raise ValueError("load must lie in [0, 1]")
    p1 = sector_power_p1(params)
    active = params.m_sec * (p1 + params.delta_p * params.p_max * (x_arr - 1.0))
    if sleep:
        out = np.where(x_arr == 0.0, params.m_sec * params.p_sleep, active)
    else:
        out = active
    return float(out) if out.ndim == 0 else out
