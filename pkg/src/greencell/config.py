"""Flat ``key = value`` scenario files.

Blank lines and ``#`` comments are ignored. Missing keys keep their
defaults; unknown keys are rejected.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Any, Callable

from .energy import Redraw, SpatialMode
from .engine import LoadMode, ScenarioConfig
from .profiles import ProfileError, default_solar_profile, default_traffic_profile, load_profile
from .radio import CompMode


class ConfigError(ValueError):
    """Bad config text. ``line`` and ``key`` locate the problem when known."""

    def __init__(self, message: str, line: int | None = None, key: str | None = None):
        self.line = line
        self.key = key
        where = f"line {line}: " if line is not None else ""
        super().__init__(f"{where}{message}")


_TRUE = {"on", "true", "yes", "1"}
_FALSE = {"off", "false", "no", "0"}


def _bool(text: str) -> bool:
    t = text.lower()
    if t in _TRUE:
        return True
    if t in _FALSE:
        return False
    raise ValueError(f"expected on/off, got {text!r}")


def _enum(cls):
    def conv(text: str):
        try:
            return cls(text.upper())
        except ValueError:
            choices = ", ".join(m.value for m in cls)
            raise ValueError(f"expected one of {choices}, got {text!r}") from None
    return conv


def _links(text: str) -> tuple:
    out = {}
    for item in filter(None, (p.strip() for p in text.split(","))):
        pair, _, value = item.partition(":")
        a, _, b = pair.partition("-")
        out[(int(a), int(b))] = float(value)
    return tuple(sorted(out.items()))


def _fmt_links(links) -> str:
    return ",".join(f"{a}-{b}:{v!r}" for (a, b), v in links)


def _nonneg(v):
    return v >= 0


def _pos(v):
    return v > 0


def _unit(v):
    return 0.0 <= v <= 1.0


@dataclass(frozen=True)
class _Key:
    path: tuple[str, ...]  # attribute path inside ScenarioConfig
    parse: Callable[[str], Any]
    check: Callable[[Any], bool] | None = None
    rule: str = ""


_KEYS: dict[str, _Key] = {
    "cell_radius_m": _Key(("cell_radius",), float, _pos, "> 0"),
    "tiers": _Key(("tiers",), int, lambda v: v in (1, 2), "1 or 2"),
    "ref_distance_m": _Key(("channel", "ref_distance"), float, _pos, "> 0"),
    "pathloss_exponent": _Key(("channel", "pathloss_exponent"), float, _pos, "> 0"),
    "shadow_sigma_db": _Key(("channel", "shadow_sigma"), float, _nonneg, ">= 0"),
    "carrier_freq_hz": _Key(("channel", "carrier_freq"), float, _pos, "> 0"),
    "rb_bandwidth_hz": _Key(("channel", "rb_bandwidth"), float, _pos, "> 0"),
    "rb_count": _Key(("channel", "rb_count"), int, lambda v: v >= 1, ">= 1"),
    "bs_tx_power_dbm": _Key(("channel", "bs_tx_power"), float),
    "eta_pa": _Key(("power", "eta_pa"), float, lambda v: 0 < v <= 1, "in (0, 1]"),
    "p_bb_w": _Key(("power", "p_bb"), float, _nonneg, ">= 0"),
    "p_rf_w": _Key(("power", "p_rf"), float, _nonneg, ">= 0"),
    "sigma_feed": _Key(("power", "sigma_feed"), float, lambda v: 0 <= v < 1, "in [0, 1)"),
    "sigma_dc": _Key(("power", "sigma_dc"), float, lambda v: 0 <= v < 1, "in [0, 1)"),
    "sigma_ms": _Key(("power", "sigma_ms"), float, lambda v: 0 <= v < 1, "in [0, 1)"),
    "sigma_cool": _Key(("power", "sigma_cool"), float, lambda v: 0 <= v < 1, "in [0, 1)"),
    "m_sec": _Key(("power", "m_sec"), int, lambda v: v >= 1, ">= 1"),
    "p_max_dbm": _Key(("power", "p_max_dbm"), float),
    "delta_p": _Key(("power", "delta_p"), float, _nonneg, ">= 0"),
    "p_sleep_w": _Key(("power", "p_sleep"), float, _nonneg, ">= 0"),
    "gamma": _Key(("power", "gamma"), float),
    "panel_capacity_w": _Key(("solar", "panel_capacity"), float, _nonneg, ">= 0"),
    "solar_profile": _Key(("solar", "profile"), str),
    "spatial_mode": _Key(("solar", "spatial_mode"), _enum(SpatialMode)),
    "c_s_w": _Key(("solar", "c_s"), float, _nonneg, ">= 0"),
    "solar_redraw": _Key(("solar", "redraw"), _enum(Redraw)),
    "storage_capacity_wh": _Key(("storage_capacity",), float, _nonneg, ">= 0"),
    "storage_factor": _Key(("storage_factor",), float, _unit, "in [0, 1]"),
    "traffic_profile": _Key(("traffic_profile",), str),
    "comp_mode": _Key(("comp_mode",), _enum(CompMode)),
    "sharing": _Key(("sharing_enabled",), _bool),
    "alpha": _Key(("alpha",), float, _unit, "in [0, 1]"),
    "line_loss_pct": _Key(("alpha",), lambda t: 1.0 - float(t) / 100.0, _unit, "in [0, 100]"),
    "alpha_links": _Key(("alpha_links",), _links, lambda v: all(_unit(a) for _, a in v), "in [0, 1]"),
    "compensate_line_loss": _Key(("compensate_line_loss",), _bool),
    "horizon_days": _Key(("horizon_days",), int, lambda v: v >= 1, ">= 1"),
    "iterations": _Key(("iterations",), int, lambda v: v >= 1, ">= 1"),
    "master_seed": _Key(("master_seed",), int, lambda v: 0 <= v < 2**64, "a 64-bit unsigned int"),
    "spatial_load_mode": _Key(("spatial_load_mode",), _enum(LoadMode)),
    "load_redraw_hourly": _Key(("load_redraw_hourly",), _bool),
    "discard_warmup": _Key(("discard_warmup",), _bool),
}


def _set(config: ScenarioConfig, path: tuple[str, ...], value) -> ScenarioConfig:
    if len(path) == 1:
        return replace(config, **{path[0]: value})
    inner = getattr(config, path[0])
    return replace(config, **{path[0]: replace(inner, **{path[1]: value})})


def _resolve_profile(text: str, base: Path | None, kind: str):
    if text.lower() == "default":
        return default_solar_profile() if kind == "solar" else default_traffic_profile()
    p = Path(text)
    if not p.is_absolute() and base is not None:
        p = base / p
    return load_profile(p)


def parse_config(text: str, base_dir: Path | None = None) -> ScenarioConfig:
    """Parse config text; relative profile paths resolve against ``base_dir``."""
    values: dict[str, tuple[int, Any]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, val = line.partition("=")
        key, val = key.strip(), val.strip()
        if not sep or not key:
            raise ConfigError(f"expected 'key = value', got {raw.strip()!r}", lineno)
        if key not in _KEYS:
            raise ConfigError(f"unknown key {key!r}", lineno, key)
        spec = _KEYS[key]
        if any(spec.path == _KEYS[k].path for k in values):
            raise ConfigError(f"{key!r} set more than once", lineno, key)
        try:
            if key in ("solar_profile", "traffic_profile"):
                value = _resolve_profile(val, base_dir, key.split("_")[0])
            else:
                value = spec.parse(val)
        except ProfileError as exc:
            raise ConfigError(f"{key}: {exc}", lineno, key) from None
        except (ValueError, OSError) as exc:
            raise ConfigError(f"{key}: {exc}", lineno, key) from None
        if spec.check is not None and not spec.check(value):
            raise ConfigError(f"{key} must be {spec.rule}, got {val}", lineno, key)
        values[key] = (lineno, value)

    config = ScenarioConfig()
    try:
        for key, (lineno, value) in values.items():
            config = _set(config, _KEYS[key].path, value)
    except ValueError as exc:
        raise ConfigError(f"invalid combination: {exc}") from None
    return config


def load_config(path: str | Path) -> ScenarioConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from None
    return parse_config(text, path.parent)


def _get(config: ScenarioConfig, path: tuple[str, ...]):
    obj = config
    for part in path:
        obj = getattr(obj, part)
    return obj


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "on" if value else "off"
    if hasattr(value, "value") and isinstance(value.value, str):
        return value.value
    if isinstance(value, float):
        if math.isinf(value) or math.isnan(value):
            raise ConfigError(f"cannot serialise {value}")
        return repr(value)
    return str(value)


def dump_config(config: ScenarioConfig) -> str:
    """Echo every setting so that ``parse_config`` rebuilds the same scenario.

    Profiles are written as their source path, or ``default`` for the
    packaged ones.
    """
    lines = ["# greencell scenario"]
    for key, spec in _KEYS.items():
        if key == "line_loss_pct":
            continue
        value = _get(config, spec.path)
        if key in ("solar_profile", "traffic_profile"):
            src = value.source
            if src.startswith("greencell/data/"):
                text = "default"
            elif src == "<memory>":
                raise ConfigError(f"{key} was built in memory and has no file to reference")
            else:
                text = str(Path(src).resolve())
        elif key == "alpha_links":
            text = _fmt_links(value)
        else:
            text = _fmt(value)
        lines.append(f"{key} = {text}")
    return "\n".join(lines) + "\n"
