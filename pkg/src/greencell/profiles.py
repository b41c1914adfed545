"""24-slot hourly profiles (solar Wh per kW panel, normalised traffic)."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

HOURS_PER_DAY = 24


class ProfileError(ValueError):
    pass


@dataclass(frozen=True)
class HourlyProfile:
    values: tuple[float, ...]
    source: str = "<memory>"

    def __post_init__(self):
        if len(self.values) != HOURS_PER_DAY:
            raise ProfileError(f"profile needs {HOURS_PER_DAY} values, got {len(self.values)}")
        if any(not np.isfinite(v) or v < 0 for v in self.values):
            raise ProfileError("profile values must be finite and non-negative")

    def __getitem__(self, hour: int) -> float:
        return self.values[hour % HOURS_PER_DAY]

    def as_array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=float)

    @property
    def daily_total(self) -> float:
        return float(sum(self.values))


def _parse(rows: list[list[str]], source: str) -> HourlyProfile:
    if not rows:
        raise ProfileError(f"{source}: empty profile file")
    header, body = rows[0], rows[1:]
    if len(header) < 2 or header[0].strip().lower() != "hour":
        raise ProfileError(f"{source}: header must start with 'hour,'")
    values: dict[int, float] = {}
    for lineno, row in enumerate(body, start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != 2:
            raise ProfileError(f"{source}:{lineno}: expected 2 columns, got {len(row)}")
        try:
            hour, value = int(row[0]), float(row[1])
        except ValueError as exc:
            raise ProfileError(f"{source}:{lineno}: {exc}") from None
        if not 0 <= hour < HOURS_PER_DAY:
            raise ProfileError(f"{source}:{lineno}: hour {hour} outside 0..23")
        if hour in values:
            raise ProfileError(f"{source}:{lineno}: duplicate hour {hour}")
        values[hour] = value
    if len(values) != HOURS_PER_DAY:
        raise ProfileError(f"{source}: need exactly 24 distinct hours, got {len(values)}")
    return HourlyProfile(tuple(values[h] for h in range(HOURS_PER_DAY)), source)


def load_profile(path: str | Path) -> HourlyProfile:
    path = Path(path)
    with path.open(newline="") as fh:
        return _parse(list(csv.reader(fh)), str(path))


def _packaged(name: str) -> HourlyProfile:
    text = resources.files("greencell.data").joinpath(name).read_text()
    return _parse(list(csv.reader(text.splitlines())), f"greencell/data/{name}")


def default_solar_profile() -> HourlyProfile:
    """Raised-cosine day from 06:00 to 18:00, 5 kWh per day for a 1 kW panel."""
    return _packaged("solar_1kw.csv")


def default_traffic_profile() -> HourlyProfile:
    """Normalised residential traffic: trough before dawn, peak at 21:00."""
    return _packaged("traffic_residential.csv")
