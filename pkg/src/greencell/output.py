"""CSV and plot emission. Every plot is drawn from data also written as CSV."""

from __future__ import annotations

import csv
import math
from collections.abc import Iterable, Mapping, Sequence
from pathlib import Path

import numpy as np

from .engine import RunResult
from .radio import CompMode, linear_to_db
from .sweep import SweepRow

TIMESERIES_HEADER = (
    "hour",
    "throughput_bps",
    "grid_w",
    "solar_w",
    "savings_eq8_pct",
    "savings_conv_pct",
    "ee_bits_per_j",
    "eci_j_per_bit",
    "ee_defined",
)
SWEEP_HEADER = ("axis_value", "scenario", "metric", "mean", "stderr")

# (hourly key, file stem, y label)
TIMESERIES_PLOTS = (
    ("throughput_bps", "throughput", "Network throughput (bps)"),
    ("grid_w", "grid_power", "Grid power (W)"),
    ("solar_w", "solar_power", "Solar power used (W)"),
    ("savings_eq8_pct", "savings", "Grid energy savings (%)"),
    ("eci_j_per_bit", "eci", "ECI (J/bit)"),
)
SWEEP_PLOTS = (
    ("ee_bits_per_j", "EE (bits/J)"),
    ("grid_wh", "Grid energy over run (Wh)"),
    ("savings_eq8_pct", "Grid energy savings (%)"),
)


def fmt(x) -> str:
    """Six significant digits, stable across runs."""
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if math.isnan(x):
        return "nan"
    return f"{x:.6g}"


def emit_timeseries(result: RunResult, path: str | Path) -> Path:
    path = Path(path)
    h = result.hourly
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(TIMESERIES_HEADER)
        for t in range(result.n_hours):
            defined = bool(h["ee_defined"][t])
            w.writerow([
                t,
                fmt(h["throughput_bps"][t]),
                fmt(h["grid_w"][t]),
                fmt(h["solar_w"][t]),
                fmt(h["savings_eq8_pct"][t]),
                fmt(h["savings_conv_pct"][t]),
                fmt(h["ee_bits_per_j"][t]) if defined else "",
                fmt(h["eci_j_per_bit"][t]),
                fmt(defined),
            ])
    return path


def emit_summary(results: Mapping[str, RunResult], path: str | Path) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("scenario", "metric", "mean", "stderr"))
        for label, res in results.items():
            for metric, (mean, se) in res.summary.items():
                w.writerow((label, metric, fmt(mean), fmt(se)))
    return path


class SweepWriter:
    """Streams sweep rows to CSV, flushing after each point."""

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self._fh = self.path.open("w", newline="")
        self._w = csv.writer(self._fh, lineterminator="\n")
        self._w.writerow(SWEEP_HEADER)
        self._fh.flush()

    def __call__(self, rows: Iterable[SweepRow]) -> None:
        for r in rows:
            self._w.writerow((fmt(r.axis_value), r.scenario, r.metric, fmt(r.mean), fmt(r.stderr)))
        self._fh.flush()

    def close(self) -> None:
        self._fh.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def _write_wide(path: Path, x_name: str, xs, columns: Mapping[str, Sequence[float]]) -> None:
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([x_name, *columns])
        for i, x in enumerate(xs):
            w.writerow([fmt(x), *(fmt(col[i]) for col in columns.values())])


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def plot_sinr_cdf(samples: Mapping[CompMode, np.ndarray], out_dir: str | Path) -> list[Path]:
    """Empirical SINR CDF, one curve per mode."""
    out_dir = Path(out_dir)
    cols = {}
    for mode, s in samples.items():
        cols[CompMode(mode).value] = np.sort(linear_to_db(np.asarray(s)))
    n = min(len(v) for v in cols.values())
    cdf = np.arange(1, n + 1) / n
    csv_path = out_dir / "sinr_cdf.csv"
    _write_wide(csv_path, "cdf", cdf, {f"{k}_sinr_db": v[:n] for k, v in cols.items()})

    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(6, 4))
    for label, v in cols.items():
        ax.plot(v[:n], cdf, label=label)
    ax.set_xlabel("SINR (dB)")
    ax.set_ylabel("Empirical CDF")
    ax.grid(alpha=0.3)
    ax.legend()
    png = out_dir / "sinr_cdf.png"
    fig.tight_layout()
    fig.savefig(png, dpi=120, metadata={"Software": None})
    plt.close(fig)
    return [csv_path, png]


def plot_timeseries(results: Mapping[str, RunResult], out_dir: str | Path) -> list[Path]:
    """Five hourly plots, each with one curve per scenario."""
    out_dir = Path(out_dir)
    plt = _pyplot()
    files = []
    for key, stem, ylabel in TIMESERIES_PLOTS:
        cols = {label: res.hourly[key] for label, res in results.items()}
        hours = np.arange(len(next(iter(cols.values()))))
        csv_path = out_dir / f"hourly_{stem}.csv"
        _write_wide(csv_path, "hour", hours, cols)
        fig, ax = plt.subplots(figsize=(7, 4))
        for label, y in cols.items():
            ax.plot(hours, y, label=label)
        ax.set_xlabel("Hour")
        ax.set_ylabel(ylabel)
        ax.grid(alpha=0.3)
        ax.legend(fontsize="small")
        png = out_dir / f"hourly_{stem}.png"
        fig.tight_layout()
        fig.savefig(png, dpi=120, metadata={"Software": None})
        plt.close(fig)
        files += [csv_path, png]
    return files


def plot_sweep(rows: Sequence[SweepRow], axis_name: str, out_dir: str | Path) -> list[Path]:
    """Metric against the sweep axis, one curve per scenario."""
    out_dir = Path(out_dir)
    plt = _pyplot()
    files = []
    xs = sorted({r.axis_value for r in rows})
    scenarios = list(dict.fromkeys(r.scenario for r in rows))
    for metric, ylabel in SWEEP_PLOTS:
        table = {(r.axis_value, r.scenario): r.mean for r in rows if r.metric == metric}
        cols = {sc: [table.get((x, sc), math.nan) for x in xs] for sc in scenarios}
        csv_path = out_dir / f"sweep_{metric}.csv"
        _write_wide(csv_path, axis_name.lower(), xs, cols)
        fig, ax = plt.subplots(figsize=(6, 4))
        for sc, y in cols.items():
            ax.plot(xs, y, marker="o", label=sc)
        ax.set_xlabel(axis_name)
        ax.set_ylabel(ylabel)
        ax.grid(alpha=0.3)
        ax.legend(fontsize="small")
        png = out_dir / f"sweep_{metric}.png"
        fig.tight_layout()
        fig.savefig(png, dpi=120, metadata={"Software": None})
        plt.close(fig)
        files += [csv_path, png]
    return files


def emit_plots(
    out_dir: str | Path,
    results: Mapping[str, RunResult] | None = None,
    sinr: Mapping[CompMode, np.ndarray] | None = None,
    sweep_rows: Sequence[SweepRow] | None = None,
    sweep_axis: str = "axis_value",
) -> list[Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    files: list[Path] = []
    if sinr:
        files += plot_sinr_cdf(sinr, out_dir)
    if results:
        files += plot_timeseries(results, out_dir)
    if sweep_rows:
        files += plot_sweep(sweep_rows, sweep_axis, out_dir)
    return files
