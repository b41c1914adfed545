"""Command-line entry point.

Examples::

    greencell --modes noncomp,dps,jt --iterations 50 --out runs/base
    greencell --sweep LINE_LOSS_PCT=0,20,40,60 --modes all --out runs/loss
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace
from pathlib import Path

from .config import ConfigError, dump_config, load_config
from .engine import ScenarioConfig, run_monte_carlo, sinr_samples, traffic_traces
from .output import SweepWriter, emit_plots, emit_summary, emit_timeseries
from .radio import CompMode
from .sweep import SweepSpec, parse_modes_arg, parse_sweep_arg, run_sweep

log = logging.getLogger("greencell")

EXIT_USAGE = 2


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="greencell",
        description="Monte Carlo simulation of solar-powered CoMP cellular networks with a standby grid.",
    )
    p.add_argument("--config", type=Path, help="key = value scenario file")
    p.add_argument("--sweep", metavar="AXIS=v1,v2,...", help="sweep an energy axis")
    p.add_argument(
        "--modes",
        help="comma list of noncomp|dps|jt, optionally suffixed :on/:off for sharing; 'all' for every pair",
    )
    p.add_argument("--iterations", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--days", type=int)
    p.add_argument("--out", type=Path, default=Path("greencell-out"))
    p.add_argument("--no-plots", action="store_true")
    p.add_argument("--workers", type=int, default=1, help="processes for the radio simulation")
    p.add_argument("--sinr-drops", type=int, default=1000, help="UE drops for the SINR CDF")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def _configure(args) -> ScenarioConfig:
    config = load_config(args.config) if args.config else ScenarioConfig()
    changes = {}
    if args.iterations is not None:
        changes["iterations"] = args.iterations
    if args.seed is not None:
        changes["master_seed"] = args.seed
    if args.days is not None:
        changes["horizon_days"] = args.days
    try:
        return replace(config, **changes)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s"
    )
    try:
        config = _configure(args)
        scenarios = parse_modes_arg(
            args.modes or config.comp_mode.value, config.sharing_enabled
        )
        sweep = None
        if args.sweep:
            axis, values = parse_sweep_arg(args.sweep)
            sweep = SweepSpec(axis, values, scenarios)
    except (ConfigError, ValueError) as exc:
        print(f"greencell: {exc}", file=sys.stderr)
        return EXIT_USAGE

    out: Path = args.out
    try:
        out.mkdir(parents=True, exist_ok=True)
        (out / "config_echo.txt").write_text(dump_config(config))
        if sweep is not None:
            with SweepWriter(out / "sweep.csv") as writer:
                rows, _ = run_sweep(config, sweep, args.workers, on_point=writer)
            if not args.no_plots:
                emit_plots(out, sweep_rows=rows, sweep_axis=sweep.axis.value)
        else:
            results = {}
            cache = {}
            for sc in scenarios:
                cfg = replace(config, comp_mode=sc.comp_mode, sharing_enabled=sc.sharing)
                key = cfg.traffic_key()
                if key not in cache:
                    cache[key] = traffic_traces(cfg, args.workers)
                log.info("running %s", sc.label)
                res = run_monte_carlo(cfg, traces=cache[key])
                results[sc.label] = res
                emit_timeseries(res, out / f"timeseries_{sc.label.replace('/', '_')}.csv")
            emit_summary(results, out / "summary.csv")
            if not args.no_plots:
                modes = list(dict.fromkeys(CompMode(sc.comp_mode) for sc in scenarios))
                sinr = sinr_samples(config, args.sinr_drops, modes)
                emit_plots(out, results=results, sinr=sinr)
    except ValueError as exc:
        print(f"greencell: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"greencell: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
