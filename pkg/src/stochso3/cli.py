"""Command-line entry point.

    stochso3 simulate --preset paper-sV --filters ito,strat --seed 42 --out run/
    stochso3 montecarlo --preset paper-sV --seeds 0..19 --out mc/
    stochso3 preset-list
    stochso3 selftest
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path

from . import report, selftest
from .errors import SingularityError
from .harness import compute_metrics, generate_measurements, run_filter, run_monte_carlo, simulate_truth
from .scenario import PRESETS, load_scenario, preset, scenario_to_dict
from .sim import TimeGrid


def parse_seeds(text: str) -> tuple:
    """``"0..19"`` (inclusive), ``"1,4,9"`` or a mix such as ``"0..3,10"``."""
    seeds = []
    for part in text.split(","):
        part = part.strip()
        if ".." in part:
            lo, hi = part.split("..")
            seeds.extend(range(int(lo), int(hi) + 1))
        elif part:
            seeds.append(int(part))
    if not seeds:
        raise argparse.ArgumentTypeError("empty seed list")
    return tuple(seeds)


def _scenario(args):
    sc = load_scenario(args.config) if args.config else preset(args.preset)
    if args.filters:
        sc = replace(sc, filters=tuple(f.strip() for f in args.filters.split(",")))
    if args.dt or args.t_end:
        sc = replace(sc, grid=TimeGrid(sc.grid.t0, args.t_end or sc.grid.t_end, args.dt or sc.grid.dt))
    if args.noise_convention:
        sc = replace(sc, noise_convention=args.noise_convention)
    seeds = getattr(args, "seeds", None) or ((args.seed,) if getattr(args, "seed", None) is not None else None)
    if seeds:
        sc = replace(sc, seeds=seeds)
    # re-run validation on the final scenario
    return replace(sc)


DEFAULT_WINDOW = (1.0, 15.0)


def _window(args, grid: TimeGrid) -> tuple:
    """The requested window, or the default one clipped to the time grid.

    Runs shorter than the default window start fall back to the whole grid.
    """
    if args.window is not None:
        return tuple(args.window)
    lo, hi = max(DEFAULT_WINDOW[0], grid.t0), min(DEFAULT_WINDOW[1], grid.t_end)
    return (lo, hi) if lo < hi else (grid.t0, grid.t_end)


def _label(args) -> str:
    return str(args.config) if args.config else args.preset


def _write_scenario(sc, out: Path) -> None:
    (out / "scenario.json").write_text(json.dumps(scenario_to_dict(sc), indent=2, sort_keys=True) + "\n")


def cmd_simulate(args) -> int:
    sc = _scenario(args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    _write_scenario(sc, out)
    window = _window(args, sc.grid)
    truth = simulate_truth(sc)
    metrics = {f: [] for f in sc.filters}
    for seed in sc.seeds:
        meas = generate_measurements(sc, seed, truth)
        for f in sc.filters:
            s = run_filter(sc, f, meas)
            report.write_series_csv(s, out / f"{f}_seed{seed}.csv")
            metrics[f].append(compute_metrics(s.t, s.err_dist, window))
    rep = {"seeds": list(sc.seeds), "metrics": metrics, "window": window}
    report.write_summary(rep, out / "summary.txt", _label(args))
    print((out / "summary.txt").read_text(), end="")
    return 0


def cmd_montecarlo(args) -> int:
    sc = _scenario(args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    _write_scenario(sc, out)
    rep = run_monte_carlo(sc, window=_window(args, sc.grid), keep_series=args.series)
    report.write_metrics_csv(rep, out / "metrics.csv")
    report.write_summary(rep, out / "summary.txt", _label(args))
    if args.series:
        for (f, seed), s in rep["series"].items():
            report.write_series_csv(s, out / f"{f}_seed{seed}.csv")
    print((out / "summary.txt").read_text(), end="")
    return 0


def cmd_preset_list(args) -> int:
    for name, (_, desc) in PRESETS.items():
        print(f"{name}: {desc}")
    return 0


def cmd_selftest(args) -> int:
    return 0 if selftest.run(args.seed) else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="stochso3", description="Stochastic attitude filters on SO(3)")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def scenario_args(sp):
        src = sp.add_mutually_exclusive_group()
        src.add_argument("--preset", default="paper-sV", choices=sorted(PRESETS))
        src.add_argument("--config", type=Path, help="JSON scenario file")
        sp.add_argument("--filters", help="comma list of det,ito,strat,ito-quat,strat-quat")
        sp.add_argument("--dt", type=float)
        sp.add_argument("--t-end", type=float)
        sp.add_argument("--noise-convention", choices=("per-step", "white"))
        sp.add_argument("--window", type=float, nargs=2, metavar=("START", "END"),
                        help="metrics window in seconds (default 1 15, clipped to the run)")
        sp.add_argument("--out", required=True, type=Path)

    sp = sub.add_parser("simulate", help="run one scenario and write per-filter CSV series")
    scenario_args(sp)
    sp.add_argument("--seed", type=int)
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("montecarlo", help="seed sweep with paired noise per seed")
    scenario_args(sp)
    sp.add_argument("--seeds", type=parse_seeds, default=None, help="e.g. 0..19 or 1,2,5")
    sp.add_argument("--series", action="store_true", help="also write every time series CSV")
    sp.set_defaults(func=cmd_montecarlo)

    sp = sub.add_parser("preset-list", help="list built-in scenarios")
    sp.set_defaults(func=cmd_preset_list)

    sp = sub.add_parser("selftest", help="run the built-in property checks")
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(func=cmd_selftest)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ValueError, SingularityError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
