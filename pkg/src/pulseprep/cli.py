"""Command line front end.

Subcommands:
  list   show the built-in scenarios
  run    design + integrate one scenario, write CSV/JSON and figures
  mc     same, plus disorder trials with aggregate statistics
  plot   re-render figures for an existing result directory
"""

from __future__ import annotations

import argparse
import dataclasses
import os
import sys
from pathlib import Path

from .scenarios import (
    BUILTIN_DESCRIPTIONS,
    ScenarioConfig,
    builtin_scenarios,
    run_monte_carlo,
    run_scenario,
)


def _load_config(spec: str) -> ScenarioConfig:
    catalog = builtin_scenarios()
    if spec in catalog:
        return catalog[spec]
    path = Path(spec)
    if path.exists():
        return ScenarioConfig.from_yaml(path)
    raise SystemExit(f"unknown scenario {spec!r} (not a built-in name or a file); try 'list'")


def _apply_overrides(config: ScenarioConfig, args) -> ScenarioConfig:
    updates = {}
    if args.seed is not None:
        updates["seed"] = args.seed
        if config.noise is not None:
            updates["noise"] = dataclasses.replace(config.noise, seed=args.seed)
    if args.dt is not None:
        updates["dt"] = args.dt
    if args.grid_points is not None:
        updates["grid_points"] = args.grid_points
    return dataclasses.replace(config, **updates) if updates else config


def _out_dir(args, config: ScenarioConfig) -> Path:
    base = args.out or os.environ.get("PULSEPREP_OUT") or "results"
    return Path(base) / config.name


def _print_checks(checks: list[dict]) -> bool:
    all_ok = True
    for ch in checks:
        tag = "PASS" if ch["passed"] else "FAIL"
        lo = "-inf" if ch["low"] is None else f"{ch['low']:g}"
        hi = "+inf" if ch["high"] is None else f"{ch['high']:g}"
        val = "n/a" if ch["value"] is None else f"{ch['value']:.6g}"
        print(f"  [{tag}] {ch['name']}: {val} in [{lo}, {hi}]")
        all_ok = all_ok and ch["passed"]
    return all_ok


def _report(summary: dict, out_dir: Path) -> None:
    print(f"scenario {summary['scenario']}: wrote {out_dir}")
    print(f"  peak fidelity {summary['peak_fidelity']:.6f} at t={summary['peak_time']:.3f}")
    print(f"  fidelity at arrival {summary['fidelity_at_arrival']:.6f}")
    if summary.get("concurrence_at_arrival") is not None:
        print(f"  concurrence at arrival {summary['concurrence_at_arrival']:.6f}")
    if summary.get("balance") is not None:
        print(f"  excitation balance {summary['balance']:.6f}")
    mc = summary.get("monte_carlo")
    if mc is not None:
        print(
            f"  disorder trials {mc['trials']}: mean peak fidelity "
            f"{mc['mean_peak_fidelity']:.6f} (std {mc['std_peak_fidelity']:.6f})"
        )


def _cmd_list(_args) -> int:
    for name in builtin_scenarios():
        print(f"{name:28s} {BUILTIN_DESCRIPTIONS.get(name, '')}")
    return 0


def _cmd_run(args) -> int:
    config = _apply_overrides(_load_config(args.scenario), args)
    out_dir = _out_dir(args, config)
    result = run_scenario(config, out_dir=out_dir)
    _report(result.summary, out_dir)
    if not args.no_plots:
        from .plots import emit_plots

        for p in emit_plots(out_dir):
            print(f"  figure {p}")
    if args.check:
        ok = _print_checks(result.summary["checks"])
        return 0 if ok else 1
    return 0


def _cmd_mc(args) -> int:
    config = _apply_overrides(_load_config(args.scenario), args)
    if config.noise is None:
        raise SystemExit(f"scenario {config.name!r} has no noise block; use 'run' instead")
    out_dir = _out_dir(args, config)
    result = run_monte_carlo(config, out_dir=out_dir, jobs=args.jobs)
    _report(result.summary, out_dir)
    if not args.no_plots:
        from .plots import emit_plots

        for p in emit_plots(out_dir):
            print(f"  figure {p}")
    if args.check:
        checks = result.summary["checks"] + result.summary["monte_carlo"]["checks"]
        ok = _print_checks(checks)
        return 0 if ok else 1
    return 0


def _cmd_plot(args) -> int:
    from .plots import emit_plots

    for p in emit_plots(Path(args.dir)):
        print(f"figure {p}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pulseprep",
        description="design shaped photon pulses that steer emitter chains into target states",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("list", help="show built-in scenarios").set_defaults(fn=_cmd_list)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("scenario", help="built-in scenario name or a YAML config path")
    common.add_argument("--out", help="output base directory (default $PULSEPREP_OUT or results)")
    common.add_argument("--seed", type=int, help="override the scenario (and noise) seed")
    common.add_argument("--dt", type=float, help="override the integrator step")
    common.add_argument("--grid-points", type=int, help="override the spectral grid size")
    common.add_argument("--check", action="store_true", help="verify expected-value bands; nonzero exit on failure")
    common.add_argument("--no-plots", action="store_true", help="skip figure rendering")

    run_p = sub.add_parser("run", parents=[common], help="run one scenario")
    run_p.set_defaults(fn=_cmd_run)

    mc_p = sub.add_parser("mc", parents=[common], help="run a scenario with disorder trials")
    mc_p.add_argument("--jobs", type=int, default=1, help="parallel trial workers")
    mc_p.set_defaults(fn=_cmd_mc)

    plot_p = sub.add_parser("plot", help="re-render figures for a result directory")
    plot_p.add_argument("dir", help="result directory holding the CSV/JSON files")
    plot_p.set_defaults(fn=_cmd_plot)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
