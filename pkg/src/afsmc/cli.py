"""Command-line front end.

Exit codes: 0 ok, 1 verification failure, 2 configuration error,
3 simulation diverged (or hit a singular inertia matrix), 4 I/O failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import artifacts, dynamics, fuzzy, scenario, sim, verify

log = logging.getLogger("afsmc")

EXIT_OK, EXIT_VERIFY, EXIT_CONFIG, EXIT_DIVERGED, EXIT_IO = 0, 1, 2, 3, 4


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _flag_overrides(args) -> list[str]:
    ov = list(args.override or [])
    if getattr(args, "dt", None) is not None:
        ov.append(f"sim.dt={args.dt!r}")
    if getattr(args, "duration", None) is not None:
        ov.append(f"sim.duration={args.duration!r}")
    if getattr(args, "controller", None):
        ov.append(f'controller.type="{args.controller}"')
    if getattr(args, "strict_paper", False):
        ov.append("controller.strict_paper=true")
    if getattr(args, "seed", None) is not None:
        ov.append(f"disturbance.seed={args.seed}")
    return ov


def _load(source, overrides) -> sim.SimConfig:
    try:
        return scenario.load_scenario(source, overrides)
    except scenario.ScenarioError as exc:
        raise CliError(f"config error: {exc}", EXIT_CONFIG) from exc
    except FileNotFoundError as exc:
        raise CliError(f"config error: cannot read scenario {source!r}", EXIT_CONFIG) from exc


def _outdir(path) -> Path:
    out = Path(path)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise CliError(f"I/O error: {exc}", EXIT_IO) from exc
    return out


def _run(cfg: sim.SimConfig, side: str = "") -> sim.SimTrace:
    label = f" (side {side})" if side else ""
    try:
        return sim.run(cfg)
    except (sim.Diverged, dynamics.SingularInertia) as exc:
        raise CliError(f"simulation diverged{label}: {exc}", EXIT_DIVERGED) from exc


def cmd_simulate(source, outdir, overrides=()) -> artifacts.RunArtifacts:
    cfg = _load(source, overrides)
    out = _outdir(outdir)
    trace = _run(cfg)
    metrics = sim.compute_metrics(trace)
    try:
        echo = out / "config.toml"
        echo.write_text(scenario.dumps(cfg))
        res = artifacts.RunArtifacts(
            trace_csv=artifacts.write_trace_csv(trace, out / "trace.csv"),
            metrics_csv=artifacts.write_metrics_csv(metrics, out / "metrics.csv"),
            config_echo=echo,
            plots=artifacts.write_plots(trace, out),
        )
    except OSError as exc:
        raise CliError(f"I/O error: {exc}", EXIT_IO) from exc
    log.info("wrote %s (config %s, %.2fs)", res.trace_csv, trace.config_hash, trace.wall_time)
    return res


def cmd_compare(source_a, source_b, outdir, overrides=()) -> sim.Comparison:
    cfg_a, cfg_b = _load(source_a, overrides), _load(source_b, overrides)
    out = _outdir(outdir)
    metrics = []
    for side, cfg in (("A", cfg_a), ("B", cfg_b)):
        metrics.append(sim.compute_metrics(_run(cfg, side)))
    report = sim.comparison_from_metrics(*metrics)
    try:
        artifacts.write_comparison(report, out, Path(str(source_a)).stem, Path(str(source_b)).stem)
    except OSError as exc:
        raise CliError(f"I/O error: {exc}", EXIT_IO) from exc
    return report


def cmd_fuzzy_eval(source, resolution: int, outdir, overrides=()) -> Path:
    cfg = _load(source, overrides)
    if resolution < 2:
        raise CliError("config error: resolution must be at least 2", EXIT_CONFIG)
    out = _outdir(outdir)
    fc = cfg.fuzzy[0]
    ee = np.linspace(-fc.e_partition.half_width, fc.e_partition.half_width, resolution)
    ed = np.linspace(-fc.edot_partition.half_width, fc.edot_partition.half_width, resolution)
    rows = np.array([(x, y, fuzzy.infer_lambda(fc, x, y)) for x in ee for y in ed])
    path = out / "fuzzy_surface.csv"
    try:
        np.savetxt(path, rows, delimiter=",", fmt="%.17g", header="e,edot,lambda", comments="")
    except OSError as exc:
        raise CliError(f"I/O error: {exc}", EXIT_IO) from exc
    return path


def cmd_verify(outdir) -> list[verify.CheckResult]:
    out = _outdir(outdir)
    results = verify.run_checks()
    try:
        (out / "verify.json").write_text(json.dumps(verify.as_dicts(results), indent=2) + "\n")
    except OSError as exc:
        raise CliError(f"I/O error: {exc}", EXIT_IO) from exc
    return results


def _common(p: argparse.ArgumentParser, config: bool = True):
    if config:
        p.add_argument("--config", default="constant_setpoint", help="scenario path or shipped scenario name")
    p.add_argument("--out", default="out", help="output directory")
    p.add_argument("--override", action="append", metavar="SECTION.KEY=VALUE", help="repeatable")
    p.add_argument("--dt", type=float)
    p.add_argument("--duration", type=float)
    p.add_argument("--controller", choices=["smc", "afsmc", "pd"])
    p.add_argument("--strict-paper", action="store_true")
    p.add_argument("--seed", type=int)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="afsmc", description="Adaptive fuzzy sliding mode control laboratory")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    _common(sub.add_parser("simulate", help="run one scenario and write trace, metrics and plots"))

    p = sub.add_parser("compare", help="run two scenarios and tabulate metric ratios")
    p.add_argument("scenario_a")
    p.add_argument("scenario_b")
    _common(p, config=False)

    p = sub.add_parser("fuzzy-eval", help="dump the joint-1 lambda surface as CSV")
    _common(p)
    p.add_argument("--resolution", type=int, default=101)

    p = sub.add_parser("verify", help="run the invariant checks")
    p.add_argument("--out", default="out")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        if args.command == "simulate":
            res = cmd_simulate(args.config, args.out, _flag_overrides(args))
            print(f"trace: {res.trace_csv}")
            print(res.metrics_csv.read_text(), end="")
        elif args.command == "compare":
            report = cmd_compare(args.scenario_a, args.scenario_b, args.out, _flag_overrides(args))
            print((Path(args.out) / "comparison.txt").read_text(), end="")
            print(f"total ISE ratio A/B: {report.total_ise_ratio:.6g}")
        elif args.command == "fuzzy-eval":
            print(cmd_fuzzy_eval(args.config, args.resolution, args.out, _flag_overrides(args)))
        elif args.command == "verify":
            results = cmd_verify(args.out)
            for r in results:
                print(f"{r.status.upper():4s} {r.name}: {r.detail}")
            return EXIT_OK if all(r.ok for r in results) else EXIT_VERIFY
    except CliError as exc:
        print(f"afsmc: {exc}", file=sys.stderr)
        return exc.code
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
