"""Command line entry point: ``bayesrs run | report | trace``."""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import yaml

from .procedure import RunConfig, run
from .study import StudyConfig, parse_csv, report, reps_csv, run_study, StudyResult, build_instance
from .testbed import crn_observe


def _load_config(path: str | None, scale: str, seed: int | None) -> StudyConfig:
    data = {}
    if path:
        data = yaml.safe_load(Path(path).read_text()) or {}
    if seed is not None:
        data["seed"] = seed
    return StudyConfig.from_mapping(data, scale=scale)


def cmd_run(args) -> int:
    cfg = _load_config(args.config, args.scale, args.seed)
    result = run_study(cfg, parallel=args.parallel)
    text = report(result, "csv")
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    if args.reps_out:
        Path(args.reps_out).write_text(reps_csv(result))
    return 0


def cmd_report(args) -> int:
    text = Path(args.inp).read_text() if args.inp != "-" else sys.stdin.read()
    cells = parse_csv(text)
    sys.stdout.write(report(StudyResult(cells, []), args.format))
    return 0


def cmd_trace(args) -> int:
    cfg = StudyConfig(L=args.L, rs_cases=[args.scheme], mu_cases=[args.mu],
                      sigma_cases=[args.sigma], crn_cases=[args.crn],
                      strategies=[args.strategy], M_cov=1, M_mu=1, M=1,
                      cap=args.cap, seed=args.seed)
    inst = build_instance(cfg, args.scheme, args.mu, args.sigma, 0, 0)
    rc: RunConfig = cfg.run_config(args.scheme, args.crn, args.strategy)
    res = run(rc, crn_observe(inst, args.seed))
    sys.stdout.write(res.format_trace(rc, verbose=args.verbose))
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="bayesrs", description="Sequential Bayesian ranking and selection under CRN")
    p.add_argument("-v", "--log-level", default="WARNING")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run a study grid and write aggregate CSV")
    r.add_argument("--config", help="YAML file with StudyConfig fields")
    r.add_argument("--out", help="aggregate CSV path (default: stdout)")
    r.add_argument("--reps-out", help="optional per-replication CSV path")
    r.add_argument("--seed", type=int, help="base seed (overrides config)")
    r.add_argument("--parallel", type=int, default=1)
    r.add_argument("--scale", choices=("desk", "paper"), default="desk",
                   help="desk defaults or the full reference-scale grid")
    r.set_defaults(func=cmd_run)

    rep = sub.add_parser("report", help="render an aggregate CSV")
    rep.add_argument("--in", dest="inp", required=True, help="CSV path or - for stdin")
    rep.add_argument("--format", choices=("csv", "summary"), default="summary")
    rep.set_defaults(func=cmd_report)

    t = sub.add_parser("trace", help="run one replication and print its trace")
    t.add_argument("--L", type=int, default=10)
    t.add_argument("--scheme", default="best1")
    t.add_argument("--mu", default="ufc")
    t.add_argument("--sigma", default="cor:0.5")
    t.add_argument("--crn", default="isCRN", choices=("isCRN", "noCRN"))
    t.add_argument("--strategy", default="dpw_plus")
    t.add_argument("--cap", type=int, default=60_000)
    t.add_argument("--seed", type=int, default=0)
    t.add_argument("--verbose", action="store_true", help="include allocation weights")
    t.set_defaults(func=cmd_trace)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=args.log_level.upper())
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
