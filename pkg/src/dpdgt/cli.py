"""Command-line front end.

Subcommands: run, sweep, compare, privacy, solve. Configuration comes from
a JSON file (--config); without one the built-in IEEE 14-bus benchmark
configuration is used. --seed, --iters, --out, and --audit override the
corresponding config fields.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import replace

from .config import default_config, parse_config
from .harness import (
    compare,
    privacy_report,
    run_once,
    solve_report,
    sweep,
    write_compare_outputs,
    write_run_csv,
    write_run_summary,
    write_sweep_outputs,
)
from .config import build_problem


def _load_config(args) -> "RunConfig":
    if args.config is None:
        cfg = default_config()
    else:
        with open(args.config) as fh:
            cfg = parse_config(fh.read())
    run_sec = cfg.run
    if args.seed is not None:
        run_sec = replace(run_sec, seed=args.seed)
    if args.iters is not None:
        run_sec = replace(run_sec, n_iters=args.iters)
    if args.out is not None:
        run_sec = replace(run_sec, out_dir=args.out)
    if args.audit:
        run_sec = replace(run_sec, audit=True)
    if run_sec.n_iters < 1:
        raise ValueError("config field 'run.n_iters': must be >= 1")
    return replace(cfg, run=run_sec)


def _cmd_run(args) -> int:
    cfg = _load_config(args)
    trace = run_once(cfg)
    problem = build_problem(cfg)
    generators = [i + 1 for i, (c, _) in enumerate(problem.agents) if c.lo < c.hi]
    csv_path = write_run_csv(trace, os.path.join(cfg.run.out_dir, "run.csv"), generators)
    summary_path = write_run_summary(cfg, trace, os.path.join(cfg.run.out_dir, "run_summary.json"))
    print(f"wrote {csv_path}")
    print(f"wrote {summary_path}")
    return 0


def _cmd_sweep(args) -> int:
    cfg = _load_config(args)
    result = sweep(cfg)
    csv_path, json_path = write_sweep_outputs(result, cfg.run.out_dir)
    for v, m, e in zip(result.grid, result.mean_err, result.epsilon):
        print(f"{result.parameter}={v:g}: mean terminal err_sq={m:.6g}, epsilon={e:g}")
    print(f"wrote {csv_path}")
    print(f"wrote {json_path}")
    return 0


def _cmd_compare(args) -> int:
    cfg = _load_config(args)
    result = compare(cfg)
    csv_path, json_path = write_compare_outputs(result, cfg.run.out_dir)
    print(f"mean terminal err_sq: dpdgt={result.mean_dpdgt:.6g} ddgt={result.mean_ddgt:.6g}")
    print(f"paired one-sided t={result.t_stat:.3f}, "
          f"significant at {result.confidence:.0%}: {result.significant}")
    print(f"wrote {csv_path}")
    print(f"wrote {json_path}")
    return 0


def _cmd_privacy(args) -> int:
    cfg = _load_config(args)
    report = privacy_report(cfg)
    os.makedirs(cfg.run.out_dir, exist_ok=True)
    path = os.path.join(cfg.run.out_dir, "privacy_report.json")
    with open(path, "w") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(json.dumps(report, indent=2, sort_keys=True))
    print(f"wrote {path}")
    return 0


def _cmd_solve(args) -> int:
    cfg = _load_config(args)
    report = solve_report(cfg)
    print(json.dumps(report, indent=2, sort_keys=True))
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="dpdgt",
        description="Differentially private dual gradient tracking for distributed resource allocation",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    handlers = {
        "run": ("execute one run and emit metrics CSV + summary JSON", _cmd_run),
        "sweep": ("Monte-Carlo sweep of a schedule parameter", _cmd_sweep),
        "compare": ("paired comparison against the conventional baseline", _cmd_compare),
        "privacy": ("emit the privacy budget report", _cmd_privacy),
        "solve": ("centralized reference optimum only", _cmd_solve),
    }
    for name, (help_text, _) in handlers.items():
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", default=None, help="JSON config file (default: built-in ieee14)")
        p.add_argument("--seed", type=int, default=None, help="override run.seed")
        p.add_argument("--iters", type=int, default=None, help="override run.n_iters")
        p.add_argument("--out", default=None, help="override run.out_dir")
        p.add_argument("--audit", action="store_true", help="retain observables in records")
    args = parser.parse_args(argv)
    try:
        return handlers[args.command][1](args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
