"""Experiment harness: single runs, Monte-Carlo sweeps, paired comparisons,
and privacy reports, with CSV/JSON emission.

All floating-point output is written with 17 significant digits so that a
rerun with the same config and seed reproduces every file byte for byte.
Replicate seeds are derived from the root seed by stable spawn keys, so
statistics are reproducible and independent of evaluation order; results
are merged in (grid point, replicate) order.
"""
from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, replace

import numpy as np
from scipy import stats

from .config import (
    RunConfig,
    build_graph,
    build_problem,
    build_schedules,
    serialize_config,
)
from .graph import spectral_analysis
from .privacy import d_eta_bound, epsilon_budget, epsilon_closed_form
from .problem import centralized_solve, primal_cost
from .schedules import check_conditions
from .solver import RunTrace, run

__all__ = [
    "SweepResult",
    "CompareResult",
    "run_once",
    "write_run_csv",
    "write_run_summary",
    "sweep",
    "write_sweep_outputs",
    "compare",
    "write_compare_outputs",
    "privacy_report",
    "solve_report",
    "replicate_seed",
    "paired_one_sided",
]


def _fmt(x) -> str:
    """17-significant-digit float formatting for replay-exact emission."""
    return format(float(x), ".17g")


def replicate_seed(root_seed: int, *key: int) -> int:
    """Deterministic child seed for a replicate, stable across run order."""
    ss = np.random.SeedSequence(entropy=int(root_seed), spawn_key=tuple(int(k) for k in key))
    return int(ss.generate_state(1, np.uint64)[0])


@dataclass(frozen=True)
class SweepResult:
    """Per-grid-point statistics of the terminal squared error."""

    parameter: str
    grid: tuple
    mean_err: np.ndarray  # (P,)
    stderr: np.ndarray  # (P,)
    errors: np.ndarray  # (P, n_seeds) terminal squared errors per replicate
    epsilon: tuple  # closed-form budget per point, inf/nan when not applicable
    inv_theta0: tuple  # 1/theta0 trend proxy (theta0 sweeps), else nan
    seeds: tuple
    n_iters: int


@dataclass(frozen=True)
class CompareResult:
    """Paired terminal errors of the private and conventional iterations."""

    err_dpdgt: np.ndarray  # (n_seeds,)
    err_ddgt: np.ndarray
    mean_dpdgt: float
    mean_ddgt: float
    mean_diff: float  # dpdgt - ddgt, negative favors the private iteration
    t_stat: float
    significant: bool  # one-sided at the requested confidence
    confidence: float
    seeds: tuple
    curves: dict  # iteration-indexed error curves for the first replicate
    n_iters: int


def run_once(cfg: RunConfig, *, seed: int | None = None, n_iters: int | None = None,
             audit: bool | None = None, with_metrics: bool = True,
             keep_records: bool | None = None) -> RunTrace:
    """Execute the configured algorithm once and echo the config into the trace."""
    problem = build_problem(cfg)
    graph = build_graph(cfg)
    schedules = build_schedules(cfg)
    the_seed = cfg.run.seed if seed is None else int(seed)
    iters = cfg.run.n_iters if n_iters is None else int(n_iters)
    aud = cfg.run.audit if audit is None else bool(audit)
    echo = json.loads(serialize_config(cfg))
    echo["run"]["seed"] = the_seed
    echo["run"]["n_iters"] = iters
    return run(
        problem, graph, schedules, iters, the_seed,
        algorithm=cfg.run.algorithm, iota=cfg.run.iota, audit=aud,
        keep_records=aud if keep_records is None else keep_records,
        with_metrics=with_metrics, config_echo=echo,
    )


def write_run_csv(trace: RunTrace, path: str, generator_agents=None) -> str:
    """Metrics CSV with one row per iteration and the config echo as comments.

    Columns: iter, err_sq, supply, demand, consensus, dual_value, then one
    alloc_<agent> column per agent in ``generator_agents`` (1-based labels;
    all agents when omitted).
    """
    if trace.metrics is None:
        raise ValueError("trace was produced without metrics; rerun with with_metrics=True")
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    m = trace.metrics
    if generator_agents is None:
        gen_cols = list(range(m.alloc.shape[1]))
    else:
        gen_cols = [int(g) - 1 for g in generator_agents]
    header = "iter,err_sq,supply,demand,consensus,dual_value," + ",".join(
        f"alloc_{i + 1}" for i in gen_cols
    )
    lines = ["# config: " + json.dumps(trace.config_echo, sort_keys=True), header]
    demand = _fmt(trace.total_demand)
    for k in range(trace.n_iters):
        row = [
            str(k), _fmt(m.err_sq[k]), _fmt(m.supply[k]), demand,
            _fmt(m.consensus[k]), _fmt(m.dual_value[k]),
        ]
        row += [_fmt(m.alloc[k, i]) for i in gen_cols]
        lines.append(",".join(row))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
    return path


def write_run_summary(cfg: RunConfig, trace: RunTrace, path: str) -> str:
    """Terminal-state summary JSON, with a budget report when schedules qualify."""
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    w_final = trace.final.w
    err = float(np.linalg.norm(w_final - trace.w_star))
    supply = float(w_final.sum())
    summary = {
        "algorithm": trace.algorithm,
        "seed": trace.seed,
        "n_iters": trace.n_iters,
        "terminal_err": err,
        "terminal_err_sq": err**2,
        "terminal_rel_err": err / float(np.linalg.norm(trace.w_star)),
        "terminal_supply": supply,
        "total_demand": trace.total_demand,
        "supply_demand_gap": supply - trace.total_demand,
        "w_star": [float(x) for x in trace.w_star[:, 0]],
        "nu": trace.nu,
        "privacy": _privacy_block(cfg),
    }
    with open(path, "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def _privacy_block(cfg: RunConfig) -> dict:
    problem = build_problem(cfg)
    graph = build_graph(cfg)
    schedules = build_schedules(cfg)
    spec = spectral_analysis(graph, schedules.gamma, schedules.phi)
    verdict = check_conditions(schedules, problem.mu, spec.q_c_estimate)
    delta = cfg.privacy.delta
    block = {
        "delta": delta,
        "mu": problem.mu,
        "q_c_estimate": spec.q_c_estimate,
        "conditions": verdict.as_dict(),
    }
    report = epsilon_budget(schedules, problem.mu, delta, d_eta_mode="numeric",
                            k_max=cfg.privacy.k_max)
    block["numeric"] = report.as_dict()
    if verdict.closed_form_ok:
        s = cfg.schedules
        block["epsilon_closed_form"] = epsilon_closed_form(
            s.alpha0, s.q, s.theta_xi0, s.q_xi, s.theta_zeta0, s.q_zeta,
            s.gamma, s.phi, problem.mu, delta,
        )
        block["d_eta_closed_form"] = d_eta_bound(schedules, problem.mu, delta,
                                                 mode="closed_form")
    return block


def privacy_report(cfg: RunConfig) -> dict:
    """Full budget report: inputs, condition verdicts, and both evaluations."""
    return _privacy_block(cfg)


def solve_report(cfg: RunConfig) -> dict:
    """Centralized reference optimum for the configured problem."""
    problem = build_problem(cfg)
    w_star, nu = centralized_solve(problem)
    return {
        "w_star": [float(x) for x in w_star[:, 0]],
        "nu": nu,
        "total_cost": primal_cost(problem, w_star),
        "total_demand": problem.total_demand,
        "supply": float(w_star.sum()),
    }


def _sweep_config(cfg: RunConfig, parameter: str, value: float) -> RunConfig:
    s = cfg.schedules
    if parameter == "theta0":
        s = replace(s, theta_xi0=value, theta_zeta0=value)
    elif parameter == "alpha0":
        s = replace(s, alpha0=value)
    elif parameter == "q":
        s = replace(s, q=value)
    else:
        raise ValueError(f"unknown sweep parameter {parameter!r}")
    return replace(cfg, schedules=s)


def _terminal_err_sq(cfg: RunConfig, seed: int, n_iters: int) -> float:
    trace = run_once(cfg, seed=seed, n_iters=n_iters, with_metrics=False,
                     keep_records=False, audit=False)
    return float(((trace.final.w - trace.w_star) ** 2).sum())


def sweep(cfg: RunConfig, parameter: str | None = None, grid=None,
          n_seeds: int | None = None, n_iters: int | None = None) -> SweepResult:
    """Monte-Carlo sweep of one schedule parameter.

    Noise sweeps couple both channels (theta_xi0 = theta_zeta0 = theta0).
    Every grid point reuses the same replicate seeds, so adjacent points
    are paired through common random numbers. A zero noise scale makes all
    replicates identical, in which case one run is evaluated and shared.
    """
    parameter = cfg.sweep.parameter if parameter is None else parameter
    grid = tuple(cfg.sweep.grid if grid is None else grid)
    if not grid:
        raise ValueError("sweep grid must be nonempty")
    n_seeds = (cfg.sweep.n_seeds or cfg.run.n_seeds) if n_seeds is None else int(n_seeds)
    n_iters = cfg.run.n_iters if n_iters is None else int(n_iters)

    seeds = tuple(replicate_seed(cfg.run.seed, r) for r in range(n_seeds))
    errors = np.empty((len(grid), n_seeds))
    eps = []
    inv_theta = []
    for p_idx, value in enumerate(grid):
        point_cfg = _sweep_config(cfg, parameter, float(value))
        noiseless = (
            point_cfg.schedules.theta_xi0 == 0.0 and point_cfg.schedules.theta_zeta0 == 0.0
        )
        if noiseless:
            errors[p_idx, :] = _terminal_err_sq(point_cfg, seeds[0], n_iters)
        else:
            for r, seed in enumerate(seeds):
                errors[p_idx, r] = _terminal_err_sq(point_cfg, seed, n_iters)
        eps.append(_closed_form_or_inf(point_cfg))
        if parameter == "theta0":
            inv_theta.append(math.inf if value == 0 else 1.0 / float(value))
        else:
            inv_theta.append(math.nan)

    mean = errors.mean(axis=1)
    stderr = errors.std(axis=1, ddof=1) / math.sqrt(n_seeds) if n_seeds > 1 else np.zeros(len(grid))
    return SweepResult(
        parameter=parameter, grid=grid, mean_err=mean, stderr=stderr, errors=errors,
        epsilon=tuple(eps), inv_theta0=tuple(inv_theta), seeds=seeds, n_iters=n_iters,
    )


def _closed_form_or_inf(cfg: RunConfig) -> float:
    s = cfg.schedules
    problem = build_problem(cfg)
    try:
        return epsilon_closed_form(
            s.alpha0, s.q, s.theta_xi0, s.q_xi, s.theta_zeta0, s.q_zeta,
            s.gamma, s.phi, problem.mu, cfg.privacy.delta,
        )
    except ValueError:
        return math.inf


def paired_one_sided(higher: np.ndarray, lower: np.ndarray, confidence: float = 0.95):
    """One-sided paired test that mean(higher) > mean(lower).

    Returns (t_stat, significant). Uses the t critical value at the given
    confidence with n-1 degrees of freedom on the paired differences.
    """
    diff = np.asarray(higher, dtype=float) - np.asarray(lower, dtype=float)
    n = diff.size
    sd = diff.std(ddof=1)
    if sd == 0:
        return math.inf if diff.mean() > 0 else 0.0, bool(diff.mean() > 0)
    t_stat = float(diff.mean() / (sd / math.sqrt(n)))
    t_crit = float(stats.t.ppf(confidence, n - 1))
    return t_stat, bool(t_stat > t_crit)


def write_sweep_outputs(result: SweepResult, out_dir: str, stem: str = "sweep") -> tuple:
    """CSV (one row per grid point) and JSON with full per-replicate errors."""
    os.makedirs(out_dir, exist_ok=True)
    csv_path = os.path.join(out_dir, f"{stem}.csv")
    lines = [f"{result.parameter},mean_err_sq,stderr,epsilon_closed_form,inv_theta0,n_seeds"]
    for i, v in enumerate(result.grid):
        lines.append(",".join([
            _fmt(v), _fmt(result.mean_err[i]), _fmt(result.stderr[i]),
            _fmt(result.epsilon[i]), _fmt(result.inv_theta0[i]), str(len(result.seeds)),
        ]))
    with open(csv_path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
    json_path = os.path.join(out_dir, f"{stem}.json")
    payload = {
        "parameter": result.parameter,
        "grid": list(result.grid),
        "mean_err_sq": [float(x) for x in result.mean_err],
        "stderr": [float(x) for x in result.stderr],
        "epsilon_closed_form": list(result.epsilon),
        "inv_theta0": list(result.inv_theta0),
        "n_iters": result.n_iters,
        "seeds": list(result.seeds),
        "errors": [[float(x) for x in row] for row in result.errors],
    }
    with open(json_path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return csv_path, json_path


def compare(cfg: RunConfig, n_seeds: int | None = None, n_iters: int | None = None,
            confidence: float = 0.95) -> CompareResult:
    """Private vs conventional iteration under identical noise realizations.

    Both algorithms consume the same per-(agent, iteration, channel) noise
    streams for each replicate seed, so the comparison is paired draw for
    draw. The conventional gain splits the shared step envelope as
    beta_k = alpha_k / iota.
    """
    n_seeds = cfg.run.n_seeds if n_seeds is None else int(n_seeds)
    n_iters = cfg.run.n_iters if n_iters is None else int(n_iters)
    seeds = tuple(replicate_seed(cfg.run.seed, r) for r in range(n_seeds))

    problem = build_problem(cfg)
    graph = build_graph(cfg)
    schedules = build_schedules(cfg)
    err_a = np.empty(n_seeds)
    err_b = np.empty(n_seeds)
    curves = {}
    for r, seed in enumerate(seeds):
        want_curve = r == 0
        tr_a = run(problem, graph, schedules, n_iters, seed, algorithm="dpdgt",
                   iota=cfg.run.iota, with_metrics=want_curve, keep_records=False)
        tr_b = run(problem, graph, schedules, n_iters, seed, algorithm="ddgt",
                   iota=cfg.run.iota, with_metrics=want_curve, keep_records=False)
        err_a[r] = float(((tr_a.final.w - tr_a.w_star) ** 2).sum())
        err_b[r] = float(((tr_b.final.w - tr_b.w_star) ** 2).sum())
        if want_curve:
            curves = {
                "iter": list(range(n_iters)),
                "err_sq_dpdgt": [float(x) for x in tr_a.metrics.err_sq],
                "err_sq_ddgt": [float(x) for x in tr_b.metrics.err_sq],
            }

    t_stat, significant = paired_one_sided(err_b, err_a, confidence)
    return CompareResult(
        err_dpdgt=err_a, err_ddgt=err_b,
        mean_dpdgt=float(err_a.mean()), mean_ddgt=float(err_b.mean()),
        mean_diff=float((err_a - err_b).mean()), t_stat=t_stat,
        significant=significant, confidence=confidence, seeds=seeds,
        curves=curves, n_iters=n_iters,
    )


def write_compare_outputs(result: CompareResult, out_dir: str, stem: str = "compare") -> tuple:
    """Paired error-curve CSV for the first replicate plus a summary JSON."""
    os.makedirs(out_dir, exist_ok=True)
    csv_path = os.path.join(out_dir, f"{stem}.csv")
    lines = ["iter,err_sq_dpdgt,err_sq_ddgt"]
    for k, (ea, eb) in enumerate(zip(result.curves["err_sq_dpdgt"],
                                     result.curves["err_sq_ddgt"])):
        lines.append(f"{k},{_fmt(ea)},{_fmt(eb)}")
    with open(csv_path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
    json_path = os.path.join(out_dir, f"{stem}.json")
    payload = {
        "mean_err_sq_dpdgt": result.mean_dpdgt,
        "mean_err_sq_ddgt": result.mean_ddgt,
        "mean_diff": result.mean_diff,
        "t_stat": result.t_stat,
        "significant": result.significant,
        "confidence": result.confidence,
        "n_seeds": len(result.seeds),
        "n_iters": result.n_iters,
        "err_sq_dpdgt": [float(x) for x in result.err_dpdgt],
        "err_sq_ddgt": [float(x) for x in result.err_ddgt],
    }
    with open(json_path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return csv_path, json_path
