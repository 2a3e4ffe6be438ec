"""Noisy dual gradient-tracking solvers over directed graphs.

Two iterations are implemented. The private one (``dpdgt``) shares a
cumulative deviation tracker s and feeds its increment into the dual-drive
update, which keeps per-step message noise from accumulating in the
tracked supply-demand mismatch:

    s_{k+1}  = (1-gamma) s_k + gamma C (s_k + xi_k) - alpha_k (w_k - d)
    tw_{k+1} = (1-phi) tw_k + phi R (tw_k + zeta_k) + (s_{k+1} - s_k)
    w_{k+1}  = argmin_w { F(w) - tw_{k+1} w }   (per agent, over its box)

The conventional baseline (``ddgt``) shares the per-step deviation z
directly, so transmitted noise piles up in the tracker:

    tw_{k+1} = R (tw_k + zeta_k) + beta_k z_k
    w_{k+1}  = argmin as above
    z_{k+1}  = C (z_k + xi_k) - iota (w_{k+1} - w_k)

One noise value is drawn per agent per channel per iteration and reused by
every recipient of that agent's message; draws are pure functions of
(seed, agent, iteration, channel), so paired executions see identical
noise by construction.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import CommGraph, perron_vectors
from .problem import AllocationProblem, AdjacencyPerturbation, centralized_solve, dual_value, make_adjacent
from .schedules import CHANNEL_XI, CHANNEL_ZETA, NoiseStreams, ScheduleSet

__all__ = [
    "SolverState",
    "BaselineState",
    "IterationRecord",
    "TraceMetrics",
    "RunTrace",
    "CoupledResult",
    "dpdgt_step",
    "ddgt_baseline_step",
    "run",
    "coupled_adjacent_run",
]

RECORD_THIN_AFTER = 10_000  # full records up to here, then every 10th


@dataclass
class SolverState:
    """Per-agent (s, tilde_w, w) matrices for the private iteration."""

    s: np.ndarray
    tilde_w: np.ndarray
    w: np.ndarray
    k: int = 0


@dataclass
class BaselineState:
    """Per-agent (z, tilde_w, w) matrices for the conventional iteration."""

    z: np.ndarray
    tilde_w: np.ndarray
    w: np.ndarray
    k: int = 0


@dataclass
class IterationRecord:
    """Snapshot taken at iteration k, before the state advances to k+1.

    ``s`` holds the deviation tracker (the z variable for the baseline).
    Observables are the transmitted messages state + noise; they are
    retained only when auditing is enabled.
    """

    k: int
    s: np.ndarray
    tilde_w: np.ndarray
    w: np.ndarray
    xi: np.ndarray
    zeta: np.ndarray
    obs_s: np.ndarray | None = None
    obs_tilde_w: np.ndarray | None = None
    err_sq: float | None = None
    supply: float | None = None
    consensus: float | None = None
    dual_value: float | None = None


@dataclass
class TraceMetrics:
    """Per-iteration scalar metrics, one entry per iteration 0..K-1."""

    err_sq: np.ndarray
    supply: np.ndarray
    consensus: np.ndarray
    dual_value: np.ndarray
    alloc: np.ndarray  # (K, n) allocations, first coordinate when m > 1


@dataclass
class RunTrace:
    """Everything a run produced; replayable from the echoed config and seed."""

    algorithm: str
    seed: int
    n_iters: int
    config_echo: dict
    metrics: TraceMetrics | None
    records: list
    final: object
    w_star: np.ndarray
    nu: float
    total_demand: float


@dataclass
class CoupledResult:
    """Deviation sequences between two adjacent executions under shared messages."""

    ds_l1: np.ndarray  # l1 deviation of the perturbed agent's tracker, k = 0..K
    dtw_l1: np.ndarray  # l1 deviation of its dual drive
    dw_l1: np.ndarray  # l1 deviation of its allocation
    max_other_deviation: float  # over all non-perturbed agents and iterations
    final: SolverState
    final_prime: SolverState


def _cost_arrays(problem: AllocationProblem):
    arr = problem.arrays
    return arr["a"], arr["b"], arr["lo"], arr["hi"], arr["d"]


def _argmin_block(tw, a, b, lo, hi):
    return np.clip((tw - b) / (2.0 * a), lo, hi)


def _dpdgt_update(S, TW, W, xi, zeta, alpha_k, gamma, phi, R, C, a, b, lo, hi, d):
    S1 = (1.0 - gamma) * S + gamma * (C @ (S + xi)) - alpha_k * (W - d)
    TW1 = (1.0 - phi) * TW + phi * (R @ (TW + zeta)) + (S1 - S)
    W1 = _argmin_block(TW1, a, b, lo, hi)
    return S1, TW1, W1


def _ddgt_update(Z, TW, W, xi, zeta, beta_k, iota, R, C, a, b, lo, hi):
    TW1 = R @ (TW + zeta) + beta_k * Z
    W1 = _argmin_block(TW1, a, b, lo, hi)
    Z1 = C @ (Z + xi) - iota * (W1 - W)
    return Z1, TW1, W1


def dpdgt_step(
    state: SolverState,
    problem: AllocationProblem,
    graph: CommGraph,
    schedules: ScheduleSet,
    k: int,
    noise: NoiseStreams,
    audit: bool = False,
):
    """One private tracking iteration; returns (next_state, IterationRecord)."""
    n, m = state.s.shape
    if n != problem.n_agents or n != graph.n_agents:
        raise ValueError("state, problem, and graph disagree on the number of agents")
    a, b, lo, hi, d = _cost_arrays(problem)
    xi = noise.laplace_block(float(schedules.theta_xi.value(k)), k, CHANNEL_XI, n, m)
    zeta = noise.laplace_block(float(schedules.theta_zeta.value(k)), k, CHANNEL_ZETA, n, m)
    alpha_k = float(schedules.alpha.value(k))
    S1, TW1, W1 = _dpdgt_update(
        state.s, state.tilde_w, state.w, xi, zeta, alpha_k,
        schedules.gamma, schedules.phi, graph.R, graph.C, a, b, lo, hi, d,
    )
    record = IterationRecord(
        k=k,
        s=state.s.copy(),
        tilde_w=state.tilde_w.copy(),
        w=state.w.copy(),
        xi=xi,
        zeta=zeta,
        obs_s=state.s + xi if audit else None,
        obs_tilde_w=state.tilde_w + zeta if audit else None,
    )
    return SolverState(s=S1, tilde_w=TW1, w=W1, k=k + 1), record


def ddgt_baseline_step(
    state: BaselineState,
    problem: AllocationProblem,
    graph: CommGraph,
    schedules: ScheduleSet,
    k: int,
    beta_k: float,
    iota: float,
    noise: NoiseStreams,
    audit: bool = False,
):
    """One conventional tracking iteration; returns (next_state, IterationRecord)."""
    n, m = state.z.shape
    a, b, lo, hi, d = _cost_arrays(problem)
    xi = noise.laplace_block(float(schedules.theta_xi.value(k)), k, CHANNEL_XI, n, m)
    zeta = noise.laplace_block(float(schedules.theta_zeta.value(k)), k, CHANNEL_ZETA, n, m)
    Z1, TW1, W1 = _ddgt_update(
        state.z, state.tilde_w, state.w, xi, zeta, beta_k, iota,
        graph.R, graph.C, a, b, lo, hi,
    )
    record = IterationRecord(
        k=k,
        s=state.z.copy(),
        tilde_w=state.tilde_w.copy(),
        w=state.w.copy(),
        xi=xi,
        zeta=zeta,
        obs_s=state.z + xi if audit else None,
        obs_tilde_w=state.tilde_w + zeta if audit else None,
    )
    return BaselineState(z=Z1, tilde_w=TW1, w=W1, k=k + 1), record


def _keep_record(k: int, thin_after: int) -> bool:
    return k < thin_after or k % 10 == 0


def run(
    problem: AllocationProblem,
    graph: CommGraph,
    schedules: ScheduleSet,
    n_iters: int,
    seed: int,
    algorithm: str = "dpdgt",
    *,
    iota: float = 0.034,
    init_s: np.ndarray | None = None,
    init_tilde_w: np.ndarray | None = None,
    audit: bool = False,
    keep_records: bool = True,
    thin_after: int = RECORD_THIN_AFTER,
    with_metrics: bool = True,
    config_echo: dict | None = None,
) -> RunTrace:
    """Execute one full run and collect metrics against the reference optimum.

    The default initial state is all-zero s (or z chosen so the baseline
    tracker starts consistent) and all-zero dual drive, with w0 the
    conjugate argmin at the initial drive. Metrics are recorded for every
    iteration 0..n_iters-1; state/noise snapshots follow the thinning
    policy and can be disabled entirely for long sweeps.

    For the baseline the per-step gain is beta_k = alpha_k / iota, so both
    algorithms see the same effective step-size envelope.
    """
    if n_iters < 1:
        raise ValueError("n_iters must be >= 1")
    if algorithm not in ("dpdgt", "ddgt"):
        raise ValueError(f"unknown algorithm {algorithm!r}; expected 'dpdgt' or 'ddgt'")
    n, m = problem.n_agents, problem.m
    if graph.n_agents != n:
        raise ValueError("problem and graph disagree on the number of agents")

    a, b, lo, hi, d = _cost_arrays(problem)
    w_star, nu = centralized_solve(problem)
    d_total = problem.total_demand

    S = np.zeros((n, m)) if init_s is None else np.array(init_s, dtype=float).reshape(n, m)
    TW = np.zeros((n, m)) if init_tilde_w is None else np.array(init_tilde_w, dtype=float).reshape(n, m)
    W = _argmin_block(TW, a, b, lo, hi)
    Z = None
    if algorithm == "ddgt":
        Z = -iota * (W - d) if init_s is None else S.copy()

    noise = NoiseStreams(seed)
    alpha_seq = schedules.alpha.values(n_iters)
    txi_seq = schedules.theta_xi.values(n_iters)
    tze_seq = schedules.theta_zeta.values(n_iters)
    gamma, phi = schedules.gamma, schedules.phi
    R, C = graph.R, graph.C

    metrics = None
    if with_metrics:
        pi_r, _ = perron_vectors(graph)
        metrics = TraceMetrics(
            err_sq=np.empty(n_iters),
            supply=np.empty(n_iters),
            consensus=np.empty(n_iters),
            dual_value=np.empty(n_iters),
            alloc=np.empty((n_iters, n)),
        )
    records: list[IterationRecord] = []

    for k in range(n_iters):
        xi = noise.laplace_block(float(txi_seq[k]), k, CHANNEL_XI, n, m)
        zeta = noise.laplace_block(float(tze_seq[k]), k, CHANNEL_ZETA, n, m)

        if with_metrics:
            x = -TW
            xbar = x.T @ pi_r
            metrics.err_sq[k] = float(((W - w_star) ** 2).sum())
            metrics.supply[k] = float(W.sum())
            metrics.consensus[k] = float(np.linalg.norm(x - xbar[None, :]))
            metrics.dual_value[k] = dual_value(problem, xbar)
            metrics.alloc[k] = W[:, 0]

        if keep_records and _keep_record(k, thin_after):
            tracker = S if algorithm == "dpdgt" else Z
            records.append(
                IterationRecord(
                    k=k,
                    s=tracker.copy(),
                    tilde_w=TW.copy(),
                    w=W.copy(),
                    xi=xi,
                    zeta=zeta,
                    obs_s=tracker + xi if audit else None,
                    obs_tilde_w=TW + zeta if audit else None,
                    err_sq=metrics.err_sq[k] if with_metrics else None,
                    supply=metrics.supply[k] if with_metrics else None,
                    consensus=metrics.consensus[k] if with_metrics else None,
                    dual_value=metrics.dual_value[k] if with_metrics else None,
                )
            )

        if algorithm == "dpdgt":
            S, TW, W = _dpdgt_update(
                S, TW, W, xi, zeta, float(alpha_seq[k]), gamma, phi, R, C, a, b, lo, hi, d
            )
        else:
            beta_k = float(alpha_seq[k]) / iota
            Z, TW, W = _ddgt_update(Z, TW, W, xi, zeta, beta_k, iota, R, C, a, b, lo, hi)

    if algorithm == "dpdgt":
        final = SolverState(s=S, tilde_w=TW, w=W, k=n_iters)
    else:
        final = BaselineState(z=Z, tilde_w=TW, w=W, k=n_iters)

    echo = config_echo if config_echo is not None else {
        "algorithm": algorithm,
        "n_iters": n_iters,
        "seed": int(seed),
        "schedules": {
            "alpha0": schedules.alpha.initial,
            "q": schedules.alpha.ratio,
            "theta_xi0": schedules.theta_xi.initial,
            "q_xi": schedules.theta_xi.ratio,
            "theta_zeta0": schedules.theta_zeta.initial,
            "q_zeta": schedules.theta_zeta.ratio,
            "gamma": gamma,
            "phi": phi,
        },
    }
    return RunTrace(
        algorithm=algorithm,
        seed=int(seed),
        n_iters=n_iters,
        config_echo=echo,
        metrics=metrics,
        records=records,
        final=final,
        w_star=w_star,
        nu=nu,
        total_demand=d_total,
    )


def coupled_adjacent_run(
    problem: AllocationProblem,
    perturbation: AdjacencyPerturbation,
    graph: CommGraph,
    schedules: ScheduleSet,
    n_iters: int,
    seed: int,
) -> CoupledResult:
    """Run a problem and its adjacent twin under identical transmitted messages.

    Both executions start from the same all-zero state and consume the same
    noise streams. The twin's noise at the perturbed agent is implicitly
    shifted so that every transmitted message coincides between executions:
    in that coupling, mixing terms cancel out of the state differences and
    every non-perturbed agent stays bit-identical, while the perturbed
    agent's tracker and drive deviations evolve by

        ds_{k+1}  = (1-gamma) ds_k - alpha_k dw_k
        dtw_{k+1} = (1-phi) dtw_k + (ds_{k+1} - ds_k)

    which the sensitivity recursion bounds in the l1 norm.
    """
    problem_prime = make_adjacent(problem, perturbation)
    i0 = perturbation.target_agent - 1
    n, m = problem.n_agents, problem.m

    a, b, lo, hi, d = _cost_arrays(problem)
    a2, b2, lo2, hi2, _ = _cost_arrays(problem_prime)

    S1 = np.zeros((n, m)); TW1 = np.zeros((n, m)); W1 = _argmin_block(TW1, a, b, lo, hi)
    S2 = np.zeros((n, m)); TW2 = np.zeros((n, m)); W2 = _argmin_block(TW2, a2, b2, lo2, hi2)

    noise = NoiseStreams(seed)
    alpha_seq = schedules.alpha.values(n_iters)
    txi_seq = schedules.theta_xi.values(n_iters)
    tze_seq = schedules.theta_zeta.values(n_iters)
    gamma, phi = schedules.gamma, schedules.phi
    R, C = graph.R, graph.C

    others = np.arange(n) != i0
    ds = np.empty(n_iters + 1)
    dtw = np.empty(n_iters + 1)
    dw = np.empty(n_iters + 1)
    ds[0] = dtw[0] = dw[0] = 0.0
    max_other = 0.0

    for k in range(n_iters):
        xi = noise.laplace_block(float(txi_seq[k]), k, CHANNEL_XI, n, m)
        zeta = noise.laplace_block(float(tze_seq[k]), k, CHANNEL_ZETA, n, m)
        alpha_k = float(alpha_seq[k])

        # shared observed messages: the twin's noise at agent i0 absorbs the
        # state difference, so both executions mix the same matrices
        Ms = S1 + xi
        Mw = TW1 + zeta

        S1n = (1.0 - gamma) * S1 + gamma * (C @ Ms) - alpha_k * (W1 - d)
        TW1n = (1.0 - phi) * TW1 + phi * (R @ Mw) + (S1n - S1)
        W1n = _argmin_block(TW1n, a, b, lo, hi)

        S2n = (1.0 - gamma) * S2 + gamma * (C @ Ms) - alpha_k * (W2 - d)
        TW2n = (1.0 - phi) * TW2 + phi * (R @ Mw) + (S2n - S2)
        W2n = _argmin_block(TW2n, a2, b2, lo2, hi2)

        S1, TW1, W1 = S1n, TW1n, W1n
        S2, TW2, W2 = S2n, TW2n, W2n

        ds[k + 1] = float(np.abs(S1[i0] - S2[i0]).sum())
        dtw[k + 1] = float(np.abs(TW1[i0] - TW2[i0]).sum())
        dw[k + 1] = float(np.abs(W1[i0] - W2[i0]).sum())
        if others.any():
            dev = max(
                float(np.abs(S1[others] - S2[others]).max()),
                float(np.abs(TW1[others] - TW2[others]).max()),
                float(np.abs(W1[others] - W2[others]).max()),
            )
            max_other = max(max_other, dev)

    return CoupledResult(
        ds_l1=ds,
        dtw_l1=dtw,
        dw_l1=dw,
        max_other_deviation=max_other,
        final=SolverState(s=S1, tilde_w=TW1, w=W1, k=n_iters),
        final_prime=SolverState(s=S2, tilde_w=TW2, w=W2, k=n_iters),
    )
