"""Resource allocation problems, their duals, and adjacent-problem generation.

The primal problem allocates w_i to each agent at cost F_i(w_i) subject to
per-agent box constraints and the global balance sum_i w_i = sum_i d_i.
Everything the iterative solvers need is expressed through the convex
conjugate of the per-agent cost: the conjugate argmin recovers allocations
from dual drive values, and the dual gradient is the local supply-demand
mismatch.

The shipped cost family is the box-constrained quadratic
F(w) = a*w^2 + b*w + c on [lo, hi]; any strongly convex cost exposing the
same (value, gradient, conjugate argmin) surface could replace it.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from functools import cached_property

import numpy as np

__all__ = [
    "QuadraticBoxCost",
    "AllocationProblem",
    "AdjacencyPerturbation",
    "conjugate_argmin",
    "dual_gradient",
    "dual_value",
    "primal_cost",
    "centralized_solve",
    "make_adjacent",
]


@dataclass(frozen=True)
class QuadraticBoxCost:
    """Strongly convex quadratic cost on a box.

    F(w) = a*w^2 + b*w + c for w in [lo, hi], per coordinate when the
    allocation is vector-valued. Strong convexity modulus is 2*a.
    """

    a: float
    b: float
    lo: float
    hi: float
    c: float = 0.0

    def __post_init__(self):
        if not self.a > 0:
            raise ValueError("quadratic coefficient a must be positive")
        if not self.lo <= self.hi:
            raise ValueError("box bounds must satisfy lo <= hi")

    def value(self, w):
        return self.a * np.square(w) + self.b * np.asarray(w) + self.c

    def grad(self, w):
        return 2.0 * self.a * np.asarray(w) + self.b


@dataclass(frozen=True)
class AllocationProblem:
    """A collection of (cost, demand) agents with a shared balance constraint.

    Feasibility requires sum(lo) <= sum(d) <= sum(hi), strictly on both
    sides whenever some agent has a nondegenerate box (so that a feasible
    point exists in the relative interior).
    """

    agents: tuple
    m: int = 1

    def __post_init__(self):
        agents = tuple((cost, float(d)) for cost, d in self.agents)
        object.__setattr__(self, "agents", agents)
        if len(agents) == 0:
            raise ValueError("problem needs at least one agent")
        if self.m < 1:
            raise ValueError("allocation dimension m must be >= 1")
        lo = sum(c.lo for c, _ in agents)
        hi = sum(c.hi for c, _ in agents)
        d = sum(dd for _, dd in agents)
        nondegenerate = any(c.lo < c.hi for c, _ in agents)
        if nondegenerate:
            if not (lo < d < hi):
                raise ValueError(
                    f"total demand {d} must lie strictly inside the achievable "
                    f"supply range ({lo}, {hi}); no feasible interior point exists"
                )
        elif not (lo <= d <= hi):
            raise ValueError(
                f"total demand {d} outside achievable supply range [{lo}, {hi}]"
            )

    @property
    def n_agents(self) -> int:
        return len(self.agents)

    @cached_property
    def mu(self) -> float:
        """Global strong-convexity modulus, min over transmitting agents of 2a.

        Agents pinned to a single point (lo == hi) never influence any
        transmitted value, so they are excluded unless every agent is pinned.
        """
        live = [2.0 * c.a for c, _ in self.agents if c.lo < c.hi]
        if not live:
            live = [2.0 * c.a for c, _ in self.agents]
        return min(live)

    @cached_property
    def arrays(self) -> dict:
        """Stacked per-agent coefficient arrays of shape (n, 1) for vector math."""
        n = self.n_agents
        cols = {
            "a": np.array([c.a for c, _ in self.agents]),
            "b": np.array([c.b for c, _ in self.agents]),
            "c": np.array([c.c for c, _ in self.agents]),
            "lo": np.array([c.lo for c, _ in self.agents]),
            "hi": np.array([c.hi for c, _ in self.agents]),
            "d": np.array([d for _, d in self.agents]),
        }
        return {k: v.reshape(n, 1) for k, v in cols.items()}

    @property
    def total_demand(self) -> float:
        return float(sum(d for _, d in self.agents))


@dataclass(frozen=True)
class AdjacencyPerturbation:
    """A single-agent cost perturbation with a certified gradient distance.

    Shifting the linear coefficient of agent ``target_agent`` by ``db``
    changes its cost gradient by exactly ``db`` everywhere, so the
    perturbed problem is delta-adjacent to the original whenever
    ``abs(db) <= delta``.
    """

    target_agent: int
    delta: float
    db: float

    def __post_init__(self):
        if self.delta < 0:
            raise ValueError("delta must be nonnegative")
        if abs(self.db) > self.delta:
            raise ValueError(f"|db|={abs(self.db)} exceeds the adjacency bound delta={self.delta}")

    @property
    def gradient_distance(self) -> float:
        return abs(self.db)


def conjugate_argmin(cost: QuadraticBoxCost, tilde_w):
    """Allocation that minimizes F(w) - tilde_w*w over the box.

    For the quadratic cost this is clamp((tilde_w - b) / (2a), lo, hi),
    the unique minimizer of the strongly convex objective. Accepts scalar
    or array dual drive values and maps elementwise.
    """
    out = np.clip((np.asarray(tilde_w, dtype=float) - cost.b) / (2.0 * cost.a), cost.lo, cost.hi)
    return float(out) if np.ndim(tilde_w) == 0 else out


def dual_gradient(cost: QuadraticBoxCost, d, x):
    """Local supply-demand mismatch d - argmin_w {F(w) + x*w}."""
    alloc = conjugate_argmin(cost, -np.asarray(x, dtype=float))
    return d - alloc


def dual_value(problem: AllocationProblem, x) -> float:
    """Dual objective sum_i [ sup_w (-x*w - F_i(w)) + x*d_i ].

    Each supremum is evaluated in closed form at the clamped maximizer of
    the concave inner problem. ``x`` is a scalar for m == 1 or a length-m
    vector; the quadratic family is separable per coordinate.
    """
    arr = problem.arrays
    x = np.atleast_1d(np.asarray(x, dtype=float)).reshape(1, -1)
    wbar = np.clip((-x - arr["b"]) / (2.0 * arr["a"]), arr["lo"], arr["hi"])
    f_at = arr["a"] * wbar**2 + arr["b"] * wbar + arr["c"]
    per_agent = (-x * wbar - f_at + x * arr["d"]).sum(axis=1)
    return float(per_agent.sum())


def primal_cost(problem: AllocationProblem, w) -> float:
    """Total generation cost sum_i F_i(w_i)."""
    arr = problem.arrays
    w = np.asarray(w, dtype=float).reshape(problem.n_agents, -1)
    return float((arr["a"] * w**2 + arr["b"] * w + arr["c"]).sum())


def centralized_solve(problem: AllocationProblem, tol: float = 1e-9):
    """Reference optimum by bisection on the balance multiplier.

    Solves min sum F_i(w_i) s.t. sum w_i = sum d_i, w_i in [lo_i, hi_i].
    For a multiplier nu each agent responds with
    w_i(nu) = clamp((nu - b_i) / (2 a_i), lo_i, hi_i); total supply is
    continuous and nondecreasing in nu, so bisection on
    sum_i w_i(nu) = D terminates when |sum w_i(nu) - D| <= tol*max(1, D).

    Returns
    -------
    (w_star, nu) : (ndarray of shape (n, m), float)
    """
    arr = problem.arrays
    a, b, lo, hi = arr["a"][:, 0], arr["b"][:, 0], arr["lo"][:, 0], arr["hi"][:, 0]
    d_total = problem.total_demand
    target = tol * max(1.0, abs(d_total))

    def supply(nu):
        return float(np.clip((nu - b) / (2.0 * a), lo, hi).sum())

    nu_lo = float(np.min(2.0 * a * lo + b)) - 1.0
    nu_hi = float(np.max(2.0 * a * hi + b)) + 1.0
    # bracket is guaranteed: supply(nu_lo) = sum(lo) <= D <= sum(hi) = supply(nu_hi)
    nu = 0.5 * (nu_lo + nu_hi)
    for _ in range(200):
        nu = 0.5 * (nu_lo + nu_hi)
        gap = supply(nu) - d_total
        if abs(gap) <= target:
            break
        if gap < 0:
            nu_lo = nu
        else:
            nu_hi = nu
    else:
        raise RuntimeError("bisection on the balance multiplier failed to converge")

    w = np.clip((nu - b) / (2.0 * a), lo, hi)
    # separable costs and per-agent scalar demands give the same multiplier
    # in every coordinate, so the solution replicates across columns
    w_star = np.repeat(w.reshape(-1, 1), problem.m, axis=1)
    return w_star, float(nu)


def make_adjacent(problem: AllocationProblem, perturbation: AdjacencyPerturbation) -> AllocationProblem:
    """Copy of the problem with one agent's linear coefficient shifted.

    Only agent ``perturbation.target_agent`` changes; boxes and demands are
    untouched, so the two problems share identical allocation domains and
    the achieved sup-gradient distance is exactly ``abs(db)``.
    """
    i0 = perturbation.target_agent
    if not (1 <= i0 <= problem.n_agents):
        raise ValueError(f"target agent {i0} outside [1, {problem.n_agents}]")
    agents = list(problem.agents)
    cost, d = agents[i0 - 1]
    agents[i0 - 1] = (replace(cost, b=cost.b + perturbation.db), d)
    out = AllocationProblem(agents=tuple(agents), m=problem.m)
    assert all(
        (c1.lo, c1.hi) == (c2.lo, c2.hi)
        for (c1, _), (c2, _) in zip(problem.agents, out.agents)
    )
    return out
