"""Built-in IEEE 14-bus economic dispatch benchmark.

Fourteen agents sit on a directed communication ring-with-chords that is
independent of the physical bus wiring. Five buses host generators with
quadratic cost curves; the rest only carry local demand and are pinned to
zero generation through a degenerate [0, 0] box, which keeps the 14-agent
topology intact while their conjugate argmin is constantly zero.

Two schedule presets are shipped: the convergence experiment configuration
(small step, slowly decaying noise) and the algorithm-comparison
configuration with a larger step envelope.
"""
from __future__ import annotations

from .graph import CommGraph, build_uniform_weights
from .problem import AllocationProblem, QuadraticBoxCost
from .schedules import GeometricSchedule, ScheduleSet

__all__ = [
    "IEEE14_GENERATORS",
    "IEEE14_DEMANDS",
    "ieee14_links",
    "ieee14_graph",
    "ieee14_problem",
    "ieee14_schedules",
    "comparison_schedules",
    "GENERATOR_BUSES",
]

# bus -> (a [$/MW^2 h], b [$/MWh], lo [MW], hi [MW]); constant offsets are
# not reported for this test case and do not affect any computed allocation,
# so c defaults to 0
IEEE14_GENERATORS = {
    1: (0.04, 2.0, 0.0, 80.0),
    2: (0.03, 3.0, 0.0, 90.0),
    3: (0.035, 4.0, 0.0, 70.0),
    6: (0.03, 4.0, 0.0, 70.0),
    8: (0.04, 2.5, 0.0, 80.0),
}
GENERATOR_BUSES = (1, 2, 3, 6, 8)

# local demands D_1..D_14 in MW; they sum to 361
IEEE14_DEMANDS = (0.0, 9.0, 56.0, 55.0, 27.0, 27.0, 0.0, 0.0, 8.0, 24.0, 53.0, 46.0, 16.0, 40.0)

# placeholder curvature for demand-only buses; their box is [0, 0] so the
# value never enters any computed quantity
_LOAD_A = 1.0


def ieee14_links() -> list:
    """Directed communication links (u, v), one physical link from u to v."""
    links = [(i, i + 1) for i in range(1, 13)]
    links += [(i, i + 2) for i in range(1, 13)]
    links += [
        (13, 14), (13, 1), (14, 1), (1, 7), (2, 8), (3, 2),
        (3, 9), (4, 10), (5, 2), (5, 11), (6, 12),
    ]
    return links


def ieee14_graph() -> CommGraph:
    """Uniformly weighted mixing matrices over the benchmark links.

    A listed link (u, v) carries information from u to v in both message
    graphs: v pulls dual drives from u and v receives pushed tracker
    values from u. Pass explicit edge lists to
    :func:`dpdgt.graph.build_uniform_weights` to override this convention.
    """
    receiving = [(v, u) for (u, v) in ieee14_links()]
    return build_uniform_weights(14, edges_r=receiving, edges_c=receiving)


def ieee14_problem() -> AllocationProblem:
    """The 14-agent dispatch problem with the benchmark cost and demand data."""
    agents = []
    for bus in range(1, 15):
        if bus in IEEE14_GENERATORS:
            a, b, lo, hi = IEEE14_GENERATORS[bus]
            cost = QuadraticBoxCost(a=a, b=b, lo=lo, hi=hi)
        else:
            cost = QuadraticBoxCost(a=_LOAD_A, b=0.0, lo=0.0, hi=0.0)
        agents.append((cost, IEEE14_DEMANDS[bus - 1]))
    return AllocationProblem(agents=tuple(agents), m=1)


def ieee14_schedules() -> ScheduleSet:
    """Convergence experiment configuration for the benchmark."""
    return ScheduleSet(
        alpha=GeometricSchedule(0.015, 0.991),
        theta_xi=GeometricSchedule(0.01, 0.995),
        theta_zeta=GeometricSchedule(0.01, 0.995),
        gamma=0.8,
        phi=0.7,
    )


def comparison_schedules() -> ScheduleSet:
    """Algorithm-comparison configuration: larger step envelope, same noise.

    The baseline splits the step envelope as iota * beta_k with
    iota = 0.034, so beta_k = 0.99**k matches this alpha exactly.
    """
    return ScheduleSet(
        alpha=GeometricSchedule(0.034, 0.99),
        theta_xi=GeometricSchedule(0.01, 0.995),
        theta_zeta=GeometricSchedule(0.01, 0.995),
        gamma=0.8,
        phi=0.7,
    )
