import numpy as np
import pytest

from dpdgt import (
    AdjacencyPerturbation,
    AllocationProblem,
    QuadraticBoxCost,
    centralized_solve,
    conjugate_argmin,
    dual_gradient,
    dual_value,
    make_adjacent,
    primal_cost,
)


# ---------------------------------------------------------------------------
# oracles
# ---------------------------------------------------------------------------

def golden_section_min(f, lo, hi, tol=1e-12):
    """Golden-section minimization of a unimodal scalar function."""
    invphi = (np.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    return 0.5 * (a + b)


def grid_max(f, lo, hi, n=2_000_001):
    xs = np.linspace(lo, hi, n)
    vals = f(xs)
    return xs[np.argmax(vals)], vals.max()


# ---------------------------------------------------------------------------
# conjugate argmin
# ---------------------------------------------------------------------------

GEN1 = QuadraticBoxCost(a=0.04, b=2.0, lo=0.0, hi=80.0)


def test_argmin_at_lower_bound():
    assert conjugate_argmin(GEN1, 2.0) == 0.0


def test_argmin_clamped_at_upper_bound():
    assert conjugate_argmin(GEN1, 100.0) == 80.0


def test_argmin_interior_vs_golden_section():
    tw = 8.1392
    oracle = golden_section_min(lambda w: GEN1.value(w) - tw * w, 0.0, 80.0)
    got = conjugate_argmin(GEN1, tw)
    # the flat quadratic bottom limits the search oracle to ~sqrt(eps) accuracy
    assert got == pytest.approx(oracle, abs=2e-6)
    assert got == pytest.approx(76.74, abs=1e-9)


def test_argmin_monotone_and_lipschitz():
    rng = np.random.default_rng(1)
    for _ in range(50):
        cost = QuadraticBoxCost(
            a=float(rng.uniform(0.01, 2.0)),
            b=float(rng.uniform(-5, 5)),
            lo=float(rng.uniform(-10, 0)),
            hi=float(rng.uniform(0.5, 10)),
        )
        t1, t2 = sorted(rng.uniform(-50, 50, size=2))
        w1, w2 = conjugate_argmin(cost, t1), conjugate_argmin(cost, t2)
        assert cost.lo <= w1 <= cost.hi and cost.lo <= w2 <= cost.hi
        assert w2 >= w1
        assert w2 - w1 <= (t2 - t1) / (2 * cost.a) + 1e-12


# ---------------------------------------------------------------------------
# dual gradient and dual value
# ---------------------------------------------------------------------------

def test_dual_gradient_simple():
    cost = QuadraticBoxCost(a=0.5, b=0.0, lo=-10.0, hi=10.0)
    assert dual_gradient(cost, 1.0, 0.0) == 1.0


def test_dual_gradient_from_argmin_oracle():
    assert dual_gradient(GEN1, 0.0, -8.1392) == pytest.approx(-76.74, abs=1e-9)


def test_dual_gradient_stationarity():
    # pick x so that the conjugate argmin equals the demand exactly
    cost = QuadraticBoxCost(a=0.3, b=1.5, lo=0.0, hi=20.0)
    d = 4.0
    x = -(2 * cost.a * d + cost.b)
    assert dual_gradient(cost, d, x) == pytest.approx(0.0, abs=1e-12)


def test_dual_value_zero_point():
    p = AllocationProblem(
        agents=((QuadraticBoxCost(a=0.5, b=0.0, lo=-10.0, hi=10.0), 0.0),)
    )
    assert dual_value(p, 0.0) == 0.0


def test_dual_value_against_grid_oracle():
    p = AllocationProblem(
        agents=((QuadraticBoxCost(a=0.5, b=0.0, lo=-10.0, hi=10.0), 0.0),)
    )
    x = 2.0
    _, sup = grid_max(lambda w: -x * w - (0.5 * w**2), -10.0, 10.0)
    assert dual_value(p, x) == pytest.approx(2.0, abs=1e-12)
    assert dual_value(p, x) == pytest.approx(sup, abs=1e-10)


def test_finite_difference_matches_gradient(bench_problem):
    rng = np.random.default_rng(7)
    arr = bench_problem.arrays
    # conjugate kinks sit where an agent's allocation hits its box
    kinks = np.concatenate([
        -(2 * arr["a"] * arr["lo"] + arr["b"]).ravel(),
        -(2 * arr["a"] * arr["hi"] + arr["b"]).ravel(),
    ])
    h = 1e-5
    eps = np.finfo(float).eps
    checked = 0
    while checked < 100:
        x = float(rng.uniform(-12, 4))
        if np.min(np.abs(x - kinks)) < 10 * h:
            continue  # centered differences are only second order away from kinks
        f_hi = dual_value(bench_problem, x + h)
        f_lo = dual_value(bench_problem, x - h)
        fd = (f_hi - f_lo) / (2 * h)
        grad = sum(
            dual_gradient(cost, d, x) for cost, d in bench_problem.agents
        )
        # cancellation floor of the centered difference at this value scale
        floor = 8 * eps * max(abs(f_hi), abs(f_lo), 1.0) / h
        assert fd == pytest.approx(grad, abs=1e-8 + 100 * h**2 + floor)
        checked += 1


def test_strong_duality_at_numeric_dual_optimum(bench_problem):
    w_star, _ = centralized_solve(bench_problem)
    f_primal = primal_cost(bench_problem, w_star)
    x_star = golden_section_min(lambda x: dual_value(bench_problem, x), -50.0, 50.0)
    assert abs(f_primal + dual_value(bench_problem, x_star)) <= 1e-6 * (1 + abs(f_primal))
    assert x_star == pytest.approx(-8.1392, abs=1e-3)


# ---------------------------------------------------------------------------
# centralized solve
# ---------------------------------------------------------------------------

REFERENCE_ALLOC = {1: 76.7398, 2: 85.6530, 3: 59.1311, 6: 68.9863, 8: 70.4898}


def test_bench_reference_allocation(bench_problem):
    w_star, nu = centralized_solve(bench_problem)
    for bus, ref in REFERENCE_ALLOC.items():
        assert w_star[bus - 1, 0] == pytest.approx(ref, abs=1e-3)
    assert abs(w_star.sum() - 361.0) <= 1e-6


def test_bench_kkt_conditions(bench_problem):
    w_star, nu = centralized_solve(bench_problem)
    for (cost, _), w in zip(bench_problem.agents, w_star[:, 0]):
        assert cost.lo - 1e-12 <= w <= cost.hi + 1e-12
        if cost.lo + 1e-9 < w < cost.hi - 1e-9:
            assert abs(2 * cost.a * w + cost.b - nu) <= 1e-7


def test_single_agent_forced_balance():
    p = AllocationProblem(agents=((QuadraticBoxCost(a=1.0, b=0.0, lo=0.0, hi=100.0), 42.0),))
    w_star, _ = centralized_solve(p)
    # balance is enforced to 1e-9 relative to the total demand
    assert abs(w_star.sum() - 42.0) <= 1e-9 * 42.0
    assert w_star[0, 0] == pytest.approx(42.0, abs=1e-7)


def test_two_agent_symmetry():
    cost = QuadraticBoxCost(a=1.0, b=0.0, lo=0.0, hi=10.0)
    p = AllocationProblem(agents=((cost, 5.0), (cost, 5.0)))
    w_star, _ = centralized_solve(p)
    assert np.allclose(w_star[:, 0], [5.0, 5.0], atol=1e-9)


def test_infeasible_balance_rejected():
    with pytest.raises(ValueError):
        AllocationProblem(agents=((QuadraticBoxCost(a=1.0, b=0.0, lo=0.0, hi=1.0), 5.0),))
    with pytest.raises(ValueError):
        # boundary demand with a nondegenerate box has no interior point
        AllocationProblem(agents=((QuadraticBoxCost(a=1.0, b=0.0, lo=0.0, hi=5.0), 5.0),))


def test_degenerate_agents_allowed():
    pinned = QuadraticBoxCost(a=1.0, b=0.0, lo=0.0, hi=0.0)
    p = AllocationProblem(agents=((pinned, 0.0),))
    w_star, _ = centralized_solve(p)
    assert w_star[0, 0] == 0.0


def test_mu_excludes_pinned_agents(bench_problem):
    assert bench_problem.mu == pytest.approx(0.06, abs=1e-15)


# ---------------------------------------------------------------------------
# adjacency
# ---------------------------------------------------------------------------

def test_zero_perturbation_identity(bench_problem):
    pert = AdjacencyPerturbation(target_agent=1, delta=1.0, db=0.0)
    p2 = make_adjacent(bench_problem, pert)
    assert p2 == bench_problem
    assert pert.gradient_distance == 0.0


def test_gradient_distance_is_db():
    cost = QuadraticBoxCost(a=0.04, b=2.0, lo=0.0, hi=80.0)
    p = AllocationProblem(agents=((cost, 10.0),))
    pert = AdjacencyPerturbation(target_agent=1, delta=0.5, db=0.5)
    p2 = make_adjacent(p, pert)
    ws = np.linspace(0, 80, 101)
    diffs = np.abs(p.agents[0][0].grad(ws) - p2.agents[0][0].grad(ws))
    assert np.max(diffs) == pytest.approx(0.5, abs=1e-12)
    assert pert.gradient_distance == 0.5


def test_perturbation_moves_the_optimum(bench_problem):
    pert = AdjacencyPerturbation(target_agent=1, delta=1.0, db=1.0)
    p2 = make_adjacent(bench_problem, pert)
    w1, _ = centralized_solve(bench_problem)
    w2, _ = centralized_solve(p2)
    assert not np.allclose(w1, w2, atol=1e-6)
    assert abs(w2.sum() - 361.0) <= 1e-6  # balance still holds


def test_perturbation_exceeding_delta_rejected():
    with pytest.raises(ValueError):
        AdjacencyPerturbation(target_agent=1, delta=0.1, db=0.2)


def test_perturbation_bad_target(bench_problem):
    pert = AdjacencyPerturbation(target_agent=15, delta=1.0, db=0.0)
    with pytest.raises(ValueError):
        make_adjacent(bench_problem, pert)
