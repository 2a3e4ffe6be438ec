#!/usr/bin/env python3
"""Centralized reference dispatch for the IEEE 14-bus benchmark.

Solves min sum_i F_i(w_i) subject to the supply-demand balance and the
generator box limits with the bisection oracle, then prints the dispatch
table, the marginal price (the balance multiplier), and the total cost.
"""
import numpy as np

from dpdgt import GENERATOR_BUSES, centralized_solve, ieee14_problem, primal_cost


def main():
    problem = ieee14_problem()
    w_star, nu = centralized_solve(problem)

    print("IEEE 14-bus economic dispatch, centralized reference")
    print(f"total demand: {problem.total_demand:.1f} MW")
    print()
    print("bus   a($/MW^2h)  b($/MWh)   range(MW)     dispatch(MW)")
    for bus in GENERATOR_BUSES:
        cost, _ = problem.agents[bus - 1]
        print(f"{bus:3d}   {cost.a:9.3f}  {cost.b:8.2f}   [{cost.lo:.0f}, {cost.hi:.0f}]"
              f"     {w_star[bus - 1, 0]:10.4f}")
    print()
    print(f"supply            : {w_star.sum():.6f} MW")
    print(f"balance mismatch  : {w_star.sum() - problem.total_demand:.2e} MW")
    print(f"marginal price nu : {nu:.4f} $/MWh")
    print(f"total cost        : {primal_cost(problem, w_star):.2f} $/h")

    # every interior generator runs at the same marginal cost
    marginal = [2 * problem.agents[b - 1][0].a * w_star[b - 1, 0] + problem.agents[b - 1][0].b
                for b in GENERATOR_BUSES]
    print(f"marginal costs    : {np.round(marginal, 4)}")


if __name__ == "__main__":
    main()
