import pytest

from dpdgt import ieee14_graph, ieee14_problem, ieee14_schedules, comparison_schedules


@pytest.fixture(scope="session")
def bench_problem():
    return ieee14_problem()


@pytest.fixture(scope="session")
def bench_graph():
    return ieee14_graph()


@pytest.fixture(scope="session")
def bench_schedules():
    return ieee14_schedules()


@pytest.fixture(scope="session")
def bench_comparison_schedules():
    return comparison_schedules()
