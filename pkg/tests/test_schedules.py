import math

import numpy as np
import pytest

from dpdgt import (
    CHANNEL_XI,
    CHANNEL_ZETA,
    GeometricSchedule,
    NoiseStreams,
    ScheduleSet,
    check_conditions,
    laplace_sample,
    partial_sum,
    tail_sums,
)
from dpdgt.schedules import _laplace_from_uniform


def make_set(alpha0=0.015, q=0.991, theta_xi0=0.01, q_xi=0.995,
             theta_zeta0=0.01, q_zeta=0.995, gamma=0.8, phi=0.7):
    return ScheduleSet(
        alpha=GeometricSchedule(alpha0, q),
        theta_xi=GeometricSchedule(theta_xi0, q_xi),
        theta_zeta=GeometricSchedule(theta_zeta0, q_zeta),
        gamma=gamma,
        phi=phi,
    )


# ---------------------------------------------------------------------------
# geometric schedules
# ---------------------------------------------------------------------------

def test_schedule_values_decrease():
    s = GeometricSchedule(0.5, 0.9)
    vals = s.values(100)
    assert vals[0] == 0.5
    assert np.all(np.diff(vals) < 0)
    assert s.sum_infinite() == pytest.approx(5.0)


def test_schedule_validation():
    with pytest.raises(ValueError):
        GeometricSchedule(-0.1, 0.9)
    with pytest.raises(ValueError):
        GeometricSchedule(0.1, 1.0)
    GeometricSchedule(0.0, 0.5)  # zero sequence is allowed


# ---------------------------------------------------------------------------
# Laplace sampling
# ---------------------------------------------------------------------------

def test_laplace_median_is_zero():
    assert _laplace_from_uniform(0.5) == 0.0


def test_laplace_rejects_nonpositive_scale():
    rng = np.random.default_rng(0)
    with pytest.raises(ValueError):
        laplace_sample(0.0, rng)
    with pytest.raises(ValueError):
        laplace_sample(-1.0, rng)


def test_laplace_deterministic_replay():
    a = laplace_sample(2.0, NoiseStreams(5).stream(1, 0, 0))
    b = laplace_sample(2.0, NoiseStreams(5).stream(1, 0, 0))
    assert a == b


def test_laplace_moments():
    x = laplace_sample(1.0, NoiseStreams(2024).stream(1, 0, 0), size=1_000_000)
    assert abs(x.mean()) <= 0.005
    assert x.var() == pytest.approx(2.0, abs=0.02)
    # P(|x| <= theta*ln 2) is 1/2 for the Laplace law
    assert np.mean(np.abs(x) <= math.log(2)) == pytest.approx(0.5, abs=0.002)


def test_laplace_scale_property():
    x = laplace_sample(3.0, NoiseStreams(9).stream(1, 0, 0), size=200_000)
    assert x.var() == pytest.approx(2 * 9.0, rel=0.03)


# ---------------------------------------------------------------------------
# noise streams
# ---------------------------------------------------------------------------

def test_streams_pairwise_distinct_initializations():
    ns = NoiseStreams(123)
    states = set()
    for agent in (1, 2, 3):
        for k in (0, 1, 7):
            for ch in (CHANNEL_XI, CHANNEL_ZETA):
                st = ns.stream(agent, k, ch).bit_generator.state
                key = (tuple(st["state"]["counter"]), tuple(st["state"]["key"]))
                assert key not in states
                states.add(key)


def test_stream_replay_bit_exact():
    draws1 = [NoiseStreams(7).stream(a, k, c).random()
              for a in (1, 5) for k in (0, 3) for c in (0, 1)]
    draws2 = [NoiseStreams(7).stream(a, k, c).random()
              for a in (1, 5) for k in (0, 3) for c in (0, 1)]
    assert draws1 == draws2


@pytest.mark.parametrize("m", [1, 3])
def test_block_matches_per_agent_streams(m):
    ns = NoiseStreams(42)
    n = 6
    block = ns.standard_block(11, CHANNEL_ZETA, n, m)
    for agent in range(1, n + 1):
        stream = ns.stream(agent, 11, CHANNEL_ZETA)
        per_agent = _laplace_from_uniform(stream.random(m))
        assert np.array_equal(block[agent - 1], per_agent)


def test_block_rejects_wide_draws():
    with pytest.raises(ValueError):
        NoiseStreams(0).standard_block(0, 0, 3, m=5)


def test_zero_scale_block_is_exactly_zero():
    blk = NoiseStreams(1).laplace_block(0.0, 4, CHANNEL_XI, 5, 1)
    assert np.array_equal(blk, np.zeros((5, 1)))


# ---------------------------------------------------------------------------
# condition checking
# ---------------------------------------------------------------------------

def test_bench_conditions_all_pass():
    s = make_set()
    v = check_conditions(s, mu=0.06, q_c_estimate=0.857)
    assert v.lambda_ok and v.ordering_ok and v.alpha0_ok
    assert v.convergence_ok and v.privacy_ok and v.closed_form_ok
    assert v.sum_alpha == pytest.approx(0.015 / 0.009)
    assert math.isfinite(v.d_alpha_xi) and math.isfinite(v.d_alpha_zeta)


def test_equal_ratios_diverge():
    s = make_set(q=0.995, q_xi=0.995)
    v = check_conditions(s, mu=0.06, q_c_estimate=0.857)
    assert v.d_alpha_xi == math.inf
    assert not v.privacy_ok


def test_noise_ratio_squared_above_step_ratio_diverges():
    # q_xi^2 = 0.99 > q = 0.98 makes the noise-to-step sum blow up
    s = make_set(q=0.98, q_xi=math.sqrt(0.99), q_zeta=0.9)
    v = check_conditions(s, mu=0.06, q_c_estimate=0.5)
    assert v.sum_theta_xi_sq_over_alpha == math.inf
    assert not v.convergence_ok


def test_lambda_condition_boundary():
    s = make_set(q=0.9)
    assert check_conditions(s, 0.06, q_c_estimate=0.85).lambda_ok
    assert not check_conditions(s, 0.06, q_c_estimate=0.95).lambda_ok


def test_shrinking_q_never_breaks_step_summability():
    for q in (0.999, 0.9, 0.5, 0.1):
        v = check_conditions(make_set(q=q), 0.06, q_c_estimate=0.05)
        assert math.isfinite(v.sum_alpha)


def test_zero_noise_has_no_privacy():
    s = make_set(theta_xi0=0.0)
    v = check_conditions(s, 0.06, 0.857)
    assert v.d_alpha_xi == math.inf
    assert not v.privacy_ok


# ---------------------------------------------------------------------------
# tail sums
# ---------------------------------------------------------------------------

def test_tail_sum_closed_form_small_case():
    s = make_set(alpha0=0.1, q=0.5, theta_xi0=1.0, q_xi=0.9, theta_zeta0=1.0, q_zeta=0.9)
    t = tail_sums(s)
    assert t["d_alpha_xi"] == pytest.approx(0.1 * 0.9 / 0.4, abs=1e-15)
    assert t["d_alpha_zeta"] == pytest.approx(0.225, abs=1e-15)


def test_tail_sum_divergent_raises():
    with pytest.raises(ValueError):
        tail_sums(make_set(q=0.995, q_xi=0.995))
    with pytest.raises(ValueError):
        tail_sums(make_set(q=0.996, q_xi=0.995))


def test_tail_sum_matches_numeric_partial_sum():
    s = make_set(alpha0=0.015, q=0.991, theta_xi0=0.01, q_xi=0.995)
    t = tail_sums(s)
    ks = np.arange(100_000)
    numeric = float((s.alpha.value(ks) / s.theta_xi.value(ks)).sum())
    assert t["d_alpha_xi"] == pytest.approx(numeric, rel=1e-6)


def test_partial_sum_helper():
    val, ok = partial_sum(lambda k: 0.5**k, n_terms=10_000)
    assert ok and val == pytest.approx(2.0, rel=1e-9)
    val, ok = partial_sum(lambda k: 1.0 / (k + 1.0), n_terms=200_000)
    assert not ok  # harmonic partial sums never settle
