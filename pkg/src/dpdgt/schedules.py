"""Step-size and noise-scale schedules, seeded Laplace sampling, and
machine-checkable verdicts for every summability condition the convergence
and privacy guarantees require.

Only geometric schedules are shipped: value(k) = initial * ratio**k. All
the relevant infinite sums then have closed geometric forms, and the
condition checker reports each one either as its closed-form value or as
divergent (inf). A numeric partial-sum helper covers user-supplied
sequences that are not geometric.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "GeometricSchedule",
    "ScheduleSet",
    "ConditionVerdict",
    "NoiseStreams",
    "CHANNEL_XI",
    "CHANNEL_ZETA",
    "laplace_sample",
    "check_conditions",
    "tail_sums",
    "partial_sum",
]

CHANNEL_XI = 0  # pushed deviation-tracker messages
CHANNEL_ZETA = 1  # pulled dual-drive messages


@dataclass(frozen=True)
class GeometricSchedule:
    """Geometric sequence value(k) = initial * ratio**k.

    ``initial`` may be zero to disable a sequence entirely (zero step size
    or zero noise); when positive the sequence is strictly decreasing.
    """

    initial: float
    ratio: float

    def __post_init__(self):
        if self.initial < 0:
            raise ValueError("schedule initial value must be nonnegative")
        if not (0 < self.ratio < 1):
            raise ValueError("schedule ratio must lie in (0, 1)")

    def value(self, k):
        return self.initial * self.ratio ** np.asarray(k, dtype=float)

    def values(self, n_terms: int) -> np.ndarray:
        return self.initial * self.ratio ** np.arange(n_terms, dtype=float)

    def sum_infinite(self) -> float:
        return self.initial / (1.0 - self.ratio)


@dataclass(frozen=True)
class ScheduleSet:
    """Step-size schedule, two noise-scale schedules, and mixing parameters."""

    alpha: GeometricSchedule
    theta_xi: GeometricSchedule
    theta_zeta: GeometricSchedule
    gamma: float
    phi: float

    def __post_init__(self):
        if not (0 < self.gamma <= 1) or not (0 < self.phi <= 1):
            raise ValueError("mixing parameters gamma and phi must lie in (0, 1]")


@dataclass(frozen=True)
class ConditionVerdict:
    """Closed-form sums and booleans for the step/noise schedule conditions.

    Divergent sums are reported as ``math.inf``. ``convergence_ok`` bundles
    the summability plus geometric-tail conditions under which the noisy
    tracking iteration converges; ``privacy_ok`` the finiteness of both
    step-to-noise tail sums; ``closed_form_ok`` the ratio ordering and
    step-size cap under which the closed-form budget applies.
    """

    sum_alpha: float
    sum_theta_xi_sq: float
    sum_theta_zeta_sq: float
    sum_theta_xi_sq_over_alpha: float
    sum_theta_zeta_sq_over_alpha: float
    d_alpha_xi: float
    d_alpha_zeta: float
    lambda_ok: bool
    ordering_ok: bool
    alpha0_ok: bool
    convergence_ok: bool
    privacy_ok: bool
    closed_form_ok: bool

    def as_dict(self) -> dict:
        return {
            "sum_alpha": self.sum_alpha,
            "sum_theta_xi_sq": self.sum_theta_xi_sq,
            "sum_theta_zeta_sq": self.sum_theta_zeta_sq,
            "sum_theta_xi_sq_over_alpha": self.sum_theta_xi_sq_over_alpha,
            "sum_theta_zeta_sq_over_alpha": self.sum_theta_zeta_sq_over_alpha,
            "d_alpha_xi": self.d_alpha_xi,
            "d_alpha_zeta": self.d_alpha_zeta,
            "lambda_ok": self.lambda_ok,
            "ordering_ok": self.ordering_ok,
            "alpha0_ok": self.alpha0_ok,
            "convergence_ok": self.convergence_ok,
            "privacy_ok": self.privacy_ok,
            "closed_form_ok": self.closed_form_ok,
        }


def _geometric_sum(first: float, ratio: float) -> float:
    """Sum of first * ratio**k over k >= 0, inf when it diverges."""
    if first == 0.0:
        return 0.0
    if ratio >= 1.0:
        return math.inf
    return first / (1.0 - ratio)


def check_conditions(s: ScheduleSet, mu: float, q_c_estimate: float) -> ConditionVerdict:
    """Evaluate every schedule condition in closed form.

    Ratios of geometric sequences are geometric again, e.g.
    theta_xi(k)^2 / alpha(k) has ratio q_xi^2 / q. The geometric-tail
    condition (existence of a decay floor lambda strictly between the
    contraction factor and 1) holds for a geometric step size iff its
    ratio exceeds ``q_c_estimate``; the certificate is then (beta, k0) = (1, 0).
    """
    a0, q = s.alpha.initial, s.alpha.ratio
    tx0, qx = s.theta_xi.initial, s.theta_xi.ratio
    tz0, qz = s.theta_zeta.initial, s.theta_zeta.ratio

    sum_alpha = _geometric_sum(a0, q)
    sum_tx2 = _geometric_sum(tx0**2, qx**2)
    sum_tz2 = _geometric_sum(tz0**2, qz**2)

    if a0 == 0.0:
        sum_tx2_over_a = 0.0 if tx0 == 0.0 else math.inf
        sum_tz2_over_a = 0.0 if tz0 == 0.0 else math.inf
    else:
        sum_tx2_over_a = _geometric_sum(tx0**2 / a0, qx**2 / q)
        sum_tz2_over_a = _geometric_sum(tz0**2 / a0, qz**2 / q)

    # zero noise gives no privacy at all, whatever the step size does
    d_axi = math.inf if tx0 == 0.0 else _geometric_sum(a0 / tx0, q / qx)
    d_azeta = math.inf if tz0 == 0.0 else _geometric_sum(a0 / tz0, q / qz)

    lambda_ok = q_c_estimate < q
    ordering_ok = max(q_c_estimate, qx**2, qz**2) < q < min(qx, qz) < 1.0
    alpha0_ok = a0 < mu * s.gamma * s.phi

    convergence_ok = (
        math.isfinite(sum_alpha)
        and math.isfinite(sum_tx2)
        and math.isfinite(sum_tz2)
        and math.isfinite(sum_tx2_over_a)
        and math.isfinite(sum_tz2_over_a)
        and lambda_ok
    )
    privacy_ok = math.isfinite(sum_alpha) and math.isfinite(d_axi) and math.isfinite(d_azeta)
    closed_form_ok = ordering_ok and alpha0_ok

    return ConditionVerdict(
        sum_alpha=sum_alpha,
        sum_theta_xi_sq=sum_tx2,
        sum_theta_zeta_sq=sum_tz2,
        sum_theta_xi_sq_over_alpha=sum_tx2_over_a,
        sum_theta_zeta_sq_over_alpha=sum_tz2_over_a,
        d_alpha_xi=d_axi,
        d_alpha_zeta=d_azeta,
        lambda_ok=lambda_ok,
        ordering_ok=ordering_ok,
        alpha0_ok=alpha0_ok,
        convergence_ok=convergence_ok,
        privacy_ok=privacy_ok,
        closed_form_ok=closed_form_ok,
    )


def tail_sums(s: ScheduleSet) -> dict:
    """Closed-form step-to-noise tail sums.

    D_alpha_xi = sum_k alpha(k)/theta_xi(k) = (alpha0/theta_xi0) * q_xi/(q_xi - q)
    and analogously for the zeta channel. Raises for configurations where
    either sum diverges (q >= noise ratio, or zero noise scale).
    """
    a0, q = s.alpha.initial, s.alpha.ratio
    out = {}
    for name, sched in (("d_alpha_xi", s.theta_xi), ("d_alpha_zeta", s.theta_zeta)):
        t0, qt = sched.initial, sched.ratio
        if a0 == 0.0:
            out[name] = 0.0
            continue
        if t0 == 0.0 or q >= qt:
            raise ValueError(f"{name} diverges: step ratio must be below the noise ratio")
        out[name] = (a0 / t0) * qt / (qt - q)
    return out


def partial_sum(term, n_terms: int = 1_000_000, rtol: float = 1e-9, chunk: int = 100_000):
    """Numeric partial summation for non-geometric user-supplied sequences.

    ``term`` maps an integer index array to term values. Sums up to
    ``n_terms`` terms in chunks; declares convergence once an entire chunk
    moves the total by less than ``rtol`` relatively. Returns
    (value, converged); a False flag means the sequence should be treated
    as divergent at this truncation.
    """
    total = 0.0
    chunk = min(chunk, max(1, n_terms // 10))
    for start in range(0, n_terms, chunk):
        idx = np.arange(start, min(start + chunk, n_terms))
        contribution = float(np.asarray(term(idx), dtype=float).sum())
        total += contribution
        if start > 0 and abs(contribution) <= rtol * max(1.0, abs(total)):
            return total, True
    return total, False


def _laplace_from_uniform(u):
    """Inverse-CDF map from uniforms in [0, 1) to unit-scale Laplace draws.

    For t = u - 1/2 the draw is -sign(t) * ln(1 - 2|t|); the log argument is
    floored at the smallest positive normal to keep the map total (the
    floor is hit with probability 2**-53 per draw).
    """
    t = np.asarray(u, dtype=float) - 0.5
    w = np.maximum(1.0 - 2.0 * np.abs(t), np.finfo(float).tiny)
    return -np.sign(t) * np.log(w)


def laplace_sample(theta: float, rng: np.random.Generator, size=None):
    """Zero-mean Laplace draw(s) with scale theta (variance 2*theta^2).

    Sampling is by inverse CDF from the generator's uniforms, so identical
    generator state reproduces identical draws bit for bit.
    """
    if theta <= 0:
        raise ValueError("Laplace scale theta must be positive")
    u = rng.random(size)
    out = theta * _laplace_from_uniform(u)
    return float(out) if size is None else out


class NoiseStreams:
    """Per-(agent, iteration, channel) noise substreams from one root seed.

    Substreams are split with a counter-based generator: the stream for
    (agent, iteration, channel) owns the 256-bit counter block
    (agent-1, iteration, channel, 0), so all substreams are pairwise
    distinct initializations of the same keyed generator and every draw is
    a pure function of (seed, agent, iteration, channel). The vectorized
    block path extracts exactly the words those substreams would produce,
    which keeps replay bit-exact whichever path is used.

    One counter block holds four 64-bit words, so at most four noise
    coordinates per agent per channel per iteration are supported; the
    shipped presets use m = 1.
    """

    def __init__(self, seed: int):
        self.seed = int(seed)
        self._key = np.random.SeedSequence(self.seed).generate_state(2, np.uint64)

    def stream(self, agent: int, iteration: int, channel: int) -> np.random.Generator:
        """Dedicated generator for one agent, iteration, and channel (agent 1-based)."""
        if agent < 1:
            raise ValueError("agent labels are 1-based")
        counter = [agent - 1, iteration, channel, 0]
        return np.random.Generator(np.random.Philox(counter=counter, key=self._key))

    def standard_block(self, iteration: int, channel: int, n: int, m: int = 1) -> np.ndarray:
        """Unit-scale Laplace draws for all n agents at one iteration/channel.

        Row i-1 equals the first m draws of ``stream(i, iteration, channel)``.
        """
        if m > 4:
            raise ValueError("at most 4 noise coordinates per agent are supported")
        g = np.random.Generator(
            np.random.Philox(counter=[0, iteration, channel, 0], key=self._key)
        )
        words = g.integers(0, 2**64, size=4 * n, dtype=np.uint64, endpoint=False)
        u = (words.reshape(n, 4)[:, :m] >> np.uint64(11)) * (1.0 / (1 << 53))
        return _laplace_from_uniform(u)

    def laplace_block(self, theta: float, iteration: int, channel: int, n: int, m: int = 1) -> np.ndarray:
        """Scaled Laplace noise matrix; exactly zero when theta == 0."""
        if theta == 0.0:
            return np.zeros((n, m))
        return theta * self.standard_block(iteration, channel, n, m)
