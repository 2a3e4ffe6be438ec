"""Privacy accounting: sensitivity bounds and the cumulative budget.

Between two adjacent executions coupled through identical observations,
only the perturbed agent's transmitted values can drift. The drift is
bounded in l1 by the linear recursion

    [phi_{k+1}]   [1-gamma      alpha_k/mu      ] [phi_k]   alpha_k*delta [1]
    [eta_{k+1}] = [2-gamma  1-phi+alpha_k/mu    ] [eta_k] + ------------- [1]
                                                                 mu

from (phi_0, eta_0) = (0, 0), where phi_k bounds the pushed tracker
deviation and eta_k the pulled dual-drive deviation. The cumulative budget
is then

    epsilon = (delta + D_eta) / (mu*gamma*phi) * (D_alpha_xi + phi*D_alpha_zeta)

with D_eta a sup-bound on eta_k and D_alpha_* the step-to-noise tail sums.
For geometric schedules with alpha0 < mu*gamma*phi everything collapses to
a closed form, implemented in :func:`epsilon_closed_form`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .schedules import ScheduleSet, tail_sums

__all__ = [
    "SensitivityTrajectory",
    "PrivacyReport",
    "sensitivity_dynamics",
    "d_eta_bound",
    "epsilon_budget",
    "epsilon_closed_form",
]


@dataclass(frozen=True)
class SensitivityTrajectory:
    """l1 deviation bounds for the perturbed agent's transmitted values."""

    phi: np.ndarray  # (k_max + 1,), pushed tracker bound, phi[0] = 0
    eta: np.ndarray  # (k_max + 1,), pulled dual-drive bound, eta[0] = 0
    k_max: int


@dataclass(frozen=True)
class PrivacyReport:
    """Cumulative budget with the quantities that produced it."""

    epsilon: float
    d_eta: float
    d_alpha_xi: float
    d_alpha_zeta: float
    mu: float
    gamma: float
    phi_mix: float
    delta: float
    method: str  # "numeric" or "closed_form" D_eta evaluation
    failing_condition: str | None = None

    def as_dict(self) -> dict:
        return {
            "epsilon": self.epsilon,
            "d_eta": self.d_eta,
            "d_alpha_xi": self.d_alpha_xi,
            "d_alpha_zeta": self.d_alpha_zeta,
            "mu": self.mu,
            "gamma": self.gamma,
            "phi_mix": self.phi_mix,
            "delta": self.delta,
            "method": self.method,
            "failing_condition": self.failing_condition,
        }


def sensitivity_dynamics(
    schedules: ScheduleSet, mu: float, delta: float, k_max: int
) -> SensitivityTrajectory:
    """Iterate the deviation-bound recursion exactly as written.

    Returns trajectories of length k_max + 1 starting from (0, 0).
    """
    if mu <= 0:
        raise ValueError("strong-convexity modulus mu must be positive")
    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    gamma, phi_mix = schedules.gamma, schedules.phi
    alpha = schedules.alpha.values(k_max)
    phi = np.empty(k_max + 1)
    eta = np.empty(k_max + 1)
    phi[0] = eta[0] = 0.0
    p, e = 0.0, 0.0
    for k in range(k_max):
        drive = alpha[k] * delta / mu
        coup = alpha[k] / mu
        p_next = (1.0 - gamma) * p + coup * e + drive
        e_next = (2.0 - gamma) * p + (1.0 - phi_mix + coup) * e + drive
        phi[k + 1] = p = p_next
        eta[k + 1] = e = e_next
    return SensitivityTrajectory(phi=phi, eta=eta, k_max=k_max)


def d_eta_bound(
    schedules: ScheduleSet,
    mu: float,
    delta: float,
    mode: str = "numeric",
    k_max: int = 100_000,
) -> float:
    """Sup-bound on the dual-drive deviation eta_k.

    closed_form
        2*alpha0*delta / (gamma*phi*mu - alpha0); requires
        alpha0 < mu*gamma*phi. Note this expression dominates the
        recursion sup only when the initial step is small relative to
        mu*gamma*phi; for larger feasible steps (such as 2*alpha0 close
        to mu*gamma*phi) the recursion can peak above it, and the numeric
        mode is then the certified bound.
    numeric
        sup of eta_k from :func:`sensitivity_dynamics` over a horizon of
        ``k_max``, with an early stop once eta has been nonincreasing for
        100 consecutive steps and the remaining forcing
        alpha_k*(delta + sup eta)/(mu*gamma*phi) can no longer push eta
        above its running maximum. A certified over-approximation of the
        infimum-form bound, which has no constructive recipe.
    """
    gamma, phi_mix = schedules.gamma, schedules.phi
    cap = mu * gamma * phi_mix
    if mode == "closed_form":
        a0 = schedules.alpha.initial
        if not a0 < cap:
            raise ValueError(
                f"closed-form bound requires alpha0 < mu*gamma*phi ({a0} >= {cap})"
            )
        return 2.0 * a0 * delta / (cap - a0)
    if mode != "numeric":
        raise ValueError("mode must be 'numeric' or 'closed_form'")
    if delta == 0.0:
        return 0.0

    alpha = schedules.alpha.values(k_max)
    p, e = 0.0, 0.0
    eta_max = 0.0
    nonincreasing = 0
    for k in range(k_max):
        drive = alpha[k] * delta / mu
        coup = alpha[k] / mu
        p_next = (1.0 - gamma) * p + coup * e + drive
        e_next = (2.0 - gamma) * p + (1.0 - phi_mix + coup) * e + drive
        nonincreasing = nonincreasing + 1 if e_next <= e else 0
        p, e = p_next, e_next
        eta_max = max(eta_max, e)
        if (
            nonincreasing >= 100
            and eta_max > 0.0
            and alpha[k] * (delta + eta_max) / cap <= eta_max
        ):
            break
    return eta_max


def epsilon_budget(
    schedules: ScheduleSet,
    mu: float,
    delta: float,
    d_eta_mode: str = "numeric",
    k_max: int = 100_000,
) -> PrivacyReport:
    """Cumulative privacy budget for the private tracking iteration.

    Combines the drive-deviation bound with the step-to-noise tail sums.
    Divergent tail sums are reported as epsilon = inf with the failing
    condition named rather than raised. Identical problems (delta == 0)
    always get epsilon = 0.
    """
    gamma, phi_mix = schedules.gamma, schedules.phi
    if delta == 0.0:
        return PrivacyReport(
            epsilon=0.0, d_eta=0.0, d_alpha_xi=math.nan, d_alpha_zeta=math.nan,
            mu=mu, gamma=gamma, phi_mix=phi_mix, delta=0.0, method=d_eta_mode,
        )
    try:
        tails = tail_sums(schedules)
    except ValueError as exc:
        return PrivacyReport(
            epsilon=math.inf, d_eta=math.nan, d_alpha_xi=math.inf, d_alpha_zeta=math.inf,
            mu=mu, gamma=gamma, phi_mix=phi_mix, delta=delta, method=d_eta_mode,
            failing_condition=str(exc),
        )
    d_eta = d_eta_bound(schedules, mu, delta, mode=d_eta_mode, k_max=k_max)
    eps = (delta + d_eta) / (mu * gamma * phi_mix) * (
        tails["d_alpha_xi"] + phi_mix * tails["d_alpha_zeta"]
    )
    return PrivacyReport(
        epsilon=eps, d_eta=d_eta, d_alpha_xi=tails["d_alpha_xi"],
        d_alpha_zeta=tails["d_alpha_zeta"], mu=mu, gamma=gamma, phi_mix=phi_mix,
        delta=delta, method=d_eta_mode,
    )


def epsilon_closed_form(
    alpha0: float,
    q: float,
    theta_xi0: float,
    q_xi: float,
    theta_zeta0: float,
    q_zeta: float,
    gamma: float,
    phi_mix: float,
    mu: float,
    delta: float,
) -> float:
    """Closed-form cumulative budget for geometric schedules.

    epsilon = alpha0*delta*(gamma*phi*mu + alpha0)
              / (gamma*phi*mu * (gamma*phi*mu - alpha0))
              * ( q_xi/(theta_xi0*(q_xi - q)) + phi*q_zeta/(theta_zeta0*(q_zeta - q)) )

    Requires alpha0 < mu*gamma*phi (the bound's denominator) and
    q < {q_xi, q_zeta} < 1 (finite tail sums); these are exactly the
    conditions the expression needs to be a valid finite budget. The full
    schedule ordering that additionally guarantees convergence, including
    the squared noise ratios and the graph contraction factor, lives in
    the schedule condition checker.
    """
    cap = mu * gamma * phi_mix
    if not alpha0 < cap:
        raise ValueError(f"closed form requires alpha0 < mu*gamma*phi ({alpha0} >= {cap})")
    if not (q < min(q_xi, q_zeta) < 1.0):
        raise ValueError("closed form requires q < {q_xi, q_zeta} < 1 for finite tail sums")
    if theta_xi0 <= 0 or theta_zeta0 <= 0:
        raise ValueError("closed form requires positive noise scales")
    prefactor = alpha0 * delta * (cap + alpha0) / (cap * (cap - alpha0))
    return prefactor * (
        q_xi / (theta_xi0 * (q_xi - q)) + phi_mix * q_zeta / (theta_zeta0 * (q_zeta - q))
    )
