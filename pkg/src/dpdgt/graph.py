"""Directed communication graphs and their stochastic mixing matrices.

Agents exchange two kinds of messages over two (possibly different) directed
graphs: dual-drive estimates are *pulled* along a row-stochastic matrix R,
and deviation-tracker values are *pushed* along a column-stochastic matrix C.
This module builds uniformly weighted mixing matrices from edge lists,
checks the spanning-tree/common-root connectivity condition the algorithms
require, and computes Perron vectors together with the spectral contraction
factors of the mixed matrices.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "CommGraph",
    "RootCheck",
    "SpectralData",
    "build_uniform_weights",
    "check_common_root",
    "perron_vectors",
    "spectral_analysis",
]


@dataclass(frozen=True)
class CommGraph:
    """A pair of directed message graphs with their mixing matrices.

    Attributes
    ----------
    n_agents : int
        Number of agents; nodes are labelled 1..n_agents.
    edges_r : frozenset of (int, int)
        Pull edges. (i, j) means agent i pulls dual-drive messages from j.
    edges_c : frozenset of (int, int)
        Push edges. (i, j) means agent i receives pushed tracker values from j.
    R : ndarray, shape (n, n)
        Row-stochastic pull mixing matrix; R[i-1, j-1] > 0 iff j is an
        in-neighbor of i or j == i.
    C : ndarray, shape (n, n)
        Column-stochastic push mixing matrix; C[i-1, j-1] > 0 iff i receives
        pushes from j or i == j.
    """

    n_agents: int
    edges_r: frozenset
    edges_c: frozenset
    R: np.ndarray
    C: np.ndarray


@dataclass(frozen=True)
class RootCheck:
    """Result of the spanning-tree/common-root connectivity test."""

    holds: bool
    common_root: int | None


@dataclass(frozen=True)
class SpectralData:
    """Perron vectors and contraction factors for one (gamma, phi) pair.

    ``rho_r`` is the spectral radius of R_phi - 1*pi_r^T and ``rho_c`` the
    spectral radius of C_gamma - pi_c*1^T, where R_phi = (1-phi)I + phi*R
    and C_gamma = (1-gamma)I + gamma*C. ``q_c_estimate = (1 + rho_c^2)/2``
    is the geometric factor the step-size conditions compare against.
    """

    pi_r: np.ndarray
    pi_c: np.ndarray
    rho_r: float
    rho_c: float
    q_c_estimate: float
    gamma: float
    phi: float


def _check_edges(n_agents: int, edges, name: str) -> set:
    out = set()
    for e in edges:
        i, j = int(e[0]), int(e[1])
        if not (1 <= i <= n_agents and 1 <= j <= n_agents):
            raise ValueError(
                f"{name} edge ({i}, {j}) references a node outside [1, {n_agents}]"
            )
        if i != j:  # self-loops are implicit, drop explicit ones
            out.add((i, j))
    return out


def build_uniform_weights(n_agents: int, edges_r, edges_c) -> CommGraph:
    """Build a CommGraph with uniform weights over (neighbors + self).

    Pull weights: R[i, j] = 1 / (#in-neighbors of i + 1) for every
    in-neighbor j of i and for j == i, which makes R row-stochastic.
    Push weights: C[i, j] = 1 / (#out-neighbors of j + 1) for every receiver
    i of j and for i == j, which makes C column-stochastic.

    Parameters
    ----------
    n_agents : int
        Number of agents (>= 1).
    edges_r : iterable of (int, int)
        Pull edges, (i, j) meaning i pulls from j. 1-based node labels.
    edges_c : iterable of (int, int)
        Push edges, (i, j) meaning i receives pushes from j.

    Returns
    -------
    CommGraph
    """
    if n_agents <= 0:
        raise ValueError("n_agents must be a positive integer")
    er = _check_edges(n_agents, edges_r, "edges_r")
    ec = _check_edges(n_agents, edges_c, "edges_c")

    n = n_agents
    R = np.zeros((n, n))
    for i in range(1, n + 1):
        in_nbrs = [j for (i2, j) in er if i2 == i]
        w = 1.0 / (len(in_nbrs) + 1)
        R[i - 1, i - 1] = w
        for j in in_nbrs:
            R[i - 1, j - 1] = w

    C = np.zeros((n, n))
    for j in range(1, n + 1):
        out_nbrs = [i for (i, j2) in ec if j2 == j]
        w = 1.0 / (len(out_nbrs) + 1)
        C[j - 1, j - 1] = w
        for i in out_nbrs:
            C[i - 1, j - 1] = w

    return CommGraph(n_agents=n, edges_r=frozenset(er), edges_c=frozenset(ec), R=R, C=C)


def _reachable(successors: list[set], root: int, n: int) -> bool:
    """True iff every node 0..n-1 is reachable from ``root`` (0-based)."""
    seen = {root}
    stack = [root]
    while stack:
        u = stack.pop()
        for v in successors[u]:
            if v not in seen:
                seen.add(v)
                stack.append(v)
    return len(seen) == n


def check_common_root(g: CommGraph) -> RootCheck:
    """Check the connectivity condition required by the tracking iterations.

    The pull graph induced by R and the graph induced by C^T must each
    contain a spanning tree, and at least one node must be a root of a
    spanning tree of both. A node r is a spanning-tree root iff every node
    is reachable from r along directed edges; this is decided by plain
    reachability search from each candidate root.
    """
    n = g.n_agents
    # graph induced by a matrix A has an edge u -> v iff A[v, u] > 0
    succ_r = [set(np.nonzero(g.R[:, u] > 0)[0]) - {u} for u in range(n)]
    succ_ct = [set(np.nonzero(g.C[u, :] > 0)[0]) - {u} for u in range(n)]

    roots_r = {u for u in range(n) if _reachable(succ_r, u, n)}
    if not roots_r:
        return RootCheck(holds=False, common_root=None)
    roots_ct = {u for u in range(n) if _reachable(succ_ct, u, n)}
    common = roots_r & roots_ct
    if not common:
        return RootCheck(holds=False, common_root=None)
    return RootCheck(holds=True, common_root=min(common) + 1)


def _perron_power(M: np.ndarray, tol: float = 1e-12, max_iter: int = 100_000):
    """Power iteration for the eigenvector of M at eigenvalue 1.

    M must be nonnegative with spectral radius 1 attained at a simple
    eigenvalue 1 (stochastic matrices qualify). Returns the nonnegative
    eigenvector normalized to unit sum, or None if the iteration does not
    converge within ``max_iter``.
    """
    n = M.shape[0]
    v = np.full(n, 1.0 / n)
    for _ in range(max_iter):
        w = M @ v
        s = w.sum()
        if s <= 0:
            return None
        w = w / s
        if np.max(np.abs(w - v)) < tol:
            return w
        v = w
    return None


def _perron_dense(M: np.ndarray) -> np.ndarray:
    vals, vecs = np.linalg.eig(M)
    idx = int(np.argmin(np.abs(vals - 1.0)))
    v = np.real(vecs[:, idx])
    if v.sum() < 0:
        v = -v
    v = np.clip(v, 0.0, None)
    return v / v.sum()


def _spectral_radius(B: np.ndarray, tol: float = 1e-12, max_iter: int = 100_000) -> float:
    """Spectral radius of a general square matrix.

    Power iteration on the norm growth rate; falls back to a dense
    eigensolve when the iteration does not settle (complex dominant pairs)
    and the matrix is small enough. Raises RuntimeError for large matrices
    with a near-degenerate spectrum.
    """
    n = B.shape[0]
    rng = np.random.default_rng(0)
    v = rng.standard_normal(n)
    v /= np.linalg.norm(v)
    lam_prev = np.inf
    for _ in range(max_iter):
        w = B @ v
        lam = float(np.linalg.norm(w))
        if lam < 1e-300:
            return 0.0
        v = w / lam
        if abs(lam - lam_prev) <= tol * max(lam, 1.0):
            return lam
        lam_prev = lam
    if n <= 64:
        return float(np.max(np.abs(np.linalg.eigvals(B))))
    raise RuntimeError(
        "power iteration for the spectral radius did not converge; "
        "the spectrum is near-degenerate and the matrix is too large for a dense fallback"
    )


def perron_vectors(g: CommGraph) -> tuple[np.ndarray, np.ndarray]:
    """Left Perron vector of R and right Perron vector of C, unit sum each."""
    pi_r = _perron_power(g.R.T)
    if pi_r is None:
        if g.n_agents > 64:
            raise RuntimeError("Perron iteration for R did not converge")
        pi_r = _perron_dense(g.R.T)
    pi_c = _perron_power(g.C)
    if pi_c is None:
        if g.n_agents > 64:
            raise RuntimeError("Perron iteration for C did not converge")
        pi_c = _perron_dense(g.C)
    return pi_r, pi_c


def spectral_analysis(g: CommGraph, gamma: float, phi: float) -> SpectralData:
    """Perron vectors plus contraction factors of the mixed matrices.

    Parameters
    ----------
    g : CommGraph
        Must pass :func:`check_common_root`.
    gamma, phi : float
        Mixing parameters in (0, 1] for the push and pull updates.
    """
    if not (0 < gamma <= 1) or not (0 < phi <= 1):
        raise ValueError("gamma and phi must lie in (0, 1]")
    if not check_common_root(g).holds:
        raise ValueError("graph fails the spanning-tree/common-root condition")

    n = g.n_agents
    pi_r, pi_c = perron_vectors(g)
    eye = np.eye(n)
    R_phi = (1 - phi) * eye + phi * g.R
    C_gamma = (1 - gamma) * eye + gamma * g.C
    rho_r = _spectral_radius(R_phi - np.outer(np.ones(n), pi_r))
    rho_c = _spectral_radius(C_gamma - np.outer(pi_c, np.ones(n)))
    return SpectralData(
        pi_r=pi_r,
        pi_c=pi_c,
        rho_r=rho_r,
        rho_c=rho_c,
        q_c_estimate=(1.0 + rho_c**2) / 2.0,
        gamma=gamma,
        phi=phi,
    )
