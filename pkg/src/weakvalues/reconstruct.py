"""Recovering a pre-measurement mixture from post-measurement statistics.

Alice prepares a mixture of the pre basis vectors with weights rho_psi and
sends it through Bob's projective measurement in the post basis.  Bob sees
outcome frequencies tau[m] = sum_j mu[m, j] rho_psi[j].  As long as the
weight matrix mu is invertible, tau determines both rho_psi and the
off-diagonal matrix elements of the post-measurement state: the measurement
is reversible in principle.  When det(mu) = 0 the history is erased.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .hilbert import BasisPair, check_distribution
from .weakval import overlap_matrix

# |det mu| at or below this is treated as an exactly singular measurement.
DET_TOL = 1e-10
# Components of a recovered mixture may stray this far outside [0, 1] before
# the solution is flagged unphysical.
PHYSICAL_TOL = 1e-9

__all__ = [
    "DET_TOL",
    "PHYSICAL_TOL",
    "ReconstructionSolution",
    "SingularMeasurement",
    "expressed_in_post",
    "is_irreversible",
    "project",
    "reconstruct_diagonal",
    "reconstruct_full",
]


class SingularMeasurement(ValueError):
    """The measurement's weight matrix is singular; the input state is lost.

    ``det_magnitude`` carries |det(mu)| for diagnostics.
    """

    def __init__(self, det_magnitude):
        super().__init__(
            f"|det mu| = {det_magnitude:.3e} <= {DET_TOL:.0e}: the outcome "
            "statistics no longer determine the prepared state"
        )
        self.det_magnitude = float(det_magnitude)


@dataclass(frozen=True, eq=False)
class ReconstructionSolution:
    """Everything the outcome statistics determine about the prepared state.

    ``rho_psi`` are the recovered mixture weights on the pre basis.
    ``rho_phi_offdiag[m, k]`` (m != k) are the off-diagonal elements of the
    state written in the post basis; its diagonal is left zero (the diagonal
    there is the observed tau itself).  ``condition`` is the reciprocal
    condition number of mu, ``residual`` the least-squares residual of the
    defining linear system, and ``physical`` is False when any recovered
    weight strays outside [0, 1] beyond tolerance.
    """

    rho_psi: np.ndarray
    rho_phi_offdiag: np.ndarray
    condition: float
    residual: float
    physical: bool


def project(rho_psi, pair):
    """Outcome distribution tau[m] = sum_j mu[m, j] rho_psi[j]."""
    rho_psi = check_distribution(rho_psi)
    mu = overlap_matrix(pair)
    if rho_psi.shape[0] != mu.shape[1]:
        raise ValueError("state weights do not match the basis dimension")
    return mu @ rho_psi


def expressed_in_post(rho_psi, pair):
    """The mixed state sum_j rho_psi[j] |psi_j><psi_j| in the post basis."""
    rho_psi = np.asarray(rho_psi, dtype=float)
    g = pair.overlaps()
    return g @ np.diag(rho_psi) @ g.conj().T


def _mu_or_singular(pair):
    mu = overlap_matrix(pair)
    det = abs(float(np.linalg.det(mu)))
    if det <= DET_TOL:
        raise SingularMeasurement(det)
    return mu, det


def is_irreversible(pair):
    """(flag, |det mu|): True when the measurement destroys the state's history."""
    mu = overlap_matrix(pair)
    det = abs(float(np.linalg.det(mu)))
    return det <= DET_TOL, det


def reconstruct_diagonal(pair, tau):
    """Fast path: recover only the mixture weights, rho_psi = mu^-1 tau."""
    tau = check_distribution(tau, tol=1e-12)
    mu, _ = _mu_or_singular(pair)
    if tau.shape[0] != mu.shape[0]:
        raise ValueError("tau does not match the basis dimension")
    return np.linalg.solve(mu, tau)


def reconstruct_full(pair, tau):
    """Recover the mixture weights and post-basis off-diagonals jointly.

    Solves the full n^2 x n^2 linear system that ties the unknowns together:
    one equation per (post outcome m, pre vector j),

        G[m, j] X[j, j] - sum_{l != m} G[l, j] X[m, l] = G[m, j] tau[m],

    where G holds the raw overlaps, the diagonal unknowns X[j, j] are
    rho_psi, and the off-diagonal unknowns X[m, l] are the post-basis matrix
    elements.  The system is solved least-squares; for an invertible mu it is
    square and nonsingular and the residual reported in the solution stays at
    machine level.
    """
    tau = check_distribution(tau, tol=1e-12)
    mu, _ = _mu_or_singular(pair)
    n = mu.shape[0]
    if tau.shape[0] != n:
        raise ValueError("tau does not match the basis dimension")
    g = pair.overlaps()

    def unknown(k, l):
        if k == l:
            return k
        return n + k * (n - 1) + (l if l < k else l - 1)

    size = n * n
    system = np.zeros((size, size), dtype=complex)
    rhs = np.zeros(size, dtype=complex)
    for m in range(n):
        for j in range(n):
            row = m * n + j
            system[row, unknown(j, j)] += g[m, j]
            for l in range(n):
                if l != m:
                    system[row, unknown(m, l)] -= g[l, j]
            rhs[row] = g[m, j] * tau[m]
    solution, *_ = np.linalg.lstsq(system, rhs, rcond=None)
    residual = float(np.linalg.norm(system @ solution - rhs))

    rho_psi = solution[:n].real
    offdiag = np.zeros((n, n), dtype=complex)
    for m in range(n):
        for l in range(n):
            if l != m:
                offdiag[m, l] = solution[unknown(m, l)]

    smin, smax = np.linalg.svd(mu, compute_uv=False)[[-1, 0]]
    condition = float(smin / smax) if smax > 0 else 0.0
    physical = bool(
        np.min(rho_psi) >= -PHYSICAL_TOL and np.max(rho_psi) <= 1.0 + PHYSICAL_TOL
    )
    return ReconstructionSolution(
        rho_psi=rho_psi,
        rho_phi_offdiag=offdiag,
        condition=condition,
        residual=residual,
        physical=physical,
    )
