"""Weak values, transition operators, and the operator expansion they induce.

For an admissible basis pair the weak value of an operator A at post index l
and pre index j is

    wv[l, j] = <phi_l|A|psi_j> / <phi_l|psi_j>,

and the rank-one transition operator attached to the same index pair is

    W[l, j] = |phi_l><psi_j| / <psi_j|phi_l>.

Weighting each W by its weak value and squared overlap reassembles A exactly:
A = sum_{l,j} wv[l, j] * W[l, j] * mu[l, j] with mu[l, j] = |<phi_l|psi_j>|^2.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .hilbert import OVERLAP_TOL, BasisPair, check_distribution

__all__ = [
    "OverlapTooSmall",
    "WeakValueTable",
    "amplified_entries",
    "expand",
    "fractional_decomposition",
    "mixed_w_operator",
    "mixed_weak_value",
    "overlap_matrix",
    "w_operator",
    "w_operator_set",
    "weak_value",
    "weak_value_by_trace",
    "weak_value_table",
]


class OverlapTooSmall(ValueError):
    """A post/pre overlap is too small to divide by.

    Attributes ``l``, ``j`` and ``magnitude`` identify the offending entry:
    |<phi_l|psi_j>| = magnitude <= OVERLAP_TOL.  Weak values diverge as the
    overlap vanishes, so no finite answer is meaningful past this point.
    """

    def __init__(self, l, j, magnitude):
        super().__init__(
            f"overlap |<phi_{l}|psi_{j}>| = {magnitude:.3e} is below "
            f"{OVERLAP_TOL:.0e}; the weak value there is unbounded"
        )
        self.l = int(l)
        self.j = int(j)
        self.magnitude = float(magnitude)


@dataclass(frozen=True, eq=False)
class WeakValueTable:
    """The full n x n grid of weak values for one operator and basis pair.

    ``values[l, j]`` has the post index l on rows and the pre index j on
    columns.  The operator and pair are kept so the table can be expanded
    back into the operator it came from.
    """

    values: np.ndarray
    operator: np.ndarray
    pair: BasisPair

    @property
    def dim(self) -> int:
        return self.values.shape[0]


def _overlap_or_raise(pair, l, j):
    g = complex(np.vdot(pair.post[:, l], pair.pre[:, j]))
    if abs(g) <= OVERLAP_TOL:
        raise OverlapTooSmall(l, j, abs(g))
    return g


def weak_value(a, pair, l, j):
    """<phi_l|A|psi_j> / <phi_l|psi_j> for a single index pair."""
    a = np.asarray(a, dtype=complex)
    g = _overlap_or_raise(pair, l, j)
    return complex(np.vdot(pair.post[:, l], a @ pair.pre[:, j]) / g)


def w_operator(pair, l, j):
    """The transition operator |phi_l><psi_j| / <psi_j|phi_l>.

    Rank one with unit trace for every admissible index pair.
    """
    g = _overlap_or_raise(pair, l, j)
    return np.outer(pair.post[:, l], pair.pre[:, j].conj()) / np.conj(g)


def w_operator_set(pair):
    """All transition operators as one array; ``wset[l, j]`` is W[l, j]."""
    g = pair.overlaps()
    small = np.abs(g) <= OVERLAP_TOL
    if np.any(small):
        l, j = np.argwhere(small)[0]
        raise OverlapTooSmall(l, j, abs(g[l, j]))
    outer = pair.post.T[:, None, :, None] * pair.pre.conj().T[None, :, None, :]
    return outer / g.conj()[:, :, None, None]


def overlap_matrix(pair):
    """The doubly stochastic weight matrix mu[l, j] = |<phi_l|psi_j>|^2.

    Defined for any pair; zero entries are allowed here (they only forbid the
    corresponding weak values, not the weights).
    """
    g = pair.overlaps()
    return np.abs(g) ** 2


def weak_value_table(a, pair):
    """Compute every weak value of ``a`` over the pair at once.

    Raises OverlapTooSmall (with the first offending index pair) when the
    pair is not admissible.
    """
    a = np.asarray(a, dtype=complex)
    g = pair.overlaps()
    small = np.abs(g) <= OVERLAP_TOL
    if np.any(small):
        l, j = np.argwhere(small)[0]
        raise OverlapTooSmall(l, j, abs(g[l, j]))
    values = (pair.post.conj().T @ a @ pair.pre) / g
    return WeakValueTable(values=values, operator=a, pair=pair)


def expand(table):
    """Reassemble the operator from its weak values: sum wv * W * mu.

    Algebraically exact; numerically the residual stays at machine precision
    even for nearly orthogonal pairs because the overlap divides out.
    """
    pair = table.pair
    g = pair.overlaps()
    mu = np.abs(g) ** 2
    coeff = table.values * mu / g.conj()
    return pair.post @ coeff @ pair.pre.conj().T


def weak_value_by_trace(a, wset, l, j):
    """Recover wv[l, j] from the transition operators alone.

    Uses the dual-frame trace form tr(A W[l, j]^dagger); tracing against
    W[l, j] itself would give the complex conjugate instead.
    """
    a = np.asarray(a, dtype=complex)
    return complex(np.trace(a @ wset[l, j].conj().T))


def mixed_w_operator(pair, p, q):
    """Transition operator of a statistical mixture: sum_lj q[l] p[j] W[l, j]."""
    p = check_distribution(p)
    q = check_distribution(q)
    g = pair.overlaps()
    small = np.abs(g) <= OVERLAP_TOL
    if np.any(small):
        l, j = np.argwhere(small)[0]
        raise OverlapTooSmall(l, j, abs(g[l, j]))
    coeff = np.outer(q, p) / g.conj()
    return pair.post @ coeff @ pair.pre.conj().T


def mixed_weak_value(a, pair, p, q):
    """Weak value between mixtures: sum_lj q[l] p[j] wv[l, j].

    ``p`` weights the pre basis, ``q`` the post basis.  Equals
    tr(A . mixed_w_operator(pair, p, q)^dagger).
    """
    p = check_distribution(p)
    q = check_distribution(q)
    table = weak_value_table(a, pair)
    return complex(q @ table.values @ p)


def fractional_decomposition(a, pair, k, side="pre"):
    """Split one diagonal matrix element into weak-value fractions.

    side="pre":  terms[l] = wv[l, k] * mu[l, k], summing to <psi_k|A|psi_k>.
    side="post": terms[j] = wv[k, j] * mu[k, j], summing to <phi_k|A|phi_k>.

    Each term is computed as <phi|A|psi> * conj(<phi|psi>), so no division
    occurs and zero overlaps contribute zero instead of failing.
    """
    a = np.asarray(a, dtype=complex)
    g = pair.overlaps()
    num = pair.post.conj().T @ a @ pair.pre
    if side == "pre":
        return num[:, k] * g[:, k].conj()
    if side == "post":
        return num[k, :] * g[k, :].conj()
    raise ValueError(f"side must be 'pre' or 'post', got {side!r}")


def amplified_entries(table, margin=1e-12):
    """Mask of weak values lying outside the operator's spectral range.

    True where |wv[l, j]| exceeds max |eigenvalue|: the signature of weak
    amplification, impossible for ordinary expectation values.
    """
    bound = float(np.max(np.abs(np.linalg.eigvalsh(table.operator))))
    return np.abs(table.values) > bound + margin
