"""Weak-value expansions, mixture reconstruction, and bistochastic geometry.

The package splits into four layers: ``hilbert`` (bases, fixtures,
validation), ``weakval`` (weak values, transition operators, the expansion
identity), ``reconstruct`` (recovering pre-measurement mixtures from outcome
statistics), and ``birkhoff`` (the doubly stochastic polytope, the
unistochastic region, and the degeneracy surface).  ``cli`` wraps the lot.
"""

from .birkhoff import (
    NotUnistochastic,
    SearchFailed,
    SurfaceScan,
    UnistochasticCertificate,
    canonical_coefficients,
    chain_links,
    combine,
    degeneracy,
    distance,
    equality_defect,
    hypocycloid_boundary,
    is_bistochastic,
    is_unistochastic,
    permutation_corners,
    realize_unitary,
    sample_degenerate_surface,
    simplex_grid,
    triangle_condition,
    unistochastic_degenerate_intersection,
    unitary_phase_search,
)
from .hilbert import (
    BasisPair,
    check_distribution,
    check_hermitian,
    exclusive_pair,
    gauge_transform,
    gell_mann_matrices,
    inner_product,
    is_hermitian,
    pauli_matrices,
    rotated_basis,
    rotated_operator,
    rotated_pair,
    spin_one_matrices,
    standard_basis,
)
from .reconstruct import (
    ReconstructionSolution,
    SingularMeasurement,
    expressed_in_post,
    is_irreversible,
    project,
    reconstruct_diagonal,
    reconstruct_full,
)
from .weakval import (
    OverlapTooSmall,
    WeakValueTable,
    amplified_entries,
    expand,
    fractional_decomposition,
    mixed_w_operator,
    mixed_weak_value,
    overlap_matrix,
    w_operator,
    w_operator_set,
    weak_value,
    weak_value_by_trace,
    weak_value_table,
)

__version__ = "0.1.0"

__all__ = [
    "BasisPair",
    "NotUnistochastic",
    "OverlapTooSmall",
    "ReconstructionSolution",
    "SearchFailed",
    "SingularMeasurement",
    "SurfaceScan",
    "UnistochasticCertificate",
    "WeakValueTable",
    "__version__",
    "amplified_entries",
    "canonical_coefficients",
    "chain_links",
    "check_distribution",
    "check_hermitian",
    "combine",
    "degeneracy",
    "distance",
    "equality_defect",
    "exclusive_pair",
    "expand",
    "expressed_in_post",
    "fractional_decomposition",
    "gauge_transform",
    "gell_mann_matrices",
    "hypocycloid_boundary",
    "inner_product",
    "is_bistochastic",
    "is_hermitian",
    "is_irreversible",
    "is_unistochastic",
    "mixed_w_operator",
    "mixed_weak_value",
    "overlap_matrix",
    "pauli_matrices",
    "permutation_corners",
    "project",
    "realize_unitary",
    "reconstruct_diagonal",
    "reconstruct_full",
    "rotated_basis",
    "rotated_operator",
    "rotated_pair",
    "sample_degenerate_surface",
    "simplex_grid",
    "spin_one_matrices",
    "standard_basis",
    "triangle_condition",
    "unistochastic_degenerate_intersection",
    "unitary_phase_search",
    "w_operator",
    "w_operator_set",
    "weak_value",
    "weak_value_by_trace",
    "weak_value_table",
]
