"""Discrete potential theory on resistance networks and comparison of conductances."""

from .graph_core import (
    Network,
    NetworkError,
    VertexFunction,
    apply_laplacian,
    degree,
    delta,
    energy_form,
    energy_norm,
    sup_seminorm,
    validate,
)
from .energy_space import (
    EnergyKernel,
    dipole,
    effective_resistance,
    energy_kernel,
    harmonic_subspace,
    royden_project,
    schur_reduce,
)
from .comparison import (
    ConductancePair,
    adjoint_inclusion,
    conjugation_identity_residual,
    cross_adjoint,
    edge_ratio_transfer,
    embedding_norm,
    harmonic_transfer_invariant,
    lower_bound_criterion,
    validate_pair,
)
from .spectral import (
    DiscreteMeasure,
    SpectralDecomposition,
    eigensystem,
    inverse_via_heat,
    moment,
    monotonicity_check,
    operator_norm,
    spectral_measure,
)
from .walks import (
    WalkResult,
    escape_probability_exact,
    escape_probability_mc,
    reciprocity_report,
    transition_probability,
)

__version__ = "0.1.0"
