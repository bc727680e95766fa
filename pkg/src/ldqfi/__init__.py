"""Logarithmic-derivative operators and quantum information values for
smooth families of full-rank density matrices.

The package constructs four logarithmic-derivative operators of a
parametrized state family — defined by dividing the eigenbasis matrix of
the state derivative by the logarithmic, harmonic, geometric or arithmetic
mean of eigenvalue pairs — and evaluates the associated information
quantities, Cramér–Rao bounds and closed-form references on a zoo of
finite and truncated infinite-dimensional models.
"""

from __future__ import annotations

from .errors import (
    DegenerateCrossing,
    DegenerateInformation,
    DomainError,
    InvalidInput,
    QfiError,
    ResourceLimit,
    SingularState,
    TruncationError,
)
from .family import (
    Analytic,
    CentralDifference,
    DensityMatrix,
    NonsmoothProjectionState,
    ProjectionAuditReport,
    SpectralBranches,
    SpectralCluster,
    StateFamily,
    branches_at,
    nonsmooth_projection_state,
    projection_audit,
    projection_curvature_residual,
    random_analytic_family,
    spectral_branches,
)
from .ldops import (
    MODELS,
    LdOperator,
    bvn_ld,
    kernel_matrix,
    kmb_residual,
    ld1,
    ld2,
    ld_operator,
    sld,
    zero_expectation_check,
)
from .linalg import (
    logmean_kernel,
    logmean_matrix,
    matrix_function,
    random_hermitian,
    schatten_norm,
)
from .qfi import (
    CrCheck,
    QfiReport,
    breve_variance,
    classical_information,
    compute_report,
    local_cr_check,
    maximality_check,
    ncopy_qfi,
    qfi_bvn,
    qfi_split,
    qfi_value,
    qfi_variance,
    relative_entropy,
    relent_limit,
)
from .zoo import (
    CoherentFamily,
    Ld2Verdict,
    TraceRow,
    TwoLevelFamily1,
    TwoLevelFamily2,
    TwoLevelForms,
    coherent_branches,
    coherent_family,
    coherent_projection_prime,
    coherent_qfi_bvn,
    coherent_qfi_ld2,
    coherent_trace_table,
    coherent_trunc_dim,
    counterexample_family,
    default_two_level_1,
    displacement_closed_form,
    geometric_family,
    geometric_information,
    geometric_qfi,
    geometric_trunc_dim,
    grid_domain,
    sweep_family,
    two_level_closed_forms,
    two_level_qfi_oracle,
    validate_family_config,
)

__all__ = [
    "Analytic",
    "CentralDifference",
    "CoherentFamily",
    "CrCheck",
    "DegenerateCrossing",
    "DegenerateInformation",
    "DensityMatrix",
    "DomainError",
    "InvalidInput",
    "Ld2Verdict",
    "LdOperator",
    "MODELS",
    "NonsmoothProjectionState",
    "ProjectionAuditReport",
    "QfiError",
    "QfiReport",
    "ResourceLimit",
    "SingularState",
    "SpectralBranches",
    "SpectralCluster",
    "StateFamily",
    "TraceRow",
    "TruncationError",
    "TwoLevelFamily1",
    "TwoLevelFamily2",
    "TwoLevelForms",
    "branches_at",
    "breve_variance",
    "bvn_ld",
    "classical_information",
    "coherent_branches",
    "coherent_family",
    "coherent_projection_prime",
    "coherent_qfi_bvn",
    "coherent_qfi_ld2",
    "coherent_trace_table",
    "coherent_trunc_dim",
    "compute_report",
    "counterexample_family",
    "default_two_level_1",
    "displacement_closed_form",
    "geometric_family",
    "geometric_information",
    "geometric_qfi",
    "geometric_trunc_dim",
    "grid_domain",
    "kernel_matrix",
    "kmb_residual",
    "ld1",
    "ld2",
    "ld_operator",
    "local_cr_check",
    "logmean_kernel",
    "logmean_matrix",
    "matrix_function",
    "maximality_check",
    "ncopy_qfi",
    "nonsmooth_projection_state",
    "projection_audit",
    "projection_curvature_residual",
    "qfi_bvn",
    "qfi_split",
    "qfi_value",
    "qfi_variance",
    "random_analytic_family",
    "random_hermitian",
    "relative_entropy",
    "relent_limit",
    "schatten_norm",
    "sld",
    "spectral_branches",
    "sweep_family",
    "two_level_closed_forms",
    "two_level_qfi_oracle",
    "validate_family_config",
    "zero_expectation_check",
]

__version__ = "0.1.0"
