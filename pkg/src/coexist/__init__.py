"""Numerical toolkit for co-existence of states in semilinear elliptic
Dirichlet problems: locates the bifurcation point on the trivial branch,
verifies the simple-eigenvalue bifurcation conditions, computes the
branch derivatives mu_s(0) and mu_ss(0), classifies the local geometry
into nine types, and validates the classification by tracing the
nontrivial branch.
"""

__version__ = "0.1.0"

from .continuation import (
    Branch,
    BranchFit,
    BranchPoint,
    fit_local_expansion,
    jacobian_apply,
    residual,
    solve_at_amplitude,
    trace_branch,
)
from .diagnostics import (
    AnalysisResult,
    BifurcationDiagnostics,
    CoexistenceSide,
    CoexistenceType,
    Moments,
    TableRow,
    Tolerances,
    classify,
    compute_mu_s,
    compute_mu_ss,
    compute_z_s,
    psi3_sigma_form,
    psi_k_table,
    run_analysis,
    run_diagnostics,
)
from .errors import CoexistError, ConfigError, ConvergenceError, SolvabilityError
from .mesh import DomainSpec, Mesh, build_mesh, inner_product, l2_norm
from .nonlinearity import NonlinearityModel, apply, apply_derivative, derivative_at_zero
from .operators import (
    BorderedSolution,
    SparseOperator,
    assemble_laplacian,
    bordered_solve,
    solve_spd,
)
from .spectrum import (
    CRReport,
    Eigenpair,
    principal_eigenpair,
    second_eigenpair,
    second_eigenvalue,
    verify_crandall_rabinowitz,
)

__all__ = [
    "__version__",
    "DomainSpec",
    "Mesh",
    "build_mesh",
    "inner_product",
    "l2_norm",
    "SparseOperator",
    "BorderedSolution",
    "assemble_laplacian",
    "solve_spd",
    "bordered_solve",
    "Eigenpair",
    "CRReport",
    "principal_eigenpair",
    "second_eigenvalue",
    "second_eigenpair",
    "verify_crandall_rabinowitz",
    "NonlinearityModel",
    "derivative_at_zero",
    "apply",
    "apply_derivative",
    "CoexistenceType",
    "CoexistenceSide",
    "Moments",
    "BifurcationDiagnostics",
    "Tolerances",
    "AnalysisResult",
    "TableRow",
    "compute_mu_s",
    "compute_z_s",
    "compute_mu_ss",
    "psi3_sigma_form",
    "classify",
    "run_analysis",
    "run_diagnostics",
    "psi_k_table",
    "BranchPoint",
    "BranchFit",
    "Branch",
    "residual",
    "jacobian_apply",
    "solve_at_amplitude",
    "trace_branch",
    "fit_local_expansion",
    "CoexistError",
    "ConfigError",
    "ConvergenceError",
    "SolvabilityError",
]
