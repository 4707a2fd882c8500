"""Principal and second eigenpairs of the discrete Laplacian, and the
checks that certify the bifurcation point.

Only the two lowest eigenvalues are ever needed, so both are computed by
inverse power iteration (the second with re-orthogonalization against
the principal eigenvector every step) rather than a general eigensolver.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import numpy.typing as npt

from .errors import ConvergenceError
from .mesh import Mesh, inner_product, l2_norm
from .operators import SparseOperator, _cg

__all__ = [
    "Eigenpair",
    "CRReport",
    "principal_eigenpair",
    "second_eigenvalue",
    "second_eigenpair",
    "verify_crandall_rabinowitz",
]

Array = npt.NDArray[np.float64]

_DEFLATED_START_SEED = 20270404


@dataclass(frozen=True, eq=False)
class Eigenpair:
    """Eigenvalue, mesh-normalized eigenvector, and eigen-residual norm."""

    eigenvalue: float
    vector: Array
    residual: float


@dataclass(frozen=True)
class CRReport:
    """Outcome of the simple-eigenvalue bifurcation-point checks.

    kernel_dim_ok certifies a one-dimensional kernel through the
    spectral gap; transversality_value is the kernel projection of the
    mixed derivative, which equals -(u0, u0) = -1 under normalization.
    """

    lambda0: float
    lambda1: float
    gap: float
    kernel_dim_ok: bool
    transversality_value: float
    transversality_ok: bool

    @property
    def bifurcation_point_certified(self) -> bool:
        return self.kernel_dim_ok and self.transversality_ok

    def to_dict(self) -> dict:
        return {
            "lambda0": self.lambda0,
            "lambda1": self.lambda1,
            "gap": self.gap,
            "kernel_dim_ok": self.kernel_dim_ok,
            "transversality_value": self.transversality_value,
            "transversality_ok": self.transversality_ok,
        }


def _rayleigh(L: SparseOperator, mesh: Mesh, v: Array) -> float:
    return inner_product(mesh, v, L.apply(v)) / inner_product(mesh, v, v)


def _inverse_iteration(
    L: SparseOperator,
    mesh: Mesh,
    start: Array,
    tol: float,
    max_steps: int,
    max_cg_iter: int,
    deflate: Array | None = None,
) -> tuple[float, Array, float]:
    """Inverse power iteration on L, optionally deflated against one vector.

    The inner solve tolerance tracks the outer eigen-residual so early
    steps stay cheap; the final steps solve to ~100x below tol.
    """
    v = start.copy()
    if deflate is not None:
        v = v - inner_product(mesh, v, deflate) * deflate
    v = v / l2_norm(mesh, v)
    theta = _rayleigh(L, mesh, v)
    res = l2_norm(mesh, L.apply(v) - theta * v)
    stale = 0
    for step in range(1, max_steps + 1):
        if res <= tol:
            return theta, v, res
        if stale >= 8:
            raise ConvergenceError(
                "inverse iteration stagnated above tolerance (rounding floor reached)",
                residual=res,
                iterations=step,
            )
        inner_tol = min(1e-6, max(0.01 * tol, 0.05 * res))
        x, _, _ = _cg(L.apply, v, rtol=inner_tol, atol=0.0, max_iter=max_cg_iter, x0=v / theta)
        if deflate is not None:
            x = x - inner_product(mesh, x, deflate) * deflate
        x = x / l2_norm(mesh, x)
        theta_new = _rayleigh(L, mesh, x)
        res_new = l2_norm(mesh, L.apply(x) - theta_new * x)
        stale = stale + 1 if res_new > 0.995 * res else 0
        if res_new < res:
            v, theta, res = x, theta_new, res_new
    raise ConvergenceError("inverse iteration did not converge", residual=res, iterations=max_steps)


def principal_eigenpair(
    L: SparseOperator,
    mesh: Mesh,
    tol: float = 1e-10,
    max_steps: int = 500,
) -> Eigenpair:
    """Smallest eigenvalue of L and its positive, mesh-normalized
    eigenfunction.

    The start vector is the constant one; the sign is fixed by flipping
    so the mean value is positive.
    """
    start = np.ones(mesh.n_nodes)
    theta, v, res = _inverse_iteration(L, mesh, start, tol, max_steps, max_cg_iter=max(2000, 4 * L.n))
    if float(np.mean(v)) < 0.0:
        v = -v
    return Eigenpair(eigenvalue=theta, vector=v, residual=res)


def second_eigenpair(
    L: SparseOperator,
    u0: Array,
    mesh: Mesh,
    tol: float = 1e-10,
    max_steps: int = 1000,
) -> tuple[float, Array, float]:
    """Smallest eigenvalue of L on the complement of span{u0}.

    Deflated inverse iteration: the iterate is re-orthogonalized against
    u0 after every solve. The start vector is drawn from a fixed seed so
    runs are reproducible and the start is never accidentally orthogonal
    to the target eigenspace.
    """
    rng = np.random.default_rng(_DEFLATED_START_SEED)
    start = rng.standard_normal(mesh.n_nodes)
    theta, v, res = _inverse_iteration(
        L, mesh, start, tol, max_steps, max_cg_iter=max(2000, 4 * L.n), deflate=u0
    )
    return theta, v, res


def second_eigenvalue(
    L: SparseOperator,
    u0: Array,
    mesh: Mesh,
    tol: float = 1e-10,
    max_steps: int = 1000,
) -> float:
    return second_eigenpair(L, u0, mesh, tol=tol, max_steps=max_steps)[0]


def verify_crandall_rabinowitz(
    lambda0: float,
    lambda1: float,
    u0: Array,
    mesh: Mesh,
    gap_tol: float | None = None,
    trans_tol: float = 1e-6,
) -> CRReport:
    """Check the three bifurcation-point conditions at (lambda0, 0).

    Kernel dimension one is certified by the gap lambda1 - lambda0
    exceeding gap_tol (default 1e-6*lambda0). The transversality value
    is the kernel projection of the mixed derivative applied to u0,
    i.e. -(u0, u0), which must be bounded away from zero.
    """
    if gap_tol is None:
        gap_tol = 1e-6 * abs(lambda0)
    gap = lambda1 - lambda0
    trans = -inner_product(mesh, u0, u0)
    return CRReport(
        lambda0=lambda0,
        lambda1=lambda1,
        gap=gap,
        kernel_dim_ok=bool(gap > gap_tol),
        transversality_value=trans,
        transversality_ok=bool(abs(trans) > trans_tol),
    )
