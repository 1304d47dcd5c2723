"""Conjugate gradients and a dense reference solver for stencil systems."""

import logging
from dataclasses import dataclass, field
from typing import List

import numpy as np
import scipy.linalg

from ..exceptions import SingularSystemError, SolverBreakdownError, StencilError
from ..grid.fields import ScalarField
from .stencil import Coefficient, FivePointStencil, Scheme, apply, assemble, to_dense

logger = logging.getLogger(__name__)


@dataclass
class CgReport:
    """Outcome of a conjugate-gradient solve."""
    solution: ScalarField
    iterations: int
    final_residual: float
    initial_residual: float
    matvec_count: int
    converged: bool
    residual_history: List[float] = field(default_factory=list)


def cg(stencil: FivePointStencil, z: ScalarField, u0: ScalarField,
       rel_tol: float = 1e-6, max_iters: int = 1000) -> CgReport:
    """Solve ``stencil`` u = z by conjugate gradients starting at ``u0``.

    Stops when ||z - A u|| <= rel_tol * ||z - A u0||. Every stencil
    application, including the initial residual, counts as one matvec.

    Args:
        stencil: Symmetric positive definite five-point operator
        z: Right-hand side
        u0: Starting guess (not modified)
        rel_tol: Relative residual tolerance
        max_iters: Iteration cap

    Returns:
        CgReport

    Raises:
        SolverBreakdownError: If a search direction has p^T A p <= 0
    """
    if rel_tol <= 0:
        raise ValueError(f"rel_tol must be positive, got {rel_tol}")
    if u0.shape != stencil.shape or z.shape != stencil.shape:
        raise StencilError("Right-hand side and start must match the stencil shape")

    u = np.array(u0, dtype=np.float64, copy=True)
    r = z - apply(stencil, u)
    matvecs = 1
    rdotr = float(np.vdot(r, r))
    r0_norm = float(np.sqrt(rdotr))
    history = [r0_norm]

    if r0_norm == 0.0:
        return CgReport(u, 0, 0.0, 0.0, matvecs, True, history)

    threshold = rel_tol * r0_norm
    p = r.copy()
    iterations = 0
    converged = False
    for _ in range(max_iters):
        ap = apply(stencil, p)
        matvecs += 1
        curvature = float(np.vdot(p, ap))
        if curvature <= 0:
            raise SolverBreakdownError(
                f"Non-positive curvature {curvature!r} at CG iteration {iterations + 1}",
                {"iteration": iterations + 1, "curvature": curvature},
            )
        alpha = rdotr / curvature
        u += alpha * p
        r -= alpha * ap
        new_rdotr = float(np.vdot(r, r))
        iterations += 1
        history.append(float(np.sqrt(new_rdotr)))
        if history[-1] <= threshold:
            converged = True
            break
        p = r + (new_rdotr / rdotr) * p
        rdotr = new_rdotr

    if not converged:
        logger.warning(
            f"CG stopped after {iterations} iterations with residual {history[-1]:.3e} "
            f"(target {threshold:.3e})"
        )
    else:
        logger.debug(f"CG converged in {iterations} iterations, residual {history[-1]:.3e}")

    return CgReport(u, iterations, history[-1], r0_norm, matvecs, converged, history)


def dense_solve(stencil: FivePointStencil, z: ScalarField) -> ScalarField:
    """Exact solution via Cholesky factorization of the dense matrix.

    Raises:
        StencilError: If the grid is too large to materialize
        SingularSystemError: If the matrix is not positive definite
    """
    dense = to_dense(stencil)
    try:
        factor = scipy.linalg.cho_factor(dense)
    except np.linalg.LinAlgError as e:
        raise SingularSystemError(f"Dense factorization failed: {e}")
    return scipy.linalg.cho_solve(factor, z.ravel()).reshape(stencil.shape)


def cg_prox_step(gamma: Coefficient, d1: ScalarField, d2: ScalarField, rhs: ScalarField,
                 u_prev: ScalarField, eta: float, scheme: Scheme = Scheme.NFFD,
                 rel_tol: float = 1e-3, max_iters: int = 1000) -> CgReport:
    """Solve (T + eta*I) u = rhs + eta*u_prev by CG started at u_prev."""
    stencil = assemble(np.asarray(gamma) + eta, d1, d2, scheme)
    return cg(stencil, rhs + eta * u_prev, u_prev, rel_tol, max_iters)


def cg_plain_step(gamma: Coefficient, d1: ScalarField, d2: ScalarField, rhs: ScalarField,
                  u_prev: ScalarField, scheme: Scheme = Scheme.NFFD,
                  rel_tol: float = 1e-3, max_iters: int = 1000) -> CgReport:
    """Solve T u = rhs by CG started at u_prev, without a proximal shift."""
    stencil = assemble(gamma, d1, d2, scheme)
    return cg(stencil, rhs, u_prev, rel_tol, max_iters)
