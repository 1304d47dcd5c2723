"""Symmetric red-black Gauss-Seidel sweeps and the preconditioned prox step.

One SRBGS cycle updates every red pixel, then every black pixel, then
every red pixel again, each from the current values of its neighbours. A
pixel is red when i + j is even (one-based, equivalently zero-based). One
cycle is one symmetric Gauss-Seidel sweep in red-black ordering, so n
cycles started from u_prev form a preconditioned step whose metric M
satisfies M - T >= eta*I for the eta-shifted system T + eta*I.
"""

import logging
from typing import Tuple

import numpy as np
from pydantic import BaseModel, Field

from ..exceptions import StencilError
from ..grid.fields import ScalarField, Shape
from .stencil import Coefficient, FivePointStencil, Scheme, assemble, neighbor_sum

logger = logging.getLogger(__name__)

ETA_MAX = 1e-2
SRBGS_WORK_PER_CYCLE = 1.5


class SweepSpec(BaseModel):
    """Inner-solver settings shared by every u-step."""
    n: int = Field(default=10, ge=1, description="SRBGS cycles per outer iteration")
    eta: float = Field(default=1e-5, gt=0, le=ETA_MAX, description="Proximal shift of the u-step")
    scheme: Scheme = Field(default=Scheme.NFFD, description="Diffusion discretization")

    class Config:
        frozen = True


def red_black_masks(shape: Shape) -> Tuple[np.ndarray, np.ndarray]:
    """Boolean (red, black) masks; red where i + j is even."""
    ii, jj = np.indices(shape)
    red = (ii + jj) % 2 == 0
    return red, ~red


def _half_sweep(stencil: FivePointStencil, z: ScalarField, u: ScalarField, mask: np.ndarray) -> None:
    # Pixels of one colour only couple to the other colour.
    nb = neighbor_sum(stencil, u)
    u[mask] = (z[mask] - nb[mask]) / stencil.center[mask]


def srbgs_stencil(stencil: FivePointStencil, z: ScalarField, u0: ScalarField, n: int) -> ScalarField:
    """Run ``n`` red-black-red cycles for ``stencil`` u = z starting at ``u0``.

    Raises:
        StencilError: If a centre coefficient is not positive
    """
    if n < 1:
        raise ValueError(f"Number of SRBGS cycles must be positive, got {n}")
    if z.shape != stencil.shape or u0.shape != stencil.shape:
        raise StencilError(
            f"Shapes of rhs {z.shape} and start {u0.shape} must match stencil {stencil.shape}"
        )
    if np.any(stencil.center <= 0):
        raise StencilError("Stencil centre coefficients must be positive for Gauss-Seidel sweeps")

    red, black = red_black_masks(stencil.shape)
    u = np.array(u0, dtype=np.float64, copy=True)
    for _ in range(n):
        _half_sweep(stencil, z, u, red)
        _half_sweep(stencil, z, u, black)
        _half_sweep(stencil, z, u, red)
    return u


def srbgs(gamma: Coefficient, d1: ScalarField, d2: ScalarField, z: ScalarField,
          u0: ScalarField, n: int, scheme: Scheme = Scheme.NFFD) -> ScalarField:
    """Assemble gamma*I - div(d grad) and run ``n`` SRBGS cycles on it.

    Args:
        gamma: Positive reaction coefficient
        d1: x-direction diffusion coefficient
        d2: y-direction diffusion coefficient
        z: Right-hand side
        u0: Starting field (not modified)
        n: Number of red-black-red cycles
        scheme: Diffusion discretization

    Returns:
        The field after ``n`` cycles
    """
    stencil = assemble(gamma, d1, d2, scheme)
    return srbgs_stencil(stencil, z, u0, n)


def prox_step(gamma: Coefficient, d1: ScalarField, d2: ScalarField, rhs: ScalarField,
              u_prev: ScalarField, spec: SweepSpec) -> ScalarField:
    """Preconditioned proximal u-step.

    Runs ``spec.n`` SRBGS cycles on (T + eta*I) u = rhs + eta*u_prev from
    u_prev, where T = gamma*I - div(d grad) under ``spec.scheme``.
    """
    return srbgs(
        np.asarray(gamma) + spec.eta,
        d1,
        d2,
        rhs + spec.eta * u_prev,
        u_prev,
        spec.n,
        spec.scheme,
    )


def prox_step_work(spec: SweepSpec) -> float:
    """Work units spent by one ``prox_step``."""
    return SRBGS_WORK_PER_CYCLE * spec.n
