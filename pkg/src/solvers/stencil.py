"""Five-point stencils for the quadratic u- and s-subproblems.

Every subproblem matrix has the form gamma*I - div(d grad) with
non-negative diffusion coefficients d1 (x-direction) and d2 (y-direction).
It is stored as five coefficient arrays; neighbour coefficients pointing
outside the grid are exactly zero (homogeneous Neumann boundary).

Two discretizations are supported:

- NFFD: edge weights d1[i, j] between rows i and i+1, d2[i, j] between
  columns j and j+1.
- SFFD: the same assembly applied to the averaged weights
  (d1[i, j] + d1[i+1, j]) / 2 and (d2[i, j] + d2[i, j+1]) / 2.

For constant coefficients both produce bitwise identical stencils.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Union

import numpy as np

from ..exceptions import StencilError
from ..grid.fields import ScalarField, Shape, check_same_shape

logger = logging.getLogger(__name__)

MAX_DENSE_PIXELS = 4096

Coefficient = Union[float, ScalarField]


class Scheme(str, Enum):
    """Discretization of the variable-coefficient diffusion term."""
    NFFD = "nffd"
    SFFD = "sffd"


@dataclass(frozen=True)
class FivePointStencil:
    """Coefficients of a symmetric five-point operator.

    ``north`` couples pixel (i, j) to (i-1, j), ``south`` to (i+1, j),
    ``west`` to (i, j-1) and ``east`` to (i, j+1).
    """
    center: ScalarField
    north: ScalarField
    south: ScalarField
    east: ScalarField
    west: ScalarField

    @property
    def shape(self) -> Shape:
        return self.center.shape

    @property
    def size(self) -> int:
        return self.center.size


def _check_coefficients(gamma: Coefficient, d1: ScalarField, d2: ScalarField) -> ScalarField:
    check_same_shape(d1, d2, names=("d1", "d2"))
    gamma_arr = np.asarray(gamma, dtype=np.float64)
    if gamma_arr.ndim != 0 and gamma_arr.shape != d1.shape:
        raise StencilError(
            f"gamma shape {gamma_arr.shape} does not match coefficient shape {d1.shape}",
            {"gamma_shape": gamma_arr.shape, "shape": d1.shape},
        )
    gamma_field = np.broadcast_to(gamma_arr, d1.shape)
    if np.any(d1 < 0) or np.any(d2 < 0):
        raise StencilError("Diffusion coefficients must be non-negative")
    if np.any(gamma_field <= 0):
        raise StencilError("Reaction coefficient gamma must be positive")
    return gamma_field


def _from_edge_weights(gamma: ScalarField, wx: np.ndarray, wy: np.ndarray) -> FivePointStencil:
    """Build the stencil from vertical (wx) and horizontal (wy) edge weights."""
    shape = gamma.shape
    north = np.zeros(shape)
    south = np.zeros(shape)
    east = np.zeros(shape)
    west = np.zeros(shape)

    south[:-1, :] = -wx
    north[1:, :] = -wx
    east[:, :-1] = -wy
    west[:, 1:] = -wy

    center = np.array(gamma, dtype=np.float64, copy=True)
    center[:-1, :] += wx
    center[1:, :] += wx
    center[:, :-1] += wy
    center[:, 1:] += wy
    return FivePointStencil(center=center, north=north, south=south, east=east, west=west)


def assemble_nffd(gamma: Coefficient, d1: ScalarField, d2: ScalarField) -> FivePointStencil:
    """Assemble gamma*I - div(d grad) with forward-difference edge weights.

    Args:
        gamma: Positive reaction coefficient (scalar or field)
        d1: Non-negative x-direction diffusion coefficient; its last row is unused
        d2: Non-negative y-direction diffusion coefficient; its last column is unused

    Returns:
        FivePointStencil

    Raises:
        StencilError: On negative diffusion or non-positive gamma
    """
    gamma_field = _check_coefficients(gamma, d1, d2)
    return _from_edge_weights(gamma_field, d1[:-1, :], d2[:, :-1])


def assemble_sffd(gamma: Coefficient, d1: ScalarField, d2: ScalarField) -> FivePointStencil:
    """Assemble the symmetric discretization with averaged edge weights."""
    gamma_field = _check_coefficients(gamma, d1, d2)
    alpha1 = 0.5 * (d1[:-1, :] + d1[1:, :])
    alpha2 = 0.5 * (d2[:, :-1] + d2[:, 1:])
    return _from_edge_weights(gamma_field, alpha1, alpha2)


def assemble(gamma: Coefficient, d1: ScalarField, d2: ScalarField,
             scheme: Scheme = Scheme.NFFD) -> FivePointStencil:
    """Dispatch on ``scheme``."""
    if Scheme(scheme) == Scheme.SFFD:
        return assemble_sffd(gamma, d1, d2)
    return assemble_nffd(gamma, d1, d2)


def neighbor_sum(stencil: FivePointStencil, u: ScalarField) -> ScalarField:
    """Off-diagonal part of the stencil applied to ``u``."""
    out = np.zeros_like(u)
    out[1:, :] += stencil.north[1:, :] * u[:-1, :]
    out[:-1, :] += stencil.south[:-1, :] * u[1:, :]
    out[:, 1:] += stencil.west[:, 1:] * u[:, :-1]
    out[:, :-1] += stencil.east[:, :-1] * u[:, 1:]
    return out


def apply(stencil: FivePointStencil, u: ScalarField) -> ScalarField:
    """Matrix-vector product of the stencil with ``u`` (one work unit)."""
    if u.shape != stencil.shape:
        raise StencilError(f"Field shape {u.shape} does not match stencil shape {stencil.shape}")
    return stencil.center * u + neighbor_sum(stencil, u)


def quadratic_value(stencil: FivePointStencil, z: ScalarField, u: ScalarField) -> float:
    """0.5 <A u, u> - <z, u> for the stencil matrix A."""
    return float(0.5 * np.vdot(apply(stencil, u), u) - np.vdot(z, u))


def to_dense(stencil: FivePointStencil) -> np.ndarray:
    """Materialize the stencil as a dense (mn x mn) matrix in row-major order.

    Raises:
        StencilError: If the grid has more than MAX_DENSE_PIXELS pixels
    """
    m, n = stencil.shape
    size = m * n
    if size > MAX_DENSE_PIXELS:
        raise StencilError(
            f"Grid {m}x{n} is too large for dense materialization (limit {MAX_DENSE_PIXELS} pixels)"
        )
    idx = np.arange(size).reshape(m, n)
    dense = np.zeros((size, size))
    dense[idx.ravel(), idx.ravel()] = stencil.center.ravel()
    dense[idx[1:, :].ravel(), idx[:-1, :].ravel()] = stencil.north[1:, :].ravel()
    dense[idx[:-1, :].ravel(), idx[1:, :].ravel()] = stencil.south[:-1, :].ravel()
    dense[idx[:, 1:].ravel(), idx[:, :-1].ravel()] = stencil.west[:, 1:].ravel()
    dense[idx[:, :-1].ravel(), idx[:, 1:].ravel()] = stencil.east[:, :-1].ravel()
    return dense
