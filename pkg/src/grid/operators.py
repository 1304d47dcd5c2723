"""Finite-difference operators on the pixel grid.

forward_grad / backward_div form the adjoint pair used by every model
(<forward_grad(u), p> = -<u, backward_div(p)>). tilde_grad / tilde_div are
the backward-type pair that enters the symmetric (SFFD) discretization
(<tilde_grad(u), p> = -<u, tilde_div(p)>).

Each 1-D operator acts along rows for the x-component and along columns
for the y-component.
"""

from enum import Enum

import numpy as np

from .fields import ScalarField, VectorField, check_same_shape


class GradMode(str, Enum):
    """Which squared-gradient quantity to compute."""
    ISOTROPIC = "isotropic"
    COMPONENT1 = "component1"
    COMPONENT2 = "component2"


def _forward_1d(u: np.ndarray, axis: int) -> np.ndarray:
    out = np.zeros_like(u)
    if axis == 0:
        out[:-1, :] = u[1:, :] - u[:-1, :]
    else:
        out[:, :-1] = u[:, 1:] - u[:, :-1]
    return out


def _backward_1d(p: np.ndarray, axis: int) -> np.ndarray:
    # first index p_1, interior p_i - p_{i-1}, last -p_{m-1}
    out = np.empty_like(p)
    if axis == 0:
        out[0, :] = p[0, :]
        out[1:-1, :] = p[1:-1, :] - p[:-2, :]
        out[-1, :] = -p[-2, :]
    else:
        out[:, 0] = p[:, 0]
        out[:, 1:-1] = p[:, 1:-1] - p[:, :-2]
        out[:, -1] = -p[:, -2]
    return out


def _tilde_backward_1d(u: np.ndarray, axis: int) -> np.ndarray:
    out = np.zeros_like(u)
    if axis == 0:
        out[1:, :] = u[1:, :] - u[:-1, :]
    else:
        out[:, 1:] = u[:, 1:] - u[:, :-1]
    return out


def _tilde_forward_1d(p: np.ndarray, axis: int) -> np.ndarray:
    # first index p_2, interior p_{i+1} - p_i, last -p_m
    out = np.empty_like(p)
    if axis == 0:
        out[0, :] = p[1, :]
        out[1:-1, :] = p[2:, :] - p[1:-1, :]
        out[-1, :] = -p[-1, :]
    else:
        out[:, 0] = p[:, 1]
        out[:, 1:-1] = p[:, 2:] - p[:, 1:-1]
        out[:, -1] = -p[:, -1]
    return out


def forward_grad(u: ScalarField) -> VectorField:
    """Forward differences; zero on the last row (x) and last column (y)."""
    return VectorField(_forward_1d(u, 0), _forward_1d(u, 1))


def backward_div(p: VectorField) -> ScalarField:
    """Backward divergence, the negative adjoint of ``forward_grad``."""
    check_same_shape(p.x, p.y, names=("p.x", "p.y"))
    return _backward_1d(p.x, 0) + _backward_1d(p.y, 1)


def tilde_grad(u: ScalarField) -> VectorField:
    """Backward differences that vanish on the first row / column."""
    return VectorField(_tilde_backward_1d(u, 0), _tilde_backward_1d(u, 1))


def tilde_div(p: VectorField) -> ScalarField:
    """Negative adjoint of ``tilde_grad``."""
    check_same_shape(p.x, p.y, names=("p.x", "p.y"))
    return _tilde_forward_1d(p.x, 0) + _tilde_forward_1d(p.y, 1)


def grad_sq(u: ScalarField, mode: GradMode = GradMode.ISOTROPIC) -> ScalarField:
    """Squared forward-gradient magnitude or one squared component.

    Args:
        u: Scalar field
        mode: ISOTROPIC gives |grad u|^2, COMPONENT1 / COMPONENT2 give the
            squared x / y forward difference

    Returns:
        Non-negative field of the same shape; exactly zero for constant u
    """
    mode = GradMode(mode)
    g = forward_grad(u)
    if mode == GradMode.COMPONENT1:
        return g.x * g.x
    if mode == GradMode.COMPONENT2:
        return g.y * g.y
    return g.x * g.x + g.y * g.y
