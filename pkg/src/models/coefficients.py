"""Stencil coefficients of the u- and s-subproblems."""

from typing import NamedTuple, Union

import numpy as np

from ..grid.fields import ScalarField, VectorField
from ..grid.operators import backward_div
from .config import ModelConfig, ModelKind, ModelState
from .energies import gradient_density


class StepCoefficients(NamedTuple):
    """gamma*I - div(d grad) u = rhs."""
    gamma: Union[float, ScalarField]
    d1: ScalarField
    d2: ScalarField
    rhs: ScalarField


def _split(aux) -> tuple:
    if isinstance(aux, VectorField):
        return aux.x, aux.y
    return aux, aux


def u_step_coefficients(cfg: ModelConfig, state: ModelState, u0: ScalarField) -> StepCoefficients:
    """Coefficients of the u-subproblem at the current auxiliary variable.

    Args:
        cfg: Model configuration
        state: Current iterate; only ``state.aux`` enters
        u0: Observed image

    Returns:
        StepCoefficients with gamma = 1 for every model
    """
    shape = u0.shape
    if cfg.model == ModelKind.GY:
        d = np.full(shape, cfg.mu)
        return StepCoefficients(1.0, d, d.copy(), u0 - cfg.mu * backward_div(state.aux))

    if cfg.model == ModelKind.MS:
        d = 2.0 * cfg.alpha * state.aux * state.aux
        return StepCoefficients(1.0, d, d.copy(), u0.copy())

    b1, b2 = _split(state.aux)
    scale = cfg.mu if cfg.model == ModelKind.GR else cfg.mu / cfg.lam
    return StepCoefficients(1.0, scale * b1, scale * b2, u0.copy())


def s_step_coefficients(cfg: ModelConfig, u: ScalarField, s_prev: ScalarField) -> StepCoefficients:
    """Coefficients of the MS edge-indicator subproblem.

    gamma = 2 alpha g(u) + lambda / (2 epsilon) + gamma_prox,
    d = 2 lambda epsilon, rhs = lambda / (2 epsilon) + gamma_prox * s_prev.
    """
    if cfg.model != ModelKind.MS:
        raise ValueError(f"s-step coefficients only exist for the MS model, not {cfg.model.value}")
    g = gradient_density(u, cfg.isotropy, cfg.sweep.scheme)
    reaction = cfg.lam / (2.0 * cfg.epsilon)
    gamma_prox = cfg.gamma_prox if cfg.proximal else 0.0
    gamma = 2.0 * cfg.alpha * g + reaction + gamma_prox
    d = np.full(u.shape, 2.0 * cfg.lam * cfg.epsilon)
    rhs = reaction + gamma_prox * s_prev
    return StepCoefficients(gamma, d, d.copy(), rhs)
