"""Half-quadratic model definitions: configuration, energies and updates."""

from .config import ModelKind, Isotropy, ModelConfig, ModelState
from .energies import energy, gradient_density, truncated_objective
from .coefficients import StepCoefficients, u_step_coefficients, s_step_coefficients
from .updates import (
    update_b_gr,
    update_b_gm,
    update_b_hl,
    update_l_gy,
    update_s_ms,
    update_aux,
    initial_aux,
)

__all__ = [
    "ModelKind",
    "Isotropy",
    "ModelConfig",
    "ModelState",
    "energy",
    "gradient_density",
    "truncated_objective",
    "StepCoefficients",
    "u_step_coefficients",
    "s_step_coefficients",
    "update_b_gr",
    "update_b_gm",
    "update_b_hl",
    "update_l_gy",
    "update_s_ms",
    "update_aux",
    "initial_aux",
]
