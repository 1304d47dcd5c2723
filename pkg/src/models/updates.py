"""Auxiliary-variable updates.

Each update is the exact minimizer of the energy in the auxiliary
variable, with u fixed, plus (in proximal mode) a quadratic prox term:
lambda/2 for GR, mu/2 for GM and HL, kappa for GY and gamma_prox for the
MS s-step. ``proximal=False`` drops the prox term.
"""

import logging

import numpy as np

from ..grid.fields import ScalarField, VectorField, constant_field, zero_vector_field
from ..grid.operators import forward_grad
from ..solvers.precond import srbgs, SRBGS_WORK_PER_CYCLE
from ..solvers.stencil import Scheme
from .coefficients import s_step_coefficients
from .config import Aux, Isotropy, ModelConfig, ModelKind, ModelState
from .energies import gradient_density

logger = logging.getLogger(__name__)


def _map_components(fn, *fields):
    """Apply ``fn`` per component of VectorFields, or once to scalar fields."""
    if isinstance(fields[0], VectorField):
        return VectorField(fn(*(f.x for f in fields)), fn(*(f.y for f in fields)))
    return fn(*fields)


def update_b_gr(b_prev: Aux, u: ScalarField, mu: float, lam: float, isotropy: Isotropy,
                scheme: Scheme = Scheme.NFFD, proximal: bool = True,
                legacy_orientation: bool = False) -> Aux:
    """Geman-Reynolds b-update.

    Proximal: clamp(b_prev + 1 - (mu/lam) g, 0, 1).
    Classical: indicator of (mu/lam) g < 1.
    ``legacy_orientation`` swaps the ratio to lam/mu.
    """
    ratio = lam / mu if legacy_orientation else mu / lam
    g = gradient_density(u, isotropy, scheme)
    if proximal:
        return _map_components(lambda b, gc: np.clip(b + 1.0 - ratio * gc, 0.0, 1.0), b_prev, g)
    return _map_components(lambda b, gc: (ratio * gc < 1.0).astype(np.float64), b_prev, g)


def solve_depressed_cubic(p: np.ndarray) -> np.ndarray:
    """Positive real root of x^3 + p x - 1 = 0 for p >= 0.

    Cardano's formula with S = cbrt(1/2 + sqrt(D)), T = cbrt(sqrt(D) - 1/2)
    and D = 1/4 + p^3/27. Since S^3 - T^3 = 1 the root S - T equals
    1 / (S^2 + S T + T^2), which avoids cancellation for large p. One
    Newton step polishes the result.
    """
    disc = np.maximum(0.25 + p ** 3 / 27.0, 0.0)
    root = np.sqrt(disc)
    s = np.cbrt(0.5 + root)
    t = np.cbrt(root - 0.5)
    x = 1.0 / (s * s + s * t + t * t)
    return x - (x ** 3 + p * x - 1.0) / (3.0 * x * x + p)


def update_b_gm(b_prev: Aux, u: ScalarField, mu: float, lam: float, isotropy: Isotropy,
                scheme: Scheme = Scheme.NFFD, proximal: bool = True) -> Aux:
    """Geman-McClure b-update.

    With xi = g / lam, proximal mode solves x^3 + (xi + 1 - b_prev) x - 1 = 0
    and returns b = x^2; classical mode returns 1 / (1 + xi)^2.
    """
    g = gradient_density(u, isotropy, scheme)

    def _update(b, gc):
        xi = gc / lam
        if not proximal:
            return 1.0 / (1.0 + xi) ** 2
        x = solve_depressed_cubic(xi + 1.0 - b)
        return x * x

    return _map_components(_update, b_prev, g)


def update_b_hl(b_prev: Aux, u: ScalarField, mu: float, lam: float, isotropy: Isotropy,
                scheme: Scheme = Scheme.NFFD, proximal: bool = True) -> Aux:
    """Hebert-Leahy b-update.

    Proximal: positive root of b^2 + a b - 1 = 0 with a = xi + 1 - b_prev,
    written as 2 / (a + sqrt(a^2 + 4)). Classical: 1 / (1 + xi).
    """
    g = gradient_density(u, isotropy, scheme)

    def _update(b, gc):
        xi = gc / lam
        if not proximal:
            return 1.0 / (1.0 + xi)
        a = xi + 1.0 - b
        return 2.0 / (a + np.sqrt(a * a + 4.0))

    return _map_components(_update, b_prev, g)


def _shrink(l_hat: np.ndarray, magnitude: np.ndarray, root_a: float, tau: float) -> np.ndarray:
    """Three-branch shrinkage given the magnitude used for the thresholds."""
    safe = np.where(magnitude > 0, magnitude, 1.0)
    middle = l_hat - tau * root_a * l_hat / safe
    outer = l_hat / (1.0 + tau)
    return np.where(
        magnitude <= tau * root_a,
        0.0,
        np.where(magnitude < (1.0 + tau) * root_a, middle, outer),
    )


def update_l_gy(l_prev: VectorField, u: ScalarField, mu: float, lam: float, kappa: float,
                isotropy: Isotropy, proximal: bool = True) -> VectorField:
    """Geman-Yang l-update.

    Proximal: shrink l_hat = l_prev + (mu/kappa) grad u with thresholds
    tau*sqrt(a) and (1 + tau)*sqrt(a), a = lam/mu, tau = mu/kappa. The
    magnitude is the per-component absolute value (aniso) or the pixel's
    Euclidean norm (iso).

    Classical: hard threshold, l = grad u where its magnitude exceeds sqrt(a).
    """
    a = lam / mu
    root_a = np.sqrt(a)
    grad = forward_grad(u)
    iso = Isotropy(isotropy) == Isotropy.ISO

    if not proximal:
        if iso:
            keep = grad.norm() > root_a
            return VectorField(np.where(keep, grad.x, 0.0), np.where(keep, grad.y, 0.0))
        return VectorField(
            np.where(np.abs(grad.x) > root_a, grad.x, 0.0),
            np.where(np.abs(grad.y) > root_a, grad.y, 0.0),
        )

    tau = mu / kappa
    l_hat = VectorField(l_prev.x + tau * grad.x, l_prev.y + tau * grad.y)
    if iso:
        magnitude = l_hat.norm()
        return VectorField(
            _shrink(l_hat.x, magnitude, root_a, tau),
            _shrink(l_hat.y, magnitude, root_a, tau),
        )
    return VectorField(
        _shrink(l_hat.x, np.abs(l_hat.x), root_a, tau),
        _shrink(l_hat.y, np.abs(l_hat.y), root_a, tau),
    )


def update_s_ms(cfg: ModelConfig, u: ScalarField, s_prev: ScalarField) -> ScalarField:
    """Edge-indicator update: ``cfg.sweep.n`` SRBGS cycles from s_prev.

    ``u`` is the image that enters the reaction term 2 alpha g(u).
    """
    coeffs = s_step_coefficients(cfg, u, s_prev)
    return srbgs(coeffs.gamma, coeffs.d1, coeffs.d2, coeffs.rhs, s_prev,
                 cfg.sweep.n, cfg.sweep.scheme)


def update_aux(cfg: ModelConfig, state: ModelState, u_new: ScalarField) -> Aux:
    """Dispatch the auxiliary update of ``cfg.model`` after a u-step.

    Args:
        cfg: Model configuration
        state: Iterate before the u-step (supplies the previous u and aux)
        u_new: Result of the u-step

    Returns:
        The new auxiliary variable
    """
    if cfg.model == ModelKind.GR:
        return update_b_gr(state.aux, u_new, cfg.mu, cfg.lam, cfg.isotropy, cfg.sweep.scheme,
                           cfg.proximal, cfg.gr_legacy_orientation)
    if cfg.model == ModelKind.GM:
        return update_b_gm(state.aux, u_new, cfg.mu, cfg.lam, cfg.isotropy, cfg.sweep.scheme,
                           cfg.proximal)
    if cfg.model == ModelKind.HL:
        return update_b_hl(state.aux, u_new, cfg.mu, cfg.lam, cfg.isotropy, cfg.sweep.scheme,
                           cfg.proximal)
    if cfg.model == ModelKind.GY:
        return update_l_gy(state.aux, u_new, cfg.mu, cfg.lam, cfg.kappa_value, cfg.isotropy,
                           cfg.proximal)
    u_reaction = state.u if cfg.ms_reaction_uses_previous_u else u_new
    return update_s_ms(cfg, u_reaction, state.aux)


def aux_step_work(cfg: ModelConfig) -> float:
    """Work units of one auxiliary update (only the MS s-step sweeps)."""
    if cfg.model == ModelKind.MS:
        return SRBGS_WORK_PER_CYCLE * cfg.sweep.n
    return 0.0


def initial_aux(cfg: ModelConfig, shape) -> Aux:
    """b = 1 (GR, GM, HL), l = 0 (GY), s = 1 (MS)."""
    if cfg.model == ModelKind.GY:
        return zero_vector_field(shape)
    if cfg.model == ModelKind.MS or not cfg.is_aniso:
        return constant_field(shape, 1.0)
    return VectorField(constant_field(shape, 1.0), constant_field(shape, 1.0))
