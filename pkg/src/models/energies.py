"""Objective functions of the half-quadratic models.

All energies share the data term 0.5*||u - u0||^2 and are summed over
pixels without normalization. The gradient density g(u) follows the
diffusion discretization: forward differences for NFFD, the average of
the forward and tilde-backward squares for SFFD. With that choice the
u-step stencil is the exact Hessian of the monitored energy under both
schemes.
"""

import logging

import numpy as np

from ..grid.fields import ScalarField, VectorField
from ..grid.operators import forward_grad, tilde_grad
from ..solvers.stencil import Scheme
from .config import Aux, Isotropy, ModelConfig, ModelKind, ModelState

logger = logging.getLogger(__name__)


def component_density(u: ScalarField, scheme: Scheme = Scheme.NFFD) -> VectorField:
    """Squared gradient per component, consistent with ``scheme``."""
    g = forward_grad(u)
    if Scheme(scheme) == Scheme.NFFD:
        return VectorField(g.x * g.x, g.y * g.y)
    t = tilde_grad(u)
    return VectorField(0.5 * (g.x * g.x + t.x * t.x), 0.5 * (g.y * g.y + t.y * t.y))


def gradient_density(u: ScalarField, isotropy: Isotropy, scheme: Scheme = Scheme.NFFD) -> Aux:
    """Per-component density (aniso) or its sum (iso)."""
    c = component_density(u, scheme)
    if Isotropy(isotropy) == Isotropy.ANISO:
        return c
    return c.x + c.y


def data_term(u: ScalarField, u0: ScalarField) -> float:
    r = u - u0
    return 0.5 * float(np.vdot(r, r))


def _components(f: Aux):
    return (f.x, f.y) if isinstance(f, VectorField) else (f,)


def huber_like(r: np.ndarray, a: float) -> np.ndarray:
    """H(r; a) = sqrt(a) r - r^2 / 2 for r <= sqrt(a), a / 2 beyond."""
    root = np.sqrt(a)
    return np.where(r <= root, root * r - 0.5 * r * r, 0.5 * a)


def gr_energy(state: ModelState, u0: ScalarField, mu: float, lam: float,
              isotropy: Isotropy, scheme: Scheme = Scheme.NFFD) -> float:
    """Geman-Reynolds energy; +inf when b leaves [0, 1]."""
    g = gradient_density(state.u, isotropy, scheme)
    total = data_term(state.u, u0)
    for b, gc in zip(_components(state.aux), _components(g)):
        if np.any(b < 0) or np.any(b > 1):
            return np.inf
        total += float(np.sum(0.5 * mu * b * gc + 0.5 * lam * (1.0 - b)))
    return total


def gm_energy(state: ModelState, u0: ScalarField, mu: float, lam: float,
              isotropy: Isotropy, scheme: Scheme = Scheme.NFFD) -> float:
    """Geman-McClure energy; +inf for negative b."""
    g = gradient_density(state.u, isotropy, scheme)
    total = data_term(state.u, u0)
    for b, gc in zip(_components(state.aux), _components(g)):
        if np.any(b < 0):
            return np.inf
        total += 0.5 * mu * float(np.sum(b * gc / lam + b - 2.0 * np.sqrt(b) + 1.0))
    return total


def hl_energy(state: ModelState, u0: ScalarField, mu: float, lam: float,
              isotropy: Isotropy, scheme: Scheme = Scheme.NFFD) -> float:
    """Hebert-Leahy energy; +inf for non-positive b."""
    g = gradient_density(state.u, isotropy, scheme)
    total = data_term(state.u, u0)
    for b, gc in zip(_components(state.aux), _components(g)):
        if np.any(b <= 0):
            return np.inf
        total += 0.5 * mu * float(np.sum(b * gc / lam + b - np.log(b) - 1.0))
    return total


def gy_energy(state: ModelState, u0: ScalarField, mu: float, lam: float,
              isotropy: Isotropy) -> float:
    """Geman-Yang energy with forward-difference coupling."""
    l = state.aux
    g = forward_grad(state.u)
    rx = g.x - l.x
    ry = g.y - l.y
    a = lam / mu
    if Isotropy(isotropy) == Isotropy.ISO:
        h = float(np.sum(huber_like(l.norm(), a)))
    else:
        h = float(np.sum(huber_like(np.abs(l.x), a)) + np.sum(huber_like(np.abs(l.y), a)))
    return data_term(state.u, u0) + 0.5 * mu * float(np.vdot(rx, rx) + np.vdot(ry, ry)) + mu * h


def ms_energy(state: ModelState, u0: ScalarField, alpha: float, lam: float, epsilon: float,
              scheme: Scheme = Scheme.NFFD) -> float:
    """Ambrosio-Tortorelli energy of (u, s)."""
    s = state.aux
    g = gradient_density(state.u, Isotropy.ISO, scheme)
    gs = forward_grad(s)
    edge_length = epsilon * float(np.vdot(gs.x, gs.x) + np.vdot(gs.y, gs.y))
    edge_length += float(np.sum((s - 1.0) ** 2)) / (4.0 * epsilon)
    return data_term(state.u, u0) + alpha * float(np.sum(s * s * g)) + lam * edge_length


def energy(cfg: ModelConfig, state: ModelState, u0: ScalarField) -> float:
    """Evaluate the objective of ``cfg.model`` at ``state``."""
    scheme = cfg.sweep.scheme
    if cfg.model == ModelKind.GR:
        return gr_energy(state, u0, cfg.mu, cfg.lam, cfg.isotropy, scheme)
    if cfg.model == ModelKind.GM:
        return gm_energy(state, u0, cfg.mu, cfg.lam, cfg.isotropy, scheme)
    if cfg.model == ModelKind.HL:
        return hl_energy(state, u0, cfg.mu, cfg.lam, cfg.isotropy, scheme)
    if cfg.model == ModelKind.GY:
        return gy_energy(state, u0, cfg.mu, cfg.lam, cfg.isotropy)
    return ms_energy(state, u0, cfg.alpha, cfg.lam, cfg.epsilon, scheme)


def truncated_objective(u: ScalarField, u0: ScalarField, mu: float, lam: float,
                        isotropy: Isotropy) -> float:
    """Truncated-quadratic objective D(u) + mu/2 * sum min(g, lam/mu).

    Lower bound of the GR and GY energies at any admissible auxiliary.
    """
    g = gradient_density(u, isotropy, Scheme.NFFD)
    cap = lam / mu
    reg = sum(float(np.sum(np.minimum(gc, cap))) for gc in _components(g))
    return data_term(u, u0) + 0.5 * mu * reg
