"""Invariant checks against dense reference computations.

Each check returns a CheckResult; ``run_suite`` runs all of them on a set
of small grids. The suite backs the ``verify`` command and the test
suite, so every oracle here works on explicit dense matrices or brute
force searches rather than on the stencil code it checks.
"""

import logging
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg

from .grid.fields import ScalarField, Shape, VectorField
from .grid.operators import backward_div, forward_grad, tilde_div, tilde_grad
from .models.coefficients import s_step_coefficients, u_step_coefficients
from .models.config import Isotropy, ModelConfig, ModelKind, ModelState
from .models.energies import energy, huber_like
from .models.updates import solve_depressed_cubic, update_b_gm, update_b_gr, update_b_hl, update_l_gy
from .solvers.precond import SweepSpec, prox_step, red_black_masks
from .solvers.stencil import FivePointStencil, Scheme, apply, assemble, assemble_nffd, assemble_sffd, to_dense

logger = logging.getLogger(__name__)

DEFAULT_SIZES: List[Shape] = [(3, 3), (4, 5), (7, 7)]


@dataclass
class CheckResult:
    """Outcome of one invariant check."""
    name: str
    passed: bool
    detail: str = ""


def _result(name: str, error: float, tol: float, what: str = "error") -> CheckResult:
    passed = bool(np.isfinite(error) and error <= tol)
    return CheckResult(name, passed, f"{what} {error:.3e} (tolerance {tol:.1e})")


def _random_vector(rng: np.random.Generator, shape: Shape) -> VectorField:
    return VectorField(rng.standard_normal(shape), rng.standard_normal(shape))


def random_coefficients(rng: np.random.Generator, shape: Shape) -> Tuple[ScalarField, ScalarField, ScalarField]:
    """gamma in [0.5, 1.5) and diffusion coefficients in [0, 2)."""
    return rng.uniform(0.5, 1.5, shape), rng.uniform(0.0, 2.0, shape), rng.uniform(0.0, 2.0, shape)


# ---------------------------------------------------------------- operators

def check_adjoint(shape: Shape, rng: np.random.Generator) -> CheckResult:
    """<forward_grad u, p> = -<u, backward_div p>."""
    u = rng.standard_normal(shape)
    p = _random_vector(rng, shape)
    g = forward_grad(u)
    lhs = float(np.vdot(g.x, p.x) + np.vdot(g.y, p.y))
    rhs = -float(np.vdot(u, backward_div(p)))
    return _result(f"adjoint forward/backward {shape}", abs(lhs - rhs), 1e-12 * max(1.0, abs(lhs)))


def check_tilde_adjoint(shape: Shape, rng: np.random.Generator) -> CheckResult:
    """<tilde_grad u, p> = -<u, tilde_div p>."""
    u = rng.standard_normal(shape)
    p = _random_vector(rng, shape)
    g = tilde_grad(u)
    lhs = float(np.vdot(g.x, p.x) + np.vdot(g.y, p.y))
    rhs = -float(np.vdot(u, tilde_div(p)))
    return _result(f"adjoint tilde pair {shape}", abs(lhs - rhs), 1e-12 * max(1.0, abs(lhs)))


# ---------------------------------------------------------------- stencils

def check_stencil_symmetry(stencil: FivePointStencil, label: str = "stencil") -> CheckResult:
    dense = to_dense(stencil)
    error = float(np.max(np.abs(dense - dense.T)))
    return _result(f"symmetry {label}", error, 1e-14 * max(1.0, float(np.max(np.abs(dense)))))


def check_constant_preserved(stencil: FivePointStencil, gamma: ScalarField,
                             label: str = "stencil") -> CheckResult:
    """Applying the stencil to a constant c gives gamma * c."""
    c = 0.7
    out = apply(stencil, np.full(stencil.shape, c))
    error = float(np.max(np.abs(out - gamma * c)))
    return _result(f"Neumann constant {label}", error, 1e-13 * max(1.0, float(np.max(stencil.center))))


def check_positive_definite(stencil: FivePointStencil, gamma_min: float,
                            label: str = "stencil") -> CheckResult:
    lam_min = float(scipy.linalg.eigvalsh(to_dense(stencil))[0])
    passed = lam_min >= gamma_min * (1.0 - 1e-12)
    return CheckResult(f"positive definite {label}", passed,
                       f"smallest eigenvalue {lam_min:.6g} vs min gamma {gamma_min:.6g}")


def check_scheme_equivalence(shape: Shape, rng: np.random.Generator) -> CheckResult:
    """Constant coefficients give bitwise identical NFFD and SFFD stencils."""
    gamma = float(rng.uniform(0.5, 1.5))
    d = np.full(shape, float(rng.uniform(0.1, 2.0)))
    a = assemble_nffd(gamma, d, d)
    b = assemble_sffd(gamma, d, d)
    same = all(np.array_equal(getattr(a, k), getattr(b, k))
               for k in ("center", "north", "south", "east", "west"))
    return CheckResult(f"scheme equivalence {shape}", same,
                       "bitwise identical" if same else "stencils differ")


def check_stencils(shape: Shape, rng: np.random.Generator) -> List[CheckResult]:
    results = []
    gamma, d1, d2 = random_coefficients(rng, shape)
    for scheme in Scheme:
        stencil = assemble(gamma, d1, d2, scheme)
        label = f"{scheme.value} {shape}"
        results.append(check_stencil_symmetry(stencil, label))
        results.append(check_constant_preserved(stencil, gamma, label))
        results.append(check_positive_definite(stencil, float(np.min(gamma)), label))
    results.append(check_scheme_equivalence(shape, rng))
    return results


# ---------------------------------------------------------- preconditioner

def red_black_order(shape: Shape) -> np.ndarray:
    """Row-major indices of the red pixels followed by the black ones."""
    red, black = red_black_masks(shape)
    flat = np.arange(shape[0] * shape[1]).reshape(shape)
    return np.concatenate([flat[red], flat[black]])


def sgs_preconditioner(dense: np.ndarray, order: np.ndarray) -> np.ndarray:
    """M = A + L D^-1 L^T for the strict lower triangle L of A in ``order``.

    Returned in the original (row-major) ordering.
    """
    permuted = dense[np.ix_(order, order)]
    lower = np.tril(permuted, k=-1)
    diag = np.diag(permuted)
    m_perm = permuted + lower @ np.diag(1.0 / diag) @ lower.T
    inverse = np.argsort(order)
    return m_perm[np.ix_(inverse, inverse)]


def dense_prox_step(gamma: ScalarField, d1: ScalarField, d2: ScalarField, rhs: ScalarField,
                    u_prev: ScalarField, spec: SweepSpec) -> Tuple[ScalarField, np.ndarray]:
    """Reference for ``prox_step``: u <- u + M^-1 (z - T_eta u), n times.

    Returns:
        Tuple of (result, dense preconditioner M)
    """
    shape = u_prev.shape
    t_eta = to_dense(assemble(gamma + spec.eta, d1, d2, spec.scheme))
    metric = sgs_preconditioner(t_eta, red_black_order(shape))
    z = (rhs + spec.eta * u_prev).ravel()
    u = u_prev.ravel().copy()
    for _ in range(spec.n):
        u = u + scipy.linalg.solve(metric, z - t_eta @ u, assume_a="sym")
    return u.reshape(shape), metric


def check_preconditioner_identity(shape: Shape, rng: np.random.Generator,
                                  spec: SweepSpec) -> List[CheckResult]:
    gamma, d1, d2 = random_coefficients(rng, shape)
    rhs = rng.standard_normal(shape)
    u_prev = rng.standard_normal(shape)
    fast = prox_step(gamma, d1, d2, rhs, u_prev, spec)
    reference, metric = dense_prox_step(gamma, d1, d2, rhs, u_prev, spec)
    label = f"{spec.scheme.value} n={spec.n} {shape}"
    error = float(np.max(np.abs(fast - reference)))
    scale = max(1.0, float(np.max(np.abs(reference))))

    t_dense = to_dense(assemble(gamma, d1, d2, spec.scheme))
    gap = float(scipy.linalg.eigvalsh(metric - t_dense)[0])
    return [
        _result(f"SRBGS equals SGS step {label}", error, 1e-12 * scale),
        CheckResult(f"M - T >= eta {label}", gap >= spec.eta * (1.0 - 1e-8) - 1e-13,
                    f"smallest eigenvalue {gap:.6g} vs eta {spec.eta:.1e}"),
    ]


# ---------------------------------------------------------- auxiliary steps

def _grid_argmin(objective: Callable[..., np.ndarray], grid: np.ndarray, *params: np.ndarray,
                 chunk: int = 100) -> np.ndarray:
    """Grid point minimizing ``objective(grid, *params)`` for each parameter set."""
    flat = [np.ravel(p) for p in params]
    out = np.empty(flat[0].size)
    for start in range(0, out.size, chunk):
        cols = [p[start:start + chunk, None] for p in flat]
        values = objective(grid[None, :], *cols)
        out[start:start + chunk] = grid[np.argmin(values, axis=1)]
    return out


def _range_result(name: str, b: np.ndarray, open_below: bool) -> CheckResult:
    low_ok = np.all(b > 0.0) if open_below else np.all(b >= 0.0)
    passed = bool(low_ok and np.all(b <= 1.0))
    interval = "(0, 1]" if open_below else "[0, 1]"
    return CheckResult(f"{name} in {interval}", passed,
                       f"min {float(np.min(b)):.6g}, max {float(np.max(b)):.6g}")


def check_aux_exactness(rng: np.random.Generator, samples: int = 100_000,
                        search_samples: int = 1_000) -> List[CheckResult]:
    """Closed-form auxiliary updates against residuals and brute force.

    Args:
        rng: Source of the random inputs
        samples: Inputs for the GM/HL residuals and the range checks
        search_samples: Inputs compared against a grid-search minimizer
    """
    results = []

    p = rng.uniform(0.0, 50.0, samples)
    x = solve_depressed_cubic(p)
    residual = np.abs(x ** 3 + p * x - 1.0) / (1.0 + p * x + x ** 3)
    results.append(_result("cubic root residual", float(np.max(residual)), 1e-12))

    shape = (2, max(samples // 2, 2))
    mu, lam = 0.02, 0.05
    u = rng.standard_normal(shape) * 0.3
    b_prev = rng.uniform(0.0, 1.0, shape)
    g = sum(c * c for c in forward_grad(u))
    a = g / lam + 1.0 - b_prev

    b = update_b_gm(b_prev, u, mu, lam, Isotropy.ISO)
    root = np.sqrt(b)
    residual = np.abs(root ** 3 + a * root - 1.0) / (1.0 + a * root + root ** 3)
    results.append(_result("GM cubic residual", float(np.max(residual)), 1e-12))
    results.append(_range_result("GM b", b, open_below=True))

    b = update_b_hl(b_prev, u, mu, lam, Isotropy.ISO)
    residual = np.abs(b * b + a * b - 1.0) / (1.0 + a * b + b * b)
    results.append(_result("HL quadratic residual", float(np.max(residual)), 1e-12))
    results.append(_range_result("HL b", b, open_below=True))

    results.append(_range_result("GR b", update_b_gr(b_prev, u, 3.0, 0.5, Isotropy.ISO), open_below=False))

    # GR: minimize mu/2 b g + lam/2 (1 - b) + lam/4 (b - b_prev)^2 on [0, 1]
    search_shape = (2, max(search_samples // 2, 2))
    mu, lam = 3.0, 0.5
    u = rng.standard_normal(search_shape) * 0.3
    b_prev = rng.uniform(0.0, 1.0, search_shape)
    b = update_b_gr(b_prev, u, mu, lam, Isotropy.ISO)
    g = sum(c * c for c in forward_grad(u))

    def gr_obj(bb, gg, bp):
        return 0.5 * mu * bb * gg + 0.5 * lam * (1.0 - bb) + 0.25 * lam * (bb - bp) ** 2

    best = _grid_argmin(gr_obj, np.linspace(0.0, 1.0, 10_001), g, b_prev)
    results.append(_result("GR prox vs grid search", float(np.max(np.abs(b.ravel() - best))), 1e-3, "distance"))

    # GY (aniso): minimize mu/2 (t - l)^2 + mu H(|l|) + kappa/2 (l - l_prev)^2 per component
    mu, lam, kappa = 1.5, 0.05, 2.0
    u = rng.standard_normal(search_shape) * 0.3
    l_prev = _random_vector(rng, search_shape)
    l_prev = VectorField(0.2 * l_prev.x, 0.2 * l_prev.y)
    l_new = update_l_gy(l_prev, u, mu, lam, kappa, Isotropy.ANISO)
    t = forward_grad(u)
    a = lam / mu

    def gy_obj(ll, tt, lp):
        return 0.5 * mu * (tt - ll) ** 2 + mu * huber_like(np.abs(ll), a) + 0.5 * kappa * (ll - lp) ** 2

    grid = np.linspace(-3.0, 3.0, 10_001)
    distance = max(
        float(np.max(np.abs(getattr(l_new, comp).ravel()
                            - _grid_argmin(gy_obj, grid, getattr(t, comp), getattr(l_prev, comp)))))
        for comp in ("x", "y")
    )
    results.append(_result("GY prox vs grid search", distance, 1e-3, "distance"))
    return results


# ------------------------------------------------------ gradient consistency

def _fd_gradient(fn: Callable[[np.ndarray], float], x: np.ndarray, h: float = 1e-6) -> np.ndarray:
    grad = np.zeros_like(x)
    for idx in np.ndindex(x.shape):
        step = np.zeros_like(x)
        step[idx] = h
        grad[idx] = (fn(x + step) - fn(x - step)) / (2.0 * h)
    return grad


def random_state(cfg: ModelConfig, shape: Shape, rng: np.random.Generator) -> ModelState:
    u = rng.uniform(0.0, 1.0, shape)
    if cfg.model == ModelKind.GY:
        aux = VectorField(0.1 * rng.standard_normal(shape), 0.1 * rng.standard_normal(shape))
    elif cfg.model == ModelKind.MS or not cfg.is_aniso:
        aux = rng.uniform(0.1, 0.9, shape)
    else:
        aux = VectorField(rng.uniform(0.1, 0.9, shape), rng.uniform(0.1, 0.9, shape))
    return ModelState(u, aux)


def gradient_test_configs(scheme: Scheme) -> List[ModelConfig]:
    sweep = SweepSpec(n=1, scheme=scheme)
    configs = []
    for kind in (ModelKind.GR, ModelKind.GM, ModelKind.HL, ModelKind.GY):
        for iso in Isotropy:
            configs.append(ModelConfig(model=kind, isotropy=iso, mu=0.7, lam=0.3, sweep=sweep))
    configs.append(ModelConfig(model=ModelKind.MS, lam=0.1, alpha=2.0, epsilon=0.2, sweep=sweep))
    return configs


def check_gradient_consistency(cfg: ModelConfig, shape: Shape, rng: np.random.Generator) -> List[CheckResult]:
    """u-step (and MS s-step) stencil residual equals the energy gradient."""
    state = random_state(cfg, shape, rng)
    u0 = rng.uniform(0.0, 1.0, shape)
    label = f"{cfg.model.value}/{cfg.isotropy.value}/{cfg.sweep.scheme.value} {shape}"

    coeffs = u_step_coefficients(cfg, state, u0)
    stencil = assemble(coeffs.gamma, coeffs.d1, coeffs.d2, cfg.sweep.scheme)
    analytic = apply(stencil, state.u) - coeffs.rhs
    numeric = _fd_gradient(lambda v: energy(cfg, ModelState(v, state.aux), u0), state.u)
    scale = max(1.0, float(np.max(np.abs(analytic))))
    results = [_result(f"u gradient {label}", float(np.max(np.abs(analytic - numeric))), 1e-6 * scale)]

    if cfg.model == ModelKind.MS:
        s_prev = rng.uniform(0.1, 0.9, shape)
        coeffs = s_step_coefficients(cfg, state.u, s_prev)
        stencil = assemble(coeffs.gamma, coeffs.d1, coeffs.d2, cfg.sweep.scheme)
        analytic = apply(stencil, state.aux) - coeffs.rhs

        def s_objective(s):
            prox = 0.5 * cfg.gamma_prox * float(np.sum((s - s_prev) ** 2))
            return energy(cfg, ModelState(state.u, s), u0) + prox

        numeric = _fd_gradient(s_objective, state.aux)
        scale = max(1.0, float(np.max(np.abs(analytic))))
        results.append(_result(f"s gradient {label}", float(np.max(np.abs(analytic - numeric))), 1e-6 * scale))
    return results


# ------------------------------------------------------------------- suite

def run_suite(sizes: Optional[Sequence[Shape]] = None, seed: int = 0,
              sweeps: Sequence[int] = (1, 3)) -> List[CheckResult]:
    """Run every check on every grid size.

    Args:
        sizes: Grid shapes (default 3x3, 4x5, 7x7)
        seed: Seed of the random test data
        sweeps: Cycle counts used for the preconditioner identity

    Returns:
        List of CheckResult, in execution order
    """
    rng = np.random.default_rng(seed)
    sizes = list(sizes) if sizes else DEFAULT_SIZES
    results: List[CheckResult] = []
    for shape in sizes:
        results.append(check_adjoint(shape, rng))
        results.append(check_tilde_adjoint(shape, rng))
        results.extend(check_stencils(shape, rng))
        for scheme in Scheme:
            for n in sweeps:
                results.extend(check_preconditioner_identity(shape, rng, SweepSpec(n=n, eta=1e-3, scheme=scheme)))
    results.extend(check_aux_exactness(rng))
    for scheme in Scheme:
        for cfg in gradient_test_configs(scheme):
            results.extend(check_gradient_consistency(cfg, (4, 4), rng))

    failed = [r for r in results if not r.passed]
    for r in failed:
        logger.error(f"FAILED {r.name}: {r.detail}")
    logger.info(f"Verification: {len(results) - len(failed)}/{len(results)} checks passed")
    return results
