"""Outer alternating-minimization loop.

Each outer iteration performs a preconditioned u-step (SRBGS by default,
CG variants for benchmarking) followed by the auxiliary update of the
configured model, evaluates the energy and records a TraceRecord. The
energy must not increase; a violation beyond ``monotone_rel_tol`` aborts
the run with EnergyIncreaseError.
"""

import logging
import time
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from pydantic import BaseModel, Field
from scipy import stats

from .exceptions import EnergyIncreaseError, GridError, InsufficientDataError
from .grid.fields import ScalarField, as_scalar_field, field_ravel
from .metrics import PsnrValue, psnr, step_norm
from .models.coefficients import u_step_coefficients
from .models.config import ModelConfig, ModelKind, ModelState
from .models.energies import energy, truncated_objective
from .models.updates import aux_step_work, initial_aux, update_aux
from .solvers.linsolve import cg_plain_step, cg_prox_step
from .solvers.precond import prox_step, prox_step_work

logger = logging.getLogger(__name__)

MIN_RATE_POINTS = 5
UNDERFLOW_RATIO = 1e-12


class USolver(str, Enum):
    """Inner solver of the u-step."""
    SRBGS = "srbgs"
    CG_PROX = "cg-prox"
    CG_NOPROX = "cg-noprox"


class RunConfig(BaseModel):
    """Outer-loop settings."""
    model: ModelConfig = Field(..., description="Model and inner-sweep parameters")
    max_outer_iters: int = Field(default=300, ge=0, description="Outer iteration cap")
    energy_rel_tol: float = Field(default=1e-8, ge=0, description="Relative energy-change stop criterion")
    monotone_rel_tol: float = Field(
        default=1e-10, ge=0, description="Allowed energy increase relative to the initial energy"
    )
    check_monotone: bool = Field(default=True, description="Abort on energy increase")
    u_solver: USolver = Field(default=USolver.SRBGS, description="Inner solver of the u-step")
    cg_rel_tol: float = Field(default=1e-3, gt=0, description="Relative residual tolerance of CG u-steps")
    cg_max_iters: int = Field(default=1000, ge=1, description="Iteration cap of CG u-steps")
    record_iterates: bool = Field(default=False, description="Keep every iterate for rate fitting")
    reference: Optional[np.ndarray] = Field(None, description="Clean image for PSNR monitoring")

    class Config:
        arbitrary_types_allowed = True


@dataclass
class TraceRecord:
    """Monitors of one outer iteration (work units and seconds are cumulative)."""
    outer_iter: int
    energy: float
    psnr: Optional[PsnrValue]
    u_step: float
    aux_step: float
    work_units: float
    seconds: float
    truncated: Optional[float] = None
    step_sq_sum: float = 0.0


@dataclass
class SolverTrace:
    """History of a run."""
    initial_energy: float
    records: List[TraceRecord] = field(default_factory=list)
    iterates: List[np.ndarray] = field(default_factory=list)
    converged: bool = False

    def __len__(self) -> int:
        return len(self.records)

    @property
    def energies(self) -> List[float]:
        return [r.energy for r in self.records]

    @property
    def final_energy(self) -> float:
        return self.records[-1].energy if self.records else self.initial_energy

    def to_dataframe(self) -> pd.DataFrame:
        columns = ["outer_iter", "energy", "psnr", "u_step", "aux_step",
                   "work_units", "seconds", "truncated", "step_sq_sum"]
        return pd.DataFrame([vars(r) for r in self.records], columns=columns)

    def is_monotone(self, rel_tol: float = 1e-10) -> bool:
        """True when no recorded energy exceeds its predecessor beyond tolerance."""
        tol = rel_tol * max(abs(self.initial_energy), 1.0)
        previous = self.initial_energy
        for e in self.energies:
            if e > previous + tol:
                return False
            previous = e
        return True

    def summability_bound_holds(self, weight: float) -> bool:
        """Check sum ||du||^2 + ||daux||^2 <= 2 (L0 - LK) / weight.

        ``weight`` is min(eta, auxiliary prox weight); each outer step
        decreases the energy by at least weight/2 times its squared length.
        """
        if not self.records:
            return True
        drop = self.initial_energy - self.final_energy
        slack = 1e-9 * max(abs(self.initial_energy), 1.0)
        return self.records[-1].step_sq_sum <= 2.0 * (drop + slack) / weight

    def distances_to_final(self) -> List[float]:
        """||z_k - z_K|| for every recorded iterate except the last."""
        if not self.iterates:
            raise InsufficientDataError("Run with record_iterates=True to measure distances")
        final = self.iterates[-1]
        return [float(np.linalg.norm(z - final)) for z in self.iterates[:-1]]

    def work_to_reach(self, rel_gap: float = 1e-3) -> Optional[float]:
        """Cumulative work units when the energy first falls within
        ``rel_gap`` of the final energy."""
        target = self.final_energy + rel_gap * abs(self.final_energy)
        for r in self.records:
            if r.energy <= target:
                return r.work_units
        return None


@dataclass
class RateFit:
    slope: float
    r_squared: float
    points: int


def _flatten(state: ModelState) -> np.ndarray:
    return np.concatenate([field_ravel(state.u), field_ravel(state.aux)])


def _u_step(cfg: RunConfig, state: ModelState, u0: ScalarField) -> Tuple[ScalarField, float]:
    model = cfg.model
    coeffs = u_step_coefficients(model, state, u0)
    spec = model.sweep
    if cfg.u_solver == USolver.SRBGS:
        u_new = prox_step(coeffs.gamma, coeffs.d1, coeffs.d2, coeffs.rhs, state.u, spec)
        return u_new, prox_step_work(spec)
    if cfg.u_solver == USolver.CG_PROX:
        report = cg_prox_step(coeffs.gamma, coeffs.d1, coeffs.d2, coeffs.rhs, state.u, spec.eta,
                              spec.scheme, cfg.cg_rel_tol, cfg.cg_max_iters)
    else:
        report = cg_plain_step(coeffs.gamma, coeffs.d1, coeffs.d2, coeffs.rhs, state.u,
                               spec.scheme, cfg.cg_rel_tol, cfg.cg_max_iters)
    logger.debug(f"u-step CG: {report.iterations} iterations, {report.matvec_count} matvecs")
    return report.solution, float(report.matvec_count)


def run(cfg: RunConfig, u0) -> Tuple[ModelState, SolverTrace]:
    """Minimize the configured model energy starting from u = u0.

    Args:
        cfg: Run configuration
        u0: Observed image, at least 2x2 with finite entries

    Returns:
        Tuple of (final state, trace)

    Raises:
        GridError: On an invalid image or a reference of another shape
        EnergyIncreaseError: When the energy rises beyond tolerance
    """
    u0 = as_scalar_field(u0, "u0")
    reference = None
    if cfg.reference is not None:
        reference = as_scalar_field(cfg.reference, "reference")
        if reference.shape != u0.shape:
            raise GridError(f"Reference shape {reference.shape} differs from image shape {u0.shape}")

    model = cfg.model
    state = ModelState(u0.copy(), initial_aux(model, u0.shape))
    e_prev = energy(model, state, u0)
    trace = SolverTrace(initial_energy=e_prev)
    if cfg.record_iterates:
        trace.iterates.append(_flatten(state))

    # both legacy variants skip the exact aux minimizer, so descent is not guaranteed
    check = cfg.check_monotone and not (model.ms_reaction_uses_previous_u or model.gr_legacy_orientation)
    tol = cfg.monotone_rel_tol * max(abs(e_prev), 1.0)
    track_truncated = model.model in (ModelKind.GR, ModelKind.GY)

    logger.info(
        f"Starting {model.model.value}/{model.isotropy.value} run on {u0.shape[0]}x{u0.shape[1]} image "
        f"(solver={cfg.u_solver.value}, n={model.sweep.n}, scheme={model.sweep.scheme.value}, "
        f"initial energy {e_prev:.6g})"
    )

    work = 0.0
    step_sq_sum = 0.0
    started = time.perf_counter()
    for k in range(1, cfg.max_outer_iters + 1):
        u_new, u_work = _u_step(cfg, state, u0)
        aux_new = update_aux(model, state, u_new)
        work += u_work + aux_step_work(model)
        new_state = ModelState(u_new, aux_new)
        e_new = energy(model, new_state, u0)

        if e_new > e_prev + tol:
            if check:
                raise EnergyIncreaseError(k, e_prev, e_new)
            logger.warning(f"Energy increased at iteration {k}: {e_prev:.12g} -> {e_new:.12g}")

        du = step_norm(u_new, state.u)
        da = step_norm(aux_new, state.aux)
        step_sq_sum += du * du + da * da
        record = TraceRecord(
            outer_iter=k,
            energy=e_new,
            psnr=psnr(u_new, reference) if reference is not None else None,
            u_step=du,
            aux_step=da,
            work_units=work,
            seconds=time.perf_counter() - started,
            truncated=truncated_objective(u_new, u0, model.mu, model.lam, model.isotropy)
            if track_truncated else None,
            step_sq_sum=step_sq_sum,
        )
        trace.records.append(record)
        logger.debug(f"Iteration {k}: energy={e_new:.12g} |du|={du:.3e} |daux|={da:.3e}")

        state = new_state
        if cfg.record_iterates:
            trace.iterates.append(_flatten(state))

        if abs(e_prev - e_new) < cfg.energy_rel_tol * abs(e_prev):
            trace.converged = True
            logger.info(f"Energy change below tolerance after {k} iterations")
            break
        e_prev = e_new

    logger.info(
        f"Finished after {len(trace)} iterations: energy {trace.final_energy:.6g}, "
        f"{work:g} work units"
    )
    return state, trace


def fit_linear_rate(data: Union[SolverTrace, Sequence[float]]) -> RateFit:
    """Least-squares fit of log distance against iteration index.

    Points below ``UNDERFLOW_RATIO`` times the largest distance and the
    final three points are dropped; the fit uses the last half of what
    remains (at least three points when available).

    Args:
        data: A trace recorded with ``record_iterates`` or a distance sequence

    Returns:
        RateFit with slope (log of the contraction factor) and r^2

    Raises:
        InsufficientDataError: With fewer than five usable distances
    """
    distances = data.distances_to_final() if isinstance(data, SolverTrace) else list(data)
    d = np.asarray(distances, dtype=np.float64)
    k = np.arange(len(d), dtype=np.float64)
    if len(d) == 0 or not np.any(d > 0):
        raise InsufficientDataError("No positive distances to fit")

    usable = np.isfinite(d) & (d > UNDERFLOW_RATIO * np.max(d[np.isfinite(d)]))
    d, k = d[usable], k[usable]
    if len(d) < MIN_RATE_POINTS:
        raise InsufficientDataError(
            f"Need at least {MIN_RATE_POINTS} usable distances, got {len(d)}",
            {"points": len(d)},
        )

    start = len(d) // 2
    window = slice(start, len(d) - 3) if len(d) - 3 - start >= 3 else slice(start, len(d))
    fit = stats.linregress(k[window], np.log(d[window]))
    return RateFit(slope=float(fit.slope), r_squared=float(fit.rvalue ** 2), points=len(k[window]))
