"""Stencil assembly, SRBGS preconditioning and linear solvers."""

from .stencil import (
    Scheme,
    FivePointStencil,
    assemble,
    assemble_nffd,
    assemble_sffd,
    apply,
    neighbor_sum,
    to_dense,
)
from .precond import SweepSpec, srbgs, srbgs_stencil, prox_step, prox_step_work, red_black_masks
from .linsolve import CgReport, cg, cg_prox_step, cg_plain_step, dense_solve

__all__ = [
    "Scheme",
    "FivePointStencil",
    "assemble",
    "assemble_nffd",
    "assemble_sffd",
    "apply",
    "neighbor_sum",
    "to_dense",
    "SweepSpec",
    "srbgs",
    "srbgs_stencil",
    "prox_step",
    "prox_step_work",
    "red_black_masks",
    "CgReport",
    "cg",
    "cg_prox_step",
    "cg_plain_step",
    "dense_solve",
]
