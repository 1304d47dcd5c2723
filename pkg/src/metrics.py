"""Image quality and step-size metrics."""

import math

import numpy as np

from .exceptions import GridError
from .grid.fields import Field, ScalarField, VectorField

PsnrValue = float


def mse(u: ScalarField, ref: ScalarField) -> float:
    if u.shape != ref.shape:
        raise GridError(f"Shape mismatch: {u.shape} vs {ref.shape}")
    diff = u - ref
    return float(np.mean(diff * diff))


def psnr(u: ScalarField, ref: ScalarField) -> PsnrValue:
    """Peak signal-to-noise ratio in dB with peak 1.0.

    Both images are clamped to [0, 1] first. Identical images give
    ``math.inf``.
    """
    err = mse(np.clip(u, 0.0, 1.0), np.clip(ref, 0.0, 1.0))
    if err == 0.0:
        return math.inf
    return 10.0 * math.log10(1.0 / err)


def l2_norm(f: Field) -> float:
    if isinstance(f, VectorField):
        return float(np.sqrt(np.vdot(f.x, f.x) + np.vdot(f.y, f.y)))
    return float(np.linalg.norm(f))


def step_norm(new: Field, old: Field) -> float:
    """Euclidean distance between two fields of the same kind."""
    if isinstance(new, VectorField):
        return l2_norm(VectorField(new.x - old.x, new.y - old.y))
    return l2_norm(new - old)
