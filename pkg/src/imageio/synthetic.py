"""Deterministic synthetic test images with values in [0, 1]."""

from typing import Callable, Dict, Tuple

import numpy as np

from ..grid.fields import ScalarField


def _coords(size: int) -> Tuple[np.ndarray, np.ndarray]:
    """Pixel-centre coordinates in [0, 1) along rows and columns."""
    ii, jj = np.indices((size, size), dtype=np.float64)
    return (ii + 0.5) / size, (jj + 0.5) / size


def disk(size: int) -> ScalarField:
    """Bright disk of radius 0.3 on a dark background."""
    x, y = _coords(size)
    inside = (x - 0.5) ** 2 + (y - 0.5) ** 2 <= 0.3 ** 2
    return np.where(inside, 0.8, 0.2)


def squares(size: int) -> ScalarField:
    """Four nested squares at different grey levels."""
    x, y = _coords(size)
    out = np.full((size, size), 0.1)
    for half_width, level in ((0.4, 0.35), (0.28, 0.6), (0.16, 0.85), (0.06, 0.45)):
        out[(np.abs(x - 0.5) < half_width) & (np.abs(y - 0.5) < half_width)] = level
    return out


def step(size: int) -> ScalarField:
    """Left half 0, right half 1."""
    _, y = _coords(size)
    return np.where(y < 0.5, 0.0, 1.0)


def piecewise_smooth(size: int) -> ScalarField:
    """Two smooth ramps separated by a diagonal discontinuity."""
    x, y = _coords(size)
    lower = 0.15 + 0.3 * x + 0.1 * np.sin(2 * np.pi * y)
    upper = 0.55 + 0.35 * y * (1 - x)
    return np.where(x + y < 1.0, lower, upper)


SYNTHETIC_IMAGES: Dict[str, Callable[[int], ScalarField]] = {
    "disk": disk,
    "squares": squares,
    "step": step,
    "piecewise_smooth": piecewise_smooth,
}


def make_synthetic(name: str, size: int) -> ScalarField:
    """Build a named synthetic image of shape (size, size).

    Raises:
        ValueError: For an unknown name or size < 2
    """
    if name not in SYNTHETIC_IMAGES:
        raise ValueError(f"Unknown synthetic image '{name}'; choose from {sorted(SYNTHETIC_IMAGES)}")
    if size < 2:
        raise ValueError(f"Synthetic image size must be at least 2, got {size}")
    return SYNTHETIC_IMAGES[name](size)


def parse_synthetic(spec: str) -> Tuple[str, int]:
    """Split ``NAME:SIZE`` (size defaults to 64)."""
    name, _, size = spec.partition(":")
    try:
        return name, int(size) if size else 64
    except ValueError:
        raise ValueError(f"Invalid synthetic image size in '{spec}'")
