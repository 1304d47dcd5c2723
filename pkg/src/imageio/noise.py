"""Seeded additive Gaussian noise."""

import logging
import math

import numpy as np
from pydantic import BaseModel, Field

from ..grid.fields import ScalarField

logger = logging.getLogger(__name__)


class NoiseSpec(BaseModel):
    """Standard deviation and seed of the additive noise."""
    sigma: float = Field(default=0.0, ge=0, description="Noise standard deviation")
    seed: int = Field(default=0, ge=0, le=2 ** 64 - 1, description="PCG64 seed")

    class Config:
        frozen = True


def gaussian_samples(count: int, seed: int) -> np.ndarray:
    """``count`` standard normal samples by the Box-Muller transform.

    Uniforms come from a PCG64 generator in pairs (u1, u2); each pair
    yields sqrt(-2 ln u1) * cos(2 pi u2) followed by the matching sine
    sample. u1 is drawn as 1 - U so it lies in (0, 1].
    """
    pairs = math.ceil(count / 2)
    rng = np.random.Generator(np.random.PCG64(seed))
    uniforms = rng.random(2 * pairs)
    u1 = 1.0 - uniforms[0::2]
    u2 = uniforms[1::2]
    radius = np.sqrt(-2.0 * np.log(u1))
    angle = 2.0 * math.pi * u2
    samples = np.empty(2 * pairs)
    samples[0::2] = radius * np.cos(angle)
    samples[1::2] = radius * np.sin(angle)
    return samples[:count]


def add_gaussian_noise(u: ScalarField, spec: NoiseSpec) -> ScalarField:
    """Return u + sigma * N(0, 1) noise, filled in row-major order.

    The result is not clamped. sigma = 0 returns an unchanged copy.
    """
    if spec.sigma == 0:
        return u.copy()
    noise = gaussian_samples(u.size, spec.seed).reshape(u.shape)
    logger.debug(f"Adding Gaussian noise sigma={spec.sigma} seed={spec.seed}")
    return u + spec.sigma * noise
