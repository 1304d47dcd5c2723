"""Image files, noise generation and synthetic test images."""

from .image_file import read_image, write_image, quantize
from .noise import NoiseSpec, add_gaussian_noise, gaussian_samples
from .synthetic import SYNTHETIC_IMAGES, make_synthetic, parse_synthetic

__all__ = [
    "read_image",
    "write_image",
    "quantize",
    "NoiseSpec",
    "add_gaussian_noise",
    "gaussian_samples",
    "SYNTHETIC_IMAGES",
    "make_synthetic",
    "parse_synthetic",
]
