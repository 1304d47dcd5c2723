"""Grayscale image files (binary PGM and PNG).

Both formats are decoded and encoded by Pillow. Only 8-bit grayscale
(Pillow mode ``L``) is accepted. Pixel values are mapped to [0, 1] on read
(v / 255) and quantized with floor(x * 255 + 0.5) after clamping on write.
"""

import logging
from pathlib import Path
from typing import Union

import numpy as np
from PIL import Image, UnidentifiedImageError

from ..exceptions import ImageFormatError
from ..grid.fields import ScalarField, as_scalar_field

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

FORMATS = {".pgm": "PPM", ".png": "PNG"}

_COLOUR_MODES = ("RGB", "RGBA", "P", "CMYK", "YCbCr", "LA", "PA", "LAB", "HSV")


def _check_mode(path: Path, mode: str) -> None:
    if mode in _COLOUR_MODES:
        raise ImageFormatError(
            f"{path}: colour image (mode {mode}); convert it to 8-bit grayscale first"
        )
    if mode == "I" or mode.startswith("I;") or mode == "F":
        raise ImageFormatError(
            f"{path}: unsupported bit depth (mode {mode}); only 8-bit images are supported"
        )
    if mode != "L":
        raise ImageFormatError(
            f"{path}: unsupported image mode {mode}; only 8-bit grayscale is supported"
        )


def _decode(path: Path, fmt: str) -> np.ndarray:
    try:
        with Image.open(path, formats=[fmt]) as img:
            _check_mode(path, img.mode)
            img.load()
            return np.asarray(img, dtype=np.uint8)
    except ImageFormatError:
        raise
    except (UnidentifiedImageError, OSError, ValueError, SyntaxError) as e:
        raise ImageFormatError(f"{path}: cannot decode {fmt} image: {e}")


def read_image(path: PathLike) -> ScalarField:
    """Read an 8-bit grayscale PGM or PNG file into a [0, 1] field.

    Raises:
        FileNotFoundError: If the file does not exist
        ImageFormatError: On malformed, truncated, colour or non-8-bit input
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Image not found: {path}")
    suffix = path.suffix.lower()
    if suffix not in FORMATS:
        raise ImageFormatError(f"{path}: unsupported image format '{suffix}' (use .pgm or .png)")
    pixels = _decode(path, FORMATS[suffix])
    u = as_scalar_field(pixels.astype(np.float64) / 255.0, str(path))
    logger.debug(f"Read {u.shape[0]}x{u.shape[1]} image from {path}")
    return u


def quantize(u: ScalarField) -> np.ndarray:
    """Clamp to [0, 1] and map to uint8 with floor(x * 255 + 0.5)."""
    return np.floor(np.clip(u, 0.0, 1.0) * 255.0 + 0.5).astype(np.uint8)


def write_image(path: PathLike, u: ScalarField) -> Path:
    """Write ``u`` as an 8-bit grayscale PGM (P5) or PNG file.

    Values outside [0, 1] are clamped. The PGM header is
    ``P5\\n<cols> <rows>\\n255\\n``.
    """
    path = Path(path)
    suffix = path.suffix.lower()
    if suffix not in FORMATS:
        raise ImageFormatError(f"{path}: unsupported image format '{suffix}' (use .pgm or .png)")

    clipped = int(np.count_nonzero((u < 0.0) | (u > 1.0)))
    if clipped:
        logger.warning(f"Clamping {clipped} pixel(s) outside [0, 1] when writing {path}")

    path.parent.mkdir(parents=True, exist_ok=True)
    Image.fromarray(quantize(u)).save(path, format=FORMATS[suffix])
    logger.info(f"Wrote {path}")
    return path
