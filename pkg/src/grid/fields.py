"""Scalar and vector fields on the pixel grid.

A field is a 2-D float64 numpy array of shape (m, n) with m, n >= 2.
Rows run along the first axis (the x-direction of every difference
operator) and columns along the second (the y-direction). One-based pixel
(i, j) lives at array index [i - 1, j - 1].

Operators never mutate their inputs; validation happens once at the
boundaries (image loading, configuration, public entry points) through
``as_scalar_field`` and ``as_vector_field``.
"""

from typing import NamedTuple, Tuple, Union

import numpy as np
import numpy.typing as npt

from ..exceptions import GridError

ScalarField = npt.NDArray[np.float64]
Shape = Tuple[int, int]


class VectorField(NamedTuple):
    """Pair of scalar fields (x-component, y-component) of equal shape."""
    x: ScalarField
    y: ScalarField

    @property
    def shape(self) -> Shape:
        return self.x.shape

    def norm(self) -> ScalarField:
        """Pointwise Euclidean magnitude sqrt(x^2 + y^2)."""
        return np.hypot(self.x, self.y)

    def ravel(self) -> ScalarField:
        """Both components concatenated in row-major order."""
        return np.concatenate([self.x.ravel(), self.y.ravel()])

    def copy(self) -> "VectorField":
        return VectorField(self.x.copy(), self.y.copy())


Field = Union[ScalarField, VectorField]


def as_scalar_field(data, name: str = "field") -> ScalarField:
    """Validate ``data`` and return it as a fresh float64 array.

    Args:
        data: Anything numpy can turn into a 2-D array
        name: Label used in error messages

    Returns:
        Contiguous float64 copy of the data

    Raises:
        GridError: If the array is not 2-D, smaller than 2x2 or has
            non-finite entries
    """
    arr = np.array(data, dtype=np.float64, copy=True)
    if arr.ndim != 2:
        raise GridError(f"{name} must be 2-D, got {arr.ndim} dimension(s)", {"shape": arr.shape})
    m, n = arr.shape
    if m < 2 or n < 2:
        raise GridError(f"{name} must be at least 2x2, got {m}x{n}", {"shape": arr.shape})
    if not np.all(np.isfinite(arr)):
        raise GridError(f"{name} contains non-finite values")
    return np.ascontiguousarray(arr)


def as_vector_field(x, y, name: str = "vector field") -> VectorField:
    """Validate both components and check that their shapes agree."""
    fx = as_scalar_field(x, f"{name}.x")
    fy = as_scalar_field(y, f"{name}.y")
    check_same_shape(fx, fy, names=(f"{name}.x", f"{name}.y"))
    return VectorField(fx, fy)


def check_same_shape(*fields, names: Tuple[str, ...] = ()) -> Shape:
    """Raise GridError unless every field has the same shape.

    Accepts scalar and vector fields alike; returns the common shape.
    """
    shapes = [np.shape(f.x) if isinstance(f, VectorField) else np.shape(f) for f in fields]
    if len(set(shapes)) > 1:
        label = ", ".join(names) if names else "fields"
        raise GridError(f"Shape mismatch between {label}: {shapes}", {"shapes": shapes})
    return shapes[0]


def constant_field(shape: Shape, value: float) -> ScalarField:
    return np.full(shape, float(value), dtype=np.float64)


def zero_vector_field(shape: Shape) -> VectorField:
    return VectorField(np.zeros(shape), np.zeros(shape))


def field_ravel(f: Field) -> ScalarField:
    """Flatten a scalar or vector field into one vector."""
    return f.ravel()
