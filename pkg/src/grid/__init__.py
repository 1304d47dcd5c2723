"""Pixel-grid fields and finite-difference operators."""

from .fields import (
    ScalarField,
    VectorField,
    as_scalar_field,
    as_vector_field,
    check_same_shape,
    constant_field,
    zero_vector_field,
)
from .operators import GradMode, forward_grad, backward_div, tilde_grad, tilde_div, grad_sq

__all__ = [
    "ScalarField",
    "VectorField",
    "as_scalar_field",
    "as_vector_field",
    "check_same_shape",
    "constant_field",
    "zero_vector_field",
    "GradMode",
    "forward_grad",
    "backward_div",
    "tilde_grad",
    "tilde_div",
    "grad_sq",
]
