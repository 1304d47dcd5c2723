"""Tests for image quality metrics."""

import math

import numpy as np
import pytest

from src.exceptions import GridError
from src.grid import VectorField
from src.metrics import l2_norm, mse, psnr, step_norm


class TestPsnr:
    """Tests for PSNR."""

    def test_identical_images(self):
        """Identical images give infinite PSNR."""
        u = np.full((4, 4), 0.3)
        assert psnr(u, u) == math.inf

    def test_known_value(self):
        """A uniform error of 0.1 gives 20 dB."""
        ref = np.full((3, 3), 0.5)
        assert psnr(ref + 0.1, ref) == pytest.approx(20.0)

    def test_values_are_clamped(self):
        """Values outside [0, 1] are clamped before comparing."""
        ref = np.ones((2, 2))
        assert psnr(np.full((2, 2), 1.7), ref) == math.inf

    def test_shape_mismatch(self):
        """Images must have the same shape."""
        with pytest.raises(GridError):
            mse(np.zeros((2, 2)), np.zeros((2, 3)))


class TestNorms:
    """Tests for step norms."""

    def test_scalar_step(self):
        """Distance between scalar fields."""
        assert step_norm(np.array([[3.0, 0.0]]), np.zeros((1, 2))) == pytest.approx(3.0)

    def test_vector_step(self):
        """Distance between vector fields combines both components."""
        a = VectorField(np.full((1, 1), 3.0), np.full((1, 1), 4.0))
        b = VectorField(np.zeros((1, 1)), np.zeros((1, 1)))
        assert step_norm(a, b) == pytest.approx(5.0)
        assert l2_norm(a) == pytest.approx(5.0)
