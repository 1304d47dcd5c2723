"""Tests for SRBGS sweeps and the preconditioned prox step."""

import numpy as np
import pytest
from numpy.testing import assert_allclose
from pydantic import ValidationError

from src.exceptions import StencilError
from src.solvers import (
    Scheme,
    SweepSpec,
    assemble,
    dense_solve,
    prox_step,
    red_black_masks,
    srbgs,
    to_dense,
)
from src.solvers.stencil import quadratic_value
from src.verify import check_preconditioner_identity, dense_prox_step, random_coefficients


@pytest.fixture
def rng():
    return np.random.default_rng(42)


class TestSweepSpec:
    """Tests for SweepSpec validation."""

    def test_defaults(self):
        """Defaults: n = 10, eta = 1e-5, NFFD."""
        spec = SweepSpec()
        assert spec.n == 10
        assert spec.eta == 1e-5
        assert spec.scheme == Scheme.NFFD

    @pytest.mark.parametrize("kwargs", [{"n": 0}, {"eta": 0.0}, {"eta": 0.5}])
    def test_invalid(self, kwargs):
        """n < 1, eta <= 0 and eta > 1e-2 are rejected."""
        with pytest.raises(ValidationError):
            SweepSpec(**kwargs)


class TestRedBlack:
    """Tests for the colouring."""

    def test_red_when_sum_even(self):
        """Pixel (0, 0) is red, its neighbours black."""
        red, black = red_black_masks((3, 3))
        assert red[0, 0] and red[1, 1] and red[0, 2]
        assert black[0, 1] and black[1, 0]
        assert not np.any(red & black)


class TestSrbgs:
    """Tests for the sweeps themselves."""

    def test_identity_converges_in_one_cycle(self, rng):
        """gamma = 1, d = 0 returns z after one cycle."""
        z = rng.standard_normal((4, 4))
        zeros = np.zeros((4, 4))
        assert_allclose(srbgs(1.0, zeros, zeros, z, zeros, 1), z, atol=1e-15)

    def test_converges_to_dense_solution(self, rng):
        """Many cycles reach the exact solution."""
        gamma, d1, d2 = random_coefficients(rng, (5, 6))
        z = rng.standard_normal((5, 6))
        u = srbgs(gamma, d1, d2, z, np.zeros((5, 6)), 400)
        exact = dense_solve(assemble(gamma, d1, d2), z)
        assert_allclose(u, exact, atol=1e-10)

    def test_does_not_modify_start(self, rng):
        """The starting field is left untouched."""
        u0 = rng.standard_normal((3, 3))
        before = u0.copy()
        srbgs(1.0, np.ones((3, 3)), np.ones((3, 3)), np.zeros((3, 3)), u0, 2)
        assert np.array_equal(u0, before)

    def test_each_cycle_decreases_quadratic(self, rng):
        """Gauss-Seidel never increases 0.5 u'Au - z'u."""
        gamma, d1, d2 = random_coefficients(rng, (6, 6))
        st = assemble(gamma, d1, d2, Scheme.SFFD)
        z = rng.standard_normal((6, 6))
        u = rng.standard_normal((6, 6))
        previous = quadratic_value(st, z, u)
        for _ in range(5):
            u = srbgs(gamma, d1, d2, z, u, 1, Scheme.SFFD)
            current = quadratic_value(st, z, u)
            assert current <= previous + 1e-12
            previous = current

    def test_rejects_zero_cycles(self):
        """n must be at least one."""
        zeros = np.zeros((3, 3))
        with pytest.raises(ValueError):
            srbgs(1.0, zeros, zeros, zeros, zeros, 0)

    def test_rejects_shape_mismatch(self):
        """Right-hand side must match the grid."""
        zeros = np.zeros((3, 3))
        with pytest.raises(StencilError):
            srbgs(1.0, zeros, zeros, np.zeros((3, 4)), zeros, 1)


class TestProxStep:
    """Tests for the preconditioned proximal u-step."""

    @pytest.mark.parametrize("scheme", list(Scheme))
    @pytest.mark.parametrize("n", [1, 2, 5])
    @pytest.mark.parametrize("shape", [(3, 3), (4, 5), (7, 7)])
    def test_matches_dense_sgs_step(self, rng, scheme, n, shape):
        """SRBGS cycles equal the dense symmetric Gauss-Seidel iteration."""
        results = check_preconditioner_identity(shape, rng, SweepSpec(n=n, eta=1e-3, scheme=scheme))
        for result in results:
            assert result.passed, f"{result.name}: {result.detail}"

    def test_metric_dominates_shifted_operator(self, rng):
        """M - T has smallest eigenvalue at least eta."""
        spec = SweepSpec(n=1, eta=1e-2)
        gamma, d1, d2 = random_coefficients(rng, (4, 4))
        _, metric = dense_prox_step(gamma, d1, d2, np.zeros((4, 4)), np.zeros((4, 4)), spec)
        t_dense = to_dense(assemble(gamma, d1, d2))
        assert np.linalg.eigvalsh(metric - t_dense)[0] >= spec.eta * (1 - 1e-8)

    def test_fixed_point_at_solution(self, rng):
        """A prox step started at the exact solution stays there."""
        gamma, d1, d2 = random_coefficients(rng, (4, 4))
        rhs = rng.standard_normal((4, 4))
        exact = dense_solve(assemble(gamma, d1, d2), rhs)
        out = prox_step(gamma, d1, d2, rhs, exact, SweepSpec(n=3))
        assert_allclose(out, exact, atol=1e-12)
