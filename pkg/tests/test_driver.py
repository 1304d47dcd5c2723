"""Tests for the outer alternating-minimization loop."""

import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from src import driver
from src.driver import RunConfig, SolverTrace, USolver, fit_linear_rate, run
from src.exceptions import EnergyIncreaseError, GridError, InsufficientDataError
from src.imageio import NoiseSpec, add_gaussian_noise, make_synthetic
from src.metrics import psnr
from src.models import ModelConfig
from src.presets import get_preset
from src.solvers import Scheme, SweepSpec

DENOISING_CONFIGS = [
    dict(model="gr", mu=3.0, lam=0.01),
    dict(model="gy", mu=1.5, lam=0.005),
    dict(model="gm", mu=0.02, lam=0.05),
    dict(model="hl", mu=0.005, lam=0.001),
]


@pytest.fixture
def noisy_disk():
    clean = make_synthetic("disk", 32)
    return clean, add_gaussian_noise(clean, NoiseSpec(sigma=0.1, seed=5))


@pytest.fixture(scope="module")
def noisy_disk_64():
    clean = make_synthetic("disk", 64)
    return clean, add_gaussian_noise(clean, NoiseSpec(sigma=0.1, seed=0))


def _config(params, iso="aniso", scheme=Scheme.NFFD, n=3, **run_kwargs):
    model = ModelConfig(isotropy=iso, sweep=SweepSpec(n=n, scheme=scheme), **params)
    return RunConfig(model=model, **run_kwargs)


class TestRunBasics:
    """Tests for edge cases of a run."""

    def test_zero_iterations(self, noisy_disk):
        """max_outer_iters = 0 returns the input and an empty trace."""
        _, noisy = noisy_disk
        state, trace = run(_config(DENOISING_CONFIGS[2], max_outer_iters=0), noisy)
        assert len(trace) == 0
        assert np.array_equal(state.u, noisy)
        assert trace.final_energy == trace.initial_energy

    @pytest.mark.parametrize("params", DENOISING_CONFIGS)
    def test_constant_image_is_fixed(self, params):
        """A constant input stays constant with zero energy."""
        u0 = np.full((6, 6), 0.42)
        state, trace = run(_config(params, max_outer_iters=5, energy_rel_tol=0.0), u0)
        assert_allclose(state.u, 0.42, atol=1e-13)
        assert all(abs(e) < 1e-12 for e in trace.energies)

    def test_constant_image_ms(self):
        """MS keeps s = 1 on a constant image."""
        cfg = RunConfig(model=ModelConfig(model="ms", lam=0.1, alpha=5000.0, epsilon=0.02),
                        max_outer_iters=3, energy_rel_tol=0.0)
        state, _ = run(cfg, np.full((5, 5), 0.3))
        assert_allclose(state.aux, 1.0, atol=1e-10)

    def test_reference_shape_mismatch(self):
        """A reference of another shape is rejected."""
        cfg = _config(DENOISING_CONFIGS[0], reference=np.zeros((3, 3)))
        with pytest.raises(GridError):
            run(cfg, np.zeros((4, 4)))

    def test_energy_increase_aborts(self, monkeypatch):
        """An increasing energy raises EnergyIncreaseError."""
        values = iter([1.0, 2.0])
        monkeypatch.setattr(driver, "energy", lambda cfg, state, u0: next(values))
        with pytest.raises(EnergyIncreaseError) as info:
            run(_config(DENOISING_CONFIGS[0], max_outer_iters=3), np.zeros((4, 4)))
        assert info.value.iteration == 1
        assert info.value.previous == 1.0
        assert info.value.new == 2.0

    def test_legacy_orientation_only_warns(self, noisy_disk, monkeypatch):
        """Energy increases do not abort a legacy-orientation GR run."""
        _, noisy = noisy_disk
        values = iter([1.0, 2.0, 3.0])
        monkeypatch.setattr(driver, "energy", lambda cfg, state, u0: next(values))
        params = dict(DENOISING_CONFIGS[0], gr_legacy_orientation=True)
        _, trace = run(_config(params, max_outer_iters=2, energy_rel_tol=0.0), noisy)
        assert trace.energies == [2.0, 3.0]

    def test_stops_on_energy_tolerance(self, noisy_disk):
        """A loose tolerance ends the run early and marks it converged."""
        _, noisy = noisy_disk
        _, trace = run(_config(DENOISING_CONFIGS[3], max_outer_iters=300, energy_rel_tol=1e-3), noisy)
        assert trace.converged
        assert len(trace) < 300


class TestMonotonicity:
    """The energy never increases over 200 iterations on a 64x64 image."""

    @pytest.mark.parametrize("params", DENOISING_CONFIGS)
    @pytest.mark.parametrize("iso", ["iso", "aniso"])
    @pytest.mark.parametrize("scheme", list(Scheme))
    def test_denoising_models(self, noisy_disk_64, params, iso, scheme):
        """Every model, regularizer and scheme descends within ten seconds."""
        _, noisy = noisy_disk_64
        _, trace = run(_config(params, iso, scheme, max_outer_iters=200, energy_rel_tol=0.0), noisy)
        assert len(trace) == 200
        assert trace.is_monotone(1e-10)
        assert trace.records[-1].seconds < 10.0

    @pytest.mark.parametrize("scheme", list(Scheme))
    def test_ms(self, noisy_disk_64, scheme):
        """MS with the fresh u in the reaction term descends."""
        _, noisy = noisy_disk_64
        model = ModelConfig(model="ms", lam=0.1, alpha=50.0, epsilon=0.5, sweep=SweepSpec(n=3, scheme=scheme))
        _, trace = run(RunConfig(model=model, max_outer_iters=200, energy_rel_tol=0.0), noisy)
        assert len(trace) == 200
        assert trace.is_monotone(1e-10)
        assert trace.records[-1].seconds < 10.0

    @pytest.mark.parametrize("solver", [USolver.CG_PROX, USolver.CG_NOPROX])
    def test_cg_variants(self, noisy_disk, solver):
        """CG u-steps also descend."""
        _, noisy = noisy_disk
        params = DENOISING_CONFIGS[3]
        cfg = _config(params, max_outer_iters=15, energy_rel_tol=0.0, u_solver=solver, cg_rel_tol=1e-6)
        if solver == USolver.CG_NOPROX:
            cfg = cfg.model_copy(update={"model": cfg.model.model_copy(update={"proximal": False})})
        _, trace = run(cfg, noisy)
        assert trace.is_monotone(1e-10)


class TestBoundedIterates:
    """Auxiliary variables stay in range at every iteration of a long run."""

    @pytest.mark.parametrize("params", [c for c in DENOISING_CONFIGS if c["model"] != "gy"])
    @pytest.mark.parametrize("iso", ["iso", "aniso"])
    def test_b_range(self, noisy_disk_64, params, iso):
        """GR b stays in [0, 1]; GM and HL b stay in (0, 1]."""
        _, noisy = noisy_disk_64
        cfg = _config(params, iso, max_outer_iters=200, energy_rel_tol=0.0, record_iterates=True)
        _, trace = run(cfg, noisy)
        b = np.concatenate([z[noisy.size:] for z in trace.iterates])
        assert b.max() <= 1.0
        if params["model"] == "gr":
            assert b.min() >= 0.0
        else:
            assert b.min() > 0.0

    @pytest.mark.parametrize("params", DENOISING_CONFIGS[:2])
    @pytest.mark.parametrize("iso", ["iso", "aniso"])
    def test_truncated_objective_below_energy(self, noisy_disk_64, params, iso):
        """F(u_k) <= L(u_k, aux_k) on every one of 200 records."""
        _, noisy = noisy_disk_64
        _, trace = run(_config(params, iso, max_outer_iters=200, energy_rel_tol=0.0), noisy)
        assert len(trace) == 200
        for record in trace.records:
            assert record.truncated <= record.energy + 1e-12


class TestMonitors:
    """Tests for trace monitors."""

    def test_summability_bound(self, noisy_disk):
        """Sum of squared steps is bounded by the energy drop."""
        _, noisy = noisy_disk
        cfg = _config(DENOISING_CONFIGS[2], max_outer_iters=40, energy_rel_tol=0.0)
        _, trace = run(cfg, noisy)
        weight = min(cfg.model.sweep.eta, cfg.model.aux_prox_weight())
        assert trace.summability_bound_holds(weight)

    def test_psnr_recorded_with_reference(self, noisy_disk):
        """Each record carries a PSNR when a reference is given."""
        clean, noisy = noisy_disk
        _, trace = run(_config(DENOISING_CONFIGS[1], max_outer_iters=3, reference=clean), noisy)
        assert all(r.psnr is not None for r in trace.records)

    def test_work_units_accumulate(self, noisy_disk):
        """SRBGS with n cycles costs 1.5 n per iteration."""
        _, noisy = noisy_disk
        _, trace = run(_config(DENOISING_CONFIGS[0], n=4, max_outer_iters=3, energy_rel_tol=0.0), noisy)
        assert [r.work_units for r in trace.records] == [6.0, 12.0, 18.0]

    def test_dataframe_columns(self, noisy_disk):
        """to_dataframe exposes one row per record."""
        _, noisy = noisy_disk
        _, trace = run(_config(DENOISING_CONFIGS[0], max_outer_iters=2, energy_rel_tol=0.0), noisy)
        df = trace.to_dataframe()
        assert list(df["outer_iter"]) == [1, 2]
        assert "energy" in df.columns and "work_units" in df.columns


class TestDenoisingQuality:
    """Denoising presets improve a noisy synthetic image."""

    @pytest.mark.parametrize("name", ["gy-aniso-sigma01", "hl-aniso-sigma01"])
    def test_psnr_improves(self, name):
        """The denoised image is closer to the clean one than the input."""
        clean = make_synthetic("disk", 64)
        noisy = add_gaussian_noise(clean, NoiseSpec(sigma=0.1, seed=0))
        model = get_preset(name).to_model_config(sweep=SweepSpec(n=10))
        state, _ = run(RunConfig(model=model, max_outer_iters=50), noisy)
        assert psnr(state.u, clean) > psnr(noisy, clean) + 1.0


class TestSegmentation:
    """Tests for the MS model."""

    def test_step_edge_detected(self):
        """The edge indicator drops below 0.5 along a step."""
        u0 = make_synthetic("step", 64)
        model = get_preset("ms-man").to_model_config(sweep=SweepSpec(n=10))
        state, trace = run(RunConfig(model=model, max_outer_iters=20, energy_rel_tol=0.0), u0)
        assert state.aux.min() < 0.5
        assert trace.is_monotone(1e-10)


class TestRateFit:
    """Tests for fit_linear_rate."""

    def test_geometric_sequence(self):
        """2^-k gives slope -ln 2 and r^2 = 1."""
        fit = fit_linear_rate([2.0 ** -k for k in range(30)])
        assert fit.slope == pytest.approx(-math.log(2.0), rel=1e-10)
        assert fit.r_squared == pytest.approx(1.0, abs=1e-12)

    def test_constant_sequence(self):
        """Constant distances give slope 0."""
        assert fit_linear_rate([0.5] * 12).slope == pytest.approx(0.0, abs=1e-15)

    def test_too_few_points(self):
        """Fewer than five distances raise InsufficientDataError."""
        with pytest.raises(InsufficientDataError):
            fit_linear_rate([1.0, 0.5, 0.25, 0.125])

    def test_trace_without_iterates(self):
        """A trace recorded without iterates cannot be fitted."""
        with pytest.raises(InsufficientDataError):
            fit_linear_rate(SolverTrace(initial_energy=1.0))

    def test_gy_linear_rate(self):
        """Anisotropic GY on a 64x64 image converges linearly (r^2 > 0.99)."""
        clean = make_synthetic("disk", 64)
        noisy = add_gaussian_noise(clean, NoiseSpec(sigma=0.05, seed=1))
        model = get_preset("gy-aniso-sigma005-rate").to_model_config(sweep=SweepSpec(n=10))
        _, trace = run(RunConfig(model=model, max_outer_iters=200, energy_rel_tol=0.0,
                                 record_iterates=True), noisy)
        fit = fit_linear_rate(trace)
        assert fit.slope < 0
        assert fit.r_squared > 0.99
        assert fit.points >= 5
