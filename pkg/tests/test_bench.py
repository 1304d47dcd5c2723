"""Tests for the benchmark harness."""

import math

import numpy as np
import pandas as pd
import pytest

from src.bench import (
    BENCH_COLUMNS,
    SCHEME_COLUMNS,
    compare_schemes,
    parse_variant,
    run_benchmark,
    variant_run_config,
    work_to_reach,
    write_csv,
)
from src.driver import USolver
from src.imageio import NoiseSpec, add_gaussian_noise, make_synthetic
from src.presets import anisotropic_denoising_presets, get_preset
from src.solvers import SweepSpec


@pytest.fixture
def problem():
    clean = make_synthetic("disk", 16)
    return clean, add_gaussian_noise(clean, NoiseSpec(sigma=0.1, seed=3))


class TestParseVariant:
    """Tests for variant labels."""

    def test_srbgs(self):
        """srbgs-<n> selects n SRBGS cycles."""
        variant = parse_variant("srbgs-10")
        assert variant.u_solver == USolver.SRBGS
        assert variant.sweeps == 10

    def test_cg(self):
        """cg-<prox|noprox>-<tol> selects the CG solver and tolerance."""
        variant = parse_variant("cg-prox-1e-6")
        assert variant.u_solver == USolver.CG_PROX
        assert variant.cg_rel_tol == 1e-6
        assert parse_variant("cg-noprox-1e-3").u_solver == USolver.CG_NOPROX

    @pytest.mark.parametrize("label", ["jacobi-3", "srbgs-0", "srbgs-x", "cg-prox-0", "cg-prox"])
    def test_invalid(self, label):
        """Unknown solvers and non-positive parameters are rejected."""
        with pytest.raises(ValueError):
            parse_variant(label)

    def test_noprox_disables_aux_prox(self):
        """Classical CG variants run without prox terms."""
        model = get_preset("hl-aniso-sigma01").to_model_config()
        cfg = variant_run_config(parse_variant("cg-noprox-1e-3"), model, 5, 0.0, None)
        assert not cfg.model.proximal
        assert cfg.cg_rel_tol == 1e-3

    def test_srbgs_sets_cycles(self):
        """The variant label overrides the preset cycle count."""
        model = get_preset("hl-aniso-sigma01").to_model_config(sweep=SweepSpec(n=10))
        cfg = variant_run_config(parse_variant("srbgs-3"), model, 5, 0.0, None)
        assert cfg.model.sweep.n == 3
        assert cfg.u_solver == USolver.SRBGS


class TestRunBenchmark:
    """Tests for the benchmark runs."""

    def test_rows_per_variant(self, problem):
        """Each variant contributes one row per outer iteration."""
        clean, noisy = problem
        model = get_preset("hl-aniso-bench").to_model_config()
        df = run_benchmark(model, noisy, clean, ["srbgs-2", "cg-prox-1e-3"], max_outer_iters=4,
                           timing=False)
        assert list(df.columns) == BENCH_COLUMNS
        assert len(df) == 8
        assert (df["seconds"] == 0.0).all()
        for _, group in df.groupby("variant"):
            assert group["work_units"].is_monotonic_increasing
            assert group["energy"].is_monotonic_decreasing

    def test_srbgs_work_units(self, problem):
        """srbgs-2 costs three work units per iteration."""
        clean, noisy = problem
        model = get_preset("gm-aniso-sigma01").to_model_config()
        df = run_benchmark(model, noisy, clean, ["srbgs-2"], max_outer_iters=3)
        assert list(df["work_units"]) == [3.0, 6.0, 9.0]

    def test_csv_header(self, problem, tmp_path):
        """The CSV header lists the benchmark columns."""
        clean, noisy = problem
        model = get_preset("gm-aniso-sigma01").to_model_config()
        df = run_benchmark(model, noisy, clean, ["srbgs-1"], max_outer_iters=2, timing=False)
        path = tmp_path / "bench.csv"
        write_csv(df, path)
        assert path.read_text().splitlines()[0] == ",".join(BENCH_COLUMNS)


class TestWorkToReach:
    """Tests for the work-to-tolerance summary."""

    def test_first_hit(self):
        """Work at the first energy within the gap of the final energy."""
        df = pd.DataFrame({
            "variant": ["a"] * 4 + ["b"] * 2,
            "outer_iter": [1, 2, 3, 4, 1, 2],
            "energy": [10.0, 2.0, 1.0005, 1.0, 5.0, 4.0],
            "psnr": [np.nan] * 6,
            "work_units": [15.0, 30.0, 45.0, 60.0, 7.0, 14.0],
            "seconds": [0.0] * 6,
        })
        reach = work_to_reach(df)
        assert reach["a"] == 45.0
        assert reach["b"] == 14.0


class TestCompareSchemes:
    """Tests for the NFFD/SFFD comparison."""

    def test_one_row_per_preset(self, problem):
        """Each preset yields one row with finite PSNR for both schemes."""
        clean, _ = problem
        presets = [get_preset("gm-aniso-sigma01"), get_preset("hl-aniso-sigma01")]
        df = compare_schemes(clean, presets, NoiseSpec(sigma=0.1, seed=0), sweeps=3, max_outer_iters=5)
        assert list(df.columns) == SCHEME_COLUMNS
        assert list(df["model"]) == ["gm-aniso-sigma01", "hl-aniso-sigma01"]
        assert all(math.isfinite(v) for v in df["nffd_psnr"])
        assert all(math.isfinite(v) for v in df["sffd_psnr"])

    def test_anisotropic_presets_gain_four_db(self):
        """Each sigma 0.1 table preset gains at least 4 dB on a 128x128 image."""
        clean = make_synthetic("piecewise_smooth", 128)
        presets = anisotropic_denoising_presets(0.1)
        df = compare_schemes(clean, presets, NoiseSpec(sigma=0.1, seed=0), sweeps=10, max_outer_iters=300)
        assert sorted(p.model.value for p in presets) == ["gm", "gr", "gy", "hl"]
        gains = df["nffd_psnr"] - df["noisy_psnr"]
        assert (gains >= 4.0).all(), df.to_string()
        assert df["sffd_psnr"].notna().all()


class TestPreconditionedVsCg:
    """SRBGS u-steps against CG u-steps on the 64x64 HL case."""

    def test_srbgs_needs_less_work(self):
        """srbgs-10 settles within 0.1% of its final energy on fewer work units."""
        clean = make_synthetic("disk", 64)
        noisy = add_gaussian_noise(clean, NoiseSpec(sigma=0.1, seed=0))
        model = get_preset("hl-aniso-sigma01").to_model_config(sweep=SweepSpec(n=10))
        df = run_benchmark(model, noisy, clean, ["srbgs-10", "cg-prox-1e-6"], max_outer_iters=200,
                           timing=False)
        reach = work_to_reach(df)
        assert reach["srbgs-10"] < reach["cg-prox-1e-6"]
