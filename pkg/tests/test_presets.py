"""Tests for named parameter presets."""

import pytest

from src.models import ModelKind
from src.presets import PRESETS, anisotropic_denoising_presets, get_preset, list_presets
from src.solvers import Scheme, SweepSpec


class TestPresets:
    """Tests for preset lookup and conversion."""

    @pytest.mark.parametrize("name", sorted(PRESETS))
    def test_every_preset_builds_a_config(self, name):
        """Every preset validates into a ModelConfig."""
        cfg = get_preset(name).to_model_config()
        assert cfg.model == PRESETS[name].model

    def test_unknown_preset(self):
        """Unknown names raise KeyError listing the known ones."""
        with pytest.raises(KeyError, match="gm-aniso-sigma01"):
            get_preset("gm-aniso-sigma99")

    def test_table_values(self):
        """GM at sigma 0.1 uses mu = 0.02, lambda = 0.05."""
        preset = get_preset("gm-aniso-sigma01")
        assert (preset.mu, preset.lam) == (0.02, 0.05)

    def test_overrides_and_sweep(self):
        """Keyword overrides replace preset values; None is ignored."""
        sweep = SweepSpec(n=4, scheme=Scheme.SFFD)
        cfg = get_preset("hl-aniso-sigma01").to_model_config(sweep=sweep, mu=0.01, kappa=None)
        assert cfg.mu == 0.01
        assert cfg.lam == 0.001
        assert cfg.sweep.n == 4

    def test_anisotropic_table(self):
        """Eight anisotropic table presets, four per noise level."""
        assert len(anisotropic_denoising_presets()) == 8
        names = {p.name for p in anisotropic_denoising_presets(0.05)}
        assert names == {"gm-aniso-sigma005", "gr-aniso-sigma005", "gy-aniso-sigma005", "hl-aniso-sigma005"}

    def test_list_by_model(self):
        assert {p.name for p in list_presets(ModelKind.MS)} == {"ms-man", "ms-tulips"}


class TestRescale:
    """Tests for MS preset rescaling."""

    def test_alpha_scales_quadratically(self):
        """Halving the size divides alpha by four."""
        preset = get_preset("ms-man")
        rescaled = preset.rescaled(256)
        assert rescaled.alpha == pytest.approx(preset.alpha / 4)
        assert rescaled.lam == preset.lam
        assert rescaled.epsilon == preset.epsilon

    def test_denoising_preset_unchanged(self):
        preset = get_preset("gr-aniso-sigma01")
        assert preset.rescaled(64) is preset
