"""Named parameter sets for the denoising and segmentation experiments.

Denoising presets are tuned for images in [0, 1] corrupted by Gaussian
noise of the level encoded in the name (sigma01 = 0.1, sigma005 = 0.05).
The MS presets target 512x512 images; ``Preset.rescaled`` adapts alpha to
another image size.
"""

import logging
from typing import Dict, List, Optional

from pydantic import BaseModel, Field

from .models.config import Isotropy, ModelConfig, ModelKind
from .solvers.precond import SweepSpec

logger = logging.getLogger(__name__)

MS_REFERENCE_SIZE = 512


class Preset(BaseModel):
    """A named parameter set."""
    name: str = Field(..., description="Preset identifier")
    model: ModelKind = Field(..., description="Model family")
    isotropy: Isotropy = Field(default=Isotropy.ANISO, description="Regularizer type")
    mu: Optional[float] = Field(None, gt=0, description="Regularization weight")
    lam: float = Field(..., gt=0, description="lambda")
    alpha: Optional[float] = Field(None, gt=0, description="MS smoothing weight")
    epsilon: Optional[float] = Field(None, gt=0, description="MS edge width")
    sigma: Optional[float] = Field(None, ge=0, description="Noise level the preset is tuned for")
    description: str = Field(default="", description="Where the values come from")

    class Config:
        frozen = True

    def to_model_config(self, sweep: Optional[SweepSpec] = None, **overrides) -> ModelConfig:
        """Build a ModelConfig, letting keyword overrides replace preset values."""
        values = {
            "model": self.model,
            "isotropy": self.isotropy,
            "mu": self.mu,
            "lam": self.lam,
            "alpha": self.alpha,
            "epsilon": self.epsilon,
        }
        if sweep is not None:
            values["sweep"] = sweep
        values.update({k: v for k, v in overrides.items() if v is not None})
        return ModelConfig(**values)

    def rescaled(self, size: int) -> "Preset":
        """Adapt an MS preset to a ``size`` x ``size`` image.

        Gradients of the same scene grow by the sampling ratio when it is
        resampled coarser, so alpha scales with (size / 512)^2; lambda and
        epsilon are kept. Other presets are returned unchanged.
        """
        if self.model != ModelKind.MS:
            return self
        factor = (size / MS_REFERENCE_SIZE) ** 2
        logger.info(f"Rescaling preset {self.name} alpha by {factor:.4g} for size {size}")
        return self.model_copy(update={"alpha": self.alpha * factor})


def _denoise(name: str, model: ModelKind, isotropy: Isotropy, mu: float, lam: float,
             sigma: float, description: str) -> Preset:
    return Preset(name=name, model=model, isotropy=isotropy, mu=mu, lam=lam,
                  sigma=sigma, description=description)


_ANISO = Isotropy.ANISO
_ISO = Isotropy.ISO

PRESETS: Dict[str, Preset] = {
    p.name: p
    for p in [
        _denoise("gm-aniso-sigma01", ModelKind.GM, _ANISO, 0.02, 0.05, 0.1, "denoising table"),
        _denoise("gm-aniso-sigma005", ModelKind.GM, _ANISO, 0.007, 0.004, 0.05, "denoising table"),
        _denoise("gr-aniso-sigma01", ModelKind.GR, _ANISO, 3.0, 0.01, 0.1, "denoising table"),
        _denoise("gr-aniso-sigma005", ModelKind.GR, _ANISO, 1.5, 0.05, 0.05, "denoising table"),
        _denoise("gy-aniso-sigma01", ModelKind.GY, _ANISO, 3.0, 0.01, 0.1, "denoising table"),
        _denoise("gy-aniso-sigma005", ModelKind.GY, _ANISO, 1.5, 0.05, 0.05, "denoising table"),
        _denoise("hl-aniso-sigma01", ModelKind.HL, _ANISO, 0.005, 0.001, 0.1, "denoising table"),
        _denoise("hl-aniso-sigma005", ModelKind.HL, _ANISO, 0.002, 0.0005, 0.05, "denoising table"),
        _denoise("gm-iso-sigma01", ModelKind.GM, _ISO, 0.02, 0.001, 0.1, "denoising figure"),
        _denoise("gr-iso-sigma005", ModelKind.GR, _ISO, 1.5, 0.05, 0.05, "denoising figure"),
        _denoise("hl-iso-sigma01", ModelKind.HL, _ISO, 0.005, 0.0005, 0.1, "denoising figure"),
        _denoise("gy-iso-sigma005", ModelKind.GY, _ISO, 1.5, 0.005, 0.05, "denoising figure"),
        _denoise("gy-aniso-sigma005-rate", ModelKind.GY, _ANISO, 1.5, 0.005, 0.05,
                 "linear-rate experiment"),
        _denoise("hl-aniso-bench", ModelKind.HL, _ANISO, 0.005, 0.05, 0.1,
                 "stiff HL case (large lambda), CG comparison"),
        Preset(name="ms-man", model=ModelKind.MS, isotropy=_ISO, lam=0.1, alpha=5000.0,
               epsilon=0.02, description="segmentation, 512x512 portrait"),
        Preset(name="ms-tulips", model=ModelKind.MS, isotropy=_ISO, lam=0.1, alpha=3000.0,
               epsilon=0.02, description="segmentation, 512x512 flowers"),
    ]
}


def get_preset(name: str) -> Preset:
    """Look up a preset by name.

    Raises:
        KeyError: With the list of known names
    """
    try:
        return PRESETS[name]
    except KeyError:
        raise KeyError(f"Unknown preset '{name}'; known presets: {', '.join(sorted(PRESETS))}")


def list_presets(model: Optional[ModelKind] = None) -> List[Preset]:
    return [p for p in PRESETS.values() if model is None or p.model == model]


def anisotropic_denoising_presets(sigma: Optional[float] = None) -> List[Preset]:
    """Anisotropic GR/GY/GM/HL table presets, optionally for one noise level."""
    return [
        p for p in PRESETS.values()
        if p.isotropy == Isotropy.ANISO and p.description == "denoising table"
        and (sigma is None or p.sigma == sigma)
    ]
