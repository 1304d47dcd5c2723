"""Model configuration and solver state."""

from dataclasses import dataclass
from enum import Enum
from typing import Optional, Union

from pydantic import BaseModel, Field, model_validator

from ..grid.fields import ScalarField, VectorField
from ..solvers.precond import SweepSpec


class ModelKind(str, Enum):
    """Half-quadratic model families."""
    GR = "gr"  # Geman-Reynolds truncated quadratic
    GY = "gy"  # Geman-Yang truncated quadratic
    GM = "gm"  # Geman-McClure
    HL = "hl"  # Hebert-Leahy
    MS = "ms"  # Mumford-Shah (Ambrosio-Tortorelli)


class Isotropy(str, Enum):
    """Whether one auxiliary variable covers both gradient components."""
    ISO = "iso"
    ANISO = "aniso"


class ModelConfig(BaseModel):
    """Parameters of one half-quadratic model."""
    model: ModelKind = Field(..., description="Model family")
    isotropy: Isotropy = Field(default=Isotropy.ANISO, description="Isotropic or anisotropic regularizer")
    mu: Optional[float] = Field(None, gt=0, description="Regularization weight (denoising models)")
    lam: Optional[float] = Field(None, gt=0, alias="lambda", description="Threshold / edge-length weight")
    alpha: Optional[float] = Field(None, gt=0, description="Edge-aware smoothing weight (MS)")
    epsilon: Optional[float] = Field(None, gt=0, description="Edge-indicator width (MS)")
    kappa: Optional[float] = Field(None, gt=0, description="GY auxiliary prox weight; defaults to mu")
    gamma_prox: float = Field(default=1e-5, gt=0, description="Prox weight of the MS s-step")
    sweep: SweepSpec = Field(default_factory=SweepSpec, description="Inner-sweep settings")
    proximal: bool = Field(default=True, description="Proximal auxiliary updates")
    gr_legacy_orientation: bool = Field(
        default=False, description="Use lambda/mu instead of mu/lambda in the GR b-update"
    )
    ms_reaction_uses_previous_u: bool = Field(
        default=False, description="Build the MS s-step reaction term from the previous u"
    )

    class Config:
        populate_by_name = True
        frozen = True

    @model_validator(mode="before")
    @classmethod
    def _default_ms_isotropy(cls, data):
        if isinstance(data, dict) and data.get("model") == "ms" and data.get("isotropy") is None:
            data = {**data, "isotropy": Isotropy.ISO}
        return data

    @model_validator(mode="after")
    def _check_model_parameters(self) -> "ModelConfig":
        if self.model == ModelKind.MS:
            if self.isotropy != Isotropy.ISO:
                raise ValueError("The MS model is isotropic only")
            missing = [k for k in ("lam", "alpha", "epsilon") if getattr(self, k) is None]
        else:
            missing = [k for k in ("mu", "lam") if getattr(self, k) is None]
        if missing:
            names = ", ".join("lambda" if k == "lam" else k for k in missing)
            raise ValueError(f"Model {self.model.value} requires: {names}")
        return self

    @property
    def is_aniso(self) -> bool:
        return self.isotropy == Isotropy.ANISO

    @property
    def kappa_value(self) -> float:
        return self.kappa if self.kappa is not None else self.mu

    @property
    def gy_threshold_sq(self) -> float:
        """a = lambda / mu of the GY shrinkage."""
        return self.lam / self.mu

    @property
    def gy_tau(self) -> float:
        """tau = mu / kappa of the GY shrinkage."""
        return self.mu / self.kappa_value

    def aux_prox_weight(self) -> float:
        """Weight of the auxiliary prox term used by the summability bound."""
        if self.model == ModelKind.GR:
            return self.lam / 2.0
        if self.model in (ModelKind.GM, ModelKind.HL):
            return self.mu / 2.0
        if self.model == ModelKind.GY:
            return self.kappa_value
        return self.gamma_prox


Aux = Union[ScalarField, VectorField]


@dataclass
class ModelState:
    """Current iterate: image u and auxiliary variable.

    The auxiliary is b (GR/GM/HL), l (GY) or s (MS); anisotropic variants
    and GY carry a VectorField, the others a ScalarField.
    """
    u: ScalarField
    aux: Aux

    def copy(self) -> "ModelState":
        return ModelState(self.u.copy(), self.aux.copy())
