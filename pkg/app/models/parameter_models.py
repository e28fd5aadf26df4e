"""
Parameter system and run configuration models
"""

import json
from pathlib import Path
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field, ValidationError, model_validator, validator

from app.config import settings
from app.services.errors import ConfigError

LACUNARY_MODES = ("canonical", "surrogate")


class SystemConfig(BaseModel):
    """Growth parameters (k_i), (eps_i), (L_n) and the lacunary set mode"""

    name: str = Field("toy", description="Label carried into every report")
    ks: Optional[List[int]] = Field(None, description="Explicit strictly increasing k_i")
    k1_tower: Optional[List[int]] = Field(
        None, description="[height, top]: k_1 = exp2 applied height times to top"
    )
    k_step: int = Field(2, description="k_(i+1) = exp2 applied k_step times to k_i", ge=1)
    k_count: int = Field(4, description="Number of tower-defined k_i to materialize", ge=1, le=6)
    eps_scale: int = Field(settings.eps_scale, description="eps_i = eps_scale * 2^-i", ge=1)
    Ls: List[int] = Field(default_factory=lambda: [0, 0, 0, 1],
                          description="Non-decreasing L_n; the last value repeats")
    c: Optional[int] = Field(None, description="Override for the growth constant c", ge=2)
    m0: Optional[int] = Field(None, description="Override for m_0 (labelled as an override)", ge=2)
    lacunary: str = Field("canonical", description="canonical or surrogate J")
    j_prefix: int = Field(settings.j_prefix, description="Materialized members of J", ge=2)
    precision_bits: int = Field(settings.precision_bits, description="Working precision", ge=16)

    @validator('ks')
    def validate_ks(cls, v):
        if v is None:
            return v
        if not v:
            raise ValueError("ks must not be empty")
        if v[0] < 2:
            raise ValueError("k_1 must be at least 2")
        if any(b <= a for a, b in zip(v, v[1:])):
            raise ValueError("ks must be strictly increasing")
        return v

    @validator('k1_tower')
    def validate_k1_tower(cls, v):
        if v is None:
            return v
        if len(v) != 2 or v[0] < 0 or v[1] < 1:
            raise ValueError("k1_tower is [height >= 0, top >= 1]")
        return v

    @validator('Ls')
    def validate_ls(cls, v):
        if not v or any(x < 0 for x in v):
            raise ValueError("Ls must be non-empty and non-negative")
        if any(b < a for a, b in zip(v, v[1:])):
            raise ValueError("Ls must be non-decreasing")
        return v

    @validator('lacunary')
    def validate_lacunary(cls, v):
        if v not in LACUNARY_MODES:
            raise ValueError(f"lacunary must be one of {LACUNARY_MODES}")
        return v

    @model_validator(mode="after")
    def exactly_one_k_source(self):
        if (self.ks is None) == (self.k1_tower is None):
            raise ValueError("give exactly one of ks or k1_tower")
        return self

    @classmethod
    def load(cls, path: str) -> "SystemConfig":
        """Read a system file; every failure surfaces as ConfigError"""
        file_path = Path(path)
        if not file_path.exists():
            raise ConfigError(f"system file not found: {path}")
        try:
            data = json.loads(file_path.read_text(encoding="utf-8"))
            return cls(**data)
        except (json.JSONDecodeError, ValidationError, TypeError) as e:
            raise ConfigError(f"invalid system file {path}: {e}") from e

    @classmethod
    def toy(cls) -> "SystemConfig":
        return cls(name="toy", ks=[2, 4, 16])

    @classmethod
    def honest(cls) -> "SystemConfig":
        """k_1 = 2^(2^10), k_(i+1) = exp2(exp2(k_i))"""
        return cls(name="honest", k1_tower=[2, 10], k_step=2, k_count=4)

    class Config:
        schema_extra = {
            "example": {
                "name": "toy",
                "ks": [2, 4, 16],
                "eps_scale": 4,
                "Ls": [0, 0, 0, 1],
                "lacunary": "canonical",
                "j_prefix": 4,
                "precision_bits": 128
            }
        }


class RunConfig(BaseModel):
    """One CLI or HTTP run"""

    command: str = Field(..., description="norm, tree, params, operator, gm or report")
    precision_bits: int = Field(settings.precision_bits, ge=16)
    system_path: Optional[str] = Field(None, description="System file (JSON)")
    corpus_path: Optional[str] = Field(None, description="Corpus file, one vector literal per line")
    seed: int = Field(settings.default_seed, description="Seed for generated corpora")
    out: Optional[str] = Field(None, description="Report path; stdout when absent")
    surrogate: bool = Field(False, description="Use the surrogate lacunary set")
    params: Dict[str, Any] = Field(default_factory=dict, description="Command-specific parameters")

    def system(self) -> SystemConfig:
        config = SystemConfig.load(self.system_path) if self.system_path else SystemConfig.toy()
        updates: Dict[str, Any] = {"precision_bits": self.precision_bits}
        if self.surrogate:
            updates["lacunary"] = "surrogate"
        return config.model_copy(update=updates)
