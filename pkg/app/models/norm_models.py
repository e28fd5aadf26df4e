"""
Request and result models for the norm, tree, parameter and GM endpoints
"""

from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field, validator

from app.config import settings
from .harness_models import IntervalModel
from .parameter_models import SystemConfig


class NormRequest(BaseModel):
    """One vector literal and the optional l / r parameters"""

    vector: str = Field(..., description="Vector literal idx:num/den separated by single spaces")
    ell: Optional[int] = Field(None, description="Evaluate ||x||_l as well", ge=2)
    r: Optional[str] = Field(None, description="Evaluate the tail norm |||x|||_r (rational, >= 2)")
    precision_bits: int = Field(settings.precision_bits, description="Output precision", ge=16)

    class Config:
        schema_extra = {
            "example": {
                "vector": "1:1 2:1",
                "ell": 2,
                "r": "2",
                "precision_bits": 128
            }
        }


class NormResult(BaseModel):
    """Certified enclosures with their witnesses"""

    vector: str = Field(..., description="Canonical literal of the input")
    s_norm: IntervalModel = Field(..., description="||x||")
    attainer: Optional[str] = Field(None, description="n with ||x|| = ||x||_n, or inf")
    ell_norm: Optional[IntervalModel] = Field(None, description="||x||_l")
    partition: Optional[Dict[str, Any]] = Field(None, description="Optimal partition for ||x||_l")
    tail_norm: Optional[IntervalModel] = Field(None, description="|||x|||_r")
    tail_ell: Optional[int] = Field(None, description="l attaining the tail norm")


class TreeRequest(BaseModel):
    """A literal tree or a branching stream with truncation lengths"""

    tree: Optional[str] = Field(None, description="Nested literal such as (2:(3)(4))")
    ks: Optional[List[int]] = Field(None, description="Strictly increasing branching stream")
    lengths: List[int] = Field(default_factory=lambda: [0, 1, 2], description="Truncation lengths")
    offset: int = Field(1, description="First basis index of the consecutive placement", ge=1)
    precision_bits: int = Field(settings.precision_bits, ge=16)

    @validator('lengths')
    def validate_lengths(cls, v):
        if any(L < 0 for L in v):
            raise ValueError("truncation lengths must be non-negative")
        return v

    class Config:
        schema_extra = {
            "example": {
                "tree": "(2:(3)(4))",
                "offset": 1
            }
        }


class GMRequest(BaseModel):
    """Sandwich bounds for one vector"""

    vector: str = Field(..., description="Vector literal")
    depth: int = Field(2, description="Enumeration depth", ge=0, le=settings.gm_depth)
    budget: int = Field(200, description="Maximum number of enumerated functionals", ge=1)
    surrogate: bool = Field(False, description="Use the surrogate lacunary set")
    system: Optional[SystemConfig] = Field(None, description="System; the toy system when absent")

    class Config:
        schema_extra = {
            "example": {
                "vector": "1:1 2:1",
                "depth": 2,
                "budget": 200,
                "surrogate": False
            }
        }


class SpreadingRequest(BaseModel):
    """Spreading-gap sweep over a grid of start indices"""

    lambdas: List[str] = Field(..., description="Coefficients as rationals", min_items=1)
    N_grid: List[int] = Field(default_factory=lambda: [1, 2, 8, 64], description="Start indices")
    surrogate: bool = Field(False, description="Use the surrogate lacunary set")

    @validator('N_grid')
    def validate_grid(cls, v):
        if not v or any(N < 1 for N in v):
            raise ValueError("start indices must be >= 1")
        return sorted(set(v))


class CommandReport(BaseModel):
    """Envelope written by every CLI command"""

    command: str = Field(..., description="Command name")
    system: Optional[Dict[str, Any]] = Field(None, description="System summary, when one was used")
    verdict: str = Field(..., description="pass, fail or unknown over hard checks")
    reports: List[Dict[str, Any]] = Field(default_factory=list, description="Harness summaries")
    results: Dict[str, Any] = Field(default_factory=dict, description="Measured values")
