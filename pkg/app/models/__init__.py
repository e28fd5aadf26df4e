"""
Models package for NormScope application
"""

from .harness_models import (
    Verdict,
    IntervalModel,
    CheckResult,
    HarnessReport
)

from .parameter_models import (
    SystemConfig,
    RunConfig
)

from .norm_models import (
    NormRequest,
    NormResult,
    TreeRequest,
    GMRequest,
    SpreadingRequest,
    CommandReport
)

__all__ = [
    # Harness models
    "Verdict",
    "IntervalModel",
    "CheckResult",
    "HarnessReport",

    # Parameter models
    "SystemConfig",
    "RunConfig",

    # Norm models
    "NormRequest",
    "NormResult",
    "TreeRequest",
    "GMRequest",
    "SpreadingRequest",
    "CommandReport"
]
