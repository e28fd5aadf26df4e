"""
Services package for NormScope application
"""

from .core_norms import norm_calculator, NormCalculator

__all__ = [
    "norm_calculator",
    "NormCalculator"
]
