"""
Shared fixtures: the toy and surrogate systems and a few small vectors
"""

import sys
from fractions import Fraction

import pytest

sys.path.append('.')

from app.models.parameter_models import SystemConfig
from app.services.parameters import ParameterSystem
from app.services.vectors import FiniteVector

PREC = 128


@pytest.fixture
def prec():
    return PREC


@pytest.fixture
def toy_system():
    return ParameterSystem(SystemConfig.toy())


@pytest.fixture
def surrogate_system():
    return ParameterSystem(SystemConfig.toy().model_copy(update={"lacunary": "surrogate"}))


@pytest.fixture
def pair():
    """e_1 + e_2"""
    return FiniteVector.flat(2)


@pytest.fixture
def mixed():
    return FiniteVector.from_mapping({1: Fraction(1), 3: Fraction(-1, 2), 4: Fraction(3, 4)})
