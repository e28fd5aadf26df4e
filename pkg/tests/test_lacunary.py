"""
The lacunary set J = K u L, the 1/f series over J and the sigma registry
"""

from fractions import Fraction

import pytest

from app.models.harness_models import Verdict
from app.services.errors import DomainError, SigmaExhaustedError
from app.services.lacunary import (
    canonical_j,
    check_j,
    f_inverse,
    sigma_check,
    sigma_constraint,
    sum_inv_f_over_j,
    surrogate_j,
    SigmaRegistry,
)
from app.services.symcoeff import SymCoeff
from app.services.towers import TowerReal
from app.services.vectors import FiniteVector


def average(n, start=1):
    """(1/f(n)) sum of n consecutive unit functionals, for n + 1 a power of two"""
    return FiniteVector.flat(n, start, SymCoeff.f_power(n, -1).as_fraction())


def test_canonical_first_member():
    jset = canonical_j(4)
    assert jset.j(1).exact == 2 ** 256 - 1
    assert jset.member_int(1) == 2 ** 256 - 1
    assert jset.member_int(2) is None
    assert len(jset.K) == 2 and len(jset.L) == 2
    with pytest.raises(DomainError):
        jset.j(5)


def test_canonical_set_passes_its_checks():
    report = check_j(canonical_j(4))
    assert report.verdict == Verdict.PASS
    assert {c.name for c in report.checks} >= {"f_of_min_J_at_least_256", "lacunarity[t=1]", "K_L_partition_J"}


def test_surrogate_checks_are_not_gating():
    report = check_j(surrogate_j())
    assert report.verdict == Verdict.PASS
    assert any(c.verdict == Verdict.FAIL and not c.hard for c in report.checks)


def test_canonical_series_is_just_above_one_over_256():
    series = sum_inv_f_over_j(canonical_j(4), 1, 128)
    assert series["members_used"] == 4
    assert TowerReal.of(Fraction(1, 256) - Fraction(1, 10 ** 30)).le(series["upper"]) is True
    assert series["upper"].le(Fraction(1, 256) + Fraction(1, 10 ** 9)) is True


def test_surrogate_series_is_harmonic():
    series = sum_inv_f_over_j(surrogate_j(), 1, 128)
    assert series["upper"].exact == Fraction(49, 20)
    assert sum_inv_f_over_j(surrogate_j(), 8, 128)["upper"].exact == Fraction(1, 4) + Fraction(1, 5) + Fraction(1, 6)


def test_f_inverse_of_surrogate_member():
    assert f_inverse(surrogate_j().j(4)) == Fraction(1, 4)


def test_sigma_assigns_least_admissible_L_member():
    registry = SigmaRegistry(surrogate_j())
    z1 = average(15)
    assert registry.sigma([z1]).exact == 15
    assert registry.sigma([z1]).exact == 15
    z2 = average(3, start=16)
    assert registry.sigma([z1, z2]).exact == 63
    entry = registry.lookup([z1])
    assert entry.position == 2 and entry.last_max_support == 15
    assert [e.value.exact for e in registry.values_in(1, 16)] == [15]
    assert registry.values_in(1, 15) == []


def test_sigma_constraint_modes():
    value = TowerReal.of(63)
    # the surrogate mode ignores the support size, the canonical mode does not
    assert sigma_constraint(value, 100, 10, canonical=False) is True
    assert sigma_constraint(value, 100, 10, canonical=True) is False
    # both modes need sigma at least the last functional's largest support index
    assert sigma_constraint(value, 1, 64, canonical=False) is False
    assert sigma_constraint(value, 1, 64, canonical=True) is False


def test_sigma_is_injective_and_exhausts():
    registry = SigmaRegistry(surrogate_j())
    values = {registry.sigma([FiniteVector.basis(1, Fraction(k, 4))]).exact for k in (1, 2, 3)}
    assert values == {3, 15, 63}
    with pytest.raises(SigmaExhaustedError):
        registry.sigma([FiniteVector.basis(1, Fraction(-1, 4))])
    assert sigma_check(registry).verdict == Verdict.PASS


def test_sigma_rejects_irrational_or_large_coordinates():
    registry = SigmaRegistry(surrogate_j())
    with pytest.raises(DomainError):
        registry.sigma([FiniteVector.basis(1, SymCoeff.f_power(2, -1))])
    with pytest.raises(DomainError):
        registry.sigma([FiniteVector.basis(1, 2)])
    with pytest.raises(DomainError):
        registry.sigma([])
