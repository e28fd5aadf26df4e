"""
GM functionals, the sandwich bounds, the decomposition audit and the spreading gap
"""

from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from app.models.harness_models import Verdict
from app.services.core_norms import norm_calculator
from app.services.errors import DomainError
from app.services.gm_space import (
    GMNode,
    J_of_functional,
    J_of_interval,
    dual_spreading_note,
    enumerate_gm,
    flat_special,
    gm_lower_bound,
    gm_upper_bound,
    parse_grid,
    s_norm_witness,
    sgm_audit,
    sgm_decompose,
    spreading_gap,
)
from app.services.symcoeff import SymCoeff, enclose_scalar
from app.services.towers import TowerReal
from app.services.vectors import FiniteVector, pairing


def small_vectors():
    values = st.fractions(min_value=-2, max_value=2, max_denominator=4)
    return st.lists(values, min_size=1, max_size=5).map(FiniteVector.from_coefficients).filter(
        lambda x: not x.is_zero())


def test_grid_is_signed():
    assert parse_grid("1,1/2") == [1, Fraction(1, 2), -1, Fraction(-1, 2)]
    with pytest.raises(DomainError):
        parse_grid("3/2")


def test_node_constructors_enforce_the_rules():
    with pytest.raises(DomainError):
        GMNode.atom(1, Fraction(2))
    with pytest.raises(DomainError):
        GMNode.convex([Fraction(3, 4), Fraction(1, 2)], [GMNode.atom(1), GMNode.atom(2)])
    with pytest.raises(DomainError):
        GMNode.average([GMNode.atom(2), GMNode.atom(1)])


def test_nested_restrictions_intersect():
    node = GMNode.restrict(1, 3, GMNode.restrict(2, 5, GMNode.average([GMNode.atom(n) for n in range(1, 6)])))
    assert node.interval == (2, 3)
    assert node.functional.support == (2, 3)
    assert GMNode.restrict(1, 2, GMNode.restrict(4, 5, GMNode.atom(4))).functional.is_zero()


def test_average_functional():
    node = GMNode.average([GMNode.atom(1), GMNode.atom(2, Fraction(-1))])
    assert node.functional == FiniteVector.from_mapping({1: SymCoeff.f_power(2, -1), 2: -SymCoeff.f_power(2, -1)})
    assert node.depth == 1


def test_enumeration_respects_budget_and_dedupes():
    nodes = list(enumerate_gm(3, (1, 4), budget=25))
    assert len(nodes) == 25
    assert len({n.functional for n in nodes}) == 25


def test_enumerated_functionals_stay_in_the_dual_ball(mixed):
    bound = norm_calculator.s_norm(mixed, 96)
    for node in enumerate_gm(2, (1, 4), budget=150):
        lo, _ = enclose_scalar(pairing(node.functional, mixed), 128)
        assert mpmath.mp.make_mpf(lo) <= bound.hi


@settings(max_examples=30, deadline=None)
@given(small_vectors())
def test_s_norm_witness_attains_the_norm(x):
    witness = s_norm_witness(x, 96)
    lo, hi = enclose_scalar(pairing(witness.functional, x), 128)
    norm = norm_calculator.s_norm(x, 96)
    assert mpmath.mp.make_mpf(lo) <= norm.hi and norm.lo <= mpmath.mp.make_mpf(hi)


def test_sandwich_orders_lower_below_upper(pair, toy_system):
    lower = gm_lower_bound(pair, 2, 100, toy_system, 96)
    upper = gm_upper_bound(pair, toy_system, 96)
    assert norm_calculator.s_norm(pair, 96).lo <= lower["lower"].hi
    assert TowerReal.plain(lower["lower"].raw).le(upper["upper"]) is True


def test_surrogate_upper_bound_for_pair(pair, surrogate_system):
    upper = gm_upper_bound(pair, surrogate_system, 96)
    assert upper["split"] == 2
    assert upper["below_split"] == [1]
    # 2 ||x|| + ||x||_1 (1/2 + 1/3 + 1/4 + 1/5 + 1/6)
    with mpmath.workprec(200):
        expected = 4 / mpmath.log(3, 2) + mpmath.mpf(29) / 10
        assert upper["enclosure"].hi >= expected
    assert upper["enclosure"].lo <= norm_calculator.s_norm(pair, 96).hi


def test_zero_vector_bounds(toy_system):
    assert gm_upper_bound(FiniteVector(), toy_system)["upper"].exact == 0
    assert gm_lower_bound(FiniteVector(), system=toy_system)["witness"] is None


def test_atoms_and_averages_decompose_without_J_parts():
    for node in (GMNode.atom(3, Fraction(-1, 2)), GMNode.average([GMNode.atom(1), GMNode.atom(3)])):
        dec = sgm_decompose(node)
        assert dec.parts == {}
        assert dec.reconstruct() == node.functional


def test_special_functional_codes_its_lengths(surrogate_system):
    node = flat_special(2, surrogate_system.sigma)
    assert node.ms == (15, 15)
    assert node.functional.support == tuple(range(1, 31))
    assert J_of_functional(node.functional, surrogate_system.sigma) == {15}


def test_special_decomposition(surrogate_system):
    node = flat_special(2, surrogate_system.sigma)
    dec = sgm_decompose(node)
    assert set(dec.parts) == {15}
    assert dec.reconstruct() == node.functional
    assert dec.parts[15].violations() == []
    assert sgm_audit([node], surrogate_system.sigma, 96).verdict == Verdict.PASS


@pytest.mark.parametrize("lo, hi, parts", [(20, 30, set()), (10, 20, {15}), (15, 30, {15}), (16, 30, set())])
def test_restricted_special_keeps_parts_inside_J(surrogate_system, lo, hi, parts):
    node = GMNode.restrict(lo, hi, flat_special(2, surrogate_system.sigma))
    dec = sgm_decompose(node)
    assert set(dec.parts) == parts
    assert dec.reconstruct() == node.functional
    assert set(dec.parts) <= J_of_functional(node.functional, surrogate_system.sigma)


def test_J_interval_is_half_open(surrogate_system):
    flat_special(2, surrogate_system.sigma)
    assert J_of_interval((1, 15), surrogate_system.sigma) == set()
    assert J_of_interval((15, 16), surrogate_system.sigma) == {15}


def test_audit_over_enumeration(surrogate_system):
    nodes = list(enumerate_gm(2, (1, 6), 120, surrogate_system, grid=[Fraction(1)], ell_max=2))
    assert any(n.kind == "special" for n in nodes)
    assert sgm_audit(nodes, surrogate_system.sigma, 96).verdict == Verdict.PASS


def test_spreading_gap_canonical(toy_system):
    row = spreading_gap([1, 1], 1, toy_system, 96)
    assert row["k"] == 2
    assert TowerReal.of(Fraction(2, 256) - Fraction(1, 10 ** 30)).le(row["bound"]) is True
    assert row["bound"].le(Fraction(2, 256) + Fraction(1, 10 ** 8)) is True


def test_spreading_gap_surrogate_decreases(surrogate_system):
    bounds = [spreading_gap([1, Fraction(-1, 2)], N, surrogate_system, 96)["bound"] for N in (1, 2, 8, 64)]
    assert [b.exact for b in bounds] == [Fraction(49, 20) * 2, Fraction(29, 20) * 2,
                                         Fraction(37, 60) * 2, Fraction(0)]
    with pytest.raises(DomainError):
        spreading_gap([1], 0, surrogate_system)


def test_dual_spreading_note(toy_system):
    rows = dual_spreading_note(FiniteVector.parse("1:1 2:-1/2"), [1, 8], toy_system, 96)
    assert [r["N"] for r in rows] == [1, 8]
    assert all("gm_dual_lower" in r for r in rows)
    assert rows[0]["s_dual_lower"].overlaps(rows[1]["s_dual_lower"])
