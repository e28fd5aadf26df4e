"""
Block functionals, the operators T and T_nu, and the domination harnesses
"""

from fractions import Fraction
from functools import lru_cache

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from app.models.harness_models import Verdict
from app.models.parameter_models import SystemConfig
from app.services.errors import BlockDecompositionError, PreconditionError
from app.services.operator import (
    apply_T,
    apply_Tnu,
    check_block_domination,
    check_block_lower_estimate,
    check_ell_domination,
    check_tail_splitting,
    decompose_blocks,
    operator_norm_report,
    xstars_for,
)
from app.services.parameters import ParameterSystem
from app.services.vectors import FiniteVector, pairing


@lru_cache(maxsize=None)
def toy_xstars():
    return xstars_for(ParameterSystem(SystemConfig.toy()), 4, 96)


@pytest.fixture
def xstars():
    return toy_xstars()


def window_vectors():
    positive = st.fractions(min_value=Fraction(1, 8), max_value=2, max_denominator=8)
    return st.dictionaries(st.integers(min_value=1, max_value=26), positive, min_size=1, max_size=6).map(
        FiniteVector.from_mapping)


def test_blocks_are_consecutive(xstars):
    assert [(xstars[n].first, xstars[n].last) for n in (1, 2, 3)] == [(1, 2), (3, 4), (5, 6)]
    # L_4 = 1: the fourth functional lives on a tree of length 2
    assert xstars[4].tree.length == 2
    assert xstars[4].first == 7 and xstars[4].last == 26
    assert all(item.norm_lower == Fraction(1, 2) for item in xstars.items)


def test_functionals_pair_to_one_with_their_vectors(xstars):
    for item in xstars.items:
        assert pairing(item.functional, item.vector) == 1


def test_T_maps_matching_vectors_to_the_basis(xstars):
    for item in xstars.items:
        assert apply_T(xstars, item.vector) == FiniteVector.basis(item.slot)


def test_Tnu_weights_the_slots(xstars):
    assert apply_Tnu([1, Fraction(-1, 2)], xstars, xstars[2].vector) == FiniteVector.basis(2, Fraction(-1, 2))
    assert apply_Tnu(lambda i: Fraction(1, i), xstars, xstars[4].vector) == FiniteVector.basis(4, Fraction(1, 4))


@settings(max_examples=30, deadline=None)
@given(window_vectors(), window_vectors())
def test_T_is_linear(x, y):
    xstars = toy_xstars()
    assert apply_T(xstars, x + y) == apply_T(xstars, x) + apply_T(xstars, y)


@settings(max_examples=30, deadline=None)
@given(window_vectors())
def test_decomposition_reconstructs_positive_vectors(x):
    xstars = toy_xstars()
    dec = decompose_blocks(x, xstars)
    assert dec.reconstruct() == x
    for slot, z in enumerate(dec.zs, start=1):
        assert pairing(xstars[slot].functional, z) == 1


def test_annihilated_part_cannot_be_decomposed(xstars):
    with pytest.raises(BlockDecompositionError):
        decompose_blocks(FiniteVector.parse("1:1 2:-1"), xstars)


def test_gap_slots_get_fillers(xstars):
    dec = decompose_blocks(FiniteVector.basis(5), xstars)
    assert dec.fillers == (1, 2)
    assert dec.lambdas[:2] == (0, 0)


@pytest.mark.parametrize("ell", [2, 4, 8])
def test_matching_vector_ratio_is_one_over_f(xstars, ell):
    dec = decompose_blocks(xstars[1].vector, xstars)
    ratio, report = check_block_domination(xstars, dec.zs, dec.lambdas, ell, precision=96)
    with mpmath.workprec(200):
        assert ratio.lo <= 1 / mpmath.log(ell + 1, 2) <= ratio.hi
    assert report.verdict == Verdict.PASS


def test_lower_estimate_precondition(xstars, toy_system):
    dec = decompose_blocks(FiniteVector.flat(6), xstars)
    with pytest.raises(PreconditionError):
        check_block_lower_estimate(xstars, dec.zs, 2, [1, 2], dec.lambdas, toy_system, 96)
    report = check_block_lower_estimate(xstars, dec.zs, 2, [2, 3], dec.lambdas, toy_system, 96)
    assert report.checks[0].name == "lower_estimate"
    assert any(c.name.startswith("descent_invariant") for c in report.checks)


def test_tail_splitting_is_measure_only_for_small_r(toy_system):
    report = check_tail_splitting(FiniteVector.parse("1:1 2:1/2 5:-1"), 2, toy_system)
    assert report.measurements["mode"] == "measure-only"
    assert all(not c.hard for c in report.checks)
    with pytest.raises(PreconditionError):
        check_tail_splitting(FiniteVector.basis(1), 2, toy_system, measure_only=False)


def test_tail_splitting_collapses_parts_with_small_attainers(toy_system):
    # ||x||_2 = (4 + 2/f(2)) / f(2) with parts [4], [1, 1]; the second is normed by n = 2 <= r^f(r) = 3
    report = check_tail_splitting(FiniteVector.parse("1:4 2:1 3:1"), 2, toy_system, precision=96)
    checks = {c.name: c for c in report.checks}
    assert report.measurements["candidates"] == [2, 3]
    assert report.measurements["witness_ell"] == 2
    assert report.measurements["J"] == [1, 2]
    assert report.measurements["parts"] == []
    assert report.measurements["replaced"] == [{"part": [2, 3], "n": 2, "coordinate": 2}]
    assert checks["splitting_bound"].verdict == Verdict.FAIL
    assert not checks["splitting_bound"].hard
    assert checks["parts_beyond_r_power"].verdict == Verdict.FAIL
    with mpmath.workprec(120):
        f2 = mpmath.log(3, 2)
        assert mpmath.mpf(checks["splitting_bound"].details["rhs"]["hi"]) < (4 + 2 / f2) / f2
        assert abs(mpmath.mpf(checks["splitting_bound"].details["rhs"]["lo"]) - 5 / f2) < mpmath.mpf(10) ** -20


def test_tail_splitting_is_certified_once_f_r_exceeds_d_squared():
    system = ParameterSystem(SystemConfig.toy().model_copy(update={"c": 2}))
    r = 2 ** 1100
    report = check_tail_splitting(FiniteVector.parse("1:4 2:1 3:1"), r, system, measure_only=False, precision=96)
    checks = {c.name: c for c in report.checks}
    assert report.measurements["mode"] == "certified"
    assert report.measurements["candidates"] == [r]
    assert report.measurements["J"] == [1, 2, 3]
    assert checks["splitting_bound"].hard
    assert checks["splitting_bound"].verdict == Verdict.PASS
    assert checks["parts_beyond_r_power"].verdict == Verdict.PASS


def test_tail_splitting_witness_search_respects_ell_max(toy_system):
    x = FiniteVector.parse("1:1 2:1/2 3:1/4 4:1/8 5:1/16")
    narrow = check_tail_splitting(x, 2, toy_system, precision=96, ell_max=2)
    wide = check_tail_splitting(x, 2, toy_system, precision=96, ell_max=5)
    assert set(narrow.measurements["candidates"]) == {2, narrow.measurements["attaining_ell"]}
    assert wide.measurements["candidates"] == [2, 3, 4, 5]


def test_ell_domination_needs_m0(xstars, toy_system):
    dec = decompose_blocks(xstars[1].vector, xstars)
    with pytest.raises(PreconditionError):
        check_ell_domination(xstars, dec.zs, 2, dec.lambdas, toy_system, 96)


def test_operator_norm_report_certifies_matching_vectors(xstars, toy_system):
    corpus = [item.vector for item in xstars.items]
    report = operator_norm_report(xstars, corpus, toy_system, nus=[[1, Fraction(-1, 2)]], precision=96)
    names = [c.name for c in report.checks]
    assert names[:4] == [f"matching_vector[slot={n}]" for n in (1, 2, 3, 4)]
    assert report.verdict == Verdict.PASS
    assert report.measurements["nu"][0]["sup"] == "1"
