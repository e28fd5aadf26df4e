"""
Certified evaluation of the implicit norm, the l-norms and the tail norm
"""

import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from app.services.core_norms import PartitionWitness, norm_calculator
from app.services.errors import DomainError
from app.services.vectors import FiniteVector

coefficients = st.fractions(min_value=-2, max_value=2, max_denominator=8)


def vectors(max_size=5):
    return st.lists(coefficients, min_size=1, max_size=max_size).map(FiniteVector.from_coefficients)


def encloses(interval, thunk):
    """Evaluate thunk at 256 bits and test membership"""
    with mpmath.workprec(256):
        value = thunk()
        return interval.lo <= value <= interval.hi


def test_basis_vector_has_norm_one():
    assert norm_calculator.s_norm(FiniteVector.basis(7), 128).contains(1)


def test_pair_norm_is_two_over_f2(pair):
    norm = norm_calculator.s_norm(pair, 128)
    assert encloses(norm, lambda: 2 / mpmath.log(3, 2))
    assert abs(norm.to_float() - 1.2618595071429148) < 1e-12


@pytest.mark.parametrize("n", [1, 3, 7, 15])
def test_flat_vectors_follow_n_over_f(n):
    norm = norm_calculator.s_norm(FiniteVector.flat(n), 128)
    assert norm.contains(Fraction(n, int(math.log2(n + 1))))


def test_zero_vector():
    assert norm_calculator.s_norm(FiniteVector(), 128).contains(0)
    with pytest.raises(DomainError):
        norm_calculator.norm_attainer(FiniteVector(), 128)


def test_enclosure_width_is_tight(pair):
    assert norm_calculator.s_norm(pair, 128).width < mpmath.mpf(2) ** -120


def test_precision_floor():
    with pytest.raises(DomainError):
        norm_calculator.s_norm(FiniteVector.basis(1), 8)


def test_attainer_for_basis_and_flat(pair):
    assert norm_calculator.norm_attainer(FiniteVector.basis(3), 128) == math.inf
    assert norm_calculator.norm_attainer(pair, 128) == 2


def test_ell_norm_domain():
    with pytest.raises(DomainError):
        norm_calculator.ell_norm(FiniteVector.basis(1), 1, 128)


def test_ell_norm_of_flat_pair(pair):
    assert norm_calculator.ell_norm(pair, 2, 128).overlaps(norm_calculator.s_norm(pair, 128))
    # four slots, two of them used
    assert encloses(norm_calculator.ell_norm(pair, 4, 128), lambda: 2 / mpmath.log(5, 2))


def test_best_partition_witness_evaluates_to_ell_norm(mixed):
    witness = norm_calculator.best_partition(mixed, 3, 128)
    assert witness.slot_count == 3
    assert witness.parts[0][0] == mixed.min_support
    assert norm_calculator.evaluate_partition(mixed, witness, 128).overlaps(
        norm_calculator.ell_norm(mixed, 3, 128))


def test_partition_witness_validates_parts():
    with pytest.raises(DomainError):
        PartitionWitness(((1, 3), (2, 4)), 2)
    with pytest.raises(DomainError):
        PartitionWitness(((1, 1), (2, 2), (3, 3)), 2)


def test_tail_norm_scans_from_r(mixed):
    value, ell = norm_calculator.tail_norm(mixed, 2, 128)
    assert ell >= 2
    assert value.overlaps(norm_calculator.ell_norm(mixed, ell, 128))
    with pytest.raises(DomainError):
        norm_calculator.tail_norm(mixed, Fraction(3, 2), 128)


def test_dual_lower_bound_of_average_functional(pair):
    bound = norm_calculator.dual_lower_bound(pair.scale(Fraction(1, 2)), pair, 128)
    assert encloses(bound, lambda: mpmath.log(3, 2) / 2)


def test_brute_force_cap():
    with pytest.raises(DomainError):
        norm_calculator.brute_force_norm(FiniteVector.flat(20), 64)


@settings(max_examples=40, deadline=None)
@given(vectors())
def test_dynamic_program_matches_brute_force(x):
    assert norm_calculator.s_norm(x, 96).overlaps(norm_calculator.brute_force_norm(x, 96))


@settings(max_examples=40, deadline=None)
@given(vectors())
def test_norm_is_sign_and_shift_invariant(x):
    norm = norm_calculator.s_norm(x, 96)
    assert norm.overlaps(norm_calculator.s_norm(-x, 96))
    assert norm.overlaps(norm_calculator.s_norm(x.abs(), 96))
    assert norm.overlaps(norm_calculator.s_norm(x.shift_to(50), 96))


@settings(max_examples=30, deadline=None)
@given(vectors(), vectors())
def test_triangle_inequality(x, y):
    total = norm_calculator.s_norm(x + y, 96)
    assert total.lo <= norm_calculator.s_norm(x, 96).hi + norm_calculator.s_norm(y, 96).hi


@settings(max_examples=30, deadline=None)
@given(vectors(), st.integers(min_value=2, max_value=6))
def test_ell_norm_never_exceeds_norm(x, ell):
    assert norm_calculator.ell_norm(x, ell, 96).lo <= norm_calculator.s_norm(x, 96).hi
