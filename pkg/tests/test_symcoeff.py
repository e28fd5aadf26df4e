"""
Exact f-monomial coefficients and finite vectors
"""

from fractions import Fraction

import pytest

from app.services.errors import DomainError, ParseError
from app.services.intervals import raw_le, raw_point
from app.services.symcoeff import SymCoeff, normalize
from app.services.vectors import FiniteVector, is_successive, pairing, sum_vectors


def test_power_of_two_atoms_fold_to_rationals():
    assert SymCoeff.f_power(1) == 1
    assert SymCoeff.f_power(3) == 2
    assert SymCoeff.f_power(255, -1) == Fraction(1, 8)
    assert SymCoeff.f_power(15, Fraction(1, 2)) == 2


def test_symbolic_atom_stays_symbolic():
    f2 = SymCoeff.f_power(2)
    assert not f2.is_rational()
    assert (f2 * SymCoeff.f_power(2, -1)) == 1
    assert normalize(f2 / f2) == Fraction(1)


def test_half_integer_exponents_only():
    with pytest.raises(DomainError):
        SymCoeff.f_power(2, Fraction(1, 3))


def test_enclosure_and_sign():
    f2 = SymCoeff.f_power(2)
    lo, hi = f2.enclose(128)
    assert raw_le(raw_point(Fraction(158, 100), 128), (lo, hi))
    assert raw_le((lo, hi), raw_point(Fraction(159, 100), 128))
    assert (1 - f2).sign() == -1
    assert abs(1 - f2) == f2 - 1


def test_parse_literal():
    x = FiniteVector.parse("1:1 3:-1/2 4:3/4")
    assert x.support == (1, 3, 4)
    assert x.coeff(3) == Fraction(-1, 2)
    assert x.literal() == "1:1/1 3:-1/2 4:3/4"
    assert FiniteVector.parse(x.literal()) == x


@pytest.mark.parametrize("text", ["1:1 1:2", "0:1", "a:1", "2", "1:1/0"])
def test_parse_rejects_malformed_literals(text):
    with pytest.raises(ParseError):
        FiniteVector.parse(text)


def test_zero_coefficients_are_dropped():
    assert FiniteVector.parse("1:0 2:1").support == (2,)
    assert FiniteVector.parse("").is_zero()


def test_pairing_and_sum():
    x = FiniteVector.flat(3)
    xstar = FiniteVector.from_mapping({2: Fraction(1, 2), 5: Fraction(7)})
    assert pairing(xstar, x) == Fraction(1, 2)
    assert sum_vectors([x, -x]).is_zero()


def test_successive_blocks():
    a, b = FiniteVector.flat(2), FiniteVector.flat(2, start=3)
    assert is_successive([a, b])
    assert not is_successive([b, a])
    assert not is_successive([a, FiniteVector.flat(2, start=2)])


def test_restrict_and_spread():
    x = FiniteVector.flat(5)
    assert x.restrict(2, 3).support == (2, 3)
    assert x.restrict(9, 12).is_zero()
    assert FiniteVector.flat(2).spread([4, 10]).support == (4, 10)
