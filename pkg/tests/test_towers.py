"""
Tower arithmetic: exact small values, lifted towers and certified comparisons
"""

from fractions import Fraction

import pytest

from app.config import settings
from app.services.errors import DomainError, TowerRangeError
from app.services.towers import Ordering, TowerReal, exp2_iter, tower_hull


def test_f_is_exact_on_powers_of_two_minus_one():
    assert TowerReal.of(255).f().exact == 8
    assert TowerReal.of(2 ** 256 - 1).f().exact == 256


def test_f_of_two_is_an_enclosure():
    f2 = TowerReal.of(2).f()
    assert f2.exact is None
    assert TowerReal.of(Fraction(158, 100)).lt(f2) is True
    assert f2.lt(Fraction(159, 100)) is True


def test_exact_exp2_stays_exact():
    assert exp2_iter(TowerReal.of(3), 2).exact == 256


def test_towers_order_by_height():
    low, high = TowerReal.tower(2, 100), TowerReal.tower(3, 100)
    assert low.compare(high) == Ordering.LESS
    assert high.compare(low) == Ordering.GREATER
    assert low.le(high) is True


def test_logarithms_peel_tower_levels():
    t = TowerReal.tower(2, 30)
    inner = t.log2().log2()
    assert TowerReal.of(29).le(inner) is True
    assert inner.le(31) is True


def test_inverted_towers_are_tiny_and_positive():
    tiny = 1 / TowerReal.tower(2, 100)
    assert tiny.certain_sign() == 1
    assert tiny.le(Fraction(1, 10 ** 9)) is True


def test_adding_a_tiny_tower_keeps_a_plain_enclosure():
    total = TowerReal.of(Fraction(1, 256)) + 1 / TowerReal.tower(3, 100)
    assert total.is_plain
    assert TowerReal.of(Fraction(1, 256) - Fraction(1, 10 ** 30)).le(total) is True
    assert total.le(Fraction(1, 256) + Fraction(1, 10 ** 12)) is True


def test_a_value_is_ordered_against_itself():
    k = TowerReal.tower(3, 100)
    m = (k.exp2() - 1) / k
    assert m.le(m) is True
    assert m.lt(m) is False
    assert m.compare(m) == Ordering.EQUAL


def test_hull_spans_both_enclosures():
    a, b = TowerReal.of(Fraction(3, 2)).f(), TowerReal.of(2).f()
    assert tower_hull(a, b).raw == (a.lo, b.hi)
    low, high = TowerReal.tower(3, 100), TowerReal.tower(3, 101)
    hull = tower_hull(low, high)
    assert (hull.height, hull.lo, hull.hi) == (low.height, low.lo, high.hi)
    with pytest.raises(TowerRangeError):
        tower_hull(TowerReal.of(2), high)


def test_plain_window_ends_at_two_to_the_two_to_the_twenty():
    assert TowerReal.of(2 ** 1024).exact == 2 ** 1024
    assert TowerReal.tower(1, 2 ** 20).is_plain
    assert TowerReal.tower(1, 2 ** 20 + 1).height == 1


def test_height_cap():
    with pytest.raises(TowerRangeError):
        TowerReal.tower(settings.tower_height_cap + 1, 2 ** 30)


def test_plain_raw_of_tower_raises():
    with pytest.raises(TowerRangeError):
        TowerReal.tower(2, 100).plain_raw()


def test_division_by_zero_enclosure():
    with pytest.raises(DomainError):
        TowerReal.of(1) / TowerReal.of(0)


def test_f_needs_positive_argument():
    with pytest.raises(DomainError):
        TowerReal.of(-3).f()
