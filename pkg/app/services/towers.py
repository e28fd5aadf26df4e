"""
Tower arithmetic for astronomically large and small reals

A TowerReal of height 0 is a plain enclosure [lo, hi] (optionally an exact Fraction).
Height h >= 1 denotes  sign * exp2^h(top)  or, when inverted,  sign / exp2^h(top),
with top a positive enclosure. Plain values stay within the binary window
2^-W .. 2^W (W = 2^20); anything beyond is lifted one height by taking log2 of the
top, and tops at or below W are lowered again. Every operation rounds outward, so
comparisons are rigorous: LESS and GREATER are proven, UNKNOWN is always possible.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Optional, Union

from mpmath import libmp

from app.config import settings
from app.services.errors import DomainError, TowerRangeError
from app.services.intervals import (
    RAW_ONE,
    Raw,
    RawMpf,
    as_fraction,
    exact_log2,
    raw_add,
    raw_div,
    raw_exp2,
    raw_log2,
    raw_mul,
    raw_neg,
    raw_point,
    raw_sqrt,
    raw_sub,
    raw_to_float,
    raw_to_str,
)

logger = logging.getLogger(__name__)

WINDOW_BITS = 20
WINDOW = 1 << WINDOW_BITS
EXACT_BITS = 4096

_W = libmp.from_int(WINDOW)
_NEG_W = libmp.from_int(-WINDOW)
_BIG = libmp.mpf_shift(libmp.fone, WINDOW)
_NEG_BIG = libmp.mpf_neg(_BIG)
_TINY = libmp.mpf_shift(libmp.fone, -WINDOW)
_NEG_TINY = libmp.mpf_neg(_TINY)
_ZERO = libmp.fzero


class Ordering(str, Enum):
    LESS = "less"
    GREATER = "greater"
    EQUAL = "equal"
    UNKNOWN = "unknown"


def _default_prec() -> int:
    return settings.precision_bits + settings.guard_bits


def _small_enough(q: Fraction) -> bool:
    return q.numerator.bit_length() <= EXACT_BITS and q.denominator.bit_length() <= EXACT_BITS


@dataclass(frozen=True)
class TowerReal:
    height: int
    lo: RawMpf
    hi: RawMpf
    sign: int = 1
    inverted: bool = False
    exact: Optional[Fraction] = None
    prec: int = 160

    # -- constructors ------------------------------------------------------

    @classmethod
    def of(cls, value: Union["TowerReal", int, Fraction, str], prec: Optional[int] = None) -> "TowerReal":
        if isinstance(value, TowerReal):
            return value
        q = as_fraction(value)
        prec = prec or _default_prec()
        if not _small_enough(q):
            lo, hi = raw_point(q, prec)
            return _normalize(cls(0, lo, hi, prec=prec))
        lo, hi = raw_point(q, prec)
        return _normalize(cls(0, lo, hi, exact=q, prec=prec))

    @classmethod
    def plain(cls, raw: Raw, prec: Optional[int] = None) -> "TowerReal":
        return _normalize(cls(0, raw[0], raw[1], prec=prec or _default_prec()))

    @classmethod
    def tower(cls, height: int, top: Union[int, Fraction, Raw], prec: Optional[int] = None) -> "TowerReal":
        """exp2 applied height times to top"""
        prec = prec or _default_prec()
        raw = top if isinstance(top, tuple) else raw_point(top, prec)
        if height == 0:
            return cls.plain(raw, prec)
        if not libmp.mpf_gt(raw[0], _ZERO):
            raise DomainError("tower tops must be positive")
        return _normalize(cls(height, raw[0], raw[1], prec=prec))

    # -- inspection --------------------------------------------------------

    @property
    def raw(self) -> Raw:
        return self.lo, self.hi

    @property
    def is_plain(self) -> bool:
        return self.height == 0

    def plain_raw(self) -> Raw:
        if not self.is_plain:
            raise TowerRangeError(f"value of height {self.height} has no plain enclosure")
        return self.raw

    def certain_sign(self) -> Optional[int]:
        if self.height:
            return self.sign
        if self.exact is not None:
            return (self.exact > 0) - (self.exact < 0)
        if libmp.mpf_gt(self.lo, _ZERO):
            return 1
        if libmp.mpf_lt(self.hi, _ZERO):
            return -1
        if self.lo == _ZERO and self.hi == _ZERO:
            return 0
        return None

    def to_float(self) -> float:
        if self.height == 0:
            return raw_to_float(libmp.mpi_mid(self.raw, 64))
        if self.inverted:
            return 0.0
        return float("inf") * self.sign

    def to_dict(self) -> dict:
        out = {
            "height": self.height,
            "lo": raw_to_str(self.lo, min(self.prec, 128)),
            "hi": raw_to_str(self.hi, min(self.prec, 128)),
        }
        if self.height:
            out.update(sign=self.sign, inverted=self.inverted)
        if self.exact is not None:
            out["exact"] = str(self.exact)
        return out

    def __str__(self) -> str:
        if self.exact is not None:
            return str(self.exact)
        top = libmp.mpi_str(self.raw, min(self.prec, 64))
        if self.height == 0:
            return top
        body = f"2^^{self.height}{top}"
        body = f"1/{body}" if self.inverted else body
        return f"-{body}" if self.sign < 0 else body

    # -- arithmetic --------------------------------------------------------

    def __neg__(self) -> "TowerReal":
        if self.height == 0:
            lo, hi = raw_neg(self.raw)
            return TowerReal(0, lo, hi, exact=-self.exact if self.exact is not None else None, prec=self.prec)
        return TowerReal(self.height, self.lo, self.hi, -self.sign, self.inverted, prec=self.prec)

    def __abs__(self) -> "TowerReal":
        s = self.certain_sign()
        if s is None:
            raise TowerRangeError("absolute value of an enclosure that straddles zero")
        return -self if s < 0 else self

    def __add__(self, other) -> "TowerReal":
        return tower_add(self, TowerReal.of(other, self.prec))

    __radd__ = __add__

    def __sub__(self, other) -> "TowerReal":
        return tower_add(self, -TowerReal.of(other, self.prec))

    def __rsub__(self, other) -> "TowerReal":
        return tower_add(TowerReal.of(other, self.prec), -self)

    def __mul__(self, other) -> "TowerReal":
        return tower_mul(self, TowerReal.of(other, self.prec))

    __rmul__ = __mul__

    def __truediv__(self, other) -> "TowerReal":
        return tower_div(self, TowerReal.of(other, self.prec))

    def __rtruediv__(self, other) -> "TowerReal":
        return tower_div(TowerReal.of(other, self.prec), self)

    def log2(self) -> "TowerReal":
        return tower_log2(self)

    def exp2(self) -> "TowerReal":
        return tower_exp2(self)

    def f(self) -> "TowerReal":
        """log2(x + 1)"""
        return tower_f(self)

    def pow(self, exponent) -> "TowerReal":
        return tower_pow(self, exponent)

    def sqrt(self) -> "TowerReal":
        return tower_pow(self, Fraction(1, 2))

    def compare(self, other) -> Ordering:
        return tower_compare(self, TowerReal.of(other, self.prec))

    def le(self, other) -> Optional[bool]:
        return certainly_le(self, TowerReal.of(other, self.prec))

    def lt(self, other) -> Optional[bool]:
        return certainly_lt(self, TowerReal.of(other, self.prec))


# ---------------------------------------------------------------------------
# normalization
# ---------------------------------------------------------------------------

def _check_height(height: int) -> None:
    if height > settings.tower_height_cap:
        raise TowerRangeError(f"tower height {height} exceeds the cap {settings.tower_height_cap}")


def _normalize(t: TowerReal) -> TowerReal:
    prec = t.prec
    while True:
        if t.height == 0:
            lo, hi = t.raw
            if libmp.mpf_gt(lo, _BIG):
                top = raw_log2(t.raw, prec)
                t = TowerReal(1, top[0], top[1], 1, False, prec=prec)
            elif libmp.mpf_lt(hi, _NEG_BIG):
                top = raw_log2(raw_neg(t.raw), prec)
                t = TowerReal(1, top[0], top[1], -1, False, prec=prec)
            elif libmp.mpf_gt(lo, _ZERO) and libmp.mpf_lt(hi, _TINY):
                top = raw_neg(raw_log2(t.raw, prec))
                t = TowerReal(1, top[0], top[1], 1, True, prec=prec)
            elif libmp.mpf_lt(hi, _ZERO) and libmp.mpf_gt(lo, _NEG_TINY):
                top = raw_neg(raw_log2(raw_neg(t.raw), prec))
                t = TowerReal(1, top[0], top[1], -1, True, prec=prec)
            else:
                return t
            continue
        if not libmp.mpf_gt(t.lo, _ZERO):
            raise TowerRangeError("tower top is not positive")
        if libmp.mpf_le(t.hi, _W):
            top = raw_exp2(t.raw, prec)
            if t.height == 1:
                value = top
                if t.inverted:
                    value = raw_div(RAW_ONE, value, prec)
                if t.sign < 0:
                    value = raw_neg(value)
                t = TowerReal(0, value[0], value[1], prec=prec)
                return t
            t = TowerReal(t.height - 1, top[0], top[1], t.sign, t.inverted, prec=prec)
            continue
        if libmp.mpf_gt(t.lo, _BIG):
            _check_height(t.height + 1)
            top = raw_log2(t.raw, prec)
            t = TowerReal(t.height + 1, top[0], top[1], t.sign, t.inverted, prec=prec)
            continue
        _check_height(t.height)
        return t


def _magnitude_bits(t: TowerReal) -> int:
    """n >= 0 with exp2^h(top) >= 2^n, capped at W"""
    x = libmp.to_int(libmp.mpf_floor(t.lo))
    for _ in range(t.height - 1):
        if x >= WINDOW_BITS + 1:
            return WINDOW
        x = 1 << max(x, 0)
        if x >= WINDOW:
            return WINDOW
    return max(0, min(x, WINDOW))


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------

def tower_log2(x: TowerReal) -> TowerReal:
    prec = x.prec
    if x.height == 0:
        if x.exact is not None:
            if x.exact <= 0:
                raise DomainError(f"log2 of non-positive value {x.exact}")
            k = exact_log2(x.exact)
            if k is not None:
                return TowerReal.of(k, prec)
        if not libmp.mpf_gt(x.lo, _ZERO):
            raise DomainError("log2 of an enclosure that is not strictly positive")
        return TowerReal.plain(raw_log2(x.raw, prec), prec)
    if x.sign < 0:
        raise DomainError("log2 of a negative tower")
    sign = -1 if x.inverted else 1
    if x.height == 1:
        value = x.raw if sign > 0 else raw_neg(x.raw)
        return TowerReal.plain(value, prec)
    return _normalize(TowerReal(x.height - 1, x.lo, x.hi, sign, False, prec=prec))


def tower_exp2(y: TowerReal) -> TowerReal:
    prec = y.prec
    if y.height == 0:
        if y.exact is not None and y.exact.denominator == 1 and abs(y.exact) <= EXACT_BITS:
            return TowerReal.of(Fraction(2) ** int(y.exact), prec)
        lo, hi = y.raw
        if libmp.mpf_le(hi, _W) and libmp.mpf_ge(lo, _NEG_W):
            return TowerReal.plain(raw_exp2(y.raw, prec), prec)
        if libmp.mpf_gt(lo, _ZERO):
            return _normalize(TowerReal(1, lo, hi, 1, False, prec=prec))
        if libmp.mpf_lt(hi, _ZERO):
            top = raw_neg(y.raw)
            return _normalize(TowerReal(1, top[0], top[1], 1, True, prec=prec))
        raise TowerRangeError("exponent enclosure straddles zero and leaves the window")
    if not y.inverted:
        return _normalize(TowerReal(y.height + 1, y.lo, y.hi, 1, y.sign < 0, prec=prec))
    # |y| <= 2^-n: 1 + y lies between the bounds of 2^y on the matching side
    eps = libmp.mpf_shift(libmp.fone, -_magnitude_bits(y))
    if y.sign > 0:
        return TowerReal.plain((libmp.fone, libmp.mpf_add(libmp.fone, eps, prec, libmp.round_ceiling)), prec)
    return TowerReal.plain((libmp.mpf_sub(libmp.fone, eps, prec, libmp.round_floor), libmp.fone), prec)


def _exact_pair(a: TowerReal, b: TowerReal) -> bool:
    return a.exact is not None and b.exact is not None


def tower_add(a: TowerReal, b: TowerReal) -> TowerReal:
    prec = max(a.prec, b.prec)
    if _exact_pair(a, b):
        return TowerReal.of(a.exact + b.exact, prec)
    if a.height == 0 and b.height == 0:
        return TowerReal.plain(raw_add(a.raw, b.raw, prec), prec)
    sa, sb = a.certain_sign(), b.certain_sign()
    if sa == 0:
        return b
    if sb == 0:
        return a
    if sa is None or sb is None:
        raise TowerRangeError("sum of a tower and an enclosure of unknown sign")
    order = tower_compare(abs(a), abs(b))
    big, small = (b, a) if order == Ordering.LESS else (a, b)
    ratio = tower_exp2(tower_log2(abs(small)) - tower_log2(abs(big)))
    if sa == sb:
        log_factor = _log2_one_plus(ratio)
    else:
        if order in (Ordering.UNKNOWN, Ordering.EQUAL):
            raise TowerRangeError("cancellation between towers of undecided order")
        log_factor = _log2_one_minus(ratio)
    magnitude = tower_exp2(tower_log2(abs(big)) + log_factor)
    return magnitude if big.certain_sign() > 0 else -magnitude


def _log2_one_plus(r: TowerReal) -> TowerReal:
    prec = r.prec
    if r.height == 0:
        return TowerReal.plain(raw_log2(raw_add(RAW_ONE, r.raw, prec), prec), prec)
    if r.inverted:
        eps = libmp.mpf_shift(libmp.fone, 1 - _magnitude_bits(r))
        return TowerReal.plain((_ZERO, eps), prec)
    return tower_log2(tower_add(TowerReal.of(1, prec), r))


def _log2_one_minus(r: TowerReal) -> TowerReal:
    prec = r.prec
    if r.height == 0:
        one_minus = raw_sub(RAW_ONE, r.raw, prec)
        if not libmp.mpf_gt(one_minus[0], _ZERO):
            raise TowerRangeError("cancellation leaves no certified positive difference")
        return TowerReal.plain(raw_log2(one_minus, prec), prec)
    if r.inverted:
        eps = libmp.mpf_shift(libmp.fone, 1 - _magnitude_bits(r))
        return TowerReal.plain((libmp.mpf_neg(eps), _ZERO), prec)
    raise TowerRangeError("cancellation against a larger tower")


def tower_mul(a: TowerReal, b: TowerReal) -> TowerReal:
    prec = max(a.prec, b.prec)
    if _exact_pair(a, b):
        return TowerReal.of(a.exact * b.exact, prec)
    if a.height == 0 and b.height == 0:
        return TowerReal.plain(raw_mul(a.raw, b.raw, prec), prec)
    sa, sb = a.certain_sign(), b.certain_sign()
    if sa == 0 or sb == 0:
        return TowerReal.of(0, prec)
    if sa is None or sb is None:
        raise TowerRangeError("product of a tower and an enclosure of unknown sign")
    magnitude = tower_exp2(tower_log2(abs(a)) + tower_log2(abs(b)))
    return magnitude if sa * sb > 0 else -magnitude


def tower_div(a: TowerReal, b: TowerReal) -> TowerReal:
    prec = max(a.prec, b.prec)
    sb = b.certain_sign()
    if sb == 0 or sb is None:
        raise DomainError("division by an enclosure that may be zero")
    if _exact_pair(a, b):
        return TowerReal.of(a.exact / b.exact, prec)
    if a.height == 0 and b.height == 0:
        return TowerReal.plain(raw_div(a.raw, b.raw, prec), prec)
    sa = a.certain_sign()
    if sa == 0:
        return TowerReal.of(0, prec)
    if sa is None:
        raise TowerRangeError("quotient of an enclosure of unknown sign")
    magnitude = tower_exp2(tower_log2(abs(a)) - tower_log2(abs(b)))
    return magnitude if sa * sb > 0 else -magnitude


def tower_pow(x: TowerReal, exponent) -> TowerReal:
    """x^e for x > 0"""
    e = TowerReal.of(exponent, x.prec)
    if x.exact is not None and e.exact is not None and e.exact.denominator == 1 and 0 <= e.exact <= 64:
        return TowerReal.of(x.exact ** int(e.exact), x.prec)
    if x.height == 0 and e.exact == Fraction(1, 2):
        return TowerReal.plain(raw_sqrt(x.raw, x.prec), x.prec)
    return tower_exp2(tower_mul(e, tower_log2(x)))


def tower_f(x: TowerReal) -> TowerReal:
    """f(x) = log2(x + 1) for x >= 1"""
    if x.certain_sign() != 1:
        raise DomainError("f is evaluated on x >= 1")
    return tower_log2(x + 1)


def exp2_iter(x: TowerReal, times: int) -> TowerReal:
    for _ in range(times):
        x = tower_exp2(x)
    return x


def tower_compare(a: TowerReal, b: TowerReal) -> Ordering:
    if a is b:
        return Ordering.EQUAL
    if _exact_pair(a, b):
        return Ordering.LESS if a.exact < b.exact else Ordering.GREATER if a.exact > b.exact else Ordering.EQUAL
    if a.height == 0 and b.height == 0:
        if libmp.mpf_lt(a.hi, b.lo):
            return Ordering.LESS
        if libmp.mpf_gt(a.lo, b.hi):
            return Ordering.GREATER
        if a.lo == a.hi == b.lo == b.hi:
            return Ordering.EQUAL
        return Ordering.UNKNOWN
    sa, sb = a.certain_sign(), b.certain_sign()
    if sa is None or sb is None:
        return Ordering.UNKNOWN
    if sa != sb:
        return Ordering.LESS if sa < sb else Ordering.GREATER
    if sa == 0:
        return Ordering.EQUAL
    if sa < 0:
        return tower_compare(-b, -a)
    return tower_compare(tower_log2(a), tower_log2(b))


def certainly_le(a: TowerReal, b: TowerReal) -> Optional[bool]:
    """Certified a <= b; touching endpoints count as proven"""
    if a is b:
        return True
    if _exact_pair(a, b):
        return a.exact <= b.exact
    if a.height == 0 and b.height == 0:
        if libmp.mpf_le(a.hi, b.lo):
            return True
        if libmp.mpf_gt(a.lo, b.hi):
            return False
        return None
    sa, sb = a.certain_sign(), b.certain_sign()
    if sa is None or sb is None:
        return None
    if sa != sb:
        return sa < sb
    if sa == 0:
        return True
    if sa < 0:
        return certainly_le(-b, -a)
    return certainly_le(tower_log2(a), tower_log2(b))


def certainly_lt(a: TowerReal, b: TowerReal) -> Optional[bool]:
    order = tower_compare(a, b)
    if order == Ordering.LESS:
        return True
    if order in (Ordering.GREATER, Ordering.EQUAL):
        return False
    return None


def tower_max(a: TowerReal, b: TowerReal) -> TowerReal:
    """Certified max when the order is decided, else the plain hull"""
    order = tower_compare(a, b)
    if order in (Ordering.GREATER, Ordering.EQUAL):
        return a
    if order == Ordering.LESS:
        return b
    if a.height == 0 and b.height == 0:
        lo = a.lo if libmp.mpf_ge(a.lo, b.lo) else b.lo
        hi = a.hi if libmp.mpf_ge(a.hi, b.hi) else b.hi
        return TowerReal.plain((lo, hi), max(a.prec, b.prec))
    if a.height == b.height and a.sign == b.sign == 1 and not a.inverted and not b.inverted:
        lo = a.lo if libmp.mpf_ge(a.lo, b.lo) else b.lo
        hi = a.hi if libmp.mpf_ge(a.hi, b.hi) else b.hi
        return TowerReal(a.height, lo, hi, prec=max(a.prec, b.prec))
    raise TowerRangeError("maximum of towers of undecided order")


def tower_hull(a: TowerReal, b: TowerReal) -> TowerReal:
    """Enclosure of every value between a and b"""
    prec = max(a.prec, b.prec)
    if a.height == 0 and b.height == 0:
        lo = a.lo if libmp.mpf_le(a.lo, b.lo) else b.lo
        hi = a.hi if libmp.mpf_ge(a.hi, b.hi) else b.hi
        return TowerReal.plain((lo, hi), prec)
    if a.height == b.height and a.sign == b.sign and a.inverted == b.inverted:
        lo = a.lo if libmp.mpf_le(a.lo, b.lo) else b.lo
        hi = a.hi if libmp.mpf_ge(a.hi, b.hi) else b.hi
        return TowerReal(a.height, lo, hi, a.sign, a.inverted, prec=prec)
    raise TowerRangeError("hull of towers of different shapes")
