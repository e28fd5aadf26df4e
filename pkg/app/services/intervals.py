"""
Certified interval enclosures with directed rounding

All arithmetic runs on raw mpmath interval pairs (``libmp.mpi_*``) with an explicit
precision, so no global context state is touched and evaluations are thread safe.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Optional, Tuple, Union

import mpmath
from mpmath import libmp
from mpmath.libmp import round_ceiling, round_floor
from mpmath.libmp.libmpi import mpi_overlap

from app.services.errors import DomainError

logger = logging.getLogger(__name__)

RawMpf = tuple
Raw = Tuple[RawMpf, RawMpf]
Real = Union[int, Fraction, float]

FZERO = libmp.fzero
FONE = libmp.fone
RAW_ZERO: Raw = (FZERO, FZERO)
RAW_ONE: Raw = (FONE, FONE)


def as_fraction(value: Real) -> Fraction:
    """Convert int/Fraction/float (exactly) to Fraction"""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise DomainError(f"boolean is not a real number: {value!r}")
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    raise DomainError(f"cannot interpret {value!r} as an exact real")


def exact_log2(q: Fraction) -> Optional[int]:
    """Return k when q == 2**k exactly (k may be negative), else None"""
    if q <= 0:
        return None
    p, d = q.numerator, q.denominator
    if d == 1 and p & (p - 1) == 0:
        return p.bit_length() - 1
    if p == 1 and d & (d - 1) == 0:
        return -(d.bit_length() - 1)
    return None


# ---------------------------------------------------------------------------
# raw interval primitives
# ---------------------------------------------------------------------------

def raw_point(value: Real, prec: int) -> Raw:
    """Outward enclosure of an exact rational"""
    q = as_fraction(value)
    lo = libmp.from_rational(q.numerator, q.denominator, prec, round_floor)
    hi = libmp.from_rational(q.numerator, q.denominator, prec, round_ceiling)
    return lo, hi


def raw_hull(lo: Real, hi: Real, prec: int) -> Raw:
    return raw_point(lo, prec)[0], raw_point(hi, prec)[1]


def raw_round(s: Raw, prec: int) -> Raw:
    return libmp.mpi_pos(s, prec)


def raw_add(s: Raw, t: Raw, prec: int) -> Raw:
    return libmp.mpi_add(s, t, prec)


def raw_sub(s: Raw, t: Raw, prec: int) -> Raw:
    return libmp.mpi_sub(s, t, prec)


def raw_mul(s: Raw, t: Raw, prec: int) -> Raw:
    return libmp.mpi_mul(s, t, prec)


def raw_div(s: Raw, t: Raw, prec: int) -> Raw:
    if raw_contains_zero(t):
        raise DomainError("division by an enclosure that contains zero")
    return libmp.mpi_div(s, t, prec)


def raw_neg(s: Raw) -> Raw:
    return libmp.mpi_neg(s)


def raw_abs(s: Raw) -> Raw:
    return libmp.mpi_abs(s)


def raw_sqrt(s: Raw, prec: int) -> Raw:
    if libmp.mpf_lt(s[0], FZERO):
        raise DomainError("square root of an enclosure with negative part")
    return libmp.mpi_sqrt(s, prec)


def raw_max(s: Raw, t: Raw) -> Raw:
    lo = s[0] if libmp.mpf_ge(s[0], t[0]) else t[0]
    hi = s[1] if libmp.mpf_ge(s[1], t[1]) else t[1]
    return lo, hi


def raw_min(s: Raw, t: Raw) -> Raw:
    lo = s[0] if libmp.mpf_le(s[0], t[0]) else t[0]
    hi = s[1] if libmp.mpf_le(s[1], t[1]) else t[1]
    return lo, hi


def raw_union(s: Raw, t: Raw) -> Raw:
    lo = s[0] if libmp.mpf_le(s[0], t[0]) else t[0]
    hi = s[1] if libmp.mpf_ge(s[1], t[1]) else t[1]
    return lo, hi


def raw_is_point(s: Raw) -> bool:
    return s[0] == s[1]


def raw_contains_zero(s: Raw) -> bool:
    return libmp.mpf_le(s[0], FZERO) and libmp.mpf_ge(s[1], FZERO)


def raw_ln2(prec: int) -> Raw:
    return libmp.mpf_ln2(prec, round_floor), libmp.mpf_ln2(prec, round_ceiling)


def raw_log2(s: Raw, prec: int) -> Raw:
    """Enclosure of log2 over a strictly positive enclosure"""
    if not libmp.mpf_gt(s[0], FZERO):
        raise DomainError("log2 of an enclosure that is not strictly positive")
    if raw_is_point(s):
        man, exp = libmp.to_man_exp(s[0])
        if man == 1:
            point = libmp.from_int(exp)
            return point, point
    wp = prec + 20
    return libmp.mpi_div(libmp.mpi_log(s, wp), raw_ln2(wp), prec)


def raw_exp2(s: Raw, prec: int) -> Raw:
    """Enclosure of 2**s"""
    if raw_is_point(s) and libmp.mpf_floor(s[0]) == s[0]:
        n = libmp.to_int(s[0])
        point = libmp.mpf_shift(FONE, n)
        return point, point
    wp = prec + 20
    return libmp.mpi_exp(libmp.mpi_mul(s, raw_ln2(wp), wp), prec)


def raw_pow(base: Raw, exponent: Raw, prec: int) -> Raw:
    """Enclosure of base**exponent for a positive base"""
    if raw_is_point(exponent) and libmp.mpf_floor(exponent[0]) == exponent[0]:
        n = libmp.to_int(exponent[0])
        if n >= 0:
            return libmp.mpi_pow_int(base, n, prec)
    return raw_exp2(raw_mul(raw_log2(base, prec + 20), exponent, prec + 20), prec)


def raw_f(n: Real, prec: int) -> Raw:
    """Enclosure of f(n) = log2(n + 1) for an exact n >= 1"""
    q = as_fraction(n)
    if q < 1:
        raise DomainError(f"f is evaluated on n >= 1, got {q}")
    k = exact_log2(q + 1)
    if k is not None:
        point = libmp.from_int(k)
        return point, point
    return raw_log2(raw_point(q + 1, prec + 20), prec)


def raw_f_of_enclosure(s: Raw, prec: int) -> Raw:
    """Enclosure of f over an enclosure of arguments >= 1"""
    if raw_is_point(s):
        p, q = libmp.to_rational(s[0])
        return raw_f(Fraction(p, q), prec)
    return raw_log2(raw_add(s, RAW_ONE, prec + 20), prec)


def raw_le(s: Raw, t: Raw) -> Optional[bool]:
    """Certified s <= t: True, False, or None when undecided"""
    if libmp.mpf_le(s[1], t[0]):
        return True
    if libmp.mpf_gt(s[0], t[1]):
        return False
    return None


def raw_lt(s: Raw, t: Raw) -> Optional[bool]:
    if libmp.mpf_lt(s[1], t[0]):
        return True
    if libmp.mpf_ge(s[0], t[1]):
        return False
    return None


def raw_to_str(x: RawMpf, prec: int) -> str:
    return libmp.to_str(x, libmp.repr_dps(prec))


def raw_to_float(x: RawMpf) -> float:
    return libmp.to_float(x)


def raw_to_fraction(x: RawMpf) -> Fraction:
    p, q = libmp.to_rational(x)
    return Fraction(p, q)


# ---------------------------------------------------------------------------
# public enclosure type
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class NormInterval:
    """Certified enclosure [lo, hi] of a real value"""

    lo: mpmath.mpf
    hi: mpmath.mpf
    precision_bits: int

    @classmethod
    def from_raw(cls, raw: Raw, precision_bits: int) -> "NormInterval":
        """Round a working-precision enclosure outward to precision_bits"""
        lo, hi = raw_round(raw, precision_bits)
        return cls(mpmath.mp.make_mpf(lo), mpmath.mp.make_mpf(hi), precision_bits)

    @classmethod
    def exact(cls, value: Real, precision_bits: int) -> "NormInterval":
        return cls.from_raw(raw_point(value, precision_bits), precision_bits)

    @classmethod
    def zero(cls, precision_bits: int) -> "NormInterval":
        return cls.from_raw(RAW_ZERO, precision_bits)

    @property
    def raw(self) -> Raw:
        return self.lo._mpf_, self.hi._mpf_

    @property
    def width(self) -> mpmath.mpf:
        return mpmath.mp.make_mpf(libmp.mpf_sub(self.hi._mpf_, self.lo._mpf_, 0))

    @property
    def mid(self) -> mpmath.mpf:
        return mpmath.mp.make_mpf(libmp.mpi_mid(self.raw, self.precision_bits + 2))

    @property
    def is_exact(self) -> bool:
        return self.lo == self.hi

    def contains(self, value: Real) -> bool:
        q = as_fraction(value)
        return raw_to_fraction(self.lo._mpf_) <= q <= raw_to_fraction(self.hi._mpf_)

    def overlaps(self, other: "NormInterval") -> bool:
        return mpi_overlap(self.raw, other.raw)

    def certainly_le(self, other: "NormInterval") -> Optional[bool]:
        return raw_le(self.raw, other.raw)

    def certainly_lt(self, other: "NormInterval") -> Optional[bool]:
        return raw_lt(self.raw, other.raw)

    def to_float(self) -> float:
        return raw_to_float(libmp.mpi_mid(self.raw, 64))

    def to_dict(self) -> dict:
        return {
            "lo": raw_to_str(self.lo._mpf_, self.precision_bits),
            "hi": raw_to_str(self.hi._mpf_, self.precision_bits),
            "precision_bits": self.precision_bits,
        }

    def __str__(self) -> str:
        return libmp.mpi_str(self.raw, self.precision_bits)
