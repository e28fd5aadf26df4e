"""
Exact symbolic coefficients over products of f(n) = log2(n + 1)

A SymCoeff is a finite sum  sum_m q_m * prod_i f(n_i)^{e_i}  with rational q_m and
half-integer exponents e_i. Atoms f(n) whose value is rational (n + 1 a power of two)
are folded into the coefficient, so equality of canonical forms is sound but does not
detect every identity between logarithms.
"""

from fractions import Fraction
from math import isqrt
from typing import Dict, Iterable, Optional, Tuple, Union

from app.services.errors import DomainError
from app.services.intervals import (
    RAW_ONE,
    RAW_ZERO,
    Raw,
    exact_log2,
    raw_add,
    raw_f,
    raw_mul,
    raw_point,
    raw_pow,
    raw_sqrt,
    raw_div,
    raw_lt,
)

Atom = Tuple[int, Fraction]
Monomial = Tuple[Atom, ...]
Scalar = Union[Fraction, "SymCoeff"]

ONE_MONOMIAL: Monomial = ()
HALF = Fraction(1, 2)


def _rational_power(base: int, exponent: Fraction) -> Optional[Fraction]:
    """base**exponent when it is rational, else None"""
    if exponent.denominator == 1:
        return Fraction(base) ** int(exponent)
    root = isqrt(base)
    if root * root == base:
        return Fraction(root) ** int(exponent * 2)
    return None


def _atom_power(n: int, exponent: Fraction) -> Tuple[Fraction, Monomial]:
    """Fold f(n)^exponent into (rational factor, residual monomial)"""
    if exponent == 0:
        return Fraction(1), ONE_MONOMIAL
    if (exponent * 2).denominator != 1:
        raise DomainError(f"exponent {exponent} is not a half-integer")
    k = exact_log2(Fraction(n + 1))
    if k is not None:
        folded = _rational_power(k, exponent)
        if folded is not None:
            return folded, ONE_MONOMIAL
        # k^e = k^{floor} * sqrt(k)
        whole = exponent - HALF
        return Fraction(k) ** int(whole), ((n, HALF),)
    return Fraction(1), ((n, exponent),)


def _monomial_product(a: Monomial, b: Monomial) -> Tuple[Fraction, Monomial]:
    exps: Dict[int, Fraction] = {}
    for n, e in a + b:
        exps[n] = exps.get(n, Fraction(0)) + e
    factor = Fraction(1)
    atoms = []
    for n in sorted(exps):
        q, rest = _atom_power(n, exps[n])
        factor *= q
        atoms.extend(rest)
    return factor, tuple(atoms)


def _monomial_inverse(m: Monomial) -> Monomial:
    return tuple((n, -e) for n, e in m)


class SymCoeff:
    """Immutable sparse sum of rational multiples of f-monomials"""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Optional[Dict[Monomial, Fraction]] = None):
        clean = {m: Fraction(q) for m, q in (terms or {}).items() if q != 0}
        self._terms: Dict[Monomial, Fraction] = clean
        self._hash = hash(frozenset(clean.items()))

    # -- constructors ------------------------------------------------------

    @classmethod
    def rational(cls, q) -> "SymCoeff":
        return cls({ONE_MONOMIAL: Fraction(q)})

    @classmethod
    def f_power(cls, n: int, exponent=1, scale=1) -> "SymCoeff":
        """scale * f(n)^exponent"""
        if n < 1:
            raise DomainError(f"f is evaluated on n >= 1, got {n}")
        q, mono = _atom_power(int(n), Fraction(exponent))
        return cls({mono: q * Fraction(scale)})

    @classmethod
    def lift(cls, value: Scalar) -> "SymCoeff":
        if isinstance(value, SymCoeff):
            return value
        return cls.rational(value)

    # -- inspection --------------------------------------------------------

    @property
    def terms(self) -> Dict[Monomial, Fraction]:
        return dict(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def is_rational(self) -> bool:
        return all(m == ONE_MONOMIAL for m in self._terms)

    def as_fraction(self) -> Fraction:
        if not self.is_rational():
            raise DomainError(f"{self!r} is not rational")
        return self._terms.get(ONE_MONOMIAL, Fraction(0))

    def simplify(self) -> Scalar:
        """Return a Fraction when the value is rational"""
        return self.as_fraction() if self.is_rational() else self

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other) -> "SymCoeff":
        if not isinstance(other, (SymCoeff, Fraction, int)):
            return NotImplemented
        other = SymCoeff.lift(other)
        out = dict(self._terms)
        for m, q in other._terms.items():
            out[m] = out.get(m, Fraction(0)) + q
        return SymCoeff(out)

    __radd__ = __add__

    def __neg__(self) -> "SymCoeff":
        return SymCoeff({m: -q for m, q in self._terms.items()})

    def __sub__(self, other) -> "SymCoeff":
        if not isinstance(other, (SymCoeff, Fraction, int)):
            return NotImplemented
        return self + (-SymCoeff.lift(other))

    def __rsub__(self, other) -> "SymCoeff":
        return SymCoeff.lift(other) + (-self)

    def __mul__(self, other) -> "SymCoeff":
        if not isinstance(other, (SymCoeff, Fraction, int)):
            return NotImplemented
        other = SymCoeff.lift(other)
        out: Dict[Monomial, Fraction] = {}
        for ma, qa in self._terms.items():
            for mb, qb in other._terms.items():
                factor, m = _monomial_product(ma, mb)
                out[m] = out.get(m, Fraction(0)) + qa * qb * factor
        return SymCoeff(out)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "SymCoeff":
        if isinstance(other, (Fraction, int)):
            if other == 0:
                raise ZeroDivisionError("division of a symbolic coefficient by zero")
            return self * (1 / Fraction(other))
        if not isinstance(other, SymCoeff):
            return NotImplemented
        if len(other._terms) != 1:
            raise DomainError("division is supported by a single monomial only")
        (m, q), = other._terms.items()
        return self * SymCoeff({_monomial_inverse(m): 1 / q})

    def __rtruediv__(self, other) -> "SymCoeff":
        return SymCoeff.lift(other) / self

    def __abs__(self) -> "SymCoeff":
        return -self if self.sign() < 0 else self

    # -- evaluation --------------------------------------------------------

    def enclose(self, prec: int) -> Raw:
        """Outward enclosure of the value at working precision prec"""
        total = RAW_ZERO
        for m, q in self._terms.items():
            term = raw_point(q, prec)
            for n, e in m:
                base = raw_f(n, prec)
                if e.denominator == 2:
                    base = raw_sqrt(base, prec)
                    e = e * 2
                if e < 0:
                    base = raw_div(RAW_ONE, base, prec)
                    e = -e
                term = raw_mul(term, raw_pow(base, raw_point(int(e), prec), prec), prec)
            total = raw_add(total, term, prec)
        return total

    def sign(self, prec: int = 128) -> int:
        """Certified sign; raises DomainError when the enclosure straddles zero"""
        if self.is_zero():
            return 0
        if self.is_rational():
            q = self.as_fraction()
            return (q > 0) - (q < 0)
        bits = prec
        for _ in range(4):
            enc = self.enclose(bits)
            if raw_lt(RAW_ZERO, enc):
                return 1
            if raw_lt(enc, RAW_ZERO):
                return -1
            bits *= 2
        raise DomainError(f"cannot certify the sign of {self!r}")

    # -- comparison and display --------------------------------------------

    def __eq__(self, other) -> bool:
        if isinstance(other, (Fraction, int)):
            return self.is_rational() and self.as_fraction() == other
        if isinstance(other, SymCoeff):
            return self._terms == other._terms
        return NotImplemented

    def __hash__(self) -> int:
        if self.is_rational():
            return hash(self.as_fraction())
        return self._hash

    def __repr__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for m in sorted(self._terms):
            q = self._terms[m]
            atoms = "*".join(f"f({n})" if e == 1 else f"f({n})^({e})" for n, e in m)
            if not atoms:
                parts.append(str(q))
            elif q == 1:
                parts.append(atoms)
            else:
                parts.append(f"{q}*{atoms}")
        return " + ".join(parts)


def normalize(value: Scalar) -> Scalar:
    """Collapse a rational SymCoeff to Fraction"""
    if isinstance(value, SymCoeff):
        return value.simplify()
    return Fraction(value)


def enclose_scalar(value: Scalar, prec: int) -> Raw:
    if isinstance(value, SymCoeff):
        return value.enclose(prec)
    return raw_point(value, prec)


def scalar_abs(value: Scalar) -> Scalar:
    if isinstance(value, SymCoeff):
        return normalize(abs(value))
    return abs(Fraction(value))


def product_of_scalars(values: Iterable[Scalar]) -> Scalar:
    out = SymCoeff.rational(1)
    for v in values:
        out = out * SymCoeff.lift(v)
    return out.simplify()
