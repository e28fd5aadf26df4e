"""
Finite-support vectors and functionals over the unit vector basis
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, Iterator, Sequence, Tuple

from app.services.errors import DomainError, ParseError
from app.services.symcoeff import Scalar, SymCoeff, normalize, scalar_abs

logger = logging.getLogger(__name__)

Entry = Tuple[int, Scalar]


@dataclass(frozen=True)
class FiniteVector:
    """x = sum coeff * e_index with strictly increasing indices and no zero coefficients

    The same type represents functionals, acting by coordinate pairing.
    """

    entries: Tuple[Entry, ...] = ()

    def __post_init__(self):
        previous = 0
        for index, coeff in self.entries:
            if not isinstance(index, int) or index < 1:
                raise DomainError(f"basis index must be a positive integer, got {index!r}")
            if index <= previous:
                raise DomainError("indices must be strictly increasing")
            if coeff == 0:
                raise DomainError(f"zero coefficient stored at index {index}")
            previous = index

    # -- constructors ------------------------------------------------------

    @classmethod
    def from_mapping(cls, coeffs: Dict[int, Scalar]) -> "FiniteVector":
        items = []
        for index in sorted(coeffs):
            value = normalize(coeffs[index])
            if value != 0:
                items.append((int(index), value))
        return cls(tuple(items))

    @classmethod
    def basis(cls, index: int, coeff: Scalar = Fraction(1)) -> "FiniteVector":
        return cls.from_mapping({index: coeff})

    @classmethod
    def flat(cls, n: int, start: int = 1, coeff: Scalar = Fraction(1)) -> "FiniteVector":
        """sum of coeff * e_i for i = start .. start + n - 1"""
        return cls.from_mapping({start + i: coeff for i in range(n)})

    @classmethod
    def from_coefficients(cls, values: Sequence, start: int = 1) -> "FiniteVector":
        return cls.from_mapping({start + i: Fraction(v) for i, v in enumerate(values)})

    @classmethod
    def parse(cls, text: str) -> "FiniteVector":
        """Parse the literal format ``idx:num/den idx:num/den ...``"""
        coeffs: Dict[int, Fraction] = {}
        column = 1
        for token in text.split(" "):
            if token == "":
                column += 1
                continue
            if ":" not in token:
                raise ParseError(f"expected idx:value in {token!r}", column)
            raw_index, raw_value = token.split(":", 1)
            try:
                index = int(raw_index)
            except ValueError:
                raise ParseError(f"bad index {raw_index!r}", column)
            if index < 1:
                raise ParseError(f"index must be positive, got {index}", column)
            if index in coeffs:
                raise ParseError(f"duplicate index {index}", column)
            try:
                value = Fraction(raw_value)
            except (ValueError, ZeroDivisionError):
                raise ParseError(f"bad coefficient {raw_value!r}", column + len(raw_index) + 1)
            coeffs[index] = value
            column += len(token) + 1
        return cls.from_mapping(coeffs)

    # -- inspection --------------------------------------------------------

    @property
    def support(self) -> Tuple[int, ...]:
        return tuple(i for i, _ in self.entries)

    @property
    def coefficients(self) -> Tuple[Scalar, ...]:
        return tuple(c for _, c in self.entries)

    def is_zero(self) -> bool:
        return not self.entries

    def is_rational(self) -> bool:
        return all(not isinstance(c, SymCoeff) for _, c in self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[Entry]:
        return iter(self.entries)

    def as_dict(self) -> Dict[int, Scalar]:
        return dict(self.entries)

    def coeff(self, index: int) -> Scalar:
        return self.as_dict().get(index, Fraction(0))

    @property
    def min_support(self) -> int:
        if not self.entries:
            raise DomainError("the zero vector has empty support")
        return self.entries[0][0]

    @property
    def max_support(self) -> int:
        if not self.entries:
            raise DomainError("the zero vector has empty support")
        return self.entries[-1][0]

    # -- algebra -----------------------------------------------------------

    def __add__(self, other: "FiniteVector") -> "FiniteVector":
        out: Dict[int, Scalar] = self.as_dict()
        for i, c in other.entries:
            out[i] = _add(out.get(i, Fraction(0)), c)
        return FiniteVector.from_mapping(out)

    def __neg__(self) -> "FiniteVector":
        return self.scale(Fraction(-1))

    def __sub__(self, other: "FiniteVector") -> "FiniteVector":
        return self + (-other)

    def scale(self, factor: Scalar) -> "FiniteVector":
        return FiniteVector.from_mapping({i: _mul(c, factor) for i, c in self.entries})

    def restrict(self, lo: int, hi: int) -> "FiniteVector":
        """E x for the interval E = [lo, hi]"""
        return FiniteVector(tuple((i, c) for i, c in self.entries if lo <= i <= hi))

    def abs(self) -> "FiniteVector":
        return FiniteVector(tuple((i, scalar_abs(c)) for i, c in self.entries))

    def with_signs(self, signs: Sequence[int]) -> "FiniteVector":
        return FiniteVector(tuple((i, _mul(c, Fraction(s))) for (i, c), s in zip(self.entries, signs)))

    def spread(self, indices: Sequence[int]) -> "FiniteVector":
        """Move the j-th support point to indices[j] (indices strictly increasing)"""
        if len(indices) != len(self.entries):
            raise DomainError("spreading needs one target index per support point")
        return FiniteVector(tuple((int(n), c) for n, (_, c) in zip(indices, self.entries)))

    def shift_to(self, start: int) -> "FiniteVector":
        """Translate so the support starts at start"""
        if not self.entries:
            return self
        offset = start - self.min_support
        return FiniteVector(tuple((i + offset, c) for i, c in self.entries))

    def l1(self) -> Scalar:
        total: Scalar = Fraction(0)
        for _, c in self.entries:
            total = _add(total, scalar_abs(c))
        return total

    # -- output ------------------------------------------------------------

    def literal(self) -> str:
        if not self.is_rational():
            return " ".join(f"{i}:[{c!r}]" for i, c in self.entries)
        return " ".join(f"{i}:{c.numerator}/{c.denominator}" for i, c in self.entries)

    def to_dict(self) -> dict:
        return {"entries": [[i, str(c) if not isinstance(c, SymCoeff) else repr(c)] for i, c in self.entries]}

    def __str__(self) -> str:
        return self.literal() or "0"


def _add(a: Scalar, b: Scalar) -> Scalar:
    if isinstance(a, SymCoeff) or isinstance(b, SymCoeff):
        return normalize(SymCoeff.lift(a) + b)
    return a + b


def _mul(a: Scalar, b: Scalar) -> Scalar:
    if isinstance(a, SymCoeff) or isinstance(b, SymCoeff):
        return normalize(SymCoeff.lift(a) * b)
    return a * b


def pairing(xstar: FiniteVector, x: FiniteVector) -> Scalar:
    """Exact coordinate pairing x*(x); a Fraction whenever the value is rational"""
    if len(xstar) > len(x):
        xstar, x = x, xstar
    other = x.as_dict()
    total: Scalar = Fraction(0)
    for i, c in xstar.entries:
        if i in other:
            total = _add(total, _mul(c, other[i]))
    return normalize(total)


def sum_vectors(vectors: Iterable[FiniteVector]) -> FiniteVector:
    out = FiniteVector()
    for v in vectors:
        out = out + v
    return out


def is_successive(blocks: Sequence[FiniteVector]) -> bool:
    """max supp(b_i) < min supp(b_{i+1}) over the nonzero blocks"""
    last = 0
    for b in blocks:
        if b.is_zero():
            continue
        if b.min_support <= last:
            return False
        last = b.max_support
    return True

