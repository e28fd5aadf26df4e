"""
Structural norming certificates for the dual unit ball

A certificate is a finite formation tree. Leaves are scaled basis functionals
lambda * e*_n with |lambda| <= 1; internal nodes are (1/f(k))-averages of k successive
children, absolutely convex combinations, interval restrictions, or the zero functional.
A tree that passes the check represents a functional of dual norm at most 1.
"""

import logging
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple

from app.services.errors import MalformedCertificateError
from app.services.symcoeff import Scalar, SymCoeff, normalize, scalar_abs
from app.services.vectors import FiniteVector, is_successive, sum_vectors

logger = logging.getLogger(__name__)

LEAF = "leaf"
AVERAGE = "average"
CONVEX = "convex"
RESTRICT = "restrict"
ZERO = "zero"
KINDS = (LEAF, AVERAGE, CONVEX, RESTRICT, ZERO)
_F_INVERSE = re.compile(r"1/f\((\d+)\)")


@dataclass(frozen=True)
class CertificateNode:
    kind: str
    index: int = 0
    coeff: Scalar = Fraction(1)
    weight: Optional[Scalar] = None
    weights: Tuple[Scalar, ...] = ()
    interval: Optional[Tuple[int, int]] = None
    children: Tuple["CertificateNode", ...] = field(default_factory=tuple)

    # -- constructors ------------------------------------------------------

    @classmethod
    def leaf(cls, index: int, coeff: Scalar = Fraction(1)) -> "CertificateNode":
        return cls(LEAF, index=index, coeff=normalize(coeff))

    @classmethod
    def average(cls, children: Sequence["CertificateNode"], weight: Optional[Scalar] = None) -> "CertificateNode":
        """(1/f(k)) * sum of k children; weight defaults to the formation value"""
        children = tuple(children)
        if weight is None and children:
            weight = SymCoeff.f_power(len(children), -1).simplify()
        return cls(AVERAGE, weight=weight, children=children)

    @classmethod
    def convex(cls, weights: Sequence[Scalar], children: Sequence["CertificateNode"]) -> "CertificateNode":
        return cls(CONVEX, weights=tuple(normalize(w) for w in weights), children=tuple(children))

    @classmethod
    def restrict(cls, lo: int, hi: int, child: "CertificateNode") -> "CertificateNode":
        return cls(RESTRICT, interval=(lo, hi), children=(child,))

    @classmethod
    def zero(cls) -> "CertificateNode":
        return cls(ZERO)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "CertificateNode":
        """Build from the JSON shape used by the CLI and HTTP surface"""
        if not isinstance(data, dict) or "kind" not in data:
            raise MalformedCertificateError(f"certificate node must be an object with a kind: {data!r}")
        kind = data["kind"]
        children = [cls.from_dict(c) for c in data.get("children", [])]
        try:
            if kind == LEAF:
                return cls.leaf(int(data["index"]), Fraction(str(data.get("coeff", "1"))))
            if kind == AVERAGE:
                return cls.average(children, _parse_weight(data.get("weight")))
            if kind == CONVEX:
                return cls.convex([Fraction(str(w)) for w in data["weights"]], children)
            if kind == RESTRICT:
                lo, hi = data["interval"]
                if len(children) != 1:
                    raise MalformedCertificateError("restrict node needs exactly one child")
                return cls.restrict(int(lo), int(hi), children[0])
            if kind == ZERO:
                return cls.zero()
        except (KeyError, TypeError, ValueError) as e:
            raise MalformedCertificateError(f"bad {kind} node: {e}")
        raise MalformedCertificateError(f"unknown certificate node kind {kind!r}")

    # -- evaluation --------------------------------------------------------

    def functional(self) -> FiniteVector:
        """The represented functional with exact coefficients"""
        if self.kind == LEAF:
            return FiniteVector.basis(self.index, self.coeff)
        if self.kind == ZERO:
            return FiniteVector()
        if self.kind == AVERAGE:
            return sum_vectors(c.functional() for c in self.children).scale(self.weight)
        if self.kind == CONVEX:
            return sum_vectors(c.functional().scale(w) for w, c in zip(self.weights, self.children))
        if self.kind == RESTRICT:
            lo, hi = self.interval
            return self.children[0].functional().restrict(lo, hi)
        raise MalformedCertificateError(f"unknown certificate node kind {self.kind!r}")

    def depth(self) -> int:
        return 1 + max((c.depth() for c in self.children), default=0)

    def to_dict(self) -> dict:
        out: Dict[str, Any] = {"kind": self.kind}
        if self.kind == LEAF:
            out.update(index=self.index, coeff=str(self.coeff))
        if self.kind == AVERAGE:
            k = len(self.children)
            if k and SymCoeff.lift(self.weight) == SymCoeff.f_power(k, -1):
                out["weight"] = f"1/f({k})"
            else:
                out["weight"] = repr(self.weight) if isinstance(self.weight, SymCoeff) else str(self.weight)
        if self.kind == CONVEX:
            out["weights"] = [str(w) for w in self.weights]
        if self.kind == RESTRICT:
            out["interval"] = list(self.interval)
        if self.children:
            out["children"] = [c.to_dict() for c in self.children]
        return out


def _parse_weight(raw: Any) -> Optional[Scalar]:
    """Accept a rational or the symbolic form 1/f(k)"""
    if raw is None:
        return None
    match = _F_INVERSE.fullmatch(str(raw).replace(" ", ""))
    if match:
        return SymCoeff.f_power(int(match.group(1)), -1).simplify()
    return Fraction(str(raw))


def _validate_shape(node: CertificateNode, depth: int = 0) -> None:
    if depth > 10_000:
        raise MalformedCertificateError("certificate is not a finite tree")
    if node.kind not in KINDS:
        raise MalformedCertificateError(f"unknown certificate node kind {node.kind!r}")
    if node.kind == LEAF:
        if not isinstance(node.index, int) or node.index < 1 or node.children:
            raise MalformedCertificateError(f"leaf needs a positive index and no children: {node!r}")
    elif node.kind == AVERAGE:
        if not node.children or node.weight is None:
            raise MalformedCertificateError("average node needs children and a weight")
    elif node.kind == CONVEX:
        if len(node.weights) != len(node.children) or not node.children:
            raise MalformedCertificateError("convex node needs one weight per child")
    elif node.kind == RESTRICT:
        if node.interval is None or len(node.children) != 1 or node.interval[0] > node.interval[1]:
            raise MalformedCertificateError("restrict node needs one child and an interval lo <= hi")
    elif node.children:
        raise MalformedCertificateError("zero node has no children")
    for child in node.children:
        if not isinstance(child, CertificateNode):
            raise MalformedCertificateError(f"child is not a certificate node: {child!r}")
        _validate_shape(child, depth + 1)


def certificate_violations(node: CertificateNode) -> List[str]:
    """Formation-rule violations, empty when the certificate is valid"""
    _validate_shape(node)
    problems: List[str] = []
    _collect(node, (), problems)
    return problems


def _exceeds_one(value: Scalar) -> bool:
    if isinstance(value, SymCoeff):
        return (value - 1).sign() > 0
    return value > 1


def _collect(node: CertificateNode, path: Tuple[int, ...], problems: List[str]) -> None:
    where = "/".join(str(p) for p in path) or "root"
    if node.kind == LEAF and _exceeds_one(scalar_abs(node.coeff)):
        problems.append(f"{where}: leaf coefficient {node.coeff} exceeds 1 in absolute value")
    if node.kind == AVERAGE:
        k = len(node.children)
        expected = SymCoeff.f_power(k, -1)
        if SymCoeff.lift(node.weight) != expected:
            problems.append(f"{where}: average weight {node.weight} differs from 1/f({k})")
        if not is_successive([c.functional() for c in node.children]):
            problems.append(f"{where}: children are not successive")
    if node.kind == CONVEX:
        total = normalize(sum((SymCoeff.lift(scalar_abs(w)) for w in node.weights), SymCoeff()))
        if _exceeds_one(total):
            problems.append(f"{where}: convex weights sum to {total} > 1")
    for i, child in enumerate(node.children):
        _collect(child, path + (i + 1,), problems)


def norming_certificate_check(node: CertificateNode) -> bool:
    """True iff the formation tree obeys every rule, so the functional has dual norm <= 1"""
    problems = certificate_violations(node)
    for p in problems:
        logger.debug(f"certificate violation: {p}")
    return not problems
