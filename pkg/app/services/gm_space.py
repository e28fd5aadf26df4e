"""
Depth-bounded GM norming functionals, the sandwich ||x||_S <= ||x||_GM <= ||x||_S + sum_J ||x||_l,
and the decomposition of a GM functional into a dual-ball part T_0 plus pieces T_j, j in J(z*)

GM functionals are formation trees over three rules: restricted absolutely convex
combinations, (1/f(l))-averages of successive functionals, and special functionals whose
averaging lengths m_i are coded by the sigma registry. Special functionals need integer
members of J, so with the canonical set they only exist in surrogate mode.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Set, Tuple, Union

from mpmath import libmp

from app.config import settings
from app.models.harness_models import HarnessReport, Verdict
from app.services.certificates import CertificateNode, certificate_violations
from app.services.core_norms import norm_calculator
from app.services.errors import DomainError, NormScopeError
from app.services.intervals import RAW_ONE, NormInterval, raw_le, raw_sub
from app.services.lacunary import SigmaEntry, SigmaRegistry, sum_inv_f_over_j
from app.services.parameters import ParameterSystem
from app.services.symcoeff import Scalar, SymCoeff, enclose_scalar, normalize, scalar_abs
from app.services.towers import TowerReal
from app.services.vectors import FiniteVector, is_successive, pairing, sum_vectors

logger = logging.getLogger(__name__)

ATOM = "atom"
RESTRICT = "restrict"
CONVEX = "convex"
AVERAGE = "average"
SPECIAL = "special"

Interval = Optional[Tuple[int, int]]


def parse_grid(text: Optional[str] = None) -> List[Fraction]:
    """Signed convex-weight grid from a comma list such as "1,1/2" """
    text = text if text is not None else settings.convex_grid
    values = [Fraction(part.strip()) for part in text.split(",") if part.strip()]
    if any(v <= 0 or v > 1 for v in values):
        raise DomainError(f"grid weights must lie in (0, 1]: {text}")
    return values + [-v for v in values]


@dataclass(frozen=True)
class GMNode:
    kind: str
    index: int = 0
    coeff: Fraction = Fraction(1)
    interval: Interval = None
    weights: Tuple[Fraction, ...] = ()
    ell: int = 0
    ms: Tuple[int, ...] = ()
    children: Tuple["GMNode", ...] = field(default_factory=tuple)

    # -- constructors ------------------------------------------------------

    @classmethod
    def atom(cls, index: int, coeff: Fraction = Fraction(1)) -> "GMNode":
        coeff = Fraction(coeff)
        if index < 1 or abs(coeff) > 1:
            raise DomainError(f"atoms are lambda e*_n with n >= 1 and |lambda| <= 1, got {coeff} e*_{index}")
        return cls(ATOM, index=index, coeff=coeff)

    @classmethod
    def restrict(cls, lo: int, hi: int, child: "GMNode") -> "GMNode":
        if lo > hi:
            raise DomainError(f"empty restriction [{lo}, {hi}]")
        if child.kind == RESTRICT:
            lo, hi = max(lo, child.interval[0]), min(hi, child.interval[1])
            child = child.children[0]
            if lo > hi:
                return cls.atom(1, Fraction(0))
        return cls(RESTRICT, interval=(lo, hi), children=(child,))

    @classmethod
    def convex(cls, weights: Sequence[Fraction], children: Sequence["GMNode"]) -> "GMNode":
        weights = tuple(Fraction(w) for w in weights)
        if not children or len(weights) != len(children):
            raise DomainError("convex nodes need one weight per child")
        if sum(abs(w) for w in weights) > 1:
            raise DomainError(f"convex weights {weights} have absolute sum above 1")
        return cls(CONVEX, weights=weights, children=tuple(children))

    @classmethod
    def average(cls, children: Sequence["GMNode"]) -> "GMNode":
        children = tuple(children)
        if not children:
            raise DomainError("averages need at least one child")
        if not is_successive([c.functional for c in children]):
            raise DomainError("averaged functionals must be successive")
        return cls(AVERAGE, ell=len(children), children=children)

    @classmethod
    def special(cls, ell: int, groups: Sequence[Sequence["GMNode"]], registry: SigmaRegistry) -> "GMNode":
        """(1/sqrt f(l)) sum_i z_i with z_i = (1/f(m_i)) sum_j z_ij, m_1 = j_(2l), m_(i+1) = sigma(z_1..z_i)"""
        if ell < 1 or len(groups) != ell:
            raise DomainError(f"special functionals need exactly l = {ell} groups")
        m1 = registry.jset.member_int(2 * ell)
        if m1 is None:
            raise DomainError(f"j_{2 * ell} is not a materialized integer member of J")
        averages: List[GMNode] = []
        ms: List[int] = []
        expected = m1
        for i, group in enumerate(groups):
            if len(group) != expected:
                raise DomainError(f"group {i + 1} has {len(group)} functionals, m_{i + 1} = {expected}")
            z = cls.average(group)
            if not z.functional.is_rational():
                raise DomainError(f"z_{i + 1} must have rational coordinates")
            averages.append(z)
            ms.append(expected)
            if i + 1 < ell:
                value = registry.sigma([a.functional for a in averages])
                if value.exact is None:
                    raise DomainError("sigma value is not an integer")
                expected = int(value.exact)
        if not is_successive([c.functional for a in averages for c in a.children]):
            raise DomainError("the functionals z_ij of a special functional must be successive")
        return cls(SPECIAL, ell=ell, ms=tuple(ms), children=tuple(averages))

    # -- evaluation --------------------------------------------------------

    @cached_property
    def functional(self) -> FiniteVector:
        if self.kind == ATOM:
            return FiniteVector.basis(self.index, self.coeff) if self.coeff else FiniteVector()
        if self.kind == RESTRICT:
            return self.children[0].functional.restrict(*self.interval)
        if self.kind == CONVEX:
            return sum_vectors(c.functional.scale(w) for w, c in zip(self.weights, self.children))
        if self.kind == AVERAGE:
            return sum_vectors(c.functional for c in self.children).scale(SymCoeff.f_power(self.ell, -1).simplify())
        if self.kind == SPECIAL:
            weight = SymCoeff.f_power(self.ell, Fraction(-1, 2)).simplify()
            return sum_vectors(c.functional for c in self.children).scale(weight)
        raise DomainError(f"unknown GM node kind {self.kind!r}")

    @cached_property
    def depth(self) -> int:
        if self.kind == ATOM:
            return 0
        if self.kind == RESTRICT:
            return max(1, self.children[0].depth)
        if self.kind == SPECIAL:
            return 1 + max(g.depth for a in self.children for g in a.children)
        return 1 + max(c.depth for c in self.children)

    def to_dict(self) -> dict:
        out: Dict[str, object] = {"kind": self.kind}
        if self.kind == ATOM:
            out.update(index=self.index, coeff=str(self.coeff))
        elif self.kind == RESTRICT:
            out["interval"] = list(self.interval)
        elif self.kind == CONVEX:
            out["weights"] = [str(w) for w in self.weights]
        elif self.kind == AVERAGE:
            out["l"] = self.ell
        elif self.kind == SPECIAL:
            out.update(l=self.ell, ms=list(self.ms))
        if self.children:
            out["children"] = [c.to_dict() for c in self.children]
        return out


def flat_special(ell: int, registry: SigmaRegistry, start: int = 1, coeff: Fraction = Fraction(1)) -> GMNode:
    """Special functional whose z_ij are consecutive atoms coeff * e*_n from start on"""
    m1 = registry.jset.member_int(2 * ell)
    if m1 is None:
        raise DomainError(f"j_{2 * ell} is not a materialized integer member of J")
    groups: List[List[GMNode]] = []
    cursor, m = start, m1
    for i in range(ell):
        group = [GMNode.atom(cursor + j, coeff) for j in range(m)]
        groups.append(group)
        cursor += m
        if i + 1 < ell:
            value = registry.sigma([GMNode.average(g).functional for g in groups])
            m = int(value.exact)
    return GMNode.special(ell, groups, registry)


# ---------------------------------------------------------------------------
# enumeration and the sandwich
# ---------------------------------------------------------------------------

def _chains(pool: Sequence[GMNode], ell: int, limit: int) -> Iterator[Tuple[GMNode, ...]]:
    ordered = sorted((n for n in pool if not n.functional.is_zero()), key=lambda n: n.functional.min_support)
    produced = 0

    def extend(chain: Tuple[GMNode, ...], start: int) -> Iterator[Tuple[GMNode, ...]]:
        nonlocal produced
        if produced >= limit:
            return
        if len(chain) == ell:
            produced += 1
            yield chain
            return
        last = chain[-1].functional.max_support if chain else 0
        for i in range(start, len(ordered)):
            node = ordered[i]
            if node.functional.min_support > last:
                yield from extend(chain + (node,), i + 1)

    yield from extend((), 0)


def enumerate_gm(depth: int, window: Tuple[int, int], budget: Optional[int] = None,
                 system: Optional[ParameterSystem] = None, grid: Optional[Sequence[Fraction]] = None,
                 ell_max: Optional[int] = None) -> Iterator[GMNode]:
    """A finite, sound subset of GM*_depth supported in the window

    Rule 3 is emitted only when the system's J is the surrogate set (l = 1 specials).
    """
    lo, hi = window
    if lo < 1 or hi < lo:
        raise DomainError(f"bad window {window}")
    budget = budget if budget is not None else settings.gm_budget
    grid = list(grid) if grid is not None else parse_grid()
    ell_max = ell_max or settings.average_ell_max
    seen: Set[FiniteVector] = set()
    pool: List[GMNode] = []
    emitted = 0

    def fresh(node: GMNode) -> bool:
        key = node.functional
        if key in seen:
            return False
        seen.add(key)
        return True

    def candidates(pool: List[GMNode]) -> Iterator[GMNode]:
        for ell in range(2, ell_max + 1):
            for chain in _chains(pool, ell, budget):
                yield GMNode.average(chain)
        for node in pool:
            for w in grid:
                if w != 1:
                    yield GMNode.convex([w], [node])
        for a, b in combinations(pool[: max(1, budget // 20)], 2):
            yield GMNode.convex([Fraction(1, 2), Fraction(1, 2)], [a, b])
        for node in pool:
            support = node.functional.support
            for i in range(len(support)):
                for j in range(i, len(support)):
                    if (i, j) != (0, len(support) - 1):
                        yield GMNode.restrict(support[i], support[j], node)
        if system is not None and not system.lacunary.canonical:
            width = system.lacunary.member_int(2)
            for start in range(lo, hi - width + 2):
                for c in (Fraction(1), Fraction(-1)):
                    yield flat_special(1, system.sigma, start, c)

    current: Iterable[GMNode] = [GMNode.atom(n, c) for n in range(lo, hi + 1) for c in grid]
    for level in range(depth + 1):
        if level > 0:
            current = candidates(list(pool))
        for node in current:
            if emitted >= budget:
                logger.info(f"GM enumeration stopped at the budget of {budget}")
                return
            if node.functional.is_zero() or not fresh(node):
                continue
            emitted += 1
            pool.append(node)
            yield node
    logger.debug(f"enumerated {emitted} GM functionals up to depth {depth} on {window}")


def s_norm_witness(x: FiniteVector, precision: Optional[int] = None) -> GMNode:
    """Rules 1-2 formation tree whose pairing with x equals ||x||_S"""
    if x.is_zero():
        return GMNode.atom(1, Fraction(0))
    wp = (precision or settings.precision_bits) + settings.guard_bits
    n = norm_calculator.norm_attainer(x, precision)
    if n == float("inf"):
        index = max(x.support, key=lambda i: libmp.to_float(enclose_scalar(scalar_abs(x.coeff(i)), wp)[1]))
        sign = -1 if libmp.mpf_lt(enclose_scalar(x.coeff(index), wp)[1], libmp.fzero) else 1
        return GMNode.atom(index, Fraction(sign))
    partition = norm_calculator.best_partition(x, n, precision)
    children = [s_norm_witness(x.restrict(lo, hi), precision) for lo, hi in partition.parts]
    filler = partition.parts[-1][1]
    children += [GMNode.atom(filler, Fraction(0))] * (n - len(children))
    return GMNode.average(children)


def _pairing_raw(node: GMNode, x: FiniteVector, wp: int):
    return enclose_scalar(pairing(node.functional, x), wp)


def gm_lower_bound(x: FiniteVector, depth: Optional[int] = None, budget: Optional[int] = None,
                   system: Optional[ParameterSystem] = None, precision: Optional[int] = None) -> Dict[str, object]:
    """Best pairing over the enumerated functionals and the S-norm witness"""
    prec = precision or settings.precision_bits
    wp = prec + settings.guard_bits
    depth = settings.gm_depth if depth is None else depth
    if x.is_zero():
        return {"lower": NormInterval.zero(prec), "witness": None, "depth": 0}
    best = s_norm_witness(x, prec)
    best_raw = _pairing_raw(best, x, wp)
    window = (x.min_support, x.max_support)
    for node in enumerate_gm(depth, window, budget, system):
        raw = _pairing_raw(node, x, wp)
        if libmp.mpf_gt(raw[0], best_raw[0]):
            best, best_raw = node, raw
    return {"lower": NormInterval.from_raw(best_raw, prec), "witness": best, "depth": best.depth}


def gm_upper_bound(x: FiniteVector, system: ParameterSystem, precision: Optional[int] = None) -> Dict[str, object]:
    """||x||_S + sum over l in J of ||x||_l, with ||x||_l = ||x||_1 / f(l) from l = #supp(x) on"""
    prec = precision or settings.precision_bits
    wp = prec + settings.guard_bits
    jset = system.lacunary
    if x.is_zero():
        zero = TowerReal.of(0, wp)
        return {"upper": zero, "enclosure": NormInterval.zero(prec), "split": 0, "tail": zero}
    s = norm_calculator.s_norm(x, prec)
    total = TowerReal.plain(s.raw, wp)
    split = len(x)
    below = []
    for t in range(1, len(jset) + 1):
        member = jset.member_int(t)
        if member is None or member >= split:
            continue
        value = s if member == 1 else norm_calculator.ell_norm(x, member, prec)
        below.append(member)
        total = total + TowerReal.plain(value.raw, wp)
    l1 = TowerReal.plain(enclose_scalar(x.l1(), wp), wp)
    above = sum_inv_f_over_j(jset, start=split, precision=prec)
    total = total + l1 * above["upper"]
    enclosure = NormInterval.from_raw((s.raw[0], total.plain_raw()[1]), prec) if total.is_plain else None
    return {"upper": total, "enclosure": enclosure, "split": split, "below_split": below,
            "tail": l1 * above["tail"]}


def sandwich_report(x: FiniteVector, system: ParameterSystem, depth: Optional[int] = None,
                    budget: Optional[int] = None, precision: Optional[int] = None) -> Dict[str, object]:
    lower = gm_lower_bound(x, depth, budget, system, precision)
    upper = gm_upper_bound(x, system, precision)
    gap = None
    if upper["enclosure"] is not None:
        gap = (upper["upper"] - TowerReal.plain(lower["lower"].raw)).to_dict()
    return {
        "x": x.literal(),
        "lower": {"value": lower["lower"].to_dict(), "depth": lower["depth"],
                  "witness": lower["witness"].to_dict() if lower["witness"] else None},
        "upper": {"value": upper["upper"].to_dict(), "split": upper["split"], "tail": str(upper["tail"])},
        "gap": gap,
        "surrogate": not system.lacunary.canonical,
    }


# ---------------------------------------------------------------------------
# J(I) and the decomposition
# ---------------------------------------------------------------------------

def _key(entry: SigmaEntry) -> Union[int, str]:
    value = entry.value
    return int(value.exact) if value.exact is not None and value.exact.denominator == 1 else str(value)


def J_of_interval(interval: Tuple[int, int], registry: SigmaRegistry) -> Set[Union[int, str]]:
    """sigma values of registered sequences whose last max support lies in [min I, max I)"""
    lo, hi = interval
    return {_key(e) for e in registry.values_in(lo, hi)}


def J_of_functional(zstar: FiniteVector, registry: SigmaRegistry) -> Set[Union[int, str]]:
    if zstar.is_zero():
        return set()
    return J_of_interval((zstar.min_support, zstar.max_support), registry)


@dataclass(frozen=True)
class AcoTerm:
    coeff: Scalar
    blocks: Tuple[CertificateNode, ...]


@dataclass(frozen=True)
class AcoCertificate:
    """sum_t coeff_t (1/f(j)) sum of j successive dual-ball functionals, sum |coeff_t| <= 1"""

    j: int
    terms: Tuple[AcoTerm, ...]

    def scaled(self, factor: Scalar) -> "AcoCertificate":
        return AcoCertificate(self.j, tuple(
            AcoTerm(normalize(SymCoeff.lift(t.coeff) * factor), t.blocks) for t in self.terms))

    def merged(self, other: "AcoCertificate") -> "AcoCertificate":
        if other.j != self.j:
            raise DomainError(f"cannot merge pieces for j = {self.j} and j = {other.j}")
        return AcoCertificate(self.j, self.terms + other.terms)

    def functional(self) -> FiniteVector:
        weight = SymCoeff.f_power(self.j, -1)
        return sum_vectors(
            sum_vectors(b.functional() for b in t.blocks).scale(normalize(weight * t.coeff)) for t in self.terms)

    def violations(self, prec: int = 128) -> List[str]:
        problems = []
        total = normalize(sum((SymCoeff.lift(scalar_abs(t.coeff)) for t in self.terms), SymCoeff()))
        if raw_le(enclose_scalar(total, prec), RAW_ONE) is not True:
            problems.append(f"coefficients sum to {total}, not certified <= 1")
        for n, term in enumerate(self.terms):
            if len(term.blocks) != self.j:
                problems.append(f"term {n} has {len(term.blocks)} blocks, expected {self.j}")
            if not is_successive([b.functional() for b in term.blocks]):
                problems.append(f"term {n} blocks are not successive")
            for b in term.blocks:
                problems.extend(f"term {n}: {p}" for p in certificate_violations(b))
        return problems

    def to_dict(self) -> dict:
        return {"j": self.j, "terms": [{"coeff": str(t.coeff), "blocks": [b.to_dict() for b in t.blocks]}
                                       for t in self.terms]}


@dataclass(frozen=True)
class SGMDecomposition:
    functional: FiniteVector
    T0: CertificateNode
    parts: Mapping[int, AcoCertificate]
    collisions: Tuple[int, ...] = ()

    def reconstruct(self) -> FiniteVector:
        return sum_vectors([self.T0.functional()] + [p.functional() for p in self.parts.values()])

    def to_dict(self) -> dict:
        return {
            "functional": self.functional.literal(),
            "T0": self.T0.to_dict(),
            "parts": {str(j): p.to_dict() for j, p in sorted(self.parts.items())},
        }


Parts = Dict[int, AcoCertificate]


def _absorb(target: Parts, source: Parts, factor: Scalar, collisions: List[int], disjoint: bool) -> None:
    for j, piece in source.items():
        piece = piece.scaled(factor)
        if j in target:
            if disjoint:
                collisions.append(j)
            target[j] = target[j].merged(piece)
        else:
            target[j] = piece


def _meet(E: Interval, other: Tuple[int, int]) -> Optional[Tuple[int, int]]:
    if E is None:
        return other
    lo, hi = max(E[0], other[0]), min(E[1], other[1])
    return (lo, hi) if lo <= hi else None


def _touches(node: GMNode, E: Interval) -> bool:
    f = node.functional
    if f.is_zero():
        return False
    if E is None:
        return True
    return any(E[0] <= i <= E[1] for i in f.support)


def _decompose(node: GMNode, E: Interval, collisions: List[int]) -> Tuple[CertificateNode, Parts]:
    if node.kind == RESTRICT:
        inner = _meet(E, node.interval)
        if inner is None:
            return CertificateNode.zero(), {}
        return _decompose(node.children[0], inner, collisions)
    if node.kind == ATOM:
        inside = node.coeff != 0 and (E is None or E[0] <= node.index <= E[1])
        return (CertificateNode.leaf(node.index, node.coeff) if inside else CertificateNode.zero()), {}

    if node.kind == CONVEX:
        restricted = node.functional if E is None else node.functional.restrict(*E)
        if restricted.is_zero():
            return CertificateNode.zero(), {}
        hull = (restricted.min_support, restricted.max_support)
        t0s, parts = [], {}
        for w, child in zip(node.weights, node.children):
            t0, child_parts = _decompose(child, hull, collisions)
            t0s.append(t0)
            _absorb(parts, child_parts, w, collisions, disjoint=False)
        return CertificateNode.convex(node.weights, t0s), parts

    if node.kind == AVERAGE:
        t0s, parts = [], {}
        factor = SymCoeff.f_power(node.ell, -1).simplify()
        for child in node.children:
            t0, child_parts = _decompose(child, E, collisions)
            t0s.append(t0)
            _absorb(parts, child_parts, factor, collisions, disjoint=True)
        return CertificateNode.average(t0s), parts

    if node.kind == SPECIAL:
        return _decompose_special(node, E, collisions)
    raise DomainError(f"unknown GM node kind {node.kind!r}")


def _decompose_special(node: GMNode, E: Interval, collisions: List[int]) -> Tuple[CertificateNode, Parts]:
    groups = [a.children for a in node.children]
    hit = [i for i, group in enumerate(groups) if any(_touches(z, E) for z in group)]
    if not hit:
        return CertificateNode.zero(), {}
    i1, i2 = hit[0], hit[-1]
    outer = SymCoeff.f_power(node.ell, Fraction(-1, 2)).simplify()
    parts: Parts = {}
    pieces: List[List[CertificateNode]] = []
    for i in range(i1, i2 + 1):
        scale = normalize(SymCoeff.lift(outer) * SymCoeff.f_power(node.ms[i], -1))
        row = []
        for z in groups[i]:
            t0, child_parts = _decompose(z, E, collisions)
            row.append(t0)
            _absorb(parts, child_parts, scale, collisions, disjoint=True)
        pieces.append(row)

    T0 = CertificateNode.convex([outer], [CertificateNode.average(pieces[0])])
    # the coded lengths m_(i1+1) .. m_(i2) carry the remaining groups
    for offset, i in enumerate(range(i1 + 1, i2 + 1), start=1):
        j = node.ms[i]
        piece = AcoCertificate(j, (AcoTerm(outer, tuple(pieces[offset])),))
        if j in parts:
            collisions.append(j)
            parts[j] = parts[j].merged(piece)
        else:
            parts[j] = piece
    return T0, parts


def sgm_decompose(node: GMNode) -> SGMDecomposition:
    collisions: List[int] = []
    T0, parts = _decompose(node, None, collisions)
    return SGMDecomposition(node.functional, T0, parts, tuple(collisions))


def sgm_audit(nodes: Sequence[GMNode], registry: SigmaRegistry, precision: Optional[int] = None) -> HarnessReport:
    """Reconstruction, support, index-set and membership checks for every decomposition"""
    prec = (precision or settings.precision_bits) + settings.guard_bits
    report = HarnessReport(harness="sgm_decomposition")
    report.measurements["canonical"] = registry.jset.canonical
    for n, node in enumerate(nodes):
        try:
            dec = sgm_decompose(node)
        except NormScopeError as e:
            report.add(f"decompose[{n}]", Verdict.FAIL, error=str(e))
            continue
        z = dec.functional
        report.add(f"reconstruction[{n}]", Verdict.from_certainty(dec.reconstruct() == z), depth=node.depth)
        if not z.is_zero():
            lo, hi = z.min_support, z.max_support
            pieces = [dec.T0.functional()] + [p.functional() for p in dec.parts.values()]
            inside = all(p.is_zero() or (lo <= p.min_support and p.max_support <= hi) for p in pieces)
            report.add(f"support_inside_hull[{n}]", Verdict.from_certainty(inside))
        allowed = J_of_functional(z, registry)
        report.add(f"parts_in_J[{n}]", Verdict.from_certainty(set(dec.parts) <= allowed),
                   parts=sorted(dec.parts), J=sorted(map(str, allowed)))
        report.add(f"parts_disjoint[{n}]", Verdict.from_certainty(not dec.collisions),
                   collisions=list(dec.collisions))
        report.add(f"T0_in_dual_ball[{n}]", Verdict.from_certainty(not certificate_violations(dec.T0)))
        problems = [p for piece in dec.parts.values() for p in piece.violations(prec)]
        report.add(f"aco_membership[{n}]", Verdict.from_certainty(not problems), problems=problems[:5])
    return report


# ---------------------------------------------------------------------------
# spreading
# ---------------------------------------------------------------------------

def spreading_gap(lambdas: Sequence[Fraction], N: int, system: ParameterSystem,
                  precision: Optional[int] = None) -> Dict[str, object]:
    """k max|lambda_i| sum over l in J, l >= N of 1/f(l), and the sandwich for sum lambda_i e_(N+i-1)

    sigma values are at least the last max support of their sequence, so J([N, oo)) lies in
    J intersected with [N, oo).
    """
    if N < 1:
        raise DomainError(f"N must be >= 1, got {N}")
    prec = precision or settings.precision_bits
    wp = prec + settings.guard_bits
    lambdas = [Fraction(v) for v in lambdas]
    k = len(lambdas)
    peak = max((abs(v) for v in lambdas), default=Fraction(0))
    series = sum_inv_f_over_j(system.lacunary, start=N, precision=prec)
    bound = TowerReal.of(k * peak, wp) * series["upper"]
    shifted = FiniteVector.from_coefficients(lambdas, start=N)
    s = norm_calculator.s_norm(shifted, prec)
    upper = gm_upper_bound(shifted, system, prec)
    out = {
        "k": k,
        "N": N,
        "bound": bound,
        "bound_enclosure": NormInterval.from_raw(bound.plain_raw(), prec) if bound.is_plain else None,
        "s_norm": s,
        "gm_upper": upper["upper"],
        "surrogate": not system.lacunary.canonical,
    }
    if upper["enclosure"] is not None:
        out["width"] = NormInterval.from_raw(raw_sub(upper["enclosure"].raw, s.raw, wp), prec)
    return out


def dual_spreading_note(zstar: FiniteVector, shifts: Sequence[int], system: ParameterSystem,
                        precision: Optional[int] = None) -> List[Dict[str, object]]:
    """For each shift N: S* and GM* pairing lower bounds of z* moved to start at N

    The GM* bound is z*(x) / upper(||x||_GM) against x = the sign pattern of z*.
    """
    if zstar.is_zero():
        raise DomainError("the zero functional has no spread copies to compare")
    prec = precision or settings.precision_bits
    wp = prec + settings.guard_bits
    rows = []
    for N in shifts:
        moved = zstar.shift_to(N)
        signs = FiniteVector(tuple(
            (i, Fraction(1 if libmp.mpf_ge(enclose_scalar(c, wp)[0], libmp.fzero) else -1)) for i, c in moved))
        upper = gm_upper_bound(signs, system, prec)
        row: Dict[str, object] = {"N": N, "s_dual_lower": norm_calculator.dual_lower_bound(moved, None, prec)}
        if upper["enclosure"] is not None:
            value = enclose_scalar(pairing(moved, signs), wp)
            lo = libmp.mpf_div(value[0], upper["enclosure"].raw[1], wp, libmp.round_floor)
            row["gm_dual_lower"] = NormInterval.from_raw((lo, lo), prec)
        rows.append(row)
    return rows
