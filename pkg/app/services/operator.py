"""
The block functionals (x*_n), the operator T = sum x*_i (x) e_i and its weighted family T_nu

x*_n is the functional associated to the rule tree truncated at length L_n + 1, placed on
consecutive blocks. The harnesses below measure the block domination estimate, the lower
estimate along a greedy node descent, the tail-norm splitting and the l-norm domination,
each with both sides as certified enclosures.
"""

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

from mpmath import libmp

from app.config import settings
from app.models.harness_models import HarnessReport, IntervalModel, Verdict
from app.services.certificates import CertificateNode, certificate_violations
from app.services.core_norms import norm_calculator
from app.services.errors import (
    BlockDecompositionError,
    DomainError,
    MalformedCertificateError,
    NormScopeError,
    PreconditionError,
)
from app.services.intervals import NormInterval, raw_add, raw_div, raw_f, raw_le, raw_mul, raw_point
from app.services.parameters import (
    ParameterChecker,
    ParameterSystem,
    certified_floor,
    domination_product,
    g_value,
)
from app.services.symcoeff import Scalar, SymCoeff, enclose_scalar, normalize, scalar_abs
from app.services.towers import TowerReal, certainly_le, certainly_lt
from app.services.trees import (
    FinTree,
    Node,
    Placement,
    ROOT,
    TreeRule,
    associated_certificate,
    associated_functional,
    associated_vector,
)
from app.services.vectors import FiniteVector, pairing, sum_vectors

logger = logging.getLogger(__name__)

HALF = Fraction(1, 2)


@dataclass(frozen=True)
class XStarItem:
    slot: int
    functional: FiniteVector
    vector: FiniteVector
    certificate: CertificateNode
    tree: FinTree
    offset: int
    norm_lower: Optional[Fraction]
    vector_norm: NormInterval

    @property
    def first(self) -> int:
        return self.functional.min_support

    @property
    def last(self) -> int:
        return self.functional.max_support

    def leaf_range(self, node: Node) -> Tuple[int, int]:
        """Indices carrying the leaves below node"""
        indices = [n for leaf, n in Placement.consecutive(self.tree, self.offset).indices
                   if leaf[:len(node)] == node]
        if not indices:
            raise DomainError(f"node {node} is not in the tree of slot {self.slot}")
        return indices[0], indices[-1]

    def sub_functional(self, node: Node) -> FiniteVector:
        """x*_(n, node): the functional associated to the subtree below node"""
        lo, hi = self.leaf_range(node)
        return self.functional.restrict(lo, hi).scale(1 / SymCoeff.lift(self.tree.beta(node)))

    def to_dict(self) -> dict:
        return {
            "slot": self.slot,
            "tree": self.tree.literal(),
            "block": [self.first, self.last],
            "norm_lower": str(self.norm_lower) if self.norm_lower is not None else None,
            "vector_norm": self.vector_norm.to_dict(),
        }


@dataclass(frozen=True)
class XStarSequence:
    items: Tuple[XStarItem, ...]

    def __len__(self) -> int:
        return len(self.items)

    def __getitem__(self, slot: int) -> XStarItem:
        if not 1 <= slot <= len(self.items):
            raise DomainError(f"slot {slot} is outside 1..{len(self.items)}")
        return self.items[slot - 1]

    @property
    def functionals(self) -> List[FiniteVector]:
        return [item.functional for item in self.items]

    def slot_of(self, index: int) -> int:
        """Slot whose region contains index: its block and the gap after it"""
        slot = 1
        for item in self.items:
            if item.first <= index:
                slot = item.slot
        return slot

    def norm_lower_inf(self) -> Optional[Fraction]:
        values = [item.norm_lower for item in self.items]
        if not values or any(v is None for v in values):
            return None
        return min(values)

    def to_dict(self) -> dict:
        return {"items": [item.to_dict() for item in self.items]}


@dataclass(frozen=True)
class BlockDecomposition:
    lambdas: Tuple[Scalar, ...]
    zs: Tuple[FiniteVector, ...]
    fillers: Tuple[int, ...] = field(default_factory=tuple)

    def reconstruct(self) -> FiniteVector:
        return sum_vectors(z.scale(lam) for lam, z in zip(self.lambdas, self.zs) if lam != 0)

    def coefficient_vector(self) -> FiniteVector:
        return FiniteVector.from_mapping({i + 1: lam for i, lam in enumerate(self.lambdas)})

    def to_dict(self) -> dict:
        return {
            "lambdas": [str(lam) for lam in self.lambdas],
            "zs": [z.literal() for z in self.zs],
            "fillers": list(self.fillers),
        }


def _L_of(Ls: Union[Sequence[int], Callable[[int], int]]) -> Callable[[int], int]:
    if callable(Ls):
        return Ls
    values = list(Ls)
    return lambda n: values[min(n, len(values)) - 1]


def build_xstars(rule: TreeRule, Ls: Union[Sequence[int], Callable[[int], int]], count: int,
                 offset: int = 1, precision: Optional[int] = None) -> XStarSequence:
    """count block functionals, x*_n associated to the truncation at L_n + 1"""
    if count < 0:
        raise DomainError(f"count must be >= 0, got {count}")
    L_at = _L_of(Ls)
    items = []
    cursor = offset
    for n in range(1, count + 1):
        tree = rule.truncate(L_at(n) + 1)
        placement = Placement.consecutive(tree, cursor)
        xstar = associated_functional(tree, placement)
        x = associated_vector(tree, placement)
        certificate = associated_certificate(tree, placement)
        problems = certificate_violations(certificate)
        if problems:
            raise MalformedCertificateError(f"slot {n}: {problems[0]}")
        vector_norm = norm_calculator.s_norm(x, precision)
        # x*(x) = 1, so ||x|| <= 2 gives ||x*|| >= 1/2
        lower = HALF if vector_norm.certainly_le(NormInterval.exact(2, vector_norm.precision_bits)) else None
        items.append(XStarItem(n, xstar, x, certificate, tree, cursor, lower, vector_norm))
        cursor += len(tree.leaves())
    logger.info(f"Built {count} block functionals on [{offset}, {cursor - 1}]")
    return XStarSequence(tuple(items))


def xstars_for(system: ParameterSystem, count: int, precision: Optional[int] = None) -> XStarSequence:
    return build_xstars(system.tree_rule(), system.L, count, precision=precision)


def apply_T(xstars: XStarSequence, x: FiniteVector) -> FiniteVector:
    """Tx = sum x*_i(x) e_i over the materialized slots"""
    return FiniteVector.from_mapping({item.slot: pairing(item.functional, x) for item in xstars.items})


def apply_Tnu(nu: Union[Sequence[Scalar], Callable[[int], Scalar]], xstars: XStarSequence,
              x: FiniteVector) -> FiniteVector:
    weight = nu if callable(nu) else (lambda i: nu[i - 1] if i <= len(nu) else Fraction(0))
    return FiniteVector.from_mapping({
        item.slot: normalize(SymCoeff.lift(weight(item.slot)) * pairing(item.functional, x))
        for item in xstars.items
    })


def decompose_blocks(x: FiniteVector, xstars: XStarSequence) -> BlockDecomposition:
    """x = sum lambda_i z_i with x*_i(z_i) = 1 and x*_(i-1) < z_i < x*_(i+1)

    Slot i owns its block and the gap up to the next block; coordinates before the first
    block go to slot 1 and past the last block to the last slot. A slot with no part of x
    gets the matching vector as a filler with lambda = 0. A nonzero part annihilated by
    its functional cannot be written as lambda z and raises BlockDecompositionError.
    """
    if len(xstars) == 0:
        raise DomainError("no block functionals to decompose against")
    parts: Dict[int, Dict[int, Scalar]] = {}
    for index, coeff in x:
        parts.setdefault(xstars.slot_of(index), {})[index] = coeff
    top = max(parts) if parts else 0
    lambdas, zs, fillers, bad = [], [], [], []
    for slot in range(1, top + 1):
        item = xstars[slot]
        part = FiniteVector.from_mapping(parts.get(slot, {}))
        lam = pairing(item.functional, part)
        if lam == 0:
            if not part.is_zero():
                bad.append(slot)
                continue
            lambdas.append(Fraction(0))
            zs.append(item.vector)
            fillers.append(slot)
            continue
        lambdas.append(lam)
        zs.append(part.scale(1 / SymCoeff.lift(lam)))
    if bad:
        raise BlockDecompositionError(bad)
    return BlockDecomposition(tuple(lambdas), tuple(zs), tuple(fillers))


def validate_interleaving(xstars: XStarSequence, zs: Sequence[FiniteVector]) -> None:
    bad = []
    for i, z in enumerate(zs, start=1):
        if i > len(xstars) or pairing(xstars[i].functional, z) != 1:
            bad.append(i)
            continue
        if i > 1 and z.min_support <= xstars[i - 1].last:
            bad.append(i)
        elif i < len(xstars) and z.max_support >= xstars[i + 1].first:
            bad.append(i)
    if bad:
        raise BlockDecompositionError(bad)


# ---------------------------------------------------------------------------
# harnesses
# ---------------------------------------------------------------------------

def _weighted_sum(zs: Sequence[FiniteVector], lambdas: Sequence[Scalar],
                  indices: Optional[Sequence[int]] = None) -> FiniteVector:
    indices = indices if indices is not None else range(1, len(zs) + 1)
    return sum_vectors(zs[i - 1].scale(lambdas[i - 1]) for i in indices if lambdas[i - 1] != 0)


def _tower(interval: NormInterval) -> TowerReal:
    return TowerReal.plain(interval.raw, interval.precision_bits + settings.guard_bits)


def check_block_domination(xstars: XStarSequence, zs: Sequence[FiniteVector], lambdas: Sequence[Scalar],
                           ell: int, C: Optional[TowerReal] = None, precision: Optional[int] = None
                           ) -> Tuple[NormInterval, HarnessReport]:
    """rho = ||sum lambda_i e_i||_l / ||sum lambda_i z_i|| against 1/C(l)"""
    if ell < 2:
        raise DomainError(f"l must be >= 2, got {ell}")
    if len(zs) != len(lambdas):
        raise DomainError("one lambda per block vector")
    validate_interleaving(xstars, zs)
    prec = precision or settings.precision_bits
    wp = prec + settings.guard_bits
    report = HarnessReport(harness=f"block_domination[l={ell}]")
    coefficients = FiniteVector.from_mapping({i + 1: lam for i, lam in enumerate(lambdas)})
    if coefficients.is_zero():
        ratio = NormInterval.zero(prec)
        report.add("ratio_below_inverse_C", Verdict.PASS, reason="lambda = 0")
        report.measurements["ratio"] = IntervalModel.of(ratio).model_dump()
        return ratio, report

    lhs = norm_calculator.ell_norm(coefficients, ell, prec)
    rhs = norm_calculator.s_norm(_weighted_sum(zs, lambdas), prec)
    ratio = NormInterval.from_raw(raw_div(lhs.raw, rhs.raw, wp), prec)
    report.measurements.update(lhs=IntervalModel.of(lhs).model_dump(), rhs=IntervalModel.of(rhs).model_dump(),
                               ratio=IntervalModel.of(ratio).model_dump())

    support = NormInterval.exact(len(coefficients), prec)
    report.add("ratio_at_most_support_size", Verdict.from_certainty(ratio.certainly_le(support)),
               ratio=ratio.to_dict(), bound=len(coefficients))
    C = C if C is not None else TowerReal.of(1, wp)
    try:
        verdict = Verdict.from_certainty(certainly_le(_tower(ratio), 1 / C))
    except NormScopeError as e:
        logger.warning(f"block domination undecided: {e}")
        verdict = Verdict.UNKNOWN
    report.add("ratio_below_inverse_C", verdict, ratio=ratio.to_dict(), inverse_C=str(1 / C))
    return ratio, report


def descent_witness(xstars: XStarSequence, zs: Sequence[FiniteVector], indices: Sequence[int],
                    lambdas: Sequence[Scalar], depth: int, prec: int) -> List[Dict[str, object]]:
    """Greedy node descent nu_0 < nu_1 < ... keeping sum |lambda_i| x*_(i, nu)(z_i) above
    prod f(k_nu_s)/k_nu_s * sum |lambda_i|"""
    wp = prec + settings.guard_bits
    total = sum((scalar_abs(lambdas[i - 1]) for i in indices), Fraction(0))
    total = normalize(total)

    def level_sum(node: Node) -> Scalar:
        value: Scalar = Fraction(0)
        for i in indices:
            item = xstars[i]
            value = normalize(SymCoeff.lift(value) + SymCoeff.lift(scalar_abs(lambdas[i - 1]))
                              * pairing(item.sub_functional(node), zs[i - 1]))
        return value

    chain = []
    node: Node = ROOT
    product = SymCoeff.rational(1)
    tree = xstars[indices[0]].tree
    for level in range(depth + 1):
        value = level_sum(node)
        bound = normalize(product * total)
        holds = raw_le(enclose_scalar(bound, wp), enclose_scalar(value, wp))
        k = tree.k(node) if len(node) < tree.length else None
        chain.append({"level": level, "node": list(node), "k": k, "level_sum": value, "invariant": bound,
                      "holds": holds})
        if level == depth or k is None:
            break
        product = product * SymCoeff.f_power(k, 1, Fraction(1, k))
        children = [node + (j,) for j in range(1, k + 1)]
        node = max(children, key=lambda c: libmp.to_float(libmp.mpi_mid(enclose_scalar(level_sum(c), wp), 64)))
    return chain


def check_block_lower_estimate(xstars: XStarSequence, zs: Sequence[FiniteVector], m: int, I: Sequence[int],
                               lambdas: Sequence[Scalar], system: ParameterSystem,
                               precision: Optional[int] = None) -> HarnessReport:
    """||sum_(i in I) lambda_i z_i|| >= G(m)/f(m) sum |lambda_i| with the descent witness"""
    prec = precision or system.config.precision_bits
    wp = prec + settings.guard_bits
    I = sorted(set(I))
    if not I:
        raise PreconditionError("I must be non-empty")
    ffm = TowerReal.of(m, wp).f().f()
    if certainly_le(ffm, TowerReal.of(I[0], wp)) is not True or len(I) > m:
        raise PreconditionError(f"need f(f(m)) <= min I and #I <= m (m = {m}, I = {I})")
    validate_interleaving(xstars, zs)
    report = HarnessReport(harness=f"block_lower_estimate[m={m}]")

    total = normalize(sum((scalar_abs(lambdas[i - 1]) for i in I), Fraction(0)))
    if total == 0:
        report.add("lower_estimate", Verdict.PASS, reason="lambda = 0")
        return report
    lhs = norm_calculator.s_norm(_weighted_sum(zs, lambdas, I), prec)
    g = g_value(m, system)
    rhs = g.value / TowerReal.of(m, wp).f() * TowerReal.plain(enclose_scalar(total, wp), wp)
    report.add("lower_estimate", Verdict.from_certainty(certainly_le(rhs, _tower(lhs))),
               lhs=lhs.to_dict(), rhs=rhs.to_dict(), g_argmax=g.index)

    floor_ffm = certified_floor(ffm) or 1
    depth = min([system.L(floor_ffm)] + [xstars[i].tree.length - 1 for i in I])
    chain = descent_witness(xstars, zs, I, lambdas, depth, prec)
    for row in chain:
        report.add(f"descent_invariant[level={row['level']}]", Verdict.from_certainty(row["holds"]),
                   node=row["node"], level_sum=str(row["level_sum"]), invariant=str(row["invariant"]))
    report.measurements["descent"] = [
        {"level": row["level"], "node": row["node"], "k": row["k"]} for row in chain
    ]
    logger.debug(f"descent of depth {depth} over I = {I}")
    return report


def _splitting_sum(x: FiniteVector, ell: int, threshold: TowerReal, prec: int, wp: int) -> Dict[str, object]:
    """sum_J |x_j| + sum_i ||E_i x||_(n_i) over the best partition of ||x||_ell

    A part whose norm attainer is inf or at most r^f(r) is replaced by its largest coordinate.
    """
    partition = norm_calculator.best_partition(x, ell, prec)
    J, parts, replaced = [], [], []
    total = raw_point(0, wp)
    for lo, hi in partition.parts:
        piece = x.restrict(lo, hi)
        n = norm_calculator.norm_attainer(piece, prec)
        small = n == math.inf or certainly_lt(threshold, TowerReal.of(n, wp)) is not True
        if small:
            j = max(piece.support, key=lambda i: libmp.to_float(enclose_scalar(scalar_abs(piece.coeff(i)), wp)[1]))
            J.append(j)
            total = raw_add(total, enclose_scalar(scalar_abs(piece.coeff(j)), wp), wp)
            if n != math.inf:
                replaced.append({"part": [lo, hi], "n": n, "coordinate": j})
            continue
        parts.append({"part": [lo, hi], "n": n})
        total = raw_add(total, norm_calculator.ell_norm_raw(piece, n, prec), wp)
    return {"ell": ell, "sum": raw_div(total, raw_f(ell, wp), wp), "J": J, "parts": parts, "replaced": replaced}


def check_tail_splitting(x: FiniteVector, r: int, system: ParameterSystem, measure_only: bool = True,
                         precision: Optional[int] = None, ell_max: Optional[int] = None) -> HarnessReport:
    """|||x|||_r <= 1/(1 - d/sqrt(f(r))) (1/f(l)) (sum_J |x_j| + sum_i ||E_i x||_(n_i))

    Witnesses are the best partitions of ||x||_l for the attaining l and every l in
    [r, ell_max]; parts normed by some n_i <= r^f(r) (or by the sup-norm) collapse to one
    coordinate of J. The largest right-hand side is reported.
    """
    prec = precision or system.config.precision_bits
    wp = prec + settings.guard_bits
    ell_max = settings.tail_witness_ell_max if ell_max is None else ell_max
    report = HarnessReport(harness=f"tail_splitting[r={r}]")
    d = system.d
    fr = TowerReal.of(r, wp).f()
    applicable = certainly_lt(TowerReal.of(d * d, wp), fr) is True
    if not applicable and not measure_only:
        raise PreconditionError(f"tail splitting needs f(r) > d^2 = {d * d}")
    report.measurements["mode"] = "certified" if applicable else "measure-only"
    if x.is_zero():
        report.add("splitting_bound", Verdict.PASS, reason="x = 0")
        return report

    value, ell = norm_calculator.tail_norm(x, r, prec)
    threshold = TowerReal.of(r, wp).pow(fr)
    candidates = sorted({ell} | set(range(math.ceil(r), min(ell_max, max(math.ceil(r), len(x))) + 1)))
    witnesses = [_splitting_sum(x, n, threshold, prec, wp) for n in candidates]
    best = witnesses[0]
    for w in witnesses[1:]:
        if libmp.mpf_gt(w["sum"][0], best["sum"][0]):
            best = w
    factor = 1 / (1 - d / fr.sqrt()) if applicable else TowerReal.of(1, wp)
    upper = TowerReal.plain(best["sum"], wp) * factor
    report.add("splitting_bound", Verdict.from_certainty(certainly_le(_tower(value), upper)),
               hard=applicable, lhs=value.to_dict(), rhs=upper.to_dict(), ell=best["ell"])
    report.add("parts_beyond_r_power", Verdict.from_certainty(not best["replaced"]), hard=False,
               replaced=best["replaced"])
    report.measurements.update(J=best["J"], parts=best["parts"], replaced=best["replaced"],
                               witness_ell=best["ell"], candidates=candidates, attaining_ell=ell,
                               tail_norm=value.to_dict())
    logger.debug(f"tail splitting at r = {r}: {len(candidates)} witness lengths, best l = {best['ell']}")
    return report


def check_ell_domination(xstars: XStarSequence, zs: Sequence[FiniteVector], m: int, lambdas: Sequence[Scalar],
                         system: ParameterSystem, precision: Optional[int] = None,
                         product_terms: int = 3) -> HarnessReport:
    """||sum lambda_i e_i||_m <= c / sqrt(G(m)) ||sum lambda_i z_i|| for m >= m_0"""
    prec = precision or system.config.precision_bits
    wp = prec + settings.guard_bits
    if certainly_le(system.m0, TowerReal.of(m, wp)) is not True:
        raise PreconditionError(f"l-norm domination needs m >= m_0 = {system.m0}")
    validate_interleaving(xstars, zs)
    report = HarnessReport(harness=f"ell_domination[m={m}]")
    coefficients = FiniteVector.from_mapping({i + 1: lam for i, lam in enumerate(lambdas)})
    if coefficients.is_zero():
        report.add("domination", Verdict.PASS, reason="lambda = 0")
        return report
    lhs = norm_calculator.ell_norm(coefficients, m, prec)
    norm = norm_calculator.s_norm(_weighted_sum(zs, lambdas), prec)
    rhs = system.growth_constant / g_value(m, system).value.sqrt() * _tower(norm)
    report.add("domination", Verdict.from_certainty(certainly_le(_tower(lhs), rhs)),
               lhs=lhs.to_dict(), rhs=rhs.to_dict())
    try:
        product = domination_product(m, system, product_terms)
        report.measurements["c_of_m"] = {k: (v.to_dict() if isinstance(v, TowerReal) else v)
                                         for k, v in product.items()}
    except NormScopeError as e:
        report.measurements["c_of_m"] = f"not applicable: {e}"
    return report


def operator_norm_report(xstars: XStarSequence, corpus: Sequence[FiniteVector], system: ParameterSystem,
                         nus: Sequence[Sequence[Scalar]] = (), precision: Optional[int] = None) -> HarnessReport:
    """Empirical ||T||, the GM pre-norm chain per vector and the T_nu sandwich"""
    from app.services.gm_space import gm_upper_bound

    prec = precision or system.config.precision_bits
    wp = prec + settings.guard_bits
    report = HarnessReport(harness="operator_norm")
    if not corpus and not nus:
        return report
    checker_sum = _sum_inv_c(system)
    sup_lower, rows = None, []
    matching = {item.vector: item.slot for item in xstars.items}
    for n, x in enumerate(corpus):
        if x.is_zero():
            continue
        tx = apply_T(xstars, x)
        tx_norm = norm_calculator.s_norm(tx, prec)
        x_norm = norm_calculator.s_norm(x, prec)
        ratio = NormInterval.from_raw(raw_div(tx_norm.raw, x_norm.raw, wp), prec)
        sup_lower = ratio.lo if sup_lower is None else max(sup_lower, ratio.lo)
        row = {"vector": n, "Tx": tx.literal(), "ratio": ratio.to_dict()}
        upper = gm_upper_bound(tx, system, prec)
        row["gm_upper"] = upper["upper"].to_dict()
        if checker_sum is not None:
            chain = _tower(tx_norm) + checker_sum * _tower(x_norm)
            row["pre_norm_chain"] = chain.to_dict()
        if x in matching:
            # ||x_n|| >= x*_n(x_n) = 1 with x*_n certified in the dual ball, and T x_n = e_n
            item = xstars[matching[x]]
            exact = (tx == FiniteVector.basis(item.slot) and pairing(item.functional, x) == 1
                     and not certificate_violations(item.certificate))
            report.add(f"matching_vector[slot={item.slot}]", Verdict.from_certainty(exact), ratio=ratio.to_dict())
        rows.append(row)
    report.measurements["rows"] = rows
    if sup_lower is not None:
        report.measurements["empirical_sup_lower"] = str(sup_lower)

    inf_lower = xstars.norm_lower_inf()
    report.measurements["xstar_norm_lower_inf"] = str(inf_lower) if inf_lower is not None else None
    for k, nu in enumerate(nus):
        weights = [Fraction(v) for v in nu]
        sup_nu = max((abs(v) for v in weights), default=Fraction(0))
        entry: Dict[str, object] = {"nu": [str(v) for v in weights], "sup": str(sup_nu)}
        if inf_lower is not None:
            entry["lower"] = str(sup_nu * inf_lower)
        if sup_nu and len(xstars):
            slot = max(range(1, min(len(weights), len(xstars)) + 1), key=lambda i: abs(weights[i - 1]))
            item = xstars[slot]
            evaluated = NormInterval.from_raw(
                raw_div(norm_calculator.s_norm_raw(apply_Tnu(weights, xstars, item.vector), prec),
                        item.vector_norm.raw, wp), prec)
            entry["evaluated_lower"] = evaluated.to_dict()
            if item.norm_lower is not None:
                recorded = NormInterval.from_raw(
                    raw_mul(raw_point(abs(weights[slot - 1]), wp), raw_point(item.norm_lower, wp), wp), prec)
                report.add(f"nu_lower[{k}]", Verdict.from_certainty(recorded.certainly_le(evaluated)),
                           evaluated=evaluated.to_dict(), recorded=recorded.to_dict())
        if sup_lower is not None and checker_sum is not None:
            empirical = TowerReal.plain((sup_lower._mpf_, sup_lower._mpf_), wp)
            upper = (empirical + checker_sum) * TowerReal.of(sup_nu, wp)
            entry["upper_empirical"] = upper.to_dict()
        report.measurements.setdefault("nu", []).append(entry)
    return report


def _sum_inv_c(system: ParameterSystem) -> Optional[TowerReal]:
    try:
        return ParameterChecker(system).sum_inv_c_total()
    except NormScopeError as e:
        logger.warning(f"sum of 1/C unavailable: {e}")
        return None
