"""
Lacunary index sets J, K, L and the special-functional injection sigma

The canonical J is the greedy minimal sequence with f(min J) = 256 and
4 j_t^2 <= log2 log2 log2 j_(t+1); K and L take the odd and even positions.
The surrogate J is the finite set {2^k - 1 : k = 1..size}; it is small enough for
special functionals to materialize and is labelled non-canonical in every report.
"""

import logging
import threading
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from app.config import settings
from app.models.harness_models import HarnessReport, Verdict
from app.services.errors import DomainError, NormScopeError, SigmaExhaustedError
from app.services.intervals import NormInterval
from app.services.symcoeff import SymCoeff
from app.services.towers import TowerReal, certainly_le, exp2_iter
from app.services.vectors import FiniteVector, sum_vectors

logger = logging.getLogger(__name__)

CANONICAL_MIN_F = 256
SURROGATE_SIZE = 6
SIGMA_SCALE = 20
SIGMA_ROOT = 40
_MAX_CANONICAL = 6


@dataclass(frozen=True)
class LacunarySet:
    """Materialized prefix of J in increasing order"""

    members: Tuple[TowerReal, ...]
    canonical: bool = True

    def __len__(self) -> int:
        return len(self.members)

    def j(self, t: int) -> TowerReal:
        """1-based member j_t"""
        if not 1 <= t <= len(self.members):
            raise DomainError(f"J has {len(self.members)} materialized members, asked for j_{t}")
        return self.members[t - 1]

    def member_int(self, t: int) -> Optional[int]:
        value = self.j(t)
        if value.exact is not None and value.exact.denominator == 1:
            return int(value.exact)
        return None

    @property
    def K(self) -> Tuple[TowerReal, ...]:
        return self.members[0::2]

    @property
    def L(self) -> Tuple[TowerReal, ...]:
        return self.members[1::2]

    @property
    def finite(self) -> bool:
        """The surrogate J is the whole set, the canonical one only a prefix"""
        return not self.canonical

    def to_dict(self) -> dict:
        return {
            "canonical": self.canonical,
            "members": [str(m) for m in self.members],
            "K_positions": list(range(1, len(self.members) + 1, 2)),
            "L_positions": list(range(2, len(self.members) + 1, 2)),
        }


def _point_hi(x: TowerReal) -> TowerReal:
    """Collapse an enclosure onto its upper endpoint"""
    if x.exact is not None and x.lo == x.hi:
        return x
    if x.is_plain:
        return TowerReal.plain((x.hi, x.hi), x.prec)
    return replace(x, lo=x.hi)


def canonical_j(prefix: Optional[int] = None, prec: Optional[int] = None) -> LacunarySet:
    """j_1 = 2^256 - 1 and j_(t+1) = exp2^3 of the upper endpoint of 4 j_t^2"""
    prefix = prefix or settings.j_prefix
    if prefix > _MAX_CANONICAL:
        raise DomainError(f"canonical J prefix {prefix} exceeds the tower height cap (max {_MAX_CANONICAL})")
    members = [TowerReal.of(2 ** CANONICAL_MIN_F - 1, prec)]
    while len(members) < prefix:
        j = members[-1]
        members.append(exp2_iter(_point_hi(4 * j * j), 3))
    logger.debug(f"canonical J materialized with {len(members)} members")
    return LacunarySet(tuple(members), canonical=True)


def surrogate_j(size: int = SURROGATE_SIZE, prec: Optional[int] = None) -> LacunarySet:
    """J_toy = 1, 3, 7, 15, ...; every member m has f(m) = log2(m + 1) an integer"""
    return LacunarySet(tuple(TowerReal.of(2 ** k - 1, prec) for k in range(1, size + 1)), canonical=False)


def build_jkl(canonical: bool = True, prefix: Optional[int] = None,
              prec: Optional[int] = None) -> LacunarySet:
    if canonical:
        return canonical_j(prefix, prec)
    return surrogate_j(max(prefix or 0, SURROGATE_SIZE), prec)


def _verdict_of(thunk) -> Tuple[Verdict, Optional[str]]:
    try:
        return Verdict.from_certainty(thunk()), None
    except NormScopeError as e:
        logger.warning(f"undecided comparison: {e}")
        return Verdict.UNKNOWN, str(e)


def check_j(jset: LacunarySet) -> HarnessReport:
    """f(min J) >= 256 and 4 j_t^2 <= log log log j_(t+1) for the materialized prefix"""
    report = HarnessReport(harness="lacunary_set")
    report.measurements["canonical"] = jset.canonical
    hard = jset.canonical

    first = jset.j(1)
    verdict, error = _verdict_of(lambda: certainly_le(TowerReal.of(CANONICAL_MIN_F), first.f()))
    report.add("f_of_min_J_at_least_256", verdict, hard=hard,
               lhs=str(first.f()), rhs=str(CANONICAL_MIN_F), error=error)

    for t in range(1, len(jset)):
        a, b = jset.j(t), jset.j(t + 1)
        verdict, error = _verdict_of(lambda: certainly_le(4 * a * a, b.log2().log2().log2()))
        report.add(f"lacunarity[t={t}]", verdict, hard=hard,
                   lhs=str(4 * a * a) if error is None else None, rhs=str(b), error=error)
        verdict, error = _verdict_of(lambda: certainly_le(2 * a.f(), b.f()))
        report.add(f"f_doubling[t={t}]", verdict, hard=hard, error=error)

    positions = set(range(1, len(jset) + 1))
    k_pos = set(range(1, len(jset) + 1, 2))
    l_pos = set(range(2, len(jset) + 1, 2))
    report.add("K_L_partition_J", Verdict.from_certainty(not (k_pos & l_pos) and (k_pos | l_pos) == positions),
               k_size=len(k_pos), l_size=len(l_pos))
    return report


def sum_inv_f_over_j(jset: LacunarySet, start: int = 1,
                     precision: Optional[int] = None) -> Dict[str, object]:
    """Sum of 1/f(l) over members l >= start, with the tail 1/f(j_T) for canonical J"""
    precision = precision or settings.precision_bits
    prefix = TowerReal.of(0)
    used = 0
    for member in jset.members:
        if member.lt(start) is True:
            continue
        prefix = prefix + 1 / member.f()
        used += 1
    if jset.canonical:
        # f(j_(t+1)) >= 2 f(j_t), so everything past j_T adds at most 1/f(j_T)
        tail = 1 / jset.members[-1].f()
    else:
        tail = TowerReal.of(0)
    total = prefix + tail
    enclosure = None
    if prefix.is_plain and total.is_plain:
        enclosure = NormInterval.from_raw((prefix.lo, total.hi), precision)
    return {
        "members_used": used,
        "prefix": prefix,
        "tail": tail,
        "upper": total,
        "enclosure": enclosure,
    }


# ---------------------------------------------------------------------------
# sigma
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SigmaEntry:
    sequence: Tuple[FiniteVector, ...]
    value: TowerReal
    position: int
    support_size: int
    last_max_support: int

    def to_dict(self) -> dict:
        return {
            "sequence": [z.literal() for z in self.sequence],
            "value": str(self.value),
            "L_position": self.position,
            "support_size": self.support_size,
            "last_max_support": self.last_max_support,
        }


def _validate_q(z: FiniteVector) -> None:
    for index, coeff in z:
        if not isinstance(coeff, Fraction) or abs(coeff) > 1:
            raise DomainError(f"sigma takes rational coordinates in [-1, 1]; index {index} holds {coeff}")


def sigma_constraint(value: TowerReal, support_size: int, last_max_support: int,
                     canonical: bool = True) -> Optional[bool]:
    """Certified admissibility of value as sigma of a sequence

    canonical: (1/20) f(value^(1/40)) >= #supp and value >= max supp of the last functional;
    surrogate: only value >= max supp of the last functional.
    """
    above_support = certainly_le(TowerReal.of(last_max_support), value)
    if not canonical or above_support is not True:
        return above_support
    return certainly_le(TowerReal.of(SIGMA_SCALE * support_size),
                        value.pow(Fraction(1, SIGMA_ROOT)).f())


class SigmaRegistry:
    """Injective, first-come assignment of L-members to functional sequences

    Besides injectivity, a value must be at least the largest support index of the last
    functional of its sequence, so sigma grows along every chain it codes. The canonical
    mode also asks (1/20) f(value^(1/40)) >= #supp; the surrogate mode drops that size
    test.
    """

    def __init__(self, jset: LacunarySet):
        self.jset = jset
        self._lock = threading.Lock()
        self._entries: Dict[Tuple[FiniteVector, ...], SigmaEntry] = {}
        self._used: Dict[int, Tuple[FiniteVector, ...]] = {}

    def __len__(self) -> int:
        return len(self._entries)

    def lookup(self, sequence: Sequence[FiniteVector]) -> Optional[SigmaEntry]:
        with self._lock:
            return self._entries.get(tuple(sequence))

    def entries(self) -> List[SigmaEntry]:
        with self._lock:
            return sorted(self._entries.values(), key=lambda e: e.position)

    def sigma(self, sequence: Sequence[FiniteVector]) -> TowerReal:
        key = tuple(sequence)
        if not key:
            raise DomainError("sigma is defined on non-empty sequences")
        for z in key:
            _validate_q(z)
        support = len(sum_vectors(z.abs() for z in key).support)
        last_max = key[-1].max_support if not key[-1].is_zero() else 0
        with self._lock:
            if key in self._entries:
                return self._entries[key].value
            for position, value in enumerate(self.jset.L, start=1):
                if position in self._used:
                    continue
                if sigma_constraint(value, support, last_max, self.jset.canonical) is True:
                    entry = SigmaEntry(key, value, position, support, last_max)
                    self._entries[key] = entry
                    self._used[position] = key
                    logger.debug(f"sigma assigned L position {position} to a sequence of {len(key)} functionals")
                    return value
        raise SigmaExhaustedError(support, len(self.jset))

    def values_in(self, lo: int, hi: int) -> List[SigmaEntry]:
        """Entries whose last functional has max support in [lo, hi)"""
        return [e for e in self.entries() if lo <= e.last_max_support < hi]


def sigma_check(registry: SigmaRegistry) -> HarnessReport:
    """Re-verify the support constraint and injectivity for every assignment"""
    report = HarnessReport(harness="sigma_audit")
    seen: Dict[int, int] = {}
    for i, entry in enumerate(registry.entries()):
        verdict, error = _verdict_of(lambda: sigma_constraint(entry.value, entry.support_size,
                                                              entry.last_max_support, registry.jset.canonical))
        report.add(f"support_constraint[{i}]", verdict, **entry.to_dict(), error=error)
        seen[entry.position] = seen.get(entry.position, 0) + 1
    report.add("injective", Verdict.from_certainty(all(v == 1 for v in seen.values())),
               assignments=len(registry))
    report.measurements["canonical"] = registry.jset.canonical
    return report


# ---------------------------------------------------------------------------
# sum of 1/C over J
# ---------------------------------------------------------------------------

def sum_inv_c_over_j(jset: LacunarySet, c_of: Callable[[TowerReal], Tuple[TowerReal, str]],
                     tail: Optional[TowerReal], budget: Optional[Fraction] = None,
                     conditional: bool = False, precision: Optional[int] = None) -> HarnessReport:
    """Prefix sum of 1/C(l) over the materialized J plus a caller-supplied tail bound

    tail None means the tail is not summable (C stays constant), which fails the check.
    """
    precision = precision or settings.precision_bits
    report = HarnessReport(harness="sum_inv_c_over_J")
    prefix, rows = inv_c_prefix(jset, c_of)
    report.measurements["terms"] = rows
    report.measurements["prefix_sum"] = str(prefix)
    report.measurements["canonical"] = jset.canonical

    if tail is None and jset.canonical:
        report.add("finite_sum", Verdict.FAIL, reason="C(l) stays 1 along J, the series diverges")
        return report
    tail = tail if tail is not None else TowerReal.of(0)
    total = prefix + tail
    report.measurements["tail_bound"] = str(tail)
    report.measurements["total"] = str(total)
    if total.is_plain and prefix.is_plain:
        report.measurements["enclosure"] = NormInterval.from_raw(
            (prefix.plain_raw()[0], total.plain_raw()[1]), precision).to_dict()
    verdict = Verdict.PASS
    if budget is not None:
        verdict, _ = _verdict_of(lambda: certainly_le(total, TowerReal.of(budget)))
    report.add("finite_sum", verdict, hard=not conditional, conditional=conditional,
               total=str(total), budget=str(budget) if budget is not None else None)
    return report


def f_inverse(member: TowerReal) -> SymCoeff:
    """1/f(m) as an exact coefficient for integer members"""
    if member.exact is None or member.exact.denominator != 1:
        raise DomainError("exact 1/f needs an integer member")
    return SymCoeff.f_power(int(member.exact), -1)


def inv_c_prefix(jset: LacunarySet, c_of: Callable[[TowerReal], Tuple[TowerReal, str]]
                 ) -> Tuple[TowerReal, List[dict]]:
    """Sum of 1/C(l) over the materialized members; an undecided C counts as 1"""
    prefix = TowerReal.of(0)
    rows = []
    for t, member in enumerate(jset.members, start=1):
        try:
            value, regime = c_of(member)
            prefix = prefix + 1 / value
        except NormScopeError as e:
            logger.warning(f"C(j_{t}) undecided, counting 1/C <= 1: {e}")
            value, regime = TowerReal.of(1), "undecided"
            prefix = prefix + 1
        rows.append({"t": t, "C": str(value), "regime": regime})
    return prefix, rows
