"""
Certified evaluation of the implicit norm, the l-norm family and the tail norm

The implicit norm satisfies
    ||x|| = max( ||x||_inf , sup_{k >= 2, E_1 < ... < E_k} (1/f(k)) sum_j ||E_j x|| )
and is computed by interval dynamic programming over the positions of supp(x). Every
value is carried as an outward-rounded enclosure at working precision
precision_bits + guard_bits and rounded outward once more at the end.
"""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import List, Optional, Sequence, Tuple, Union

from mpmath import libmp

from app.config import settings
from app.services.errors import DomainError
from app.services.intervals import (
    RAW_ZERO,
    NormInterval,
    Raw,
    Real,
    as_fraction,
    raw_abs,
    raw_add,
    raw_div,
    raw_f,
    raw_max,
)
from app.services.symcoeff import Scalar, enclose_scalar
from app.services.vectors import FiniteVector, pairing

logger = logging.getLogger(__name__)

SUP = 1  # choice tag: the sup-norm attains


@dataclass(frozen=True)
class PartitionWitness:
    """Consecutive parts E_1 < ... < E_k (closed index intervals) used in slot_count slots"""

    parts: Tuple[Tuple[int, int], ...]
    slot_count: int

    def __post_init__(self):
        if not self.parts:
            raise DomainError("a partition witness has at least one part")
        if len(self.parts) > self.slot_count:
            raise DomainError(f"{len(self.parts)} parts exceed {self.slot_count} slots")
        last = 0
        for lo, hi in self.parts:
            if lo > hi or lo <= last:
                raise DomainError(f"parts must be nonempty, ordered and disjoint: {self.parts}")
            last = hi

    def to_dict(self) -> dict:
        return {"parts": [list(p) for p in self.parts], "slot_count": self.slot_count}


def _fold(best: Optional[Raw], tag, cand: Raw, cand_tag):
    """Endpoint-wise max; the tag moves only on a strictly larger lower endpoint"""
    if best is None:
        return cand, cand_tag
    merged = raw_max(best, cand)
    if libmp.mpf_gt(cand[0], best[0]):
        return merged, cand_tag
    return merged, tag


class _NormTable:
    """DP tables over the support positions of one vector

    N[i][j]    norm of the restriction to positions i..j
    B[k][i][j] best right-nested sum of k consecutive part norms covering i..j
    """

    def __init__(self, magnitudes: Sequence[Raw], wp: int):
        n = len(magnitudes)
        self.n = n
        self.wp = wp
        self.f = {k: raw_f(k, wp) for k in range(2, n + 1)}
        N: List[List[Optional[Raw]]] = [[None] * n for _ in range(n)]
        N_choice: List[List[int]] = [[SUP] * n for _ in range(n)]
        B: List[List[List[Optional[Raw]]]] = [[[None] * n for _ in range(n)] for _ in range(n + 1)]
        split: List[List[List[int]]] = [[[-1] * n for _ in range(n)] for _ in range(n + 1)]
        sup = [[None] * n for _ in range(n)]
        if n > 20:
            logger.info(f"norm DP over {n} support positions at {wp} bits")

        for length in range(1, n + 1):
            for i in range(n - length + 1):
                j = i + length - 1
                sup[i][j] = magnitudes[i] if length == 1 else raw_max(sup[i][j - 1], magnitudes[j])
                for k in range(2, length + 1):
                    best, best_t = None, -1
                    for t in range(i, j - k + 2):
                        cand = raw_add(N[i][t], B[k - 1][t + 1][j], wp)
                        best, best_t = _fold(best, best_t, cand, t)
                    B[k][i][j] = best
                    split[k][i][j] = best_t
                best, choice = None, SUP
                for k in range(length, 1, -1):
                    best, choice = _fold(best, choice, raw_div(B[k][i][j], self.f[k], wp), k)
                best, choice = _fold(best, choice, sup[i][j], SUP)
                N[i][j] = best
                N_choice[i][j] = choice
                B[1][i][j] = best

        self.N = N
        self.N_choice = N_choice
        self.B = B
        self.split = split
        self.sup = sup

    def norm(self) -> Raw:
        return self.N[0][self.n - 1] if self.n else RAW_ZERO

    def parts_of(self, k: int, i: int, j: int) -> List[Tuple[int, int]]:
        """Position intervals of the optimal k-part split of i..j"""
        parts = []
        while k > 1:
            t = self.split[k][i][j]
            parts.append((i, t))
            i, k = t + 1, k - 1
        parts.append((i, j))
        return parts

    def best_part_count(self, slots: int) -> Tuple[Raw, int]:
        """max over k <= min(slots, n) of B_k on the whole support, larger k on ties"""
        best, best_k = None, 1
        for k in range(min(slots, self.n), 0, -1):
            best, best_k = _fold(best, best_k, self.B[k][0][self.n - 1], k)
        return best, best_k


@lru_cache(maxsize=512)
def _table(coefficients: Tuple[Scalar, ...], wp: int) -> _NormTable:
    magnitudes = [raw_abs(enclose_scalar(c, wp)) for c in coefficients]
    return _NormTable(magnitudes, wp)


class NormCalculator:
    """Certified norm evaluation service"""

    def __init__(self):
        self.logger = logging.getLogger(__name__)

    # -- plumbing ----------------------------------------------------------

    def _prec(self, precision: Optional[int]) -> int:
        prec = settings.precision_bits if precision is None else int(precision)
        if prec < 16:
            raise DomainError(f"precision must be at least 16 bits, got {prec}")
        return prec

    def _wp(self, prec: int) -> int:
        return prec + settings.guard_bits

    def table(self, x: FiniteVector, precision: Optional[int] = None) -> _NormTable:
        return _table(x.coefficients, self._wp(self._prec(precision)))

    # -- values ------------------------------------------------------------

    def f_val(self, n: Real, precision: Optional[int] = None) -> NormInterval:
        """Enclosure of f(n) = log2(n + 1) for n >= 1"""
        prec = self._prec(precision)
        return NormInterval.from_raw(raw_f(as_fraction(n), self._wp(prec)), prec)

    def s_norm(self, x: FiniteVector, precision: Optional[int] = None) -> NormInterval:
        prec = self._prec(precision)
        return NormInterval.from_raw(self.table(x, prec).norm(), prec)

    def s_norm_raw(self, x: FiniteVector, precision: Optional[int] = None) -> Raw:
        """Working-precision enclosure, for callers that keep computing with it"""
        return self.table(x, precision).norm()

    def ell_norm(self, x: FiniteVector, ell: int, precision: Optional[int] = None) -> NormInterval:
        """(1/f(ell)) * best sum over at most ell consecutive parts; empty slots allowed"""
        prec = self._prec(precision)
        return NormInterval.from_raw(self.ell_norm_raw(x, ell, prec), prec)

    def ell_norm_raw(self, x: FiniteVector, ell: int, precision: Optional[int] = None) -> Raw:
        if int(ell) != ell or ell < 2:
            raise DomainError(f"l-norms are defined for integer l >= 2, got {ell}")
        ell = int(ell)
        wp = self._wp(self._prec(precision))
        if x.is_zero():
            return RAW_ZERO
        table = self.table(x, precision)
        best, _ = table.best_part_count(ell)
        return raw_div(best, raw_f(ell, wp), wp)

    def tail_norm(self, x: FiniteVector, r: Real, precision: Optional[int] = None) -> Tuple[NormInterval, int]:
        """sup over integer l >= r of ||x||_l with an attaining l

        For l >= #supp(x) the l-norm is ||x||_1 / f(l), strictly decreasing, so the scan
        stops at max(ceil(r), #supp(x)).
        """
        prec = self._prec(precision)
        q = as_fraction(r)
        if q < 2:
            raise DomainError(f"the tail norm needs r >= 2, got {q}")
        start = math.ceil(q)
        if x.is_zero():
            return NormInterval.zero(prec), start
        best, witness = None, start
        for ell in range(start, max(start, len(x)) + 1):
            best, witness = _fold(best, witness, self.ell_norm_raw(x, ell, prec), ell)
        return NormInterval.from_raw(best, prec), witness

    # -- witnesses ---------------------------------------------------------

    def best_partition(self, x: FiniteVector, ell: int, precision: Optional[int] = None) -> PartitionWitness:
        """Partition attaining the DP optimum of ||x||_ell; larger k then leftmost splits"""
        if x.is_zero():
            raise DomainError("the zero vector has no norming partition")
        if int(ell) != ell or ell < 2:
            raise DomainError(f"l-norms are defined for integer l >= 2, got {ell}")
        table = self.table(x, precision)
        _, k = table.best_part_count(int(ell))
        support = x.support
        parts = tuple((support[i], support[j]) for i, j in table.parts_of(k, 0, table.n - 1))
        return PartitionWitness(parts, int(ell))

    def evaluate_partition(self, x: FiniteVector, witness: PartitionWitness,
                           precision: Optional[int] = None) -> NormInterval:
        """(1/f(slots)) * right-nested sum of the part norms"""
        prec = self._prec(precision)
        wp = self._wp(prec)
        total: Optional[Raw] = None
        for lo, hi in reversed(witness.parts):
            part = self.s_norm_raw(x.restrict(lo, hi), prec)
            total = part if total is None else raw_add(part, total, wp)
        return NormInterval.from_raw(raw_div(total, raw_f(witness.slot_count, wp), wp), prec)

    def norm_attainer(self, x: FiniteVector, precision: Optional[int] = None) -> Union[int, float]:
        """n with ||x|| = ||x||_n, math.inf when the sup-norm attains; ties toward inf then larger n"""
        if x.is_zero():
            raise DomainError("the zero vector has no norm attainer")
        table = self.table(x, precision)
        n = table.n
        best, choice = table.sup[0][n - 1], math.inf
        for k in range(n, 1, -1):
            best, choice = _fold(best, choice, raw_div(table.B[k][0][n - 1], table.f[k], table.wp), k)
        return choice

    def dual_lower_bound(self, xstar: FiniteVector, x: Optional[FiniteVector] = None,
                         precision: Optional[int] = None) -> NormInterval:
        """||x*|| >= x*(x) / ||x|| against x, or the best of x* and sign(x*) when x is omitted"""
        prec = self._prec(precision)
        wp = self._wp(prec)
        if xstar.is_zero():
            return NormInterval.zero(prec)
        if x is None:
            signs = FiniteVector(tuple((i, Fraction(1 if _positive(c, wp) else -1)) for i, c in xstar.entries))
            candidates = [xstar, signs]
        else:
            candidates = [x]
        best = None
        for cand in candidates:
            if cand.is_zero():
                continue
            ratio = raw_div(enclose_scalar(pairing(xstar, cand), wp), self.s_norm_raw(cand, prec), wp)
            best = ratio if best is None else raw_max(best, ratio)
        return NormInterval.from_raw(best if best is not None else RAW_ZERO, prec)

    # -- oracle ------------------------------------------------------------

    def brute_force_norm(self, x: FiniteVector, precision: Optional[int] = None) -> NormInterval:
        """Exhaustive recursion over every consecutive partition; test oracle"""
        prec = self._prec(precision)
        wp = self._wp(prec)
        cap = settings.brute_force_cap
        if len(x) > cap:
            raise DomainError(f"brute force is limited to {cap} support points, got {len(x)}")
        if x.is_zero():
            return NormInterval.zero(prec)
        a = [raw_abs(enclose_scalar(c, wp)) for c in x.coefficients]

        @lru_cache(maxsize=None)
        def norm(i: int, j: int) -> Raw:
            best = a[i]
            for t in range(i + 1, j + 1):
                best = raw_max(best, a[t])
            for parts in _compositions(i, j):
                if len(parts) < 2:
                    continue
                total = RAW_ZERO
                for lo, hi in parts:
                    total = raw_add(total, norm(lo, hi), wp)
                best = raw_max(best, raw_div(total, raw_f(len(parts), wp), wp))
            return best

        return NormInterval.from_raw(norm(0, len(a) - 1), prec)


def _compositions(i: int, j: int) -> List[List[Tuple[int, int]]]:
    """Every split of positions i..j into consecutive nonempty parts"""
    if i > j:
        return [[]]
    out = []
    for t in range(i, j + 1):
        for rest in _compositions(t + 1, j):
            out.append([(i, t)] + rest)
    return out


def _positive(c: Scalar, wp: int) -> bool:
    enc = enclose_scalar(c, wp)
    return libmp.mpf_gt(enc[0], libmp.fzero) or not libmp.mpf_lt(enc[1], libmp.fzero)


norm_calculator = NormCalculator()
