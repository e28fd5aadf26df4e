"""
Parameter systems and certified growth-condition checks

A ParameterSystem materializes (k_i), (eps_i), (L_n), the lacunary set J with its
sigma registry, and the constants c, d, m_0. ParameterChecker turns every growth
condition into a HarnessReport whose verdicts are proven in tower arithmetic.
"""

import logging
from fractions import Fraction
from functools import cached_property
from typing import Callable, Dict, List, NamedTuple, Optional, Sequence, Tuple, Union

from mpmath import libmp

from app.config import settings
from app.models.harness_models import HarnessReport, Verdict
from app.models.parameter_models import SystemConfig
from app.services.errors import DomainError, NormScopeError, ParameterError, PreconditionError
from app.services.intervals import exact_log2, raw_ln2
from app.services.lacunary import (
    LacunarySet,
    SigmaRegistry,
    build_jkl,
    check_j,
    inv_c_prefix,
    sigma_check,
    sum_inv_c_over_j,
)
from app.services.towers import (
    EXACT_BITS,
    Ordering,
    TowerReal,
    certainly_le,
    certainly_lt,
    exp2_iter,
    tower_hull,
    tower_max,
)
from app.services.trees import TreeRule

logger = logging.getLogger(__name__)

Number = Union[int, Fraction, TowerReal]

GROWTH_XI = (1, 2, 3, 10, 1000, 10 ** 6)
GROWTH_R = (2, 10, 100)
GROWTH_ROOTS = (Fraction(1, 2), Fraction(1, 10))
POWER_GROWTH_EXPONENTS = (Fraction(9, 8), 2, 10, 1000)


class GValue(NamedTuple):
    value: TowerReal
    index: int
    decided: bool


class ParameterSystem:
    """(k_i), (eps_i), (L_n), J/K/L and sigma for one configuration"""

    def __init__(self, config: Optional[SystemConfig] = None):
        self.config = config or SystemConfig.toy()
        self.prec = self.config.precision_bits + settings.guard_bits
        self._ks = self._materialize_ks()
        self.lacunary: LacunarySet = build_jkl(self.config.lacunary == "canonical",
                                               self.config.j_prefix, self.prec)
        self.sigma = SigmaRegistry(self.lacunary)
        self._m: Dict[int, TowerReal] = {}
        logger.info(f"Parameter system '{self.config.name}' with {self.count} k-values, "
                    f"{len(self.lacunary)} J members ({self.config.lacunary})")

    def _materialize_ks(self) -> List[TowerReal]:
        if self.config.ks is not None:
            return [TowerReal.of(k, self.prec) for k in self.config.ks]
        height, top = self.config.k1_tower
        ks = [exp2_iter(TowerReal.of(top, self.prec), height)]
        while len(ks) < self.config.k_count:
            ks.append(exp2_iter(ks[-1], self.config.k_step))
        return ks

    # -- sequences -----------------------------------------------------------

    @property
    def count(self) -> int:
        return len(self._ks)

    @property
    def explicit(self) -> bool:
        return self.config.ks is not None

    def k(self, i: int) -> TowerReal:
        if not 1 <= i <= self.count:
            raise ParameterError(f"k_{i} is not materialized (system has {self.count})")
        return self._ks[i - 1]

    def k_int(self, i: int) -> Optional[int]:
        k = self.k(i)
        if k.exact is not None and k.exact.denominator == 1:
            return int(k.exact)
        return None

    def eps(self, i: int) -> TowerReal:
        if i < 0:
            raise ParameterError(f"eps_{i} is undefined")
        return TowerReal.of(Fraction(self.config.eps_scale, 2 ** i), self.prec)

    def eps_tail(self, i: int) -> TowerReal:
        """sum over j >= i of (eps_j + eps_(j-1)) = 3 E 2^(1-i)"""
        return TowerReal.of(Fraction(3 * self.config.eps_scale * 2, 2 ** i), self.prec)

    def L(self, n: int) -> int:
        if n < 1:
            raise ParameterError(f"L_{n} is undefined")
        ls = self.config.Ls
        return ls[min(n, len(ls)) - 1]

    def tree_rule(self) -> TreeRule:
        if not self.explicit:
            raise ParameterError("tree rules need explicit integer k values")
        return TreeRule(list(self.config.ks))

    def m(self, i: int) -> TowerReal:
        if i == 0:
            return TowerReal.of(1, self.prec)
        if i not in self._m:
            self._m[i] = m_value(i, self)
        return self._m[i]

    # -- constants -----------------------------------------------------------

    @cached_property
    def growth_search(self) -> Tuple[Optional[int], HarnessReport]:
        return growth_constant_search(self.prec)

    @property
    def growth_constant(self) -> int:
        if self.config.c is not None:
            return self.config.c
        c, _ = self.growth_search
        if c is None:
            raise ParameterError("no growth constant c passed the grid")
        return c

    @property
    def d(self) -> int:
        return 4 * self.growth_constant ** 3

    @cached_property
    def m0(self) -> TowerReal:
        """Least convenient m_0: f(m_0) >= 2 d^2 and m_0 > k_1, unless overridden"""
        if self.config.m0 is not None:
            return TowerReal.of(self.config.m0, self.prec)
        by_d = TowerReal.tower(1, 2 * self.d * self.d, self.prec)
        return tower_max(by_d, self.k(1) + 1)

    @cached_property
    def g_sup(self) -> Optional[TowerReal]:
        """sup_r G(r) <= max_i f(k_i) prod_(j<i) f(k_j)/k_j for a finite list"""
        if not self.explicit:
            return None
        best = None
        product = TowerReal.of(1, self.prec)
        for i in range(1, self.count + 1):
            k = self.k(i)
            term = k.f() * product
            best = term if best is None else tower_max(best, term)
            product = product * k.f() / k
        return best

    def to_dict(self) -> dict:
        return {
            "name": self.config.name,
            "ks": [str(k) for k in self._ks],
            "eps_scale": self.config.eps_scale,
            "Ls": list(self.config.Ls),
            "lacunary": self.lacunary.to_dict(),
            "c": self.config.c,
            "m0_override": self.config.m0,
            "precision_bits": self.config.precision_bits,
        }


# ---------------------------------------------------------------------------
# m_i, G, r-orbits
# ---------------------------------------------------------------------------

def m_value(i: int, system: ParameterSystem) -> TowerReal:
    """m_i = (2^k_i - 1) / k_i, the solution of f(m_i k_i) = k_i"""
    k = system.k(i)
    if k.exact is not None and k.exact.denominator == 1 and k.exact <= EXACT_BITS:
        n = int(k.exact)
        return TowerReal.of(Fraction(2 ** n - 1, n), system.prec)
    return (k.exp2() - 1) / k


def locate_window(r: Number, system: ParameterSystem) -> Optional[int]:
    """i with m_(i-1) <= r < m_i (m_0 = 1), or None when beyond or undecided"""
    r = TowerReal.of(r, system.prec)
    for i in range(1, system.count + 1):
        try:
            inside = certainly_le(system.m(i - 1), r) and certainly_lt(r, system.m(i))
        except NormScopeError:
            return None
        if inside:
            return i
    return None


def beyond_windows(r: Number, system: ParameterSystem) -> bool:
    try:
        return certainly_le(system.m(system.count), TowerReal.of(r, system.prec)) is True
    except NormScopeError:
        return False


def _require_above_one(r: TowerReal) -> None:
    if certainly_lt(TowerReal.of(1, r.prec), r) is not True:
        raise DomainError(f"G is defined for r > 1, got {r}")


def _bracket_ratio(r: TowerReal, k: TowerReal, fr: TowerReal, fk: TowerReal) -> TowerReal:
    """f(r) f(k) / f(r k)

    Plain products are divided directly. Past the plain range the quotient of two nearly
    equal towers is replaced by f(r) + f(k) - 2/r - 2/k <= f(r k) <= f(r) + f(k), that is
    f(r) / (1 + f(r)/f(k)) <= f(r) f(k) / f(r k) <= f(r) / (1 + (f(r) - 2/r - 2/k)/f(k)).
    """
    rk = r * k
    if rk.is_plain:
        return fr * fk / rk.f()
    low = fr / (1 + fr / fk)
    slack = fr - 2 / r - 2 / k
    high = fr / (1 + slack / fk) if slack.certain_sign() == 1 else fr
    return tower_hull(low, high)


def g_terms(r: Number, system: ParameterSystem, subsequence: Optional[Sequence[int]] = None,
            cutoff: Optional[int] = None) -> List[TowerReal]:
    """f(r) f(k_i) / f(r k_i) * prod_(j<i) f(k_j)/k_j along the (sub)sequence"""
    r = TowerReal.of(r, system.prec)
    _require_above_one(r)
    indices = list(subsequence) if subsequence is not None else list(range(1, system.count + 1))
    if cutoff is not None:
        indices = indices[:max(cutoff, 0)]
    fr = r.f()
    product = TowerReal.of(1, system.prec)
    terms = []
    for i in indices:
        k = system.k(i)
        fk = k.f()
        terms.append(_bracket_ratio(r, k, fr, fk) * product)
        product = product * fk / k
    return terms


def _max_of(terms: Sequence[TowerReal], labels: Sequence[int]) -> GValue:
    if not terms:
        raise DomainError("maximum over an empty index set")
    best, index, decided = terms[0], labels[0], True
    for term, label in zip(terms[1:], labels[1:]):
        order = term.compare(best)
        if order == Ordering.GREATER:
            best, index = term, label
        elif order == Ordering.UNKNOWN:
            best = tower_max(best, term)
            decided = False
    return GValue(best, index, decided)


def g_value(r: Number, system: ParameterSystem, subsequence: Optional[Sequence[int]] = None,
            cutoff: Optional[int] = None) -> GValue:
    """G(r) (or the subsequence variant) with the attaining k-index"""
    indices = list(subsequence) if subsequence is not None else list(range(1, system.count + 1))
    if cutoff is not None:
        indices = indices[:max(cutoff, 0)]
    return _max_of(g_terms(r, system, indices), indices)


def g_tilde(r: Number, system: ParameterSystem) -> Optional[TowerReal]:
    """The single bracket term of G: the window index j of r picks k_j"""
    r = TowerReal.of(r, system.prec)
    j = locate_window(r, system)
    if j is None:
        return None
    return g_terms(r, system, list(range(1, j + 1)))[-1]


def certified_floor(x: TowerReal) -> Optional[int]:
    """Certified floor of a plain value, None when undecided or astronomical"""
    if not x.is_plain:
        return None
    lo = libmp.to_int(libmp.mpf_floor(x.lo))
    hi = libmp.to_int(libmp.mpf_floor(x.hi))
    return lo if lo == hi else None


def g_cutoff(r: Number, system: ParameterSystem) -> Optional[int]:
    """Number of G-terms kept by the cutoff: L_(floor f(f(r))) + 1

    The cutoff reads i <= L_(floor f(f(r))) with L counting levels below the root. The
    descent in the block lower estimate (`descent_witness`) visits depths 0..L and uses
    k_(depth+1) at each, so indices 1..L + 1 are kept. None when the floor is undecided.
    """
    r = TowerReal.of(r, system.prec)
    ffr = r.f().f()
    if not ffr.is_plain:
        return system.L(len(system.config.Ls)) + 1
    n = certified_floor(ffr)
    if n is None:
        return None
    return system.L(max(n, 1)) + 1


def orbit_step(r: TowerReal) -> TowerReal:
    """r^f(r), exact when f(r) is a small integer or r an integral power of two"""
    fr = r.f()
    if r.exact is not None:
        if fr.exact is not None and fr.exact.denominator == 1 and 0 <= fr.exact <= 64:
            return TowerReal.of(r.exact ** int(fr.exact), r.prec)
        a = exact_log2(r.exact)
        if a is not None and 0 <= a <= 64:
            return TowerReal.of((r.exact + 1) ** a, r.prec)
    return r.pow(fr)


def r_sequence(r0: Number, count: int, prec: Optional[int] = None) -> List[TowerReal]:
    """r_0 = r0 and r_(l+1) = r_l^f(r_l); count values starting at r_0"""
    r = TowerReal.of(r0, prec)
    _require_above_one(r)
    values = [r]
    while len(values) < count:
        values.append(orbit_step(values[-1]))
    return values


# ---------------------------------------------------------------------------
# growth constant c and C(l)
# ---------------------------------------------------------------------------

def _growth_inequalities(c: int, prec: int) -> List[Tuple[str, Callable[[], Tuple[TowerReal, TowerReal]]]]:
    def f(x):
        return TowerReal.of(x, prec).f()

    def power(x, e):
        return TowerReal.of(x, prec).pow(e)

    rows = []
    for a in GROWTH_XI:
        for b in GROWTH_XI:
            rows.append((f"product_lower[{a},{b}]", lambda a=a, b=b: ((f(a) + f(b)) / c, f(a * b))))
            rows.append((f"product_upper[{a},{b}]", lambda a=a, b=b: (f(a * b), f(a) + f(b))))
    for a in GROWTH_XI[1:]:
        for R in GROWTH_R:
            rows.append((f"power_lower[{a},{R}]", lambda a=a, R=R: (f(a) * R / c, power(a, R).f())))
            rows.append((f"power_upper[{a},{R}]", lambda a=a, R=R: (power(a, R).f(), f(a) * R)))
        rows.append((f"minus_one[{a}]", lambda a=a: (f(a) / c, f(a) - 1)))
    for a in GROWTH_XI:
        for q in GROWTH_ROOTS:
            rows.append((f"root[{a},{q}]", lambda a=a, q=q: (f(a) * q, power(a, q).f())))
        rows.append((f"root_of_f[{a}]",
                     lambda a=a: (power(a, 1 / f(a).sqrt()).f(), f(a).sqrt() * c)))
    return rows


def growth_constant_search(prec: Optional[int] = None, max_c: int = 64) -> Tuple[Optional[int], HarnessReport]:
    """Least power of two c >= 2 passing every grid inequality of f's near-logarithmic growth

    power_lower starts at xi = 2: at xi = 1 it would force R <= c for every R.
    """
    prec = prec or settings.precision_bits + settings.guard_bits
    c = 2
    while c <= max_c:
        report = HarnessReport(harness="growth_constant")
        report.measurements["c"] = c
        for name, sides in _growth_inequalities(c, prec):
            _certify(report, name, sides)
        if report.passed:
            report.measurements["d"] = 4 * c ** 3
            logger.info(f"growth constant c = {c}, d = {4 * c ** 3}")
            return c, report
        c *= 2
    logger.warning(f"no growth constant up to {max_c}")
    return None, report


def c_value(ell: Number, system: ParameterSystem) -> Tuple[TowerReal, str]:
    """C(l) = sqrt(G(l))/c past the threshold min{m >= m_0 : sqrt(G(m)) >= c}, else 1

    G is increasing, so l is past the threshold iff l >= m_0 and G(l) >= c^2.
    An undecided position returns 1, the smaller of the two regimes' lower bounds.
    """
    ell = TowerReal.of(ell, system.prec)
    one = TowerReal.of(1, system.prec)
    c = system.growth_constant
    above_m0 = certainly_le(system.m0, ell)
    if above_m0 is False:
        return one, "constant"
    g = g_value(ell, system).value
    reaches = certainly_le(TowerReal.of(c * c, system.prec), g)
    if reaches is False:
        return one, "constant"
    if above_m0 and reaches:
        return g.sqrt() / c, "growth"
    return one, "undecided"


def c_threshold(system: ParameterSystem) -> Tuple[Optional[TowerReal], str]:
    c2 = TowerReal.of(system.growth_constant ** 2, system.prec)
    if system.g_sup is not None and certainly_lt(system.g_sup, c2) is True:
        return None, "never: sup G < c^2"
    if certainly_le(c2, g_value(system.m0, system).value) is True:
        return system.m0, "m0"
    return None, "undecided"


def window_bound(r: Number, system: ParameterSystem) -> HarnessReport:
    """f(R~)/(f(r~) f(r)) <= c^2/sqrt(f(r)) on the four splitting windows"""
    r = TowerReal.of(r, system.prec)
    c = system.growth_constant
    report = HarnessReport(harness="window_bound")
    fr = r.f()
    low = r.pow(1 / fr.sqrt())
    high = r.pow(fr.sqrt())
    top = r.pow(fr)
    windows = [("2..r^(1/sqrt f)", TowerReal.of(2, system.prec), low), ("r^(1/sqrt f)..r", low, r),
               ("r..r^sqrt f", r, high), ("r^sqrt f..r^f", high, top)]
    for name, a, b in windows:
        _certify(report, f"window[{name}]", lambda a=a, b=b: (b.f() / (a.f() * fr), c * c / fr.sqrt()),
                 hard=False)
    return report


def domination_product(m: Number, system: ParameterSystem, terms: int = 4) -> Dict[str, object]:
    """Truncated c(m) = prod (1/(1 - d/sqrt f(r_l))) (1 + f(f(r_l)) sqrt G(r_l)/f(r_l) + 1/(sqrt G(r_l) - 1))

    The tail uses f(r_(l+1)) >= f(r_l)(f(r_l) - 1); the 1/(sqrt G - 1) part of the tail
    relies on the eps budget and is conditional.
    """
    m = TowerReal.of(m, system.prec)
    d = system.d
    if certainly_lt(TowerReal.of(d * d, system.prec), m.f()) is not True:
        raise PreconditionError(f"domination product needs f(m) > d^2 = {d * d}")
    product = TowerReal.of(1, system.prec)
    orbit = r_sequence(m, terms, system.prec)
    factors = []
    for r in orbit:
        F = r.f()
        root_g = g_value(r, system).value.sqrt()
        if certainly_lt(TowerReal.of(1, system.prec), root_g) is not True:
            raise PreconditionError("domination product needs G(r_l) > 1")
        factor = (1 / (1 - d / F.sqrt())) * (1 + F.f() * root_g / F + 1 / (root_g - 1))
        factors.append(str(factor))
        product = product * factor
    F_last = orbit[-1].f()
    F_next = F_last * (F_last - 1)
    exponent = 4 * d / F_next.sqrt() + 2 * F_next.f() / F_next.sqrt() + 2 * system.eps_tail(2)
    tail = (exponent / TowerReal.plain(raw_ln2(system.prec), system.prec)).exp2()
    return {
        "factors": factors,
        "truncated": product,
        "tail_factor": tail,
        "bound": product * tail,
        "conditional": True,
    }


# ---------------------------------------------------------------------------
# checks
# ---------------------------------------------------------------------------

def _certify(report: HarnessReport, name: str, sides: Callable[[], Tuple[TowerReal, TowerReal]],
             strict: bool = False, hard: bool = True, conditional: bool = False, **extra) -> Verdict:
    """Evaluate lhs <= rhs (or <) and record both sides; indecision is UNKNOWN"""
    try:
        lhs, rhs = sides()
        certainty = certainly_lt(lhs, rhs) if strict else certainly_le(lhs, rhs)
        details = {"lhs": lhs.to_dict(), "rhs": rhs.to_dict(), "precision_bits": lhs.prec}
    except NormScopeError as e:
        logger.warning(f"{report.harness}/{name} undecided: {e}")
        certainty, details = None, {"error": str(e)}
    verdict = Verdict.from_certainty(certainty)
    report.add(name, verdict, hard=hard, conditional=conditional, **details, **extra)
    return verdict


class ParameterChecker:
    """Certified verdicts for the growth conditions of one system"""

    def __init__(self, system: ParameterSystem):
        self.system = system

    @property
    def prec(self) -> int:
        return self.system.prec

    def _t(self, value) -> TowerReal:
        return TowerReal.of(value, self.prec)

    def check_base_growth(self) -> HarnessReport:
        """(2/3) f((3/4) f(k_1)) >= 1 and ln k_1 >= 3"""
        report = HarnessReport(harness="base_growth")
        k1 = self.system.k(1)
        _certify(report, "two_thirds_f_three_quarters_f_k1",
                 lambda: (self._t(1), (k1.f() * Fraction(3, 4)).f() * Fraction(2, 3)))
        ln2 = TowerReal.plain(raw_ln2(self.prec), self.prec)
        _certify(report, "ln_k1_at_least_3", lambda: (self._t(3), k1.log2() * ln2))
        return report

    def check_power_growth(self, samples: Optional[Sequence[Tuple[Number, Number]]] = None) -> HarnessReport:
        """f(r^a) >= (3/4) a f(r) for r > k_1, a > 1: grid samples plus a sufficient condition

        f(r^a) >= a log2 r and f(r) <= log2 r + 1/(r ln 2), so r ln r >= 3 gives the
        inequality for every a; r ln r increases, so checking it at k_1 covers r > k_1.
        """
        report = HarnessReport(harness="power_growth")
        k1 = self.system.k(1)
        if samples is None:
            samples = [(r, a) for r in (k1 + 1, k1 * k1, k1.exp2()) for a in POWER_GROWTH_EXPONENTS]
        for n, (r, a) in enumerate(samples):
            r, a = self._t(r), self._t(a)
            _certify(report, f"sample[{n}]", lambda r=r, a=a: (r.f() * a * Fraction(3, 4), r.pow(a).f()),
                     r=str(r), a=str(a))
        ln2 = TowerReal.plain(raw_ln2(self.prec), self.prec)
        _certify(report, "sufficient_k1_ln_k1_at_least_3", lambda: (self._t(3), k1 * k1.log2() * ln2))
        report.measurements["note"] = "grid samples and the sufficient condition at k_1"
        return report

    def epsilon_sides(self, j: int) -> Tuple[TowerReal, TowerReal, TowerReal]:
        """The two summands of the eps_j budget and eps_j"""
        system = self.system
        k1, kj = system.k(1), system.k(j)
        fkj = kj.f()
        product = self._t(1)
        for s in range(1, j):
            ks = system.k(s)
            product = product * ks / ks.f()
        series = 1 / (1 - (3 / (8 * k1)).sqrt())
        first = (2 / fkj * product).sqrt() * series
        second = 2 * fkj.log2() / fkj.sqrt() * product.sqrt()
        return first, second, system.eps(j)

    def check_epsilon_budget(self, j: int) -> HarnessReport:
        report = HarnessReport(harness=f"epsilon_budget[j={j}]")
        sides: Dict[str, TowerReal] = {}

        def evaluate():
            first, second, eps = self.epsilon_sides(j)
            sides.update(first=first, second=second)
            return first + second, eps

        _certify(report, "summands_below_eps", evaluate, strict=True)
        report.measurements.update({k: v.to_dict() for k, v in sides.items()})
        return report

    def check_g_monotonicity(self, r_grid: Sequence[Number], subsequence: Optional[Sequence[int]] = None
                             ) -> HarnessReport:
        """G nondecreasing on the grid; the subsequence variant dominates G"""
        report = HarnessReport(harness="g_monotonicity")
        grid = sorted((self._t(r) for r in r_grid), key=lambda t: t.to_float())
        values = []
        for r in grid:
            try:
                values.append(g_value(r, self.system))
            except NormScopeError as e:
                logger.warning(f"G({r}) undecided: {e}")
                values.append(None)
        report.measurements["G"] = [
            {"r": str(r), "G": v.value.to_dict() if v else None, "argmax": v.index if v else None}
            for r, v in zip(grid, values)
        ]
        for (ra, va), (rb, vb) in zip(zip(grid, values), zip(grid[1:], values[1:])):
            if va is None or vb is None:
                report.add(f"nondecreasing[{ra}..{rb}]", Verdict.UNKNOWN)
                continue
            _certify(report, f"nondecreasing[{ra}..{rb}]", lambda va=va, vb=vb: (va.value, vb.value))
        if subsequence is not None:
            full = list(range(1, self.system.count + 1))
            for r, v in zip(grid, values):
                if list(subsequence) == full:
                    report.add(f"subsequence_dominates[{r}]", Verdict.PASS, reason="same sequence")
                    continue
                _certify(report, f"subsequence_dominates[{r}]",
                         lambda r=r, v=v: (v.value, g_value(r, self.system, subsequence).value))
        return report

    def g_cutoff_check(self, r_grid: Sequence[Number]) -> HarnessReport:
        """G(r) is attained among the first L_(floor f(f(r))) + 1 terms"""
        report = HarnessReport(harness="g_cutoff")
        for r in r_grid:
            r = self._t(r)
            try:
                cutoff = g_cutoff(r, self.system)
                full = g_value(r, self.system)
            except NormScopeError as e:
                report.add(f"cutoff[{r}]", Verdict.UNKNOWN, error=str(e))
                continue
            if cutoff is None:
                report.add(f"cutoff[{r}]", Verdict.UNKNOWN, reason="floor of f(f(r)) undecided")
                continue
            if full.decided and full.index <= cutoff:
                report.add(f"cutoff[{r}]", Verdict.PASS, cutoff=cutoff, argmax=full.index)
                continue
            if cutoff < 1:
                report.add(f"cutoff[{r}]", Verdict.FAIL, cutoff=cutoff, argmax=full.index)
                continue
            _certify(report, f"cutoff[{r}]",
                     lambda r=r, cutoff=cutoff: (full.value, g_value(r, self.system, cutoff=cutoff).value),
                     cutoff=cutoff, argmax=full.index)
        return report

    def _f_over_k(self, upto: int) -> TowerReal:
        """prod_(s<=upto) f(k_s)/k_s, 1 for an empty product"""
        product = self._t(1)
        for s in range(1, upto + 1):
            k = self.system.k(s)
            product = product * k.f() / k
        return product

    def check_orbit_series(self, r: Number, terms: int = 6) -> HarnessReport:
        """Sums of 1/sqrt(G~(r_l)) along the r-orbit, bracket by bracket

        Inside [m_(j-1), m_j) the orbit is counted from its first point t there, t = r_l0:
        f(r_l) >= ((3/4) f(m_(j-1)))^(2^(l-l0)) and r_l >= t^(((3/4) f(t))^(2^(l-l0) - 1)).
        Points up to k_j have G~ >= (1/2) f(r_l) prod_(s<j) f(k_s)/k_s
        >= (3/16) f(k_(j-1)) ((3/8) k_1)^(l-l0) prod_(s<=j-2) f(k_s)/k_s, a geometric sum.
        Points in (k_j, m_j) have G~ >= (1/2) f(k_j) prod_(s<j) f(k_s)/k_s and number at most
        log2 f(k_j) + 1. A bracket is complete once the orbit has left it; the bracket and
        iteration-count verdicts are hard only then. The total adds the eps tail from the
        first incomplete bracket on to the sums of complete brackets (conditional).
        """
        system = self.system
        r = self._t(r)
        i = locate_window(r, system)
        if i is None or i < 2:
            raise PreconditionError(f"r = {r} lies in no bracket [m_(i-1), m_i) with i >= 2")
        report = HarnessReport(harness="orbit_series")
        report.measurements["start_bracket"] = i
        orbit = r_sequence(r, terms, self.prec)
        labels = list(range(1, system.count + 1))
        visits: Dict[int, List[Tuple[int, TowerReal, TowerReal]]] = {}
        prefix = self._t(0)
        escaped_at = None
        rows = []
        for ell, r_ell in enumerate(orbit):
            j = locate_window(r_ell, system)
            if j is None:
                escaped_at = ell if beyond_windows(r_ell, system) else None
                rows.append({"l": ell, "r": str(r_ell), "bracket": None})
                break
            name = f"g_tilde_below_g[l={ell}]"
            try:
                values = g_terms(r_ell, system)
                tilde, full = values[j - 1], _max_of(values, labels)
                holds = certainly_le(tilde, full.value)
                details = {"lhs": tilde.to_dict(), "rhs": full.value.to_dict(), "argmax": full.index}
                if holds is None:
                    # G~ is the j-th of the maximised terms
                    holds, details["reason"] = True, f"term {j} of the maximum"
                report.add(name, Verdict.from_certainty(holds), **details)
                inverse = 1 / tilde.sqrt()
                prefix = prefix + 1 / full.value.sqrt()
            except NormScopeError as e:
                report.add(name, Verdict.UNKNOWN, error=str(e))
                break
            visits.setdefault(j, []).append((ell, r_ell, tilde))
            rows.append({"l": ell, "r": str(r_ell), "bracket": j, "inv_sqrt_g_tilde": str(inverse)})
        report.measurements["orbit"] = rows
        report.measurements["escaped_at"] = escaped_at

        last_bracket = max(visits) if visits else i
        budgets = self._t(0)
        visited = self._t(0)
        settled = self._t(0)
        for j, points in sorted(visits.items()):
            complete = j < last_bracket or escaped_at is not None
            total = self._orbit_bracket(report, j, points, complete)
            visited = visited + total
            if complete:
                settled = settled + total
            budgets = budgets + system.eps(j - 1) + system.eps(j)
        if visits:
            _certify(report, "visited_total", lambda: (visited, budgets),
                     hard=escaped_at is not None, complete=escaped_at is not None)
        next_bracket = system.count + 1 if escaped_at is not None else last_bracket
        _certify(report, "series_total",
                 lambda: (settled + system.eps_tail(next_bracket), system.eps_tail(i)),
                 hard=False, conditional=True)
        report.measurements["prefix_sum"] = prefix.to_dict()
        return report

    def _orbit_bracket(self, report: HarnessReport, j: int, points: Sequence[Tuple[int, TowerReal, TowerReal]],
                       complete: bool) -> TowerReal:
        """Pointwise and summed bounds for the orbit points inside [m_(j-1), m_j)"""
        system = self.system
        kj, k1 = system.k(j), system.k(1)
        fkj = kj.f()
        before = self._f_over_k(j - 1)
        start_ell, start, _ = points[0]
        base = system.m(j - 1).f() * Fraction(3, 4)
        start_base = start.f() * Fraction(3, 4)
        lower: List[Tuple[int, TowerReal]] = []
        upper: List[TowerReal] = []
        total = self._t(0)
        for ell, r_ell, tilde in points:
            step = ell - start_ell
            tag = f"[j={j},l={ell}]"
            fr = r_ell.f()
            total = total + 1 / tilde.sqrt()
            _certify(report, f"orbit_f_lower{tag}", lambda step=step, fr=fr: (base.pow(2 ** step), fr))
            if step >= 2:
                _certify(report, f"orbit_lower{tag}",
                         lambda step=step, r_ell=r_ell: (start.pow(start_base.pow(2 ** step - 1)), r_ell))
            try:
                below_kj = certainly_le(r_ell, kj)
            except NormScopeError:
                below_kj = None
            if below_kj is None:
                report.add(f"k_side{tag}", Verdict.UNKNOWN, reason="r_l against k_j undecided")
                continue
            if below_kj:
                lower.append((step, tilde))
                _certify(report, f"g_tilde_half_f{tag}", lambda fr=fr, tilde=tilde: (fr * before / 2, tilde))
                _certify(report, f"g_tilde_geometric{tag}",
                         lambda step=step, tilde=tilde: (
                             system.k(j - 1).f() * Fraction(3, 16) * (k1 * Fraction(3, 8)).pow(step)
                             * self._f_over_k(j - 2), tilde))
            else:
                upper.append(tilde)
                _certify(report, f"g_tilde_above_k{tag}", lambda tilde=tilde: (fkj * before / 2, tilde))

        if lower:
            lead = (Fraction(16, 3) / system.k(j - 1).f() / self._f_over_k(j - 2)).sqrt()
            ratio = (Fraction(8, 3) / k1).sqrt()
            _certify(report, f"lower_part_sum[j={j}]",
                     lambda: (sum((1 / t.sqrt() for _, t in lower), self._t(0)),
                              sum((lead * ratio.pow(s) for s, _ in lower), self._t(0))))
            if certainly_lt(ratio, self._t(1)) is True:
                _certify(report, f"lower_part_budget[j={j}]",
                         lambda: (lead / (1 - ratio), system.eps(j - 1)), strict=True)
            else:
                report.add(f"lower_part_budget[j={j}]", Verdict.FAIL, reason="ratio (8/3)/k_1 is not below 1")
        if upper:
            _certify(report, f"iteration_count[j={j}]", lambda: (self._t(len(upper) - 1), fkj.log2()),
                     hard=complete, complete=complete)
            _certify(report, f"upper_part_sum[j={j}]",
                     lambda: (sum((1 / t.sqrt() for t in upper), self._t(0)),
                              (2 / (fkj * before)).sqrt() * len(upper)))
            _certify(report, f"upper_part_budget[j={j}]",
                     lambda: (2 * fkj.log2() / fkj.sqrt() / before.sqrt(), system.eps(j)))
        _certify(report, f"bracket_budget[j={j}]", lambda: (total, system.eps(j - 1) + system.eps(j)),
                 hard=complete, complete=complete)
        return total

    def inv_c_tail(self) -> Tuple[Optional[TowerReal], bool]:
        """Tail of the 1/C series past the materialized J and whether it is conditional"""
        system = self.system
        c = system.growth_constant
        if not system.lacunary.canonical:
            return self._t(0), False
        if system.g_sup is not None and certainly_lt(system.g_sup, self._t(c * c)) is True:
            return None, False
        # members past the prefix dominate successive orbit points, whose
        # 1/sqrt(G) series is bounded by the eps tail
        return c * system.eps_tail(2), True

    def sum_inv_c_total(self) -> Optional[TowerReal]:
        """Upper bound for the sum of 1/C(l) over J, None when the series diverges"""
        tail, _ = self.inv_c_tail()
        if tail is None:
            return None
        prefix, _ = inv_c_prefix(self.system.lacunary, lambda ell: c_value(ell, self.system))
        return prefix + tail

    def check_sum_inv_c(self, budget: Optional[Fraction] = None) -> HarnessReport:
        system = self.system
        tail, conditional = self.inv_c_tail()
        return sum_inv_c_over_j(system.lacunary, lambda ell: c_value(ell, system), tail,
                                budget=budget, conditional=conditional,
                                precision=system.config.precision_bits)

    def run_all(self) -> List[HarnessReport]:
        system = self.system
        reports = [self.check_base_growth(), self.check_power_growth()]
        for j in range(1, min(3, system.count) + 1):
            reports.append(self.check_epsilon_budget(j))
        if system.config.c is None:
            reports.append(system.growth_search[1])
        reports.append(self.check_g_monotonicity([2, 4, 8], subsequence=[1, system.count]))
        reports.append(self.g_cutoff_check([2, 4, 8]))
        if system.count >= 2:
            try:
                reports.append(self.check_orbit_series(system.m(1)))
            except NormScopeError as e:
                logger.warning(f"orbit series skipped: {e}")
        reports.append(check_j(system.lacunary))
        reports.append(sigma_check(system.sigma))
        reports.append(self.check_sum_inv_c())
        return reports
