"""
Command orchestration shared by the CLI and the HTTP routers

Every command returns a CommandReport. Corpus items are processed in a thread pool with
order-preserving map, so reports do not depend on scheduling.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from typing import Any, Callable, Dict, List, Optional, Sequence

import mpmath

from app.config import settings
from app.models.harness_models import HarnessReport, IntervalModel, Verdict
from app.models.norm_models import CommandReport, NormResult
from app.models.parameter_models import SystemConfig
from app.services.certificates import norming_certificate_check
from app.services.core_norms import norm_calculator
from app.services.corpus import generate_corpus
from app.services.errors import NormScopeError
from app.services.gm_space import (
    dual_spreading_note,
    enumerate_gm,
    flat_special,
    sandwich_report,
    sgm_audit,
    spreading_gap,
)
from app.services.intervals import NormInterval
from app.services.operator import (
    apply_T,
    check_block_domination,
    check_block_lower_estimate,
    check_ell_domination,
    check_tail_splitting,
    decompose_blocks,
    operator_norm_report,
    xstars_for,
)
from app.services.parameters import ParameterChecker, ParameterSystem
from app.services.symcoeff import SymCoeff
from app.services.trees import (
    FinTree,
    associated_certificate,
    associated_functional,
    associated_vector,
    check_tree_vector_bound,
    level_decomposition,
    recombine,
)
from app.services.vectors import FiniteVector, pairing

logger = logging.getLogger(__name__)


def jsonable(value: Any) -> Any:
    """Deterministic JSON-safe rendering of service values"""
    if isinstance(value, (str, int, bool)) or value is None:
        return value
    if isinstance(value, float):
        return value if math.isfinite(value) else str(value)
    if isinstance(value, (Fraction, SymCoeff, mpmath.mpf)):
        return str(value) if not isinstance(value, SymCoeff) else repr(value)
    if isinstance(value, FiniteVector):
        return value.literal()
    if isinstance(value, HarnessReport):
        return jsonable(value.summary())
    if hasattr(value, "to_dict"):
        return jsonable(value.to_dict())
    if hasattr(value, "model_dump"):
        return jsonable(value.model_dump(mode="json"))
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (set, frozenset)):
        return sorted(str(v) for v in value)
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    return str(value)


def _envelope(command: str, reports: Sequence[HarnessReport], results: Dict[str, Any],
              system: Optional[ParameterSystem] = None) -> CommandReport:
    verdict = Verdict.combine(r.verdict for r in reports)
    return CommandReport(
        command=command,
        system=jsonable(system.to_dict()) if system is not None else None,
        verdict=verdict.value,
        reports=[jsonable(r) for r in reports],
        results=jsonable(results),
    )


class RunService:
    """One method per CLI command"""

    def __init__(self, workers: Optional[int] = None):
        self.workers = workers or settings.workers

    def _map(self, fn: Callable, items: Sequence) -> List:
        if self.workers <= 1 or len(items) <= 1:
            return [fn(item) for item in items]
        with ThreadPoolExecutor(max_workers=self.workers) as pool:
            return list(pool.map(fn, items))

    # -- norm --------------------------------------------------------------

    def norm(self, literal: str, ell: Optional[int] = None, r: Optional[str] = None,
             precision: Optional[int] = None) -> NormResult:
        prec = precision or settings.precision_bits
        x = FiniteVector.parse(literal)
        result: Dict[str, Any] = {"vector": x.literal(), "s_norm": IntervalModel.of(norm_calculator.s_norm(x, prec))}
        if not x.is_zero():
            result["attainer"] = str(norm_calculator.norm_attainer(x, prec))
        if ell is not None:
            result["ell_norm"] = IntervalModel.of(norm_calculator.ell_norm(x, ell, prec))
            if not x.is_zero():
                result["partition"] = norm_calculator.best_partition(x, ell, prec).to_dict()
        if r is not None:
            value, witness = norm_calculator.tail_norm(x, Fraction(r), prec)
            result["tail_norm"] = IntervalModel.of(value)
            result["tail_ell"] = witness
        return NormResult(**result)

    def norm_report(self, literal: str, ell: Optional[int] = None, r: Optional[str] = None,
                    precision: Optional[int] = None) -> CommandReport:
        result = self.norm(literal, ell, r, precision)
        return _envelope("norm", [], result.model_dump(mode="json"))

    # -- tree --------------------------------------------------------------

    def tree_report(self, literal: Optional[str] = None, ks: Optional[Sequence[int]] = None,
                    lengths: Sequence[int] = (0, 1, 2), offset: int = 1,
                    precision: Optional[int] = None) -> CommandReport:
        prec = precision or settings.precision_bits
        reports: List[HarnessReport] = []
        results: Dict[str, Any] = {}
        if literal is not None:
            tree = FinTree.parse(literal)
            report = HarnessReport(harness="tree_identities")
            total = sum((tree.alpha(leaf) * tree.beta(leaf) for leaf in tree.leaves()), SymCoeff())
            report.add("alpha_beta_sum_is_one", Verdict.from_certainty(total == SymCoeff.rational(1)),
                       total=repr(total))
            x = associated_vector(tree, offset=offset)
            xstar = associated_functional(tree, offset=offset)
            report.add("certificate_valid",
                       Verdict.from_certainty(norming_certificate_check(associated_certificate(tree, offset=offset))))
            report.add("pairing_is_one", Verdict.from_certainty(pairing(xstar, x) == 1), pairing=str(pairing(xstar, x)))
            norm = norm_calculator.s_norm(x, prec)
            report.add("norm_at_least_one", Verdict.from_certainty(NormInterval.exact(1, prec).certainly_le(norm)),
                       s_norm=norm.to_dict())
            for k in range(tree.length + 1):
                terms = level_decomposition(tree, k, offset=offset)
                report.add(f"level_recombination[k={k}]", Verdict.from_certainty(recombine(terms) == x),
                           terms=len(terms))
            results.update(tree=tree.literal(), vector=x.literal(), functional=xstar.literal(),
                           leaves=[{"leaf": list(leaf), "alpha": repr(tree.alpha(leaf)), "beta": repr(tree.beta(leaf))}
                                   for leaf in tree.leaves()])
            reports.append(report)
        if ks is not None:
            reports.append(check_tree_vector_bound(ks, lengths, prec))
        return _envelope("tree", reports, results)

    # -- params ------------------------------------------------------------

    def params_report(self, config: SystemConfig) -> CommandReport:
        system = ParameterSystem(config)
        reports = ParameterChecker(system).run_all()
        return _envelope("params", reports, {}, system)

    # -- operator ----------------------------------------------------------

    def operator_report(self, config: SystemConfig, corpus: Optional[Sequence[FiniteVector]] = None,
                        ell_grid: Sequence[int] = (2, 4, 8), slots: int = 3, seed: Optional[int] = None,
                        nus: Sequence[Sequence[Fraction]] = ((Fraction(1), Fraction(-1, 2)),)) -> CommandReport:
        system = ParameterSystem(config)
        prec = config.precision_bits
        xstars = xstars_for(system, slots, prec)
        if corpus is None:
            window = (1, xstars[len(xstars)].last) if len(xstars) else (1, 1)
            corpus = [item.vector for item in xstars.items] + generate_corpus(seed=seed, window=window)

        def one(x: FiniteVector) -> Dict[str, Any]:
            row: Dict[str, Any] = {"vector": x.literal(), "Tx": apply_T(xstars, x).literal(), "reports": []}
            try:
                dec = decompose_blocks(x, xstars)
            except NormScopeError as e:
                row["skipped"] = str(e)
                return row
            row["lambdas"] = [str(v) for v in dec.lambdas]
            ratios = {}
            for ell in ell_grid:
                ratio, report = check_block_domination(xstars, dec.zs, dec.lambdas, ell, precision=prec)
                ratios[str(ell)] = ratio.to_dict()
                row["reports"].append(report)
            row["ratios"] = ratios
            row["reports"].append(check_tail_splitting(x, 2, system, precision=prec))
            if len(dec.zs) >= 3:
                try:
                    row["reports"].append(check_block_lower_estimate(xstars, dec.zs, 2, [2, 3], dec.lambdas,
                                                                     system, prec))
                except NormScopeError as e:
                    row["lower_estimate"] = f"not applicable: {e}"
            if config.m0 is not None:
                try:
                    row["reports"].append(check_ell_domination(xstars, dec.zs, config.m0, dec.lambdas, system, prec))
                except NormScopeError as e:
                    row["ell_domination"] = f"not applicable: {e}"
            return row

        rows = self._map(one, list(corpus))
        reports = [r for row in rows for r in row.pop("reports")]
        reports.append(operator_norm_report(xstars, list(corpus), system, nus, prec))
        logger.info(f"operator run over {len(rows)} vectors and {len(xstars)} slots")
        return _envelope("operator", reports, {"xstars": xstars.to_dict(), "rows": rows}, system)

    # -- gm ----------------------------------------------------------------

    def gm_report(self, config: SystemConfig, corpus: Optional[Sequence[FiniteVector]] = None,
                  depth: int = 2, budget: int = 200, audit_depth: int = 3,
                  spreading: Optional[Sequence[Fraction]] = None, N_grid: Sequence[int] = (1, 2, 8, 64),
                  seed: Optional[int] = None) -> CommandReport:
        system = ParameterSystem(config)
        prec = config.precision_bits
        if corpus is None:
            corpus = generate_corpus(seed=seed, max_support=5, window=(1, 6))
        results: Dict[str, Any] = {"surrogate": not system.lacunary.canonical}
        if corpus:
            results["sandwich"] = self._map(lambda x: sandwich_report(x, system, depth, budget, prec), list(corpus))

        nodes = list(enumerate_gm(audit_depth, (1, 6), budget, system))
        if not system.lacunary.canonical:
            nodes.append(flat_special(2, system.sigma, start=1))
        reports = [sgm_audit(nodes, system.sigma, prec)]
        results["audited"] = len(nodes)

        lambdas = list(spreading) if spreading is not None else [Fraction(1), Fraction(1)]
        sweep = [spreading_gap(lambdas, N, system, prec) for N in sorted(set(N_grid))]
        results["spreading"] = sweep
        bounds = [row["bound"] for row in sweep]
        monotone = [True if a == b else b.le(a) for a, b in zip(bounds, bounds[1:])]
        spread = HarnessReport(harness="spreading_gap")
        spread.add("bound_nonincreasing_in_N",
                   Verdict.combine(Verdict.from_certainty(m) for m in monotone) if monotone else Verdict.PASS)
        reports.append(spread)
        results["dual_spreading"] = dual_spreading_note(FiniteVector.from_coefficients(lambdas), N_grid, system, prec)
        return _envelope("gm", reports, results, system)

    # -- report ------------------------------------------------------------

    def full_report(self, config: SystemConfig, corpus: Optional[Sequence[FiniteVector]] = None,
                    seed: Optional[int] = None) -> CommandReport:
        rule = list(config.ks) if config.ks else [2, 4, 16]
        parts = [
            self.params_report(config),
            self.tree_report("(2:(3)(4))", ks=rule, lengths=(0, 1, 2)),
            self.operator_report(config, corpus, seed=seed),
            self.gm_report(config, corpus, seed=seed),
        ]
        verdict = Verdict.combine(Verdict(p.verdict) for p in parts)
        return CommandReport(
            command="report",
            system=parts[0].system,
            verdict=verdict.value,
            reports=[r for p in parts for r in p.reports],
            results={p.command: p.results for p in parts},
        )


# Global instance
run_service = RunService()
