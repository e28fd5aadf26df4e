"""
NormScope command line

Usage:
    python -m app.cli norm "1:1 2:1" --ell 2
    python -m app.cli tree "(2:(3)(4))"
    python -m app.cli params --system systems/honest.json
    python -m app.cli operator --corpus corpus.txt --ell-grid 2,4,8
    python -m app.cli gm --spreading --k 2 --N 1,2,8
    python -m app.cli report --seed 0 --out results/report.json --csv results/checks.csv

Reports are JSON with sorted keys. The exit status is 0 only when every hard check passes,
1 when one fails or stays undecided, and 2 on configuration or input errors.
"""

import argparse
import json
import logging
import sys
from fractions import Fraction
from pathlib import Path
from typing import List, Optional, Sequence

import pandas as pd
from pydantic import ValidationError

from app.config import settings
from app.models.norm_models import CommandReport
from app.models.parameter_models import RunConfig
from app.services.corpus import load_corpus
from app.services.errors import NormScopeError
from app.services.run_service import RunService

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_CONFIG = 2


def _int_list(text: str) -> List[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _fraction_list(text: str) -> List[Fraction]:
    try:
        return [Fraction(v.strip()) for v in text.split(",") if v.strip()]
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"expected comma-separated rationals, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="normscope", description="Certified norm computations")
    parser.add_argument("--precision", type=int, default=settings.precision_bits,
                        help="Output precision in bits (env NORMSCOPE_PRECISION_BITS)")
    parser.add_argument("--system", type=str, default=None, help="System file (JSON); toy system by default")
    parser.add_argument("--corpus", type=str, default=None, help="Corpus file, one vector literal per line")
    parser.add_argument("--seed", type=int, default=settings.default_seed, help="Seed for generated corpora")
    parser.add_argument("--out", type=str, default=None, help="Write the JSON report here instead of stdout")
    parser.add_argument("--csv", type=str, default=None, help="Also export the check table as CSV")
    parser.add_argument("--surrogate", action="store_true", help="Use the surrogate lacunary set")
    parser.add_argument("--workers", type=int, default=settings.workers, help="Corpus worker threads")
    parser.add_argument("--verbose", "-v", action="store_true", help="Debug logging on stderr")

    sub = parser.add_subparsers(dest="command", required=True)

    norm = sub.add_parser("norm", help="||x||, ||x||_l and |||x|||_r with witnesses")
    norm.add_argument("vector", type=str, help="Literal idx:num/den separated by single spaces")
    norm.add_argument("--ell", type=int, default=None)
    norm.add_argument("--r", type=str, default=None)

    tree = sub.add_parser("tree", help="Tree identities and the tree vector bound")
    tree.add_argument("tree", type=str, nargs="?", default=None, help="Nested literal such as (2:(3)(4))")
    tree.add_argument("--ks", type=_int_list, default=None, help="Branching stream, e.g. 2,4,16")
    tree.add_argument("--lengths", type=_int_list, default=[0, 1, 2])
    tree.add_argument("--offset", type=int, default=1)

    sub.add_parser("params", help="Growth conditions, epsilon budget, G, J and sigma checks")

    operator = sub.add_parser("operator", help="Block functionals, domination harnesses and the operator norm")
    operator.add_argument("--ell-grid", type=_int_list, default=[2, 4, 8])
    operator.add_argument("--slots", type=int, default=3)

    gm = sub.add_parser("gm", help="GM sandwich, decomposition audit and spreading sweep")
    gm.add_argument("--depth", type=int, default=2)
    gm.add_argument("--budget", type=int, default=200)
    gm.add_argument("--spreading", action="store_true", help="Sweep the spreading gap for k unit coefficients")
    gm.add_argument("--k", type=int, default=2)
    gm.add_argument("--lambdas", type=_fraction_list, default=None, help="Explicit coefficients, e.g. 1,-1/2")
    gm.add_argument("--N", type=_int_list, default=[1, 2, 8, 64])

    sub.add_parser("report", help="params, tree, operator and gm in one report")
    return parser


def _params(args: argparse.Namespace) -> dict:
    return {k: v for k, v in vars(args).items()
            if k not in {"precision", "system", "corpus", "seed", "out", "csv", "surrogate", "workers",
                         "verbose", "command"}}


def run(args: argparse.Namespace) -> CommandReport:
    run_config = RunConfig(command=args.command, precision_bits=args.precision, system_path=args.system,
                           corpus_path=args.corpus, seed=args.seed, out=args.out, surrogate=args.surrogate,
                           params=_params(args))
    service = RunService(workers=args.workers)
    corpus = load_corpus(run_config.corpus_path) if run_config.corpus_path else None
    p = run_config.params

    if args.command == "norm":
        return service.norm_report(p["vector"], p["ell"], p["r"], run_config.precision_bits)
    if args.command == "tree":
        ks = p["ks"]
        if p["tree"] is None and ks is None:
            ks = [2, 4, 16]
        return service.tree_report(p["tree"], ks, p["lengths"], p["offset"], run_config.precision_bits)

    config = run_config.system()
    if args.command == "params":
        return service.params_report(config)
    if args.command == "operator":
        return service.operator_report(config, corpus, p["ell_grid"], p["slots"], run_config.seed)
    if args.command == "gm":
        lambdas = p["lambdas"]
        if lambdas is None and p["spreading"]:
            lambdas = [Fraction(1)] * p["k"]
        return service.gm_report(config, corpus, p["depth"], p["budget"], spreading=lambdas, N_grid=p["N"],
                                 seed=run_config.seed)
    return service.full_report(config, corpus, run_config.seed)


def check_table(report: CommandReport) -> pd.DataFrame:
    rows = []
    for harness in report.reports:
        for check in harness.get("checks", []):
            rows.append({
                "harness": harness["harness"],
                "check": check["name"],
                "verdict": check["verdict"],
                "hard": check["hard"],
                "conditional": check["conditional"],
            })
    return pd.DataFrame(rows, columns=["harness", "check", "verdict", "hard", "conditional"])


def emit(report: CommandReport, out: Optional[str], csv_path: Optional[str]) -> None:
    text = json.dumps(report.model_dump(mode="json"), indent=2, sort_keys=True) + "\n"
    if out:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        Path(out).write_text(text, encoding="utf-8")
        logger.info(f"Report written to {out}")
    else:
        sys.stdout.write(text)
    if csv_path:
        Path(csv_path).parent.mkdir(parents=True, exist_ok=True)
        check_table(report).to_csv(csv_path, index=False)


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO,
                        format='%(asctime)s - %(levelname)s - %(message)s', stream=sys.stderr)
    try:
        report = run(args)
    except (NormScopeError, ValidationError) as e:
        logger.error(f"{type(e).__name__}: {e}")
        return EXIT_CONFIG
    emit(report, args.out, args.csv)
    return EXIT_OK if report.verdict == "pass" else EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
