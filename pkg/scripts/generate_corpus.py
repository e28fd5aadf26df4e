#!/usr/bin/env python3
"""
Corpus Generation Script
Writes seeded random rational vectors, one literal per line, plus a CSV summary of their norms.
"""

import argparse
import logging
import sys
from pathlib import Path

import pandas as pd

sys.path.append(str(Path(__file__).resolve().parent.parent))

from app.config import settings
from app.services.core_norms import norm_calculator
from app.services.corpus import generate_corpus, write_corpus

# Setup logging
logging.basicConfig(level=logging.INFO, format='%(asctime)s - %(levelname)s - %(message)s')
logger = logging.getLogger(__name__)


class CorpusGenerator:
    """Generates a corpus file and its norm summary"""

    def __init__(self, output_file: str, size: int, seed: int, max_support: int, window: int):
        self.output_file = Path(output_file)
        self.size = size
        self.seed = seed
        self.max_support = max_support
        self.window = window

    def summary(self, corpus) -> pd.DataFrame:
        rows = []
        for x in corpus:
            norm = norm_calculator.s_norm(x)
            rows.append({
                "vector": x.literal(),
                "support": len(x),
                "s_norm_lo": str(norm.lo),
                "s_norm_hi": str(norm.hi),
                "attainer": str(norm_calculator.norm_attainer(x)),
            })
        return pd.DataFrame(rows)

    def run(self) -> None:
        corpus = generate_corpus(self.size, self.seed, self.max_support, (1, self.window))
        write_corpus(corpus, str(self.output_file))
        logger.info(f"Wrote {len(corpus)} vectors to {self.output_file}")
        summary_file = self.output_file.with_suffix(".csv")
        self.summary(corpus).to_csv(summary_file, index=False)
        logger.info(f"Wrote norm summary to {summary_file}")


def main():
    parser = argparse.ArgumentParser(description="Generate a seeded vector corpus")
    parser.add_argument("--out", default=f"{settings.output_dir}/corpus.txt")
    parser.add_argument("--size", type=int, default=settings.corpus_size)
    parser.add_argument("--seed", type=int, default=settings.default_seed)
    parser.add_argument("--max-support", type=int, default=6)
    parser.add_argument("--window", type=int, default=8, help="Indices are drawn from 1..window")
    args = parser.parse_args()

    try:
        CorpusGenerator(args.out, args.size, args.seed, args.max_support, args.window).run()
    except Exception as e:
        logger.error(f"Corpus generation failed: {e}")
        sys.exit(1)


if __name__ == "__main__":
    main()
