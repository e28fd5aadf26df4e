"""
Seeded random corpora of rational vectors and corpus files
"""

import logging
from fractions import Fraction
from pathlib import Path
from typing import List, Optional, Tuple

import numpy as np

from app.config import settings
from app.services.errors import ConfigError, ParseError
from app.services.vectors import FiniteVector

logger = logging.getLogger(__name__)


def generate_corpus(size: Optional[int] = None, seed: Optional[int] = None, max_support: int = 6,
                    window: Tuple[int, int] = (1, 8), max_abs: int = 2, denominator: int = 4) -> List[FiniteVector]:
    """Random nonzero vectors with coefficients in [-max_abs, max_abs] on a 1/denominator grid"""
    size = settings.corpus_size if size is None else size
    seed = settings.default_seed if seed is None else seed
    rng = np.random.default_rng(seed)
    lo, hi = window
    indices = np.arange(lo, hi + 1)
    corpus = []
    while len(corpus) < size:
        count = int(rng.integers(1, min(max_support, len(indices)) + 1))
        chosen = np.sort(rng.choice(indices, size=count, replace=False))
        numerators = rng.integers(-max_abs * denominator, max_abs * denominator + 1, size=count)
        x = FiniteVector.from_mapping({int(i): Fraction(int(p), denominator) for i, p in zip(chosen, numerators)})
        if not x.is_zero():
            corpus.append(x)
    logger.debug(f"generated {size} vectors with seed {seed}")
    return corpus


def load_corpus(path: str) -> List[FiniteVector]:
    """One vector literal per line; blank lines and lines starting with # are skipped"""
    file_path = Path(path)
    if not file_path.exists():
        raise ConfigError(f"corpus file not found: {path}")
    corpus = []
    for number, line in enumerate(file_path.read_text(encoding="utf-8").splitlines(), start=1):
        text = line.strip()
        if not text or text.startswith("#"):
            continue
        try:
            corpus.append(FiniteVector.parse(text))
        except ParseError as e:
            raise ParseError(f"line {number}: {e.message}", e.column) from e
    logger.info(f"Loaded {len(corpus)} vectors from {path}")
    return corpus


def write_corpus(corpus: List[FiniteVector], path: str) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    Path(path).write_text("".join(f"{x.literal()}\n" for x in corpus), encoding="utf-8")
