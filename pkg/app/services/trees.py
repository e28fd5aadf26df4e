"""
Finitely branching trees and their associated vectors and functionals

A node is a tuple of positive integers; the root is (). k_mu is the branching number of
an internal node and every maximal node has the same length. For a leaf mu

    alpha(mu) = prod_{nu < mu} f(k_nu) / k_nu        beta(mu) = prod_{nu < mu} 1 / f(k_nu)

and a placement n(mu), strictly increasing in the lexicographic order of the leaves,
gives the associated vector  sum alpha(mu) e_n(mu)  and functional  sum beta(mu) e*_n(mu).
"""

import logging
from dataclasses import dataclass
from functools import cached_property
from fractions import Fraction
from typing import Callable, Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple, Union

from app.models.harness_models import HarnessReport, IntervalModel, Verdict
from app.services.certificates import CertificateNode
from app.services.core_norms import norm_calculator
from app.services.errors import DomainError, ParseError, TreeStructureError
from app.services.intervals import raw_le, raw_point
from app.services.symcoeff import Scalar, SymCoeff
from app.services.vectors import FiniteVector, is_successive, pairing, sum_vectors

logger = logging.getLogger(__name__)

Node = Tuple[int, ...]
ROOT: Node = ()


@dataclass(frozen=True)
class FinTree:
    """Finite tree given by the branching numbers of its internal nodes"""

    branching_items: Tuple[Tuple[Node, int], ...]
    length: int

    def __post_init__(self):
        branching = dict(self.branching_items)
        if self.length < 0:
            raise TreeStructureError(f"tree length must be >= 0, got {self.length}")
        expected = set()
        frontier = [ROOT] if self.length > 0 else []
        while frontier:
            node = frontier.pop()
            expected.add(node)
            k = branching.get(node)
            if k is None:
                raise TreeStructureError(f"node {node} at depth {len(node)} < {self.length} has no branching number")
            if not isinstance(k, int) or k < 1:
                raise TreeStructureError(f"branching number of {node} must be >= 1, got {k}")
            if len(node) + 1 < self.length:
                frontier.extend(node + (i,) for i in range(1, k + 1))
        extra = set(branching) - expected
        if extra:
            raise TreeStructureError(f"branching given for nodes outside the tree: {sorted(extra)}")

    # -- constructors ------------------------------------------------------

    @classmethod
    def from_branching(cls, branching: Mapping[Node, int], length: Optional[int] = None) -> "FinTree":
        if length is None:
            length = _depth(branching)
        items = tuple(sorted(((tuple(n), int(k)) for n, k in branching.items()), key=lambda it: _shortlex(it[0])))
        return cls(items, length)

    @classmethod
    def single(cls) -> "FinTree":
        """The length-0 tree {()}"""
        return cls((), 0)

    @classmethod
    def parse(cls, text: str) -> "FinTree":
        """Parse nested branching literals: ``()``, ``(3)``, ``(2:(3)(4))``"""
        parser = _TreeParser(text)
        branching = parser.parse()
        return cls.from_branching(branching, _depth(branching))

    # -- structure ---------------------------------------------------------

    @cached_property
    def branching(self) -> Dict[Node, int]:
        return dict(self.branching_items)

    def k(self, node: Node) -> int:
        try:
            return self.branching[tuple(node)]
        except KeyError:
            raise DomainError(f"{node} is not an internal node of the tree")

    def __contains__(self, node) -> bool:
        node = tuple(node)
        if len(node) > self.length:
            return False
        branching = self.branching
        for depth in range(len(node)):
            k = branching.get(node[:depth])
            if k is None or not 1 <= node[depth] <= k:
                return False
        return True

    def lex_iter(self) -> Iterator[Node]:
        """Nodes ordered by length, then lexicographically"""
        level = [ROOT]
        branching = self.branching
        for depth in range(self.length + 1):
            yield from level
            if depth == self.length:
                break
            level = [node + (i,) for node in level for i in range(1, branching[node] + 1)]

    def level(self, depth: int) -> List[Node]:
        return [n for n in self.lex_iter() if len(n) == depth]

    def leaves(self) -> List[Node]:
        return self.level(self.length)

    def truncate(self, L: int) -> "FinTree":
        """Keep nodes of length <= L"""
        if L < 0:
            raise DomainError(f"truncation length must be >= 0, got {L}")
        L = min(L, self.length)
        return FinTree(tuple((n, k) for n, k in self.branching_items if len(n) < L), L)

    def subtree(self, node: Node) -> "FinTree":
        """The tree rooted at node, re-indexed so node becomes ()"""
        node = tuple(node)
        if node not in self:
            raise DomainError(f"{node} is not in the tree")
        depth = len(node)
        items = tuple((n[depth:], k) for n, k in self.branching_items if n[:depth] == node)
        return FinTree(items, self.length - depth)

    # -- coefficient calculus ----------------------------------------------

    def alpha(self, node: Node) -> SymCoeff:
        node = tuple(node)
        if node not in self:
            raise DomainError(f"{node} is not in the tree")
        out = SymCoeff.rational(1)
        for depth in range(len(node)):
            k = self.branching[node[:depth]]
            out = out * SymCoeff.f_power(k, 1, Fraction(1, k))
        return out

    def beta(self, node: Node) -> SymCoeff:
        node = tuple(node)
        if node not in self:
            raise DomainError(f"{node} is not in the tree")
        out = SymCoeff.rational(1)
        for depth in range(len(node)):
            out = out * SymCoeff.f_power(self.branching[node[:depth]], -1)
        return out

    def literal(self) -> str:
        if self.length == 0:
            return "()"
        return _render(self.branching, ROOT, self.length)

    def to_dict(self) -> dict:
        return {"literal": self.literal(), "length": self.length, "leaves": len(self.leaves())}

    def __str__(self) -> str:
        return self.literal()


@dataclass(frozen=True)
class Placement:
    """Leaf -> basis index, strictly increasing along the lexicographic order"""

    indices: Tuple[Tuple[Node, int], ...]

    def __post_init__(self):
        last = 0
        for node, n in self.indices:
            if n <= last:
                raise TreeStructureError(f"placement is not strictly increasing at leaf {node}")
            last = n

    @classmethod
    def consecutive(cls, tree: FinTree, offset: int = 1) -> "Placement":
        return cls(tuple((leaf, offset + i) for i, leaf in enumerate(tree.leaves())))

    @classmethod
    def from_indices(cls, tree: FinTree, indices: Sequence[int]) -> "Placement":
        leaves = tree.leaves()
        if len(indices) != len(leaves):
            raise TreeStructureError(f"placement needs {len(leaves)} indices, got {len(indices)}")
        return cls(tuple(zip(leaves, (int(n) for n in indices))))

    def mapping(self) -> Dict[Node, int]:
        return dict(self.indices)

    def check_against(self, tree: FinTree) -> None:
        if [n for n, _ in self.indices] != tree.leaves():
            raise TreeStructureError("placement does not cover exactly the leaves of the tree")


def associated_vector(tree: FinTree, placement: Optional[Placement] = None, offset: int = 1) -> FiniteVector:
    placement = placement or Placement.consecutive(tree, offset)
    placement.check_against(tree)
    return FiniteVector.from_mapping({n: tree.alpha(leaf) for leaf, n in placement.indices})


def associated_functional(tree: FinTree, placement: Optional[Placement] = None, offset: int = 1) -> FiniteVector:
    placement = placement or Placement.consecutive(tree, offset)
    placement.check_against(tree)
    return FiniteVector.from_mapping({n: tree.beta(leaf) for leaf, n in placement.indices})


def associated_certificate(tree: FinTree, placement: Optional[Placement] = None, offset: int = 1) -> CertificateNode:
    """The (1/f(k))-formation tree of the associated functional"""
    placement = placement or Placement.consecutive(tree, offset)
    placement.check_against(tree)
    where = placement.mapping()
    branching = tree.branching

    def build(node: Node) -> CertificateNode:
        if len(node) == tree.length:
            return CertificateNode.leaf(where[node])
        return CertificateNode.average([build(node + (i,)) for i in range(1, branching[node] + 1)])

    return build(ROOT)


def recursive_build(blocks: Sequence[FiniteVector], k: int, dual: bool = False) -> FiniteVector:
    """(f(k)/k) sum x_i, or (1/f(k)) sum x*_i on the functional side, over k successive blocks"""
    if len(blocks) != k or k < 1:
        raise DomainError(f"recursive build needs exactly k = {k} blocks, got {len(blocks)}")
    if not is_successive(blocks):
        raise DomainError("blocks passed to the recursive build are not successive")
    factor = SymCoeff.f_power(k, -1) if dual else SymCoeff.f_power(k, 1, Fraction(1, k))
    return sum_vectors(blocks).scale(factor.simplify())


@dataclass(frozen=True)
class LevelTerm:
    node: Node
    coefficient: Scalar
    vector: FiniteVector

    def to_dict(self) -> dict:
        return {"node": list(self.node), "coefficient": repr(self.coefficient) if isinstance(self.coefficient, SymCoeff)
                else str(self.coefficient), "vector": self.vector.to_dict()}


def level_decomposition(tree: FinTree, k: int, placement: Optional[Placement] = None,
                        offset: int = 1) -> List[LevelTerm]:
    """x = sum_{|mu| = k} alpha(mu) x_mu, with x_mu associated to the subtree at mu"""
    if not 0 <= k <= tree.length:
        raise DomainError(f"level {k} is outside 0..{tree.length}")
    placement = placement or Placement.consecutive(tree, offset)
    placement.check_against(tree)
    where = placement.mapping()
    terms = []
    for node in tree.level(k):
        sub = tree.subtree(node)
        sub_placement = Placement.from_indices(sub, [where[node + leaf] for leaf in sub.leaves()])
        terms.append(LevelTerm(node, tree.alpha(node).simplify(), associated_vector(sub, sub_placement)))
    return terms


def recombine(terms: Iterable[LevelTerm]) -> FiniteVector:
    return sum_vectors(t.vector.scale(t.coefficient) for t in terms)


class TreeRule:
    """Infinite tree whose branching numbers are read from a stream in length-then-lex order"""

    def __init__(self, k_stream: Union[Sequence[int], Callable[[int], int]]):
        if callable(k_stream):
            self._k_at = k_stream
        else:
            values = [int(k) for k in k_stream]
            self._k_at = lambda i: _at(values, i)
        self._cache: List[int] = []

    def k_at(self, position: int) -> int:
        while len(self._cache) <= position:
            i = len(self._cache)
            k = int(self._k_at(i))
            if k < 1 or (self._cache and k <= self._cache[-1]):
                raise TreeStructureError(f"branching stream is not strictly increasing at position {i}")
            self._cache.append(k)
        return self._cache[position]

    def truncate(self, L: int) -> FinTree:
        """Finite tree of length L"""
        if L < 0:
            raise DomainError(f"truncation length must be >= 0, got {L}")
        branching: Dict[Node, int] = {}
        level = [ROOT]
        position = 0
        for _ in range(L):
            nxt = []
            for node in level:
                k = self.k_at(position)
                position += 1
                branching[node] = k
                nxt.extend(node + (i,) for i in range(1, k + 1))
            level = nxt
        return FinTree.from_branching(branching, L)


def check_tree_vector_bound(k_stream: Sequence[int], lengths: Sequence[int],
                            precision: Optional[int] = None) -> HarnessReport:
    """Measure ||x|| <= 2 for vectors associated to truncations of a rule tree"""
    report = HarnessReport(harness="tree_vector_bound")
    values = [int(k) for k in k_stream]
    for a, b in zip(values, values[1:]):
        if b <= a:
            raise TreeStructureError(f"branching stream must be strictly increasing: {a} then {b}")
    rule = TreeRule(values)
    two = raw_point(2, 64)
    for L in lengths:
        tree = rule.truncate(L)
        x = associated_vector(tree)
        xstar = associated_functional(tree)
        norm = norm_calculator.s_norm(x, precision)
        verdict = Verdict.from_certainty(raw_le(norm.raw, two))
        dual = norm_calculator.dual_lower_bound(xstar, x, precision)
        logger.debug(f"tree vector bound at length {L}: {norm}")
        report.add(
            f"norm_at_most_2[length={L}]",
            verdict,
            tree=tree.literal(),
            support=len(x),
            s_norm=IntervalModel.of(norm).model_dump(),
            pairing=str(pairing(xstar, x)),
            dual_lower_bound=IntervalModel.of(dual).model_dump(),
        )
    return report


# ---------------------------------------------------------------------------
# helpers
# ---------------------------------------------------------------------------

def _shortlex(node: Node):
    return len(node), node


def _depth(branching: Mapping[Node, int]) -> int:
    return 1 + max((len(n) for n in branching), default=-1)


def _at(values: List[int], i: int) -> int:
    if i >= len(values):
        raise TreeStructureError(f"branching stream exhausted after {len(values)} values")
    return values[i]


def _render(branching: Dict[Node, int], node: Node, length: int) -> str:
    k = branching[node]
    if len(node) + 1 == length:
        return f"({k})"
    return f"({k}:" + "".join(_render(branching, node + (i,), length) for i in range(1, k + 1)) + ")"


class _TreeParser:
    def __init__(self, text: str):
        self.text = text.replace(" ", "")
        self.pos = 0

    def parse(self) -> Dict[Node, int]:
        branching: Dict[Node, int] = {}
        if self.text == "()":
            return branching
        self._node(ROOT, branching)
        if self.pos != len(self.text):
            raise ParseError("trailing characters after tree literal", self.pos + 1)
        return branching

    def _expect(self, char: str) -> None:
        if self.pos >= len(self.text) or self.text[self.pos] != char:
            raise ParseError(f"expected {char!r}", self.pos + 1)
        self.pos += 1

    def _node(self, node: Node, branching: Dict[Node, int]) -> None:
        self._expect("(")
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        if start == self.pos:
            raise ParseError("expected a branching number", self.pos + 1)
        k = int(self.text[start:self.pos])
        if k < 1:
            raise ParseError("branching number must be >= 1", start + 1)
        branching[node] = k
        if self.pos < len(self.text) and self.text[self.pos] == ":":
            self.pos += 1
            count = 0
            while self.pos < len(self.text) and self.text[self.pos] == "(":
                count += 1
                self._node(node + (count,), branching)
            if count != k:
                raise ParseError(f"node with k = {k} lists {count} children", start + 1)
        self._expect(")")
