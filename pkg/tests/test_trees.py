"""
Tree calculus, associated vectors and functionals, and norming certificates
"""

from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from app.models.harness_models import Verdict
from app.services.certificates import CertificateNode, certificate_violations, norming_certificate_check
from app.services.core_norms import norm_calculator
from app.services.errors import DomainError, MalformedCertificateError, ParseError, TreeStructureError
from app.services.intervals import NormInterval
from app.services.symcoeff import SymCoeff
from app.services.trees import (
    FinTree,
    TreeRule,
    associated_certificate,
    associated_functional,
    associated_vector,
    check_tree_vector_bound,
    level_decomposition,
    recombine,
    recursive_build,
)
from app.services.vectors import FiniteVector, pairing

SAMPLE = "(2:(3)(4))"


def random_trees():
    """Length-2 trees with small branching numbers"""
    return st.integers(min_value=1, max_value=4).flatmap(
        lambda k: st.lists(st.integers(min_value=1, max_value=5), min_size=k, max_size=k).map(
            lambda ks: FinTree.parse(f"({k}:" + "".join(f"({c})" for c in ks) + ")")))


def test_parse_and_render():
    tree = FinTree.parse(SAMPLE)
    assert tree.length == 2
    assert tree.k(()) == 2 and tree.k((2,)) == 4
    assert len(tree.leaves()) == 7
    assert tree.literal() == SAMPLE
    assert FinTree.parse("()").length == 0


@pytest.mark.parametrize("text", ["(2:(3))", "(0)", "(2:(1)(1)", "(x)", "(1)(1)"])
def test_parse_rejects_malformed_trees(text):
    with pytest.raises(ParseError):
        FinTree.parse(text)


def test_uneven_depth_is_rejected():
    with pytest.raises(TreeStructureError):
        FinTree.from_branching({(): 2, (1,): 2}, 2)


def test_alpha_and_beta_of_sample():
    tree = FinTree.parse(SAMPLE)
    leaf = (2, 4)
    # alpha = f(2)/2 * f(4)/4, beta = 1/(f(2) f(4))
    assert tree.alpha(leaf) == SymCoeff.f_power(2, 1, Fraction(1, 2)) * SymCoeff.f_power(4, 1, Fraction(1, 4))
    assert tree.beta(leaf) == SymCoeff.f_power(2, -1) * SymCoeff.f_power(4, -1)
    with pytest.raises(DomainError):
        tree.alpha((3, 1))


def test_pairing_of_associated_vector_and_functional_is_one():
    tree = FinTree.parse(SAMPLE)
    assert pairing(associated_functional(tree), associated_vector(tree)) == 1


def test_associated_certificate_is_valid_and_matches():
    tree = FinTree.parse(SAMPLE)
    certificate = associated_certificate(tree, offset=5)
    assert norming_certificate_check(certificate)
    assert certificate.functional() == associated_functional(tree, offset=5)


def test_norm_of_associated_vector_at_least_one():
    x = associated_vector(FinTree.parse(SAMPLE))
    assert NormInterval.exact(1, 128).certainly_le(norm_calculator.s_norm(x, 128))


def test_level_decomposition_recombines():
    tree = FinTree.parse(SAMPLE)
    x = associated_vector(tree)
    for k in range(tree.length + 1):
        assert recombine(level_decomposition(tree, k)) == x
    with pytest.raises(DomainError):
        level_decomposition(tree, 3)


def test_recursive_build_needs_successive_blocks():
    a, b = FiniteVector.basis(1), FiniteVector.basis(2)
    built = recursive_build([a, b], 2, dual=True)
    assert pairing(built, FiniteVector.flat(2)) == SymCoeff.f_power(2, -1, 2)
    with pytest.raises(DomainError):
        recursive_build([b, a], 2)


def test_tree_rule_reads_branching_in_order():
    rule = TreeRule([2, 4, 16])
    tree = rule.truncate(2)
    assert tree.k(()) == 2 and tree.k((1,)) == 4 and tree.k((2,)) == 16
    with pytest.raises(TreeStructureError):
        TreeRule([2, 2]).truncate(2)


def test_tree_vector_bound_for_toy_stream():
    report = check_tree_vector_bound([2, 4, 16], [0, 1, 2], 96)
    assert report.verdict == Verdict.PASS
    assert [c.name for c in report.checks] == [f"norm_at_most_2[length={L}]" for L in (0, 1, 2)]


def test_certificate_rules():
    good = CertificateNode.average([CertificateNode.leaf(1), CertificateNode.leaf(2)])
    assert not certificate_violations(good)
    overlapping = CertificateNode.average([CertificateNode.leaf(2), CertificateNode.leaf(1)])
    assert certificate_violations(overlapping)
    heavy = CertificateNode.convex([Fraction(3, 4), Fraction(1, 2)], [CertificateNode.leaf(1), CertificateNode.leaf(2)])
    assert certificate_violations(heavy)
    assert certificate_violations(CertificateNode.leaf(1, Fraction(3, 2)))


def test_certificate_from_dict():
    node = CertificateNode.from_dict({"kind": "average", "children": [
        {"kind": "leaf", "index": 1}, {"kind": "leaf", "index": 3, "coeff": "-1"}]})
    assert node.functional() == FiniteVector.from_mapping({1: SymCoeff.f_power(2, -1), 3: -SymCoeff.f_power(2, -1)})
    with pytest.raises(MalformedCertificateError):
        CertificateNode.from_dict({"kind": "spiral"})


@settings(max_examples=30, deadline=None)
@given(random_trees())
def test_alpha_beta_products_sum_to_one(tree):
    total = sum((tree.alpha(leaf) * tree.beta(leaf) for leaf in tree.leaves()), SymCoeff())
    assert total == 1
    assert pairing(associated_functional(tree), associated_vector(tree)) == 1
