"""SR distributions: spanning trees, the marginal formula, resistance vectors."""

import random
from fractions import Fraction

import pytest

from hyperdisc.errors import DisconnectedGraph
from hyperdisc.graphs import Graph, complete_graph, diamond_graph, path_graph
from hyperdisc.hyperbolic import hyperbolic_trace, spectrum
from hyperdisc.srdist import (
    SRDistribution,
    condition_element,
    effective_resistance_family,
    marginal_via_enum,
    marginal_via_formula,
    max_marginal,
    product_distribution,
    uniform_spanning_tree,
)

K3 = complete_graph(3)


def test_ust_k3():
    mu = uniform_spanning_tree(K3)
    assert len(mu.support) == 3
    assert all(p == Fraction(1, 3) for _, p in mu.support)
    assert mu.d_mu == 2
    assert mu.stability is not None and mu.stability.passed


def test_ust_diamond_matches_fixture_monomials():
    mu = uniform_spanning_tree(diamond_graph())
    assert len(mu.support) == 8
    from hyperdisc.realstable import spanning_tree_polynomial
    poly = spanning_tree_polynomial(diamond_graph())
    got = {frozenset(elems) for elems, _ in mu.support}
    expect = {frozenset(i for i, e in enumerate(exps) if e) for exps in poly.terms}
    assert got == expect


def test_ust_path_is_point_mass():
    mu = uniform_spanning_tree(path_graph(3))
    assert len(mu.support) == 1
    assert mu.support[0][1] == 1


def test_ust_disconnected_raises():
    g = Graph(4, ((0, 1), (2, 3)))
    with pytest.raises(DisconnectedGraph):
        uniform_spanning_tree(g)


def test_marginal_enum_k3():
    mu = uniform_spanning_tree(K3)
    assert marginal_via_enum(mu, {0}, 1) == Fraction(2, 3)
    assert marginal_via_enum(mu, set(), 0) == 1


def test_marginal_enum_point_mass():
    mu = SRDistribution.from_support(3, [((0, 1), Fraction(1))])
    assert marginal_via_enum(mu, {0}, 2) == 0  # T cap [2] is {0,1}, not {0}
    assert marginal_via_enum(mu, {0, 1}, 2) == 1


def test_marginal_formula_k3():
    mu = uniform_spanning_tree(K3)
    assert marginal_via_formula(mu, {0}, 1, Fraction(1)) == Fraction(2, 3)
    assert marginal_via_formula(mu, set(), 0, Fraction(2)) == 1


def test_marginal_formula_diamond_edge5():
    mu = uniform_spanning_tree(diamond_graph())
    # Edge label 5 (index 4) appears in 4 of the 8 trees; observe just it.
    assert marginal_via_formula(mu, {4}, {4}, Fraction(2)) == Fraction(1, 2)
    assert marginal_via_enum(mu, {4}, {4}) == Fraction(1, 2)


def test_marginal_formula_matches_enum_everywhere():
    for graph in (K3, diamond_graph()):
        mu = uniform_spanning_tree(graph)
        for k in range(mu.n + 1):
            for mask in range(1 << k):
                s = {i for i in range(k) if mask >> i & 1}
                expect = marginal_via_enum(mu, s, k)
                for x0 in (Fraction(1), Fraction(2), Fraction(-1), Fraction(1, 2)):
                    assert marginal_via_formula(mu, s, k, x0) == expect


def test_marginals_sum_to_one():
    mu = uniform_spanning_tree(diamond_graph())
    for k in range(mu.n + 1):
        total = sum(marginal_via_enum(mu, {i for i in range(k) if mask >> i & 1}, k)
                    for mask in range(1 << k))
        assert total == 1


def test_marginal_formula_on_products_and_conditionings():
    rng = random.Random(31)
    base1 = uniform_spanning_tree(K3, stability_trials=0)
    base2 = uniform_spanning_tree(path_graph(3), stability_trials=0)
    for trial in range(8):
        mu = product_distribution(base1, base2)
        if rng.random() < 0.5:
            i = rng.randrange(mu.n)
            present = rng.random() < 0.5
            if any((i in elems) == present for elems, _ in mu.support):
                mu = condition_element(mu, i, present)
        k = rng.randint(0, min(mu.n, 4))
        for mask in range(1 << k):
            s = {i for i in range(k) if mask >> i & 1}
            expect = marginal_via_enum(mu, s, k)
            got = marginal_via_formula(mu, s, k, Fraction(2))
            assert got == expect


def test_max_marginal():
    assert max_marginal(uniform_spanning_tree(K3)) == Fraction(2, 3)
    point = SRDistribution.from_support(2, [((0,), Fraction(1))])
    assert max_marginal(point) == 1
    # Diamond graph: edges 1-4 sit in 5 of 8 trees, edge 5 in 4 of 8.
    assert max_marginal(uniform_spanning_tree(diamond_graph())) == Fraction(5, 8)


def test_heterogeneous_support_rejected():
    with pytest.raises(ValueError):
        SRDistribution.from_support(3, [((0,), Fraction(1, 2)), ((0, 1), Fraction(1, 2))])


def test_probabilities_must_sum_to_one():
    with pytest.raises(ValueError):
        SRDistribution.from_support(2, [((0,), Fraction(1, 3))])


def test_effective_resistance_k3():
    fam = effective_resistance_family(K3)
    assert fam.n == 3
    for vec in fam.vectors:
        assert spectrum(fam.h, vec).norm == pytest.approx(2 / 3, abs=1e-9)
    assert fam.eps2 == pytest.approx(2 / 3, abs=1e-9)


def test_effective_resistance_k4():
    fam = effective_resistance_family(complete_graph(4))
    for vec in fam.vectors:
        assert spectrum(fam.h, vec).norm == pytest.approx(1 / 2, abs=1e-9)


def test_effective_resistance_single_edge():
    fam = effective_resistance_family(path_graph(2))
    assert fam.n == 1
    assert fam.vectors[0] == pytest.approx((1.0,), abs=1e-9)
    assert fam.eps2 == pytest.approx(1.0, abs=1e-9)


def test_effective_resistance_trace_identity():
    # Foster: total effective resistance over edges is |V| - 1.
    for graph in (K3, complete_graph(4), diamond_graph(), path_graph(5)):
        fam = effective_resistance_family(graph)
        total = sum(float(hyperbolic_trace(fam.h, v)) for v in fam.vectors)
        assert total == pytest.approx(graph.n_vertices - 1, abs=1e-8)


def test_effective_resistance_rank_one():
    fam = effective_resistance_family(diamond_graph())
    for vec in fam.vectors:
        sp = spectrum(fam.h, vec)
        assert sp.rank == 1
        # Rank-1 cone vectors: norm equals trace.
        assert sp.norm == pytest.approx(sp.trace, abs=1e-9)
