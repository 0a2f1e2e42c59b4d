"""Node polynomials, operator-form collapses, interlacing, descent."""

import random
from fractions import Fraction

import pytest

from hyperdisc.errors import EmptyBranch, TooLarge, ValueNotInSupport
from hyperdisc.graphs import complete_graph, diamond_graph
from hyperdisc.hyperbolic import determinant, lorentz
from hyperdisc.mixedchar import (
    AgFamily,
    KlsFamily,
    KlsInstance,
    RandomVar,
    SrInstance,
    ag_node_poly,
    ag_operator_form,
    ag_substitution_identity,
    common_interlacing_check,
    descend_family,
    kls_node_poly,
    kls_operator_form,
    linear_restriction_multipoly,
    pair_expectation,
    pair_operator,
)
from hyperdisc.realstable import stability_test
from hyperdisc.srdist import SRDistribution
from hyperdisc.unipoly import UniPoly, is_real_rooted, max_real_root

D1 = determinant(1)
RADEMACHER = RandomVar.rademacher()


def _scalar_instance(n: int, value=Fraction(1)) -> KlsInstance:
    return KlsInstance.build(D1, [(value,)] * n, [RADEMACHER] * n)


def _det_instance(rng: random.Random, mprime: int, n: int, kinds=("rademacher",)):
    h = determinant(mprime)
    vectors = []
    for _ in range(n):
        u = tuple(Fraction(rng.randint(-2, 2)) for _ in range(mprime))
        if all(c == 0 for c in u):
            u = (Fraction(1),) + (Fraction(0),) * (mprime - 1)
        vectors.append(h.vec_outer(u))
    variables = []
    for _ in range(n):
        kind = rng.choice(kinds)
        if kind == "rademacher":
            variables.append(RADEMACHER)
        elif kind == "biased":
            p = Fraction(rng.randint(1, 7), 8)
            variables.append(RandomVar((Fraction(1), Fraction(-1)), (p, 1 - p)))
        else:  # three-point
            a, b, c = Fraction(1, 4), Fraction(1, 2), Fraction(1, 4)
            variables.append(RandomVar((Fraction(-1), Fraction(0), Fraction(2)), (a, b, c)))
    return KlsInstance.build(h, vectors, variables)


_PYTHAGOREAN = [(3, 4, 5), (5, 12, 13), (8, 15, 17), (1, 0, 1), (0, 1, 1), (20, 21, 29)]


def _lorentz_instance(rng: random.Random, m: int, n: int) -> KlsInstance:
    h = lorentz(m)
    vectors = []
    for _ in range(n):
        a, b, c = _PYTHAGOREAN[rng.randrange(len(_PYTHAGOREAN))]
        vec = [Fraction(0)] * m
        spots = rng.sample(range(m - 1), 2)
        vec[spots[0]] = Fraction(a)
        vec[spots[1]] = Fraction(b)
        vec[m - 1] = Fraction(c)
        scale = Fraction(1, rng.randint(1, 3))
        vectors.append(tuple(scale * x for x in vec))
    return KlsInstance.build(h, vectors, [RADEMACHER] * n)


def test_kls_node_poly_toy_root():
    inst = _scalar_instance(1)
    assert kls_node_poly(inst).coeffs == (Fraction(-1), Fraction(0), Fraction(1))


def test_kls_node_poly_toy_leaf():
    inst = _scalar_instance(1)
    leaf = kls_node_poly(inst, (Fraction(1),))
    assert leaf.coeffs == (Fraction(-1, 2), Fraction(0), Fraction(1, 2))


def test_kls_node_poly_value_not_in_support():
    inst = _scalar_instance(1)
    with pytest.raises(ValueNotInSupport):
        kls_node_poly(inst, (Fraction(3),))


def test_kls_node_poly_guardrail():
    inst = _scalar_instance(13)
    with pytest.raises(TooLarge):
        kls_node_poly(inst)


def test_kls_operator_form_toy():
    inst = _scalar_instance(1)
    assert kls_operator_form(inst).coeffs == (Fraction(-1), Fraction(0), Fraction(1))


def test_kls_operator_form_zero_variance():
    inst = KlsInstance.build(
        D1, [(Fraction(1),)],
        [RandomVar((Fraction(5),), (Fraction(1),))])
    assert kls_operator_form(inst).coeffs == (Fraction(0), Fraction(0), Fraction(1))


def test_kls_operator_form_two_variables():
    inst = _scalar_instance(2)
    assert kls_operator_form(inst).coeffs == (Fraction(-2), Fraction(0), Fraction(1))
    assert kls_node_poly(inst).coeffs == (Fraction(-2), Fraction(0), Fraction(1))


def test_kls_operator_identity_random_instances():
    rng = random.Random(41)
    for trial in range(8):
        if trial % 2 == 0:
            inst = _det_instance(rng, rng.randint(1, 3), rng.randint(1, 4),
                                 kinds=("rademacher", "biased", "three"))
        else:
            inst = _lorentz_instance(rng, rng.randint(3, 5), rng.randint(1, 4))
        assert kls_node_poly(inst).coeffs == kls_operator_form(inst).coeffs


def test_ag_node_poly_toy():
    mu = SRDistribution.from_support(2, [((0,), Fraction(1, 2)), ((1,), Fraction(1, 2))])
    inst = SrInstance.build(D1, mu, [(Fraction(1, 2),), (Fraction(1, 2),)])
    assert ag_node_poly(inst).coeffs == (Fraction(-1, 2), Fraction(1))
    assert ag_node_poly(inst, (1,)).coeffs == (Fraction(-1, 4), Fraction(1, 2))


def test_ag_node_poly_empty_branch():
    mu = SRDistribution.from_support(2, [((0,), Fraction(1))])
    inst = SrInstance.build(D1, mu, [(Fraction(1),), (Fraction(0),)], validate=False)
    with pytest.raises(EmptyBranch):
        ag_node_poly(inst, (0,))


def test_ag_operator_form_toy():
    mu = SRDistribution.from_support(2, [((0,), Fraction(1, 2)), ((1,), Fraction(1, 2))])
    inst = SrInstance.build(D1, mu, [(Fraction(1, 2),), (Fraction(1, 2),)])
    assert ag_operator_form(inst).coeffs == (Fraction(-1, 2), Fraction(0), Fraction(1))


def test_ag_operator_form_point_mass_on_empty():
    mu = SRDistribution.from_support(1, [((), Fraction(1))])
    inst = SrInstance.build(D1, mu, [(Fraction(1),)], validate=False)
    assert ag_operator_form(inst).coeffs == (Fraction(0), Fraction(1))  # h(xe) = x


def test_ag_substitution_identity_toy():
    mu = SRDistribution.from_support(2, [((0,), Fraction(1, 2)), ((1,), Fraction(1, 2))])
    inst = SrInstance.build(D1, mu, [(Fraction(1, 2),), (Fraction(1, 2),)])
    lhs, rhs = ag_substitution_identity(inst)
    assert lhs.coeffs == rhs.coeffs == (Fraction(0), Fraction(-1, 2), Fraction(0), Fraction(1))


def test_ag_substitution_identity_spanning_trees():
    for graph in (complete_graph(3), diamond_graph()):
        inst = SrInstance.from_graph(graph, exact=True, stability_trials=0)
        lhs, rhs = ag_substitution_identity(inst)
        assert lhs.coeffs == rhs.coeffs


def test_pair_expectation_identity():
    rng = random.Random(43)
    h = determinant(2)
    for _ in range(6):
        u = tuple(Fraction(rng.randint(-2, 2)) for _ in range(2))
        v = h.vec_outer(u)
        var = RandomVar((Fraction(-1), Fraction(0), Fraction(2)),
                        (Fraction(1, 4), Fraction(1, 2), Fraction(1, 4)))
        x1 = tuple(Fraction(rng.randint(-3, 3)) for _ in range(h.m))
        x2 = tuple(Fraction(rng.randint(-3, 3)) for _ in range(h.m))
        assert pair_expectation(h, v, var, x1, x2) == pair_operator(h, v, var.variance, x1, x2)


def test_linear_restriction_is_real_stable():
    rng = random.Random(47)
    h = determinant(2)
    vectors = [h.vec_outer((Fraction(1), Fraction(0))),
               h.vec_outer((Fraction(1), Fraction(1)))]
    p = linear_restriction_multipoly(h, vectors)
    assert stability_test(p, trials=150, seed=3).passed
    del rng


def test_common_interlacing_pass():
    f1 = UniPoly.from_roots([1, 3], backend="rational")
    f2 = UniPoly.from_roots([2, 4], backend="rational")
    assert common_interlacing_check([f1, f2], samples=32, seed=0).ok


def test_common_interlacing_identical():
    f = UniPoly.from_roots([1, 2], backend="rational")
    assert common_interlacing_check([f, f], samples=8, seed=0).ok


def test_common_interlacing_refuted():
    f1 = UniPoly.from_coeffs([Fraction(1), Fraction(0), Fraction(1)])  # x^2 + 1
    f2 = UniPoly.from_roots([0, 5], backend="rational")
    verdict = common_interlacing_check([f1, f2], samples=16, seed=0)
    assert not verdict.ok
    assert verdict.witness_weights is not None


def test_common_interlacing_float_lane():
    f1 = UniPoly.from_roots([1.0, 3.0], backend="float")
    f2 = UniPoly.from_roots([2.0, 4.0], backend="float")
    assert common_interlacing_check([f1, f2], samples=32, seed=1).ok
    bad = UniPoly.from_coeffs([1.0, 0.0, 1.0])
    assert not common_interlacing_check([bad, f2], samples=16, seed=1).ok


def test_children_sum_to_parent():
    rng = random.Random(53)
    inst = _det_instance(rng, 2, 3)
    parent = kls_node_poly(inst, (Fraction(1),))
    kids = [kls_node_poly(inst, (Fraction(1), s)) for s in (Fraction(1), Fraction(-1))]
    total = kids[0] + kids[1]
    assert total.coeffs == parent.coeffs


def test_descend_family_symmetric_toy():
    inst = _scalar_instance(1)
    assignment, leaf = descend_family(inst, "kls")
    assert assignment in ((Fraction(1),), (Fraction(-1),))
    assert max_real_root(leaf) == pytest.approx(1.0)


def test_descend_family_cancelling_pair():
    inst = _scalar_instance(2)
    assignment, leaf = descend_family(inst, "kls")
    # Root polynomial x^2 - 2 has top root sqrt(2); the cancelling leaf wins.
    vals = sorted(assignment)
    assert vals == [Fraction(-1), Fraction(1)]
    assert max_real_root(leaf) == pytest.approx(0.0, abs=1e-9)


def test_descend_family_point_mass():
    mu = SRDistribution.from_support(2, [((0,), Fraction(1))])
    inst = SrInstance.build(D1, mu, [(Fraction(1),), (Fraction(0),)], validate=False)
    assignment, leaf = descend_family(inst, "ag")
    assert assignment == (1, 0)


def test_descend_family_soundness_random():
    rng = random.Random(59)
    for _ in range(4):
        inst = _det_instance(rng, 2, rng.randint(2, 4))
        root_top = max_real_root(kls_node_poly(inst))
        _, leaf = descend_family(inst, "kls")
        assert max_real_root(leaf) <= root_top + 1e-8 * max(1.0, abs(root_top))


def test_real_rootedness_at_every_node():
    rng = random.Random(61)
    inst = _det_instance(rng, 2, 3)
    prefixes = [()]
    for var in inst.variables:
        prefixes = [p + (s,) for p in prefixes for s in var.support] + prefixes
    for prefix in prefixes:
        assert is_real_rooted(kls_node_poly(inst, prefix))


def test_interlacing_at_internal_nodes():
    rng = random.Random(67)
    inst = _det_instance(rng, 2, 3)
    stack = [()]
    while stack:
        prefix = stack.pop()
        if len(prefix) == inst.n:
            continue
        kids = [kls_node_poly(inst, prefix + (s,))
                for s in inst.variables[len(prefix)].support]
        assert common_interlacing_check(kids, samples=16, seed=5).ok
        stack.extend(prefix + (s,) for s in inst.variables[len(prefix)].support)


def test_family_adapters():
    inst = _scalar_instance(2)
    fam = KlsFamily(inst)
    assert fam.degree == 2
    assert fam.root_max_root() == pytest.approx(2 ** 0.5)
    assert fam.leaf_norm((Fraction(1), Fraction(-1))) == pytest.approx(0.0, abs=1e-12)

    mu = SRDistribution.from_support(2, [((0,), Fraction(1, 2)), ((1,), Fraction(1, 2))])
    sr = SrInstance.build(D1, mu, [(Fraction(1, 2),), (Fraction(1, 2),)])
    afam = AgFamily(sr)
    assert afam.feasible((1,)) and afam.feasible((0,))
    assert not afam.feasible((1, 1))
    assert afam.leaf_norm((1, 0)) == pytest.approx(0.5)
