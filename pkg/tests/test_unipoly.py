"""Univariate polynomial layer: evaluation, roots, certification, interpolation."""

import random
from fractions import Fraction

import pytest

from hyperdisc.errors import DuplicateNode, NotRealRooted, ZeroPolynomial
from hyperdisc.scalars import FLOAT, RATIONAL
from hyperdisc.unipoly import (
    UniPoly,
    eval_poly,
    interpolate,
    is_real_rooted,
    max_real_root,
    near_real_rooted,
    real_roots,
    square_free_decomposition,
    sturm_count_all_real,
)

X2_3X_2 = UniPoly.from_coeffs([2, -3, 1])  # (x-1)(x-2)


def test_eval_constant_term():
    assert eval_poly(X2_3X_2, 0) == 2


def test_eval_at_root():
    assert eval_poly(X2_3X_2, 1) == 0


def test_eval_zero_polynomial():
    assert eval_poly(UniPoly.zero(), 7) == 0


def test_real_roots_quadratic():
    roots = real_roots(X2_3X_2)
    assert roots == pytest.approx((2.0, 1.0))


def test_real_roots_double_root():
    p = UniPoly.from_coeffs([1, -2, 1])  # (x-1)^2
    roots = real_roots(p)
    assert len(roots) == 2
    assert roots[0] == pytest.approx(1.0, abs=1e-6)
    assert roots[1] == pytest.approx(1.0, abs=1e-6)


def test_real_roots_biquadratic():
    p = UniPoly.from_coeffs([4, 0, -5, 0, 1])  # (x^2-1)(x^2-4)
    assert real_roots(p) == pytest.approx((2.0, 1.0, -1.0, -2.0))


def test_real_roots_rejects_complex_pair():
    with pytest.raises(NotRealRooted):
        real_roots(UniPoly.from_coeffs([1, 0, 1]))


def test_real_roots_zero_poly_raises():
    with pytest.raises(ZeroPolynomial):
        real_roots(UniPoly.zero())


def test_real_roots_monomial_multiplicity():
    assert real_roots(UniPoly.from_coeffs([0, 0, 0, 5])) == (0.0, 0.0, 0.0)


def test_is_real_rooted_examples():
    assert is_real_rooted(X2_3X_2) is True
    assert is_real_rooted(UniPoly.from_coeffs([1, 0, 1])) is False
    assert is_real_rooted(UniPoly.from_coeffs([1, 2, 2])) is False  # 2t^2+2t+1


def test_is_real_rooted_zero_raises():
    with pytest.raises(ZeroPolynomial):
        is_real_rooted(UniPoly.zero())


def test_is_real_rooted_exact_on_rationals():
    # Double root is still real-rooted; rational backend verdict is exact.
    p = UniPoly.from_coeffs([Fraction(1), Fraction(-2), Fraction(1)])
    assert p.backend == RATIONAL
    assert is_real_rooted(p) is True


def test_interpolate_quadratic():
    p = interpolate([(0, 2), (1, 0), (2, 0)])
    assert p.coeffs == (Fraction(2), Fraction(-3), Fraction(1))


def test_interpolate_constant():
    p = interpolate([(0, Fraction(5, 3))])
    assert p.coeffs == (Fraction(5, 3),)


def test_interpolate_odd_symmetry():
    p = interpolate([(0, 0), (1, 1), (-1, -1)])
    assert p.coeffs == (Fraction(1),) or p.coeffs == (Fraction(0), Fraction(1))
    assert p(Fraction(7)) == 7


def test_interpolate_duplicate_abscissa():
    with pytest.raises(DuplicateNode):
        interpolate([(1, 2), (1, 3)])


def test_square_free_decomposition():
    # (x-1)^2 (x+2)
    p = UniPoly.from_roots([1, 1, -2], backend=RATIONAL)
    parts = square_free_decomposition(list(p.coeffs))
    mults = sorted(m for _, m in parts)
    assert mults == [1, 2]


def test_sturm_count():
    assert sturm_count_all_real([Fraction(-2), Fraction(0), Fraction(1)]) == 2  # x^2-2
    assert sturm_count_all_real([Fraction(1), Fraction(0), Fraction(1)]) == 0  # x^2+1


def test_roundtrip_interpolation_rational():
    rng = random.Random(7)
    for _ in range(25):
        deg = rng.randint(1, 12)
        roots = [Fraction(rng.randint(-6, 6), rng.randint(1, 4)) for _ in range(deg)]
        p = UniPoly.from_roots(roots, backend=RATIONAL)
        nodes = [(Fraction(i), p(Fraction(i))) for i in range(deg + 1)]
        q = interpolate(nodes, backend=RATIONAL)
        assert q.coeffs == p.coeffs


def test_roundtrip_interpolation_float():
    rng = random.Random(8)
    for _ in range(15):
        deg = rng.randint(1, 10)
        roots = [rng.uniform(-3, 3) for _ in range(deg)]
        p = UniPoly.from_roots(roots, backend=FLOAT)
        off = deg // 2  # symmetric integer nodes keep the system well conditioned
        nodes = [(float(i - off), p(float(i - off))) for i in range(deg + 1)]
        q = interpolate(nodes, backend=FLOAT)
        scale = max(abs(c) for c in p.coeffs)
        for a, b in zip(q.coeffs, p.coeffs):
            assert abs(a - b) <= 1e-10 * scale


def test_product_root_multiset_union():
    rng = random.Random(9)
    for _ in range(20):
        r1 = sorted(rng.sample(range(-8, 9), rng.randint(1, 4)))
        r2 = sorted(rng.sample(range(-8, 9), rng.randint(1, 4)))
        p = UniPoly.from_roots(r1, backend=RATIONAL)
        q = UniPoly.from_roots(r2, backend=RATIONAL)
        got = real_roots(p * q)
        expect = sorted(r1 + r2, reverse=True)
        # Repeated roots across the two factors are only sqrt(eps)-accurate.
        assert got == pytest.approx(tuple(float(v) for v in expect), abs=5e-7)


def test_is_real_rooted_agrees_with_random_products():
    rng = random.Random(10)
    for _ in range(300):
        deg = rng.randint(1, 6)
        roots = [Fraction(rng.randint(-20, 20), rng.randint(1, 5)) for _ in range(deg)]
        p = UniPoly.from_roots(roots, backend=RATIONAL)
        assert is_real_rooted(p) is True
    for _ in range(100):
        # Positive-definite quadratic times a real-rooted tail.
        b = rng.randint(-5, 5)
        c = rng.randint(1, 9) + b * b  # discriminant 4b^2-4c < 0
        quad = UniPoly.from_coeffs([c, 2 * b, 1])
        tail = UniPoly.from_roots([rng.randint(-4, 4)], backend=RATIONAL)
        assert is_real_rooted(quad * tail) is False


def test_max_real_root():
    assert max_real_root(X2_3X_2) == pytest.approx(2.0)


def test_near_real_rooted_fast_path():
    p = UniPoly.from_roots([0.5, -1.5, 2.5], backend=FLOAT)
    assert near_real_rooted(p.float_coeffs())
    assert not near_real_rooted(UniPoly.from_coeffs([1.0, 0.0, 1.0]).float_coeffs())


def test_compose_xsquare():
    p = UniPoly.from_coeffs([Fraction(-1), Fraction(1)])  # x - 1
    assert p.compose_xsquare().coeffs == (Fraction(-1), Fraction(0), Fraction(1))


def test_clustered_roots_fallback():
    # Exact rational poly with a tight cluster: (x-1)(x-1-1/2^20)(x+3)
    eps = Fraction(1, 2 ** 20)
    p = UniPoly.from_roots([Fraction(1), 1 + eps, Fraction(-3)], backend=RATIONAL)
    roots = real_roots(p, tol=1e-12)
    assert len(roots) == 3
    assert roots[2] == pytest.approx(-3.0, abs=1e-9)
    assert abs(roots[0] - roots[1]) == pytest.approx(float(eps), rel=0.2)
