"""Dense univariate polynomials with exact real-root certification.

Coefficients are stored in ascending degree order over one of two scalar
backends (exact rationals or binary64).  Root extraction runs companion
eigenvalues with Newton polish and falls back to exact Sturm bisection when
the residual test disagrees; real-rootedness verdicts are always certified
by an exact Sturm count (any binary64 coefficient vector is a rational
vector, so the exact route is available on both backends).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from . import _kernels
from .errors import DuplicateNode, NotRealRooted, ZeroPolynomial
from .scalars import DEFAULT_TOL, FLOAT, RATIONAL, coerce, infer_backend, join_backend

# Multiplicity-expanded real roots, non-increasing order.
RootList = tuple

_NEWTON_POLISH_ITERS = 12


@dataclass(frozen=True)
class UniPoly:
    """Polynomial sum(coeffs[i] * x^i); trailing zeros are stripped."""

    coeffs: tuple
    backend: str

    @staticmethod
    def from_coeffs(coeffs: Iterable, backend: str | None = None) -> "UniPoly":
        seq = list(coeffs)
        if backend is None:
            backend = infer_backend(seq)
        seq = [coerce(c, backend) for c in seq]
        while seq and seq[-1] == 0:
            seq.pop()
        return UniPoly(tuple(seq), backend)

    @staticmethod
    def zero(backend: str = RATIONAL) -> "UniPoly":
        return UniPoly((), backend)

    @staticmethod
    def constant(c, backend: str | None = None) -> "UniPoly":
        return UniPoly.from_coeffs([c], backend)

    @staticmethod
    def identity(backend: str = RATIONAL) -> "UniPoly":
        """The polynomial x."""
        return UniPoly.from_coeffs([0, 1], backend)

    @staticmethod
    def from_roots(roots: Sequence, backend: str = FLOAT, lead=1) -> "UniPoly":
        p = UniPoly.constant(lead, backend)
        for r in roots:
            p = p * UniPoly.from_coeffs([-r, 1], backend)
        return p

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def leading(self):
        if self.is_zero:
            raise ZeroPolynomial("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    def __call__(self, t):
        t = coerce(t, self.backend) if not isinstance(t, float) else t
        acc = coerce(0, self.backend)
        for c in reversed(self.coeffs):
            acc = acc * t + c
        return acc

    def __add__(self, other: "UniPoly") -> "UniPoly":
        backend = join_backend(self.backend, other.backend)
        n = max(len(self.coeffs), len(other.coeffs))
        a = list(self.coeffs) + [0] * (n - len(self.coeffs))
        b = list(other.coeffs) + [0] * (n - len(other.coeffs))
        return UniPoly.from_coeffs([x + y for x, y in zip(a, b)], backend)

    def __sub__(self, other: "UniPoly") -> "UniPoly":
        return self + (-other)

    def __neg__(self) -> "UniPoly":
        return UniPoly(tuple(-c for c in self.coeffs), self.backend)

    def __mul__(self, other: "UniPoly") -> "UniPoly":
        backend = join_backend(self.backend, other.backend)
        if self.is_zero or other.is_zero:
            return UniPoly.zero(backend)
        out = [coerce(0, backend)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return UniPoly.from_coeffs(out, backend)

    def scale(self, c) -> "UniPoly":
        return UniPoly.from_coeffs([c * x for x in self.coeffs], None if isinstance(c, float) else self.backend)

    def derivative(self) -> "UniPoly":
        return UniPoly.from_coeffs(
            [i * c for i, c in enumerate(self.coeffs)][1:], self.backend
        )

    def compose_xsquare(self) -> "UniPoly":
        """p(x^2): coefficients spread onto even degrees."""
        out = [coerce(0, self.backend)] * (2 * len(self.coeffs))
        for i, c in enumerate(self.coeffs):
            out[2 * i] = c
        return UniPoly.from_coeffs(out, self.backend)

    def shift_degree(self, k: int) -> "UniPoly":
        """p(x) * x^k."""
        if self.is_zero:
            return self
        return UniPoly.from_coeffs([coerce(0, self.backend)] * k + list(self.coeffs), self.backend)

    def to_float(self) -> "UniPoly":
        return UniPoly.from_coeffs([float(c) for c in self.coeffs], FLOAT)

    def float_coeffs(self) -> np.ndarray:
        return np.array([float(c) for c in self.coeffs], dtype=float)

    def monic(self) -> "UniPoly":
        lc = self.leading
        return UniPoly.from_coeffs([c / lc for c in self.coeffs], self.backend)

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"UniPoly({list(self.coeffs)!r}, {self.backend!r})"


def eval_poly(p: UniPoly, t):
    """Horner-scheme value of p at t (0 for the zero polynomial)."""
    if p.is_zero:
        return coerce(0, p.backend)
    return p(t)


# ---------------------------------------------------------------------------
# Exact machinery over Fractions (dense ascending coefficient lists).
# ---------------------------------------------------------------------------

def _exact_coeffs(p: UniPoly) -> list:
    return [Fraction(c) for c in p.coeffs]


def _strip(c: list) -> list:
    while c and c[-1] == 0:
        c.pop()
    return c


def _deriv(c: list) -> list:
    return [i * x for i, x in enumerate(c)][1:]


def _normalize_sign_free(c: list) -> list:
    """Divide by |leading| so remainder-sequence coefficients stay tame."""
    if not c:
        return c
    lead = abs(c[-1])
    return [x / lead for x in c]


def _poly_rem(a: list, b: list) -> list:
    """Remainder of a by b over Fractions."""
    r = list(a)
    db, lb = len(b) - 1, b[-1]
    while len(r) - 1 >= db and _strip(r):
        if not r:
            break
        shift = len(r) - 1 - db
        q = r[-1] / lb
        for i in range(len(b)):
            r[shift + i] -= q * b[i]
        r.pop()
        _strip(r)
    return r


def _poly_divmod(a: list, b: list) -> tuple:
    q = [Fraction(0)] * max(1, len(a) - len(b) + 1)
    r = list(a)
    db, lb = len(b) - 1, b[-1]
    while len(r) - 1 >= db and _strip(r):
        if not r:
            break
        shift = len(r) - 1 - db
        c = r[-1] / lb
        q[shift] = c
        for i in range(len(b)):
            r[shift + i] -= c * b[i]
        r.pop()
        _strip(r)
    return _strip(q), _strip(r)


def _poly_gcd(a: list, b: list) -> list:
    a, b = _strip(list(a)), _strip(list(b))
    while b:
        a, b = b, _poly_rem(a, b)
        b = _normalize_sign_free(_strip(b))
    if not a:
        return []
    return [x / a[-1] for x in a]  # monic


def _exact_div(a: list, b: list) -> list:
    q, r = _poly_divmod(a, b)
    if r:
        raise ArithmeticError("exact polynomial division left a remainder")
    return q


def square_free_decomposition(c: list) -> list:
    """Yun's algorithm: returns [(factor, multiplicity)] with factors monic."""
    c = _strip([Fraction(x) for x in c])
    if len(c) <= 1:
        return []
    c = [x / c[-1] for x in c]
    dp = _deriv(c)
    a = _poly_gcd(c, dp)
    if len(a) == 1:
        return [(c, 1)]
    b = _exact_div(c, a)
    d = [x - y for x, y in
         zip(_exact_div(dp, a) + [Fraction(0)] * len(b), _deriv(b) + [Fraction(0)] * len(b))]
    d = _strip(d)
    out = []
    i = 1
    while len(b) > 1:
        a = _poly_gcd(b, d)
        if len(a) > 1:
            out.append((a, i))
        b = _exact_div(b, a)
        cpart = _exact_div(d, a) if d else []
        nb = _deriv(b)
        n = max(len(cpart), len(nb))
        d = _strip([ (cpart[j] if j < len(cpart) else Fraction(0)) -
                     (nb[j] if j < len(nb) else Fraction(0)) for j in range(n)])
        i += 1
    return out


def square_free_part(c: list) -> list:
    c = _strip([Fraction(x) for x in c])
    if len(c) <= 1:
        return c
    g = _poly_gcd(c, _deriv(c))
    if len(g) == 1:
        return c
    return _exact_div(c, g)


def _sturm_chain(c: list) -> list:
    chain = [list(c), _deriv(c)]
    while len(chain[-1]) > 1:
        r = _poly_rem(chain[-2], chain[-1])
        r = _normalize_sign_free(_strip(r))
        if not r:
            break
        chain.append([-x for x in r])
    if chain[-1] == []:
        chain.pop()
    return chain


def _sign(x) -> int:
    return (x > 0) - (x < 0)


def _variations(signs: list) -> int:
    nz = [s for s in signs if s != 0]
    return sum(1 for a, b in zip(nz, nz[1:]) if a != b)


def _variations_at(chain: list, t: Fraction) -> int:
    signs = []
    for poly in chain:
        acc = Fraction(0)
        for c in reversed(poly):
            acc = acc * t + c
        signs.append(_sign(acc))
    return _variations(signs)


def sturm_count_all_real(c: list) -> int:
    """Number of distinct real roots of a square-free exact polynomial."""
    c = _strip([Fraction(x) for x in c])
    if len(c) <= 1:
        return 0
    chain = _sturm_chain(c)
    at_plus = [_sign(p[-1]) for p in chain]
    at_minus = [_sign(p[-1]) * (-1 if (len(p) - 1) % 2 else 1) for p in chain]
    return _variations(at_minus) - _variations(at_plus)


def _cauchy_bound(c: list) -> Fraction:
    lead = abs(c[-1])
    return 1 + max(abs(x) for x in c[:-1]) / lead if len(c) > 1 else Fraction(1)


def _isolate_roots(c: list) -> list:
    """Disjoint intervals (a, b] each holding one root of square-free c.

    Exact rational midpoints hit by chance are returned as degenerate
    intervals (r, r].
    """
    chain = _sturm_chain(c)
    bound = _cauchy_bound(c)
    total = _variations_at(chain, -bound) - _variations_at(chain, bound)
    work = [(-bound, bound, total)]
    done = []
    while work:
        a, b, cnt = work.pop()
        if cnt == 0:
            continue
        if cnt == 1:
            done.append((a, b))
            continue
        mid = (a + b) / 2
        val = Fraction(0)
        for x in reversed(c):
            val = val * mid + x
        if val == 0:
            done.append((mid, mid))
            # Shrink the flanks until they capture the cnt-1 remaining roots.
            eps = (b - a) / (4 * cnt)
            while True:
                left = _variations_at(chain, a) - _variations_at(chain, mid - eps)
                right = _variations_at(chain, mid + eps) - _variations_at(chain, b)
                if left + right == cnt - 1:
                    break
                eps /= 2
            work.append((a, mid - eps, left))
            work.append((mid + eps, b, right))
            continue
        vm = _variations_at(chain, mid)
        left = _variations_at(chain, a) - vm
        work.append((a, mid, left))
        work.append((mid, b, cnt - left))
    return done


def _refine_root(c: list, a: Fraction, b: Fraction, chain: list) -> float:
    """Sign bisection to ~1e-6 width, then float Newton from the midpoint.

    The interval (a, b] holds exactly one (simple) root; ``a`` itself may be
    a root of a sibling interval, in which case the bracket is first walked
    inward using the Sturm chain until the endpoint sign is usable.
    """
    if a == b:
        return float(a)

    def val(t: Fraction) -> Fraction:
        acc = Fraction(0)
        for x in reversed(c):
            acc = acc * t + x
        return acc

    if val(b) == 0:
        return float(b)
    fa = val(a)
    guard = 0
    while fa == 0 and guard < 80:
        m = (a + b) / 2
        fm = val(m)
        if fm == 0:
            return float(m)
        if _variations_at(chain, a) - _variations_at(chain, m) == 0:
            a, fa = m, fm
        else:
            b = m
        guard += 1
    if fa == 0:
        return float((a + b) / 2)
    for _ in range(30):
        if float(b - a) <= 1e-6 * max(1.0, abs(float(a)), abs(float(b))):
            break
        mid = (a + b) / 2
        fm = val(mid)
        if fm == 0:
            return float(mid)
        if (_sign(fm) == _sign(fa)):
            a, fa = mid, fm
        else:
            b = mid
    cf = np.array([float(x) for x in c])
    dcf = np.array([float(x) for x in _deriv(c)]) if len(c) > 1 else np.zeros(1)
    r = _kernels.newton_polish(cf, dcf, np.array([float((a + b) / 2)]), _NEWTON_POLISH_ITERS)
    r0 = float(r[0])
    if float(a) - 1e-9 <= r0 <= float(b) + 1e-9:
        return r0
    return float((a + b) / 2)


def _exact_real_roots(p: UniPoly) -> tuple:
    """All real roots with multiplicity via Yun + Sturm; certifies the count."""
    coeffs = _exact_coeffs(p)
    roots = []
    for factor, mult in square_free_decomposition(coeffs):
        deg = len(factor) - 1
        cnt = sturm_count_all_real(factor)
        if cnt < deg:
            raise NotRealRooted(
                f"exact Sturm count {cnt} < factor degree {deg}; polynomial is not real-rooted"
            )
        chain = _sturm_chain(factor)
        for a, b in _isolate_roots(factor):
            r = _refine_root(factor, a, b, chain)
            roots.extend([r] * mult)
    return tuple(sorted(roots, reverse=True))


# ---------------------------------------------------------------------------
# Public root operations.
# ---------------------------------------------------------------------------

def _companion_roots(c: np.ndarray) -> np.ndarray:
    return np.roots(c[::-1])


def real_roots(p: UniPoly, tol: float = DEFAULT_TOL) -> RootList:
    """All real roots of p with multiplicity, sorted non-increasing.

    Primary path: companion-matrix eigenvalues with Newton polish, accepted
    when every root r satisfies |p(r)| <= tol * max|c| * max(1, |r|)^deg.
    On disagreement the exact Sturm route takes over and raises
    :class:`NotRealRooted` when the certified count falls short.
    """
    if p.is_zero:
        raise ZeroPolynomial("cannot extract roots of the zero polynomial")
    deg = p.degree
    if deg == 0:
        return ()
    c = p.float_coeffs()
    # Exact zero roots come from trailing zero coefficients.
    nzero = 0
    while nzero <= deg and c[nzero] == 0.0:
        nzero += 1
    zeros = (0.0,) * nzero
    if nzero == deg:
        return zeros
    cred = c[nzero:]
    scale = np.max(np.abs(cred))
    roots = _companion_roots(cred)
    imag_gate = max(tol, 1e-7)
    if np.all(np.abs(roots.imag) <= imag_gate * np.maximum(1.0, np.abs(roots))):
        cand = np.sort(roots.real)[::-1]
        dc = np.array([float(x) for x in _deriv(list(cred))]) if len(cred) > 1 else np.zeros(1)
        cand = _kernels.newton_polish(cred, dc, cand, _NEWTON_POLISH_ITERS)
        resid = np.abs(_kernels.horner_many(cred, cand))
        budget = tol * scale * np.maximum(1.0, np.abs(cand)) ** (deg - nzero)
        if np.all(resid <= budget):
            return tuple(sorted(list(cand) + list(zeros), reverse=True))
    reduced = UniPoly.from_coeffs(list(p.coeffs)[nzero:], p.backend)
    return tuple(sorted(list(_exact_real_roots(reduced)) + list(zeros), reverse=True))


def is_real_rooted(p: UniPoly, tol: float = DEFAULT_TOL) -> bool:
    """Certified real-rootedness via an exact Sturm count.

    The count runs on the square-free part (multiplicities cannot hide
    complex pairs there).  Under the rational backend the verdict is exact
    and ``tol`` is unused; under binary64 a failing exact verdict is
    retried against companion eigenvalues so that roots whose imaginary
    part is rounding noise still count as real.
    """
    if p.is_zero:
        raise ZeroPolynomial("the zero polynomial has no real-rootedness verdict")
    if p.degree == 0:
        return True
    sf = square_free_part(_exact_coeffs(p))
    ok = sturm_count_all_real(sf) == len(sf) - 1
    if ok or p.backend == RATIONAL:
        return ok
    roots = _companion_roots(p.float_coeffs())
    return bool(np.all(np.abs(roots.imag) <= tol * np.maximum(1.0, np.abs(roots))))


def near_real_rooted(coeffs_ascending: np.ndarray, tol: float = 1e-7) -> bool:
    """Fast uncertified predicate for the float lane (companion roots only)."""
    c = np.asarray(coeffs_ascending, dtype=float)
    while c.size and c[-1] == 0.0:
        c = c[:-1]
    if c.size <= 1:
        return c.size == 1
    roots = _companion_roots(c)
    return bool(np.all(np.abs(roots.imag) <= tol * np.maximum(1.0, np.abs(roots))))


def max_real_root(p: UniPoly, tol: float = DEFAULT_TOL) -> float:
    return real_roots(p, tol)[0]


def interpolate(nodes: Sequence, backend: str | None = None) -> UniPoly:
    """Unique polynomial of degree < len(nodes) through the given points.

    Newton divided differences; exact under the rational backend.
    """
    pts = list(nodes)
    xs = [x for x, _ in pts]
    if len(set(xs)) != len(xs):
        raise DuplicateNode("interpolation abscissae must be pairwise distinct")
    if backend is None:
        backend = infer_backend([v for pair in pts for v in pair])
    xs = [coerce(x, backend) for x, _ in pts]
    ys = [coerce(y, backend) for _, y in pts]
    n = len(pts)
    table = list(ys)
    coeffs_newton = [table[0]]
    for level in range(1, n):
        for i in range(n - level):
            table[i] = (table[i + 1] - table[i]) / (xs[i + level] - xs[i])
        coeffs_newton.append(table[0])
    poly = UniPoly.zero(backend)
    basis = UniPoly.constant(1, backend)
    for i, c in enumerate(coeffs_newton):
        poly = poly + basis.scale(c)
        basis = basis * UniPoly.from_coeffs([-xs[i], 1], backend)
    if poly.is_zero:
        return UniPoly.zero(backend)
    return poly
