"""Hyperbolic polynomial instances and their spectral calculus.

A degree-d homogeneous polynomial h with h(e) > 0 is hyperbolic in
direction e when t -> h(te - x) is real-rooted for every real x.  The d
roots of that restriction are the hyperbolic eigenvalues of x; their sum,
largest magnitude and nonzero count give the hyperbolic trace, norm and
rank.  Four instance kinds are supported:

* ``determinant``: h = det on vectorized symmetric matrices, e = vec(I);
* ``lorentz``: h = x_m^2 - x_1^2 - ... - x_{m-1}^2, e = last basis vector;
* ``elem_sym``: the elementary symmetric polynomial e_k(x_1..x_n), e = 1;
* ``custom``: any homogeneous real-stable polynomial with a strictly
  positive direction (real stability makes every positive direction
  hyperbolic).

Restrictions along lines are exact: closed forms where available,
otherwise interpolation through the integer nodes 0..d, which keeps the
rational backend exact and the conditioning predictable.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ._exact import char_poly_exact, det_exact
from .errors import DimensionMismatch, NotRealRooted, RankTooHigh
from .realstable import MultiPoly
from .scalars import DEFAULT_TOL, FLOAT, RATIONAL, coerce, infer_backend
from .unipoly import RootList, UniPoly, interpolate, real_roots

RANK_TOL = 1e-8


def _is_float_vec(x) -> bool:
    return any(isinstance(v, float) for v in x)


class HyperbolicInstance:
    """Base class: subclasses provide value() and an exact line restriction."""

    kind: str
    m: int
    d: int
    e: tuple

    def value(self, x):
        raise NotImplementedError

    def restrict_line(self, base, dirv) -> UniPoly:
        """Exact univariate polynomial t -> h(base + t dirv)."""
        raise NotImplementedError

    def _interp_restrict(self, base, dirv) -> UniPoly:
        float_lane = _is_float_vec(base) or _is_float_vec(dirv)
        backend = FLOAT if float_lane else RATIONAL
        nodes = []
        for t in range(self.d + 1):
            point = tuple(b + t * w for b, w in zip(base, dirv))
            nodes.append((coerce(t, backend), coerce(self.value(point), backend)))
        return interpolate(nodes, backend=backend)

    def check_dim(self, x, name: str = "vector"):
        if len(x) != self.m:
            raise DimensionMismatch(f"{name} has length {len(x)}, expected {self.m}")

    def params(self) -> dict:
        raise NotImplementedError

    def __repr__(self) -> str:  # pragma: no cover
        return f"<{type(self).__name__} m={self.m} d={self.d}>"


class DeterminantInstance(HyperbolicInstance):
    """det on vectorized symmetric mprime x mprime matrices."""

    kind = "determinant"

    def __init__(self, mprime: int):
        if mprime < 1:
            raise ValueError("mprime must be >= 1")
        self.mprime = mprime
        self.m = mprime * (mprime + 1) // 2
        self.d = mprime
        self._pairs = [(i, j) for i in range(mprime) for j in range(i, mprime)]
        e = [0] * self.m
        for idx, (i, j) in enumerate(self._pairs):
            if i == j:
                e[idx] = 1
        self.e = tuple(e)

    def mat(self, x) -> list:
        a = [[0] * self.mprime for _ in range(self.mprime)]
        for idx, (i, j) in enumerate(self._pairs):
            a[i][j] = x[idx]
            a[j][i] = x[idx]
        return a

    def vec(self, a) -> tuple:
        return tuple(a[i][j] for (i, j) in self._pairs)

    def vec_outer(self, u) -> tuple:
        """vec(u u^T): a certified hyperbolic-rank-<=1 cone vector."""
        return tuple(u[i] * u[j] for (i, j) in self._pairs)

    def value(self, x):
        a = self.mat(x)
        if _is_float_vec(x):
            return float(np.linalg.det(np.array(a, dtype=float)))
        return det_exact(a)

    def restrict_line(self, base, dirv) -> UniPoly:
        self.check_dim(base, "base")
        self.check_dim(dirv, "direction")
        if tuple(dirv) == self.e:
            a = self.mat(base)
            if _is_float_vec(base):
                eigs = np.linalg.eigvalsh(np.array(a, dtype=float))
                coeffs_desc = np.poly(-eigs)  # det(tI + A)
                return UniPoly.from_coeffs(list(coeffs_desc[::-1]), FLOAT)
            neg = [[-x for x in row] for row in a]
            return UniPoly.from_coeffs(char_poly_exact(neg), RATIONAL)
        return self._interp_restrict(base, dirv)

    def params(self) -> dict:
        return {"kind": self.kind, "mprime": self.mprime}


class LorentzInstance(HyperbolicInstance):
    """x_m^2 - x_1^2 - ... - x_{m-1}^2, hyperbolic toward the last axis."""

    kind = "lorentz"

    def __init__(self, m: int):
        if m < 2:
            raise ValueError("the quadratic form needs m >= 2")
        self.m = m
        self.d = 2
        self.e = tuple([0] * (m - 1) + [1])

    def value(self, x):
        return x[-1] * x[-1] - sum(v * v for v in x[:-1])

    def restrict_line(self, base, dirv) -> UniPoly:
        self.check_dim(base, "base")
        self.check_dim(dirv, "direction")
        c2 = dirv[-1] * dirv[-1] - sum(w * w for w in dirv[:-1])
        c1 = 2 * (base[-1] * dirv[-1] - sum(b * w for b, w in zip(base[:-1], dirv[:-1])))
        c0 = self.value(base)
        backend = FLOAT if (_is_float_vec(base) or _is_float_vec(dirv)) else RATIONAL
        return UniPoly.from_coeffs([c0, c1, c2], backend)

    def params(self) -> dict:
        return {"kind": self.kind, "m": self.m}


class ElemSymInstance(HyperbolicInstance):
    """Elementary symmetric polynomial e_k over n variables, direction 1."""

    kind = "elem_sym"

    def __init__(self, n: int, k: int):
        if not (1 <= k <= n):
            raise ValueError("need 1 <= k <= n")
        self.n = n
        self.k = k
        self.m = n
        self.d = k
        self.e = (1,) * n

    def value(self, x):
        # Standard DP on prefix elementary symmetrics.
        row = [1] + [0] * self.k
        for v in x:
            for j in range(min(self.k, len(row) - 1), 0, -1):
                row[j] = row[j] + v * row[j - 1]
        return row[self.k]

    def restrict_line(self, base, dirv) -> UniPoly:
        self.check_dim(base, "base")
        self.check_dim(dirv, "direction")
        return self._interp_restrict(base, dirv)

    def params(self) -> dict:
        return {"kind": self.kind, "n": self.n, "k": self.k}


class RealStableInstance(HyperbolicInstance):
    """A homogeneous real-stable polynomial with a strictly positive direction."""

    kind = "custom"

    def __init__(self, poly: MultiPoly, e):
        if poly.is_zero:
            raise ValueError("zero polynomial is not hyperbolic")
        if not poly.is_homogeneous():
            raise ValueError("hyperbolic instances need a homogeneous polynomial")
        if len(e) != poly.nvars:
            raise DimensionMismatch("direction length does not match variable count")
        if not all(v > 0 for v in e):
            raise ValueError("custom instances need a strictly positive direction")
        self.poly = poly
        self.m = poly.nvars
        self.d = poly.total_degree()
        self.e = tuple(e)
        he = self.value(self.e)
        if not he > 0:
            raise ValueError("h(e) must be positive")
        self._spot_check_homogeneity()

    def _spot_check_homogeneity(self):
        rng = random.Random(20240917)
        for c in (2, -1):
            x = tuple(Fraction(rng.randint(-3, 3)) for _ in range(self.m))
            lhs = self.poly.eval(tuple(c * v for v in x))
            rhs = Fraction(c) ** self.d * self.poly.eval(x)
            if lhs != rhs:
                raise ValueError("polynomial failed the homogeneity spot check")

    def value(self, x):
        return self.poly.eval(tuple(x))

    def restrict_line(self, base, dirv) -> UniPoly:
        self.check_dim(base, "base")
        self.check_dim(dirv, "direction")
        return self._interp_restrict(base, dirv)

    def params(self) -> dict:
        return {"kind": self.kind, "nvars": self.m, "e": list(self.e)}


def determinant(mprime: int) -> DeterminantInstance:
    return DeterminantInstance(mprime)


def lorentz(m: int) -> LorentzInstance:
    return LorentzInstance(m)


def elem_sym(n: int, k: int) -> ElemSymInstance:
    return ElemSymInstance(n, k)


def real_stable_custom(poly: MultiPoly, e) -> RealStableInstance:
    return RealStableInstance(poly, e)


# ---------------------------------------------------------------------------
# Spectral calculus.
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Spectrum:
    eigenvalues: RootList  # descending, multiplicity-expanded, length d
    norm: float
    trace: float
    rank: int


@dataclass(frozen=True)
class ConeVerdict:
    status: str  # "interior" | "boundary" | "outside"
    witness: float  # smallest hyperbolic eigenvalue

    @property
    def in_closed_cone(self) -> bool:
        return self.status in ("interior", "boundary")


def restrict_line(h: HyperbolicInstance, base, dirv) -> UniPoly:
    return h.restrict_line(tuple(base), tuple(dirv))


def char_restriction(h: HyperbolicInstance, x) -> UniPoly:
    """t -> h(te - x), the characteristic restriction of x."""
    h.check_dim(x)
    return h.restrict_line(tuple(-v for v in x), h.e)


def spectrum(h: HyperbolicInstance, x, tol: float = DEFAULT_TOL) -> Spectrum:
    rest = char_restriction(h, x)
    try:
        eigs = real_roots(rest, tol)
    except NotRealRooted as exc:
        raise NotRealRooted(
            f"h(te - x) is not real-rooted for {h!r}; the instance is not "
            f"hyperbolic in direction e on this input ({exc})"
        ) from exc
    # Trace from the coefficient ratio (exact sum of roots), not from the
    # extracted floats.
    trace = float(-rest.coeffs[-2] / rest.coeffs[-1]) if rest.degree >= 1 else 0.0
    norm = max(eigs[0], -eigs[-1]) if eigs else 0.0
    gate = RANK_TOL * max(1.0, abs(eigs[0]), abs(eigs[-1])) if eigs else RANK_TOL
    rank = sum(1 for lam in eigs if abs(lam) > gate)
    return Spectrum(tuple(eigs), float(norm), trace, rank)


def hyperbolic_norm(h: HyperbolicInstance, x, tol: float = DEFAULT_TOL) -> float:
    return spectrum(h, x, tol).norm


def hyperbolic_trace(h: HyperbolicInstance, v):
    """Exact trace: sum of the roots of h(te - v) via the coefficient ratio."""
    rest = char_restriction(h, v)
    if rest.degree < 1:
        return coerce(0, rest.backend)
    return -rest.coeffs[-2] / rest.coeffs[-1]


def hyperbolic_rank(h: HyperbolicInstance, x, tol: float = RANK_TOL) -> int:
    sp = spectrum(h, x)
    gate = tol * max(1.0, sp.norm)
    return sum(1 for lam in sp.eigenvalues if abs(lam) > gate)


def cone_membership(h: HyperbolicInstance, x, tol: float = DEFAULT_TOL) -> ConeVerdict:
    sp = spectrum(h, x, tol)
    lam_min = sp.eigenvalues[-1] if sp.eigenvalues else 0.0
    gate = tol * max(1.0, abs(sp.eigenvalues[0]) if sp.eigenvalues else 1.0, abs(lam_min))
    if lam_min > gate:
        status = "interior"
    elif lam_min >= -gate:
        status = "boundary"
    else:
        status = "outside"
    return ConeVerdict(status, float(lam_min))


class DirectionalDerivative:
    """The functional x -> (D_v h)(x), evaluated via exact line restrictions.

    (D_v h)(x) is the t-derivative at 0 of h(x + t v), i.e. the degree-1
    coefficient of the restriction, so every evaluation is exact under the
    rational backend.
    """

    def __init__(self, h: HyperbolicInstance, v):
        h.check_dim(v, "direction")
        self.h = h
        self.v = tuple(v)

    def at(self, x):
        self.h.check_dim(x)
        rest = self.h.restrict_line(tuple(x), self.v)
        if rest.degree < 1:
            return coerce(0, rest.backend)
        return rest.coeffs[1]

    __call__ = at


def directional_derivative(h: HyperbolicInstance, v) -> DirectionalDerivative:
    return DirectionalDerivative(h, v)


def rank1_product_derivative(h: HyperbolicInstance, indices, vectors, x,
                             verify: bool = True):
    """(prod_{i in S} D_{v_i}) h(x) for hyperbolic-rank-1 directions.

    Because h is multilinear along rank-1 directions, the mixed derivative
    collapses to inclusion-exclusion over vertex sums:
    sum_{U subset S} (-1)^{|S|-|U|} h(x + sum_{i in U} v_i), which is exact.
    """
    h.check_dim(x)
    s = list(indices)
    if verify:
        for i in s:
            if hyperbolic_rank(h, vectors[i]) > 1:
                raise RankTooHigh(
                    f"vector {i} has hyperbolic rank > 1; the multilinear "
                    "inclusion-exclusion identity does not apply"
                )
    total = None
    for r in range(len(s) + 1):
        for combo in itertools.combinations(s, r):
            pt = list(x)
            for i in combo:
                for idx in range(h.m):
                    pt[idx] = pt[idx] + vectors[i][idx]
            val = h.value(tuple(pt))
            signed = val if (len(s) - r) % 2 == 0 else -val
            total = signed if total is None else total + signed
    return total


def derivative_restriction(h: HyperbolicInstance, vectors, indices,
                           cache: dict | None = None) -> UniPoly:
    """(prod_{i in S} D_{v_i}) h(x e) as a univariate polynomial in x.

    Inclusion-exclusion over the restrictions x -> h(x e + sum_{i in U} v_i);
    a shared cache keyed by U avoids recomputing restrictions across subsets.
    """
    s = tuple(sorted(indices))

    def restriction_for(combo: tuple) -> UniPoly:
        if cache is not None and combo in cache:
            return cache[combo]
        base = [0] * h.m
        for i in combo:
            for idx in range(h.m):
                base[idx] = base[idx] + vectors[i][idx]
        rest = h.restrict_line(tuple(base), h.e)
        if cache is not None:
            cache[combo] = rest
        return rest

    total = UniPoly.zero(RATIONAL)
    for r in range(len(s) + 1):
        for combo in itertools.combinations(s, r):
            rest = restriction_for(combo)
            total = total + (rest if (len(s) - r) % 2 == 0 else -rest)
    return total


def trace_via_derivative(h: HyperbolicInstance, v, alpha):
    """alpha * D_v h(alpha e) / h(alpha e); equals the hyperbolic trace of v."""
    if alpha == 0:
        raise ValueError("alpha must be nonzero")
    h.check_dim(v)
    point = tuple(alpha * c for c in h.e)
    num = DirectionalDerivative(h, v).at(point)
    den = h.value(point)
    return alpha * num / den


def multi_restrict(h: HyperbolicInstance, x, dirs) -> MultiPoly:
    """Exact polynomial (t_1..t_k) -> h(x + sum_j t_j dirs[j]).

    Tensor-product Newton interpolation on the integer grid {0..d}^k; the
    independent route for checking iterated directional derivatives.
    """
    k = len(dirs)
    backend = RATIONAL
    if _is_float_vec(x) or any(_is_float_vec(d) for d in dirs):
        backend = FLOAT

    def build(point, remaining) -> MultiPoly:
        j = k - remaining
        if remaining == 0:
            return MultiPoly.constant(k, h.value(tuple(point)), backend)
        nodes = []
        for t in range(h.d + 1):
            shifted = [p + t * w for p, w in zip(point, dirs[j])]
            nodes.append((coerce(t, backend), build(shifted, remaining - 1)))
        return _interp_polyvalued(nodes, j, k, backend)

    return build(list(x), k)


def _interp_polyvalued(nodes, var: int, nvars: int, backend: str) -> MultiPoly:
    """Newton interpolation where ordinates are MultiPoly values."""
    xs = [t for t, _ in nodes]
    table = [p for _, p in nodes]
    n = len(nodes)
    newton = [table[0]]
    for level in range(1, n):
        for i in range(n - level):
            diff = table[i + 1] - table[i]
            table[i] = diff.scale(coerce(1, backend) / (xs[i + level] - xs[i]))
        newton.append(table[0])
    result = MultiPoly.zero(nvars, backend)
    basis = MultiPoly.constant(nvars, 1, backend)
    tvar = MultiPoly.variable(var, nvars, backend)
    for i, coeff_poly in enumerate(newton):
        result = result + coeff_poly * basis
        basis = basis * (tvar - MultiPoly.constant(nvars, xs[i], backend))
    return result


def iterated_directional_derivative(h: HyperbolicInstance, dirs, x):
    """D_{v_1} D_{v_2} ... D_{v_k} h(x) via the multilinear monomial of the
    exact multi-restriction (the oracle route, independent of
    inclusion-exclusion)."""
    k = len(dirs)
    if k == 0:
        return h.value(tuple(x))
    poly = multi_restrict(h, x, dirs)
    return poly.terms.get((1,) * k, coerce(0, poly.backend))
