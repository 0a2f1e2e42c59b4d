"""Largest-root estimation and the blocked coefficient-oracle search.

The search approximates the minimizing leaf of an interlacing family
without expanding most of it.  Top-k coefficients of a node polynomial give
the signed elementary symmetrics of its roots (Vieta), which the Newton
recurrence turns into the k-th power sum p_k; for even k,
lambda_1 <= p_k^(1/k) <= deg^(1/k) * max|lambda|, so p_k^(1/k) scores a
node to within deg^(1/k) whenever the spectrum is symmetric or nonnegative
(both families here are).  Greedy block-by-block minimization of that score
then lands on a leaf whose exact recomputed norm is certified post hoc
against (1 + delta) times the root-node bound.

Coefficients come either from the generic enumeration oracle (sum over
completions) or, for determinant instances built from rank-1 outer
products, from the expectation minor formula, which avoids enumerating the
completions altogether.
"""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import _kernels
from ._exact import char_poly_exact
from .errors import (
    CertificationFailed,
    KTooLarge,
    NotDeterminantInstance,
    OddK,
    OracleFailure,
    TooLarge,
)
from .mixedchar import AgFamily, KlsFamily, KlsInstance, SrInstance
from .hyperbolic import spectrum
from .scalars import RATIONAL
from .unipoly import UniPoly, max_real_root

MAX_BRUTE_BRANCHES = 1 << 16
MAX_MINOR_ORDER = 4  # sigma_j enumeration cap for the determinant oracle


def vieta_elems(coeffs) -> tuple:
    """Signed elementary symmetrics e_j = (-1)^j c_j of a monic polynomial.

    ``coeffs`` are the top coefficients c_1..c_k (descending degree).
    """
    return tuple(((-1) ** j) * c for j, c in enumerate(coeffs, start=1))


def elem_to_power(k: int, elems):
    """k-th power sum of the roots from e_1..e_k via the Newton recurrence.

    p_j = e_1 p_{j-1} - e_2 p_{j-2} + ... + (-1)^(j-1) j e_j, O(k^2) work.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if len(elems) < k:
        raise ValueError("need e_1..e_k")
    p = [0] * (k + 1)
    for j in range(1, k + 1):
        acc = 0
        sign = 1
        for i in range(1, j):
            acc = acc + sign * elems[i - 1] * p[j - i]
            sign = -sign
        acc = acc + sign * j * elems[j - 1]
        p[j] = acc
    return p[k]


def max_root_estimate(deg: int, k: int, coeffs) -> float:
    """(p_k)^(1/k) from the top-k monic coefficients.

    Even k keeps p_k = sum lambda_i^k nonnegative for every real spectrum,
    giving lambda_1 <= estimate <= deg^(1/k) max|lambda_i| unconditionally.
    """
    if k % 2 != 0:
        raise OddK("largest-root estimation needs an even power-sum index")
    if k < 2 or k > deg:
        raise ValueError(f"need an even k with 2 <= k <= degree, got k={k} deg={deg}")
    if len(coeffs) < k:
        raise ValueError("need the top k coefficients")
    if all(isinstance(c, float) for c in coeffs[:k]):
        pk = float(_kernels.power_sum_from_top_coeffs(
            np.asarray(coeffs[:k], dtype=float), k))
    else:
        pk = float(elem_to_power(k, vieta_elems(coeffs[:k])))
    return max(pk, 0.0) ** (1.0 / k)


def monic_top_coeffs(poly: UniPoly, k: int) -> tuple:
    lead = poly.leading
    deg = poly.degree
    out = []
    for j in range(1, k + 1):
        idx = deg - j
        c = poly.coeffs[idx] if idx >= 0 else 0
        out.append(c / lead)
    return tuple(out)


def maxcoeff_enum(family, k: int, prefix) -> tuple:
    """Top-k monic coefficients of a node polynomial via full enumeration."""
    poly = family.node_poly(prefix)
    return monic_top_coeffs(poly, k)


def maxcoeff_det(inst: KlsInstance, k: int, ell: int, values) -> tuple:
    """Top-k coefficients of a determinant node polynomial by the minor formula.

    For h = det and v_i = vec(u_i u_i^T), the node polynomial is
    E[det(x^2 I - M^2)] with M = sum c~_i u_i u_i^T over centered
    coefficients; its x^(2(m'-j)) coefficient is (-1)^j E[sigma_j(M^2)],
    and sigma_j(M^2) expands multilinearly over ordered index pairs:

        sigma_j(M^2) = sum_{|S|=j, S subset [n]x[n]}
                       prod_{(a,b) in S} c~_a c~_b <u_a, u_b>
                       * sigma_j(sum_{(a,b) in S} u_a u_b^T).

    Expectations factor over the independent coordinates using central
    moments, so no completion is ever enumerated.  Odd coefficients vanish.
    """
    h = inst.h
    if getattr(h, "kind", None) != "determinant" or inst.generators is None:
        raise NotDeterminantInstance(
            "the minor-formula oracle needs a determinant instance with "
            "recorded rank-1 generators")
    mprime = h.mprime
    deg = 2 * mprime
    if (k + 1) // 2 > MAX_MINOR_ORDER:
        raise KTooLarge(f"minor order {(k + 1) // 2} exceeds cap {MAX_MINOR_ORDER}")
    n = inst.n
    us = [tuple(Fraction(c) for c in u) for u in inst.generators]
    gram = [[sum(ua * ub for ua, ub in zip(us[a], us[b])) for b in range(n)]
            for a in range(n)]
    fixed = {}
    for i, s in enumerate(values[:ell]):
        fixed[i] = Fraction(s) - inst.variables[i].mean
    moments = [
        [inst.variables[i].central_moment(p) for p in range(2 * ((k + 1) // 2) * 2 + 1)]
        for i in range(n)
    ]

    def expected_product(counts: dict) -> Fraction:
        out = Fraction(1)
        for i, cnt in counts.items():
            if i in fixed:
                out *= fixed[i] ** cnt
            else:
                out *= Fraction(moments[i][cnt])
            if out == 0:
                return out
        return out

    pairs = [(a, b) for a in range(n) for b in range(n)]
    totals = {}
    for j in range(1, min(k // 2, mprime) + 1):
        total = Fraction(0)
        for subset in itertools.combinations(pairs, j):
            counts: dict = {}
            gfac = Fraction(1)
            for a, b in subset:
                counts[a] = counts.get(a, 0) + 1
                counts[b] = counts.get(b, 0) + 1
                gfac *= gram[a][b]
            if gfac == 0:
                continue
            exp = expected_product(counts)
            if exp == 0:
                continue
            mat = [[Fraction(0)] * mprime for _ in range(mprime)]
            for a, b in subset:
                ua, ub = us[a], us[b]
                for r in range(mprime):
                    if ua[r] == 0:
                        continue
                    for c in range(mprime):
                        mat[r][c] += ua[r] * ub[c]
            asc = char_poly_exact(mat)
            sigma_j = ((-1) ** j) * asc[mprime - j]
            total += exp * gfac * sigma_j
        totals[j] = total
    out = []
    for idx in range(1, k + 1):
        if idx % 2 == 1:
            out.append(Fraction(0))
        else:
            j = idx // 2
            out.append(((-1) ** j) * totals.get(j, Fraction(0)))
    return tuple(out)


# ---------------------------------------------------------------------------
# Blocked search.
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SolverConfig:
    delta: float
    block: int | None = None
    k: int | None = None
    seed: int = 0
    oracle: str = "enumeration"  # or "det_minor"

    def resolve(self, n: int, degree: int) -> tuple:
        """Concrete (M, k) for an n-variable family of given degree.

        Defaults: M = ceil(sqrt(n)); k = ceil(2 M ln(degree) / delta)
        rounded up to even, then clamped to the largest even k <= degree
        (the power-sum index cannot exceed the degree).
        """
        m_block = self.block if self.block is not None else max(1, math.ceil(math.sqrt(n)))
        if m_block < 1:
            raise ValueError("block size must be >= 1")
        if self.k is not None:
            k = self.k
        else:
            k = math.ceil(2 * m_block * math.log(max(degree, 2)) / self.delta)
        if k % 2 == 1:
            k += 1
        if degree < 2:
            return m_block, 1  # linear nodes: the top coefficient is the root
        k = max(2, min(k, degree - (degree % 2)))
        return m_block, k


@dataclass(frozen=True)
class SearchResult:
    assignment: tuple
    estimate: float
    certified: float
    root_max: float
    bound: float
    oracle_calls: int
    seed: int
    wall_time: float

    def to_json(self) -> dict:
        """Wire format; wall time stays off the wire so outputs are
        byte-identical across runs."""
        return {
            "assignment": [f"{s.numerator}/{s.denominator}" if isinstance(s, Fraction)
                           else s for s in self.assignment],
            "estimate": self.estimate,
            "certified": self.certified,
            "bound": self.bound,
            "oracle_calls": self.oracle_calls,
            "seed": self.seed,
        }


def kadison_singer_search(family, cfg: SolverConfig,
                          inst: KlsInstance | None = None) -> SearchResult:
    """Blocked greedy minimization of the largest-root estimate.

    Walks ceil(n/M) rounds; each round brute-forces all value tuples for the
    next M coordinates, scores each by max_root_estimate on oracle
    coefficients, and keeps the minimizer (ties resolve to the first tuple
    in lexicographic support order).  The returned assignment is certified
    post hoc by an exact spectral norm, which must stay within (1 + delta)
    of the root-node largest root; violations raise, never pass silently.
    """
    start = time.perf_counter()
    n = family.n
    degree = family.degree
    m_block, k = cfg.resolve(n, degree)

    if cfg.oracle == "enumeration":
        def oracle(prefix):
            return maxcoeff_enum(family, k, prefix)
    elif cfg.oracle == "det_minor":
        if inst is None or family.kind != "kls":
            raise NotDeterminantInstance(
                "the det_minor oracle needs the originating determinant instance")

        def oracle(prefix):
            return maxcoeff_det(inst, k, len(prefix), prefix)
    else:
        raise ValueError(f"unknown oracle {cfg.oracle!r}")

    assignment: tuple = ()
    oracle_calls = 0
    last_estimate = math.inf
    for lo in range(0, n, m_block):
        hi = min(lo + m_block, n)
        best = None
        for combo in itertools.product(*family.branch_sets[lo:hi]):
            prefix = assignment + combo
            if not family.feasible(prefix):
                continue
            try:
                coeffs = oracle(prefix)
                oracle_calls += 1
                if degree >= 2:
                    est = max_root_estimate(degree, k, coeffs)
                else:
                    est = -float(coeffs[0])  # monic linear node: root is -c1
            except (OddK, KTooLarge, NotDeterminantInstance, TooLarge):
                raise
            except Exception as exc:  # pragma: no cover - defensive
                raise OracleFailure(f"oracle failed on prefix {prefix!r}: {exc}") from exc
            if best is None or est < best[0]:
                best = (est, combo)
        if best is None:
            raise OracleFailure(f"no feasible tuple for block [{lo}, {hi})")
        last_estimate = best[0]
        assignment = assignment + best[1]

    root_max = family.root_max_root()
    certified = family.leaf_norm(assignment)
    bound = (1.0 + cfg.delta) * root_max
    elapsed = time.perf_counter() - start
    if certified > bound + 1e-9 * max(1.0, abs(bound)):
        raise CertificationFailed(certified, bound)
    return SearchResult(assignment, float(last_estimate), float(certified),
                        float(root_max), float(bound), oracle_calls, cfg.seed,
                        elapsed)


# ---------------------------------------------------------------------------
# Exact brute force and the random-coloring baseline.
# ---------------------------------------------------------------------------

def _norms_batch(h, rows: np.ndarray) -> np.ndarray:
    """Hyperbolic norms of many vectors at once where a closed form exists."""
    if h.kind == "determinant":
        mats = np.zeros((rows.shape[0], h.mprime, h.mprime))
        for idx, (i, j) in enumerate(h._pairs):
            mats[:, i, j] = rows[:, idx]
            mats[:, j, i] = rows[:, idx]
        eigs = np.linalg.eigvalsh(mats)
        return np.max(np.abs(eigs), axis=1)
    if h.kind == "lorentz":
        radius = np.sqrt(np.sum(rows[:, :-1] ** 2, axis=1))
        return np.abs(rows[:, -1]) + radius
    return np.array([spectrum(h, tuple(row)).norm for row in rows])


def brute_force(inst, kind: str) -> tuple:
    """Exhaustive minimization of the discrepancy norm.

    Signed instances range over all support tuples of the centered sum;
    subset instances over the distribution's support sets.  Ties resolve to
    the first assignment in lexicographic support order.
    """
    if kind == "kls":
        sizes = [len(var.support) for var in inst.variables]
        count = 1
        for s in sizes:
            count *= s
        if count > MAX_BRUTE_BRANCHES:
            raise TooLarge(f"{count} assignments exceed {MAX_BRUTE_BRANCHES}")
        vecs = np.array([[float(c) for c in v] for v in inst.vectors])
        means = [var.mean for var in inst.variables]
        assignments = list(itertools.product(*[var.support for var in inst.variables]))
        centered = np.array([[float(s - mu) for s, mu in zip(a, means)]
                             for a in assignments])
        norms = _norms_batch(inst.h, centered @ vecs)
        best = int(np.argmin(norms))
        return assignments[best], float(norms[best])
    if kind == "ag":
        vecs = np.array([[float(c) for c in v] for v in inst.vectors])
        rows = []
        membership = []
        for elems, _ in inst.mu.support:
            indicator = np.zeros(inst.n)
            for e in elems:
                indicator[e] = 1.0
            membership.append(tuple(int(b) for b in indicator))
            rows.append(indicator @ vecs)
        norms = _norms_batch(inst.h, np.array(rows))
        best = int(np.argmin(norms))
        return membership[best], float(norms[best])
    raise ValueError("kind must be 'kls' or 'ag'")


@dataclass(frozen=True)
class BaselineSummary:
    trials: int
    seed: int
    minimum: float
    q25: float
    median: float
    q75: float
    maximum: float
    mean: float

    def to_json(self) -> dict:
        return {"trials": self.trials, "seed": self.seed, "min": self.minimum,
                "q25": self.q25, "median": self.median, "q75": self.q75,
                "max": self.maximum, "mean": self.mean}


def random_baseline(inst, kind: str, trials: int, seed: int = 0) -> BaselineSummary:
    """I.i.d. random assignments: the matrix-Chernoff-style comparison point."""
    import random as _random

    values = []
    if kind == "kls":
        vecs = np.array([[float(c) for c in v] for v in inst.vectors])
        means = [float(var.mean) for var in inst.variables]
        cum = []
        for var in inst.variables:
            probs = [float(p) for p in var.probs]
            cum.append(np.cumsum(probs))
        rows = np.zeros((trials, inst.n))
        for t in range(trials):
            rng = _random.Random(f"baseline:{seed}:{t}")
            for i, var in enumerate(inst.variables):
                u = rng.random()
                j = int(np.searchsorted(cum[i], u))
                j = min(j, len(var.support) - 1)
                rows[t, i] = float(var.support[j]) - means[i]
        values = _norms_batch(inst.h, rows @ vecs)
    elif kind == "ag":
        vecs = np.array([[float(c) for c in v] for v in inst.vectors])
        probs = np.cumsum([float(p) for _, p in inst.mu.support])
        rows = np.zeros((trials, inst.n))
        for t in range(trials):
            rng = _random.Random(f"baseline:{seed}:{t}")
            j = int(np.searchsorted(probs, rng.random()))
            j = min(j, len(inst.mu.support) - 1)
            for e in inst.mu.support[j][0]:
                rows[t, e] = 1.0
        values = _norms_batch(inst.h, rows @ vecs)
    else:
        raise ValueError("kind must be 'kls' or 'ag'")
    arr = np.sort(np.asarray(values))
    return BaselineSummary(
        trials, seed,
        float(arr[0]), float(np.quantile(arr, 0.25)), float(np.quantile(arr, 0.5)),
        float(np.quantile(arr, 0.75)), float(arr[-1]), float(np.mean(arr)))
