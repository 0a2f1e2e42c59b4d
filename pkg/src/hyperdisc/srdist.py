"""Homogeneous strongly Rayleigh distributions over subsets of [n].

A distribution is strongly Rayleigh (SR) when its generating polynomial
g(z) = sum_S mu(S) z^S is real stable; homogeneous when every support set
has the same size d.  Marginals of homogeneous SR distributions admit a
derivative formula on the generating polynomial,

    Pr[T cap [k] = S] = x^(|S|-d) * prod_{i in S} d/dz_i
                        prod_{i in [k]\\S} (1 - x d/dz_i) g(x 1 + z) | z=0,

whose value is independent of the dummy scalar x != 0; both the formula and
a direct support-sum oracle are provided so they can be checked against
each other exactly.

The uniform spanning-tree distribution (enumerated, with a matrix-tree
cross-check) and the effective-resistance vector family it pairs with are
built here as well.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import DisconnectedGraph, TooLarge
from .graphs import Graph
from .hyperbolic import DeterminantInstance
from .realstable import MultiPoly, StabilityVerdict, stability_test
from .scalars import RATIONAL


@dataclass(frozen=True)
class SRDistribution:
    n: int
    support: tuple  # ((sorted element tuple, probability), ...)
    d_mu: int
    stability: StabilityVerdict | None = field(default=None, compare=False)

    @staticmethod
    def from_support(n: int, items, check_stability_trials: int = 0,
                     seed: int = 0) -> "SRDistribution":
        """Build and validate a homogeneous distribution.

        ``items`` is an iterable of (elements, probability).  Probabilities
        must be positive and sum to one (exactly for rationals, 1e-12 for
        floats).  A stability verdict is recorded, never enforced: exact SR
        verification is out of reach for sampled lines.
        """
        norm = []
        sizes = set()
        for elems, prob in items:
            elems = tuple(sorted(int(e) for e in elems))
            if any(not (0 <= e < n) for e in elems):
                raise ValueError("support element out of range")
            if len(set(elems)) != len(elems):
                raise ValueError("support sets cannot repeat elements")
            if not prob > 0:
                raise ValueError("probabilities must be positive")
            sizes.add(len(elems))
            norm.append((elems, prob))
        if not norm:
            raise ValueError("empty support")
        if len(sizes) != 1:
            raise ValueError("distribution is not homogeneous")
        total = sum(p for _, p in norm)
        if isinstance(total, float):
            if abs(total - 1.0) > 1e-12:
                raise ValueError(f"probabilities sum to {total}, not 1")
        elif total != 1:
            raise ValueError(f"probabilities sum to {total}, not 1")
        norm.sort(key=lambda item: item[0])
        dist = SRDistribution(n, tuple(norm), sizes.pop())
        if check_stability_trials:
            verdict = stability_test(dist.generating_polynomial(),
                                     trials=check_stability_trials, seed=seed)
            dist = SRDistribution(dist.n, dist.support, dist.d_mu, verdict)
        return dist

    def generating_polynomial(self) -> MultiPoly:
        terms = {}
        for elems, prob in self.support:
            exps = [0] * self.n
            for e in elems:
                exps[e] = 1
            terms[tuple(exps)] = terms.get(tuple(exps), 0) + prob
        return MultiPoly(self.n, terms)

    def probability(self, elems) -> Fraction:
        key = tuple(sorted(elems))
        for s, p in self.support:
            if s == key:
                return p
        return Fraction(0)

    def support_sets(self) -> list:
        return [frozenset(s) for s, _ in self.support]


def uniform_spanning_tree(graph: Graph, stability_trials: int = 32) -> SRDistribution:
    """Uniform distribution over all spanning trees, by enumeration.

    The tree count is cross-checked against the matrix-tree determinant;
    ground-set elements are edge indices.  Spanning-tree distributions are
    homogeneous SR, and the recorded verdict smoke-checks that.
    """
    trees = graph.spanning_trees()  # raises DisconnectedGraph / TooLarge
    count = graph.spanning_tree_count_matrix_tree()
    if len(trees) != count:
        raise AssertionError(
            f"enumerated {len(trees)} spanning trees but the matrix-tree "
            f"determinant says {count}"
        )
    prob = Fraction(1, len(trees))
    return SRDistribution.from_support(
        graph.n_edges, [(tree, prob) for tree in trees],
        check_stability_trials=stability_trials,
    )


def _observed_set(k) -> frozenset:
    """An int k means the prefix [k]; any iterable is taken literally.

    The prefix form is the canonical statement; an arbitrary observed set is
    the same thing after relabeling, and single-element marginals read more
    naturally that way.
    """
    if isinstance(k, int):
        return frozenset(range(k))
    return frozenset(int(i) for i in k)


def marginal_via_enum(mu: SRDistribution, s, k):
    """Pr[T cap K = S] by direct support summation (the oracle route)."""
    observed = _observed_set(k)
    target = frozenset(s)
    if not target <= observed:
        raise ValueError("S must be a subset of the observed set")
    total = Fraction(0)
    for elems, prob in mu.support:
        if frozenset(elems) & observed == target:
            total = total + prob
    return total


def marginal_via_formula(mu: SRDistribution, s, k, x0):
    """Pr[T cap K = S] via derivatives of the generating polynomial.

    Evaluated symbolically and exactly for rational x0 != 0; the result is
    x0-independent, which callers are encouraged to test.
    """
    if x0 == 0:
        raise ValueError("the dummy scalar must be nonzero")
    observed = _observed_set(k)
    target = set(int(i) for i in s)
    if not target <= observed:
        raise ValueError("S must be a subset of the observed set")
    g = mu.generating_polynomial()
    p = g.shift_vars((x0,) * mu.n)  # g(x0*1 + z)
    for i in target:
        p = p.partial(i)
    for i in sorted(observed - target):
        p = p - p.partial(i).scale(x0)
    value = p.eval((0,) * mu.n)
    return x0 ** (len(target) - mu.d_mu) * value


def max_marginal(mu: SRDistribution):
    """Largest single-element inclusion probability."""
    best = Fraction(0)
    for i in range(mu.n):
        prob = sum((p for elems, p in mu.support if i in elems), Fraction(0))
        if prob > best:
            best = prob
    return best


# -- closure constructions used to build test distributions -----------------

def condition_element(mu: SRDistribution, i: int, present: bool) -> SRDistribution:
    """Condition on i in T (or i not in T) and renormalize; SR is preserved."""
    kept = [(elems, p) for elems, p in mu.support if (i in elems) == present]
    if not kept:
        raise ValueError("conditioning event has probability zero")
    total = sum(p for _, p in kept)
    return SRDistribution.from_support(mu.n, [(e, p / total) for e, p in kept])


def product_distribution(mu1: SRDistribution, mu2: SRDistribution) -> SRDistribution:
    """Independent union on a disjoint ground set; SR and homogeneity persist."""
    items = []
    for e1, p1 in mu1.support:
        for e2, p2 in mu2.support:
            items.append((tuple(e1) + tuple(x + mu1.n for x in e2), p1 * p2))
    return SRDistribution.from_support(mu1.n + mu2.n, items)


# ---------------------------------------------------------------------------
# Graph -> isotropic rank-1 vectors via effective resistances.
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class IsotropicFamily:
    """Rank-1 cone vectors summing to the direction of a determinant instance.

    One vector per edge: v_e = vec(w_e w_e^T) with w_e = B (1_u - 1_v),
    where B composes an orthonormal basis of the all-ones complement with
    the inverse square root of the Laplacian restricted to that subspace.
    ||v_e||_h is then the effective resistance of e, and sum_e v_e = vec(I).
    """

    h: DeterminantInstance
    vectors: tuple
    eps2: float
    basis: tuple  # rows of B, recorded for reproducibility

    @property
    def n(self) -> int:
        return len(self.vectors)


def effective_resistance_family(graph: Graph) -> IsotropicFamily:
    if not graph.is_connected():
        raise DisconnectedGraph("effective resistances need a connected graph")
    nv = graph.n_vertices
    lap = np.array(graph.laplacian(), dtype=float)
    evals, evecs = np.linalg.eigh(lap)
    if nv > 1 and evals[1] <= 1e-10:
        raise DisconnectedGraph("Laplacian has a repeated zero eigenvalue")
    # B = diag(lambda^{-1/2}) Q^T on the complement of the all-ones vector.
    q = evecs[:, 1:]
    b = (q / np.sqrt(evals[1:])).T  # (nv-1, nv)
    h = DeterminantInstance(nv - 1)
    vectors = []
    resistances = []
    for u, v in graph.edges:
        incid = np.zeros(nv)
        incid[u] = 1.0
        incid[v] = -1.0
        w = b @ incid
        vectors.append(h.vec_outer(tuple(float(c) for c in w)))
        resistances.append(float(w @ w))
    total = np.zeros(h.m)
    for vec in vectors:
        total += np.array(vec, dtype=float)
    if np.max(np.abs(total - np.array(h.e, dtype=float))) > 1e-9:
        raise AssertionError("effective-resistance vectors do not sum to vec(I)")
    return IsotropicFamily(h, tuple(vectors), max(resistances),
                           tuple(tuple(float(x) for x in row) for row in b))
