"""Mixed characteristic polynomials and interlacing families.

Two families are built here, both trees of real-rooted polynomials in which
every node is the sum of its children and sibling sets share a common
interlacing, so some leaf's largest root is bounded by the root node's.

Signed family (independent variables xi_i with means mu_i, variances
tau_i^2, rank-1 cone vectors v_i):

    p_s(x) = (prod_i Pr[xi_i = s_i]) * h(xe + sum (s_i-mu_i) v_i)
                                     * h(xe - sum (s_i-mu_i) v_i)

Subset family (homogeneous SR distribution mu, isotropic rank-1 vectors):

    q_S(x) = mu(S) * h(xe - sum_{i in S} v_i)

Each root-node polynomial equals a differential-operator collapse.  Because
every v_i has hyperbolic rank <= 1, h is multilinear in the auxiliary
z-variables and applying prod_i (1 - 1/2 d^2/dz_i^2) at z=0 reduces to a
signed subset sum:

    signed:  sum_S (-1)^|S| (prod_{i in S} tau_i^2) * A_S(x)^2
    subset:  sum_S (-1)^|S| A_S(x) * g^(S)(x*1)

with A_S(x) = (prod_{i in S} D_{v_i}) h(xe) and g^(S)(x*1) =
sum_{T in supp, T >= S} mu(T) x^(|T|-|S|).  The collapse is exact (higher
z-powers cannot occur), so both routes can be compared coefficient-wise
under the rational backend.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import (
    DegreeMismatch,
    EmptyBranch,
    NoAdmissibleChild,
    RankTooHigh,
    TooLarge,
    ValueNotInSupport,
)
from .graphs import Graph
from .hyperbolic import (
    HyperbolicInstance,
    cone_membership,
    derivative_restriction,
    hyperbolic_rank,
    hyperbolic_trace,
    spectrum,
)
from .realstable import MultiPoly
from .scalars import FLOAT, RATIONAL, coerce
from .srdist import IsotropicFamily, SRDistribution, effective_resistance_family, max_marginal, uniform_spanning_tree
from .unipoly import UniPoly, is_real_rooted, max_real_root, near_real_rooted, real_roots

MAX_BRANCHES = 4096  # enumeration guardrail; exceeding raises, never approximates


@dataclass(frozen=True)
class RandomVar:
    """Finite-support random variable with exact mean and variance."""

    support: tuple
    probs: tuple

    def __post_init__(self):
        if len(self.support) != len(self.probs):
            raise ValueError("support and probability lengths differ")
        if not self.support:
            raise ValueError("empty support")
        if any(not p > 0 for p in self.probs):
            raise ValueError("probabilities must be positive")
        total = sum(self.probs)
        if isinstance(total, float):
            if abs(total - 1.0) > 1e-12:
                raise ValueError(f"probabilities sum to {total}")
        elif total != 1:
            raise ValueError(f"probabilities sum to {total}")

    @staticmethod
    def rademacher() -> "RandomVar":
        return RandomVar((Fraction(1), Fraction(-1)), (Fraction(1, 2), Fraction(1, 2)))

    @staticmethod
    def from_lists(support, probs) -> "RandomVar":
        return RandomVar(tuple(support), tuple(probs))

    @property
    def mean(self):
        return sum(s * p for s, p in zip(self.support, self.probs))

    @property
    def variance(self):
        mu = self.mean
        return sum(p * (s - mu) * (s - mu) for s, p in zip(self.support, self.probs))

    def central_moment(self, k: int):
        mu = self.mean
        return sum(p * (s - mu) ** k for s, p in zip(self.support, self.probs))


def _branch_count(sizes) -> int:
    count = 1
    for s in sizes:
        count *= s
    return count


@dataclass(frozen=True)
class KlsInstance:
    """Signed-discrepancy instance: hyperbolic h, rank-1 cone vectors, variables."""

    h: HyperbolicInstance
    vectors: tuple
    variables: tuple
    traces: tuple  # exact hyperbolic traces of the vectors
    sigma2: float  # ||sum tau_i^2 tr[v_i] v_i||_h
    sigma: float
    generators: tuple | None = None  # u_i with v_i = vec(u_i u_i^T), if known

    @staticmethod
    def build(h: HyperbolicInstance, vectors, variables, validate: bool = True,
              generators=None) -> "KlsInstance":
        vectors = tuple(tuple(v) for v in vectors)
        variables = tuple(variables)
        if len(vectors) != len(variables):
            raise ValueError("need one random variable per vector")
        for v in vectors:
            h.check_dim(v)
        if validate:
            for i, v in enumerate(vectors):
                if cone_membership(h, v, tol=1e-7).status == "outside":
                    raise ValueError(f"vector {i} lies outside the closed cone")
                if hyperbolic_rank(h, v) > 1:
                    raise RankTooHigh(f"vector {i} has hyperbolic rank > 1")
        traces = tuple(hyperbolic_trace(h, v) for v in vectors)
        mix = [coerce(0, RATIONAL)] * h.m
        float_mix = any(isinstance(c, float) for v in vectors for c in v)
        if float_mix:
            mix = [0.0] * h.m
        for v, var, tr in zip(vectors, variables, traces):
            weight = var.variance * tr
            for idx in range(h.m):
                mix[idx] = mix[idx] + weight * v[idx]
        sigma2 = spectrum(h, tuple(mix)).norm
        if generators is not None:
            generators = tuple(tuple(u) for u in generators)
        return KlsInstance(h, vectors, variables, traces, float(sigma2),
                           math.sqrt(max(sigma2, 0.0)), generators)

    @property
    def n(self) -> int:
        return len(self.vectors)

    def scaled(self, factor) -> "KlsInstance":
        """Instance with every vector multiplied by factor > 0 (revalidation skipped)."""
        vecs = tuple(tuple(factor * c for c in v) for v in self.vectors)
        gens = None
        if self.generators is not None:
            root = math.sqrt(float(factor))
            gens = tuple(tuple(root * float(c) for c in u) for u in self.generators)
        return KlsInstance.build(self.h, vecs, self.variables, validate=False,
                                 generators=gens)

    def centered_sum(self, assignment) -> tuple:
        w = [coerce(0, RATIONAL)] * self.h.m
        for v, var, s in zip(self.vectors, self.variables, assignment):
            c = s - var.mean
            for idx in range(self.h.m):
                w[idx] = w[idx] + c * v[idx]
        return tuple(w)


@dataclass(frozen=True)
class SrInstance:
    """Subset-selection instance: SR distribution plus isotropic rank-1 vectors."""

    h: HyperbolicInstance
    mu: SRDistribution
    vectors: tuple
    eps1: float
    eps2: float

    @staticmethod
    def build(h: HyperbolicInstance, mu: SRDistribution, vectors,
              validate: bool = True) -> "SrInstance":
        vectors = tuple(tuple(v) for v in vectors)
        if len(vectors) != mu.n:
            raise ValueError("need one vector per ground-set element")
        for v in vectors:
            h.check_dim(v)
        if validate:
            total = [0.0] * h.m
            for i, v in enumerate(vectors):
                if cone_membership(h, v, tol=1e-7).status == "outside":
                    raise ValueError(f"vector {i} lies outside the closed cone")
                if hyperbolic_rank(h, v) > 1:
                    raise RankTooHigh(f"vector {i} has hyperbolic rank > 1")
                for idx in range(h.m):
                    total[idx] += float(v[idx])
            err = max(abs(t - float(e)) for t, e in zip(total, h.e))
            if err > 1e-8:
                raise ValueError(f"vectors sum to e only within {err:.2e}")
        eps1 = float(max_marginal(mu))
        eps2 = max(float(hyperbolic_trace(h, v)) for v in vectors)
        return SrInstance(h, mu, vectors, eps1, eps2)

    @staticmethod
    def from_graph(graph: Graph, exact: bool = False,
                   stability_trials: int = 32) -> "SrInstance":
        """Uniform spanning trees paired with effective-resistance vectors.

        With ``exact=True`` the (float) basis is lifted to exact rationals
        before the outer products, so each vector is exactly rank-1 and the
        operator identities hold coefficient-wise over Fractions.
        """
        mu = uniform_spanning_tree(graph, stability_trials=stability_trials)
        fam = effective_resistance_family(graph)
        if not exact:
            return SrInstance.build(fam.h, mu, fam.vectors, validate=False)
        rows = [[Fraction(x) for x in row] for row in fam.basis]
        vectors = []
        for u, v in graph.edges:
            w = [row[u] - row[v] for row in rows]
            vectors.append(fam.h.vec_outer(tuple(w)))
        return SrInstance.build(fam.h, mu, tuple(vectors), validate=False)

    @property
    def n(self) -> int:
        return self.mu.n

    def subset_sum(self, elements) -> tuple:
        w = [coerce(0, RATIONAL)] * self.h.m
        for i in elements:
            for idx in range(self.h.m):
                w[idx] = w[idx] + self.vectors[i][idx]
        return tuple(w)


# ---------------------------------------------------------------------------
# Node polynomials (conditional sums over completions).
# ---------------------------------------------------------------------------

def kls_leaf_poly(inst: KlsInstance, assignment) -> UniPoly:
    """h(xe + w) h(xe - w) for the centered signed sum w, without the
    probability prefactor."""
    w = inst.centered_sum(assignment)
    plus = inst.h.restrict_line(w, inst.h.e)
    minus = inst.h.restrict_line(tuple(-c for c in w), inst.h.e)
    return plus * minus


def kls_node_poly(inst: KlsInstance, partial=()) -> UniPoly:
    """Conditional polynomial for a prefix assignment (the root for ())."""
    ell = len(partial)
    if ell > inst.n:
        raise ValueError("prefix longer than the variable list")
    for s, var in zip(partial, inst.variables):
        if s not in var.support:
            raise ValueNotInSupport(f"value {s!r} not in support {var.support!r}")
    rest = inst.variables[ell:]
    branches = _branch_count(len(v.support) for v in rest)
    if branches > MAX_BRANCHES:
        raise TooLarge(f"{branches} completions exceed the {MAX_BRANCHES} guardrail")
    prefix_prob = 1
    for s, var in zip(partial, inst.variables):
        prefix_prob = prefix_prob * var.probs[var.support.index(s)]
    acc = UniPoly.zero(RATIONAL)
    for completion in itertools.product(*[v.support for v in rest]):
        weight = prefix_prob
        for t, var in zip(completion, rest):
            weight = weight * var.probs[var.support.index(t)]
        leaf = kls_leaf_poly(inst, tuple(partial) + completion)
        acc = acc + leaf.scale(weight)
    return acc


def kls_operator_form(inst: KlsInstance) -> UniPoly:
    """The multilinear collapse of prod (1 - 1/2 d^2/dz_i^2) (h(xe+sum z_i tau_i v_i))^2.

    Equals kls_node_poly(inst) coefficient-wise; evaluated through the exact
    signed subset sum rather than a symbolic multivariate expansion.
    """
    n = inst.n
    tau2 = [var.variance for var in inst.variables]
    cache: dict = {}
    acc = UniPoly.zero(RATIONAL)
    for mask in range(1 << n):
        subset = tuple(i for i in range(n) if mask >> i & 1)
        weight = 1
        for i in subset:
            weight = weight * tau2[i]
        if weight == 0:
            continue
        a_s = derivative_restriction(inst.h, inst.vectors, subset, cache)
        if a_s.is_zero:
            continue
        term = (a_s * a_s).scale(weight)
        acc = acc + (term if len(subset) % 2 == 0 else -term)
    return acc


def ag_node_poly(inst: SrInstance, partial=()) -> UniPoly:
    """Conditional polynomial for a 0/1 membership prefix (root for ())."""
    ell = len(partial)
    acc = UniPoly.zero(RATIONAL)
    found = False
    for elems, prob in inst.mu.support:
        chosen = set(elems)
        if any((i in chosen) != bool(partial[i]) for i in range(ell)):
            continue
        found = True
        w = inst.subset_sum(elems)
        rest = inst.h.restrict_line(tuple(-c for c in w), inst.h.e)
        acc = acc + rest.scale(prob)
    if not found:
        raise EmptyBranch(f"no support set extends prefix {partial!r}")
    return acc


def ag_operator_form(inst: SrInstance) -> UniPoly:
    """Signed subset collapse sum_S (-1)^|S| A_S(x) g^(S)(x 1).

    Only subsets of support sets contribute (g^(S) vanishes otherwise).
    """
    support = [(frozenset(elems), prob) for elems, prob in inst.mu.support]
    subsets = set()
    for elems, _ in support:
        items = sorted(elems)
        for r in range(len(items) + 1):
            subsets.update(itertools.combinations(items, r))
    cache: dict = {}
    acc = UniPoly.zero(RATIONAL)
    for subset in sorted(subsets, key=lambda s: (len(s), s)):
        sset = frozenset(subset)
        gcoeffs = {}
        for elems, prob in support:
            if sset <= elems:
                k = len(elems) - len(sset)
                gcoeffs[k] = gcoeffs.get(k, 0) + prob
        if not gcoeffs:
            continue
        g_s = UniPoly.from_coeffs(
            [gcoeffs.get(k, 0) for k in range(max(gcoeffs) + 1)], RATIONAL)
        a_s = derivative_restriction(inst.h, inst.vectors, subset, cache)
        if a_s.is_zero:
            continue
        term = a_s * g_s
        acc = acc + (term if len(subset) % 2 == 0 else -term)
    return acc


def ag_substitution_identity(inst: SrInstance) -> tuple:
    """Both sides of x^d_mu E[h(x^2 e - sum_{i in T} v_i)] = x^d * collapse.

    Returns (lhs, rhs) as polynomials in x for coefficient-wise comparison.
    """
    lhs = ag_node_poly(inst).compose_xsquare().shift_degree(inst.mu.d_mu)
    rhs = ag_operator_form(inst).shift_degree(inst.h.d)
    return lhs, rhs


def linear_restriction_multipoly(h: HyperbolicInstance, vectors) -> MultiPoly:
    """h(xe + sum_i z_i v_i) as a polynomial in (x, z_1..z_n).

    Requires every v_i to have hyperbolic rank <= 1 so that the multilinear
    expansion sum_U z^U A_U(x) is complete.
    """
    n = len(vectors)
    cache: dict = {}
    out = MultiPoly.zero(n + 1)
    for mask in range(1 << n):
        subset = tuple(i for i in range(n) if mask >> i & 1)
        a_u = derivative_restriction(h, vectors, subset, cache)
        for power, coeff in enumerate(a_u.coeffs):
            if coeff == 0:
                continue
            exps = [0] * (n + 1)
            exps[0] = power
            for i in subset:
                exps[i + 1] = 1
            out = out + MultiPoly.monomial(tuple(exps), coeff)
    return out


# ---------------------------------------------------------------------------
# Pairwise expectation identity (single-variable sanity route).
# ---------------------------------------------------------------------------

def pair_expectation(inst_h: HyperbolicInstance, v, var: RandomVar, x1, x2):
    """E[h(x1 - (xi-mu) v) h(x2 + (xi-mu) v)], by support enumeration."""
    mu = var.mean
    total = None
    for s, p in zip(var.support, var.probs):
        c = s - mu
        a = inst_h.value(tuple(b - c * w for b, w in zip(x1, v)))
        b = inst_h.value(tuple(b + c * w for b, w in zip(x2, v)))
        term = p * a * b
        total = term if total is None else total + term
    return total


def pair_operator(inst_h: HyperbolicInstance, v, variance, x1, x2):
    """(1 - 1/2 d^2/dt^2)|_0 h(x1 + t tau v) h(x2 + t tau v) with tau^2 given.

    Only even powers of tau survive, so the value is polynomial in the
    variance and stays exact for rational inputs.
    """
    a = inst_h.restrict_line(tuple(x1), tuple(v))
    b = inst_h.restrict_line(tuple(x2), tuple(v))
    prod = a * b

    def coeff(p: UniPoly, k: int):
        return p.coeffs[k] if k <= p.degree else 0

    # c2 of t -> prod(tau t) is tau^2 * c2(prod).
    return coeff(prod, 0) - variance * coeff(prod, 2)


# ---------------------------------------------------------------------------
# Common interlacing and family descent.
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class InterlacingVerdict:
    ok: bool
    checked: int
    witness_weights: tuple | None = None

    def __bool__(self) -> bool:
        return self.ok


def _batch_near_real_rooted(rows: np.ndarray, tol: float = 1e-7) -> np.ndarray:
    """Row-wise companion-eigenvalue real-rootedness for equal-degree polys."""
    count, width = rows.shape
    deg = width - 1
    if deg == 0:
        return np.ones(count, dtype=bool)
    monic = rows / rows[:, -1:]
    comp = np.zeros((count, deg, deg))
    if deg > 1:
        idx = np.arange(deg - 1)
        comp[:, idx + 1, idx] = 1.0
    comp[:, :, -1] = -monic[:, :-1]
    eigs = np.linalg.eigvals(comp)
    return np.all(np.abs(eigs.imag) <= tol * np.maximum(1.0, np.abs(eigs)), axis=1)


def common_interlacing_check(polys, samples: int = 64, seed: int = 0,
                             tol: float = 1e-7) -> InterlacingVerdict:
    """Convex-combination real-rootedness probe for a common interlacing.

    Polynomials of one degree with positive leading coefficients have a
    common interlacing iff every convex combination is real-rooted; this
    checks all vertices, all pairwise midpoints and ``samples`` random
    weight vectors.  Rational inputs are certified exactly; float inputs go
    through the batched companion predicate.
    """
    polys = list(polys)
    if not polys:
        raise ValueError("need at least one polynomial")
    deg = polys[0].degree
    for p in polys:
        if p.degree != deg:
            raise DegreeMismatch("polynomials differ in degree")
        if not p.leading > 0:
            raise ValueError("leading coefficients must be positive")
    k = len(polys)
    rng = random.Random(f"interlace:{seed}")
    weight_sets = []
    for i in range(k):
        w = [Fraction(0)] * k
        w[i] = Fraction(1)
        weight_sets.append(w)
    for i in range(k):
        for j in range(i + 1, k):
            w = [Fraction(0)] * k
            w[i] = w[j] = Fraction(1, 2)
            weight_sets.append(w)
    for _ in range(samples):
        raw = [rng.randint(0, 16) for _ in range(k)]
        if sum(raw) == 0:
            raw[rng.randrange(k)] = 1
        total = sum(raw)
        weight_sets.append([Fraction(r, total) for r in raw])

    exact = all(p.backend == RATIONAL for p in polys)
    if exact:
        for weights in weight_sets:
            combo = UniPoly.zero(RATIONAL)
            for w, p in zip(weights, polys):
                if w:
                    combo = combo + p.scale(w)
            if not is_real_rooted(combo):
                return InterlacingVerdict(False, len(weight_sets), tuple(weights))
        return InterlacingVerdict(True, len(weight_sets))

    coeff_rows = np.array([p.float_coeffs() for p in polys])
    wmat = np.array([[float(w) for w in ws] for ws in weight_sets])
    combos = wmat @ coeff_rows
    verdicts = _batch_near_real_rooted(combos, tol)
    if bool(np.all(verdicts)):
        return InterlacingVerdict(True, len(weight_sets))
    bad = int(np.argmin(verdicts))
    return InterlacingVerdict(False, len(weight_sets), tuple(weight_sets[bad]))


def _node_children(inst, kind: str, prefix):
    if kind == "kls":
        values = inst.variables[len(prefix)].support
        return [(v, kls_node_poly(inst, tuple(prefix) + (v,))) for v in values]
    children = []
    for v in (0, 1):
        try:
            children.append((v, ag_node_poly(inst, tuple(prefix) + (v,))))
        except EmptyBranch:
            continue
    return children


def descend_family(inst, kind: str, tol: float = 1e-8):
    """Greedy exact descent to a leaf whose top root is bounded by the root's.

    At each node some child's largest root does not exceed the parent's
    (that is the interlacing guarantee); ties are broken toward the smaller
    root and then the lexicographically smaller branch value.  Raises
    NoAdmissibleChild instead of patching tolerances.
    """
    if kind not in ("kls", "ag"):
        raise ValueError("kind must be 'kls' or 'ag'")
    n = inst.n
    prefix: tuple = ()
    node = kls_node_poly(inst) if kind == "kls" else ag_node_poly(inst)
    current_max = max_real_root(node)
    for _ in range(n):
        children = _node_children(inst, kind, prefix)
        admissible = []
        for value, poly in children:
            top = max_real_root(poly)
            if top <= current_max + tol * max(1.0, abs(current_max)):
                admissible.append((top, value, poly))
        if not admissible:
            raise NoAdmissibleChild(
                f"no child of prefix {prefix!r} stays under root bound {current_max!r}"
            )
        admissible.sort(key=lambda item: (item[0], item[1]))
        top, value, poly = admissible[0]
        prefix = prefix + (value,)
        current_max = min(current_max, top)
        node = poly
    return prefix, node


# ---------------------------------------------------------------------------
# Family adapters consumed by the search algorithms.
# ---------------------------------------------------------------------------

class KlsFamily:
    """Search-facing view of the signed family: branch sets, node
    polynomials, exact leaf norms."""

    kind = "kls"

    def __init__(self, inst: KlsInstance):
        self.inst = inst
        self.n = inst.n
        self.branch_sets = [tuple(var.support) for var in inst.variables]
        self.degree = 2 * inst.h.d

    def node_poly(self, prefix) -> UniPoly:
        return kls_node_poly(self.inst, tuple(prefix))

    def feasible(self, prefix) -> bool:
        return True

    def root_max_root(self) -> float:
        return max_real_root(self.node_poly(()))

    def leaf_norm(self, assignment) -> float:
        w = self.inst.centered_sum(assignment)
        return spectrum(self.inst.h, w).norm


class AgFamily:
    """Search-facing view of the subset family (0/1 branch values)."""

    kind = "ag"

    def __init__(self, inst: SrInstance):
        self.inst = inst
        self.n = inst.n
        self.branch_sets = [(0, 1)] * inst.n
        self.degree = inst.h.d

    def node_poly(self, prefix) -> UniPoly:
        return ag_node_poly(self.inst, tuple(prefix))

    def feasible(self, prefix) -> bool:
        ell = len(prefix)
        for elems, _ in self.inst.mu.support:
            chosen = set(elems)
            if all((i in chosen) == bool(prefix[i]) for i in range(ell)):
                return True
        return False

    def root_max_root(self) -> float:
        return max_real_root(self.node_poly(()))

    def leaf_norm(self, assignment) -> float:
        elems = [i for i, bit in enumerate(assignment) if bit]
        w = self.inst.subset_sum(elems)
        return spectrum(self.inst.h, w).norm
