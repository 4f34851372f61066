"""Full degree distributions recovered from scaled-graph determinants.

Scaling the probability weight of every edge at ``v`` by ``alpha ** omega(e)``
turns the total tree weight into ``sum_k W_k alpha**k``, where ``W_k`` is the
weight of the trees in which ``v`` has weighted degree ``k``.  Evaluating
that determinant at ``d + 1`` points and interpolating yields every ``W_k``.

Three interpolation modes are available:

``"exact"``
    Rational arithmetic at ``alpha = 1 .. d+1``.  Float weights convert to
    fractions exactly, so the coefficients are exact.  Cost grows quickly
    with graph size; meant for small graphs and tests.
``"vandermonde"``
    Float determinants at ``alpha = 1 .. d+1``, Vandermonde system solved in
    50-digit arithmetic; switches to Chebyshev nodes on ``[0.5, 2]`` when
    the Vandermonde condition number exceeds ``1e12``.
``"fourier"``
    Float determinants at the ``d + 1`` roots of unity and an FFT.  The
    transform is perfectly conditioned, so this is the default float mode.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import mpmath
import numpy as np

from .errors import IllConditionedInterpolation, NonIntegerDegreeWeights, SameNode
from .graph import Graph, ScaleSpec, scale_at_node
from .laplacian import build_laplacian, default_root, factorize, laplacian_from_weights, reduced_determinant

__all__ = [
    "MODES",
    "TRUNCATION",
    "DegreePolynomial",
    "DegreeDistribution",
    "JointDegreeDistribution",
    "evaluate_tree_polynomial",
    "degree_polynomial",
    "degree_distribution",
    "moments_from_polynomial",
    "joint_degree_distribution",
    "max_feasible_degree",
]

MODES = ("exact", "vandermonde", "fourier")
TRUNCATION = 1e-9
VANDERMONDE_COND_LIMIT = 1e12


@dataclass(frozen=True)
class DegreePolynomial:
    """Tree weight ``W_k`` for each feasible weighted degree ``k`` of ``node``.

    The signed polynomial is ``P(x) = sum_k (-1)**k W_k x**k``, so that
    ``P(-1)`` is the total tree weight.
    """

    node: int
    coefficients: dict[int, float | Fraction]
    mode: str
    diagnostics: dict = field(default_factory=dict, compare=False)

    @property
    def total(self):
        return sum(self.coefficients.values())

    def signed(self, x):
        return sum((-1) ** k * c * x ** k for k, c in self.coefficients.items())

    def derivative(self, x, order: int = 1):
        out = 0
        for k, c in self.coefficients.items():
            if k < order:
                continue
            falling = math.prod(range(k - order + 1, k + 1))
            out += (-1) ** k * c * falling * x ** (k - order)
        return out


@dataclass(frozen=True)
class DegreeDistribution:
    node: int
    probabilities: dict[int, float]
    mode: str
    diagnostics: dict = field(default_factory=dict, compare=False)

    def mean(self) -> float:
        return math.fsum(k * p for k, p in self.probabilities.items())

    def variance(self) -> float:
        m = self.mean()
        return math.fsum(p * (k - m) ** 2 for k, p in self.probabilities.items())


@dataclass(frozen=True)
class JointDegreeDistribution:
    nodes: tuple[int, int]
    probabilities: dict[tuple[int, int], float]
    mode: str
    diagnostics: dict = field(default_factory=dict, compare=False)

    def marginal(self, which: int) -> dict[int, float]:
        acc: dict[int, list[float]] = {}
        for key, p in self.probabilities.items():
            acc.setdefault(key[which], []).append(p)
        return {k: math.fsum(ps) for k, ps in sorted(acc.items())}

    def covariance(self) -> float:
        p = self.probabilities
        m1 = math.fsum(k1 * q for (k1, _), q in p.items())
        m2 = math.fsum(k2 * q for (_, k2), q in p.items())
        return math.fsum((k1 - m1) * (k2 - m2) * q for (k1, k2), q in p.items())


def _integer_omegas(G: Graph, v: int) -> list[int]:
    out = []
    for e in G.incident_edges(v):
        if not (float(e.omega).is_integer() and e.omega >= 0):
            raise NonIntegerDegreeWeights(
                f"edge {e.u}-{e.v} has omega={e.omega}; degree distributions need "
                "nonnegative integer degree weights at the node"
            )
        out.append(int(e.omega))
    return out


def max_feasible_degree(G: Graph, v: int) -> int:
    return sum(_integer_omegas(G, v))


def _resolve_root(G: Graph, r: int | None) -> int:
    if r is not None:
        G.check_node(r)
        return r
    if G.directed:
        raise ValueError("directed graphs need an explicit in-tree root")
    return default_root(G)


def evaluate_tree_polynomial(G: Graph, v: int, alpha: float, r: int | None = None) -> float:
    """Total tree weight of ``G`` with the edges at ``v`` scaled by ``alpha ** omega``."""
    if not alpha > 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    scaled = scale_at_node(G, ScaleSpec.power_alpha(v, alpha))
    return factorize(scaled, _resolve_root(G, r)).determinant()


# -- determinant evaluation ---------------------------------------------------

def _exact_det(rows: list[list[Fraction]]) -> Fraction:
    a = [list(row) for row in rows]
    n = len(a)
    det = Fraction(1)
    for c in range(n):
        piv = next((i for i in range(c, n) if a[i][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            a[c], a[piv] = a[piv], a[c]
            det = -det
        p = a[c][c]
        det *= p
        for i in range(c + 1, n):
            f = a[i][c]
            if f == 0:
                continue
            f = f / p
            ai, ac = a[i], a[c]
            for j in range(c + 1, n):
                if ac[j]:
                    ai[j] -= f * ac[j]
    return det


class _Evaluator:
    """Evaluates the total tree weight with per-node scaling ``x ** omega``."""

    def __init__(self, G: Graph, root: int, scaled_nodes: Sequence[int]):
        self.G = G
        self.root = root
        self.nodes = list(scaled_nodes)
        # exponent of each scaling variable on each edge
        self.exponents = np.zeros((G.n_edges, len(self.nodes)), dtype=int)
        for j, v in enumerate(self.nodes):
            for i in G.adjacency[v]:
                self.exponents[i, j] = int(G.edges[i].omega)
        self.heads = np.array([e.u for e in G.edges], dtype=np.intp)
        self.tails = np.array([e.v for e in G.edges], dtype=np.intp)
        self.w = np.array([e.w for e in G.edges], dtype=float)
        # fail early with the right error if no tree exists
        factorize(G, root)

    def float_value(self, point) -> complex | float:
        factors = np.prod(np.power(np.asarray(point)[None, :], self.exponents), axis=1)
        weights = self.w * factors
        L = laplacian_from_weights(self.G.n_nodes, self.G.directed, self.heads, self.tails, weights)
        return reduced_determinant(L, self.root)

    def exact_value(self, point: Sequence[int]) -> Fraction:
        n = self.G.n_nodes
        L = [[Fraction(0)] * n for _ in range(n)]
        for i, e in enumerate(self.G.edges):
            x = Fraction(e.w)
            for j, p in enumerate(point):
                x *= Fraction(p) ** int(self.exponents[i, j])
            L[e.u][e.u] += x
            L[e.v][e.u] -= x
            if not self.G.directed:
                L[e.v][e.v] += x
                L[e.u][e.v] -= x
        keep = [k for k in range(n) if k != self.root]
        return _exact_det([[L[a][b] for b in keep] for a in keep])


def _map(fn, items, workers: int | None):
    if workers is None or workers <= 1 or len(items) < 4:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


# -- interpolation ------------------------------------------------------------

def _newton_to_monomial(xs: Sequence, ys: Sequence) -> list:
    """Exact monomial coefficients of the interpolant through ``(xs, ys)``."""
    n = len(xs)
    dd = list(ys)
    for level in range(1, n):
        for i in range(n - 1, level - 1, -1):
            dd[i] = (dd[i] - dd[i - 1]) / (xs[i] - xs[i - level])
    coeffs = [Fraction(0)] * n
    coeffs[0] = dd[n - 1]
    # Horner on the Newton form: p = dd[n-1]; p = p*(x - xs[i]) + dd[i]
    for i in range(n - 2, -1, -1):
        new = [Fraction(0)] * n
        for k in range(n - 1):
            new[k + 1] += coeffs[k]
            new[k] -= coeffs[k] * xs[i]
        new[0] += dd[i]
        coeffs = new
    return coeffs


def _chebyshev_nodes(count: int, lo: float = 0.5, hi: float = 2.0) -> list[float]:
    mid, half = (lo + hi) / 2, (hi - lo) / 2
    return [mid + half * math.cos((2 * k + 1) * math.pi / (2 * count)) for k in range(count)]


def _vandermonde_solve(xs: Sequence[float], ys: np.ndarray):
    """Solve ``V c = ys`` (columns of ``ys`` independently) in 50-digit arithmetic."""
    with mpmath.workdps(50):
        V = mpmath.matrix([[mpmath.mpf(x) ** k for k in range(len(xs))] for x in xs])
        ys2 = np.atleast_2d(np.asarray(ys, dtype=float).T).T
        out = np.zeros(ys2.shape)
        worst = 0.0
        for col in range(ys2.shape[1]):
            b = mpmath.matrix([mpmath.mpf(float(y)) for y in ys2[:, col]])
            c = mpmath.lu_solve(V, b)
            res = mpmath.norm(V * c - b, mpmath.inf) / max(mpmath.norm(b, mpmath.inf), mpmath.mpf(1e-300))
            worst = max(worst, float(res))
            out[:, col] = [float(x) for x in c]
    cond = float(np.linalg.cond(np.vander(np.asarray(xs, dtype=float), increasing=True)))
    return out.reshape(np.shape(ys)), worst, cond


def _vandermonde_nodes(count: int) -> tuple[list[float], float]:
    xs = [float(k) for k in range(1, count + 1)]
    cond = float(np.linalg.cond(np.vander(np.asarray(xs), increasing=True)))
    if cond > VANDERMONDE_COND_LIMIT:
        xs = _chebyshev_nodes(count)
    return xs, cond


def _clean(coeffs: np.ndarray, residual: float, cond: float) -> np.ndarray:
    scale = np.abs(coeffs).sum()
    tiny = np.abs(coeffs) < TRUNCATION * scale
    if np.any(coeffs[~tiny] < 0):
        raise IllConditionedInterpolation(
            f"recovered a negative tree weight (min {coeffs.min():.3e}); "
            f"interpolation residual {residual:.3e}, condition {cond:.3e}",
            residual=residual,
            condition=cond,
        )
    out = coeffs.copy()
    out[tiny] = 0.0
    return out


def _univariate(G: Graph, v: int, root: int, mode: str, workers: int | None):
    d = max_feasible_degree(G, v)
    ev = _Evaluator(G, root, [v])
    count = d + 1
    diag: dict = {"mode": mode, "points": count}
    if mode == "exact":
        xs = list(range(1, count + 1))
        ys = [ev.exact_value([x]) for x in xs]
        coeffs = _newton_to_monomial([Fraction(x) for x in xs], ys)
        diag["residual"] = 0.0
        return coeffs, diag
    if mode == "fourier":
        pts = np.exp(2j * np.pi * np.arange(count) / count)
        ys = np.array(_map(lambda a: ev.float_value([a]), list(pts), workers), dtype=complex)
        c = np.fft.fft(ys) / count
        diag["residual"] = float(np.abs(c.imag).max() / max(np.abs(c.real).sum(), 1e-300))
        diag["condition"] = 1.0
        return list(_clean(c.real, diag["residual"], 1.0)), diag
    if mode == "vandermonde":
        xs, cond0 = _vandermonde_nodes(count)
        ys = np.array(_map(lambda a: float(np.real(ev.float_value([a]))), xs, workers))
        c, res, cond = _vandermonde_solve(xs, ys)
        diag.update(residual=res, condition=cond, nodes="chebyshev" if cond0 > VANDERMONDE_COND_LIMIT else "integer")
        return list(_clean(c, res, cond)), diag
    raise ValueError(f"unknown mode {mode!r}; expected one of {MODES}")


def degree_polynomial(
    G: Graph, v: int, r: int | None = None, mode: str = "exact", workers: int | None = None
) -> DegreePolynomial:
    """Coefficients ``W_k`` of the degree polynomial of ``v``.

    Requires nonnegative integer degree weights on the edges at ``v``.
    Coefficients that are zero (exactly in ``"exact"`` mode, below
    ``TRUNCATION`` of the total otherwise) are dropped.
    """
    G.check_node(v)
    root = _resolve_root(G, r)
    coeffs, diag = _univariate(G, v, root, mode, workers)
    table = {k: c for k, c in enumerate(coeffs) if c != 0}
    return DegreePolynomial(v, table, mode, diag)


def degree_distribution(
    G: Graph, v: int, r: int | None = None, mode: str = "exact", workers: int | None = None
) -> DegreeDistribution:
    """Probability of each weighted degree of ``v`` in a random spanning tree."""
    poly = degree_polynomial(G, v, r, mode, workers)
    total = poly.total
    probs = {k: float(c / total) for k, c in sorted(poly.coefficients.items())}
    return DegreeDistribution(v, probs, mode, poly.diagnostics)


def moments_from_polynomial(
    G: Graph, v: int, r: int | None = None, mode: str = "exact"
) -> tuple[float, float]:
    """Expectation and variance from the derivatives of the degree polynomial at -1."""
    poly = degree_polynomial(G, v, r, mode)
    p0 = poly.signed(-1)
    p1 = poly.derivative(-1, 1)
    p2 = poly.derivative(-1, 2)
    mean = -p1 / p0
    var = p2 / p0 - (p1 / p0) ** 2 - p1 / p0
    return float(mean), float(var)


def joint_degree_distribution(
    G: Graph,
    v: int,
    u: int,
    r: int | None = None,
    mode: str = "exact",
    workers: int | None = None,
) -> JointDegreeDistribution:
    """Joint law of the weighted degrees of ``v`` and ``u``.

    Edges at ``v`` are scaled by ``alpha ** omega`` and edges at ``u`` by
    ``beta ** omega`` (the shared edge by both); the tree weight is then a
    bivariate polynomial recovered by tensor-grid interpolation.
    """
    G.check_node(v)
    G.check_node(u)
    if u == v:
        raise SameNode("joint distribution needs two distinct nodes")
    root = _resolve_root(G, r)
    dv, du = max_feasible_degree(G, v), max_feasible_degree(G, u)
    ev = _Evaluator(G, root, [v, u])
    nv, nu = dv + 1, du + 1
    diag: dict = {"mode": mode, "points": nv * nu}
    if mode == "exact":
        xs = [Fraction(k) for k in range(1, nv + 1)]
        ys = [Fraction(k) for k in range(1, nu + 1)]
        grid = [[ev.exact_value([a, b]) for b in ys] for a in xs]
        # interpolate along beta for each alpha, then along alpha
        rows = [_newton_to_monomial(ys, grid[i]) for i in range(nv)]
        C = [[None] * nu for _ in range(nv)]
        for j in range(nu):
            col = _newton_to_monomial(xs, [rows[i][j] for i in range(nv)])
            for i in range(nv):
                C[i][j] = col[i]
        diag["residual"] = 0.0
        total = sum(sum(row) for row in C)
        probs = {(i, j): float(C[i][j] / total) for i in range(nv) for j in range(nu) if C[i][j] != 0}
        return JointDegreeDistribution((v, u), probs, mode, diag)
    if mode == "fourier":
        pa = np.exp(2j * np.pi * np.arange(nv) / nv)
        pb = np.exp(2j * np.pi * np.arange(nu) / nu)
        pts = [(a, b) for a in pa for b in pb]
        vals = np.array(_map(lambda p: ev.float_value(list(p)), pts, workers), dtype=complex).reshape(nv, nu)
        Cc = np.fft.fft2(vals) / (nv * nu)
        diag["residual"] = float(np.abs(Cc.imag).max() / max(np.abs(Cc.real).sum(), 1e-300))
        diag["condition"] = 1.0
        C = _clean(Cc.real, diag["residual"], 1.0)
    elif mode == "vandermonde":
        xa, ca = _vandermonde_nodes(nv)
        xb, cb = _vandermonde_nodes(nu)
        pts = [(a, b) for a in xa for b in xb]
        vals = np.array(_map(lambda p: float(np.real(ev.float_value(list(p)))), pts, workers)).reshape(nv, nu)
        step, r1, c1 = _vandermonde_solve(xa, vals)
        C, r2, c2 = _vandermonde_solve(xb, step.T)
        C = C.T
        diag.update(residual=max(r1, r2), condition=c1 * c2)
        C = _clean(C, diag["residual"], diag["condition"])
    else:
        raise ValueError(f"unknown mode {mode!r}; expected one of {MODES}")
    total = C.sum()
    probs = {(i, j): float(C[i, j] / total) for i in range(nv) for j in range(nu) if C[i, j] != 0}
    return JointDegreeDistribution((v, u), probs, mode, diag)
