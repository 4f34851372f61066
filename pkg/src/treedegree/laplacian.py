"""Laplacians, reduced Laplacians and the linear algebra on top of them.

Undirected graphs use ``L = D - A``; directed graphs use ``L = D - A.T`` with
``D`` holding out-degrees, so that deleting row and column ``r`` counts
in-trees rooted at ``r``.  Small systems are dense, larger ones sparse.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.sparse.csgraph import breadth_first_order

from .errors import DimensionMismatch, Disconnected, NumericalFailure, SingularMatrix
from .graph import Graph, complement_subgraph, is_connected, neighborhood_subgraph, reaches_root

__all__ = [
    "DENSE_THRESHOLD",
    "LaplacianMatrix",
    "ReducedLaplacianSystem",
    "InverseEntries",
    "build_laplacian",
    "laplacian_from_weights",
    "reduce",
    "factorize",
    "default_root",
    "tree_total_weight",
    "graph_tree_weight",
    "selected_inverse_entries",
    "trace_product",
    "reduced_determinant",
    "decomposition_holds",
]

DENSE_THRESHOLD = 64
DEFAULT_RTOL = 1e-9
DEFAULT_COND_LIMIT = 1e14


@dataclass(frozen=True)
class LaplacianMatrix:
    """Full ``n x n`` Laplacian; ``matrix`` is an ndarray or a CSR matrix."""

    matrix: np.ndarray | sp.csr_matrix
    directed: bool

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    @property
    def is_sparse(self) -> bool:
        return sp.issparse(self.matrix)

    def toarray(self) -> np.ndarray:
        return self.matrix.toarray() if self.is_sparse else np.array(self.matrix)


def laplacian_from_weights(
    n: int,
    directed: bool,
    heads: np.ndarray,
    tails: np.ndarray,
    weights: np.ndarray,
    sparse: bool | None = None,
):
    """Assemble a Laplacian from edge arrays (weights may be signed or complex)."""
    heads = np.asarray(heads, dtype=np.intp)
    tails = np.asarray(tails, dtype=np.intp)
    weights = np.asarray(weights)
    if sparse is None:
        sparse = n >= DENSE_THRESHOLD
    if directed:
        # edge u -> v contributes w to L[u, u] and -w to L[v, u]
        rows = np.concatenate([heads, tails])
        cols = np.concatenate([heads, heads])
        vals = np.concatenate([weights, -weights])
    else:
        rows = np.concatenate([heads, tails, heads, tails])
        cols = np.concatenate([heads, tails, tails, heads])
        vals = np.concatenate([weights, weights, -weights, -weights])
    dtype = np.result_type(weights.dtype, np.float64)
    if sparse:
        return sp.csr_matrix((vals.astype(dtype), (rows, cols)), shape=(n, n))
    out = np.zeros((n, n), dtype=dtype)
    np.add.at(out, (rows, cols), vals)
    return out


def _edge_arrays(G: Graph):
    heads = np.fromiter((e.u for e in G.edges), dtype=np.intp, count=G.n_edges)
    tails = np.fromiter((e.v for e in G.edges), dtype=np.intp, count=G.n_edges)
    return heads, tails


def build_laplacian(G: Graph, weights=None, sparse: bool | None = None) -> LaplacianMatrix:
    """Laplacian of ``G`` under its probability weights (or ``weights`` per edge)."""
    heads, tails = _edge_arrays(G)
    if weights is None:
        weights = np.array([e.w for e in G.edges]) if G.edges else np.zeros(0)
    L = laplacian_from_weights(G.n_nodes, G.directed, heads, tails, np.asarray(weights), sparse)
    colsum = np.abs(np.asarray(L.sum(axis=0))).max() if G.n_edges else 0.0
    scale = np.abs(np.asarray(weights)).sum() if G.n_edges else 1.0
    assert colsum <= 1e-12 * max(scale, 1.0), "Laplacian columns must sum to zero"
    return LaplacianMatrix(L, G.directed)


def decomposition_holds(G: Graph, v: int, tol: float = 1e-12) -> bool:
    """Check ``L_G == L_{G_v} + L_{G minus v}`` entrywise."""
    full = build_laplacian(G, sparse=False).toarray()
    near = build_laplacian(neighborhood_subgraph(G, v), sparse=False).toarray()
    rest = build_laplacian(complement_subgraph(G, v), sparse=False).toarray()
    return bool(np.abs(full - near - rest).max() <= tol * max(1.0, np.abs(full).max()))


def default_root(G: Graph) -> int:
    """Node with the largest weighted degree under ``w`` (smallest index on ties)."""
    deg = np.zeros(G.n_nodes)
    for e in G.edges:
        deg[e.u] += e.w
        deg[e.v] += e.w
    return int(np.argmax(deg))


def _delete(matrix, r: int):
    keep = np.delete(np.arange(matrix.shape[0]), r)
    if sp.issparse(matrix):
        return matrix.tocsr()[keep][:, keep].tocsc()
    return matrix[np.ix_(keep, keep)]


def _structurally_spanning(matrix, directed: bool, r: int) -> bool:
    """Does the sparsity pattern admit a spanning (in-)tree rooted at ``r``?"""
    pattern = sp.csr_matrix(matrix, copy=True)
    pattern.setdiag(0)
    pattern.eliminate_zeros()
    # directed: L[v, u] != 0 means an edge u -> v, i.e. u reaches r if v does;
    # walking from r along nonzeros of row v finds the predecessors u
    graph = pattern if directed else (pattern + pattern.T)
    order = breadth_first_order(abs(graph), r, directed=True, return_predecessors=False)
    return len(order) == matrix.shape[0]


def _perm_parity(perm: np.ndarray) -> int:
    perm = np.asarray(perm)
    seen = np.zeros(len(perm), dtype=bool)
    sign = 1
    for i in range(len(perm)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


@dataclass(frozen=True, eq=False)
class ReducedLaplacianSystem:
    """Factorized ``L`` with row and column ``root`` deleted.

    Rows follow node order with ``root`` skipped; :meth:`position` maps a
    node to its row (``-1`` for the root).  Instances are immutable and safe
    to share between threads.
    """

    root: int
    n_nodes: int
    directed: bool
    matrix: np.ndarray | sp.csc_matrix
    kind: str
    factor: object = field(repr=False)
    log_abs_det: float
    sign: float
    condition: float
    rtol: float = DEFAULT_RTOL

    @property
    def dim(self) -> int:
        return self.n_nodes - 1

    @property
    def nodes(self) -> np.ndarray:
        return np.delete(np.arange(self.n_nodes), self.root)

    def position(self, node: int) -> int:
        if node == self.root:
            return -1
        return node if node < self.root else node - 1

    def positions(self, nodes: Iterable[int]) -> np.ndarray:
        return np.array([self.position(v) for v in nodes], dtype=np.intp)

    def restrict(self, full):
        """Delete the root's row and column from an ``n x n`` matrix."""
        if full.shape != (self.n_nodes, self.n_nodes):
            raise DimensionMismatch(f"expected {self.n_nodes}x{self.n_nodes}, got {full.shape}")
        return _delete(full, self.root)

    def _raw_solve(self, b):
        if self.kind == "cholesky":
            return sla.cho_solve(self.factor, b, check_finite=False)
        if self.kind == "lu":
            return sla.lu_solve(self.factor, b, check_finite=False)
        return self.factor.solve(np.asarray(b, dtype=float))

    def solve(self, b, check: bool = True) -> np.ndarray:
        """Solve ``L^[r] x = b`` for a vector or a matrix of right-hand sides."""
        if sp.issparse(b):
            b = b.toarray()
        b = np.asarray(b, dtype=float)
        if b.shape[0] != self.dim:
            raise DimensionMismatch(f"right-hand side has {b.shape[0]} rows, system has {self.dim}")
        if self.dim == 0:
            return np.zeros_like(b)
        x = self._raw_solve(b)
        if check:
            res = self.residual(x, b)
            if res > self.rtol:
                raise NumericalFailure(f"solve residual {res:.3e} exceeds {self.rtol:.1e}")
        return x

    def residual(self, x, b) -> float:
        """``max |L x - b| / max |b|`` (columnwise max for matrix right-hand sides)."""
        r = self.matrix @ x - b
        bn = np.abs(b).max(axis=0)
        rn = np.abs(r).max(axis=0)
        bn = np.where(bn == 0, 1.0, bn)
        return float(np.max(rn / bn)) if np.size(rn) else 0.0

    def determinant(self) -> float:
        if self.log_abs_det > 709.0:
            return self.sign * math.inf
        return self.sign * math.exp(self.log_abs_det)


def _condition_dense(A: np.ndarray, kind: str, factor) -> float:
    anorm = np.abs(A).sum(axis=0).max()
    if kind == "cholesky":
        rcond, info = sla.lapack.dpocon(factor[0], anorm, uplo="L" if factor[1] else "U")
    else:
        rcond, info = sla.lapack.dgecon(factor[0], anorm, norm="1")
    return math.inf if rcond == 0 else 1.0 / rcond


def _condition_sparse(A: sp.csc_matrix, lu) -> float:
    n = A.shape[0]
    op = spla.LinearOperator(
        (n, n),
        matvec=lambda x: lu.solve(np.asarray(x, dtype=float).ravel()),
        rmatvec=lambda x: lu.solve(np.asarray(x, dtype=float).ravel(), trans="T"),
        dtype=float,
    )
    inv_norm = spla.onenormest(op) if n > 4 else np.abs(lu.solve(np.eye(n))).sum(axis=0).max()
    return float(spla.norm(A, 1) * inv_norm)


def reduce(
    L: LaplacianMatrix,
    r: int,
    rtol: float = DEFAULT_RTOL,
    cond_limit: float = DEFAULT_COND_LIMIT,
) -> ReducedLaplacianSystem:
    """Delete row/column ``r`` and factorize.

    Cholesky for undirected graphs (the reduced matrix is SPD when the
    graph is connected), LU otherwise.  Raises :class:`Disconnected` when the
    sparsity pattern admits no spanning tree and :class:`SingularMatrix` when
    the factorization is numerically singular.
    """
    n = L.n
    if not 0 <= r < n:
        raise DimensionMismatch(f"root {r} outside [0, {n})")
    if np.iscomplexobj(L.matrix):
        raise NumericalFailure("reduce() needs a real Laplacian; use reduced_determinant for complex weights")
    if not _structurally_spanning(L.matrix, L.directed, r):
        raise Disconnected(
            "reduced Laplacian is singular: graph disconnected" if not L.directed
            else f"reduced Laplacian is singular: some node cannot reach root {r}",
            condition=math.inf,
        )
    A = _delete(L.matrix, r)
    m = n - 1
    if m == 0:
        return ReducedLaplacianSystem(r, n, L.directed, np.zeros((0, 0)), "lu", None, 0.0, 1.0, 1.0, rtol)

    if not sp.issparse(A):
        A = np.ascontiguousarray(A, dtype=float)
        scale = np.abs(A).max()
        kind = "cholesky" if not L.directed else "lu"
        try:
            if kind == "cholesky":
                factor = sla.cho_factor(A, lower=False, check_finite=False)
                pivots = np.diag(factor[0])
                if np.any(pivots <= 0) or not np.all(np.isfinite(pivots)):
                    raise np.linalg.LinAlgError
                log_abs_det = 2.0 * float(np.sum(np.log(pivots)))
                sign = 1.0
            else:
                raise np.linalg.LinAlgError
        except np.linalg.LinAlgError:
            kind = "lu"
            factor = sla.lu_factor(A, check_finite=False)
            pivots = np.diag(factor[0])
            sign = float(np.prod(np.sign(pivots))) * _perm_parity(_lapack_perm(factor[1]))
            with np.errstate(divide="ignore"):
                log_abs_det = float(np.sum(np.log(np.abs(pivots))))
        if np.any(np.abs(pivots) <= m * np.finfo(float).eps * scale):
            raise SingularMatrix("pivot underflow in reduced Laplacian", condition=math.inf)
        cond = _condition_dense(A, kind, factor)
    else:
        A = A.tocsc().astype(float)
        kind = "splu"
        try:
            factor = spla.splu(A)
        except RuntimeError as exc:
            raise SingularMatrix(f"sparse factorization failed: {exc}", condition=math.inf) from exc
        pivots = factor.U.diagonal()
        scale = abs(A).max()
        if np.any(np.abs(pivots) <= m * np.finfo(float).eps * scale):
            raise SingularMatrix("pivot underflow in reduced Laplacian", condition=math.inf)
        sign = float(np.prod(np.sign(pivots))) * _perm_parity(factor.perm_r) * _perm_parity(factor.perm_c)
        log_abs_det = float(np.sum(np.log(np.abs(pivots))))
        cond = _condition_sparse(A, factor)
    if not cond < cond_limit:
        raise SingularMatrix("reduced Laplacian is numerically singular", condition=cond)
    return ReducedLaplacianSystem(r, n, L.directed, A, kind, factor, log_abs_det, sign, cond, rtol)


def _lapack_perm(piv: np.ndarray) -> np.ndarray:
    """Convert LAPACK row-interchange indices into a permutation array."""
    perm = np.arange(len(piv))
    for i, p in enumerate(piv):
        perm[i], perm[p] = perm[p], perm[i]
    return perm


def factorize(G: Graph, root: int | None = None, **kwargs) -> ReducedLaplacianSystem:
    """Build and reduce the Laplacian of ``G``; the root defaults per :func:`default_root`.

    Directed graphs require ``root`` (the in-tree root).
    """
    if root is None:
        if G.directed:
            raise ValueError("directed graphs need an explicit in-tree root")
        root = default_root(G)
    G.check_node(root)
    if G.directed:
        if not reaches_root(G, root):
            raise Disconnected(f"some node cannot reach root {root}", condition=math.inf)
    elif not is_connected(G):
        raise Disconnected("graph is disconnected", condition=math.inf)
    return reduce(build_laplacian(G), root, **kwargs)


def tree_total_weight(system: ReducedLaplacianSystem, log: bool = False) -> float:
    """Total spanning-tree (in-tree) weight ``det L^[r]``, or its natural log."""
    if log:
        return system.log_abs_det if system.sign > 0 else math.nan
    return system.determinant()


def graph_tree_weight(G: Graph, root: int | None = None, log: bool = False) -> float:
    """Like :func:`tree_total_weight` but returns 0 (or ``-inf``) when no tree exists."""
    try:
        system = factorize(G, root)
    except Disconnected:
        return -math.inf if log else 0.0
    return tree_total_weight(system, log=log)


def reduced_determinant(matrix, r: int) -> complex | float:
    """Plain determinant of a (possibly complex or signed) Laplacian minus row/col ``r``."""
    A = _delete(matrix, r)
    if A.shape[0] == 0:
        return 1.0
    if sp.issparse(A):
        lu = spla.splu(A.tocsc())
        d = np.prod(lu.U.diagonal())
        return d * _perm_parity(lu.perm_r) * _perm_parity(lu.perm_c)
    return np.linalg.det(A)


@dataclass(frozen=True)
class InverseEntries:
    """Block ``(L^[r])^{-1}[S, S]`` addressed by node ids."""

    nodes: tuple[int, ...]
    block: np.ndarray

    def index(self, node: int) -> int:
        return self.nodes.index(node)

    def __getitem__(self, key: tuple[int, int]) -> float:
        i, j = key
        return float(self.block[self.index(i), self.index(j)])


def selected_inverse_entries(system: ReducedLaplacianSystem, nodes: Iterable[int]) -> InverseEntries:
    """Entries of ``(L^[r])^{-1}`` on ``nodes x nodes`` via one solve per node."""
    nodes = tuple(dict.fromkeys(int(v) for v in nodes))
    if system.root in nodes:
        raise DimensionMismatch(f"root {system.root} has no row in the reduced system")
    for v in nodes:
        if not 0 <= v < system.n_nodes:
            raise DimensionMismatch(f"node {v} outside [0, {system.n_nodes})")
    if not nodes:
        return InverseEntries((), np.zeros((0, 0)))
    pos = system.positions(nodes)
    rhs = np.zeros((system.dim, len(nodes)))
    rhs[pos, np.arange(len(nodes))] = 1.0
    cols = system.solve(rhs)
    return InverseEntries(nodes, cols[pos, :])


def trace_product(system: ReducedLaplacianSystem, M) -> float:
    """``Tr[M (L^[r])^{-1}]`` for ``M`` in reduced (system) order.

    Uses ``Tr[X M] = sum_j (X M[:, j])_j`` with solves only for the nonzero
    columns of ``M``.
    """
    if M.shape != (system.dim, system.dim):
        raise DimensionMismatch(f"M is {M.shape}, system is {system.dim}x{system.dim}")
    Mc = sp.csc_matrix(M)
    support = np.flatnonzero(np.diff(Mc.indptr))
    if support.size == 0:
        return 0.0
    cols = Mc[:, support].toarray()
    y = system.solve(cols)
    return float(np.sum(y[support, np.arange(support.size)]))
