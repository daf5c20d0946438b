"""Happiness fixed point, reciprocity matrix and exact prosociality gradients.

Happiness solves the linear system

    u_i = (1 - q_i) pi_i + sum_j p_ij u_j,      q_i = sum_j p_ij

so that ``u = B diag(1 - q) pi`` with ``B = (I - P)^-1``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy import sparse
from scipy.sparse import linalg as spla

from .graph import SocialGraph

#: Default prosociality cap; keeps ``I - P`` strictly diagonally dominant.
Q_MAX = 1.0 - 1e-6

#: Above this size the happiness system is solved iteratively on a sparse matrix.
DENSE_MAX = 512

RESIDUAL_TOL = 1e-10


class ConstraintError(ValueError):
    """Prosociality weights violate ``p_ij >= 0``, graph support or ``q_i < 1``."""


class SolverError(RuntimeError):
    """The happiness system could not be solved to the residual bound."""


# ---------------------------------------------------------------------------
# prosociality state
# ---------------------------------------------------------------------------


def generalized_weights(graph: SocialGraph, q) -> np.ndarray:
    """Weight matrix with ``p_ij = q_i / k_i`` on edges and zero elsewhere.

    Isolated nodes get an all-zero row whatever their ``q_i``.
    """
    q = np.asarray(q, dtype=float)
    k = graph.degrees
    scale = np.divide(q, k, out=np.zeros_like(q), where=k > 0)
    return graph.adjacency * scale[:, None]


@dataclass
class ProsocialityState:
    """Prosociality of every node.

    In ``generalized`` mode only ``q`` is free and the weights are derived
    as ``q_i / k_i``; in ``selective`` mode every edge weight is free and
    ``q`` is the row sum.
    """

    mode: str
    weights: np.ndarray
    q_max: float = Q_MAX
    q_values: np.ndarray | None = field(default=None, repr=False)

    @classmethod
    def generalized(cls, graph: SocialGraph, q, q_max: float = Q_MAX) -> "ProsocialityState":
        q = np.array(q, dtype=float)
        if q.shape != (graph.n,):
            raise ValueError(f"expected {graph.n} prosociality values, got shape {q.shape}")
        return cls("generalized", generalized_weights(graph, q), q_max, q)

    @classmethod
    def selective(cls, graph: SocialGraph, weights, q_max: float = Q_MAX) -> "ProsocialityState":
        P = np.array(weights, dtype=float)
        if P.shape != (graph.n, graph.n):
            raise ValueError(f"expected a {graph.n}x{graph.n} weight matrix, got {P.shape}")
        return cls("selective", P, q_max)

    @property
    def q(self) -> np.ndarray:
        """Total prosociality per node.

        In generalized mode this is the stored ``q_i``, which isolated
        nodes keep even though their weight row is empty.
        """
        if self.q_values is not None:
            return self.q_values
        return self.weights.sum(axis=1)

    def validate(self, graph: SocialGraph) -> None:
        check_weights(self.weights, graph)
        if np.any(self.q > self.q_max + 1e-12) or np.any(self.q < 0):
            raise ConstraintError(f"q outside [0, {self.q_max}]")


def _as_weights(P) -> np.ndarray:
    if isinstance(P, ProsocialityState):
        return P.weights
    return np.asarray(P, dtype=float)


def check_weights(P, graph: SocialGraph | None = None) -> np.ndarray:
    """Validate a weight matrix and return its row sums."""
    P = _as_weights(P)
    if P.ndim != 2 or P.shape[0] != P.shape[1]:
        raise ConstraintError(f"weights must be square, got shape {P.shape}")
    if np.any(P < 0):
        raise ConstraintError("negative prosociality weight")
    if np.any(np.diag(P) != 0):
        raise ConstraintError("self-weight p_ii must be zero")
    if graph is not None:
        if P.shape[0] != graph.n:
            raise ConstraintError(f"weights are {P.shape[0]}x{P.shape[0]}, graph has {graph.n} nodes")
        if np.any(P[graph.adjacency == 0] != 0):
            raise ConstraintError("non-zero weight between non-neighbors")
    q = P.sum(axis=1)
    if np.any(q >= 1.0):
        i = int(np.argmax(q))
        raise ConstraintError(f"q_{i} = {q[i]!r} >= 1; I - P may be singular")
    return q


# ---------------------------------------------------------------------------
# linear algebra
# ---------------------------------------------------------------------------


def reciprocity_matrix(P) -> np.ndarray:
    """Return ``B = (I - P)^-1``.

    ``b_ij`` accumulates every weighted path from ``i`` to ``j``; the
    diagonal measures how much of a node's own prosociality comes back to it.
    """
    P = _as_weights(P)
    check_weights(P)
    n = P.shape[0]
    M = np.eye(n) - P
    if n <= DENSE_MAX:
        B = np.linalg.inv(M)
    else:
        lu = spla.splu(sparse.csc_matrix(M))
        B = lu.solve(np.eye(n))
    err = np.max(np.abs(M @ B - np.eye(n))) if n else 0.0
    if err > 1e-10:
        raise SolverError(f"(I - P) B deviates from identity by {err:.3e}")
    return B


def _residual(P: np.ndarray, q: np.ndarray, pi: np.ndarray, u: np.ndarray) -> float:
    if u.size == 0:
        return 0.0
    return float(np.max(np.abs(u - P @ u - (1.0 - q) * pi)))


def _residual_bound(pi: np.ndarray) -> float:
    scale = float(np.max(np.abs(pi))) if pi.size else 0.0
    return RESIDUAL_TOL * max(1.0, scale)


class HappinessOperator:
    """Linear map ``pi -> u`` for a fixed weight matrix.

    Strategy equilibria are computed at fixed prosociality, so the matrix
    ``W = B diag(1 - q)`` is factored once and reused for every candidate
    profile.  Rows of ``W`` sum to one: happiness is a weighted average of
    payoffs.
    """

    def __init__(self, P, graph: SocialGraph | None = None, validate: bool = True):
        P = _as_weights(P)
        self.q = check_weights(P, graph) if validate else P.sum(axis=1)
        self.P = P
        self.n = P.shape[0]
        self.dense = self.n <= DENSE_MAX

    @cached_property
    def B(self) -> np.ndarray:
        if self.dense:
            return np.linalg.inv(np.eye(self.n) - self.P)
        return self._lu.solve(np.eye(self.n))

    @cached_property
    def W(self) -> np.ndarray:
        return self.B * (1.0 - self.q)[None, :]

    @cached_property
    def b_diag(self) -> np.ndarray:
        return np.diag(self.B).copy()

    @cached_property
    def _sparse(self):
        return sparse.csr_matrix(sparse.identity(self.n) - sparse.csr_matrix(self.P))

    @cached_property
    def _lu(self):
        return spla.splu(self._sparse.tocsc())

    def happiness(self, pi) -> np.ndarray:
        pi = np.asarray(pi, dtype=float)
        if self.dense:
            u = self.W @ pi
        else:
            rhs = (1.0 - self.q) * pi
            u, info = spla.gmres(self._sparse, rhs, rtol=1e-14, atol=0.0, restart=50, maxiter=200)
            if info != 0 or _residual(self.P, self.q, pi, u) > _residual_bound(pi):
                u = self._lu.solve(rhs)
        bound = _residual_bound(pi)
        res = _residual(self.P, self.q, pi, u)
        if res > bound:
            # one step of iterative refinement before giving up
            u = u + self._correction(pi, u)
            res = _residual(self.P, self.q, pi, u)
            if res > bound:
                raise SolverError(f"happiness residual {res:.3e} exceeds {bound:.3e}")
        return u

    def _correction(self, pi, u):
        r = (1.0 - self.q) * pi - (u - self.P @ u)
        if self.dense:
            return self.B @ r
        return self._lu.solve(r)

    def solve(self, pi) -> "HappinessSolution":
        pi = np.asarray(pi, dtype=float)
        u = self.happiness(pi)
        return HappinessSolution(u, self.b_diag, _residual(self.P, self.q, pi, u))


@dataclass(frozen=True)
class HappinessSolution:
    u: np.ndarray
    b_diag: np.ndarray
    residual: float


def solve_happiness(graph: SocialGraph, P, payoffs) -> HappinessSolution:
    """Solve the happiness fixed point for payoffs ``payoffs``.

    Raises :class:`ConstraintError` for weights outside the admissible set
    and :class:`SolverError` if the residual bound cannot be met.
    """
    pi = np.asarray(payoffs, dtype=float)
    if pi.shape != (graph.n,):
        raise ValueError(f"expected {graph.n} payoffs, got shape {pi.shape}")
    if not np.all(np.isfinite(pi)):
        raise ValueError("payoffs must be finite")
    return HappinessOperator(P, graph).solve(pi)


# ---------------------------------------------------------------------------
# gradients
# ---------------------------------------------------------------------------


def selective_gradient(graph: SocialGraph, P, payoffs, u, k: int, i: int, j: int, B=None) -> float:
    """Exact ``du_k / dp_ij = b_ki (u_j - pi_i)`` at fixed strategies."""
    if not graph.has_edge(i, j):
        raise ValueError(f"({i}, {j}) is not an edge; p_ij is pinned to zero")
    if B is None:
        B = reciprocity_matrix(P)
    return float(B[k, i] * (u[j] - payoffs[i]))


def selective_gradients(graph: SocialGraph, payoffs, u, b_diag) -> np.ndarray:
    """Matrix of ``du_i / dp_ij`` for all edges (zero off the graph)."""
    diff = np.asarray(u)[None, :] - np.asarray(payoffs)[:, None]
    return graph.adjacency * (np.asarray(b_diag)[:, None] * diff)


def generalized_gradient(graph: SocialGraph, P, payoffs, u, i: int, b_ii: float | None = None) -> float:
    """``du_i / dq_i = b_ii (mean_{j in N(i)} u_j - pi_i)``.

    An isolated node has no one to care about; its gradient is defined as 0
    (see ``graph.isolated``).
    """
    nbrs = graph.neighbors(i)
    if len(nbrs) == 0:
        return 0.0
    if b_ii is None:
        b_ii = reciprocity_matrix(P)[i, i]
    return float(b_ii * (np.mean(np.asarray(u)[nbrs]) - payoffs[i]))


def generalized_gradients(graph: SocialGraph, payoffs, u, b_diag) -> np.ndarray:
    """Vector of ``du_i / dq_i`` for every node; isolated nodes get 0."""
    k = graph.degrees
    nbr_sum = graph.adjacency @ np.asarray(u, dtype=float)
    mean_u = np.divide(nbr_sum, k, out=np.zeros(graph.n), where=k > 0)
    g = np.asarray(b_diag) * (mean_u - np.asarray(payoffs, dtype=float))
    g[k == 0] = 0.0
    return g
