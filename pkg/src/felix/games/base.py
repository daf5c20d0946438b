"""Game interface used by the equilibrium solvers."""

from __future__ import annotations

import numpy as np

from ..core import HappinessOperator
from ..graph import SocialGraph

#: Happiness gains smaller than this (times ``max(1, |pi|)``) count as ties.
TIE_TOL = 1e-9


def tie_tolerance(payoffs) -> float:
    scale = float(np.max(np.abs(payoffs))) if np.size(payoffs) else 0.0
    return TIE_TOL * max(1.0, scale)


class Game:
    """A game played on the edges of a graph with a finite strategy set per node.

    Subclasses implement :meth:`payoffs` and :meth:`strategy_space`.
    :meth:`best_responses` has a generic implementation that enumerates
    candidates; games with local payoff structure override it.
    """

    name = "game"

    def strategy_space(self, graph: SocialGraph, i: int) -> np.ndarray:
        raise NotImplementedError

    def payoffs(self, graph: SocialGraph, s) -> np.ndarray:
        raise NotImplementedError

    def default_profile(self, graph: SocialGraph) -> np.ndarray:
        """Status-quo starting profile: every node on its first strategy."""
        return np.array([self.strategy_space(graph, i)[0] for i in range(graph.n)], dtype=float)

    def shared_space(self, graph: SocialGraph) -> np.ndarray | None:
        """The strategy set when every node has the same one, else ``None``."""
        return getattr(self, "_space", None)

    def validate_profile(self, graph: SocialGraph, s) -> np.ndarray:
        s = np.asarray(s, dtype=float)
        if s.shape != (graph.n,):
            raise ValueError(f"profile must have {graph.n} entries, got shape {s.shape}")
        shared = self.shared_space(graph)
        if shared is not None:
            bad = np.min(np.abs(s[:, None] - shared[None, :]), axis=1) > 1e-12
        else:
            bad = [np.min(np.abs(self.strategy_space(graph, i) - s[i])) > 1e-12 for i in range(graph.n)]
        if np.any(bad):
            i = int(np.flatnonzero(bad)[0])
            raise ValueError(f"s[{i}] = {s[i]} is not a strategy of node {i}")
        return s

    def node_values(self, graph: SocialGraph, s, op: HappinessOperator, i: int):
        """Candidates for node ``i`` and its happiness under each, others fixed."""
        cands = self.strategy_space(graph, i)
        trial = np.array(s, dtype=float)
        vals = np.empty(len(cands))
        row = op.W[i]
        for k, v in enumerate(cands):
            trial[i] = v
            vals[k] = row @ self.payoffs(graph, trial)
        return cands, vals

    def best_response(self, graph: SocialGraph, s, op: HappinessOperator, i: int, tol: float) -> float:
        """Best strategy of node ``i``; the current one is kept unless beaten by more than ``tol``."""
        cands, vals = self.node_values(graph, s, op, i)
        cur = int(np.argmin(np.abs(cands - s[i])))
        best = int(np.argmax(vals))
        if vals[best] - vals[cur] > tol:
            return float(cands[best])
        return float(s[i])

    def best_responses(self, graph: SocialGraph, s, op: HappinessOperator, tol: float) -> np.ndarray:
        """Each node's best response to the profile ``s`` (others held fixed)."""
        return np.array([self.best_response(graph, s, op, i, tol) for i in range(graph.n)])


class PrisonersDilemma(Game):
    """Networked prisoners' dilemma with optional wealth offset.

    ``pi_i = sum_{j in N(i)} s_j - c s_i + w_i`` with ``s_i in {0, 1}``.
    On two nodes with ``w = 0`` this is the textbook 2x2 game.
    """

    name = "pd"
    #: best responses ignore what the others play
    separable = True
    _space = np.array([0.0, 1.0])

    def __init__(self, c: float, wealth=None):
        if not c > 0:
            raise ValueError(f"cooperation cost must be positive, got {c}")
        self.c = float(c)
        self.wealth = None if wealth is None else np.asarray(wealth, dtype=float)

    def __repr__(self):
        return f"PrisonersDilemma(c={self.c}, wealth={'None' if self.wealth is None else 'array'})"

    def strategy_space(self, graph, i):
        return self._space

    def _wealth(self, graph) -> np.ndarray | float:
        if self.wealth is None:
            return 0.0
        if self.wealth.shape != (graph.n,):
            raise ValueError(f"wealth must have {graph.n} entries")
        return self.wealth

    def payoffs(self, graph, s):
        s = np.asarray(s, dtype=float)
        return graph.adjacency @ s - self.c * s + self._wealth(graph)

    def cooperation_gain(self, graph, op: HappinessOperator) -> np.ndarray:
        """Happiness gain of cooperating over defecting, per node.

        Payoffs are linear in ``s`` so the gain does not depend on what the
        others play: ``sum_{j in N(i)} W_ij - c W_ii``.
        """
        W = op.W
        return (graph.adjacency * W).sum(axis=1) - self.c * np.diag(W)

    def best_responses(self, graph, s, op, tol):
        s = np.asarray(s, dtype=float)
        gain = self.cooperation_gain(graph, op)
        out = s.copy()
        out[gain > tol] = 1.0
        out[gain < -tol] = 0.0
        return out

    def best_response(self, graph, s, op, i, tol):
        return float(self.best_responses(graph, s, op, tol)[i])


def npd_payoff(graph: SocialGraph, s, c: float, i: int, wealth=None) -> float:
    """Payoff of node ``i`` in the networked prisoners' dilemma."""
    s = np.asarray(s)
    if not np.all((s == 0) | (s == 1)):
        raise ValueError("PD strategies must be 0 or 1")
    w = 0.0 if wealth is None else float(np.asarray(wealth)[i])
    return float(s[graph.neighbors(i)].sum() - c * s[i] + w)


class FixedPayoffs(Game):
    """No strategic choice: every node receives a fixed payoff (its wealth)."""

    name = "wealth"
    separable = True
    _space = np.array([0.0])

    def __init__(self, wealth):
        self.wealth = np.asarray(wealth, dtype=float)
        if not np.all(np.isfinite(self.wealth)):
            raise ValueError("wealth must be finite")

    def strategy_space(self, graph, i):
        return self._space

    def payoffs(self, graph, s):
        if self.wealth.shape != (graph.n,):
            raise ValueError(f"wealth must have {graph.n} entries")
        return self.wealth.copy()

    def best_responses(self, graph, s, op, tol):
        return np.zeros(graph.n)
