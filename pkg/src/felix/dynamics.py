"""Slow adaptation of prosociality by following happiness gradients.

Strategies are fast: after every preference update the strategy
equilibrium is re-solved (warm-started from the previous profile).  Two
update rules are available:

``ascent``  ``q' = q + lam * grad``, projected gradient ascent (the default).
            Interior fixed points have zero gradient.
``mixed``   ``q' = (1 - lam) q + lam * grad``.  Interior fixed points satisfy
            ``q = grad`` instead, so prosociality can settle at
            intermediate levels where happiness is not maximal.

Both are projected back onto ``[0, q_max]`` (selective mode: non-negative
weights with row sums at most ``q_max``).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import (
    Q_MAX,
    HappinessOperator,
    generalized_gradients,
    generalized_weights,
    selective_gradients,
)
from .equilibrium import best_response_sweep
from .games.base import Game
from .graph import SocialGraph

RULES = ("mixed", "ascent")
MODES = ("generalized", "selective")


@dataclass(frozen=True)
class DynamicsConfig:
    lam: float = 0.01
    q_max: float = Q_MAX
    max_steps: int = 20_000
    tol: float = 1e-8
    window: int = 10
    mode: str = "generalized"
    rule: str = "ascent"
    seed: int = 0

    def __post_init__(self):
        if not 0 < self.lam <= 1:
            raise ValueError(f"lam must lie in (0, 1], got {self.lam}")
        if not 0 < self.q_max < 1:
            raise ValueError(f"q_max must lie in (0, 1), got {self.q_max}")
        if not self.tol > 0:
            raise ValueError(f"tol must be positive, got {self.tol}")
        if self.max_steps < 0 or self.window < 1:
            raise ValueError("max_steps must be >= 0 and window >= 1")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.rule not in RULES:
            raise ValueError(f"rule must be one of {RULES}, got {self.rule!r}")


@dataclass(frozen=True)
class InitSpec:
    """Initial prosociality.

    kinds: ``constant`` (``value``), ``uniform`` (``low``, ``high``),
    ``single_seed`` (node ``node`` at ``value``, everyone else 0) and
    ``explicit`` (``values``).
    """

    kind: str = "constant"
    value: float = 0.0
    low: float = 0.0
    high: float = 1.0
    node: int = 0
    values: tuple = ()

    def __post_init__(self):
        if self.kind not in ("constant", "uniform", "single_seed", "explicit"):
            raise ValueError(f"unknown init kind {self.kind!r}")
        if self.kind == "uniform" and not 0 <= self.low <= self.high <= 1:
            raise ValueError(f"uniform init needs 0 <= low <= high <= 1, got ({self.low}, {self.high})")
        if self.kind in ("constant", "single_seed") and not 0 <= self.value <= 1:
            raise ValueError(f"init value must lie in [0, 1], got {self.value}")

    def sample(self, n: int, rng: np.random.Generator | None = None, q_max: float = Q_MAX) -> np.ndarray:
        if self.kind == "constant":
            q = np.full(n, self.value, dtype=float)
        elif self.kind == "uniform":
            if rng is None:
                raise ValueError("uniform init needs a random generator")
            q = rng.uniform(self.low, self.high, size=n)
        elif self.kind == "single_seed":
            if not 0 <= self.node < n:
                raise ValueError(f"seed node {self.node} outside 0..{n - 1}")
            q = np.zeros(n)
            q[self.node] = self.value
        else:
            q = np.array(self.values, dtype=float)
            if q.shape != (n,):
                raise ValueError(f"explicit init needs {n} values, got {q.size}")
            if np.any(q < 0) or np.any(q > 1):
                raise ValueError("explicit init values must lie in [0, 1]")
        return np.minimum(q, q_max)


@dataclass
class State:
    weights: np.ndarray
    q: np.ndarray
    s: np.ndarray
    pi: np.ndarray
    u: np.ndarray
    b_diag: np.ndarray
    equilibrium_ok: bool = True


def solve_state(graph: SocialGraph, game: Game, P, q, s_prev=None) -> State:
    """Equilibrium strategies and happiness at fixed weights ``P``."""
    op = HappinessOperator(P, graph, validate=False)
    eq = best_response_sweep(game, graph, P, s_prev, op=op)
    pi = game.payoffs(graph, eq.profile)
    return State(P, np.asarray(q, dtype=float), eq.profile, pi, op.happiness(pi), op.b_diag, eq.converged)


def _mix(x, grad, cfg: DynamicsConfig):
    if cfg.rule == "mixed":
        return (1.0 - cfg.lam) * x + cfg.lam * grad
    return x + cfg.lam * grad


def step_generalized(state: State, graph: SocialGraph, game: Game, cfg: DynamicsConfig) -> State:
    """One synchronous update of every ``q_i`` followed by a fresh equilibrium."""
    grad = generalized_gradients(graph, state.pi, state.u, state.b_diag)
    q = np.clip(_mix(state.q, grad, cfg), 0.0, cfg.q_max)
    return solve_state(graph, game, generalized_weights(graph, q), q, state.s)


def project_rows(P: np.ndarray, adjacency: np.ndarray, q_max: float) -> np.ndarray:
    """Clip to non-negative edge weights and shrink rows whose sum exceeds ``q_max``."""
    P = np.maximum(P, 0.0) * (adjacency > 0)
    rows = P.sum(axis=1)
    over = rows > q_max
    P[over] *= (q_max / rows[over])[:, None]
    # rescaling can overshoot by an ulp; nudge down until the cap holds exactly
    while np.any(over := P.sum(axis=1) > q_max):
        P[over] *= np.nextafter(1.0, 0.0)
    return P


def step_selective(state: State, graph: SocialGraph, game: Game, cfg: DynamicsConfig) -> State:
    """Update every edge weight ``p_ij`` along ``du_i/dp_ij = b_ii (u_j - pi_i)``."""
    grad = selective_gradients(graph, state.pi, state.u, state.b_diag)
    P = project_rows(_mix(state.weights, grad, cfg), graph.adjacency, cfg.q_max)
    return solve_state(graph, game, P, P.sum(axis=1), state.s)


@dataclass(frozen=True)
class SummaryRows:
    """Per-step population averages; ``std_pi`` is the population standard deviation."""

    mean_s: np.ndarray
    mean_pi: np.ndarray
    std_pi: np.ndarray
    mean_q: np.ndarray


def summarize(traj: "Trajectory") -> SummaryRows:
    if traj.q.shape[0] == 0:
        raise ValueError("empty trajectory")
    return SummaryRows(
        traj.s.mean(axis=1), traj.pi.mean(axis=1), traj.pi.std(axis=1, ddof=0), traj.q.mean(axis=1)
    )


@dataclass
class Trajectory:
    """Recorded run; row ``t`` holds the state after ``t`` updates."""

    q: np.ndarray
    s: np.ndarray
    pi: np.ndarray
    u: np.ndarray
    converged: bool
    steps: int
    status: str
    isolated: np.ndarray
    weights: np.ndarray | None = field(default=None, repr=False)

    @property
    def final_q(self) -> np.ndarray:
        return self.q[-1]

    @property
    def final_s(self) -> np.ndarray:
        return self.s[-1]

    def summary(self) -> SummaryRows:
        return summarize(self)


def run(
    graph: SocialGraph,
    game: Game,
    init,
    cfg: DynamicsConfig = DynamicsConfig(),
    rng: np.random.Generator | None = None,
    s_init=None,
) -> Trajectory:
    """Iterate updates until ``q`` moves by less than ``cfg.tol`` for ``cfg.window`` consecutive steps.

    ``init`` is an :class:`InitSpec`, an array of ``q`` values, or in
    selective mode optionally a full weight matrix.  Selective runs that
    start from ``q`` spread it evenly over the neighbors.
    """
    if isinstance(init, InitSpec):
        q0 = init.sample(graph.n, rng, cfg.q_max)
        P0 = None
    else:
        arr = np.array(init, dtype=float)
        if arr.ndim == 2:
            if cfg.mode != "selective":
                raise ValueError("a weight matrix initializes selective runs only")
            P0 = project_rows(arr, graph.adjacency, cfg.q_max)
            q0 = P0.sum(axis=1)
        else:
            q0, P0 = np.clip(arr, 0.0, cfg.q_max), None
            if q0.shape != (graph.n,):
                raise ValueError(f"expected {graph.n} initial values")
    if P0 is None:
        P0 = generalized_weights(graph, q0)
    step = step_generalized if cfg.mode == "generalized" else step_selective
    state = solve_state(graph, game, P0, q0, s_init)

    qs, ss, pis, us = [state.q], [state.s], [state.pi], [state.u]
    calm, status, t = 0, "max_steps", 0
    if cfg.max_steps == 0:
        status = "static"
    if not state.equilibrium_ok:
        status = "equilibrium_failed"
    else:
        for t in range(1, cfg.max_steps + 1):
            new = step(state, graph, game, cfg)
            if cfg.mode == "generalized":
                move = float(np.max(np.abs(new.q - state.q), initial=0.0))
            else:
                move = float(np.max(np.abs(new.weights - state.weights), initial=0.0))
            state = new
            qs.append(state.q)
            ss.append(state.s)
            pis.append(state.pi)
            us.append(state.u)
            if not state.equilibrium_ok:
                status = "equilibrium_failed"
                break
            calm = calm + 1 if move < cfg.tol else 0
            if calm >= cfg.window:
                status = "converged"
                break
    return Trajectory(
        np.array(qs),
        np.array(ss),
        np.array(pis),
        np.array(us),
        status in ("converged", "static"),
        t,
        status,
        graph.isolated.copy(),
        state.weights if cfg.mode == "selective" else None,
    )
