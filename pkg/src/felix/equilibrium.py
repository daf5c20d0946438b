"""Strategy equilibria at fixed prosociality.

A profile is an equilibrium when no node can raise its own happiness by
changing its strategy alone.  Nodes revise sequentially (ascending order
by default) and keep their current strategy unless an alternative beats
it by more than the tie tolerance.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numpy as np
from scipy import optimize

from .core import Q_MAX, HappinessOperator, generalized_weights, solve_happiness
from .games.base import Game, tie_tolerance
from .games.commons import LinearResource, _check_resource
from .games.complete_graph import cg_pd_threshold
from .graph import SocialGraph


class EquilibriumError(RuntimeError):
    """A best-response iteration failed to reach a fixed point."""


@dataclass(frozen=True)
class EquilibriumResult:
    profile: np.ndarray
    converged: bool
    sweeps: int
    cycle_detected: bool = False

    def raise_if_failed(self) -> "EquilibriumResult":
        if not self.converged:
            why = "best responses cycle" if self.cycle_detected else "sweep limit reached"
            raise EquilibriumError(f"no equilibrium after {self.sweeps} sweeps ({why})")
        return self


def _order(n, order):
    if order == "ascending":
        return range(n)
    if order == "descending":
        return range(n - 1, -1, -1)
    raise ValueError(f"order must be 'ascending' or 'descending', got {order!r}")


def best_response_sweep(
    game: Game,
    graph: SocialGraph,
    P,
    s_init=None,
    max_sweeps: int | None = None,
    order: str = "ascending",
    op: HappinessOperator | None = None,
) -> EquilibriumResult:
    """Iterate sequential best responses until a full sweep changes nothing.

    ``op`` may carry an already factored operator for ``P``.  Profiles seen
    at the end of each sweep are remembered; revisiting one means the
    revision process cycles, which is reported instead of guessed around.
    """
    op = HappinessOperator(P, graph) if op is None else op
    s = game.default_profile(graph) if s_init is None else game.validate_profile(graph, s_init)
    s = np.array(s, dtype=float)
    max_sweeps = 10 * graph.n if max_sweeps is None else max_sweeps
    nodes = list(_order(graph.n, order))
    seen = {s.tobytes()}
    separable = getattr(game, "separable", False)

    for sweep in range(1, max_sweeps + 1):
        tol = tie_tolerance(game.payoffs(graph, s))
        if separable:
            # best responses do not depend on the others' play, so a
            # sequential sweep is the simultaneous update
            new = game.best_responses(graph, s, op, tol)
            changed = not np.array_equal(new, s)
            s = new
        else:
            changed = False
            for i in nodes:
                b = game.best_response(graph, s, op, i, tol)
                if b != s[i]:
                    s[i] = b
                    changed = True
        if not changed:
            return EquilibriumResult(s, True, sweep)
        key = s.tobytes()
        if key in seen:
            return EquilibriumResult(s, False, sweep, cycle_detected=True)
        seen.add(key)
    return EquilibriumResult(s, False, max_sweeps)


@dataclass(frozen=True)
class OrderDiagnostic:
    ascending: EquilibriumResult
    descending: EquilibriumResult

    @property
    def order_dependent(self) -> bool:
        return not np.array_equal(self.ascending.profile, self.descending.profile)


def sweep_order_diagnostic(game, graph, P, s_init=None, max_sweeps=None) -> OrderDiagnostic:
    """Run both revision orders from the same start; differing results flag multiple equilibria."""
    op = HappinessOperator(P, graph)
    return OrderDiagnostic(
        best_response_sweep(game, graph, P, s_init, max_sweeps, "ascending", op),
        best_response_sweep(game, graph, P, s_init, max_sweeps, "descending", op),
    )


def profitable_deviations(game: Game, graph: SocialGraph, P, s, tol: float | None = None) -> list:
    """Unilateral deviations that raise the deviator's happiness by more than ``tol``.

    Happiness is recomputed from scratch with :func:`solve_happiness` for
    every trial profile, independently of the sweep machinery.
    """
    s = np.asarray(s, dtype=float)
    pi = game.payoffs(graph, s)
    tol = tie_tolerance(pi) if tol is None else tol
    u = solve_happiness(graph, P, pi).u
    out = []
    for i in range(graph.n):
        for v in game.strategy_space(graph, i):
            if v == s[i]:
                continue
            trial = s.copy()
            trial[i] = v
            u_i = solve_happiness(graph, P, game.payoffs(graph, trial)).u[i]
            if u_i - u[i] > tol:
                out.append((i, float(v), float(u_i - u[i])))
    return out


def is_fixed_point(game: Game, graph: SocialGraph, P, s, tol: float | None = None) -> bool:
    return not profitable_deviations(game, graph, P, s, tol)


def exhaustive_fixed_points(game: Game, graph: SocialGraph, P, max_nodes: int = 12) -> set:
    """Every pure profile with no profitable unilateral deviation (finite strategy sets)."""
    if graph.n > max_nodes:
        raise ValueError(f"exhaustive search is limited to {max_nodes} nodes")
    op = HappinessOperator(P, graph)
    spaces = [np.asarray(game.strategy_space(graph, i), dtype=float) for i in range(graph.n)]
    found = set()
    for prof in product(*spaces):
        s = np.array(prof)
        pi = game.payoffs(graph, s)
        u = op.W @ pi
        tol = tie_tolerance(pi)
        ok = True
        for i in range(graph.n):
            _, vals = game.node_values(graph, s, op, i)
            if np.max(vals) - u[i] > tol:
                ok = False
                break
        if ok:
            found.add(tuple(float(x) for x in prof))
    return found


def sequential_ultimatum(game, graph, P):
    """Proposer-then-responder brute force on the strategy grids.

    The responder answers every offer; the proposer then picks the grid
    share that maximizes her happiness given that answer.  Status-quo
    strategies (keep the pie, accept) win ties.
    """
    op = HappinessOperator(P, graph)
    grid = game.strategy_space(graph, 0)
    answers = game.strategy_space(graph, 1)
    replies = np.empty(len(grid))
    u1 = np.empty(len(grid))
    for k, s1 in enumerate(grid):
        vals = np.array([op.W[1] @ game.payoffs(graph, (s1, a)) for a in answers])
        tol = tie_tolerance(game.payoffs(graph, (s1, answers[0])))
        best = answers[0] if vals.max() - vals[0] <= tol else answers[int(np.argmax(vals))]
        replies[k] = best
        u1[k] = op.W[0] @ game.payoffs(graph, (s1, best))
    keep = int(np.argmin(np.abs(grid - 1.0)))
    best = int(np.argmax(u1))
    k = keep if u1[best] - u1[keep] <= tie_tolerance([1.0]) else best
    return float(grid[k]), float(replies[k])


# -- continuous efforts in the commons ----------------------------------------


def _commons_best_effort(W_ii, R_i, rest, vspec, x0):
    """Maximize ``u_i(x) = V(x + rest) (W_ii x + R_i)`` over ``x`` in [0, 10 S0]."""
    hi = 10.0 * vspec.S0

    def neg_u(x):
        return -vspec.V(x + rest) * (W_ii * x + R_i)

    def du(x):
        return vspec.dV(x + rest) * (W_ii * x + R_i) + W_ii * vspec.V(x + rest)

    res = optimize.minimize_scalar(neg_u, bounds=(0.0, hi), method="bounded", options={"xatol": 1e-10})
    x = float(res.x)
    if du(0.0) <= 0.0 and neg_u(0.0) <= neg_u(x):
        return 0.0
    # polish on the derivative; the bracket widens until it changes sign
    h = max(1e-6, 1e-3 * abs(x))
    lo, up = max(0.0, x - h), min(hi, x + h)
    while not (du(lo) > 0 > du(up)) and (lo > 0.0 or up < hi):
        lo, up = max(0.0, lo - h), min(hi, up + h)
        h *= 2
    if du(lo) > 0 > du(up):
        x = optimize.brentq(du, lo, up, xtol=1e-15, rtol=4 * np.finfo(float).eps)
    return x


def _polish_foc(W, diag, s, vspec):
    """Solve ``du_i/ds_i = 0`` on an active set, other efforts held at 0.

    The active set starts from the nodes with positive effort and is
    corrected until every active effort is non-negative and no idle node
    gains from a small positive effort.
    """
    active = s > 0
    x = s.copy()
    for _ in range(s.size + 1):
        if not active.any():
            return None
        Wa = W[np.ix_(active, active)]

        def foc(y):
            S = y.sum()
            return vspec.dV(S) * (Wa @ y) + diag[active] * vspec.V(S)

        sol = optimize.root(foc, np.maximum(x[active], 1e-12), method="hybr", options={"xtol": 1e-14})
        if not sol.success:
            return None
        x = np.zeros_like(s)
        x[active] = sol.x
        if np.any(sol.x < 0):
            active &= x > 0
            continue
        S = x.sum()
        idle_gain = vspec.dV(S) * (W @ x) + diag * vspec.V(S)
        wake = ~active & (idle_gain > 0)
        if not wake.any():
            return x
        active |= wake
    return None


def toc_numeric_equilibrium(
    graph: SocialGraph,
    q,
    vspec=None,
    s_init=None,
    tol: float = 1e-8,
    max_iter: int = 2_000,
    q_max: float = Q_MAX,
    accelerate_after: int = 10,
) -> EquilibriumResult:
    """Effort equilibrium of the commons by Gauss-Seidel best responses.

    Each node maximizes its happiness over its own effort with the others
    fixed.  Iteration stops when no effort moves by more than ``tol``
    (relative to ``S0``) in a full sweep.  Plain sweeps contract slowly on
    large complete graphs, so after ``accelerate_after`` sweeps the
    first-order conditions of the nodes with positive effort are solved
    directly; the polished profile must still pass an ordinary sweep.
    """
    vspec = LinearResource() if vspec is None else vspec
    _check_resource(vspec)
    q = np.minimum(np.asarray(q, dtype=float), q_max)
    W = HappinessOperator(generalized_weights(graph, q), graph).W
    n = graph.n
    s = np.full(n, vspec.S0 / (n + 1)) if s_init is None else np.array(s_init, dtype=float)
    if s.shape != (n,) or np.any(s < 0):
        raise ValueError("efforts must be a non-negative vector with one entry per node")
    diag = np.diag(W).copy()

    def sweep(x):
        x = np.maximum(np.asarray(x, dtype=float), 0.0)
        Wx, total = W @ x, x.sum()
        for i in range(n):
            old = x[i]
            new = _commons_best_effort(diag[i], Wx[i] - diag[i] * old, total - old, vspec, old)
            if new != old:
                Wx += W[:, i] * (new - old)
                total += new - old
                x[i] = new
        return x

    step = tol * vspec.S0
    for it in range(1, max_iter + 1):
        new = sweep(s)
        move = float(np.max(np.abs(new - s)))
        s = new
        if move <= step:
            return EquilibriumResult(s, True, it)
        if it % accelerate_after == 0:
            polished = _polish_foc(W, diag, s, vspec)
            if polished is not None:
                s = polished
    return EquilibriumResult(s, False, max_iter)


# -- graphical reading of the complete-graph PD --------------------------------


def graphical_nc(q_values, n: int, c: float, q_max: float = Q_MAX) -> int:
    """Largest ``n_c`` whose ``n_c``-th largest prosociality clears ``q_c(n_c)``.

    A value at the cap stands for full prosociality and clears every
    threshold, including ``q_c(n) = 1``.
    """
    q = np.sort(np.asarray(q_values, dtype=float))[::-1]
    if q.size != n:
        raise ValueError(f"expected {n} prosociality values")
    ranks = np.arange(1, n + 1)
    thr = cg_pd_threshold(n, ranks, c)
    ok = (q >= thr) | (q >= q_max)
    hits = np.nonzero(ok)[0]
    return int(hits[-1] + 1) if hits.size else 0
