"""Closed-form analysis of the 2x2 games with prosocial players.

With ``p_12 = q1`` and ``p_21 = q2`` the happiness of the two players is

    u1 = [(1 - q1) pi1 + q1 (1 - q2) pi2] / (1 - q1 q2)
    u2 = [(1 - q2) pi2 + q2 (1 - q1) pi1] / (1 - q1 q2)

Every analyzer decides on happiness *gains* and treats gains within
``TIE_TOL`` as ties, so the results agree with brute-force checks done
through the generic solver.  At a tie the status-quo strategy wins.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numpy as np

from ..core import Q_MAX
from .base import TIE_TOL, Game

NE = "NE"
AE_1 = "AE_1_altruist"
AE_2 = "AE_2_altruist"
BE = "BE"


def altruism_threshold(q_other):
    """Prosociality above which a player gives up her own preferred outcome.

    Shared by Hawk-Dove, Ultimatum/Dictator and coordination: ``1 / (2 - q_other)``.
    """
    return 1.0 / (2.0 - np.asarray(q_other, dtype=float))


def _check_q(*qs):
    for q in qs:
        if not (0.0 <= q < 1.0):
            raise ValueError(f"prosociality must lie in [0, 1), got {q}")


def two_player_happiness(q1, q2, pi1, pi2):
    d = 1.0 - q1 * q2
    return ((1 - q1) * pi1 + q1 * (1 - q2) * pi2) / d, ((1 - q2) * pi2 + q2 * (1 - q1) * pi1) / d


def _yield_gain(q_self, q_other):
    """``(1 - 2 q_self + q_self q_other) / (1 - q_self q_other)`` via the shared threshold."""
    return (2.0 - q_other) * (altruism_threshold(q_other) - q_self) / (1.0 - q_self * q_other)


def _weak_set(gain: float, hi, lo, tol: float) -> tuple:
    """Strategies that are weakly best when ``gain = u(hi) - u(lo)``."""
    if gain > tol:
        return (hi,)
    if gain < -tol:
        return (lo,)
    return (lo, hi)


@dataclass(frozen=True)
class EquilibriumLabel:
    label: str
    profile: tuple

    @property
    def altruist(self) -> int | None:
        return {AE_1: 1, AE_2: 2}.get(self.label)


# -- prisoners' dilemma -------------------------------------------------------


def pd2_cooperation_gain(q_self, q_other, c):
    """Happiness gain of cooperating for a player, whatever the opponent does."""
    return (q_self * (1 - q_other) - c * (1 - q_self)) / (1 - q_self * q_other)


def pd2_thresholds(q1, q2):
    """Lower and upper cost thresholds ``(a(1-b)/(1-a), b(1-a)/(1-b))``, ``a <= b``."""
    a, b = min(q1, q2), max(q1, q2)
    return a * (1 - b) / (1 - a), b * (1 - a) / (1 - b)


def pd2_equilibria(q1, q2, c, tol: float = TIE_TOL) -> frozenset:
    """All pure equilibria of the modified PD (cooperation is dominant or dominated)."""
    _check_q(q1, q2)
    s1 = _weak_set(pd2_cooperation_gain(q1, q2, c), 1, 0, tol)
    s2 = _weak_set(pd2_cooperation_gain(q2, q1, c), 1, 0, tol)
    return frozenset(product(s1, s2))


def pd2_classify(q1, q2, c, tol: float = TIE_TOL) -> EquilibriumLabel:
    """Outcome of the gradient dynamics started from ``(q1, q2)``.

    With ``a <= b`` the smaller and larger prosociality: NE when
    ``c > b(1-a)/(1-b)``, BE when ``c < a(1-b)/(1-a)``, otherwise the
    less prosocial player stays selfish and the other becomes the altruist.
    Ties resolve towards NE (and away from BE).
    """
    _check_q(q1, q2)
    if not 0 < c < 1:
        raise ValueError(f"PD cost must lie in (0, 1), got {c}")
    hi_is_2 = q2 >= q1
    a, b = (q1, q2) if hi_is_2 else (q2, q1)
    if pd2_cooperation_gain(b, a, c) <= tol:
        return EquilibriumLabel(NE, (0, 0))
    if pd2_cooperation_gain(a, b, c) > tol:
        return EquilibriumLabel(BE, (1, 1))
    return EquilibriumLabel(AE_2, (0, 1)) if hi_is_2 else EquilibriumLabel(AE_1, (1, 0))


# -- hawk-dove ---------------------------------------------------------------


def hawkdove_hawk_gain(q_self, q_other, s_other):
    """Happiness gain of playing hawk over dove (payoffs ``1 + s1 - s2 - 2 s1 s2``)."""
    return _yield_gain(q_self, q_other) - 2.0 * s_other


def hawkdove_solve(q1, q2, tol: float = TIE_TOL) -> frozenset:
    """Pure equilibria ``(s1, s2)`` with hawk = 1.

    Reduces to: only ``(0, 1)`` when ``q1 > 1/(2 - q2)``, only ``(1, 0)``
    when ``q2 > 1/(2 - q1)``, both otherwise.
    """
    _check_q(q1, q2)
    eqs = set()
    for s1, s2 in product((0, 1), repeat=2):
        if s1 in _weak_set(hawkdove_hawk_gain(q1, q2, s2), 1, 0, tol) and s2 in _weak_set(
            hawkdove_hawk_gain(q2, q1, s1), 1, 0, tol
        ):
            eqs.add((s1, s2))
    return frozenset(eqs)


# -- ultimatum / dictator ----------------------------------------------------


@dataclass(frozen=True)
class UltimatumOutcome:
    s1: float
    s2: float
    u1: float
    u2: float
    label: str


def ultimatum_happiness(q1, q2, s1, s2):
    d = 1.0 - q1 * q2
    u1 = (q1 * (1 - q2) + (1 - 2 * q1 + q1 * q2) * s1) * s2 / d
    u2 = (1 - q2 - (1 - 2 * q2 + q1 * q2) * s1) * s2 / d
    return u1, u2


def ultimatum_solve(q1, q2, refusable: bool = True, tol: float = TIE_TOL) -> UltimatumOutcome:
    """Proposer share ``s1`` and responder acceptance ``s2``.

    Accepting is always weakly best, so the proposer keeps the whole pie
    unless ``q1 > 1/(2 - q2)``, in which case she gives it all away.  The
    dictator game (``refusable=False``) has identical predictions.
    """
    _check_q(q1, q2)
    s2 = 1.0
    s1 = 1.0 if _yield_gain(q1, q2) >= -tol else 0.0
    u1, u2 = ultimatum_happiness(q1, q2, s1, s2)
    label = AE_2 if s1 == 1.0 else AE_1
    return UltimatumOutcome(s1, s2, float(u1), float(u2), label)


# -- coordination ------------------------------------------------------------


def coordination_plus_gain(q_self, q_other, eps, s_other, player: int):
    """Gain of choosing +1 over -1; player 1 prefers +1, player 2 prefers -1."""
    sign = 1.0 if player == 1 else -1.0
    return sign * 2.0 * eps * _yield_gain(q_self, q_other) + 2.0 * s_other


def coordination_classify(q1, q2, eps, tol: float = TIE_TOL) -> tuple[frozenset, str]:
    """Equilibrium profiles and the prosociality limit label.

    Both coordinated profiles remain equilibria for any prosociality; what
    changes is who ends up yielding.  Label ``AE_1_altruist`` when
    ``q1 > 1/(2 - q2)``, the mirror when ``q2 > 1/(2 - q1)``, ``NE`` otherwise.
    """
    _check_q(q1, q2)
    if not 0.0 <= eps < 0.5:
        raise ValueError(f"coordination strength must lie in [0, 1/2), got {eps}")
    eqs = set()
    for s1, s2 in product((-1, 1), repeat=2):
        if s1 in _weak_set(coordination_plus_gain(q1, q2, eps, s2, 1), 1, -1, tol) and s2 in _weak_set(
            coordination_plus_gain(q2, q1, eps, s1, 2), 1, -1, tol
        ):
            eqs.add((s1, s2))
    if _yield_gain(q1, q2) < -tol:
        label = AE_1
    elif _yield_gain(q2, q1) < -tol:
        label = AE_2
    else:
        label = NE
    return frozenset(eqs), label


# -- the same games as Game objects on a two-node graph -----------------------


class _TwoPlayer(Game):
    def _check(self, graph):
        if graph.n != 2 or graph.num_edges != 1:
            raise ValueError(f"{self.name} is played on a single edge")


class HawkDove(_TwoPlayer):
    name = "hawkdove"
    _space = np.array([0.0, 1.0])

    def strategy_space(self, graph, i):
        return self._space

    def payoffs(self, graph, s):
        self._check(graph)
        s1, s2 = s
        return np.array([1 + s1 - s2 - 2 * s1 * s2, 1 + s2 - s1 - 2 * s1 * s2], dtype=float)


class Ultimatum(_TwoPlayer):
    """Proposer (node 0) offers ``1 - s1``; responder (node 1) accepts with ``s2 = 1``."""

    name = "ultimatum"

    def __init__(self, refusable: bool = True, grid: int = 101):
        self.refusable = refusable
        self.grid = np.linspace(0.0, 1.0, grid)

    def strategy_space(self, graph, i):
        if i == 0:
            return self.grid
        return np.array([1.0, 0.0]) if self.refusable else np.array([1.0])

    def default_profile(self, graph):
        # the classic outcome: keep everything, offer accepted
        return np.array([1.0, 1.0])

    def payoffs(self, graph, s):
        self._check(graph)
        s1, s2 = s
        return np.array([s1 * s2, (1 - s1) * s2], dtype=float)


class Coordination(_TwoPlayer):
    name = "coordination"
    _space = np.array([-1.0, 1.0])

    def __init__(self, eps: float):
        if not 0.0 <= eps < 0.5:
            raise ValueError(f"coordination strength must lie in [0, 1/2), got {eps}")
        self.eps = eps

    def strategy_space(self, graph, i):
        return self._space

    def payoffs(self, graph, s):
        self._check(graph)
        s1, s2 = s
        return np.array([(s1 + s2) * self.eps + s1 * s2, -(s1 + s2) * self.eps + s1 * s2], dtype=float)


def two_player_weights(q1, q2, q_max: float = Q_MAX) -> np.ndarray:
    q1, q2 = min(q1, q_max), min(q2, q_max)
    return np.array([[0.0, q1], [q2, 0.0]])
