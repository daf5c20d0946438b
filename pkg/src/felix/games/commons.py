"""Tragedy of the commons with a prosocial group.

Payoffs are ``pi_i = s_i V(S)`` with ``S`` the total effort and ``V`` a
decreasing resource value that turns negative past ``S0``.  In the
two-group configuration (``n_c`` nodes at prosociality ``q`` on the
complete graph, the rest selfish) every effort is a multiple of
``V/|V'|`` and every payoff or happiness a multiple of ``V^2/|V'|``; the
closed forms below are expressed in those units.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from .base import Game


# -- resource value functions -------------------------------------------------


@dataclass(frozen=True)
class LinearResource:
    """``V(S) = 1 - S / S0``."""

    S0: float = 1.0
    kind = "linear"

    def V(self, S):
        return 1.0 - S / self.S0

    def dV(self, S):
        return -1.0 / self.S0 + 0.0 * S


@dataclass(frozen=True)
class PowerResource:
    """``V(S) = 1 - (S / S0)**alpha``; concave in ``S`` for ``alpha > 1``."""

    S0: float = 1.0
    alpha: float = 2.0
    kind = "power"

    def V(self, S):
        return 1.0 - np.sign(S) * np.abs(S / self.S0) ** self.alpha

    def dV(self, S):
        return -self.alpha / self.S0 * np.abs(S / self.S0) ** (self.alpha - 1.0)


def make_resource(kind: str = "linear", S0: float = 1.0, alpha: float = 2.0):
    if kind == "linear":
        return LinearResource(S0)
    if kind == "power":
        return PowerResource(S0, alpha)
    raise ValueError(f"unknown resource kind {kind!r}")


class InvalidResource(ValueError):
    pass


def _check_resource(vspec, samples: int = 65) -> None:
    S0 = vspec.S0
    if not S0 > 0:
        raise InvalidResource(f"S0 must be positive, got {S0}")
    if abs(vspec.V(S0)) > 1e-12:
        raise InvalidResource(f"V(S0) = {vspec.V(S0)} is not zero")
    xs = np.linspace(0.0, S0, samples)[1:-1]
    if np.any(np.asarray(vspec.dV(xs)) >= 0) or np.any(np.diff(vspec.V(xs)) >= 0):
        raise InvalidResource("V must be strictly decreasing on (0, S0)")


# -- sigma and the retreat threshold -----------------------------------------


def _sigma_coeffs(n, n_c, form):
    """Coefficients ``(a, b, c)`` of the numerator ``a + b q + c q^2``."""
    if form == "printed":
        return (n - 1) ** 2, -(n - 1) * (2 * n - 1), n * (n_c + 1) - 2 * n_c
    if form == "exact":
        return (n - 1) ** 2, -(2 * n * n - 5 * n + 3), n * n_c - 3 * n + 2
    raise ValueError(f"unknown sigma form {form!r}")


def _sigma_numerator(n, n_c, q, form):
    a, b, c = _sigma_coeffs(n, n_c, form)
    return a + b * q + c * q * q


def _sigma_denominator(n, q, form):
    if form == "printed":
        return (1 - q) * (n - 1) * (n - q - 1)
    return (1 - q) * (n - 1) * (n + q - 1)


def toc_sigma(n: int, n_c: int, q: float, form: str = "printed") -> float:
    """Prosocial effort relative to selfish effort, clipped at zero.

    ``form="printed"`` is the published closed form.  ``form="exact"``
    is the first-order condition of the happiness maximization solved
    without approximation; the two differ by
    ``2 q^2 (n_c - 1) / ((n - q - 1)(n + q - 1))`` before clipping.
    """
    if not 1 <= n_c <= n - 1:
        raise ValueError(f"need 1 <= n_c <= n - 1, got n_c={n_c}, n={n}")
    if not 0.0 <= q < 1.0:
        raise ValueError(f"q must lie in [0, 1), got {q}")
    if q == 0.0:
        return 1.0
    val = _sigma_numerator(n, n_c, q, form) / _sigma_denominator(n, q, form)
    return max(0.0, float(val))


class NoRetreat(ValueError):
    """The prosocial group never stops contributing for q in (0, 1]."""


def toc_qc(n: int, n_c: int, form: str = "printed") -> float:
    """Smallest ``q`` in (0, 1] at which the prosocial group stops contributing.

    This is the smaller root of the quadratic numerator of sigma.  The
    "+" root of the quadratic lies above 1 for the published parameters,
    so the root is chosen by value rather than by sign convention.
    """
    if not 1 <= n_c <= n - 1:
        raise ValueError(f"need 1 <= n_c <= n - 1, got n_c={n_c}, n={n}")
    a, b, c = _sigma_coeffs(n, n_c, form)
    roots = []
    if abs(c) < 1e-300:
        roots = [-a / b]
    else:
        disc = b * b - 4 * a * c
        if disc >= 0:
            sq = math.sqrt(disc)
            # numerically stable pair
            t = -0.5 * (b + math.copysign(sq, b))
            roots = [t / c, a / t] if t != 0 else [-b / (2 * c)]
    inside = sorted(r for r in roots if 0.0 < r <= 1.0)
    if not inside:
        raise NoRetreat(f"no root of sigma in (0, 1] for n={n}, n_c={n_c}")
    return inside[0]


# -- total effort -------------------------------------------------------------


def toc_total_effort(vspec=None, n_effective: float = 1.0) -> float:
    """Solve ``S = n_effective V(S) / |V'(S)|`` by bisection on (0, S0).

    ``n_effective = n`` gives the Nash total effort of ``n`` selfish
    players, ``n_effective = 1`` the social optimum.
    """
    vspec = LinearResource() if vspec is None else vspec
    _check_resource(vspec)
    if not n_effective >= 1:
        raise ValueError(f"n_effective must be >= 1, got {n_effective}")
    S0 = vspec.S0

    def g(S):
        return S * abs(vspec.dV(S)) - n_effective * vspec.V(S)

    S = optimize.bisect(g, 0.0, S0, xtol=1e-15 * S0, rtol=4 * np.finfo(float).eps, maxiter=400)
    resid = abs(S - n_effective * vspec.V(S) / abs(vspec.dV(S)))
    if resid > 1e-10 * S0:
        raise RuntimeError(f"total effort residual {resid:.3e} above tolerance")
    return float(S)


# -- two-group configuration --------------------------------------------------


def _two_group_reciprocity(n, n_c, q):
    """``b_ii`` of a prosocial node when ``n_c`` nodes share prosociality ``q``."""
    return 1.0 / (1.0 - q * q * (n_c - 1) / ((n - 1) * (n - 1 - q * (n_c - 2))))


@dataclass(frozen=True)
class TwoGroupToC:
    """Equilibrium of the two-group commons.

    ``s_*`` are in units of ``V/|V'|``; ``pi_*``, ``u_*`` and ``grad_*`` in
    units of ``V^2/|V'|`` (all evaluated at ``S_star``).
    """

    n: int
    n_c: int
    q: float
    sigma: float
    S_star: float
    effort_unit: float
    happiness_unit: float
    s_c: float
    s_d: float
    pi_c: float
    pi_d: float
    u_c: float
    u_d: float
    grad_c: float
    grad_d: float

    @property
    def mean_effort(self) -> float:
        """``S*/n`` in effort units."""
        return (self.n_c * self.s_c + (self.n - self.n_c) * self.s_d) / self.n

    def efforts(self) -> np.ndarray:
        """Absolute effort per node, prosocial group first."""
        return np.r_[np.full(self.n_c, self.s_c), np.full(self.n - self.n_c, self.s_d)] * self.effort_unit


def toc_two_group(n: int, n_c: int, q: float, vspec=None, form: str = "printed") -> TwoGroupToC:
    vspec = LinearResource() if vspec is None else vspec
    sig = toc_sigma(n, n_c, q, form)
    S = toc_total_effort(vspec, n - n_c + n_c * sig)
    V, dV = vspec.V(S), abs(vspec.dV(S))
    unit_s, unit_u = V / dV, V * V / dV

    pi_c, pi_d = sig, 1.0
    u_d = pi_d
    u_c = ((1 - q) * pi_c + q * (n - n_c) / (n - 1) * u_d) / (1 - q * (n_c - 1) / (n - 1))
    b_c = _two_group_reciprocity(n, n_c, q)
    grad_c = b_c * (((n_c - 1) * u_c + (n - n_c) * u_d) / (n - 1) - pi_c)
    grad_d = (n_c * u_c + (n - n_c - 1) * u_d) / (n - 1) - pi_d
    return TwoGroupToC(n, n_c, q, sig, S, unit_s, unit_u, sig, 1.0, pi_c, pi_d, u_c, u_d, grad_c, grad_d)


class Commons(Game):
    """Continuous-effort commons game, ``pi_i = s_i V(S)``."""

    name = "toc"

    def __init__(self, vspec=None):
        self.vspec = LinearResource() if vspec is None else vspec
        _check_resource(self.vspec)

    def payoffs(self, graph, s):
        s = np.asarray(s, dtype=float)
        return s * self.vspec.V(s.sum())

    def strategy_space(self, graph, i):
        raise TypeError("commons efforts are continuous; use toc_numeric_equilibrium")
