"""Closed forms on the complete graph with generalized altruism."""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from ..core import Q_MAX, HappinessOperator, generalized_weights
from ..netgen import make_complete


class CGHappiness(NamedTuple):
    u_c: float
    u_d: float
    pi_c: float
    pi_d: float


def _check_counts(n, n_c):
    if not 1 <= n_c <= n:
        raise ValueError(f"need 1 <= n_c <= n, got n_c={n_c}, n={n}")


def cg_pd_happiness(n: int, n_c: int, q: float, c: float) -> CGHappiness:
    """Happiness of cooperators (all at prosociality ``q``) and of selfish defectors."""
    _check_counts(n, n_c)
    if not 0.0 <= q < 1.0:
        raise ValueError(f"q must lie in [0, 1), got {q}")
    pi_c = n_c - 1 - c
    pi_d = float(n_c)
    u_c = ((1 - q) * pi_c + q * (n - n_c) / (n - 1) * n_c) / (1 - q * (n_c - 1) / (n - 1))
    return CGHappiness(u_c, pi_d, pi_c, pi_d)


def cg_pd_threshold(n: int, n_c, c: float):
    """Prosociality below which one of ``n_c`` cooperators would rather be a selfish defector."""
    n_c = np.asarray(n_c)
    if np.any(n_c < 1) or np.any(n_c > n):
        raise ValueError(f"need 1 <= n_c <= n, got {n_c}")
    out = c / (c + (n - n_c) / (n - 1))
    return float(out) if out.ndim == 0 else out


def cg_pd_defection_gap(n: int, n_c: int, q: float, c: float) -> float:
    """``pi_d(n_c) - u_c(n_c + 1)``: what a defector gives up by joining the cooperators."""
    if not 0 <= n_c < n:
        raise ValueError(f"need 0 <= n_c < n, got n_c={n_c}, n={n}")
    return float(n_c) - cg_pd_happiness(n, n_c + 1, q, c).u_c


# -- wealth-only model ----------------------------------------------------------


def wealth_happiness(q, w) -> np.ndarray:
    """Happiness on the complete graph when payoffs are fixed wealth levels.

    ``u_i = f_i w_i + g_i / (1 - G) sum_j f_j w_j`` with
    ``f_i = (n-1)(1-q_i)/(n-1+q_i)``, ``g_i = q_i/(n-1+q_i)``, ``G = sum g``.
    """
    q = np.asarray(q, dtype=float)
    w = np.asarray(w, dtype=float)
    n = q.size
    if w.shape != q.shape:
        raise ValueError("q and w must have the same length")
    if np.any(q < 0) or np.any(q >= 1):
        raise ValueError("q must lie in [0, 1)")
    f = (n - 1) * (1 - q) / (n - 1 + q)
    g = q / (n - 1 + q)
    G = g.sum()
    assert G < 1, "sum of g_i reached 1"
    return f * w + g / (1 - G) * np.dot(f, w)


def _extreme_reciprocity(n, selfish, q_max):
    q = np.full(n, q_max)
    q[selfish] = 0.0
    return HappinessOperator(generalized_weights(make_complete(n), q)).b_diag


def wealth_gradient_extremes(
    n: int, w, selfish, c: float = 0.0, with_pd: bool = False, exact: bool = False, q_max: float = Q_MAX
) -> np.ndarray:
    """``du_i/dq_i`` with the population split into selfish (q=0) and fully prosocial (q=1) nodes.

    ``selfish`` lists the q=0 nodes; the others sit at q=1, evaluated at
    ``q_max`` where ``b_ii`` is needed.  With ``with_pd`` the payoffs are
    the PD payoffs offset by ``w`` and every prosocial node cooperates.

    Without the PD, the published limits read ``(1 - 1/n) b (w_f - w_i)``
    for selfish and ``b ((n+1)/(n-1) w_f - w_i)`` for prosocial nodes.
    Solving the happiness system directly gives ``n/(n-1) b (w_f - w_i)``
    and ``b (w_f - w_i)`` instead; ``exact=True`` returns the latter.
    Both forms agree on the sign for selfish nodes.  With the PD the
    published and direct forms coincide.
    """
    w = np.asarray(w, dtype=float)
    if w.shape != (n,):
        raise ValueError(f"expected {n} wealth values")
    selfish = np.zeros(n, dtype=bool) | np.isin(np.arange(n), np.asarray(selfish, dtype=int))
    if not selfish.any():
        raise ValueError("no selfish nodes: the selfish mean wealth is undefined")
    w_f = w[selfish].mean()
    b = _extreme_reciprocity(n, selfish, q_max)
    diff = w_f - w
    if with_pd:
        grad = np.where(selfish, n / (n - 1) * b * diff, b * (1 + c + diff))
    elif exact:
        grad = np.where(selfish, n / (n - 1) * b * diff, b * diff)
    else:
        grad = np.where(selfish, (1 - 1 / n) * b * diff, b * ((n + 1) / (n - 1) * w_f - w))
    return grad


def selfish_survivor_interval(w, c: float) -> tuple[float, float]:
    """Wealth range ``[w_max - 1 - c, w_max]`` a lone selfish survivor must fall in."""
    w_max = float(np.max(w))
    return w_max - 1 - c, w_max
