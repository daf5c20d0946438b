"""Cooperation threshold on the complete graph against one random draw of prosociality."""

import numpy as np

from felix import generalized_weights, make_complete
from felix.equilibrium import best_response_sweep, graphical_nc
from felix.games import PrisonersDilemma, cg_pd_threshold


def main(n: int = 100, c: float = 0.5, seed: int = 0) -> None:
    q = np.random.default_rng(seed).uniform(0, 1, n)
    q_sorted = np.sort(q)[::-1]
    thr = cg_pd_threshold(n, np.arange(1, n + 1), c)
    print(" n_c   q_c(n_c)   n_c-th largest q")
    for k in range(0, n, 10):
        print(f"{k + 1:4d}   {thr[k]:.4f}     {q_sorted[k]:.4f}")
    g = make_complete(n)
    eq = best_response_sweep(PrisonersDilemma(c), g, generalized_weights(g, np.minimum(q, 1 - 1e-6)), np.ones(n))
    print(f"graphical count: {graphical_nc(np.minimum(q, 1 - 1e-6), n, c)}")
    print(f"cooperators at the fixed-q equilibrium reached from all-cooperate: {int(eq.profile.sum())}")


if __name__ == "__main__":
    main()
