"""Gradient dynamics on a sparse random graph versus the complete graph."""

import numpy as np

from felix import make_complete, make_er
from felix.dynamics import DynamicsConfig, InitSpec, run
from felix.games import PrisonersDilemma
from felix.netgen import STREAM_GRAPH, STREAM_INIT, substream


def main(n: int = 50, seed: int = 0) -> None:
    init = InitSpec("single_seed", value=0.6, node=0)
    cfg = DynamicsConfig(max_steps=5000)
    for label, graph in (
        ("random graph, <k> = 5", make_er(n, 5.0, substream(seed, 0, STREAM_GRAPH))),
        ("complete graph", make_complete(n)),
    ):
        traj = run(graph, PrisonersDilemma(1.0), init, cfg, substream(seed, 0, STREAM_INIT))
        rows = traj.summary()
        print(
            f"{label:24s} status {traj.status:9s} steps {traj.steps:5d}  "
            f"cooperators {rows.mean_s[-1]:.2f}  mean q {rows.mean_q[-1]:.2f}  mean payoff {rows.mean_pi[-1]:.2f}"
        )


if __name__ == "__main__":
    main()
