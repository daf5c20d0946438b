"""Seeded construction of interaction graphs.

All randomness goes through numpy's PCG64 seeded by a ``SeedSequence``.
Experiment code derives independent substreams with :func:`substream`, so
graph draws never shift when an unrelated draw (initial prosociality,
wealth) is added or removed.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .graph import SocialGraph

# Stable stream identifiers used as the last word of the SeedSequence entropy.
STREAM_GRAPH = 0
STREAM_INIT = 1
STREAM_WEALTH = 2


def substream(seed: int, replicate: int, stream: int) -> np.random.Generator:
    """Independent generator for ``(seed, replicate, stream)``."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([int(seed), int(replicate), int(stream)])))


def _as_generator(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    if isinstance(seed, np.random.SeedSequence):
        return np.random.Generator(np.random.PCG64(seed))
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(int(seed))))


@dataclass(frozen=True)
class GraphSpec:
    kind: str
    n: int
    mean_degree: float | None = None

    def __post_init__(self):
        if self.kind not in ("complete", "erdos_renyi"):
            raise ValueError(f"unknown graph kind {self.kind!r}")
        if self.kind == "erdos_renyi":
            if self.mean_degree is None or not (0 < self.mean_degree < self.n):
                raise ValueError(f"erdos_renyi needs 0 < mean_degree < n, got {self.mean_degree}")

    def build(self, rng) -> SocialGraph:
        if self.kind == "complete":
            return make_complete(self.n)
        return make_er(self.n, self.mean_degree, rng)


def make_complete(n: int) -> SocialGraph:
    if n < 2:
        raise ValueError(f"complete graph needs n >= 2, got {n}")
    return SocialGraph(n, combinations(range(n), 2))


def make_er(n: int, mean_degree: float, seed) -> SocialGraph:
    """G(n, p) graph with ``p = mean_degree / (n - 1)``.

    Pairs ``i < j`` are visited in lexicographic order and each consumes one
    uniform draw, so the edge set is a pure function of ``(n, mean_degree,
    seed)``.  Isolated nodes are kept; see ``SocialGraph.isolated``.
    """
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    if not (0 < mean_degree < n):
        raise ValueError(f"mean_degree must lie in (0, n), got {mean_degree}")
    p = min(1.0, mean_degree / (n - 1))
    rng = _as_generator(seed)
    iu, ju = np.triu_indices(n, 1)
    keep = rng.random(iu.size) < p
    return SocialGraph(n, zip(iu[keep].tolist(), ju[keep].tolist()))
