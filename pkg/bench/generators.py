"""
Seeded random instances.

Every generator draws from ``numpy.random.Generator(PCG64(seed))`` in a fixed
order, so a spec and seed give the same graph on every platform.
"""

import itertools
from dataclasses import dataclass, field
from typing import FrozenSet, Optional, Tuple

import numpy as np

from graphs.exceptions import GraphError
from graphs.services import Graph

GNP = 'gnp'
PLANTED = 'planted'
BIPARTITE = 'bipartite'
MODELS = (GNP, PLANTED, BIPARTITE)


@dataclass(frozen=True)
class GenSpec:
    """
    Parameters of one random instance.

    ``gnp`` and ``bipartite`` use ``n`` and ``p``; ``planted`` uses
    ``clusters`` (clique sizes), ``noise_vertices`` and ``noise_p``.
    """
    model: str
    n: int = 0
    p: float = 0.0
    clusters: Tuple[int, ...] = field(default_factory=tuple)
    noise_vertices: int = 0
    noise_p: float = 0.0
    seed: int = 0

    def validate(self) -> None:
        if self.model not in MODELS:
            raise GraphError(f"Unknown model {self.model!r}; expected one of {MODELS}")
        for name in ('p', 'noise_p'):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise GraphError(f"{name} must lie in [0, 1], got {value}")
        if self.n < 0 or self.noise_vertices < 0 or self.seed < 0:
            raise GraphError("n, noise_vertices and seed must be non-negative")
        if any(size < 1 for size in self.clusters):
            raise GraphError(f"cluster sizes must be positive, got {self.clusters}")
        if self.model == PLANTED and not self.clusters and not self.noise_vertices:
            raise GraphError("planted model needs clusters or noise vertices")

    @property
    def order(self) -> int:
        if self.model == PLANTED:
            return sum(self.clusters) + self.noise_vertices
        return self.n


class Generated:
    """A generated graph; ``planted_noise`` holds the noise vertices of a planted instance."""

    __slots__ = ('graph', 'planted_noise')

    def __init__(self, graph: Graph, planted_noise: Optional[FrozenSet[int]] = None):
        self.graph = graph
        self.planted_noise = planted_noise


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def _build(n: int, pairs) -> Graph:
    # string labels, as the edge-list reader produces
    return Graph.from_edge_ids(n, pairs, labels=[str(v) for v in range(n)])


def _gnp(rng: np.random.Generator, n: int, p: float) -> Graph:
    pairs = list(itertools.combinations(range(n), 2))
    if not pairs:
        return _build(n, [])
    keep = rng.random(len(pairs)) < p
    return _build(n, [pair for pair, chosen in zip(pairs, keep) if chosen])


def _bipartite(rng: np.random.Generator, n: int, p: float) -> Graph:
    left = n // 2
    pairs = [(u, v) for u in range(left) for v in range(left, n)]
    if not pairs:
        return _build(n, [])
    keep = rng.random(len(pairs)) < p
    return _build(n, [pair for pair, chosen in zip(pairs, keep) if chosen])


def _planted(rng: np.random.Generator, spec: GenSpec) -> Generated:
    pairs = []
    start = 0
    for size in spec.clusters:
        pairs.extend(itertools.combinations(range(start, start + size), 2))
        start += size
    noise = range(start, start + spec.noise_vertices)
    candidates = [(x, v) for x in noise for v in range(start + spec.noise_vertices) if v != x and (v < start or v > x)]
    if candidates:
        keep = rng.random(len(candidates)) < spec.noise_p
        pairs.extend(pair for pair, chosen in zip(candidates, keep) if chosen)
    return Generated(_build(spec.order, pairs), frozenset(noise))


def generate(spec: GenSpec) -> Generated:
    """
    Draw one instance.

    Raises:
        GraphError: the spec is out of range
    """
    spec.validate()
    rng = _rng(spec.seed)
    if spec.model == GNP:
        return Generated(_gnp(rng, spec.n, spec.p))
    if spec.model == BIPARTITE:
        return Generated(_bipartite(rng, spec.n, spec.p))
    return _planted(rng, spec)


def random_weights(g: Graph, seed: int, low: int = 1, high: int = 100) -> Graph:
    """Copy of ``g`` with integer weights drawn uniformly from ``[low, high]``."""
    rng = _rng(seed)
    return g.with_weights([int(w) for w in rng.integers(low, high + 1, size=g.n)])
