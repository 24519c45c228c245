"""
Graph Core Service Module

Immutable simple undirected graphs on dense ids 0..n-1 with external labels
and per-vertex weights, plus the structural predicates every other app uses.
"""

import logging
import math
from bisect import bisect_left
from typing import Any, Dict, FrozenSet, Hashable, Iterable, Iterator, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from .conf import get_setting
from .exceptions import NegativeWeightError, SelfLoopError, VertexRangeError

logger = logging.getLogger(__name__)

VertexSet = FrozenSet[int]

ASSOCIATION = 'association'
DISSOCIATION = 'dissociation'
MODES = (ASSOCIATION, DISSOCIATION)


class Graph:
    """
    Immutable simple undirected graph.

    Vertices are the ids ``0..n-1``. ``adjacency[v]`` is the sorted tuple of
    neighbors of ``v``; ``labels[v]`` its external name and ``weights[v]`` its
    non-negative weight (1 unless given). Values are never mutated after
    construction, so a graph can be shared freely between workers.
    """

    __slots__ = ('n', 'adjacency', 'labels', 'weights', '_neighbor_sets', '_matrix', '_index', '_m', '_dense')

    def __init__(
        self,
        adjacency: Sequence[Sequence[int]],
        labels: Optional[Sequence[Hashable]] = None,
        weights: Optional[Sequence[float]] = None,
    ):
        self.n = len(adjacency)
        self.adjacency = tuple(tuple(sorted(nbrs)) for nbrs in adjacency)
        self.labels = tuple(labels) if labels is not None else tuple(range(self.n))
        self.weights = tuple(weights) if weights is not None else (1,) * self.n
        self._neighbor_sets = tuple(frozenset(nbrs) for nbrs in self.adjacency)
        self._matrix = None
        self._index = None
        self._m = sum(len(nbrs) for nbrs in self.adjacency) // 2
        self._dense = self.n < get_setting('ADJACENCY_MATRIX_THRESHOLD')

    @classmethod
    def from_edge_ids(
        cls,
        n: int,
        pairs: Iterable[Tuple[int, int]],
        labels: Optional[Sequence[Hashable]] = None,
        weights: Optional[Sequence[float]] = None,
    ) -> 'Graph':
        neighbor_sets = [set() for _ in range(n)]
        for u, v in pairs:
            if u == v:
                raise SelfLoopError((u, v))
            if not (0 <= u < n and 0 <= v < n):
                raise VertexRangeError(u if not 0 <= u < n else v, n)
            neighbor_sets[u].add(v)
            neighbor_sets[v].add(u)
        return cls(neighbor_sets, labels, weights)

    @property
    def m(self) -> int:
        return self._m

    def vertices(self) -> range:
        return range(self.n)

    def neighbors(self, v: int) -> FrozenSet[int]:
        return self._neighbor_sets[v]

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def closed_neighbors(self, v: int) -> FrozenSet[int]:
        return self._neighbor_sets[v] | {v}

    def has_edge(self, u: int, v: int) -> bool:
        if self._dense:
            return bool(self._adjacency_matrix()[u, v])
        nbrs = self.adjacency[u]
        i = bisect_left(nbrs, v)
        return i < len(nbrs) and nbrs[i] == v

    def _adjacency_matrix(self) -> np.ndarray:
        if self._matrix is None:
            matrix = np.zeros((self.n, self.n), dtype=bool)
            for u, nbrs in enumerate(self.adjacency):
                if nbrs:
                    matrix[u, list(nbrs)] = True
            self._matrix = matrix
        return self._matrix

    def edges(self) -> Iterator[Tuple[int, int]]:
        for u, nbrs in enumerate(self.adjacency):
            for v in nbrs:
                if u < v:
                    yield u, v

    def id_of(self, label: Hashable) -> int:
        if self._index is None:
            self._index = {label: i for i, label in enumerate(self.labels)}
        return self._index[label]

    def ids_of(self, labels: Iterable[Hashable]) -> VertexSet:
        return frozenset(self.id_of(label) for label in labels)

    def labels_of(self, vertices: Iterable[int]) -> List[Hashable]:
        return [self.labels[v] for v in sorted(vertices)]

    def total_weight(self, vertices: Iterable[int]) -> float:
        return sum(self.weights[v] for v in vertices)

    def with_weights(self, weights: Sequence[float]) -> 'Graph':
        for v, w in enumerate(weights):
            _check_weight(self.labels[v], w)
        return Graph(self.adjacency, self.labels, weights)

    def _key(self):
        return self.adjacency, self.labels, self.weights

    def __eq__(self, other: Any) -> bool:
        return isinstance(other, Graph) and self._key() == other._key()

    def __hash__(self) -> int:
        return hash(self._key())

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m})"


class InducedGraph(NamedTuple):
    """An induced subgraph and the parent id of each of its vertices."""
    graph: Graph
    origin: Tuple[int, ...]

    def lift(self, vertices: Iterable[int]) -> VertexSet:
        return frozenset(self.origin[v] for v in vertices)


class Validation(NamedTuple):
    """Outcome of a structural check: truthy when it passes."""
    valid: bool
    witness: Optional[Tuple[int, ...]] = None

    def __bool__(self) -> bool:
        return self.valid


def _check_weight(label: Hashable, weight: Any) -> None:
    if isinstance(weight, bool) or not isinstance(weight, (int, float)):
        raise NegativeWeightError(label, weight)
    if not math.isfinite(weight) or weight < 0:
        raise NegativeWeightError(label, weight)


def build_graph(
    edges: Iterable[Tuple[Hashable, Hashable]],
    weights: Optional[Dict[Hashable, float]] = None,
    vertices: Optional[Iterable[Hashable]] = None,
) -> Graph:
    """
    Build a simple graph from labelled edge pairs.

    Repeated pairs collapse into one edge. Ids follow the order in which
    labels first appear (edges, then ``vertices``, then ``weights``); labels
    that only appear in ``vertices`` or ``weights`` become isolated vertices.

    Raises:
        SelfLoopError: an edge joins a label to itself
        NegativeWeightError: a weight is negative, infinite or not a number
    """
    index: Dict[Hashable, int] = {}
    labels: List[Hashable] = []

    def intern(label: Hashable) -> int:
        if label not in index:
            index[label] = len(labels)
            labels.append(label)
        return index[label]

    pairs = set()
    for a, b in edges:
        if a == b:
            raise SelfLoopError((a, b))
        u, v = intern(a), intern(b)
        pairs.add((min(u, v), max(u, v)))

    for label in vertices or ():
        intern(label)

    weights = weights or {}
    for label in weights:
        intern(label)

    vertex_weights = [1] * len(labels)
    for label, weight in weights.items():
        _check_weight(label, weight)
        vertex_weights[index[label]] = weight

    return Graph.from_edge_ids(len(labels), pairs, labels, vertex_weights)


def _check_ids(g: Graph, s: Iterable[int]) -> List[int]:
    ids = sorted(set(s))
    for v in ids:
        if not isinstance(v, (int, np.integer)) or not 0 <= v < g.n:
            raise VertexRangeError(v, g.n)
    return ids


def induced(g: Graph, s: Iterable[int]) -> InducedGraph:
    """Subgraph on ``s`` with all and only the edges of ``g`` inside ``s``."""
    origin = _check_ids(g, s)
    local = {v: i for i, v in enumerate(origin)}
    adjacency = [[local[u] for u in g.adjacency[v] if u in local] for v in origin]
    return InducedGraph(
        Graph(adjacency, [g.labels[v] for v in origin], [g.weights[v] for v in origin]),
        tuple(origin),
    )


def remove_vertices(g: Graph, s: Iterable[int]) -> InducedGraph:
    removed = set(s)
    return induced(g, [v for v in g.vertices() if v not in removed])


def complement(g: Graph) -> Graph:
    everything = set(g.vertices())
    adjacency = [everything - g.neighbors(v) - {v} for v in g.vertices()]
    return Graph(adjacency, g.labels, g.weights)


def _sorted_parts(parts: Iterable[Iterable[int]]) -> List[VertexSet]:
    return sorted((frozenset(p) for p in parts), key=min)


def components(g: Graph) -> List[VertexSet]:
    """Connected components, ordered by smallest vertex id."""
    seen = [False] * g.n
    parts = []
    for start in g.vertices():
        if seen[start]:
            continue
        seen[start] = True
        stack = [start]
        part = [start]
        while stack:
            x = stack.pop()
            for y in g.adjacency[x]:
                if not seen[y]:
                    seen[y] = True
                    stack.append(y)
                    part.append(y)
        parts.append(part)
    return _sorted_parts(parts)


def co_components(g: Graph) -> List[VertexSet]:
    """Connected components of the complement, without building it."""
    unvisited = set(g.vertices())
    parts = []
    while unvisited:
        start = min(unvisited)
        unvisited.discard(start)
        stack = [start]
        part = [start]
        while stack:
            x = stack.pop()
            nbrs = g.neighbors(x)
            reached = [y for y in unvisited if y not in nbrs]
            for y in reached:
                unvisited.discard(y)
                stack.append(y)
                part.append(y)
        parts.append(part)
    return _sorted_parts(parts)


def is_connected(g: Graph) -> bool:
    return g.n <= 1 or len(components(g)) == 1


def is_clique(g: Graph, s: Optional[Iterable[int]] = None) -> bool:
    vertices = list(g.vertices()) if s is None else list(s)
    members = set(vertices)
    size = len(members)
    for v in members:
        if len(g.neighbors(v) & members) != size - 1:
            return False
    return True


def find_induced_p3(g: Graph) -> Optional[Tuple[int, int, int]]:
    """
    An induced P3 ``(a, b, c)`` with ``ab, bc`` edges and ``ac`` a non-edge.

    Every edge of a cluster graph joins two vertices with equal closed
    neighborhoods, so the first edge violating that yields the witness.
    """
    for b in g.vertices():
        if g.degree(b) < 1:
            continue
        closed_b = g.closed_neighbors(b)
        for a in g.adjacency[b]:
            if a < b:
                continue
            closed_a = g.closed_neighbors(a)
            if g.degree(a) == g.degree(b) and closed_a == closed_b:
                continue
            outside_a = closed_b - closed_a
            if outside_a:
                c = min(outside_a)
                return (min(a, c), b, max(a, c))
            c = min(closed_a - closed_b)
            return (min(b, c), a, max(b, c))
    return None


def is_cluster(g: Graph) -> Validation:
    """True iff every component is a clique; otherwise carries an induced P3."""
    witness = find_induced_p3(g)
    return Validation(witness is None, witness)


def list_triangles(g: Graph) -> List[Tuple[int, int, int]]:
    """All triangles ``(a, b, c)`` with ``a < b < c``."""
    triangles = []
    for a in g.vertices():
        higher_a = [x for x in g.adjacency[a] if x > a]
        for i, b in enumerate(higher_a):
            nbrs_b = g.neighbors(b)
            for c in higher_a[i + 1:]:
                if c in nbrs_b:
                    triangles.append((a, b, c))
    return triangles


def is_triangle_free(g: Graph) -> Validation:
    for a in g.vertices():
        higher_a = [x for x in g.adjacency[a] if x > a]
        for i, b in enumerate(higher_a):
            nbrs_b = g.neighbors(b)
            for c in higher_a[i + 1:]:
                if c in nbrs_b:
                    return Validation(False, (a, b, c))
    return Validation(True)


def validate_solution(g: Graph, x: Iterable[int], mode: str = ASSOCIATION) -> Validation:
    """
    Check a deletion set.

    ``association``: ``G - X`` has no induced P3 (every component a clique).
    ``dissociation``: ``G - X`` has maximum degree at most 1. A failing check
    carries a P3 in parent ids.
    """
    if mode not in MODES:
        raise ValueError(f"Unknown mode {mode!r}; expected one of {MODES}")
    deleted = set(_check_ids(g, x))

    if mode == ASSOCIATION:
        rest = remove_vertices(g, deleted)
        witness = find_induced_p3(rest.graph)
        if witness is None:
            return Validation(True)
        return Validation(False, tuple(rest.origin[v] for v in witness))

    for v in g.vertices():
        if v in deleted:
            continue
        kept = [u for u in g.adjacency[v] if u not in deleted]
        if len(kept) >= 2:
            return Validation(False, (kept[0], v, kept[1]))
    return Validation(True)
