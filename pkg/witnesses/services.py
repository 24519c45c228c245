"""
Witness Service Module

Detection, canonical ordering and certification of induced P3, P4 and the
five forbidden graphs C4, bull, dart, fox and gem.
"""

import itertools
import logging
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Iterator, List, Optional, Sequence, Tuple

import networkx as nx
from networkx.algorithms.isomorphism import GraphMatcher

from graphs.conf import get_setting
from graphs.exceptions import CertificationError, GraphError
from graphs.services import Graph, components, find_induced_p3

from .patterns import (
    C4,
    FORBIDDEN,
    KINDS,
    P3,
    P4,
    PATTERN_ORDER,
    candidates,
    pattern_edge_set,
    pattern_networkx,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Witness:
    """Vertices (base-graph ids, canonical order) inducing a copy of ``kind``."""
    kind: str
    vertices: Tuple[int, ...]
    certified: bool = False

    @property
    def is_forbidden(self) -> bool:
        return self.kind in FORBIDDEN

    def lift(self, origin: Sequence[int]) -> 'Witness':
        return Witness(self.kind, tuple(origin[v] for v in self.vertices), self.certified)


def _induced_networkx(g: Graph, vertices: Sequence[int]) -> nx.Graph:
    sub = nx.Graph()
    sub.add_nodes_from(vertices)
    sub.add_edges_from((u, v) for u, v in itertools.combinations(vertices, 2) if g.has_edge(u, v))
    return sub


def _degree_sequence(g: Graph, vertices: Sequence[int]) -> Tuple[int, ...]:
    members = set(vertices)
    return tuple(sorted(len(g.neighbors(v) & members) for v in vertices))


def classify(g: Graph, s: Iterable[int]) -> Optional[str]:
    """
    Pattern kind induced by ``s`` or ``None``.

    Args:
        g: base graph
        s: three, four or five distinct vertex ids

    Returns:
        One of ``P3, P4, C4, bull, dart, fox, gem`` or None
    """
    vertices = sorted(set(s))
    if len(vertices) not in (3, 4, 5):
        raise GraphError(f"classify expects 3, 4 or 5 vertices, got {len(vertices)}")
    matches = candidates(_degree_sequence(g, vertices))
    if not matches:
        return None
    sub = _induced_networkx(g, vertices)
    for kind in matches:
        if nx.is_isomorphic(sub, pattern_networkx(kind)):
            return kind
    return None


def canonical_order(g: Graph, kind: str, s: Iterable[int]) -> Tuple[int, ...]:
    """Lexicographically smallest ordering of ``s`` matching the canonical pattern order."""
    vertices = sorted(set(s))
    matcher = GraphMatcher(pattern_networkx(kind), _induced_networkx(g, vertices))
    orders = [
        tuple(mapping[i] for i in range(PATTERN_ORDER[kind]))
        for mapping in matcher.isomorphisms_iter()
    ]
    if not orders:
        raise CertificationError('canonical-order', f"{vertices} does not induce a {kind}")
    return min(orders)


def certify(g: Graph, kind: str, vertices: Sequence[int], step: str = 'certify') -> Witness:
    """
    Re-verify an ordered witness against ``g``.

    Every pattern pair must be an edge of ``g`` and every other pair a
    non-edge.

    Raises:
        CertificationError: the tuple does not induce ``kind`` in that order
    """
    vertices = tuple(int(v) for v in vertices)
    if kind not in KINDS:
        raise CertificationError(step, f"unknown witness kind {kind!r}")
    if len(vertices) != PATTERN_ORDER[kind] or len(set(vertices)) != len(vertices):
        raise CertificationError(step, f"{kind} needs {PATTERN_ORDER[kind]} distinct vertices, got {vertices}")
    if any(not 0 <= v < g.n for v in vertices):
        raise CertificationError(step, f"{vertices} has ids outside the graph")
    edges = pattern_edge_set(kind)
    for i, j in itertools.combinations(range(len(vertices)), 2):
        if g.has_edge(vertices[i], vertices[j]) != ((i, j) in edges):
            raise CertificationError(
                step, f"{vertices} is not an induced {kind}: pair {vertices[i]}-{vertices[j]} disagrees"
            )
    return Witness(kind, vertices, certified=True)


def certify_unordered(g: Graph, s: Iterable[int], step: str) -> Witness:
    """Classify ``s`` as a forbidden graph and return it certified in canonical order."""
    kind = classify(g, s)
    if kind not in FORBIDDEN:
        raise CertificationError(step, f"{sorted(set(s))} induces {kind or 'no pattern'}, not a forbidden graph")
    return certify(g, kind, canonical_order(g, kind, s), step)


def find_p3(g: Graph) -> Optional[Witness]:
    p3 = find_induced_p3(g)
    if p3 is None:
        return None
    return certify(g, P3, p3, 'find_p3')


def _universal_in(g: Graph, part: set) -> List[int]:
    size = len(part) - 1
    return [v for v in sorted(part) if len(g.neighbors(v) & part) == size]


def _split(g: Graph, part: set) -> List[set]:
    seen = set()
    pieces = []
    for start in sorted(part):
        if start in seen:
            continue
        seen.add(start)
        stack = [start]
        piece = {start}
        while stack:
            x = stack.pop()
            for y in g.adjacency[x]:
                if y in part and y not in seen:
                    seen.add(y)
                    stack.append(y)
                    piece.add(y)
        pieces.append(piece)
    return pieces


def _p4_or_c4(g: Graph, part: set) -> Witness:
    """Induced P4 or C4 inside a connected vertex set with no universal vertex."""
    v = min(part, key=lambda x: (-len(g.neighbors(x) & part), x))
    parent = {v: None}
    distance = {v: 0}
    queue = deque([v])
    while queue:
        x = queue.popleft()
        for y in g.adjacency[x]:
            if y in part and y not in distance:
                distance[y] = distance[x] + 1
                parent[y] = x
                queue.append(y)

    far = sorted(x for x, d in distance.items() if d >= 3)
    if far:
        w = min(x for x in far if distance[x] == 3)
        path = [w]
        while parent[path[-1]] is not None:
            path.append(parent[path[-1]])
        return certify(g, P4, tuple(reversed(path)), 'tp_check')

    u = min(x for x, d in distance.items() if d == 2)
    x = parent[u]
    y = min((g.neighbors(v) & part) - g.closed_neighbors(x))
    if not g.has_edge(y, u):
        return certify(g, P4, (y, v, x, u), 'tp_check')
    return certify(g, C4, (v, x, u, y), 'tp_check')


def tp_check(g: Graph) -> Optional[Witness]:
    """
    Certifying trivially-perfect recognition.

    Universal vertices are peeled off every connected piece; a piece without
    one yields an induced P4 or C4.

    Returns:
        None when ``g`` is {P4, C4}-free, otherwise a certified witness
    """
    pending = [set(c) for c in components(g)]
    while pending:
        part = pending.pop()
        if len(part) <= 3:
            continue
        universal = _universal_in(g, part)
        if not universal:
            return _p4_or_c4(g, part)
        rest = part - set(universal)
        pending.extend(_split(g, rest))
    return None


def is_trivially_perfect(g: Graph) -> bool:
    return tp_check(g) is None


def find_forbidden_in(g: Graph, vertices: Iterable[int], step: str = 'find_forbidden_in') -> Optional[Witness]:
    """
    First forbidden graph among the 5- then 4-subsets of a small vertex set.

    Used on quotient node tuples, so ``vertices`` has at most a handful of
    members.
    """
    pool = sorted(set(vertices))
    for size in (5, 4):
        for s in itertools.combinations(pool, size):
            kind = classify(g, s)
            if kind in FORBIDDEN:
                return certify(g, kind, canonical_order(g, kind, s), step)
    return None


def connected_subsets(g: Graph, k: int) -> Iterator[Tuple[int, ...]]:
    """
    Every connected induced ``k``-vertex subset, each once.

    Each subset is grown from its smallest vertex, extending only by
    exclusive neighbors larger than that root.
    """
    for root in g.vertices():
        ext = [u for u in g.adjacency[root] if u > root]
        yield from _extend(g, [root], ext, root, k)


def _extend(g: Graph, sub: List[int], ext: List[int], root: int, k: int) -> Iterator[Tuple[int, ...]]:
    if len(sub) == k:
        yield tuple(sorted(sub))
        return
    covered = set(sub)
    for x in sub:
        covered |= g.neighbors(x)
    ext = list(ext)
    while ext:
        w = ext.pop(0)
        extra = [u for u in g.adjacency[w] if u > root and u not in covered]
        yield from _extend(g, sub + [w], ext + extra, root, k)


def find_forbidden_bruteforce(g: Graph) -> Optional[Witness]:
    """
    Some induced forbidden graph, or ``None`` when ``g`` is free of all five.

    Every forbidden graph is connected, so only connected 4- and 5-subsets
    are examined. Meant for graphs up to ``BRUTEFORCE_MAX_VERTICES``.
    """
    if g.n > get_setting('BRUTEFORCE_MAX_VERTICES'):
        logger.warning("find_forbidden_bruteforce on %d vertices; expect a long enumeration", g.n)
    for k in (4, 5):
        for s in connected_subsets(g, k):
            kind = classify(g, s)
            if kind in FORBIDDEN:
                return certify(g, kind, canonical_order(g, kind, s), 'find_forbidden_bruteforce')
    return None
