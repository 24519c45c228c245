"""
The small induced patterns in canonical vertex order.

Position ``i`` of a witness tuple plays the role of pattern vertex ``i``:

- P3, P4: path order
- C4: cycle order
- bull ``(t1, t2, t3, p1, p2)``: triangle t1 t2 t3, pendant p1 on t1, p2 on t2
- dart ``(a, b, c, d, e)``: diamond a b c e without b-e, pendant d on a
- fox ``(a, c, b, d, e)``: edge a-c joined to the independent set b d e
- gem ``(p1, p2, p3, p4, x)``: path p1..p4 plus apex x
"""

from functools import lru_cache
from typing import Dict, FrozenSet, List, Tuple

import networkx as nx

from graphs.services import Graph

P3 = 'P3'
P4 = 'P4'
C4 = 'C4'
BULL = 'bull'
DART = 'dart'
FOX = 'fox'
GEM = 'gem'

FORBIDDEN = (C4, BULL, DART, FOX, GEM)
KINDS = (P3, P4) + FORBIDDEN

PATTERN_EDGES: Dict[str, Tuple[Tuple[int, int], ...]] = {
    P3: ((0, 1), (1, 2)),
    P4: ((0, 1), (1, 2), (2, 3)),
    C4: ((0, 1), (1, 2), (2, 3), (0, 3)),
    BULL: ((0, 1), (1, 2), (0, 2), (0, 3), (1, 4)),
    DART: ((0, 1), (1, 2), (0, 2), (0, 3), (0, 4), (2, 4)),
    FOX: ((0, 1), (0, 2), (0, 3), (0, 4), (1, 2), (1, 3), (1, 4)),
    GEM: ((0, 1), (1, 2), (2, 3), (0, 4), (1, 4), (2, 4), (3, 4)),
}

PATTERN_ORDER: Dict[str, int] = {P3: 3, P4: 4, C4: 4, BULL: 5, DART: 5, FOX: 5, GEM: 5}

# deleting this many vertices is necessary to destroy every induced P3
MIN_DELETIONS: Dict[str, int] = {P3: 1, P4: 1, C4: 2, BULL: 2, DART: 2, FOX: 2, GEM: 2}


def _degree_sequence(order: int, edges) -> Tuple[int, ...]:
    degrees = [0] * order
    for u, v in edges:
        degrees[u] += 1
        degrees[v] += 1
    return tuple(sorted(degrees))


DEGREE_SEQUENCES: Dict[str, Tuple[int, ...]] = {
    kind: _degree_sequence(PATTERN_ORDER[kind], edges) for kind, edges in PATTERN_EDGES.items()
}


def candidates(degree_sequence: Tuple[int, ...]) -> List[str]:
    """Pattern kinds sharing a sorted degree sequence."""
    return [kind for kind in KINDS if DEGREE_SEQUENCES[kind] == degree_sequence]


@lru_cache(maxsize=None)
def pattern_networkx(kind: str) -> nx.Graph:
    pattern = nx.Graph()
    pattern.add_nodes_from(range(PATTERN_ORDER[kind]))
    pattern.add_edges_from(PATTERN_EDGES[kind])
    return pattern


@lru_cache(maxsize=None)
def pattern_edge_set(kind: str) -> FrozenSet[Tuple[int, int]]:
    return frozenset(PATTERN_EDGES[kind])


def pattern_graph(kind: str) -> Graph:
    """The pattern as a ``Graph`` whose ids are the canonical positions."""
    return Graph.from_edge_ids(PATTERN_ORDER[kind], PATTERN_EDGES[kind])
