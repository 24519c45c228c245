"""
Exact Association Service Module

Minimum association sets for small graphs. Up to
``EXACT_LEXICOGRAPHIC_MAX_VERTICES`` vertices the answer is the
lexicographically first minimum subset; larger graphs are split into
components, true-twin classes are contracted (an optimum deletes a class
whole or not at all) and induced P3s are branched on with iterative
deepening. Subset enumeration is the fallback up to
``EXACT_ENUMERATION_MAX_VERTICES`` vertices.
"""

import itertools
import logging
from collections import defaultdict
from fractions import Fraction
from typing import List, Optional, Tuple

from graphs.conf import get_setting
from graphs.exceptions import ExactUnavailable
from graphs.services import Graph, VertexSet, components, induced, is_clique

from .services import EXACT, Solution

logger = logging.getLogger(__name__)


class _BudgetExceeded(Exception):
    pass


def _closed_masks(g: Graph) -> List[int]:
    masks = []
    for v in g.vertices():
        mask = 1 << v
        for u in g.adjacency[v]:
            mask |= 1 << u
        masks.append(mask)
    return masks


def _low(mask: int) -> int:
    return (mask & -mask).bit_length() - 1


def _find_p3(closed: List[int], alive: int) -> Optional[Tuple[int, int, int]]:
    """An induced P3 ``(a, center, c)`` among ``alive``, or None if it is a cluster."""
    rest = alive
    while rest:
        v = _low(rest)
        own = closed[v] & alive
        others = own & ~(1 << v)
        while others:
            u = _low(others)
            others &= others - 1
            theirs = closed[u] & alive
            if theirs == own:
                continue
            only_v = own & ~theirs
            if only_v:
                return u, v, _low(only_v)
            return v, u, _low(theirs & ~own)
        rest &= ~own
    return None


def _is_cluster(closed: List[int], alive: int) -> bool:
    return _find_p3(closed, alive) is None


def _packing_bound(closed: List[int], weights: List[int], alive: int) -> int:
    """Total of the lightest vertex over greedily packed disjoint P3s."""
    bound = 0
    while True:
        p3 = _find_p3(closed, alive)
        if p3 is None:
            return bound
        bound += min(weights[x] for x in p3)
        for x in p3:
            alive &= ~(1 << x)


def _enumerate(g: Graph, start: int = 0) -> VertexSet:
    """First subset in (size, lexicographic) order whose deletion leaves a cluster graph."""
    closed = _closed_masks(g)
    full = (1 << g.n) - 1
    for size in range(start, g.n + 1):
        for combo in itertools.combinations(range(g.n), size):
            alive = full
            for v in combo:
                alive &= ~(1 << v)
            if _is_cluster(closed, alive):
                return frozenset(combo)
    return frozenset(g.vertices())


def _twin_classes(g: Graph) -> List[List[int]]:
    groups = defaultdict(list)
    for v in g.vertices():
        groups[g.closed_neighbors(v)].append(v)
    return sorted(groups.values(), key=min)


class _Search:
    """Depth-bounded branching over a contracted class graph."""

    def __init__(self, closed: List[int], weights: List[int], budget: int):
        self.closed = closed
        self.weights = weights
        self.budget = budget
        self.nodes = 0

    def branch(self, alive: int, limit: int) -> Optional[int]:
        self.nodes += 1
        if self.nodes > self.budget:
            raise _BudgetExceeded
        p3 = _find_p3(self.closed, alive)
        if p3 is None:
            return 0
        if limit <= 0 or _packing_bound(self.closed, self.weights, alive) > limit:
            return None
        a, center, c = p3
        for x in (center, a, c):
            if self.weights[x] > limit:
                continue
            found = self.branch(alive & ~(1 << x), limit - self.weights[x])
            if found is not None:
                return found | (1 << x)
        return None


def _solve_component(g: Graph) -> VertexSet:
    classes = _twin_classes(g)
    class_of = {v: i for i, members in enumerate(classes) for v in members}
    closed = [0] * len(classes)
    for i, members in enumerate(classes):
        for u in g.closed_neighbors(members[0]):
            closed[i] |= 1 << class_of[u]
    weights = [len(members) for members in classes]
    alive = (1 << len(classes)) - 1

    search = _Search(closed, weights, get_setting('EXACT_NODE_BUDGET'))
    limit = _packing_bound(closed, weights, alive)
    max_depth = get_setting('EXACT_MAX_DEPTH')
    try:
        while limit <= max_depth:
            found = search.branch(alive, limit)
            if found is not None:
                return frozenset(v for i, members in enumerate(classes) if found >> i & 1 for v in members)
            limit += 1
    except _BudgetExceeded:
        logger.debug("exact_association: node budget spent at limit %d", limit)

    enumeration_limit = get_setting('EXACT_ENUMERATION_MAX_VERTICES')
    if g.n > enumeration_limit:
        raise ExactUnavailable(
            f"no association set of size <= {max_depth} found within {search.budget} search nodes "
            f"and the component has {g.n} > {enumeration_limit} vertices"
        )
    logger.debug("exact_association: enumerating %d vertices from size %d", g.n, limit)
    return _enumerate(g, limit)


def exact_association(g: Graph) -> Tuple[VertexSet, int]:
    """
    Minimum-cardinality association set.

    Returns:
        ``(deleted, size)``; for graphs of at most
        ``EXACT_LEXICOGRAPHIC_MAX_VERTICES`` vertices, ``deleted`` is the
        lexicographically smallest sorted id tuple among the optima

    Raises:
        ExactUnavailable: the search budget ran out on a component too large
            to enumerate
    """
    if g.n <= get_setting('EXACT_LEXICOGRAPHIC_MAX_VERTICES'):
        deleted = _enumerate(g)
        return deleted, len(deleted)

    deleted = set()
    for part in components(g):
        sub = induced(g, part)
        if is_clique(sub.graph):
            continue
        deleted |= sub.lift(_solve_component(sub.graph))
    return frozenset(deleted), len(deleted)


def exact_solution(g: Graph) -> Solution:
    """``exact_association`` wrapped as a Solution whose bound is its own size."""
    deleted, size = exact_association(g)
    return Solution(deleted, {v: EXACT for v in deleted}, lower_bound=Fraction(size), steps=((EXACT, size),))
