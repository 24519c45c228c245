"""
Dissociation Service Module

Weighted dissociation sets: a local-ratio 2-approximation with a certified
lower bound, and an exact branch-and-bound solver for small graphs.
"""

import heapq
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import List, NamedTuple, Tuple

from graphs.conf import get_setting
from graphs.exceptions import CertificationError, GraphTooLargeError
from graphs.services import DISSOCIATION, Graph, VertexSet, validate_solution

logger = logging.getLogger(__name__)


class LocalRatioStep(NamedTuple):
    center: int
    degree: int
    epsilon: Fraction


@dataclass(frozen=True)
class DissociationResult:
    """
    A dissociation set with its cost and a certified lower bound.

    ``lower_bound`` is the sum of ``epsilon * (degree - 1)`` over the
    local-ratio steps, never more than the optimum; ``weight`` is at most
    twice it.
    """
    deleted: VertexSet
    weight: Fraction
    lower_bound: Fraction
    trace: Tuple[LocalRatioStep, ...] = ()


class ExactDissociation(NamedTuple):
    deleted: VertexSet
    weight: Fraction


def is_dissociation_valid(g: Graph, s) -> bool:
    return validate_solution(g, s, DISSOCIATION).valid


def _local_ratio(g: Graph) -> Tuple[List[int], Fraction, List[LocalRatioStep]]:
    """
    Phase one: peel covering constraints until the residual graph has
    maximum degree one.

    The constraint at a center ``u`` of residual degree ``d`` gives ``u``
    coefficient ``d - 1`` and each residual neighbor coefficient 1.
    """
    residual = [Fraction(w) for w in g.weights]
    alive = [True] * g.n
    tentative: List[int] = []
    for v in g.vertices():
        if residual[v] == 0:
            alive[v] = False
            tentative.append(v)

    degree = [sum(1 for u in g.adjacency[v] if alive[u]) if alive[v] else 0 for v in g.vertices()]
    heap = [(-degree[v], v) for v in g.vertices() if alive[v] and degree[v] >= 2]
    heapq.heapify(heap)

    lower_bound = Fraction(0)
    trace: List[LocalRatioStep] = []
    while heap:
        negative_degree, u = heapq.heappop(heap)
        if not alive[u] or -negative_degree != degree[u] or degree[u] < 2:
            continue
        d = degree[u]
        nbrs = [x for x in g.adjacency[u] if alive[x]]
        epsilon = min([residual[u] / (d - 1)] + [residual[x] for x in nbrs])

        residual[u] -= epsilon * (d - 1)
        for x in nbrs:
            residual[x] -= epsilon
        lower_bound += epsilon * (d - 1)
        trace.append(LocalRatioStep(u, d, epsilon))

        zeroed = ([u] if residual[u] == 0 else []) + [x for x in nbrs if residual[x] == 0]
        for z in zeroed:
            alive[z] = False
            tentative.append(z)
            for y in g.adjacency[z]:
                if alive[y]:
                    degree[y] -= 1
                    if degree[y] >= 2:
                        heapq.heappush(heap, (-degree[y], y))
    return tentative, lower_bound, trace


def _reverse_delete(g: Graph, tentative: List[int]) -> VertexSet:
    """Phase two: return vertices to the graph, latest first, while the rest stays valid."""
    deleted = set(tentative)
    kept_degree = [0] * g.n
    for v in g.vertices():
        if v not in deleted:
            for y in g.adjacency[v]:
                kept_degree[y] += 1

    for z in reversed(tentative):
        if kept_degree[z] > 1:
            continue
        if any(kept_degree[y] > 0 for y in g.adjacency[z] if y not in deleted):
            continue
        deleted.discard(z)
        for y in g.adjacency[z]:
            kept_degree[y] += 1
    return frozenset(deleted)


def approx_dissociation_2(g: Graph) -> DissociationResult:
    """
    Ratio-2 weighted dissociation set.

    Args:
        g: graph with non-negative weights

    Returns:
        DissociationResult whose weight is certified against twice its lower bound

    Raises:
        CertificationError: the result is invalid or breaks the certificate
    """
    tentative, lower_bound, trace = _local_ratio(g)
    deleted = _reverse_delete(g, tentative)
    weight = sum((Fraction(g.weights[v]) for v in deleted), Fraction(0))

    if not is_dissociation_valid(g, deleted):
        raise CertificationError('diss2', f"result {sorted(deleted)} leaves a vertex of degree two")
    if weight > 2 * lower_bound:
        raise CertificationError('diss2', f"weight {weight} exceeds twice the lower bound {lower_bound}")

    logger.debug(
        "approx_dissociation_2: n=%d steps=%d deleted=%d weight=%s lower_bound=%s",
        g.n, len(trace), len(deleted), weight, lower_bound,
    )
    return DissociationResult(deleted, weight, lower_bound, tuple(trace))


def exact_dissociation(g: Graph) -> ExactDissociation:
    """
    Minimum-weight dissociation set by branch and bound.

    Ties break toward fewer vertices, then the lexicographically smallest
    sorted id tuple.

    Raises:
        GraphTooLargeError: more than ``EXACT_ENUMERATION_MAX_VERTICES`` vertices
    """
    limit = get_setting('EXACT_ENUMERATION_MAX_VERTICES')
    if g.n > limit:
        raise GraphTooLargeError('exact_dissociation', g.n, limit)

    weights = [Fraction(w) for w in g.weights]
    kept = [False] * g.n
    kept_degree = [0] * g.n
    chosen: List[int] = []
    best = [None]

    def key(weight, ids):
        return weight, len(ids), tuple(ids)

    def search(v: int, weight: Fraction) -> None:
        if best[0] is not None and (weight, len(chosen)) > best[0][:2]:
            return
        if v == g.n:
            candidate = key(weight, chosen)
            if best[0] is None or candidate < best[0]:
                best[0] = candidate
            return

        chosen.append(v)
        search(v + 1, weight + weights[v])
        chosen.pop()

        kept_nbrs = [y for y in g.adjacency[v] if y < v and kept[y]]
        if len(kept_nbrs) <= 1 and all(kept_degree[y] == 0 for y in kept_nbrs):
            kept[v] = True
            kept_degree[v] = len(kept_nbrs)
            for y in kept_nbrs:
                kept_degree[y] += 1
            search(v + 1, weight)
            for y in kept_nbrs:
                kept_degree[y] -= 1
            kept_degree[v] = 0
            kept[v] = False

    search(0, Fraction(0))
    weight, _, ids = best[0]
    return ExactDissociation(frozenset(ids), weight)
