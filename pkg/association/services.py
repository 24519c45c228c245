"""
Association Service Module

The ratio-2.5 association set driver and its special cases, the quotient
contraction handed to the dissociation solver, and the naive
ratio-3 baseline.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, NamedTuple, Optional, Tuple

from decomposition.services import QuotientGraph, quotient_of, top_decomposition
from dissociation.services import DissociationResult, approx_dissociation_2
from graphs.exceptions import CertificationError, GraphError
from graphs.services import (
    ASSOCIATION,
    Graph,
    VertexSet,
    components,
    induced,
    is_clique,
    is_cluster,
    is_connected,
    is_triangle_free,
    validate_solution,
)
from witnesses.patterns import MIN_DELETIONS, P3
from witnesses.services import Witness, certify

from .reduction import reduce, two_cliques_shape

logger = logging.getLogger(__name__)

TWO_CLIQUES = 'two-cliques'
MODULE_NEIGHBOR = 'module-neighbor'
QUOTIENT_DISSOCIATION = 'quotient-dissociation'
NAIVE = 'naive'
EXACT = 'exact'

RATIO = Fraction(5, 2)


@dataclass(frozen=True)
class Solution:
    """
    An association set with the rule that deleted each vertex.

    ``lower_bound`` sums bounds over vertex-disjoint pieces of the input, so
    it never exceeds the optimum. ``steps`` lists ``(rule, size)`` in the
    order the rules fired.
    """
    deleted: VertexSet
    provenance: Dict[int, str] = field(default_factory=dict)
    witnesses: Tuple[Witness, ...] = ()
    quotient_lower_bound: Optional[Fraction] = None
    lower_bound: Fraction = Fraction(0)
    steps: Tuple[Tuple[str, int], ...] = ()


class _Settled(NamedTuple):
    deleted: VertexSet = frozenset()
    rule: Optional[str] = None
    lower_bound: Fraction = Fraction(0)
    quotient_lower_bound: Optional[Fraction] = None
    follow_up: VertexSet = frozenset()


def two_cliques_solution(g: Graph) -> VertexSet:
    """
    Optimal deletion for universal vertices plus two disjoint cliques.

    Returns:
        The smallest of the universal vertices and the two cliques; ties go to
        the universal vertices, then the clique holding the smaller id

    Raises:
        GraphError: ``g`` does not have that shape
    """
    shape = two_cliques_shape(g)
    if shape is None:
        raise GraphError("Graph is not a set of universal vertices plus two disjoint cliques")
    return min(shape, key=len)


def module_neighbor_step(g: Graph, m) -> Tuple[int, VertexSet]:
    """
    Deletion of the single neighbor of a non-clique cluster module.

    Args:
        g: graph in which ``m`` is a maximal strong module
        m: vertices of the module

    Returns:
        ``(v, rest)`` with ``v`` the only vertex outside ``m`` adjacent to it
        and ``rest`` the vertices of ``g - N[m]``

    Raises:
        CertificationError: ``m`` has no neighbor or more than one
    """
    module = frozenset(m)
    boundary = set()
    for x in module:
        boundary |= g.neighbors(x)
    boundary -= module
    if len(boundary) != 1:
        raise CertificationError(
            'module-neighbor', f"module {sorted(module)} has {len(boundary)} neighbors {sorted(boundary)}, expected 1"
        )
    v = boundary.pop()
    return v, frozenset(g.vertices()) - module - {v}


def contract_to_weighted_quotient(g: Graph) -> QuotientGraph:
    """
    Quotient over the maximal strong modules, weighted by module size.

    Raises:
        CertificationError: ``g`` is a clique or disconnected, a maximal
            strong module is not a clique, or the quotient has a triangle
    """
    if g.n == 0 or is_clique(g):
        raise CertificationError('contract', "graph is a clique; nothing to contract")
    if not is_connected(g):
        raise CertificationError('contract', "graph is not connected")
    _, parts = top_decomposition(g)
    for part in parts:
        if not is_clique(g, part):
            raise CertificationError('contract', f"maximal strong module {sorted(part)} is not a clique")
    quotient = quotient_of(g, parts)
    triangle_free = is_triangle_free(quotient.qgraph)
    if not triangle_free:
        raise CertificationError('contract', f"quotient has triangle {triangle_free.witness}")
    return quotient


def lift_quotient_solution(q: QuotientGraph, d: DissociationResult) -> VertexSet:
    """Base vertices of the quotient vertices deleted by ``d``."""
    lifted = set()
    for i in d.deleted:
        lifted |= q.parts[i]
    return frozenset(lifted)


def _settle(g: Graph, vertices: VertexSet) -> _Settled:
    """Apply the first driver rule that fits one connected reduced component."""
    part = induced(g, vertices)
    h = part.graph
    if is_clique(h):
        return _Settled()

    if two_cliques_shape(h) is not None:
        chosen = two_cliques_solution(h)
        return _Settled(part.lift(chosen), TWO_CLIQUES, Fraction(len(chosen)))

    _, modules = top_decomposition(h)
    for module in modules:
        if not is_clique(h, module):
            v, rest = module_neighbor_step(h, module)
            return _Settled(part.lift({v}), MODULE_NEIGHBOR, Fraction(1), follow_up=part.lift(rest))

    quotient = contract_to_weighted_quotient(h)
    result = approx_dissociation_2(quotient.qgraph)
    chosen = lift_quotient_solution(quotient, result)
    return _Settled(part.lift(chosen), QUOTIENT_DISSOCIATION, result.lower_bound, result.lower_bound)


def solve(g: Graph) -> Solution:
    """
    Association set of size at most 2.5 times the optimum.

    Each piece is reduced, then every remaining component is settled as a
    clique, two intersecting cliques, a module with one neighbor (the rest
    goes back on the worklist) or a triangle-free weighted quotient.

    Args:
        g: any graph; weights are ignored

    Returns:
        Solution whose size is certified against 2.5 times its lower bound

    Raises:
        CertificationError: an internal guarantee failed
    """
    provenance: Dict[int, str] = {}
    witnesses: List[Witness] = []
    steps: List[Tuple[str, int]] = []
    lower_bound = Fraction(0)
    quotient_lower_bound: Optional[Fraction] = None

    pending = [frozenset(g.vertices())]
    while pending:
        piece = pending.pop()
        if not piece:
            continue
        sub = induced(g, piece)
        if is_cluster(sub.graph):
            continue

        reduced = reduce(sub.graph)
        for witness in reduced.witnesses:
            lifted = witness.lift(sub.origin)
            witnesses.append(lifted)
            provenance.update((v, lifted.kind) for v in lifted.vertices)
            lower_bound += MIN_DELETIONS[lifted.kind]
            steps.append((lifted.kind, len(lifted.vertices)))

        survivors = piece - sub.lift(reduced.removed)
        rest = induced(g, survivors)
        for part in components(rest.graph):
            settled = _settle(g, rest.lift(part))
            if settled.rule is None:
                continue
            provenance.update((v, settled.rule) for v in settled.deleted)
            lower_bound += settled.lower_bound
            steps.append((settled.rule, len(settled.deleted)))
            if settled.quotient_lower_bound is not None:
                quotient_lower_bound = (quotient_lower_bound or Fraction(0)) + settled.quotient_lower_bound
            if settled.follow_up:
                pending.append(settled.follow_up)
            logger.debug("solve: %s deleted %d vertices", settled.rule, len(settled.deleted))

    deleted = frozenset(provenance)
    check = validate_solution(g, deleted, ASSOCIATION)
    if not check:
        raise CertificationError('solve', f"result leaves induced P3 {check.witness}")
    if len(deleted) > RATIO * lower_bound:
        raise CertificationError('ratio', f"{len(deleted)} deletions exceed 2.5 times the lower bound {lower_bound}")

    logger.debug(
        "solve: n=%d m=%d deleted=%d lower_bound=%s witnesses=%d",
        g.n, g.m, len(deleted), lower_bound, len(witnesses),
    )
    return Solution(deleted, provenance, tuple(witnesses), quotient_lower_bound, lower_bound, tuple(steps))


def naive_3_approx(g: Graph) -> Solution:
    """
    Delete whole induced P3s until none is left.

    Vertices are scanned once in id order; a surviving vertex whose surviving
    neighbors include a non-adjacent pair is deleted with that pair. The P3s
    are disjoint, so their count bounds the optimum from below.
    """
    alive = [True] * g.n
    witnesses: List[Witness] = []
    for b in g.vertices():
        if not alive[b]:
            continue
        nbrs = [u for u in g.adjacency[b] if alive[u]]
        pair = next(((a, c) for i, a in enumerate(nbrs) for c in nbrs[i + 1:] if not g.has_edge(a, c)), None)
        if pair is None:
            continue
        witness = certify(g, P3, (pair[0], b, pair[1]), NAIVE)
        witnesses.append(witness)
        for v in witness.vertices:
            alive[v] = False

    deleted = frozenset(v for v in g.vertices() if not alive[v])
    logger.debug("naive_3_approx: n=%d deleted=%d", g.n, len(deleted))
    return Solution(
        deleted,
        {v: NAIVE for v in deleted},
        tuple(witnesses),
        lower_bound=Fraction(len(witnesses)),
        steps=tuple((NAIVE, 3) for _ in witnesses),
    )
