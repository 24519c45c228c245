"""
Reduction Service Module

First phase of the association pipeline: dispose of every triangle in the
quotients of the modular decomposition tree, then repeatedly clean the
remaining components until each one is a clique, a pair of intersecting
cliques, or has a triangle-free quotient whose modules are cluster graphs
with the neighborhood shape the second phase relies on. Every deleted vertex
belongs to a certified forbidden subgraph, and the subgraphs are disjoint.
"""

import itertools
import logging
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, NamedTuple, Optional, Set, Tuple

from decomposition.services import PRIME, SERIES, MDNode, QuotientGraph, md_tree, quotient_of, top_decomposition
from graphs.exceptions import CertificationError
from graphs.services import (
    Graph,
    VertexSet,
    components,
    find_induced_p3,
    induced,
    is_clique,
    is_cluster,
    is_triangle_free,
    list_triangles,
    remove_vertices,
)
from witnesses.patterns import C4, DART, FORBIDDEN, FOX, GEM, P4
from witnesses.services import Witness, certify, certify_unordered, find_forbidden_in, tp_check

logger = logging.getLogger(__name__)

QUOTIENT_TRIANGLE = 'quotient-triangle'
MODULE_NOT_CLUSTER = 'module-not-cluster'
NON_CLIQUE_MODULE_NEIGHBORHOOD = 'non-clique-module-neighborhood'
CROWDED_MODULE_NONTRIVIAL = 'crowded-module-nontrivial'

TRIANGLE_EXTRACT = 'triangle-extract'
TRIANGLE_EXTRACT_OUTER = 'triangle-extract-outer'
LEFTOVER_TRIANGLE = 'leftover-triangle'
ADJACENT_MODULES = 'adjacent-non-clique-modules'
SERIES_GEM = 'series-gem'
SERIES_DART = 'series-dart'
SERIES_FOX = 'series-fox'
MODULE_GEM = 'module-gem'
MODULE_DART = 'module-dart'
MODULE_DART_OUTER = 'module-dart-outer'
NON_CLIQUE_NEIGHBORS = 'non-clique-module-neighbors'
CROWDED_MODULE = 'crowded-module'


class ReduceResult(NamedTuple):
    removed: VertexSet
    witnesses: Tuple[Witness, ...]


class QuotientWorkspace:
    """
    The quotient of one prime tree node while triangles are disposed of.

    A quotient vertex is alive while some vertex of its part survives.
    Merged quotient vertices share a union-find root and act as one group.
    ``removed`` is shared with the enclosing ``ReduceState``.
    """

    def __init__(self, quotient: QuotientGraph, removed: Set[int]):
        self.quotient = quotient
        self.removed = removed
        self.view = quotient.alive_view(removed)
        self._parent = list(range(len(quotient.parts)))
        self._members: Dict[int, List[int]] = {i: [i] for i in range(len(quotient.parts))}

    def find(self, i: int) -> int:
        root = i
        while self._parent[root] != root:
            root = self._parent[root]
        while self._parent[i] != root:
            self._parent[i], i = root, self._parent[i]
        return root

    def merge(self, i: int, j: int) -> int:
        a, b = sorted((self.find(i), self.find(j)))
        if a != b:
            self._parent[b] = a
            self._members[a].extend(self._members.pop(b))
        return a

    def is_alive(self, root: int) -> bool:
        return any(self.view.is_alive(i) for i in self._members[root])

    def alive_vertices(self, root: int) -> List[int]:
        return sorted(v for i in self._members[root] for v in self.view.alive_vertices(i))

    def closed_neighbors(self, root: int) -> FrozenSet[int]:
        """Roots of the alive groups adjacent to ``root``, plus ``root`` itself."""
        q = self.quotient.qgraph
        result = {root}
        rejected = set()
        for i in self._members[root]:
            for j in q.adjacency[i]:
                r = self.find(j)
                if r in result or r in rejected:
                    continue
                if self.is_alive(r):
                    result.add(r)
                else:
                    rejected.add(r)
        return frozenset(result)


@dataclass
class ReduceState:
    """Triangles of every prime quotient in the original tree, with their workspaces."""
    tree: MDNode
    workspaces: List[QuotientWorkspace]
    pending_triangles: List[Tuple[int, Tuple[int, int, int]]]
    removed: Set[int] = field(default_factory=set)

    @classmethod
    def build(cls, g: Graph) -> 'ReduceState':
        tree = md_tree(g)
        removed: Set[int] = set()
        workspaces = []
        pending = []
        for node in tree.internal_nodes():
            if node.kind != PRIME:
                continue
            quotient = quotient_of(g, node.child_parts())
            workspaces.append(QuotientWorkspace(quotient, removed))
            index = len(workspaces) - 1
            pending.extend((index, triangle) for triangle in list_triangles(quotient.qgraph))
        logger.debug("reduce: %d prime quotients, %d triangles", len(workspaces), len(pending))
        return cls(tree, workspaces, pending, removed)


def dispose_triangle(
    g: Graph,
    ws: QuotientWorkspace,
    triangle: Tuple[int, int, int],
    step: Optional[str] = None,
) -> List[Witness]:
    """
    Delete forbidden subgraphs until ``triangle`` has a dead or merged group.

    Each round finds a group ``M'`` seen by exactly one of two triangle
    groups, a second distinguisher ``M''``, and one forbidden graph among one
    vertex from each of the five groups. Since the groups are modules of the
    parent, the i-th alive vertices of the groups used form another copy; as
    many copies as the smallest used group allows are deleted at once.

    Args:
        g: graph the workspace quotient was built on
        ws: workspace of the parent node
        triangle: three quotient vertices forming a triangle
        step: step name for certification errors; defaults to TRIANGLE_EXTRACT or TRIANGLE_EXTRACT_OUTER

    Returns:
        The certified witnesses deleted, in ``g`` ids
    """
    witnesses: List[Witness] = []
    while True:
        roots = [ws.find(i) for i in triangle]
        if not all(ws.is_alive(r) for r in roots):
            return witnesses
        if len(set(roots)) < 3:
            return witnesses

        closed = [ws.closed_neighbors(r) for r in roots]
        equal = next((pair for pair in itertools.combinations(range(3), 2) if closed[pair[0]] == closed[pair[1]]), None)
        if equal is not None:
            merged = ws.merge(roots[equal[0]], roots[equal[1]])
            logger.debug("reduce: merged quotient groups into %d", merged)
            return witnesses

        (m1, m2, m3), (n1, n2, n3) = roots, closed
        m_prime = min(n1 ^ n2)
        if m_prime in n1:
            m1, m2, n1, n2 = m2, m1, n2, n1
        if m_prime in n3:
            name = step or TRIANGLE_EXTRACT
            m_second = min(n2 ^ n3)
        else:
            name = step or TRIANGLE_EXTRACT_OUTER
            m_second = min(n1 ^ n3)

        groups = (m1, m2, m3, m_prime, m_second)
        representative = {ws.alive_vertices(r)[0]: r for r in groups}
        found = find_forbidden_in(g, representative, name)
        if found is None:
            raise CertificationError(
                name, f"groups {groups} with representatives {sorted(representative)} hold no forbidden graph"
            )

        columns = [ws.alive_vertices(representative[v]) for v in found.vertices]
        copies = min(len(column) for column in columns)
        for i in range(copies):
            witness = certify(g, found.kind, tuple(column[i] for column in columns), name)
            witnesses.append(witness)
            ws.removed.update(witness.vertices)
        logger.debug("reduce %s: removed %d %s copies", name, copies, found.kind)


def two_cliques_shape(g: Graph) -> Optional[Tuple[VertexSet, VertexSet, VertexSet]]:
    """
    Split ``g`` into its universal vertices and two disjoint cliques.

    Returns:
        ``(U, A, B)`` with ``A`` holding the smaller vertex id, or None when
        ``g`` minus its universal vertices is not exactly two cliques
    """
    if g.n < 2:
        return None
    universal = frozenset(v for v in g.vertices() if g.degree(v) == g.n - 1)
    rest = remove_vertices(g, universal)
    parts = components(rest.graph)
    if len(parts) != 2 or not all(is_clique(rest.graph, part) for part in parts):
        return None
    first, second = (rest.lift(part) for part in parts)
    return universal, first, second


def _non_edge(g: Graph, part) -> Optional[Tuple[int, int]]:
    members = sorted(part)
    for a in members:
        missing = set(members) - g.closed_neighbors(a)
        if missing:
            return a, min(missing)
    return None


def _expect(g: Graph, vertices, step: str, *kinds: str) -> Witness:
    witness = certify_unordered(g, vertices, step)
    if witness.kind not in kinds:
        raise CertificationError(step, f"expected {'/'.join(kinds)} on {sorted(vertices)}, found {witness.kind}")
    return witness


def _p3_in_some_component(g: Graph, pieces: List[VertexSet]) -> Tuple[Optional[Tuple[int, int, int]], int]:
    """An induced P3 inside one of ``pieces`` and the index of that piece."""
    for index, piece in enumerate(pieces):
        sub = induced(g, piece)
        p3 = find_induced_p3(sub.graph)
        if p3 is not None:
            return tuple(sub.origin[v] for v in p3), index
    return None, -1


def _inside_module(
    g: Graph,
    part: VertexSet,
    apex: int,
    step_tp: str,
    step_dart: str,
    dart_pieces: Optional[int] = None,
) -> Optional[Witness]:
    """
    Gem, C4 or dart made of a non-cluster or disconnected module and a vertex
    ``apex`` adjacent to all of it, when one of these shapes applies.
    """
    sub = induced(g, part)
    found = tp_check(sub.graph)
    if found is not None:
        lifted = found.lift(sub.origin)
        if found.kind == P4:
            return _expect(g, lifted.vertices + (apex,), step_tp, GEM)
        return _expect(g, lifted.vertices, step_tp, C4)

    pieces = [sub.lift(piece) for piece in components(sub.graph)]
    if len(pieces) < 2 or (dart_pieces is not None and len(pieces) != dart_pieces):
        return None
    p3, index = _p3_in_some_component(g, pieces)
    if p3 is None:
        return None
    other = min(min(piece) for i, piece in enumerate(pieces) if i != index)
    return _expect(g, p3 + (other, apex), step_dart, DART)


def _series_witnesses(g: Graph, parts: List[VertexSet], clique_flags: List[bool]) -> List[Witness]:
    """A series quotient: one non-clique module joined to universal vertices."""
    i = clique_flags.index(False)
    module = parts[i]
    universal = sorted(v for j, part in enumerate(parts) if j != i for v in part)
    wide = len(parts) >= 3

    if wide:
        found = _inside_module(g, module, universal[0], SERIES_GEM, SERIES_DART, dart_pieces=2)
        if found is not None:
            return [found]
        sub = induced(g, module)
        pieces = [sub.lift(piece) for piece in components(sub.graph)]
        if len(pieces) < 3:
            raise CertificationError(SERIES_DART, f"module {sorted(module)} left no dart and fewer than three components")
        return [_expect(g, (universal[0], universal[1]) + tuple(min(p) for p in pieces[:3]), SERIES_FOX, FOX)]

    if is_cluster(induced(g, module).graph):
        return []
    found = _inside_module(g, module, universal[0], MODULE_GEM, MODULE_DART)
    if found is None:
        raise CertificationError(MODULE_DART, f"non-cluster module {sorted(module)} next to one vertex yields no witness")
    return [found]


def _prime_witnesses(g: Graph, quotient: QuotientGraph, clique_flags: List[bool]) -> List[Witness]:
    q = quotient.qgraph
    parts = quotient.parts

    for i, part in enumerate(parts):
        if len(part) < 3 or is_cluster(induced(g, part).graph):
            continue
        j = min(q.adjacency[i])
        found = _inside_module(g, part, min(parts[j]), MODULE_GEM, MODULE_DART)
        if found is not None:
            return [found]

        sub = induced(g, part)
        w = sub.origin[next(v for v in sub.graph.vertices() if sub.graph.degree(v) == sub.graph.n - 1)]
        a, b = _non_edge(g, part)
        outer = q.closed_neighbors(i)
        for j in q.adjacency[i]:
            k = next((k for k in q.adjacency[j] if k not in outer), None)
            if k is not None:
                return [_expect(g, (w, a, b, min(parts[j]), min(parts[k])), MODULE_DART_OUTER, DART)]
        raise CertificationError(MODULE_DART_OUTER, f"no vertex at distance two from module {sorted(part)} in the quotient")

    for i, part in enumerate(parts):
        if clique_flags[i]:
            continue
        a, b = _non_edge(g, part)
        nbrs = list(q.adjacency[i])
        if len(nbrs) >= 2:
            x, y = min(parts[nbrs[0]]), min(parts[nbrs[1]])
            return [_expect(g, (a, x, b, y), NON_CLIQUE_NEIGHBORS, C4)]
        j = nbrs[0]
        if len(parts[j]) >= 2:
            p, r = sorted(parts[j])[:2]
            k = next((k for k in q.adjacency[j] if k != i), None)
            if k is None:
                raise CertificationError(NON_CLIQUE_NEIGHBORS, f"module {sorted(parts[j])} has no second quotient neighbor")
            return [_expect(g, (p, r, a, b, min(parts[k])), NON_CLIQUE_NEIGHBORS, FOX)]

    for i, part in enumerate(parts):
        if len(part) >= 2 and q.degree(i) >= 3:
            p, r = sorted(part)[:2]
            x1, x2, x3 = (min(parts[j]) for j in q.adjacency[i][:3])
            return [_expect(g, (p, r, x1, x2, x3), CROWDED_MODULE, FOX)]
    return []


def component_witnesses(g: Graph) -> List[Witness]:
    """
    Forbidden subgraphs of one connected graph found by a single cleaning
    round, or an empty list when ``g`` already has the required shape.
    """
    if g.n <= 2 or is_clique(g) or two_cliques_shape(g) is not None:
        return []
    kind, parts = top_decomposition(g)
    quotient = quotient_of(g, parts)
    q = quotient.qgraph

    if kind == PRIME:
        triangle_free = is_triangle_free(q)
        if not triangle_free:
            logger.warning("reduce: quotient triangle %s survived triangle disposal; disposing it here", triangle_free.witness)
            ws = QuotientWorkspace(quotient, set())
            return dispose_triangle(g, ws, triangle_free.witness, LEFTOVER_TRIANGLE)

    clique_flags = [is_clique(g, part) for part in parts]
    for i, j in sorted(q.edges()):
        if not clique_flags[i] and not clique_flags[j]:
            a, b = _non_edge(g, parts[i])
            c, d = _non_edge(g, parts[j])
            return [_expect(g, (a, c, b, d), ADJACENT_MODULES, C4)]

    if kind == SERIES:
        return _series_witnesses(g, list(parts), clique_flags)
    return _prime_witnesses(g, quotient, clique_flags)


def reduce(g: Graph) -> ReduceResult:
    """
    Disjoint certified forbidden subgraphs whose deletion leaves every
    component in the shape the driver needs.

    Args:
        g: any graph

    Returns:
        ReduceResult with the union of the witness vertices and the witnesses

    Raises:
        CertificationError: a constructed witness failed certification
    """
    if g.n == 0 or is_clique(g):
        return ReduceResult(frozenset(), ())

    state = ReduceState.build(g)
    witnesses: List[Witness] = []
    for index, triangle in state.pending_triangles:
        witnesses.extend(dispose_triangle(g, state.workspaces[index], triangle))
    removed = state.removed
    logger.debug("reduce triangles: %d witnesses, %d vertices removed", len(witnesses), len(removed))

    pending = [frozenset(g.vertices()) - removed]
    while pending:
        piece = pending.pop()
        if not piece:
            continue
        sub = induced(g, piece)
        parts = components(sub.graph)
        if len(parts) > 1:
            pending.extend(sub.lift(part) for part in reversed(parts))
            continue
        found = [w.lift(sub.origin) for w in component_witnesses(sub.graph)]
        if not found:
            continue
        for witness in found:
            removed.update(witness.vertices)
            logger.debug("reduce cleaning: removed %s %s", witness.kind, witness.vertices)
        witnesses.extend(found)
        pending.append(piece - removed)

    return ReduceResult(frozenset(removed), tuple(witnesses))


def shape_violations(g: Graph) -> List[str]:
    """
    Names of the shape clauses ``g`` breaks, checked per component.

    A component passes when it is a clique or universal vertices plus two
    disjoint cliques, or when its quotient is triangle-free, every maximal
    strong module is a cluster graph, every non-clique module has exactly one
    neighbor vertex, and every module with more than two quotient neighbors
    is a single vertex.
    """
    violations: List[str] = []
    for part in components(g):
        sub = induced(g, part).graph
        if sub.n <= 2 or is_clique(sub) or two_cliques_shape(sub) is not None:
            continue
        _, modules = top_decomposition(sub)
        quotient = quotient_of(sub, modules)
        q = quotient.qgraph
        if not is_triangle_free(q):
            violations.append(QUOTIENT_TRIANGLE)
        for i, module in enumerate(modules):
            if not is_cluster(induced(sub, module).graph):
                violations.append(MODULE_NOT_CLUSTER)
            elif not is_clique(sub, module) and sum(len(modules[j]) for j in q.adjacency[i]) != 1:
                violations.append(NON_CLIQUE_MODULE_NEIGHBORHOOD)
            if q.degree(i) > 2 and len(module) > 1:
                violations.append(CROWDED_MODULE_NONTRIVIAL)
    return list(dict.fromkeys(violations))


def check_reduce_postconditions(g: Graph, removed, witnesses) -> List[str]:
    """
    Problems with a reduce result; empty when it is sound.

    Checks that the witnesses are certified, forbidden, pairwise disjoint and
    cover ``removed`` exactly, and that ``g - removed`` passes
    ``shape_violations``.
    """
    problems = []
    seen: Set[int] = set()
    for witness in witnesses:
        if not witness.certified or witness.kind not in FORBIDDEN:
            problems.append(f"witness {witness.kind} {witness.vertices} is not a certified forbidden graph")
        try:
            certify(g, witness.kind, witness.vertices, 'postcondition')
        except CertificationError as exc:
            problems.append(str(exc))
        if seen & set(witness.vertices):
            problems.append(f"witness {witness.vertices} overlaps an earlier witness")
        seen.update(witness.vertices)
    if seen != set(removed):
        problems.append(f"witness vertices {sorted(seen)} differ from removed {sorted(removed)}")
    rest = remove_vertices(g, removed)
    problems.extend(f"shape: {name}" for name in shape_violations(rest.graph))
    return problems
