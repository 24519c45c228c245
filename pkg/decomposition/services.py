"""
Modular Decomposition Service Module

Strong modules, the modular decomposition tree, quotient graphs over module
partitions and the exhaustive strong-module oracle used to certify them.
"""

import logging
from collections import defaultdict, deque
from dataclasses import dataclass, field
from typing import Dict, Iterable, Iterator, List, NamedTuple, Optional, Sequence, Set, Tuple

from graphs.conf import get_setting
from graphs.exceptions import GraphError, GraphTooLargeError, NotAModuleError
from graphs.services import Graph, VertexSet, co_components, components, induced

logger = logging.getLogger(__name__)

LEAF = 'leaf'
PARALLEL = 'parallel'
SERIES = 'series'
PRIME = 'prime'


@dataclass(frozen=True)
class MDNode:
    """
    A strong module of the root graph and its maximal strong submodules.

    Children partition ``vertices`` and are ordered by smallest vertex id.
    """
    vertices: VertexSet
    kind: str
    children: Tuple['MDNode', ...] = ()

    @property
    def is_leaf(self) -> bool:
        return self.kind == LEAF

    def iter_nodes(self) -> Iterator['MDNode']:
        stack = [self]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(reversed(node.children))

    def internal_nodes(self) -> Iterator['MDNode']:
        return (node for node in self.iter_nodes() if not node.is_leaf)

    def as_sets(self) -> Set[VertexSet]:
        return {node.vertices for node in self.iter_nodes()}

    def child_parts(self) -> List[VertexSet]:
        return [child.vertices for child in self.children]


class Splitter(NamedTuple):
    """A vertex outside a set that sees ``inside_pair[0]`` but not ``inside_pair[1]``."""
    vertex: int
    inside_pair: Tuple[int, int]


@dataclass(frozen=True)
class QuotientGraph:
    """
    Module partition of (a subset of) ``base`` with the between-module graph.

    ``qgraph`` vertex ``i`` stands for ``parts[i]`` and carries weight
    ``len(parts[i])``.
    """
    base: Graph
    parts: Tuple[VertexSet, ...]
    qgraph: Graph
    part_index: Dict[int, int] = field(repr=False, compare=False, default_factory=dict)

    @property
    def part_weight(self) -> Tuple[float, ...]:
        return self.qgraph.weights

    def part_of(self, v: int) -> int:
        return self.part_index[v]

    def alive_view(self, removed: Set[int]) -> 'AliveQuotient':
        return AliveQuotient(self, removed)


class AliveQuotient:
    """
    A quotient with base vertices in ``removed`` treated as deleted.

    ``removed`` is held by reference, so later deletions show through. A part
    is alive while at least one of its vertices survives.
    """

    def __init__(self, quotient: QuotientGraph, removed: Set[int]):
        self.quotient = quotient
        self.removed = removed

    def is_alive(self, i: int) -> bool:
        return not self.quotient.parts[i] <= self.removed

    def alive_vertices(self, i: int) -> List[int]:
        return sorted(self.quotient.parts[i] - self.removed)


def _refine(g: Graph, pivot_order: Sequence[int], v: int) -> List[Set[int]]:
    """
    Coarsest partition with ``{v}`` a part and every other part a module.

    Vertex partition refinement: a pivot splits every part not containing it
    into neighbors and non-neighbors. When a part splits, the vertices of the
    smaller half are queued as pivots and the smaller half is refined at once
    by its adjacency signature into the larger half, so every vertex is
    rescanned O(log n) times.
    """
    rest = set(g.vertices()) - {v}
    parts: List[Set[int]] = [{v}] + ([rest] if rest else [])
    part_of = [1] * g.n
    part_of[v] = 0

    queue = deque(pivot_order)
    queued = set(pivot_order)

    def move(vertices: Iterable[int], source: int) -> int:
        moved = set(vertices)
        parts[source] -= moved
        parts.append(moved)
        index = len(parts) - 1
        for y in moved:
            part_of[y] = index
        return index

    def after_split(first: int, second: int) -> None:
        small, large = (first, second) if len(parts[first]) <= len(parts[second]) else (second, first)
        for y in parts[small]:
            if y not in queued:
                queued.add(y)
                queue.append(y)
        signatures: Dict[Tuple[int, ...], List[int]] = defaultdict(list)
        for y in sorted(parts[small]):
            signatures[tuple(z for z in g.adjacency[y] if part_of[z] == large)].append(y)
        for group in list(signatures.values())[1:]:
            move(group, small)

    while queue:
        x = queue.popleft()
        queued.discard(x)
        own = part_of[x]
        hits: Dict[int, List[int]] = defaultdict(list)
        for y in g.adjacency[x]:
            if part_of[y] != own:
                hits[part_of[y]].append(y)
        for p, inside in hits.items():
            if len(inside) == len(parts[p]):
                continue
            after_split(p, move(inside, p))
    return parts


def maximal_modules_without(g: Graph, v: int) -> List[VertexSet]:
    """The maximal modules of ``g`` that avoid ``v``; they partition ``V - {v}``."""
    order = [v] + [x for x in g.vertices() if x != v]
    parts = _refine(g, order, v)
    return sorted((frozenset(p) for p in parts if v not in p), key=min)


def module_closure(g: Graph, seed: Iterable[int]) -> VertexSet:
    """
    Smallest module containing ``seed``.

    Splitters are added until none is left; ``count[z]`` tracks how many
    members ``z`` sees, ``full`` the outside vertices seeing all of them.
    """
    members: Set[int] = set()
    count = [0] * g.n
    full: Optional[Set[int]] = None
    splitters: List[int] = []

    def add(y: int) -> None:
        nonlocal full
        members.add(y)
        nbrs = g.neighbors(y)
        for z in nbrs:
            if z not in members:
                count[z] += 1
        if full is None:
            full = set(z for z in nbrs if z not in members)
            return
        full.discard(y)
        for z in full:
            if z not in nbrs:
                splitters.append(z)
        full = {z for z in full if z in nbrs}
        size = len(members)
        for z in nbrs:
            if z not in members and count[z] == 1 and size > 1:
                splitters.append(z)

    for y in sorted(set(seed)):
        if y not in members:
            add(y)
    while splitters and len(members) < g.n:
        z = splitters.pop()
        if z not in members:
            add(z)
    return frozenset(members)


def is_module(g: Graph, s: Iterable[int]) -> Optional[Splitter]:
    """``None`` if ``s`` is a module of ``g``, otherwise a splitter certificate."""
    members = frozenset(s)
    seen: Dict[int, int] = defaultdict(int)
    for x in members:
        for z in g.adjacency[x]:
            if z not in members:
                seen[z] += 1
    for z in sorted(seen):
        if seen[z] < len(members):
            nbrs = g.neighbors(z)
            a = min(x for x in members if x in nbrs)
            b = min(x for x in members if x not in nbrs)
            return Splitter(z, (a, b))
    return None


def _prime_children(g: Graph) -> List[VertexSet]:
    """Maximal strong modules of a connected and co-connected graph."""
    v = 0
    modules_without_v = maximal_modules_without(g, v)
    containing_v = _module_of(g, v, modules_without_v)
    children = [containing_v] + [p for p in modules_without_v if not p & containing_v]
    return sorted(children, key=min)


def _module_of(g: Graph, v: int, modules_without_v: List[VertexSet]) -> VertexSet:
    """
    The maximal strong module containing ``v``.

    For ``u`` outside it, the part of ``v`` among the maximal modules avoiding
    ``u`` is exactly that module, and only then does its closure with ``u``
    reach the whole graph.
    """
    known: Set[int] = {v}
    everything = g.n
    while True:
        u = next(x for x in g.vertices() if x not in known)
        candidate = next(p for p in maximal_modules_without(g, u) if v in p)
        closure = module_closure(g, candidate | {u})
        if len(closure) == everything:
            return candidate
        known |= closure
        for part in modules_without_v:
            if part & known:
                known |= part


def top_decomposition(g: Graph) -> Tuple[str, List[VertexSet]]:
    """
    Root kind and maximal strong modules of ``g``.

    Disconnected graphs are parallel over their components, graphs with a
    disconnected complement are series over their co-components, all others
    are prime.
    """
    if g.n == 0:
        raise GraphError("Modular decomposition needs at least one vertex")
    if g.n == 1:
        return LEAF, [frozenset({0})]
    parts = components(g)
    if len(parts) > 1:
        return PARALLEL, parts
    parts = co_components(g)
    if len(parts) > 1:
        return SERIES, parts
    return PRIME, _prime_children(g)


def md_tree(g: Graph) -> MDNode:
    """
    Modular decomposition tree of ``g``.

    Built with an explicit stack; each node is decomposed on its own induced
    subgraph and the parts lifted back to root ids.
    """
    if g.n == 0:
        raise GraphError("Modular decomposition needs at least one vertex")

    records: List[list] = [[frozenset(g.vertices()), LEAF, []]]
    stack = [0]
    while stack:
        r = stack.pop()
        vertices = records[r][0]
        if len(vertices) == 1:
            continue
        sub = induced(g, vertices)
        kind, parts = top_decomposition(sub.graph)
        records[r][1] = kind
        for part in parts:
            records.append([sub.lift(part), LEAF, []])
            child = len(records) - 1
            records[r][2].append(child)
            stack.append(child)

    nodes: List[Optional[MDNode]] = [None] * len(records)
    for r in reversed(range(len(records))):
        vertices, kind, children = records[r]
        nodes[r] = MDNode(vertices, kind, tuple(nodes[c] for c in children))
    logger.debug("md_tree: n=%d nodes=%d", g.n, len(records))
    return nodes[0]


def maximal_strong_modules(g: Graph) -> List[VertexSet]:
    if g.n < 2:
        raise GraphError("maximal strong modules need at least two vertices")
    return top_decomposition(g)[1]


def minimal_strong_module(tree: MDNode, s: Iterable[int]) -> MDNode:
    """Deepest tree node whose vertex set contains ``s``."""
    target = frozenset(s)
    node = tree
    while True:
        deeper = next((c for c in node.children if target <= c.vertices), None)
        if deeper is None:
            return node
        node = deeper


def _not_a_module(g: Graph, first: VertexSet, second: VertexSet) -> NotAModuleError:
    """Certificate for two parts that are neither complete nor anticomplete."""
    for part, other in ((first, second), (second, first)):
        for z in sorted(other):
            nbrs = g.neighbors(z)
            inside = [x for x in sorted(part) if x in nbrs]
            outside = [x for x in sorted(part) if x not in nbrs]
            if inside and outside:
                return NotAModuleError(part, z, (inside[0], outside[0]))
    raise GraphError(f"Parts {sorted(first)} and {sorted(second)} are uniform on each other")


def quotient_of(g: Graph, parts: Iterable[Iterable[int]]) -> QuotientGraph:
    """
    Quotient of ``g`` over a module partition of (a subset of) its vertices.

    Edge counts between every pair of parts must be zero or complete; with
    ``CERTIFY_QUOTIENTS`` every vertex pair is also checked directly.

    Raises:
        NotAModuleError: a part is split by a vertex of another part
        GraphError: the parts overlap
    """
    frozen = tuple(frozenset(p) for p in parts)
    part_index: Dict[int, int] = {}
    for i, part in enumerate(frozen):
        for x in part:
            if x in part_index:
                raise GraphError(f"Vertex {x} appears in more than one part")
            part_index[x] = i

    edge_counts: Dict[Tuple[int, int], int] = defaultdict(int)
    for x, i in part_index.items():
        for y in g.adjacency[x]:
            j = part_index.get(y)
            if j is not None and j != i:
                edge_counts[(i, j)] += 1

    adjacency: List[List[int]] = [[] for _ in frozen]
    for (i, j), count in edge_counts.items():
        if count != len(frozen[i]) * len(frozen[j]):
            raise _not_a_module(g, frozen[i], frozen[j])
        adjacency[i].append(j)

    if get_setting('CERTIFY_QUOTIENTS'):
        for i, j in ((i, j) for i in range(len(frozen)) for j in range(i + 1, len(frozen))):
            expected = j in adjacency[i]
            for x in frozen[i]:
                for y in frozen[j]:
                    if g.has_edge(x, y) != expected:
                        raise _not_a_module(g, frozen[i], frozen[j])

    qgraph = Graph(adjacency, list(range(len(frozen))), [len(p) for p in frozen])
    return QuotientGraph(g, frozen, qgraph, part_index)


def strong_modules_oracle(g: Graph) -> List[VertexSet]:
    """
    Every strong module of ``g`` by exhaustive subset enumeration.

    Raises:
        GraphTooLargeError: more than ``ORACLE_MAX_VERTICES`` vertices
    """
    limit = get_setting('ORACLE_MAX_VERTICES')
    if g.n > limit:
        raise GraphTooLargeError('strong_modules_oracle', g.n, limit)

    neighbor_masks = [sum(1 << u for u in g.adjacency[v]) for v in g.vertices()]
    modules = []
    for mask in range(1, 1 << g.n):
        ok = True
        for z in g.vertices():
            if mask >> z & 1:
                continue
            seen = neighbor_masks[z] & mask
            if seen and seen != mask:
                ok = False
                break
        if ok:
            modules.append(mask)

    strong = []
    for mask in modules:
        if all(not (mask & other) or (mask & other) in (mask, other) for other in modules):
            strong.append(frozenset(v for v in g.vertices() if mask >> v & 1))
    return sorted(strong, key=lambda s: (len(s), sorted(s)))
