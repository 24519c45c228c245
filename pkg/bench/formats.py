"""
Edge-list reading and writing.

One edge ``u v`` per line; ``# ...`` comments and blank lines are skipped;
``w <vertex> <number>`` sets a vertex weight; a single token names an
isolated vertex. Labels are whitespace-free tokens and stay strings.
"""

from typing import Dict, List, Optional, Tuple

from graphs.exceptions import GraphFormatError, NegativeWeightError, SelfLoopError
from graphs.services import Graph, build_graph


def _number(token: str, line: int) -> float:
    try:
        value = float(token)
    except ValueError:
        raise GraphFormatError(f"weight {token!r} is not a number", line)
    return int(value) if value.is_integer() else value


def _strip(raw: str) -> List[str]:
    return raw.split('#', 1)[0].split()


def parse_graph(text: str) -> Graph:
    """
    Parse an edge-list document.

    Raises:
        GraphFormatError: a line has the wrong shape or a bad weight
        SelfLoopError: an edge joins a label to itself
    """
    edges: List[Tuple[str, str]] = []
    vertices: List[str] = []
    weights: Dict[str, float] = {}
    for line, raw in enumerate(text.splitlines(), start=1):
        tokens = _strip(raw)
        if not tokens:
            continue
        if tokens[0] == 'w' and len(tokens) == 3:
            weights[tokens[1]] = _number(tokens[2], line)
        elif len(tokens) == 2:
            if tokens[0] == tokens[1]:
                raise SelfLoopError(tokens, line)
            edges.append((tokens[0], tokens[1]))
        elif len(tokens) == 1:
            vertices.append(tokens[0])
        else:
            raise GraphFormatError(f"expected 'u v', 'w <vertex> <number>' or a single vertex, got {raw.strip()!r}", line)

    try:
        return build_graph(edges, weights, vertices)
    except NegativeWeightError as exc:
        line = next(i for i, raw in enumerate(text.splitlines(), start=1)
                    if _strip(raw)[:2] == ['w', str(exc.label)])
        raise GraphFormatError(str(exc), line) from exc


def parse_weights(text: str) -> Dict[str, float]:
    """Parse ``<vertex> <number>`` lines of a separate weights file."""
    weights: Dict[str, float] = {}
    for line, raw in enumerate(text.splitlines(), start=1):
        tokens = _strip(raw)
        if not tokens:
            continue
        if len(tokens) != 2:
            raise GraphFormatError(f"expected '<vertex> <number>', got {raw.strip()!r}", line)
        weights[tokens[0]] = _number(tokens[1], line)
    return weights


def apply_weights(g: Graph, weights: Dict[str, float]) -> Graph:
    """Reweight ``g`` by label; labels missing from ``g`` are rejected."""
    current = list(g.weights)
    for label, weight in weights.items():
        try:
            current[g.id_of(label)] = weight
        except KeyError:
            raise GraphFormatError(f"weights file names unknown vertex {label!r}")
    return g.with_weights(current)


def serialize_graph(g: Graph) -> str:
    """Edge-list text that parses back to the same graph up to id order."""
    lines = [f"{g.labels[u]} {g.labels[v]}" for u, v in g.edges()]
    lines += [str(g.labels[v]) for v in g.vertices() if g.degree(v) == 0]
    lines += [f"w {g.labels[v]} {g.weights[v]}" for v in g.vertices() if g.weights[v] != 1]
    return '\n'.join(lines) + ('\n' if lines else '')


def _read_text(path: str) -> str:
    with open(path, 'rb') as handle:
        raw = handle.read()
    lines = []
    for line, chunk in enumerate(raw.split(b'\n'), start=1):
        try:
            lines.append(chunk.decode('utf-8'))
        except UnicodeDecodeError as exc:
            raise GraphFormatError(f"{path}: invalid UTF-8 byte {chunk[exc.start]:#04x}", line) from exc
    return '\n'.join(lines)


def read_graph(path: str, weights_path: Optional[str] = None) -> Graph:
    """
    Load an edge-list file, optionally reweighted from a weights file.

    Raises:
        GraphFormatError: a line is not valid UTF-8 or not a valid record
        OSError: a file cannot be read
    """
    g = parse_graph(_read_text(path))
    if weights_path:
        g = apply_weights(g, parse_weights(_read_text(weights_path)))
    return g
