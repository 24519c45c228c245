"""
Exceptions shared by every clusterkit app.

Rejected input raises a ``GraphError`` (a ``ValueError``); broken internal
guarantees raise ``CertificationError`` and are never swallowed.
"""


class GraphError(ValueError):
    """Input that cannot be turned into (or used with) a simple graph."""


class SelfLoopError(GraphError):
    def __init__(self, pair, line=None):
        self.pair = tuple(pair)
        self.line = line
        where = f" (line {line})" if line is not None else ""
        super().__init__(f"Self-loop {self.pair[0]!r}-{self.pair[1]!r} is not allowed{where}")


class NegativeWeightError(GraphError):
    def __init__(self, label, weight):
        self.label = label
        self.weight = weight
        super().__init__(f"Vertex {label!r} has invalid weight {weight!r}; weights must be finite and >= 0")


class VertexRangeError(GraphError):
    def __init__(self, vertex, n):
        self.vertex = vertex
        super().__init__(f"Vertex id {vertex!r} is outside 0..{n - 1}")


class NotAModuleError(GraphError):
    """A vertex set is split by a vertex outside it."""

    def __init__(self, part, splitter, inside_pair):
        self.part = frozenset(part)
        self.splitter = splitter
        self.inside_pair = tuple(inside_pair)
        a, b = self.inside_pair
        super().__init__(
            f"Vertex set {sorted(self.part)} is not a module: vertex {splitter} "
            f"is adjacent to {a} but not to {b}"
        )


class GraphTooLargeError(GraphError):
    def __init__(self, operation, n, limit):
        self.operation = operation
        self.n = n
        self.limit = limit
        super().__init__(f"{operation} supports at most {limit} vertices, got {n}")


class GraphFormatError(GraphError):
    def __init__(self, message, line=None):
        self.line = line
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(f"{prefix}{message}")


class CertificationError(RuntimeError):
    """An internal soundness check failed; ``step`` names where."""

    def __init__(self, step, message):
        self.step = step
        super().__init__(f"[{step}] {message}")


class ExactUnavailable(RuntimeError):
    """The exact solver ran out of its search budget."""
