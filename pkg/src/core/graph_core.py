#!/usr/bin/env python3
"""
graph_core.py

Graph representation, the graph6 and edge-list text formats, and the
structural predicates the rest of the package relies on (connectivity,
complement, degree partition, double connectivity).

Vertices are indexed 0..n-1. External vertex names read from an edge-list
file are kept as `Graph.labels` for output only; they never take part in
equality.

Classes
-------
Graph
    Immutable simple undirected graph backed by a read-only 0/1 numpy matrix.
Partition
    Canonically ordered partition of {0..n-1}.

Functions
---------
parse_graph(text, fmt) -> Graph
serialize_graph(g, fmt) -> str
complement(g) -> Graph
is_connected(g) -> bool
is_doubly_connected(g) -> bool
degree_partition(g) -> Partition
degree_partitions_equivalent(g1, g2) -> bool

Examples
--------
>>> from src.core.graph_core import parse_graph, is_doubly_connected
>>> p3 = parse_graph("n 3\\n0 1\\n1 2", "edgelist")
>>> is_doubly_connected(p3)
False
"""

from collections import Counter, defaultdict
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Hashable, Iterable, Iterator, List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np
from loguru import logger

from src.core.errors import ContractError, GraphParseError, GraphValidationError

FORMATS = ("graph6", "edgelist")
GRAPH6_HEADER = ">>graph6<<"


@dataclass(frozen=True, eq=False)
class Graph:
    """
    Simple undirected graph.

    Attributes
    ----------
    n : int
        Number of vertices, at least 1.
    adjacency : numpy.ndarray
        Read-only n×n uint8 matrix, symmetric with zero diagonal.
    labels : tuple of str, optional
        External vertex names, one per vertex.
    """

    n: int
    adjacency: np.ndarray
    labels: Optional[Tuple[str, ...]] = None

    def __post_init__(self) -> None:
        matrix = np.array(self.adjacency, dtype=np.int64, copy=True)
        if matrix.ndim != 2 or matrix.shape != (self.n, self.n):
            raise GraphValidationError(
                f"adjacency must be {self.n}x{self.n}, got shape {matrix.shape}"
            )
        if self.n < 1:
            raise GraphValidationError("a graph needs at least one vertex")
        if not np.isin(matrix, (0, 1)).all():
            raise GraphValidationError("adjacency entries must be 0 or 1")
        loops = np.flatnonzero(np.diag(matrix))
        if loops.size:
            raise GraphValidationError(f"loop at vertex {int(loops[0])}")
        if not (matrix == matrix.T).all():
            i, j = np.argwhere(matrix != matrix.T)[0]
            raise GraphValidationError(
                f"asymmetric adjacency: ({int(i)},{int(j)}) declared one way only"
            )
        if self.labels is not None and len(self.labels) != self.n:
            raise GraphValidationError(
                f"expected {self.n} labels, got {len(self.labels)}"
            )
        frozen = matrix.astype(np.uint8)
        frozen.setflags(write=False)
        object.__setattr__(self, "adjacency", frozen)
        if self.labels is not None:
            object.__setattr__(self, "labels", tuple(str(x) for x in self.labels))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.adjacency, other.adjacency)

    def __hash__(self) -> int:
        return hash((self.n, self.adjacency.tobytes()))

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, edges={self.edge_count})"

    @property
    def edge_count(self) -> int:
        return int(self.adjacency.sum()) // 2

    def has_edge(self, u: int, v: int) -> bool:
        return bool(self.adjacency[u, v])

    def edges(self) -> List[Tuple[int, int]]:
        """Edges as (i, j) pairs with i < j, in row-major order."""
        rows, cols = np.nonzero(np.triu(self.adjacency, 1))
        return [(int(i), int(j)) for i, j in zip(rows, cols)]

    def neighbors(self, v: int) -> List[int]:
        return [int(u) for u in np.flatnonzero(self.adjacency[v])]

    def degrees(self) -> List[int]:
        return [int(d) for d in self.adjacency.sum(axis=1)]

    def degree(self, v: int) -> int:
        return int(self.adjacency[v].sum())

    def label_of(self, v: int) -> str:
        return self.labels[v] if self.labels is not None else str(v)


@dataclass(frozen=True)
class Partition:
    """
    Partition of {0..n-1} into disjoint classes.

    The constructor canonicalizes: members ascending, classes ordered by their
    smallest member. Two partitions are equal iff they group the same vertices.
    """

    classes: Tuple[Tuple[int, ...], ...]

    def __post_init__(self) -> None:
        canonical = tuple(sorted((tuple(sorted(c)) for c in self.classes if c)))
        members = [v for c in canonical for v in c]
        if sorted(members) != list(range(len(members))):
            raise ContractError(
                "partition classes must be disjoint and cover 0..n-1 exactly"
            )
        object.__setattr__(self, "classes", canonical)

    @classmethod
    def from_keys(cls, keys: Sequence[Hashable]) -> "Partition":
        """Group vertex i with every vertex j such that keys[i] == keys[j]."""
        groups: Dict[Hashable, List[int]] = defaultdict(list)
        for v, key in enumerate(keys):
            groups[key].append(v)
        return cls(tuple(tuple(g) for g in groups.values()))

    @classmethod
    def discrete(cls, n: int) -> "Partition":
        return cls(tuple((v,) for v in range(n)))

    @property
    def size(self) -> int:
        return sum(len(c) for c in self.classes)

    def __len__(self) -> int:
        return len(self.classes)

    def __iter__(self) -> Iterator[Tuple[int, ...]]:
        return iter(self.classes)

    def class_of(self, v: int) -> Tuple[int, ...]:
        for c in self.classes:
            if v in c:
                return c
        raise ContractError(f"vertex {v} is not in the partition")

    def same_class(self, u: int, v: int) -> bool:
        return v in self.class_of(u)

    def refines(self, other: "Partition") -> bool:
        """True iff every class of self lies inside one class of other."""
        if self.size != other.size:
            return False
        owner = {}
        for idx, c in enumerate(other.classes):
            for v in c:
                owner[v] = idx
        return all(len({owner[v] for v in c}) == 1 for c in self.classes)


# ---------------------------------------------------------------------------
# Construction helpers
# ---------------------------------------------------------------------------


def from_adjacency(matrix, labels: Optional[Sequence[str]] = None) -> Graph:
    """Build a graph from any square 0/1 array-like, validating it."""
    array = np.asarray(matrix)
    if array.ndim != 2 or array.shape[0] != array.shape[1]:
        raise GraphValidationError(f"adjacency must be square, got {array.shape}")
    return Graph(array.shape[0], array, tuple(labels) if labels is not None else None)


def from_edges(
    n: int, edges: Iterable[Tuple[int, int]], labels: Optional[Sequence[str]] = None
) -> Graph:
    """Build a graph on n vertices from (u, v) pairs. Loops and repeats are rejected."""
    matrix = np.zeros((n, n), dtype=np.int64)
    for u, v in edges:
        if not (0 <= u < n and 0 <= v < n):
            raise GraphValidationError(f"edge ({u},{v}) out of range for n={n}")
        if u == v:
            raise GraphValidationError(f"loop at vertex {u}")
        if matrix[u, v]:
            raise GraphValidationError(f"duplicate edge ({u},{v})")
        matrix[u, v] = matrix[v, u] = 1
    return Graph(n, matrix, tuple(labels) if labels is not None else None)


def from_networkx(graph: nx.Graph) -> Graph:
    """
    Convert a networkx graph, numbering nodes in sorted order.

    The original node names are kept as labels.
    """
    nodes = sorted(graph.nodes())
    index = {node: i for i, node in enumerate(nodes)}
    edges = []
    for u, v in graph.edges():
        if u == v:
            raise GraphValidationError(f"loop at node {u!r}")
        edges.append((index[u], index[v]))
    return from_edges(len(nodes), set(tuple(sorted(e)) for e in edges), [str(x) for x in nodes])


def to_networkx(g: Graph) -> nx.Graph:
    graph = nx.Graph()
    graph.add_nodes_from(range(g.n))
    graph.add_edges_from(g.edges())
    return graph


def relabel(g: Graph, perm: Sequence[int]) -> Graph:
    """
    Rename vertex i to perm[i].

    Equivalent to PᵀHP with P[i][perm[i]] = 1.
    """
    if sorted(perm) != list(range(g.n)):
        raise ContractError(f"not a permutation of 0..{g.n - 1}: {list(perm)}")
    inverse = np.argsort(np.asarray(perm))
    return Graph(g.n, g.adjacency[np.ix_(inverse, inverse)])


# ---------------------------------------------------------------------------
# Text formats
# ---------------------------------------------------------------------------


def _graph6_size(data: str) -> Tuple[int, int]:
    """Decode N(n); returns (n, offset of the first adjacency byte)."""
    if not data:
        raise GraphParseError("empty graph6 string", byte=0)
    if data[0] != "~":
        return ord(data[0]) - 63, 1
    if len(data) >= 2 and data[1] == "~":
        width, start = 6, 2
    else:
        width, start = 3, 1
    if len(data) < start + width:
        raise GraphParseError("truncated graph6 size field", byte=len(data))
    n = 0
    for ch in data[start:start + width]:
        n = (n << 6) | (ord(ch) - 63)
    return n, start + width


def _decode_graph6(text: str) -> Graph:
    data = text.strip()
    if data.startswith(GRAPH6_HEADER):
        data = data[len(GRAPH6_HEADER):]
    if data.startswith(":") or data.startswith("&"):
        raise GraphParseError("sparse6/digraph6 input is not graph6", byte=0)
    for pos, ch in enumerate(data):
        if not 63 <= ord(ch) <= 126:
            raise GraphParseError(f"invalid graph6 character {ch!r}", byte=pos)

    n, offset = _graph6_size(data)
    if n < 1:
        raise GraphParseError("graph6 encodes an empty graph", byte=0)
    bit_count = n * (n - 1) // 2
    needed = (bit_count + 5) // 6
    body = data[offset:]
    if len(body) != needed:
        raise GraphParseError(
            f"graph6 body has {len(body)} bytes, expected {needed} for n={n}",
            byte=offset + min(len(body), needed),
        )

    matrix = np.zeros((n, n), dtype=np.int64)
    k = 0
    for j in range(1, n):
        for i in range(j):
            value = ord(body[k // 6]) - 63
            if (value >> (5 - k % 6)) & 1:
                matrix[i, j] = matrix[j, i] = 1
            k += 1
    if needed:
        padding = 6 * needed - bit_count
        if (ord(body[-1]) - 63) & ((1 << padding) - 1):
            raise GraphParseError("non-zero graph6 padding bits", byte=offset + needed - 1)
    return Graph(n, matrix)


def _encode_graph6(g: Graph) -> str:
    n = g.n
    if n <= 62:
        head = chr(n + 63)
    elif n <= 258047:
        head = "~" + "".join(chr(((n >> s) & 63) + 63) for s in (12, 6, 0))
    else:
        head = "~~" + "".join(chr(((n >> s) & 63) + 63) for s in (30, 24, 18, 12, 6, 0))
    bits = [int(g.adjacency[i, j]) for j in range(1, n) for i in range(j)]
    bits.extend([0] * (-len(bits) % 6))
    body = []
    for k in range(0, len(bits), 6):
        value = 0
        for b in bits[k:k + 6]:
            value = (value << 1) | b
        body.append(chr(value + 63))
    return head + "".join(body)


def _decode_edgelist(text: str) -> Graph:
    lines = [
        (number, raw.split("#", 1)[0].strip())
        for number, raw in enumerate(text.splitlines(), start=1)
    ]
    lines = [(number, body) for number, body in lines if body]
    if not lines:
        raise GraphParseError("missing 'n <count>' header", line=1)

    header_line, header = lines[0]
    tokens = header.split()
    count_ok = len(tokens) == 2 and tokens[1].isascii() and tokens[1].isdecimal()
    if not count_ok or tokens[0] != "n":
        raise GraphParseError(f"bad header {header!r}", line=header_line)
    n = int(tokens[1])
    if n < 1:
        raise GraphValidationError(f"vertex count must be positive (line {header_line})")

    labels: Optional[List[str]] = None
    matrix = np.zeros((n, n), dtype=np.int64)
    for number, body in lines[1:]:
        tokens = body.split()
        if tokens[0] == "labels":
            if labels is not None or len(tokens) != n + 1:
                raise GraphParseError("labels line must list exactly n names once", line=number)
            labels = tokens[1:]
            continue
        if len(tokens) != 2:
            raise GraphParseError(f"expected 'u v', got {body!r}", line=number)
        try:
            u, v = int(tokens[0]), int(tokens[1])
        except ValueError as e:
            raise GraphParseError(f"non-integer vertex in {body!r}", line=number) from e
        if not (0 <= u < n and 0 <= v < n):
            raise GraphValidationError(f"vertex out of range 0..{n - 1} (line {number})")
        if u == v:
            raise GraphValidationError(f"loop at vertex {u} (line {number})")
        if matrix[u, v]:
            raise GraphValidationError(f"duplicate edge {{{u},{v}}} (line {number})")
        matrix[u, v] = matrix[v, u] = 1
    return Graph(n, matrix, tuple(labels) if labels is not None else None)


def _encode_edgelist(g: Graph) -> str:
    out = [f"n {g.n}"]
    if g.labels is not None:
        out.append("labels " + " ".join(g.labels))
    out.extend(f"{u} {v}" for u, v in g.edges())
    return "\n".join(out) + "\n"


def _check_format(fmt: str) -> str:
    key = fmt.lower().replace("-", "")
    if key not in FORMATS:
        raise ContractError(f"unknown graph format {fmt!r}; expected one of {FORMATS}")
    return key


def parse_graph(text: str, fmt: str) -> Graph:
    """
    Decode a graph from text.

    Parameters
    ----------
    text : str
        The encoded graph.
    fmt : {"graph6", "edgelist"}
        Declared format ("edge-list" is accepted as an alias).

    Returns
    -------
    Graph

    Raises
    ------
    GraphParseError
        If the text is malformed; the message names the line or byte.
    GraphValidationError
        If the text describes loops or repeated edges.
    """
    key = _check_format(fmt)
    logger.debug(f"Parsing {key} input ({len(text)} chars).")
    if key == "graph6":
        return _decode_graph6(text)
    return _decode_edgelist(text)


def serialize_graph(g: Graph, fmt: str) -> str:
    """Encode a graph; inverse of `parse_graph` (graph6 drops labels)."""
    if _check_format(fmt) == "graph6":
        return _encode_graph6(g)
    return _encode_edgelist(g)


def read_graph(path: str, fmt: str) -> Graph:
    """Read and decode a graph file."""
    logger.info(f"Reading {fmt} graph from {path}")
    try:
        text = Path(path).read_text(encoding="utf-8")
    except UnicodeDecodeError as e:
        raise GraphParseError(f"{path} is not UTF-8 text: {e.reason}", line=1) from e
    return parse_graph(text, fmt)


# ---------------------------------------------------------------------------
# Structural predicates
# ---------------------------------------------------------------------------


def complement(g: Graph) -> Graph:
    """Edge {u,v} (u ≠ v) is present iff it is absent from g."""
    matrix = 1 - g.adjacency.astype(np.int64)
    np.fill_diagonal(matrix, 0)
    return Graph(g.n, matrix, g.labels)


def is_connected(g: Graph) -> bool:
    """A single vertex is connected to itself, so n = 1 counts as connected."""
    return nx.is_connected(to_networkx(g))


def is_doubly_connected(g: Graph) -> bool:
    return is_connected(g) and is_connected(complement(g))


def degree_partition(g: Graph) -> Partition:
    return Partition.from_keys(g.degrees())


def degree_partitions_equivalent(g1: Graph, g2: Graph) -> bool:
    """Compare the multisets of (degree, class size) pairs."""

    def profile(g: Graph) -> Counter:
        counts = Counter(g.degrees())
        return Counter(counts.items())

    return profile(g1) == profile(g2)


# ---------------------------------------------------------------------------
# Partition text
# ---------------------------------------------------------------------------


def format_partition(partition: Partition, g: Optional[Graph] = None) -> str:
    """Render as "{0,2} {1}", or with the vertex labels of `g` when given."""
    name = g.label_of if g is not None else str
    return " ".join("{" + ",".join(name(v) for v in c) + "}" for c in partition)


def parse_partition(text: str) -> Partition:
    """Inverse of `format_partition`."""
    body = text.strip()
    classes = []
    for chunk in body.split():
        if not (chunk.startswith("{") and chunk.endswith("}")):
            raise GraphParseError(f"bad partition class {chunk!r}")
        inner = chunk[1:-1]
        try:
            classes.append(tuple(int(x) for x in inner.split(",") if x))
        except ValueError as e:
            raise GraphParseError(f"bad partition class {chunk!r}") from e
    return Partition(tuple(classes))
