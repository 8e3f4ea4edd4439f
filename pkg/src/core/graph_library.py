#!/usr/bin/env python3
"""
graph_library.py

Named fixture graphs: small classics, the strongly regular pairs used to test
refinement-based isomorphism testing, and seeded random samples.

Functions
---------
complete, empty, path, cycle, star, petersen
    Classic small graphs.
rook(k), shrikhande()
    The two SRG(16,6,2,2) graphs.
latin_square_graph(square), srg25_pair()
    Latin-square graphs; the pair is non-isomorphic SRG(25,12,5,6).
asymmetric_spider()
    7-vertex tree with trivial automorphism group.
disjoint_union(g, h)
random_graph(n, p, rng), random_permutation(n, rng)
by_name(name)
    Resolve names like "k3", "c5", "p4", "star4", "petersen", "rook4".
"""

import random
import re
from typing import Callable, Dict, List, Sequence, Tuple

import networkx as nx
import numpy as np

from src.core.errors import ContractError
from src.core.graph_core import Graph, from_edges, from_networkx

# Cyclic group table of order 5.
CYCLIC_SQUARE_5: Tuple[Tuple[int, ...], ...] = tuple(
    tuple((r + c) % 5 for c in range(5)) for r in range(5)
)

# Loop of order 5 with 1*1 = 0 and 1 of order two; not isotopic to Z5,
# so its Latin-square graph is not isomorphic to the cyclic one.
LOOP_SQUARE_5: Tuple[Tuple[int, ...], ...] = (
    (0, 1, 2, 3, 4),
    (1, 0, 3, 4, 2),
    (2, 3, 4, 0, 1),
    (3, 4, 1, 2, 0),
    (4, 2, 0, 1, 3),
)


def complete(n: int) -> Graph:
    return from_networkx(nx.complete_graph(n))


def empty(n: int) -> Graph:
    return Graph(n, np.zeros((n, n), dtype=np.int64))


def path(n: int) -> Graph:
    return from_networkx(nx.path_graph(n))


def cycle(n: int) -> Graph:
    return from_networkx(nx.cycle_graph(n))


def star(leaves: int) -> Graph:
    """K_{1,leaves} with the center at vertex 0."""
    return from_networkx(nx.star_graph(leaves))


def petersen() -> Graph:
    return from_networkx(nx.petersen_graph())


def disjoint_union(g: Graph, h: Graph) -> Graph:
    """g on 0..|g|-1, h shifted to |g|..|g|+|h|-1."""
    matrix = np.zeros((g.n + h.n, g.n + h.n), dtype=np.int64)
    matrix[: g.n, : g.n] = g.adjacency
    matrix[g.n :, g.n :] = h.adjacency
    return Graph(g.n + h.n, matrix)


def rook(k: int = 4) -> Graph:
    """k×k rook's graph: cells adjacent iff they share a row or a column."""
    edges = [
        (i, j)
        for i in range(k * k)
        for j in range(i + 1, k * k)
        if i // k == j // k or i % k == j % k
    ]
    return from_edges(k * k, edges)


def shrikhande() -> Graph:
    """Cayley graph of Z4×Z4 with connection set ±(0,1), ±(1,0), ±(1,1)."""
    steps = [(0, 1), (0, 3), (1, 0), (3, 0), (1, 1), (3, 3)]
    edges = set()
    for a in range(4):
        for b in range(4):
            u = 4 * a + b
            for da, db in steps:
                v = 4 * ((a + da) % 4) + (b + db) % 4
                edges.add((min(u, v), max(u, v)))
    return from_edges(16, sorted(edges))


def latin_square_graph(square: Sequence[Sequence[int]]) -> Graph:
    """
    Latin-square graph of an n×n Latin square.

    Cells (r, c) are vertices r*n + c; two cells are adjacent when they share
    a row, a column or a symbol. The result is SRG(n², 3(n-1), n, 6).
    """
    n = len(square)
    for row in square:
        if sorted(row) != list(range(n)):
            raise ContractError("rows of a Latin square must be permutations of 0..n-1")
    for c in range(n):
        if sorted(square[r][c] for r in range(n)) != list(range(n)):
            raise ContractError("columns of a Latin square must be permutations of 0..n-1")
    cells = [(r, c, square[r][c]) for r in range(n) for c in range(n)]
    edges = [
        (i, j)
        for i in range(len(cells))
        for j in range(i + 1, len(cells))
        if any(x == y for x, y in zip(cells[i], cells[j]))
    ]
    return from_edges(n * n, edges)


def srg25_pair() -> Tuple[Graph, Graph]:
    """Two non-isomorphic SRG(25,12,5,6) graphs."""
    return latin_square_graph(CYCLIC_SQUARE_5), latin_square_graph(LOOP_SQUARE_5)


def asymmetric_spider() -> Graph:
    """Tree with legs of length 1, 2 and 3 around vertex 0."""
    return from_edges(7, [(0, 1), (0, 2), (2, 3), (0, 4), (4, 5), (5, 6)])


def random_graph(n: int, p: float, rng: random.Random) -> Graph:
    edges = [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < p]
    return from_edges(n, edges)


def random_permutation(n: int, rng: random.Random) -> List[int]:
    perm = list(range(n))
    rng.shuffle(perm)
    return perm


_FAMILIES: Dict[str, Callable[[int], Graph]] = {
    "k": complete,
    "e": empty,
    "p": path,
    "c": cycle,
    "star": star,
    "rook": rook,
}

_FIXED: Dict[str, Callable[[], Graph]] = {
    "petersen": petersen,
    "shrikhande": shrikhande,
    "spider": asymmetric_spider,
    "srg25a": lambda: srg25_pair()[0],
    "srg25b": lambda: srg25_pair()[1],
}


def by_name(name: str) -> Graph:
    """
    Resolve a library name such as "k3", "c5", "star4", "rook4" or "petersen".
    """
    key = name.strip().lower()
    if key in _FIXED:
        return _FIXED[key]()
    match = re.fullmatch(r"([a-z]+)(\d+)", key)
    if match and match.group(1) in _FAMILIES:
        return _FAMILIES[match.group(1)](int(match.group(2)))
    raise ContractError(f"unknown graph name {name!r}")
