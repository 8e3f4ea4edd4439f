#!/usr/bin/env python3
"""
oracle.py

Ground truth for small graphs: automorphism orbits and isomorphisms found by
exhaustive permutation enumeration, plus an exact orbit search built on
networkx VF2++ for gadget graphs that are too large to enumerate.

The enumeration routines are deliberately naive; their value is that they are
obviously correct.

Classes
-------
OrbitPartition
    Orbit partition together with the number of automorphisms enumerated.

Functions
---------
orbit_partition_bruteforce(g) -> OrbitPartition
isomorphism_bruteforce(g1, g2) -> list[int] | None
orbit_partition_search(g) -> OrbitPartition
automorphism_count_bruteforce(g) -> int
"""

from dataclasses import dataclass
from itertools import permutations
from typing import Dict, List, Optional

import networkx as nx
import numpy as np
from loguru import logger

from src.core.errors import ContractError
from src.core.graph_core import Graph, Partition, to_networkx

MAX_ENUMERATION_ORDER = 9


@dataclass(frozen=True)
class OrbitPartition:
    """
    Attributes
    ----------
    partition : Partition
        Orbits of the full automorphism group.
    group_size : int or None
        Automorphisms counted by enumeration; None when the orbits were found
        by search without counting the group.
    """

    partition: Partition
    group_size: Optional[int]


class _UnionFind:
    def __init__(self, n: int) -> None:
        self.parent = list(range(n))

    def find(self, v: int) -> int:
        root = v
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[v] != root:
            self.parent[v], v = root, self.parent[v]
        return root

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)

    def partition(self) -> Partition:
        return Partition.from_keys([self.find(v) for v in range(len(self.parent))])


def _check_enumerable(n: int) -> None:
    if n > MAX_ENUMERATION_ORDER:
        logger.error(f"Refusing to enumerate {n}! permutations.")
        raise ContractError(
            f"brute-force oracle is capped at n <= {MAX_ENUMERATION_ORDER}, got n={n}"
        )


def _preserves(adj_from: np.ndarray, adj_to: np.ndarray, perm) -> bool:
    index = np.asarray(perm)
    return np.array_equal(adj_to[np.ix_(index, index)], adj_from)


def orbit_partition_bruteforce(g: Graph) -> OrbitPartition:
    """
    Enumerate all n! permutations and keep those with Eπ = E.

    Raises
    ------
    ContractError
        If n exceeds the enumeration cap.
    """
    _check_enumerable(g.n)
    logger.info(f"Enumerating automorphisms of a {g.n}-vertex graph.")
    orbits = _UnionFind(g.n)
    count = 0
    for perm in permutations(range(g.n)):
        if _preserves(g.adjacency, g.adjacency, perm):
            count += 1
            for v, image in enumerate(perm):
                orbits.union(v, image)
    return OrbitPartition(orbits.partition(), count)


def automorphism_count_bruteforce(g: Graph) -> int:
    return orbit_partition_bruteforce(g).group_size or 0


def isomorphism_bruteforce(g1: Graph, g2: Graph) -> Optional[List[int]]:
    """
    First adjacency-preserving bijection in lexicographic order, or None.

    The returned list maps vertex v of g1 to vertex result[v] of g2.
    """
    if g1.n != g2.n:
        raise ContractError(f"graphs have different orders: {g1.n} vs {g2.n}")
    _check_enumerable(g1.n)
    if sorted(g1.degrees()) != sorted(g2.degrees()):
        return None
    for perm in permutations(range(g1.n)):
        if _preserves(g1.adjacency, g2.adjacency, perm):
            return list(perm)
    return None


def _find_automorphism(G: nx.Graph, source: int, target: int) -> Optional[Dict[int, int]]:
    """VF2++ match of G onto itself with `source` pinned to `target`."""
    pinned_from = G.copy()
    pinned_to = G.copy()
    nx.set_node_attributes(pinned_from, 0, "pin")
    nx.set_node_attributes(pinned_to, 0, "pin")
    pinned_from.nodes[source]["pin"] = 1
    pinned_to.nodes[target]["pin"] = 1
    return nx.vf2pp_isomorphism(pinned_from, pinned_to, node_label="pin")


def orbit_partition_search(g: Graph) -> OrbitPartition:
    """
    Exact orbit partition: for each pair of same-degree vertices not yet known
    to share an orbit, ask VF2++ for an automorphism joining them.

    Every automorphism found merges all of its cycles at once.
    """
    logger.debug(f"Searching automorphism orbits of a {g.n}-vertex graph.")
    G = to_networkx(g)
    orbits = _UnionFind(g.n)
    degrees = g.degrees()
    for u in range(g.n):
        if orbits.find(u) != u:
            continue
        for v in range(u + 1, g.n):
            if degrees[v] != degrees[u] or orbits.find(v) == orbits.find(u):
                continue
            found = _find_automorphism(G, u, v)
            if found is not None:
                for w, w_image in found.items():
                    orbits.union(w, w_image)
    return OrbitPartition(orbits.partition(), None)
