#!/usr/bin/env python3
"""
reduction.py

Graph isomorphism reduced to automorphism partitioning of a doubly connected
gadget.

For connected G1, G2 of order n, σ0 is a vertex of maximal degree d0 in G1.
For every τ of degree d0 in G2 the gadget G_τ is the disjoint union of G1
(vertices 0..n-1) and G2 (vertices n..2n-1) plus the single bridge {σ0, τ}.
G1 and G2 are isomorphic iff σ0 and τ are automorphism equivalent in G_τ for
some τ, so a partitioner that never splits an orbit certifies
non-isomorphism whenever it separates σ0 from every τ.

Classes
-------
GadgetGraph
    G_τ with its bridge endpoints.
Verdict
    Outcome kind of `gi_decide`.
ReductionOutcome
    Verdict plus everything later stages reuse.

Functions
---------
select_sigma0(g1) -> int
candidate_taus(g2, d0) -> list[int]
build_gadget(g1, g2, tau) -> GadgetGraph
gi_decide(g1, g2, partitioner) -> ReductionOutcome
make_partitioner(method, policy=None) -> Partitioner
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np
from loguru import logger

from src.core.errors import ContractError, InternalConsistencyError
from src.core.graph_core import (
    Graph,
    Partition,
    complement,
    degree_partitions_equivalent,
    from_adjacency,
    is_connected,
    is_doubly_connected,
)
from src.core.oracle import orbit_partition_search
from src.core.series_dynamics import TruncationPolicy, a1_partition
from src.core.settings import Settings, load_settings, ordered_map
from src.core.symbolic_refine import a1prime_partition

Partitioner = Callable[[Graph], Partition]

METHODS = ("a1", "a1prime", "oracle")


@dataclass(frozen=True)
class GadgetGraph:
    """
    Attributes
    ----------
    graph : Graph
        2n-vertex gadget; G1 on 0..n-1, G2 on n..2n-1.
    sigma0 : int
        Bridge endpoint in the G1 part.
    tau : int
        Bridge endpoint in the G2 part, as a gadget index (n..2n-1).
    """

    graph: Graph
    sigma0: int
    tau: int

    @property
    def n(self) -> int:
        return self.graph.n // 2

    @property
    def bridge(self) -> Tuple[int, int]:
        return (self.sigma0, self.tau)

    @property
    def tau_local(self) -> int:
        """τ as a vertex of G2."""
        return self.tau - self.n


class Verdict(Enum):
    DEGREE_MISMATCH = "degree_mismatch"
    NOT_ISOMORPHIC = "not_isomorphic"
    POSSIBLY_ISOMORPHIC = "possibly_isomorphic"


@dataclass(frozen=True)
class ReductionOutcome:
    """
    Attributes
    ----------
    verdict : Verdict
    g1, g2 : Graph
        Working graphs, i.e. the complements when both inputs were disconnected.
    complemented : bool
        Whether the complement switch happened.
    sigma0, d0 : int or None
        Chosen G1 vertex and its degree; None when no gadget was built.
    candidates : list of int
        G2 vertices of degree d0, ascending.
    survivors : list of int
        Candidates whose gadget puts σ0 and τ in one class.
    partitions : dict
        Gadget partition per candidate τ.
    partitioner_calls : int
    reason : str
    """

    verdict: Verdict
    g1: Graph
    g2: Graph
    complemented: bool = False
    sigma0: Optional[int] = None
    d0: Optional[int] = None
    candidates: List[int] = field(default_factory=list)
    survivors: List[int] = field(default_factory=list)
    partitions: Dict[int, Partition] = field(default_factory=dict)
    partitioner_calls: int = 0
    reason: str = ""


def select_sigma0(g1: Graph) -> int:
    """Lowest-index vertex of maximal degree."""
    degrees = g1.degrees()
    return degrees.index(max(degrees))


def candidate_taus(g2: Graph, d0: int) -> List[int]:
    return [v for v, d in enumerate(g2.degrees()) if d == d0]


def _disjoint_with_bridge(g1: Graph, g2: Graph, bridge: Tuple[int, int]) -> np.ndarray:
    n = g1.n
    matrix = np.zeros((2 * n, 2 * n), dtype=np.int64)
    matrix[:n, :n] = g1.adjacency
    matrix[n:, n:] = g2.adjacency
    u, v = bridge
    matrix[u, v] = matrix[v, u] = 1
    return matrix


def build_gadget(g1: Graph, g2: Graph, tau: int, debug: bool = False) -> GadgetGraph:
    """
    G_τ for the σ0 chosen by `select_sigma0`; `tau` is a vertex of G2.

    Raises
    ------
    ContractError
        If the graphs differ in order, n <= 1, either graph is disconnected,
        or τ does not have the maximal G1 degree.
    """
    if g1.n != g2.n:
        raise ContractError(f"graphs have different orders: {g1.n} vs {g2.n}")
    if g1.n <= 1:
        raise ContractError("the reduction needs at least two vertices")
    if not (is_connected(g1) and is_connected(g2)):
        raise ContractError("gadget inputs must both be connected")
    n = g1.n
    sigma0 = select_sigma0(g1)
    d0 = g1.degree(sigma0)
    if not 0 <= tau < n or g2.degree(tau) != d0:
        raise ContractError(f"tau={tau} is not a vertex of degree {d0} in G2")

    matrix = _disjoint_with_bridge(g1, g2, (sigma0, n + tau))
    gadget = GadgetGraph(from_adjacency(matrix), sigma0, n + tau)
    if debug and not is_doubly_connected(gadget.graph):
        logger.error(f"Gadget for tau={tau} is not doubly connected.")
        raise InternalConsistencyError(f"gadget for tau={tau} is not doubly connected")
    return gadget


def gi_decide(
    g1: Graph,
    g2: Graph,
    partitioner: Partitioner,
    settings: Optional[Settings] = None,
) -> ReductionOutcome:
    """
    Run the partitioner on G_τ for every candidate τ.

    Returns
    -------
    ReductionOutcome
        DEGREE_MISMATCH when the degree partitions differ, NOT_ISOMORPHIC
        when connectivity differs or σ0 is separated from every τ, and
        POSSIBLY_ISOMORPHIC with the surviving τ otherwise.

    Raises
    ------
    ContractError
        If n <= 1 or the orders differ.
    """
    if g1.n != g2.n:
        raise ContractError(f"graphs have different orders: {g1.n} vs {g2.n}")
    if g1.n <= 1:
        raise ContractError("the reduction needs at least two vertices")
    settings = settings or load_settings()
    logger.info(f"Reducing isomorphism of two {g1.n}-vertex graphs.")

    if not degree_partitions_equivalent(g1, g2):
        logger.info("Degree partitions differ.")
        return ReductionOutcome(
            Verdict.DEGREE_MISMATCH, g1, g2, reason="degree partition mismatch"
        )

    connected1, connected2 = is_connected(g1), is_connected(g2)
    if connected1 != connected2:
        logger.info("Exactly one graph is connected.")
        return ReductionOutcome(
            Verdict.NOT_ISOMORPHIC, g1, g2, reason="connectivity mismatch"
        )
    complemented = not connected1
    if complemented:
        logger.debug("Both graphs disconnected; working on complements.")
        g1, g2 = complement(g1), complement(g2)

    sigma0 = select_sigma0(g1)
    d0 = g1.degree(sigma0)
    candidates = candidate_taus(g2, d0)

    def run(tau: int) -> Partition:
        gadget = build_gadget(g1, g2, tau, debug=settings.debug)
        return partitioner(gadget.graph)

    partitions = dict(zip(candidates, ordered_map(run, candidates, settings.threads)))
    survivors = [tau for tau in candidates if partitions[tau].same_class(sigma0, g1.n + tau)]
    logger.info(
        f"sigma0={sigma0} (degree {d0}): {len(survivors)}/{len(candidates)} candidates survive."
    )

    if survivors:
        verdict, reason = Verdict.POSSIBLY_ISOMORPHIC, "sigma0 shares a class with some tau"
    else:
        verdict, reason = Verdict.NOT_ISOMORPHIC, "sigma0 separated from every tau"
    return ReductionOutcome(
        verdict,
        g1,
        g2,
        complemented=complemented,
        sigma0=sigma0,
        d0=d0,
        candidates=candidates,
        survivors=survivors,
        partitions=partitions,
        partitioner_calls=len(candidates),
        reason=reason,
    )


def make_partitioner(method: str, policy: Optional[TruncationPolicy] = None) -> Partitioner:
    """
    Partition-producing procedure for "a1", "a1prime" or "oracle".
    """
    if method == "a1":
        policy = policy or TruncationPolicy()
        return lambda g: a1_partition(g, policy)
    if method == "a1prime":
        return a1prime_partition
    if method == "oracle":
        return lambda g: orbit_partition_search(g).partition
    raise ContractError(f"unknown partitioning method {method!r}; expected one of {METHODS}")
