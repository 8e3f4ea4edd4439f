#!/usr/bin/env python3
"""
iso_extract.py

Algorithm A2: grow a chain of gadgets Z_0, Z_1, ... from G_τ until every
partition class is a {σ, τ} pair, then read the isomorphism off the classes.

Z_j keeps G1 and G2 and adds the cross edges {σ_i, τ_k} for i + k <= j, so
σ_i has G1-degree + (j − i + 1) and the pinned vertices get distinct degrees.
Answers are Yes (with a verified bijection), No (σ0 separated from every τ,
or a degree / connectivity mismatch) or Don't Know.

Classes
-------
ZChain
    The σ/τ choices made so far on top of the working graphs.
ChainStep
    Result of one `extend_chain` call.
IsoResult
    Verdict, isomorphism and per-step trace.

Functions
---------
extend_chain(chain, partition, exclude=()) -> ChainStep
read_gamma(chain, partition) -> list[int]
verify_iso(g1, g2, gamma) -> bool
a2_decide(g1, g2, partitioner) -> IsoResult
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from loguru import logger

from src.core.errors import ContractError, InternalConsistencyError
from src.core.graph_core import (
    Graph,
    Partition,
    format_partition,
    from_adjacency,
    is_doubly_connected,
    parse_partition,
)
from src.core.reduction import Partitioner, ReductionOutcome, Verdict, gi_decide
from src.core.settings import Settings, load_settings, ordered_map


@dataclass(frozen=True)
class ZChain:
    """
    Attributes
    ----------
    g1, g2 : Graph
        Working graphs of equal order n.
    sigmas : tuple of int
        σ_0..σ_j, vertices of G1.
    taus : tuple of int
        τ_0..τ_j as gadget indices n..2n-1.
    """

    g1: Graph
    g2: Graph
    sigmas: Tuple[int, ...]
    taus: Tuple[int, ...]

    def __post_init__(self) -> None:
        n = self.g1.n
        if self.g2.n != n:
            raise ContractError(f"chain graphs differ in order: {n} vs {self.g2.n}")
        if not self.sigmas or len(self.sigmas) != len(self.taus):
            raise ContractError("a chain needs matching, non-empty sigma and tau lists")
        if len(set(self.sigmas)) != len(self.sigmas) or len(set(self.taus)) != len(self.taus):
            raise ContractError("chain vertices must not repeat")
        if any(not 0 <= s < n for s in self.sigmas) or any(not n <= t < 2 * n for t in self.taus):
            raise ContractError("sigmas must lie in G1 and taus in G2")

    @classmethod
    def start(cls, g1: Graph, g2: Graph, sigma0: int, tau0: int) -> "ZChain":
        return cls(g1, g2, (sigma0,), (tau0,))

    @property
    def n(self) -> int:
        return self.g1.n

    @property
    def level(self) -> int:
        """Index j of the newest graph Z_j."""
        return len(self.sigmas) - 1

    def cross_edges(self, level: Optional[int] = None) -> FrozenSet[Tuple[int, int]]:
        """Edges of R_level that join G1 to G2."""
        level = self.level if level is None else level
        return frozenset(
            (self.sigmas[i], self.taus[k])
            for i in range(level + 1)
            for k in range(level + 1 - i)
        )

    def edge_set(self, level: Optional[int] = None) -> FrozenSet[Tuple[int, int]]:
        """R_level: E1, E2 shifted by n, and the cross edges."""
        n = self.n
        inner = set(self.g1.edges())
        inner.update((u + n, v + n) for u, v in self.g2.edges())
        return frozenset(inner) | self.cross_edges(level)

    def graph(self, level: Optional[int] = None) -> Graph:
        n = self.n
        matrix = np.zeros((2 * n, 2 * n), dtype=np.int64)
        matrix[:n, :n] = self.g1.adjacency
        matrix[n:, n:] = self.g2.adjacency
        for u, v in self.cross_edges(level):
            matrix[u, v] = matrix[v, u] = 1
        return from_adjacency(matrix)

    def extended(self, sigma: int, tau: int) -> "ZChain":
        return ZChain(self.g1, self.g2, self.sigmas + (sigma,), self.taus + (tau,))


class StepKind(Enum):
    EXTENDED = "extended"
    STUCK = "stuck"
    DONE = "done"


@dataclass(frozen=True)
class ChainStep:
    kind: StepKind
    chain: Optional[ZChain] = None


def _is_paired(partition: Partition, n: int) -> bool:
    return all(len(c) == 2 and c[0] < n <= c[1] for c in partition)


def extend_chain(
    chain: ZChain, partition: Partition, exclude: Iterable[int] = ()
) -> ChainStep:
    """
    Pin the next σ/τ pair using the partition of the current Z_j.

    σ_{j+1} is the lowest-index unused G1 vertex of largest G1 degree; τ_{j+1}
    is the lowest unused, non-excluded G2 vertex in its class.

    Returns
    -------
    ChainStep
        DONE if every class is a cross pair, STUCK if no τ is available or
        the chain already has n − 1 levels, EXTENDED otherwise.
    """
    n = chain.n
    if partition.size != 2 * n:
        raise ContractError(f"partition covers {partition.size} vertices, chain has {2 * n}")
    if _is_paired(partition, n):
        return ChainStep(StepKind.DONE)
    if chain.level >= n - 2:
        logger.debug(f"Chain reached level {chain.level} without pairing every class.")
        return ChainStep(StepKind.STUCK)

    used = set(chain.sigmas)
    degrees = chain.g1.degrees()
    free = [v for v in range(n) if v not in used]
    sigma = max(free, key=lambda v: (degrees[v], -v))

    blocked = set(chain.taus) | set(exclude)
    options = [v for v in partition.class_of(sigma) if v >= n and v not in blocked]
    if not options:
        logger.debug(f"No tau available for sigma={sigma} at level {chain.level + 1}.")
        return ChainStep(StepKind.STUCK)
    tau = options[0]
    logger.debug(f"Level {chain.level + 1}: sigma={sigma}, tau={tau - n}.")
    return ChainStep(StepKind.EXTENDED, chain.extended(sigma, tau))


def read_gamma(chain: ZChain, partition: Partition) -> List[int]:
    """
    gamma[v] is the G2 partner of G1 vertex v.

    Raises
    ------
    ContractError
        If some class is not a {G1, G2} pair.
    """
    n = chain.n
    if not _is_paired(partition, n):
        raise ContractError("every class must hold exactly one G1 and one G2 vertex")
    gamma = [0] * n
    for a, b in partition:
        gamma[a] = b - n
    return gamma


def verify_iso(g1: Graph, g2: Graph, gamma: Sequence[int]) -> bool:
    """True iff gamma is a bijection with adj1[u][v] == adj2[γu][γv] for all u, v."""
    if g1.n != g2.n or len(gamma) != g1.n:
        raise ContractError(
            f"gamma of length {len(gamma)} cannot map {g1.n} onto {g2.n} vertices"
        )
    if sorted(gamma) != list(range(g1.n)):
        raise ContractError("gamma is not a bijection")
    index = np.asarray(gamma)
    return bool(np.array_equal(g2.adjacency[np.ix_(index, index)], g1.adjacency))


class IsoVerdict(Enum):
    YES = "yes"
    NO = "no"
    DONT_KNOW = "dont_know"


@dataclass(frozen=True)
class TraceStep:
    """σ_j and τ_j (a G2 vertex) with the partition of Z_j."""

    sigma: int
    tau: int
    partition: Partition


@dataclass(frozen=True)
class IsoResult:
    """
    Attributes
    ----------
    verdict : IsoVerdict
    gamma : tuple of int or None
        Isomorphism G1 → G2, present iff the verdict is YES.
    trace : tuple of TraceStep
        Chain of the successful (or last explored) τ.
    reason : str
    partitioner_calls : int
    """

    verdict: IsoVerdict
    gamma: Optional[Tuple[int, ...]] = None
    trace: Tuple[TraceStep, ...] = ()
    reason: str = ""
    partitioner_calls: int = 0

    def to_record(self) -> Dict[str, Any]:
        return {
            "verdict": self.verdict.value,
            "gamma": list(self.gamma) if self.gamma is not None else None,
            "reason": self.reason,
            "partitioner_calls": self.partitioner_calls,
            "trace": [
                {"sigma": s.sigma, "tau": s.tau, "partition": format_partition(s.partition)}
                for s in self.trace
            ],
        }

    @classmethod
    def from_record(cls, record: Dict[str, Any]) -> "IsoResult":
        try:
            gamma = record.get("gamma")
            return cls(
                IsoVerdict(record["verdict"]),
                tuple(gamma) if gamma is not None else None,
                tuple(
                    TraceStep(int(s["sigma"]), int(s["tau"]), parse_partition(s["partition"]))
                    for s in record.get("trace", [])
                ),
                record.get("reason", ""),
                int(record.get("partitioner_calls", 0)),
            )
        except (KeyError, TypeError, ValueError) as e:
            raise ContractError(f"malformed result record: {e}") from e


class _Budget:
    """Alternative τ_j choices left, plus a count of partitioner calls."""

    def __init__(self, retries: int) -> None:
        self.retries = retries
        self.calls = 0

    def spend(self) -> bool:
        if self.retries <= 0:
            return False
        self.retries -= 1
        return True


@dataclass
class _Search:
    partitioner: Partitioner
    debug: bool
    budget: _Budget
    path: List[TraceStep] = field(default_factory=list)

    def explore(self, chain: ZChain, partition: Partition) -> Optional[List[int]]:
        """Depth-first over τ_j alternatives; returns a verified gamma or None."""
        n = chain.n
        tried: List[int] = []
        while True:
            step = extend_chain(chain, partition, tried)
            if step.kind is StepKind.DONE:
                gamma = read_gamma(chain, partition)
                if verify_iso(chain.g1, chain.g2, gamma):
                    return gamma
                logger.debug("Paired classes did not give an isomorphism.")
                return None
            if step.kind is StepKind.STUCK:
                return None
            if tried and not self.budget.spend():
                logger.debug("Retry budget exhausted.")
                return None

            following = step.chain
            if self.debug and not is_doubly_connected(following.graph()):
                logger.error(f"Z_{following.level} is not doubly connected.")
                raise InternalConsistencyError(
                    f"Z_{following.level} is not doubly connected"
                )
            next_partition = self.partitioner(following.graph())
            self.budget.calls += 1
            self.path.append(
                TraceStep(following.sigmas[-1], following.taus[-1] - n, next_partition)
            )
            gamma = self.explore(following, next_partition)
            if gamma is not None:
                return gamma
            self.path.pop()
            tried.append(following.taus[-1])


def _run_tau(
    outcome: ReductionOutcome, tau: int, partitioner: Partitioner, settings: Settings
) -> Tuple[Optional[List[int]], List[TraceStep], int]:
    n = outcome.g1.n
    chain = ZChain.start(outcome.g1, outcome.g2, outcome.sigma0, n + tau)
    partition = outcome.partitions[tau]
    search = _Search(partitioner, settings.debug, _Budget(settings.max_retries))
    search.path.append(TraceStep(outcome.sigma0, tau, partition))
    gamma = search.explore(chain, partition)
    return gamma, search.path, search.budget.calls


def a2_decide(
    g1: Graph,
    g2: Graph,
    partitioner: Partitioner,
    settings: Optional[Settings] = None,
) -> IsoResult:
    """
    Decide isomorphism with three answers.

    Every YES carries a gamma checked against the input graphs.

    Raises
    ------
    ContractError
        If n <= 1 or the orders differ.
    """
    settings = settings or load_settings()
    outcome = gi_decide(g1, g2, partitioner, settings)
    calls = outcome.partitioner_calls
    if outcome.verdict is not Verdict.POSSIBLY_ISOMORPHIC:
        logger.info(f"A2 verdict: No ({outcome.reason}).")
        return IsoResult(IsoVerdict.NO, reason=outcome.reason, partitioner_calls=calls)

    def attempt(tau: int):
        return _run_tau(outcome, tau, partitioner, settings)

    if settings.threads > 1:
        attempts = iter(ordered_map(attempt, outcome.survivors, settings.threads))
    else:
        attempts = (attempt(tau) for tau in outcome.survivors)

    last_trace: List[TraceStep] = []
    for gamma, trace, used in attempts:
        calls += used
        last_trace = trace
        if gamma is None:
            continue
        if not verify_iso(g1, g2, gamma):
            logger.error("Extracted gamma fails on the input graphs.")
            raise InternalConsistencyError("extracted isomorphism does not verify")
        logger.info("A2 verdict: Yes.")
        return IsoResult(
            IsoVerdict.YES, tuple(gamma), tuple(trace), "isomorphism verified", calls
        )

    logger.info("A2 verdict: Don't Know.")
    return IsoResult(
        IsoVerdict.DONT_KNOW,
        trace=tuple(last_trace),
        reason="no tau led to a fully paired partition",
        partitioner_calls=calls,
    )
