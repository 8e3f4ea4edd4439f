#!/usr/bin/env python3
"""
symbolic_refine.py

Algorithm A1': iterated canonical recoloring of the m×m vertex-pair grid until
the coloring is stable.

C holds the pair colors and D the "distance" colors derived from C; both are
dense integer ids numbered by first occurrence in row-major order. A step
builds, for every cell (i, j), the sorted vector

    [(C[i][j], C[k][j], D[i][k], h[i][k]) for k in 0..m-1]

and renumbers equal vectors to equal ids. Tuples are packed into int64 codes
with a mixed radix so the sorting and grouping run in numpy.

Classes
-------
RefinementState
    Immutable (C, D, step) snapshot.

Functions
---------
init_colors(m) -> RefinementState
distance_labels(state) -> numpy.ndarray
refine_step(state, g) -> RefinementState
run_refinement(g, trace=False) -> (RefinementState, steps[, states])
a1prime_partition(g) -> Partition
cell_partition(state) -> Partition
format_trace(states) -> str
"""

from dataclasses import dataclass
from typing import List, Sequence, Tuple, Union

import numpy as np
from loguru import logger

from src.core.errors import ContractError, InternalConsistencyError
from src.core.graph_core import Graph, Partition


@dataclass(frozen=True, eq=False)
class RefinementState:
    """
    Attributes
    ----------
    C : numpy.ndarray
        m×m pair colors.
    D : numpy.ndarray
        m×m distance colors computed from C.
    step : int
        Number of refine steps applied since initialization.
    """

    C: np.ndarray
    D: np.ndarray
    step: int

    @property
    def m(self) -> int:
        return self.C.shape[0]

    def same_colors(self, other: "RefinementState") -> bool:
        return np.array_equal(self.C, other.C)


def _readonly(matrix: np.ndarray) -> np.ndarray:
    matrix.setflags(write=False)
    return matrix


def _canonical_ids(rows: np.ndarray) -> np.ndarray:
    """
    Number the distinct rows of a 2-d array by first occurrence.

    Returns one id per input row.
    """
    _, first, inverse = np.unique(rows, axis=0, return_index=True, return_inverse=True)
    rank = np.empty(len(first), dtype=np.int64)
    rank[np.argsort(first, kind="stable")] = np.arange(len(first))
    return rank[inverse.reshape(-1)]


def _distance_ids(C: np.ndarray) -> np.ndarray:
    m = C.shape[0]
    radix = int(C.max()) + 1
    pairs = C[:, None, :] * radix + C[None, :, :]
    pairs = np.sort(pairs, axis=2)
    return _canonical_ids(pairs.reshape(m * m, m)).reshape(m, m)


def init_colors(m: int) -> RefinementState:
    """C[i][i] = 0 and C[i][j] = 1 for i != j."""
    if m < 1:
        raise ContractError(f"refinement needs m >= 1, got {m}")
    C = np.ones((m, m), dtype=np.int64) - np.eye(m, dtype=np.int64)
    return RefinementState(_readonly(C), _readonly(_distance_ids(C)), 0)


def distance_labels(state: RefinementState) -> np.ndarray:
    """
    D[i][j] is the id of the sorted pair vector [(C[i][l], C[j][l]) for l].
    """
    return _distance_ids(state.C)


def refine_step(state: RefinementState, g: Graph) -> RefinementState:
    """One recoloring step; the new cell partition refines the old one."""
    if g.n != state.m:
        raise ContractError(f"state is {state.m}x{state.m}, graph has {g.n} vertices")
    m = state.m
    C, D = state.C, state.D
    h = g.adjacency.astype(np.int64)
    c_radix = int(C.max()) + 1
    d_radix = int(D.max()) + 1

    # codes[i, j, k] packs (C[i][j], C[k][j], D[i][k], h[i][k])
    codes = C[:, :, None] * c_radix + C.T[None, :, :]
    codes = (codes * d_radix + D[:, None, :]) * 2 + h[:, None, :]
    codes = np.sort(codes, axis=2)

    new_C = _canonical_ids(codes.reshape(m * m, m)).reshape(m, m)
    new_state = RefinementState(
        _readonly(new_C), _readonly(_distance_ids(new_C)), state.step + 1
    )
    logger.debug(
        f"Refinement step {new_state.step}: {int(new_C.max()) + 1} cell colors."
    )
    return new_state


def run_refinement(
    g: Graph, trace: bool = False
) -> Union[
    Tuple[RefinementState, int], Tuple[RefinementState, int, List[RefinementState]]
]:
    """
    Refine from the initial coloring until C no longer changes.

    Parameters
    ----------
    g : Graph
        Graph whose adjacency drives the refinement.
    trace : bool
        Also return every state from the initial one to the fixpoint.

    Returns
    -------
    tuple
        (fixpoint state, steps) or (fixpoint state, steps, states).

    Raises
    ------
    InternalConsistencyError
        If more than m² steps are needed.
    """
    state = init_colors(g.n)
    states = [state]
    limit = g.n * g.n
    steps = 0
    while True:
        following = refine_step(state, g)
        steps += 1
        if trace:
            states.append(following)
        if steps > limit:
            logger.error(f"Refinement of a {g.n}-vertex graph exceeded {limit} steps.")
            raise InternalConsistencyError(
                f"refinement did not stabilize within {limit} steps"
            )
        if following.same_colors(state):
            break
        state = following
    logger.info(f"Refinement of a {g.n}-vertex graph stable after {steps} steps.")
    if trace:
        return following, steps, states
    return following, steps


def row_partition(state: RefinementState) -> Partition:
    """Vertices with equal multisets of row colors share a class."""
    return Partition.from_keys([tuple(sorted(row.tolist())) for row in state.C])


def a1prime_partition(g: Graph) -> Partition:
    state, _ = run_refinement(g)
    return row_partition(state)


def cell_partition(state: RefinementState) -> Partition:
    """Partition of the m² cells (cell (i, j) is i*m + j) by color."""
    return Partition.from_keys(state.C.reshape(-1).tolist())


def _grid(matrix: np.ndarray) -> List[str]:
    width = len(str(int(matrix.max())))
    return [" ".join(str(int(x)).rjust(width) for x in row) for row in matrix]


def format_trace(states: Sequence[RefinementState]) -> str:
    """One block per step: a header line, then the C grid and the D grid."""
    blocks = []
    for state in states:
        lines = [f"step {state.step}", "C:"]
        lines.extend(_grid(state.C))
        lines.append("D:")
        lines.extend(_grid(state.D))
        blocks.append("\n".join(lines))
    return "\n\n".join(blocks) + "\n"
