#!/usr/bin/env python3
"""
series_dynamics.py

Exact power-series solution of the graph-embedded point-mass dynamics
X'' = F_H(X), X(0) = I, X'(0) = 0, and the vertex partitioning algorithm built
on it (A1).

Only even powers of t occur, so the series is written X(t) = Σ A_n t^{2n}.
R_n are the coefficients of the pairwise inverse squared distances
1/‖x_i − x_k‖² (zero on the diagonal). With L(M) = diag(row sums of M) − M,
the doubly recurrent formula reads

    A_{s+1} = (Σ_{p=0..s} L(R_{s−p}) A_p − L(H) A_s) / (2(s+1)(2s+1))
    R_s     = −½ Σ_{c=1..s} R_{s−c} ∘ Δ_c

where Δ_c is the t^{2c} coefficient of the squared-distance matrix. Every
entry is a reduced `fractions.Fraction`; matrices are numpy object arrays.

Classes
-------
TruncationPolicy
    How many terms A1 computes.
SeriesCoefficients
    Immutable A_0..A_s, R_0..R_s (and the squared-distance series).

Functions
---------
initial_coefficients(g) -> SeriesCoefficients
series_extend(g, coeffs) -> SeriesCoefficients
series_up_to(g, policy) -> SeriesCoefficients
scaled_integer_view(coeffs) -> (alpha, rho)
integer_series_up_to(g, s_max) -> (alpha, rho)
row_signature(matrices, vertex) -> tuple
a1_partition(g, policy) -> Partition
evaluate_truncated(coeffs, t) -> numpy.ndarray
coefficient_records(coeffs) / parse_coefficient_records(lines)
coefficient_digits(coeffs) -> list[int]
"""

import json
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, factorial
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

import numpy as np
from loguru import logger

from src.core.errors import ContractError, GraphParseError, IntegralityError
from src.core.graph_core import Graph, Partition

ZERO = Fraction(0)
HALF = Fraction(1, 2)


@dataclass(frozen=True)
class TruncationPolicy:
    """
    Attributes
    ----------
    s_max : int or None
        Largest series index computed. None means m² for an m-vertex graph.
    early_stop : bool
        Stop as soon as the induced partition survives one extra term unchanged.
    """

    s_max: Optional[int] = None
    early_stop: bool = False

    def __post_init__(self) -> None:
        if self.s_max is not None and self.s_max < 0:
            raise ContractError(f"s_max must be non-negative, got {self.s_max}")

    def limit(self, m: int) -> int:
        return m * m if self.s_max is None else self.s_max


@dataclass(frozen=True)
class SeriesCoefficients:
    """
    Coefficients of t^{2n} for n = 0..terms-1.

    Attributes
    ----------
    m : int
        Matrix dimension (vertex count).
    A : tuple of numpy object arrays
        A[n], coefficients of the positions.
    R : tuple of numpy object arrays
        R[n], coefficients of 1/‖x_i − x_k‖², zero diagonal.
    distance : tuple of numpy object arrays
        Coefficients of ‖x_i − x_k‖², kept so extension stays linear per term.
    """

    m: int
    A: Tuple[np.ndarray, ...]
    R: Tuple[np.ndarray, ...]
    distance: Tuple[np.ndarray, ...] = field(repr=False)

    @property
    def terms(self) -> int:
        return len(self.A)

    @property
    def last(self) -> int:
        return len(self.A) - 1

    def prefix(self, k: int) -> "SeriesCoefficients":
        """Terms 0..k."""
        return SeriesCoefficients(self.m, self.A[: k + 1], self.R[: k + 1], self.distance[: k + 1])

    def equals(self, other: "SeriesCoefficients") -> bool:
        return (
            self.m == other.m
            and self.terms == other.terms
            and all(np.array_equal(a, b) for a, b in zip(self.A, other.A))
            and all(np.array_equal(a, b) for a, b in zip(self.R, other.R))
        )


def _frozen(matrix: np.ndarray) -> np.ndarray:
    matrix.setflags(write=False)
    return matrix


def _fraction_matrix(values) -> np.ndarray:
    array = np.empty(np.shape(values), dtype=object)
    for idx, value in np.ndenumerate(np.asarray(values, dtype=object)):
        array[idx] = Fraction(value)
    return array


def _laplacian(matrix: np.ndarray) -> np.ndarray:
    """diag(row sums) − matrix, so (L(M) X)_ij = Σ_k M_ik (x_ij − x_kj)."""
    result = -matrix
    for i in range(matrix.shape[0]):
        result[i, i] = result[i, i] + matrix[i].sum()
    return result


def _squared_distance(gram: np.ndarray) -> np.ndarray:
    """Δ_ik = G_ii + G_kk − G_ik − G_ki."""
    diag = np.diag(gram)
    return diag[:, None] + diag[None, :] - gram - gram.T


def _distance_term(A: Sequence[np.ndarray], c: int) -> np.ndarray:
    """t^{2c} coefficient of the squared distances, from A_0..A_c."""
    gram = A[0].dot(A[c].T)
    for d in range(1, c + 1):
        gram = gram + A[d].dot(A[c - d].T)
    return _squared_distance(gram)


def initial_coefficients(g: Graph) -> SeriesCoefficients:
    """A_0 = I, R_0 = ½(𝟏 − I), squared distances 2(𝟏 − I)."""
    m = g.n
    identity = _fraction_matrix(np.eye(m, dtype=np.int64))
    off = _fraction_matrix(np.ones((m, m), dtype=np.int64) - np.eye(m, dtype=np.int64))
    return SeriesCoefficients(
        m,
        (_frozen(identity),),
        (_frozen(off * HALF),),
        (_frozen(off * 2),),
    )


def series_extend(g: Graph, coeffs: SeriesCoefficients) -> SeriesCoefficients:
    """
    Append term s+1: first A_{s+1} from A_0..A_s and R_0..R_s, then the
    squared-distance term and R_{s+1} from A_0..A_{s+1} and R_0..R_s.
    """
    if coeffs.m != g.n:
        raise ContractError(f"coefficients are {coeffs.m}x{coeffs.m}, graph has {g.n} vertices")
    s = coeffs.last
    A, R, distance = list(coeffs.A), list(coeffs.R), list(coeffs.distance)
    h = _fraction_matrix(g.adjacency.astype(np.int64))

    total = -_laplacian(h).dot(A[s])
    for p in range(s + 1):
        total = total + _laplacian(R[s - p]).dot(A[p])
    A.append(_frozen(total * Fraction(1, 2 * (s + 1) * (2 * s + 1))))

    c = s + 1
    distance.append(_frozen(_distance_term(A, c)))

    acc = R[c - 1] * distance[1]
    for k in range(2, c + 1):
        acc = acc + R[c - k] * distance[k]
    r_next = acc * (-HALF)
    np.fill_diagonal(r_next, ZERO)
    R.append(_frozen(r_next))

    logger.debug(f"Computed series term {c} for m={g.n}.")
    return SeriesCoefficients(coeffs.m, tuple(A), tuple(R), tuple(distance))


def series_up_to(g: Graph, policy: TruncationPolicy = TruncationPolicy()) -> SeriesCoefficients:
    """
    Coefficients through index min(s_max, stop point).

    With `early_stop`, the run ends once the A1 partition induced by the terms
    computed so far is unchanged by one extra term.
    """
    limit = policy.limit(g.n)
    logger.info(f"Computing series up to s={limit} for a {g.n}-vertex graph.")
    coeffs = initial_coefficients(g)
    previous = partition_from_coefficients(coeffs) if policy.early_stop else None
    while coeffs.last < limit:
        coeffs = series_extend(g, coeffs)
        if policy.early_stop:
            current = partition_from_coefficients(coeffs)
            if current == previous:
                logger.info(f"Partition stable at term {coeffs.last}; stopping early.")
                break
            previous = current
    return coeffs


# ---------------------------------------------------------------------------
# Integrality
# ---------------------------------------------------------------------------


def _scale_to_int(matrix: np.ndarray, factor: int, what: str) -> np.ndarray:
    scaled = np.empty(matrix.shape, dtype=object)
    for idx, value in np.ndenumerate(matrix):
        product = value * factor
        if product.denominator != 1:
            logger.error(f"Non-integer scaled coefficient {what}{list(idx)} = {product}")
            raise IntegralityError(f"{what} entry {idx} is {product}, not an integer")
        scaled[idx] = int(product)
    return scaled


def scaled_integer_view(coeffs: SeriesCoefficients) -> Tuple[List[np.ndarray], List[np.ndarray]]:
    """
    α[n] = 2^n (2n)! A[n] and ρ[n] = 2^{n+1} (2n)! R[n] as integer matrices.

    Raises
    ------
    IntegralityError
        If any scaled entry is not an integer.
    """
    alpha, rho = [], []
    for n in range(coeffs.terms):
        scale = 2**n * factorial(2 * n)
        alpha.append(_scale_to_int(coeffs.A[n], scale, f"alpha[{n}]"))
        rho.append(_scale_to_int(coeffs.R[n], 2 * scale, f"rho[{n}]"))
    return alpha, rho


def integer_series_up_to(g: Graph, s_max: int) -> Tuple[List[np.ndarray], List[np.ndarray]]:
    """
    Compute α and ρ directly in integer arithmetic.

        α_{s+1} = Σ_p C(2s, 2p) L(ρ_{s−p}) α_p − 2 L(H) α_s
        ρ_S     = −½ Σ_{c=1..S} ρ_{S−c} ∘ Δ(M_c),
        M_c     = Σ_d (2S)! / ((2d)! (2c−2d)! (2S−2c)!) α_d α_{c−d}ᵀ

    The halving is exact because each multinomial weight with d = c − d is
    even; an odd value raises `IntegralityError`.
    """
    m = g.n
    h = g.adjacency.astype(np.int64).astype(object)
    eye = np.eye(m, dtype=np.int64).astype(object)
    alpha = [eye]
    rho = [np.ones((m, m), dtype=np.int64).astype(object) - eye]
    for s in range(s_max):
        total = -2 * _laplacian(h).dot(alpha[s])
        for p in range(s + 1):
            total = total + comb(2 * s, 2 * p) * _laplacian(rho[s - p]).dot(alpha[p])
        alpha.append(total)

        S = s + 1
        acc = np.zeros((m, m), dtype=np.int64).astype(object)
        for c in range(1, S + 1):
            gram = np.zeros((m, m), dtype=np.int64).astype(object)
            for d in range(c + 1):
                weight = factorial(2 * S) // (
                    factorial(2 * d) * factorial(2 * (c - d)) * factorial(2 * (S - c))
                )
                gram = gram + weight * alpha[d].dot(alpha[c - d].T)
            acc = acc + rho[S - c] * _squared_distance(gram)
        np.fill_diagonal(acc, 0)
        odd = [idx for idx, value in np.ndenumerate(acc) if value % 2]
        if odd:
            logger.error(f"Odd distance sum at term {S}: {odd[:3]}")
            raise IntegralityError(f"rho[{S}] would not be an integer at {odd[0]}")
        rho.append(-(acc // 2))
    return alpha, rho


# ---------------------------------------------------------------------------
# Algorithm A1
# ---------------------------------------------------------------------------


def row_signature(matrices: Sequence[np.ndarray], vertex: int) -> Tuple[Tuple[Fraction, ...], ...]:
    """
    Sorted entries of row `vertex` of every matrix, term by term.

    Two rows are permutation equivalent in a given term iff their sorted
    entries agree, so signature equality is the per-term test of A1.
    """
    if not matrices or not 0 <= vertex < matrices[0].shape[0]:
        raise ContractError(f"vertex {vertex} outside the matrix rows")
    return tuple(tuple(sorted(matrix[vertex])) for matrix in matrices)


def partition_from_coefficients(coeffs: SeriesCoefficients) -> Partition:
    return Partition.from_keys([row_signature(coeffs.A, v) for v in range(coeffs.m)])


def a1_partition(g: Graph, policy: TruncationPolicy = TruncationPolicy()) -> Partition:
    """
    Place i and j together iff rows i and j of A_s are permutation equivalent
    for every computed s.

    Automorphic vertices always share a class; the converse is not guaranteed,
    so A1 is sound for separation only.
    """
    coeffs = series_up_to(g, policy)
    partition = partition_from_coefficients(coeffs)
    logger.info(f"A1 on {g.n} vertices: {len(partition)} classes from {coeffs.terms} terms.")
    return partition


def evaluate_truncated(coeffs: SeriesCoefficients, t: float) -> np.ndarray:
    """Σ_n A[n] t^{2n} in floating point."""
    result = np.zeros((coeffs.m, coeffs.m))
    t2 = float(t) ** 2
    power = 1.0
    for matrix in coeffs.A:
        result += matrix.astype(float) * power
        power *= t2
    return result


# ---------------------------------------------------------------------------
# Structured dump
# ---------------------------------------------------------------------------


def coefficient_records(coeffs: SeriesCoefficients) -> Iterator[Dict[str, object]]:
    """One record per (matrix, n, i, j) with exact numerator/denominator strings."""
    for name, matrices in (("A", coeffs.A), ("R", coeffs.R)):
        for n, matrix in enumerate(matrices):
            for (i, j), value in np.ndenumerate(matrix):
                yield {
                    "matrix": name,
                    "n": n,
                    "i": int(i),
                    "j": int(j),
                    "num": str(value.numerator),
                    "den": str(value.denominator),
                }


def parse_coefficient_records(lines: Iterable[str]) -> SeriesCoefficients:
    """Rebuild coefficients from JSON Lines produced from `coefficient_records`."""
    entries: Dict[Tuple[str, int], Dict[Tuple[int, int], Fraction]] = {}
    m = 0
    for number, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
            key = (record["matrix"], int(record["n"]))
            i, j = int(record["i"]), int(record["j"])
            value = Fraction(int(record["num"]), int(record["den"]))
        except (ValueError, KeyError, TypeError) as e:
            raise GraphParseError(f"bad coefficient record: {e}", line=number) from e
        entries.setdefault(key, {})[(i, j)] = value
        m = max(m, i + 1, j + 1)

    terms = 1 + max((n for (name, n) in entries if name == "A"), default=-1)
    A, R = [], []
    for name, target in (("A", A), ("R", R)):
        for n in range(terms):
            cells = entries.get((name, n))
            if cells is None or len(cells) != m * m:
                raise GraphParseError(f"incomplete matrix {name}[{n}]")
            matrix = np.empty((m, m), dtype=object)
            for (i, j), value in cells.items():
                matrix[i, j] = value
            target.append(_frozen(matrix))

    distance = [_frozen(_distance_term(A, c)) for c in range(terms)]
    return SeriesCoefficients(m, tuple(A), tuple(R), tuple(distance))


def coefficient_digits(coeffs: SeriesCoefficients) -> List[int]:
    """Largest decimal digit count of any numerator or denominator, per A term."""
    digits = []
    for matrix in coeffs.A:
        longest = 1
        for value in matrix.flat:
            longest = max(longest, len(str(abs(value.numerator))), len(str(value.denominator)))
        digits.append(longest)
    return digits
