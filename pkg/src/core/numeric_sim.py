#!/usr/bin/env python3
"""
numeric_sim.py

Floating-point integration of the graph-embedded point-mass system

    x_i'' = Σ_{k≠i} (x_i − x_k) (1/‖x_i − x_k‖² − h_ik),  X(0) = I, X'(0) = 0

with velocity Verlet composed into a fourth-order symmetric step. Used to
cross-check the exact series and energy conservation, and for
pairwise-distance signatures.

Classes
-------
SimState
    Positions, velocities and time.
EnergyReport
    Kinetic, potential and total energy with drift from a reference.

Functions
---------
total_force(X, g, floor) -> numpy.ndarray
integrate(state, g, duration, dt, floor) -> SimState
simulate(g, t_end, dt, floor) -> SimState
energy(state, g, reference=None) -> EnergyReport
distance_signature(state) -> numpy.ndarray
check_equivariance(g, perm, t_end, dt) -> float
trajectory(g, t_end, dt, sample_every, floor) -> iterator of (SimState, EnergyReport)
write_trajectory(rows, stream)
distances_match(g1, g2, t, dt, tol, floor) -> bool
"""

from dataclasses import dataclass
from typing import IO, Iterable, Iterator, Optional, Sequence, Tuple

import numpy as np
from loguru import logger

from src.core.errors import ContractError, SingularityError
from src.core.graph_core import Graph, relabel
from src.core.settings import load_settings

DEFAULT_DT = 1e-3

# Triple-jump weights w, 1 - 2w, w.
_CBRT2 = 2.0 ** (1.0 / 3.0)
_OUTER = 1.0 / (2.0 - _CBRT2)
_INNER = 1.0 - 2.0 * _OUTER
COMPOSITION = (_OUTER, _INNER, _OUTER)


@dataclass(frozen=True, eq=False)
class SimState:
    """
    Attributes
    ----------
    X : numpy.ndarray
        m×m positions, row i is point i.
    Y : numpy.ndarray
        m×m velocities.
    t : float
    """

    X: np.ndarray
    Y: np.ndarray
    t: float

    @classmethod
    def initial(cls, m: int) -> "SimState":
        return cls(np.eye(m), np.zeros((m, m)), 0.0)

    @property
    def m(self) -> int:
        return self.X.shape[0]


@dataclass(frozen=True)
class EnergyReport:
    kinetic: float
    potential: float
    total: float
    drift: float


def _pair_geometry(X: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    upper, lower = np.triu_indices(X.shape[0], 1)
    diff = X[upper] - X[lower]
    return upper, lower, diff, np.einsum("ij,ij->i", diff, diff)


def _resolve_floor(floor: Optional[float]) -> float:
    return load_settings().distance_floor if floor is None else floor


def total_force(X: np.ndarray, g: Graph, floor: Optional[float] = None) -> np.ndarray:
    """
    Row i is the force on point i. Each pair contributes once, with opposite
    signs to its two endpoints.

    Raises
    ------
    SingularityError
        If two points are closer than the distance floor.
    """
    floor = _resolve_floor(floor)
    if X.shape != (g.n, g.n):
        raise ContractError(f"positions must be {g.n}x{g.n}, got {X.shape}")
    force = np.zeros_like(X, dtype=float)
    if g.n < 2:
        return force
    upper, lower, diff, dist2 = _pair_geometry(X)
    closest = int(np.argmin(dist2))
    if dist2[closest] < floor * floor:
        i, k = int(upper[closest]), int(lower[closest])
        logger.error(f"Points {i} and {k} at distance {np.sqrt(dist2[closest]):.3e}.")
        raise SingularityError(
            f"points {i} and {k} closer than {floor}; reduce the step size"
        )
    weight = 1.0 / dist2 - g.adjacency[upper, lower]
    pair = diff * weight[:, None]
    np.add.at(force, upper, pair)
    np.add.at(force, lower, -pair)
    return force


def _steps_for(duration: float, dt: float) -> int:
    if duration == 0:
        return 0
    if dt == 0 or duration / dt < 0:
        raise ContractError(
            f"step {dt} cannot reach a duration of {duration}; signs must agree"
        )
    return int(round(duration / dt))


def integrate(
    state: SimState, g: Graph, duration: float, dt: float, floor: Optional[float] = None
) -> SimState:
    """
    Advance `state` by round(duration / dt) steps.

    Each step runs three velocity-Verlet substeps of length w·dt with the
    weights in `COMPOSITION`. The step is symplectic, time-symmetric and
    fourth order. A negative dt runs time backwards.
    """
    floor = _resolve_floor(floor)
    steps = _steps_for(duration, dt)
    X, Y = state.X.astype(float, copy=True), state.Y.astype(float, copy=True)
    substeps = [w * dt for w in COMPOSITION]
    F = total_force(X, g, floor)
    for _ in range(steps):
        for h in substeps:
            Y = Y + 0.5 * h * F
            X = X + h * Y
            F = total_force(X, g, floor)
            Y = Y + 0.5 * h * F
    return SimState(X, Y, state.t + steps * dt)


def simulate(
    g: Graph, t_end: float, dt: float = DEFAULT_DT, floor: Optional[float] = None
) -> SimState:
    """State at t_end starting from X = I, Y = 0."""
    logger.info(f"Simulating a {g.n}-vertex graph to t={t_end} with dt={dt}.")
    return integrate(SimState.initial(g.n), g, t_end, dt, floor)


def energy(state: SimState, g: Graph, reference: Optional[float] = None) -> EnergyReport:
    """
    E_k = ½ Σ y², E_p = −½ Σ_{r<s} (log d_rs² − h_rs d_rs²).

    Drift is measured against `reference`, or against E(t=0) = E_p(I) when
    no reference is given.
    """
    kinetic = 0.5 * float(np.sum(state.Y * state.Y))
    potential = _potential(state.X, g)
    total = kinetic + potential
    if reference is None:
        reference = _potential(np.eye(g.n), g)
    return EnergyReport(kinetic, potential, total, abs(total - reference))


def _potential(X: np.ndarray, g: Graph) -> float:
    if g.n < 2:
        return 0.0
    upper, lower, _, dist2 = _pair_geometry(X)
    h = g.adjacency[upper, lower]
    return -0.5 * float(np.sum(np.log(dist2) - h * dist2))


def distance_signature(state: SimState) -> np.ndarray:
    """Ascending pairwise distances."""
    if state.m < 2:
        return np.zeros(0)
    _, _, _, dist2 = _pair_geometry(state.X)
    return np.sort(np.sqrt(dist2))


def check_equivariance(
    g: Graph, perm: Sequence[int], t_end: float, dt: float = DEFAULT_DT
) -> float:
    """
    Max |X_{relabeled}(t) − PᵀX(t)P| where the relabeled graph is PᵀHP.
    """
    if sorted(perm) != list(range(g.n)):
        raise ContractError("perm must be a permutation of the vertices")
    inverse = np.argsort(np.asarray(perm))
    plain = simulate(g, t_end, dt).X
    moved = simulate(relabel(g, perm), t_end, dt).X
    return float(np.max(np.abs(moved - plain[np.ix_(inverse, inverse)])))


def trajectory(
    g: Graph,
    t_end: float,
    dt: float = DEFAULT_DT,
    sample_every: int = 1,
    floor: Optional[float] = None,
) -> Iterator[Tuple[SimState, EnergyReport]]:
    """
    Samples at t = 0 and then every `sample_every` steps, always including t_end.
    """
    if sample_every < 1:
        raise ContractError(f"sample_every must be >= 1, got {sample_every}")
    floor = _resolve_floor(floor)
    steps = _steps_for(t_end, dt)
    state = SimState.initial(g.n)
    reference = energy(state, g).total
    yield state, energy(state, g, reference)
    done = 0
    while done < steps:
        chunk = min(sample_every, steps - done)
        state = integrate(state, g, chunk * dt, dt, floor)
        done += chunk
        yield state, energy(state, g, reference)


def write_trajectory(rows: Iterable[Tuple[SimState, EnergyReport]], stream: IO[str]) -> int:
    """Tab-separated rows: t, X row-major, kinetic, potential, total, drift."""
    count = 0
    for state, report in rows:
        if count == 0:
            m = state.m
            names = ["t"] + [f"x_{i}_{j}" for i in range(m) for j in range(m)]
            names += ["kinetic", "potential", "total", "drift"]
            stream.write("\t".join(names) + "\n")
        values = [state.t, *state.X.reshape(-1).tolist()]
        values += [report.kinetic, report.potential, report.total, report.drift]
        stream.write("\t".join(repr(float(v)) for v in values) + "\n")
        count += 1
    return count


def distances_match(
    g1: Graph,
    g2: Graph,
    t: float = 1.0,
    dt: float = DEFAULT_DT,
    tol: float = 1e-8,
    floor: Optional[float] = None,
) -> bool:
    """Whether the two distance signatures at time t agree within tol."""
    if g1.n != g2.n:
        return False
    first = distance_signature(simulate(g1, t, dt, floor))
    second = distance_signature(simulate(g2, t, dt, floor))
    gap = float(np.max(np.abs(first - second))) if first.size else 0.0
    logger.info(f"Distance signatures differ by at most {gap:.3e}.")
    return gap <= tol
