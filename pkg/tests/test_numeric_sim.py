import io
import math

import numpy as np
import pytest

from src.core.errors import ContractError, SingularityError
from src.core.graph_library import (
    complete,
    cycle,
    empty,
    path,
    random_graph,
    random_permutation,
    rook,
    shrikhande,
)
from src.core.numeric_sim import (
    COMPOSITION,
    SimState,
    check_equivariance,
    distance_signature,
    distances_match,
    energy,
    integrate,
    simulate,
    total_force,
    trajectory,
    write_trajectory,
)
from src.core.series_dynamics import TruncationPolicy, evaluate_truncated, series_up_to


class TestForce:
    def test_k2(self):
        force = total_force(np.eye(2), complete(2))
        assert np.allclose(force, [[-0.5, 0.5], [0.5, -0.5]])

    def test_empty_pair_repels(self):
        force = total_force(np.eye(2), empty(2))
        assert np.allclose(force, [[0.5, -0.5], [-0.5, 0.5]])

    def test_forces_cancel(self, rng):
        g = random_graph(6, 0.5, rng)
        X = np.eye(6) + 0.1 * np.random.default_rng(3).standard_normal((6, 6))
        assert np.allclose(total_force(X, g).sum(axis=0), 0.0)

    def test_single_point(self):
        assert total_force(np.eye(1), complete(1)).tolist() == [[0.0]]

    def test_collision(self):
        with pytest.raises(SingularityError):
            total_force(np.eye(2), complete(2), floor=2.0)

    def test_shape_mismatch(self):
        with pytest.raises(ContractError):
            total_force(np.eye(3), complete(2))


class TestIntegration:
    def test_zero_duration(self):
        state = simulate(path(3), 0.0)
        assert np.array_equal(state.X, np.eye(3))
        assert state.t == 0.0

    def test_sign_mismatch(self):
        with pytest.raises(ContractError):
            integrate(SimState.initial(2), complete(2), 1.0, -0.1)

    def test_negative_step_gives_same_positions(self):
        g = path(4)
        forward = simulate(g, 0.2, 1e-3)
        backward = simulate(g, -0.2, -1e-3)
        assert np.array_equal(forward.X, backward.X)
        assert np.array_equal(forward.Y, -backward.Y)

    def test_time_reversal(self):
        g = cycle(5)
        there = simulate(g, 0.5, 1e-3)
        back = integrate(there, g, -0.5, -1e-3)
        assert np.allclose(back.X, np.eye(5), atol=1e-10)
        assert np.allclose(back.Y, 0.0, atol=1e-10)

    def test_composition_weights(self):
        assert math.isclose(sum(COMPOSITION), 1.0)
        assert sum(w**3 for w in COMPOSITION) == pytest.approx(0.0, abs=1e-12)

    @pytest.mark.parametrize("g", [complete(3), path(4), cycle(5)])
    def test_energy_is_conserved(self, g):
        rows = list(trajectory(g, 10.0, 1e-3, sample_every=1000))
        assert max(report.drift for _, report in rows) <= 1e-6

    def test_energy_is_conserved_on_random_graphs(self, rng):
        for m in (2, 6, 8):
            g = random_graph(m, 0.5, rng)
            rows = list(trajectory(g, 10.0, 1e-3, sample_every=2000))
            assert max(report.drift for _, report in rows) <= 1e-6

    @pytest.mark.slow
    def test_energy_is_conserved_on_many_random_graphs(self, rng):
        for _ in range(20):
            m = rng.randint(2, 8)
            g = random_graph(m, rng.random(), rng)
            rows = list(trajectory(g, 10.0, 1e-3, sample_every=1000))
            assert max(report.drift for _, report in rows) <= 1e-6

    def test_matches_series_at_small_time(self):
        g = path(3)
        coeffs = series_up_to(g, TruncationPolicy(s_max=6))
        numeric = simulate(g, 0.1, 1e-5).X
        assert np.max(np.abs(numeric - evaluate_truncated(coeffs, 0.1))) <= 1e-8

    @pytest.mark.slow
    @pytest.mark.parametrize(
        "g", [complete(2), complete(3), path(3), cycle(5)], ids=["k2", "k3", "p3", "c5"]
    )
    def test_matches_fifteen_term_series(self, g):
        coeffs = series_up_to(g, TruncationPolicy(s_max=15))
        numeric = simulate(g, 0.1, 1e-5).X
        assert np.max(np.abs(numeric - evaluate_truncated(coeffs, 0.1))) <= 1e-8

    def test_equivariance(self, rng):
        for _ in range(3):
            g = random_graph(5, 0.5, rng)
            assert check_equivariance(g, random_permutation(5, rng), 0.3) <= 1e-9

    def test_equivariance_needs_permutation(self):
        with pytest.raises(ContractError):
            check_equivariance(path(3), [0, 0, 1], 0.1)


class TestEnergy:
    def test_k2_initial(self):
        report = energy(SimState.initial(2), complete(2))
        assert report.kinetic == 0.0
        assert math.isclose(report.potential, -0.5 * (math.log(2) - 2))
        assert report.drift == 0.0


class TestSignatures:
    def test_k3_distances_are_equal(self):
        signature = distance_signature(simulate(complete(3), 1.0))
        assert np.ptp(signature) <= 1e-12

    def test_srg16_pair_is_not_separated(self):
        assert distances_match(shrikhande(), rook(4), t=1.0)

    def test_order_mismatch(self):
        assert not distances_match(path(3), path(4))

    def test_path_and_cycle_differ(self):
        assert not distances_match(path(4), cycle(4))


class TestTrajectory:
    def test_sampling(self):
        rows = list(trajectory(complete(2), 0.01, 1e-3, sample_every=3))
        assert len(rows) == 5
        assert rows[0][0].t == 0.0
        assert math.isclose(rows[-1][0].t, 0.01)

    def test_floor_is_passed_through(self):
        with pytest.raises(SingularityError):
            list(trajectory(complete(2), 0.01, 1e-3, floor=10.0))
        with pytest.raises(SingularityError):
            distances_match(path(3), path(3), t=0.01, floor=10.0)

    def test_rejects_bad_sampling(self):
        with pytest.raises(ContractError):
            list(trajectory(complete(2), 0.01, 1e-3, sample_every=0))

    def test_write(self):
        stream = io.StringIO()
        count = write_trajectory(trajectory(complete(2), 0.01, 1e-3, sample_every=5), stream)
        lines = stream.getvalue().splitlines()
        assert count == 3
        assert len(lines) == 4
        assert lines[0].split("\t") == [
            "t", "x_0_0", "x_0_1", "x_1_0", "x_1_1", "kinetic", "potential", "total", "drift",
        ]
        assert all(len(line.split("\t")) == 9 for line in lines)
