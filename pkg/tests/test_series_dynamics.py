import json
from fractions import Fraction as F

import numpy as np
import pytest

from src.core.errors import GraphParseError, IntegralityError
from src.core.graph_core import Partition, relabel
from src.core.graph_library import (
    complete,
    empty,
    path,
    random_graph,
    random_permutation,
    star,
)
from src.core.oracle import orbit_partition_bruteforce
from src.core.series_dynamics import (
    SeriesCoefficients,
    TruncationPolicy,
    a1_partition,
    coefficient_digits,
    coefficient_records,
    evaluate_truncated,
    integer_series_up_to,
    parse_coefficient_records,
    row_signature,
    scaled_integer_view,
    series_up_to,
)


def as_lists(matrix):
    return [[F(x) for x in row] for row in matrix]


class TestCoefficients:
    def test_initial_terms(self):
        coeffs = series_up_to(complete(2), TruncationPolicy(s_max=0))
        assert coeffs.terms == 1
        assert as_lists(coeffs.A[0]) == [[1, 0], [0, 1]]
        assert as_lists(coeffs.R[0]) == [[0, F(1, 2)], [F(1, 2), 0]]

    def test_k2_first_term(self):
        coeffs = series_up_to(complete(2), TruncationPolicy(s_max=1))
        assert as_lists(coeffs.A[1]) == [[F(-1, 4), F(1, 4)], [F(1, 4), F(-1, 4)]]
        assert coeffs.R[1][0, 1] == F(1, 2)
        assert coeffs.R[1][0, 0] == 0

    def test_empty_pair_first_term(self):
        coeffs = series_up_to(empty(2), TruncationPolicy(s_max=1))
        assert as_lists(coeffs.A[1]) == [[F(1, 4), F(-1, 4)], [F(-1, 4), F(1, 4)]]

    def test_default_depth_is_m_squared(self):
        assert series_up_to(complete(2)).terms == 5

    def test_k3_symmetry(self):
        coeffs = series_up_to(complete(3), TruncationPolicy(s_max=3))
        for matrix in coeffs.A:
            diagonal = {matrix[i, i] for i in range(3)}
            off = {matrix[i, j] for i in range(3) for j in range(3) if i != j}
            assert len(diagonal) == 1 and len(off) == 1

    def test_column_sums_are_fixed(self, rng):
        # the centroid of the points never moves
        g = random_graph(5, 0.5, rng)
        coeffs = series_up_to(g, TruncationPolicy(s_max=5))
        for n, matrix in enumerate(coeffs.A):
            expected = 1 if n == 0 else 0
            assert all(sum(matrix[:, j]) == expected for j in range(5))

    def test_r_is_symmetric_with_zero_diagonal(self, rng):
        g = random_graph(5, 0.5, rng)
        for matrix in series_up_to(g, TruncationPolicy(s_max=6)).R:
            assert np.array_equal(matrix, matrix.T)
            assert all(matrix[i, i] == 0 for i in range(5))

    def test_prefix_consistency(self):
        g = path(4)
        short = series_up_to(g, TruncationPolicy(s_max=3))
        long = series_up_to(g, TruncationPolicy(s_max=8))
        assert short.equals(long.prefix(3))

    @staticmethod
    def _assert_equivariant(g, perm, s_max):
        inverse = np.argsort(perm)
        plain = series_up_to(g, TruncationPolicy(s_max=s_max))
        moved = series_up_to(relabel(g, perm), TruncationPolicy(s_max=s_max))
        for a, b in zip(plain.A, moved.A):
            assert np.array_equal(b, a[np.ix_(inverse, inverse)])
        for a, b in zip(plain.R, moved.R):
            assert np.array_equal(b, a[np.ix_(inverse, inverse)])

    def test_exact_equivariance(self, rng):
        for _ in range(10):
            m = rng.randint(2, 6)
            self._assert_equivariant(random_graph(m, 0.5, rng), random_permutation(m, rng), 6)

    @pytest.mark.slow
    def test_exact_equivariance_many_pairs(self, rng):
        for _ in range(100):
            m = rng.randint(2, 6)
            g = random_graph(m, rng.random(), rng)
            self._assert_equivariant(g, random_permutation(m, rng), 10)


class TestIntegrality:
    def test_k2_scaled_first_term(self):
        alpha, rho = scaled_integer_view(series_up_to(complete(2), TruncationPolicy(s_max=1)))
        assert alpha[1].tolist() == [[-1, 1], [1, -1]]
        assert alpha[0].tolist() == [[1, 0], [0, 1]]
        assert rho[0].tolist() == [[0, 1], [1, 0]]
        assert rho[1].tolist() == [[0, 4], [4, 0]]

    def test_random_graphs(self, rng):
        for _ in range(10):
            g = random_graph(rng.randint(2, 5), 0.5, rng)
            scaled_integer_view(series_up_to(g, TruncationPolicy(s_max=8)))

    def test_integer_recurrence_matches_scaled_view(self, rng):
        for g in (complete(3), path(4), star(3), random_graph(5, 0.5, rng)):
            alpha, rho = integer_series_up_to(g, 7)
            expected_alpha, expected_rho = scaled_integer_view(
                series_up_to(g, TruncationPolicy(s_max=7))
            )
            for a, b in zip(alpha, expected_alpha):
                assert a.tolist() == b.tolist()
            for a, b in zip(rho, expected_rho):
                assert a.tolist() == b.tolist()

    def test_non_integer_entry_is_reported(self):
        one = np.array([[F(1)]], dtype=object)
        third = np.array([[F(1, 3)]], dtype=object)
        zero = np.array([[F(0)]], dtype=object)
        broken = SeriesCoefficients(1, (one, third), (zero, zero), (zero, zero))
        with pytest.raises(IntegralityError):
            scaled_integer_view(broken)

    @pytest.mark.slow
    def test_acceptance_scale(self, rng):
        for _ in range(200):
            g = random_graph(rng.randint(2, 6), rng.random(), rng)
            scaled_integer_view(series_up_to(g, TruncationPolicy(s_max=20)))


class TestPartition:
    def test_identity_row_signature(self):
        coeffs = series_up_to(complete(3), TruncationPolicy(s_max=0))
        assert row_signature(coeffs.A, 1) == ((0, 0, 1),)

    @pytest.mark.parametrize(
        "g, classes",
        [
            (complete(3), ((0, 1, 2),)),
            (path(3), ((0, 2), (1,))),
            (star(4), ((0,), (1, 2, 3, 4))),
        ],
    )
    def test_examples(self, g, classes):
        assert a1_partition(g, TruncationPolicy(s_max=8)) == Partition(classes)

    def test_p3_separates_early(self):
        coeffs = series_up_to(path(3), TruncationPolicy(s_max=2))
        assert row_signature(coeffs.A, 0) != row_signature(coeffs.A, 1)

    def test_early_stop(self):
        coeffs = series_up_to(complete(3), TruncationPolicy(s_max=20, early_stop=True))
        assert coeffs.terms == 2

    def test_orbits_stay_together(self, rng):
        for _ in range(20):
            g = random_graph(rng.randint(2, 6), rng.choice([0.3, 0.5, 0.7]), rng)
            orbits = orbit_partition_bruteforce(g).partition
            assert orbits.refines(a1_partition(g, TruncationPolicy(s_max=6)))


class TestEvaluation:
    def test_zero_time_is_identity(self):
        coeffs = series_up_to(path(4), TruncationPolicy(s_max=4))
        assert np.allclose(evaluate_truncated(coeffs, 0.0), np.eye(4))

    def test_even_in_time(self):
        coeffs = series_up_to(path(4), TruncationPolicy(s_max=4))
        assert np.array_equal(evaluate_truncated(coeffs, 0.2), evaluate_truncated(coeffs, -0.2))


class TestRecords:
    def test_round_trip(self):
        coeffs = series_up_to(path(3), TruncationPolicy(s_max=3))
        lines = [json.dumps(r) for r in coefficient_records(coeffs)]
        assert len(lines) == 2 * 4 * 9
        assert parse_coefficient_records(lines).equals(coeffs)

    def test_k2_records(self):
        coeffs = series_up_to(complete(2), TruncationPolicy(s_max=1))
        records = [r for r in coefficient_records(coeffs) if r["matrix"] == "A" and r["n"] == 1]
        assert {(r["num"], r["den"]) for r in records} == {("-1", "4"), ("1", "4")}

    def test_bad_record(self):
        with pytest.raises(GraphParseError, match="line 1"):
            parse_coefficient_records(['{"matrix": "A"}'])

    def test_digits(self):
        coeffs = series_up_to(path(4), TruncationPolicy(s_max=6))
        digits = coefficient_digits(coeffs)
        assert len(digits) == 7
        assert digits[0] == 1
