"""Cost matrix validation, assignment costing, and the enumeration oracle."""

import math

import numpy as np
import pytest

from rankassign import (
    assignment_cost,
    enumerate_assignments,
    is_valid_assignment,
    validate_cost_matrix,
)
from rankassign.cost_model import all_misdetected
from rankassign.errors import (
    InfiniteEntry,
    InvalidEntry,
    NonFiniteMisdetect,
    OracleLimitExceeded,
    ShapeMismatch,
)

from conftest import seeded_instances

INF = float("inf")


class TestValidate:
    def test_smallest_instance(self, single):
        assert single.full.tolist() == [[2.0, 5.0]]

    def test_block_layout(self, tiny):
        assert tiny.full.tolist() == [[1.0, 4.0, INF], [2.0, INF, 3.0]]

    def test_detected_shape_mismatch(self):
        with pytest.raises(ShapeMismatch):
            validate_cost_matrix(2, 1, [[1.0, INF]], [4.0])

    def test_misdetect_length_mismatch(self):
        with pytest.raises(ShapeMismatch):
            validate_cost_matrix(2, 1, [[1.0], [2.0]], [4.0])

    def test_nonfinite_misdetect(self):
        with pytest.raises(NonFiniteMisdetect):
            validate_cost_matrix(1, 1, [[1.0]], [INF])
        with pytest.raises(NonFiniteMisdetect):
            validate_cost_matrix(1, 1, [[1.0]], [float("nan")])

    def test_nan_detected_rejected(self):
        with pytest.raises(InvalidEntry):
            validate_cost_matrix(1, 1, [[float("nan")]], [1.0])

    def test_nonpositive_tracks_rejected(self):
        with pytest.raises(ShapeMismatch):
            validate_cost_matrix(0, 1, [], [])

    def test_gating_preserved(self):
        C = validate_cost_matrix(1, 2, [[INF, 3.0]], [1.0])
        assert C.full.tolist() == [[INF, 3.0, 1.0]]

    def test_zero_measurements_legal(self):
        C = validate_cost_matrix(2, 0, [[], []], [1.0, 2.0])
        sol = enumerate_assignments(C, 10)
        assert len(sol) == 1
        assert sol[0].columns == (0, 1)
        assert sol[0].cost == pytest.approx(3.0)

    def test_arrays_read_only(self, tiny):
        with pytest.raises(ValueError):
            tiny.detected[0, 0] = 9.0
        with pytest.raises(ValueError):
            tiny.full[0, 0] = 9.0


class TestAssignmentCost:
    def test_single_term(self, single):
        assert assignment_cost(single, [0]) == pytest.approx(2.0)

    def test_two_terms(self, tiny):
        assert assignment_cost(tiny, [0, 2]) == pytest.approx(4.0)

    def test_gated_entry_raises(self, tiny):
        with pytest.raises(InfiniteEntry):
            assignment_cost(tiny, [2, 0])

    def test_wrong_length_raises(self, tiny):
        with pytest.raises(ShapeMismatch):
            assignment_cost(tiny, [0])


class TestIsValid:
    def test_duplicate_column(self, tiny):
        assert not is_valid_assignment(tiny, [0, 0])

    def test_valid(self, tiny):
        assert is_valid_assignment(tiny, [0, 2])

    def test_gated(self, tiny):
        assert not is_valid_assignment(tiny, [2, 0])

    def test_wrong_length(self, tiny):
        assert not is_valid_assignment(tiny, [0])

    def test_out_of_range(self, tiny):
        assert not is_valid_assignment(tiny, [0, 5])


class TestOracle:
    def test_tiny_all_assignments(self, tiny):
        sol = enumerate_assignments(tiny, 10)
        assert [a.columns for a in sol] == [(0, 2), (1, 0), (1, 2)]
        assert sol.costs() == pytest.approx([4.0, 6.0, 7.0])

    def test_single_two_options(self, single):
        sol = enumerate_assignments(single, 2)
        assert sol.costs() == pytest.approx([2.0, 5.0])

    def test_limit(self):
        C = validate_cost_matrix(7, 1, [[1.0]] * 7, [0.0] * 7)
        with pytest.raises(OracleLimitExceeded):
            enumerate_assignments(C, 1)

    def test_truncation(self, tiny):
        sol = enumerate_assignments(tiny, 2)
        assert sol.costs() == pytest.approx([4.0, 6.0])

    def test_equal_cost_lexicographic(self):
        C = validate_cost_matrix(2, 2, [[1.0, 1.0], [1.0, 1.0]], [5.0, 5.0])
        sol = enumerate_assignments(C, 10)
        assert [a.columns for a in sol] == [
            (0, 1), (1, 0), (0, 3), (1, 3), (2, 0), (2, 1), (2, 3),
        ]


class TestInvariants:
    def test_all_misdetected_always_valid(self):
        for C in seeded_instances(60):
            fallback = all_misdetected(C)
            assert is_valid_assignment(C, fallback.columns)
            assert fallback.cost == pytest.approx(float(C.misdetect.sum()))
            sol = enumerate_assignments(C, 5)
            assert len(sol) >= 1

    def test_oracle_output_well_formed(self):
        for C in seeded_instances(40, base_seed=7):
            sol = enumerate_assignments(C, 8)
            costs = sol.costs()
            assert all(b >= a - 1e-9 for a, b in zip(costs, costs[1:]))
            columns = [a.columns for a in sol]
            assert len(set(columns)) == len(columns)
            assert len(sol) <= 8
            for a in sol:
                assert is_valid_assignment(C, a.columns)
                assert a.cost == pytest.approx(assignment_cost(C, a.columns), abs=1e-9)
