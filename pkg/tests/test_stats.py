"""Student-t machinery against closed forms and a quadrature oracle."""

import math

import numpy as np
import pytest

from oracles import two_tailed_p_by_quadrature
from seqvpr.errors import InvalidDof, LengthMismatch, TooFewSamples
from seqvpr.stats import (
    paired_t_test,
    regularized_incomplete_beta,
    student_t_two_tailed_p,
)


class TestTwoTailedP:
    def test_zero_statistic_gives_one(self):
        for nu in (1, 2, 5, 17, 100):
            assert student_t_two_tailed_p(0.0, nu) == 1.0

    def test_cauchy_closed_form(self):
        # nu=1 is Cauchy: p = 2 * (0.5 - arctan(|t|) / pi)
        for t in (0.25, 0.5, 1.0, 2.0, 5.0, 17.5):
            expected = 2.0 * (0.5 - math.atan(t) / math.pi)
            assert student_t_two_tailed_p(t, 1) == pytest.approx(
                expected, abs=1e-9
            )
        assert student_t_two_tailed_p(1.0, 1) == pytest.approx(0.5, abs=1e-9)

    def test_critical_value_table_entry(self):
        assert student_t_two_tailed_p(2.262, 9) == pytest.approx(0.05, abs=1e-3)

    def test_symmetric_in_sign(self):
        for nu in (1, 3, 9, 40):
            for t in (0.1, 0.7, 1.9, 3.3):
                assert student_t_two_tailed_p(t, nu) == student_t_two_tailed_p(
                    -t, nu
                )

    def test_strictly_decreasing_in_magnitude(self):
        grid = np.arange(0.0, 4.01, 0.25)
        for nu in (1, 2, 5, 10, 50, 200):
            values = [student_t_two_tailed_p(t, nu) for t in grid]
            assert all(a > b for a, b in zip(values, values[1:]))

    def test_matches_quadrature_oracle(self):
        for nu in (1, 2, 4, 9, 30, 120):
            for t in (0.3, 1.0, 2.262, 3.7):
                assert student_t_two_tailed_p(t, nu) == pytest.approx(
                    two_tailed_p_by_quadrature(t, nu), abs=1e-8
                )

    def test_converges_to_normal_tail(self):
        for nu in (200, 500):
            for t in (0.5, 1.0, 2.0, 3.0, 4.0):
                normal = math.erfc(t / math.sqrt(2.0))
                assert student_t_two_tailed_p(t, nu) == pytest.approx(
                    normal, abs=5e-3
                )

    def test_infinite_statistic(self):
        assert student_t_two_tailed_p(math.inf, 5) == 0.0

    def test_invalid_dof(self):
        with pytest.raises(InvalidDof):
            student_t_two_tailed_p(1.0, 0)
        with pytest.raises(InvalidDof):
            student_t_two_tailed_p(1.0, 2.5)


class TestIncompleteBeta:
    def test_boundaries(self):
        assert regularized_incomplete_beta(2.0, 3.0, 0.0) == 0.0
        assert regularized_incomplete_beta(2.0, 3.0, 1.0) == 1.0

    def test_uniform_case_is_identity(self):
        for x in (0.1, 0.37, 0.5, 0.93):
            assert regularized_incomplete_beta(1.0, 1.0, x) == pytest.approx(
                x, abs=1e-12
            )

    def test_symmetry_identity(self):
        # I_x(a, b) == 1 - I_{1-x}(b, a)
        for a, b, x in [(0.5, 4.5, 0.2), (2.0, 0.5, 0.7), (3.0, 3.0, 0.31)]:
            assert regularized_incomplete_beta(a, b, x) == pytest.approx(
                1.0 - regularized_incomplete_beta(b, a, 1.0 - x), abs=1e-12
            )


class TestPairedTTest:
    def test_identical_samples_fail_to_reject(self):
        r = paired_t_test([1.0, 2.0, 3.0], [1.0, 2.0, 3.0])
        assert r.t_statistic == 0.0
        assert r.p_value == 1.0
        assert not r.reject_h0

    def test_zero_mean_differences(self):
        r = paired_t_test([1.0, 0.0], [0.0, 1.0])  # d = [1, -1]
        assert r.t_statistic == 0.0
        assert r.p_value == 1.0

    def test_two_pair_closed_form(self):
        # d = [1, 3]: mean 2, sample sd sqrt(2), t = 2, nu = 1
        r = paired_t_test([2.0, 4.0], [1.0, 1.0], alpha=0.05)
        assert r.t_statistic == pytest.approx(2.0, abs=1e-12)
        assert r.degrees_of_freedom == 1
        expected_p = 2.0 * (0.5 - math.atan(2.0) / math.pi)
        assert r.p_value == pytest.approx(expected_p, abs=1e-9)
        assert not r.reject_h0

    def test_constant_nonzero_shift_rejects(self):
        r = paired_t_test([1.0, 1.0, 1.0], [0.0, 0.0, 0.0])
        assert math.isinf(r.t_statistic)
        assert r.p_value == 0.0
        assert r.reject_h0

    def test_all_zero_windows_are_quiescent(self):
        r = paired_t_test(np.zeros(10), np.zeros(10))
        assert r.p_value == 1.0
        assert not r.reject_h0

    def test_reject_flag_tracks_alpha(self):
        a = [0.0, 0.1, -0.05, 0.02, 0.07]
        b = [1.0, 1.1, 0.90, 1.04, 1.01]
        strict = paired_t_test(a, b, alpha=1e-7)
        loose = paired_t_test(a, b, alpha=0.05)
        assert loose.reject_h0
        assert loose.p_value == strict.p_value
        assert strict.reject_h0 == (strict.p_value < 1e-7)

    def test_errors(self):
        with pytest.raises(LengthMismatch):
            paired_t_test([1.0, 2.0], [1.0, 2.0, 3.0])
        with pytest.raises(TooFewSamples):
            paired_t_test([1.0], [2.0])
        with pytest.raises(ValueError):
            paired_t_test([1.0, 2.0], [1.0, 2.0], alpha=1.5)
