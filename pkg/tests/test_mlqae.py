"""Schedules, the joint likelihood, its maximizer, and full estimation runs."""

import math

import numpy as np
import pytest

from qaelab.core import AnalyticBackend, OracleSpec, StatevectorBackend
from qaelab.mlqae import (
    MeasurementRecord,
    Schedule,
    eis_schedule,
    lis_schedule,
    log_likelihood,
    maximize_likelihood,
    oracle_call_count,
    run_mlqae,
)

THETA_EIGHTH = math.asin(math.sqrt(0.125))  # 0.36136712390670783


def exact_records(theta_star, depth, shots):
    """Records whose hit counts equal their exact expectations (floats)."""
    return [
        MeasurementRecord(p, shots, shots * math.sin((2 * p + 1) * theta_star) ** 2)
        for p in eis_schedule(depth).powers
    ]


class TestSchedules:
    def test_exponential_ladder(self):
        assert eis_schedule(0).powers == (0,)
        assert eis_schedule(1).powers == (0, 1)
        assert eis_schedule(3).powers == (0, 1, 2, 4)
        assert eis_schedule(4).powers == (0, 1, 2, 4, 8)

    def test_linear_ladder(self):
        assert lis_schedule(0).powers == (0,)
        assert lis_schedule(4).powers == (0, 1, 2, 3, 4)

    def test_depth_validation(self):
        with pytest.raises(ValueError):
            eis_schedule(-1)
        with pytest.raises(ValueError):
            lis_schedule(-2)

    def test_schedule_shape_validation(self):
        with pytest.raises(ValueError):
            Schedule("eis", 2, (1, 2))  # must start at zero
        with pytest.raises(ValueError):
            Schedule("eis", 2, (0, 2, 2))  # strictly increasing
        with pytest.raises(ValueError):
            Schedule("geometric", 2, (0, 1, 2))  # unknown kind

    def test_call_count(self):
        assert oracle_call_count(eis_schedule(3), 1) == 18
        assert oracle_call_count(eis_schedule(3), 1024) == 18432
        assert oracle_call_count(eis_schedule(4), 1) == 35
        assert oracle_call_count(eis_schedule(4), 1024) == 35840
        assert oracle_call_count(lis_schedule(2), 100) == 900


class TestMeasurementRecord:
    def test_validation(self):
        MeasurementRecord(0, 16, 0)
        MeasurementRecord(4, 16, 16)
        with pytest.raises(ValueError):
            MeasurementRecord(-1, 16, 3)
        with pytest.raises(ValueError):
            MeasurementRecord(0, 0, 0)
        with pytest.raises(ValueError):
            MeasurementRecord(0, 16, 17)


class TestLogLikelihood:
    def test_single_record_closed_form(self):
        rec = [MeasurementRecord(0, 100, 25)]
        theta = math.pi / 6
        expected = 25 * math.log(0.25) + 75 * math.log(0.75)
        assert log_likelihood(rec, theta) == pytest.approx(expected, abs=1e-10)

    def test_finite_at_boundaries(self):
        assert math.isfinite(log_likelihood([MeasurementRecord(0, 100, 0)], math.pi / 2))
        assert math.isfinite(log_likelihood([MeasurementRecord(0, 100, 100)], 0.0))
        assert math.isfinite(log_likelihood([MeasurementRecord(2, 64, 64)], 0.0))

    def test_vectorized_matches_scalar(self):
        recs = [MeasurementRecord(p, 128, h) for p, h in [(0, 17), (1, 100), (2, 55)]]
        grid = np.linspace(0.0, math.pi / 2, 257)
        vect = log_likelihood(recs, grid)
        scal = np.array([log_likelihood(recs, t) for t in grid])
        np.testing.assert_allclose(vect, scal, rtol=1e-12)

    def test_exact_records_peak_at_truth(self):
        # independent oracle: dense million-point scan of the same function
        recs = exact_records(THETA_EIGHTH, 3, 1_000_000)
        grid = np.linspace(0.0, math.pi / 2, 1_000_000)
        best = float(grid[np.argmax(log_likelihood(recs, grid))])
        assert abs(best - THETA_EIGHTH) < 1e-4


class TestMaximize:
    def test_all_misses_gives_zero(self):
        assert maximize_likelihood([MeasurementRecord(0, 16, 0)]) == 0.0

    def test_all_hits_gives_right_angle(self):
        # the likelihood is float-flat on [pi/2 - 1e-8, pi/2]; anywhere there is a maximizer
        theta = maximize_likelihood([MeasurementRecord(0, 16, 16)])
        assert theta == pytest.approx(math.pi / 2, abs=2e-8)
        assert math.sin(theta) ** 2 == 1.0

    def test_single_record_quarter(self):
        theta = maximize_likelihood([MeasurementRecord(0, 100, 25)])
        assert theta == pytest.approx(math.pi / 6, abs=1e-6)

    def test_consistency_on_exact_records(self):
        theta = maximize_likelihood(exact_records(THETA_EIGHTH, 4, 4096))
        assert abs(math.sin(theta) ** 2 - 0.125) < 1e-4

    def test_never_below_coarse_grid(self):
        rng = np.random.default_rng(99)
        grid = np.linspace(0.0, math.pi / 2, 100_000)
        for _ in range(5):
            recs = [
                MeasurementRecord(p, 64, int(rng.integers(0, 65)))
                for p in (0, 1, 2, 4)
            ]
            theta = maximize_likelihood(recs)
            assert log_likelihood(recs, theta) >= float(
                np.max(log_likelihood(recs, grid))
            )

    def test_requires_records(self):
        with pytest.raises(ValueError):
            maximize_likelihood([])


class TestRunMlqae:
    def test_call_accounting_exact(self):
        oracle = OracleSpec(10, 128)
        for shots in (16, 100, 1024):
            rng = np.random.default_rng(7)
            assert run_mlqae(oracle, 3, shots, rng=rng).oracle_calls == 18 * shots
            assert run_mlqae(oracle, 4, shots, rng=rng).oracle_calls == 35 * shots

    def test_report_records_follow_schedule(self):
        oracle = OracleSpec(10, 128)
        report = run_mlqae(oracle, 4, 64, rng=np.random.default_rng(3))
        assert tuple(rec.power for rec in report.records) == (0, 1, 2, 4, 8)
        assert all(rec.shots == 64 for rec in report.records)
        assert all(0 <= rec.hits <= 64 for rec in report.records)
        assert report.a_hat == pytest.approx(math.sin(report.theta_hat) ** 2, abs=1e-15)

    def test_empty_oracle_estimates_zero_exactly(self):
        report = run_mlqae(OracleSpec(8, 0), 3, 256, rng=np.random.default_rng(11))
        assert report.theta_hat == 0.0
        assert report.a_hat == 0.0

    def test_mean_accuracy_at_high_shots(self):
        oracle = OracleSpec(10, 128)
        estimates = [
            run_mlqae(oracle, 4, 1024, rng=np.random.default_rng(4000 + r)).a_hat
            for r in range(30)
        ]
        mean = float(np.mean(estimates))
        rel = 100.0 * np.abs(np.array(estimates) - 0.125) / 0.125
        assert 0.123 <= mean <= 0.127
        assert float(rel.mean()) <= 0.6

    def test_deeper_ladder_not_worse(self):
        # statistical: mean relative error at depth 4 should not exceed depth 3
        oracle = OracleSpec(10, 128)
        rel = {}
        for depth in (3, 4):
            ests = np.array([
                run_mlqae(oracle, depth, 1024, rng=np.random.default_rng(5000 + r)).a_hat
                for r in range(30)
            ])
            rel[depth] = float(np.mean(100.0 * np.abs(ests - 0.125) / 0.125))
        assert rel[4] <= rel[3]

    def test_linear_schedule_runs(self):
        oracle = OracleSpec(10, 128)
        report = run_mlqae(oracle, 4, 512, kind="lis", rng=np.random.default_rng(8))
        assert report.oracle_calls == 512 * (1 + 3 + 5 + 7 + 9)
        assert abs(report.a_hat - 0.125) < 0.05

    def test_statevector_backend_runs(self):
        oracle = OracleSpec(6, 8)
        report = run_mlqae(
            oracle, 3, 2048, backend=StatevectorBackend(), rng=np.random.default_rng(9)
        )
        assert abs(report.a_hat - oracle.a) < 0.05

    def test_deterministic(self):
        oracle = OracleSpec(10, 128)
        r1 = run_mlqae(oracle, 4, 256, backend=AnalyticBackend(),
                       rng=np.random.default_rng(77))
        r2 = run_mlqae(oracle, 4, 256, backend=AnalyticBackend(),
                       rng=np.random.default_rng(77))
        assert r1 == r2

    def test_unknown_kind_rejected(self):
        with pytest.raises(ValueError):
            run_mlqae(OracleSpec(4, 2), 3, 16, kind="exp", rng=np.random.default_rng(0))
