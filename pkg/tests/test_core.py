"""Core statevector kernel: preparation, reflections, the iterate, backends."""

import math

import numpy as np
import pytest
from scipy.stats import chi2_contingency

from qaelab.core import (
    AnalyticBackend,
    OracleSpec,
    Statevector,
    StatevectorBackend,
    analytic_flag_probability,
    apply_q,
    apply_q_power,
    apply_s_0,
    apply_s_chi,
    flag_probability,
    make_backend,
    measure_flag,
    prepare_a,
)

_H = np.array([[1.0, 1.0], [1.0, -1.0]], dtype=complex) / math.sqrt(2.0)


def dense_preparation_matrix(oracle):
    """Independent dense build: Hadamard on each domain qubit, then a
    permutation that flips the flag bit on the good indices."""
    had = np.eye(1, dtype=complex)
    for _ in range(oracle.n):
        had = np.kron(had, _H)
    had = np.kron(had, np.eye(2, dtype=complex))
    dim = 2 << oracle.n
    perm = np.zeros((dim, dim), dtype=complex)
    for d in range(1 << oracle.n):
        flip = 1 if d in oracle.good_set else 0
        for f in (0, 1):
            perm[(d << 1) | (f ^ flip), (d << 1) | f] = 1.0
    return perm @ had


def dense_iterate_matrix(oracle):
    """Independent dense build of the amplification iterate."""
    dim = 2 << oracle.n
    prep = dense_preparation_matrix(oracle)
    reflect0 = np.eye(dim, dtype=complex)
    reflect0[0, 0] = -1.0
    flag_phase = np.kron(np.eye(1 << oracle.n, dtype=complex), np.diag([1.0, -1.0]))
    return prep @ reflect0 @ prep.conj().T @ flag_phase


class TestOracleSpec:
    def test_defaults_to_leading_indices(self):
        oracle = OracleSpec(3, 3)
        assert oracle.good_set == frozenset({0, 1, 2})
        assert oracle.domain_size == 8
        assert oracle.a == 0.375

    def test_explicit_good_set(self):
        oracle = OracleSpec(2, 1, frozenset({1}))
        assert oracle.a == 0.25
        assert oracle.theta == pytest.approx(math.pi / 6, abs=1e-15)

    def test_theta_of_eighth(self):
        oracle = OracleSpec(10, 128)
        assert oracle.theta == pytest.approx(0.36136712390670783, abs=1e-15)

    def test_rejects_bad_inputs(self):
        with pytest.raises(ValueError):
            OracleSpec(0, 0)
        with pytest.raises(ValueError):
            OracleSpec(2, 5)
        with pytest.raises(ValueError):
            OracleSpec(2, -1)
        with pytest.raises(ValueError):
            OracleSpec(2, 1, frozenset({4}))
        with pytest.raises(ValueError):
            OracleSpec(2, 2, frozenset({1}))


class TestPrepare:
    def test_quarter_amplitude(self):
        state = prepare_a(OracleSpec(2, 1, frozenset({1})))
        assert flag_probability(state) == pytest.approx(0.25, abs=1e-15)
        # index (1 << 1) | 1 carries the single marked amplitude
        assert state.amps[3] == pytest.approx(0.5)
        assert state.amps[2] == 0.0

    def test_empty_good_set(self):
        state = prepare_a(OracleSpec(3, 0))
        assert flag_probability(state) == 0.0
        assert state.norm_sq() == pytest.approx(1.0, abs=1e-12)

    def test_three_eighths(self):
        state = prepare_a(OracleSpec(3, 3))
        assert flag_probability(state) == pytest.approx(0.375, abs=1e-15)

    @pytest.mark.parametrize("n,good", [(1, 1), (2, 3), (3, 3), (3, 8), (4, 5)])
    def test_matches_dense_build(self, n, good):
        oracle = OracleSpec(n, good)
        column = dense_preparation_matrix(oracle)[:, 0]
        np.testing.assert_allclose(prepare_a(oracle).amps, column, atol=1e-12)


class TestReflections:
    def test_flag_phase_flips_odd_only(self):
        amps = np.arange(8, dtype=complex)
        state = Statevector(2, amps.copy())
        apply_s_chi(state)
        np.testing.assert_array_equal(state.amps[0::2], amps[0::2])
        np.testing.assert_array_equal(state.amps[1::2], -amps[1::2])

    def test_zero_reflection_touches_index_zero_only(self):
        amps = np.arange(1, 9, dtype=complex)
        state = Statevector(2, amps.copy())
        apply_s_0(state)
        assert state.amps[0] == -1.0
        np.testing.assert_array_equal(state.amps[1:], amps[1:])

    @pytest.mark.parametrize("op", [apply_s_chi, apply_s_0])
    def test_involution(self, op):
        rng = np.random.default_rng(5)
        for n in (1, 3, 6):
            amps = rng.normal(size=2 << n) + 1j * rng.normal(size=2 << n)
            amps /= np.linalg.norm(amps)
            state = Statevector(n, amps.copy())
            op(op(state))
            np.testing.assert_allclose(state.amps, amps, atol=1e-12)


class TestIterate:
    def test_quarter_reaches_certainty(self):
        # a = 1/4 means theta = pi/6, so one iterate lands on sin^2(pi/2) = 1
        oracle = OracleSpec(2, 1, frozenset({1}))
        state = apply_q(prepare_a(oracle), oracle)
        assert flag_probability(state) == pytest.approx(1.0, abs=1e-12)

    def test_empty_oracle_keeps_flag_grounded(self):
        oracle = OracleSpec(3, 0)
        state = prepare_a(oracle)
        for _ in range(5):
            apply_q(state, oracle)
            assert flag_probability(state) == 0.0
            assert state.norm_sq() == pytest.approx(1.0, abs=1e-12)

    def test_full_oracle_keeps_flag_raised(self):
        oracle = OracleSpec(2, 4)
        state = apply_q_power(prepare_a(oracle), oracle, 3)
        assert flag_probability(state) == pytest.approx(1.0, abs=1e-12)

    def test_two_iterates_match_dense_build(self):
        oracle = OracleSpec(3, 3)
        dense = dense_iterate_matrix(oracle)
        expected = dense @ dense @ dense_preparation_matrix(oracle)[:, 0]
        state = apply_q_power(prepare_a(oracle), oracle, 2)
        np.testing.assert_allclose(state.amps, expected, atol=1e-12)

    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    def test_probe_matrix_is_unitary(self, n):
        dim = 2 << n
        for good in range((1 << n) + 1):
            oracle = OracleSpec(n, good)
            probe = np.empty((dim, dim), dtype=complex)
            for j in range(dim):
                probe[:, j] = apply_q(Statevector.basis(n, j), oracle).amps
            np.testing.assert_allclose(
                probe @ probe.conj().T, np.eye(dim), atol=1e-10,
                err_msg=f"n={n} good={good}",
            )

    def test_probe_matrix_matches_dense(self):
        for n, good in [(1, 1), (2, 2), (3, 5), (4, 7)]:
            oracle = OracleSpec(n, good)
            dim = 2 << n
            probe = np.empty((dim, dim), dtype=complex)
            for j in range(dim):
                probe[:, j] = apply_q(Statevector.basis(n, j), oracle).amps
            np.testing.assert_allclose(probe, dense_iterate_matrix(oracle), atol=1e-10)


class TestPower:
    def test_zero_power_is_identity(self):
        oracle = OracleSpec(3, 2)
        state = prepare_a(oracle)
        before = state.amps.copy()
        apply_q_power(state, oracle, 0)
        np.testing.assert_array_equal(state.amps, before)

    def test_negative_power_rejected(self):
        oracle = OracleSpec(2, 1)
        with pytest.raises(ValueError):
            apply_q_power(prepare_a(oracle), oracle, -1)

    def test_eighth_after_four_iterates(self):
        # sin^2(9 * arcsin(sqrt(1/8))) is exactly 25/2048
        oracle = OracleSpec(10, 128)
        state = apply_q_power(prepare_a(oracle), oracle, 4)
        assert flag_probability(state) == pytest.approx(0.01220703125, abs=1e-11)

    def test_rotation_identity_sample(self):
        for n in (1, 2, 3, 5):
            for good in (0, 1, (1 << n) // 2, 1 << n):
                oracle = OracleSpec(n, good)
                for m in range(9):
                    state = apply_q_power(prepare_a(oracle), oracle, m)
                    assert flag_probability(state) == pytest.approx(
                        analytic_flag_probability(oracle, m), abs=1e-9
                    ), f"n={n} good={good} m={m}"

    def test_norm_preserved_through_long_product(self):
        oracle = OracleSpec(6, 11)
        state = prepare_a(oracle)
        for _ in range(50):
            apply_q(state, oracle)
            assert abs(state.norm_sq() - 1.0) < 1e-10


class TestAnalytic:
    def test_identity_power(self):
        assert analytic_flag_probability(OracleSpec(10, 128), 0) == pytest.approx(
            0.125, abs=1e-15
        )

    def test_eight_iterates(self):
        value = analytic_flag_probability(OracleSpec(10, 128), 8)
        assert value == pytest.approx(0.019456863403320264, abs=1e-12)
        # same number through the statevector route
        state = apply_q_power(prepare_a(OracleSpec(10, 128)), OracleSpec(10, 128), 8)
        assert flag_probability(state) == pytest.approx(value, abs=1e-9)

    def test_certain_amplitude(self):
        oracle = OracleSpec(2, 4)
        for m in (0, 1, 5):
            assert analytic_flag_probability(oracle, m) == pytest.approx(1.0, abs=1e-12)

    def test_negative_power_rejected(self):
        with pytest.raises(ValueError):
            analytic_flag_probability(OracleSpec(2, 1), -2)


class TestBackends:
    def test_factory(self):
        assert isinstance(make_backend("sv"), StatevectorBackend)
        assert isinstance(make_backend("statevector"), StatevectorBackend)
        assert isinstance(make_backend("analytic"), AnalyticBackend)
        with pytest.raises(ValueError):
            make_backend("qpu")

    def test_probabilities_agree(self):
        oracle = OracleSpec(5, 7)
        sv, an = StatevectorBackend(), AnalyticBackend()
        for m in range(9):
            assert sv.flag_probability(oracle, m) == pytest.approx(
                an.flag_probability(oracle, m), abs=1e-12
            )

    def test_hit_count_distributions_match(self):
        # two-sample chi-squared over 10^4 seeded draws per backend
        oracle = OracleSpec(5, 4)
        shots, power, draws = 32, 1, 10_000
        rng_sv = np.random.default_rng(61)
        rng_an = np.random.default_rng(62)
        sv = np.array([
            measure_flag(StatevectorBackend(), oracle, power, shots, rng_sv)
            for _ in range(draws)
        ])
        an = np.array([
            measure_flag(AnalyticBackend(), oracle, power, shots, rng_an)
            for _ in range(draws)
        ])
        edges = np.arange(shots + 2)
        hist_sv = np.histogram(sv, bins=edges)[0]
        hist_an = np.histogram(an, bins=edges)[0]
        keep = (hist_sv + hist_an) >= 10  # pool sparse tail bins
        table = np.array([
            np.append(hist_sv[keep], hist_sv[~keep].sum()),
            np.append(hist_an[keep], hist_an[~keep].sum()),
        ])
        table = table[:, table.sum(axis=0) > 0]
        p_value = chi2_contingency(table).pvalue
        assert p_value > 0.001


class TestMeasure:
    def test_empty_oracle_never_hits(self):
        rng = np.random.default_rng(1)
        assert measure_flag(AnalyticBackend(), OracleSpec(4, 0), 3, 500, rng) == 0

    def test_full_oracle_always_hits(self):
        rng = np.random.default_rng(2)
        assert measure_flag(AnalyticBackend(), OracleSpec(4, 16), 2, 500, rng) == 500

    def test_large_sample_frequency(self):
        rng = np.random.default_rng(3)
        hits = measure_flag(AnalyticBackend(), OracleSpec(10, 128), 0, 1_000_000, rng)
        assert abs(hits / 1_000_000 - 0.125) <= 0.001

    def test_deterministic_for_fixed_seed(self):
        oracle = OracleSpec(6, 9)
        seq1 = [
            measure_flag(AnalyticBackend(), oracle, m, 64, np.random.default_rng(17))
            for m in range(4)
        ]
        seq2 = [
            measure_flag(AnalyticBackend(), oracle, m, 64, np.random.default_rng(17))
            for m in range(4)
        ]
        assert seq1 == seq2

    def test_rejects_nonpositive_shots(self):
        with pytest.raises(ValueError):
            measure_flag(AnalyticBackend(), OracleSpec(2, 1), 0, 0, np.random.default_rng(0))


class TestStatevector:
    def test_shape_validation(self):
        with pytest.raises(ValueError):
            Statevector(2, np.zeros(4))

    def test_basis_and_copy(self):
        state = Statevector.basis(2, 5)
        assert state.amps[5] == 1.0
        assert state.norm_sq() == 1.0
        dup = state.copy()
        dup.amps[5] = 0.0
        assert state.amps[5] == 1.0

    def test_normalization_through_random_sequences(self):
        rng = np.random.default_rng(23)
        oracle = OracleSpec(4, 6, frozenset({0, 2, 3, 7, 9, 14}))
        state = prepare_a(oracle)
        ops = [apply_s_chi, apply_s_0, lambda s: apply_q(s, oracle)]
        for _ in range(60):
            ops[rng.integers(len(ops))](state)
            assert abs(state.norm_sq() - 1.0) < 1e-10
