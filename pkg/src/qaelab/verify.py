"""Brute-force cross-checks for the matrix-free core and the interval math.

Everything here is built the slow, obvious way — dense Kronecker products,
explicit permutation matrices, direct binomial tail sums, exhaustive power
scans — precisely so it shares no code path with the implementations it
checks.  The CLI ``verify`` subcommand runs :func:`run_checks`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import OracleSpec, Statevector, apply_q, apply_q_power, apply_s_0, \
    apply_s_chi, analytic_flag_probability, flag_probability, prepare_a
from .iqae import ConfidenceInterval, binomial_confidence, find_next_k

__all__ = [
    "CheckResult",
    "dense_preparation",
    "dense_iterate",
    "probe_iterate",
    "run_checks",
]

_H = np.array([[1.0, 1.0], [1.0, -1.0]], dtype=np.complex128) / math.sqrt(2.0)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def _mark_permutation(oracle: OracleSpec) -> np.ndarray:
    """Permutation flipping the flag bit on every good domain index."""
    dim = 2 << oracle.n
    perm = np.zeros((dim, dim), dtype=np.complex128)
    for d in range(oracle.domain_size):
        flip = 1 if d in oracle.good_set else 0
        for f in (0, 1):
            perm[(d << 1) | (f ^ flip), (d << 1) | f] = 1.0
    return perm


def dense_preparation(oracle: OracleSpec) -> np.ndarray:
    """Preparation unitary as an explicit matrix: Hadamards then marking."""
    had = np.eye(1, dtype=np.complex128)
    for _ in range(oracle.n):
        had = np.kron(had, _H)
    had = np.kron(had, np.eye(2, dtype=np.complex128))
    return _mark_permutation(oracle) @ had


def dense_iterate(oracle: OracleSpec) -> np.ndarray:
    """Amplification iterate assembled from explicit dense factors."""
    dim = 2 << oracle.n
    prep = dense_preparation(oracle)
    reflect0 = np.eye(dim, dtype=np.complex128)
    reflect0[0, 0] = -1.0
    flag_phase = np.kron(
        np.eye(1 << oracle.n, dtype=np.complex128),
        np.diag([1.0, -1.0]).astype(np.complex128),
    )
    return prep @ reflect0 @ prep.conj().T @ flag_phase


def probe_iterate(oracle: OracleSpec) -> np.ndarray:
    """Iterate matrix recovered column-by-column through the in-place kernel."""
    dim = 2 << oracle.n
    cols = np.empty((dim, dim), dtype=np.complex128)
    for j in range(dim):
        cols[:, j] = apply_q(Statevector.basis(oracle.n, j), oracle).amps
    return cols


def _binomial_upper_tail(hits: int, shots: int, p: float) -> float:
    """P[X >= hits] for X ~ Binomial(shots, p), by direct summation."""
    return sum(
        math.comb(shots, j) * p**j * (1.0 - p) ** (shots - j)
        for j in range(hits, shots + 1)
    )


def _binomial_lower_tail(hits: int, shots: int, p: float) -> float:
    """P[X <= hits] for X ~ Binomial(shots, p), by direct summation."""
    return sum(
        math.comb(shots, j) * p**j * (1.0 - p) ** (shots - j)
        for j in range(0, hits + 1)
    )


def reference_binomial_confidence(
    hits: int, shots: int, alpha: float
) -> tuple[float, float]:
    """Clopper-Pearson bounds found by bisecting the exact tail sums."""

    def bisect(f, lo: float, hi: float, target: float) -> float:
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if f(mid) < target:
                lo = mid
            else:
                hi = mid
        return 0.5 * (lo + hi)

    if hits == 0:
        p_lo = 0.0
    else:
        # P[X >= hits] grows with p; find where it crosses alpha/2
        p_lo = bisect(lambda p: _binomial_upper_tail(hits, shots, p), 0.0, 1.0, alpha / 2)
    if hits == shots:
        p_hi = 1.0
    else:
        # P[X <= hits] falls with p; find where it drops to alpha/2
        p_hi = bisect(lambda p: -_binomial_lower_tail(hits, shots, p), 0.0, 1.0, -alpha / 2)
    return p_lo, p_hi


def _admissible_power(lo: float, hi: float, k: int) -> bool | None:
    """Half-plane membership of [(4k+2)lo, (4k+2)hi] via explicit windings."""
    scale = 4 * k + 2
    if scale * (hi - lo) > math.pi:
        return None
    s_lo, s_hi = scale * lo, scale * hi
    w = math.floor(s_lo / (2.0 * math.pi))
    if s_lo >= 2.0 * math.pi * w and s_hi <= 2.0 * math.pi * w + math.pi:
        return True
    w = math.floor((s_lo - math.pi) / (2.0 * math.pi))
    if s_lo >= 2.0 * math.pi * w + math.pi and s_hi <= 2.0 * math.pi * (w + 1):
        return False
    return None


def reference_largest_power(lo: float, hi: float) -> tuple[int, bool] | None:
    """Largest admissible power by scanning every candidate from zero up."""
    best: tuple[int, bool] | None = None
    limit = int(math.pi / (4.0 * (hi - lo))) + 1
    for k in range(0, limit + 1):
        flag = _admissible_power(lo, hi, k)
        if flag is not None:
            best = (k, flag)
    return best


def _rng() -> np.random.Generator:
    return np.random.default_rng(20240521)


def _check_unitarity() -> CheckResult:
    worst = 0.0
    for n in range(1, 5):
        for good in range(0, (1 << n) + 1):
            mat = probe_iterate(OracleSpec(n, good))
            eye = np.eye(2 << n)
            worst = max(worst, float(np.abs(mat @ mat.conj().T - eye).max()))
    return CheckResult(
        "iterate unitarity (probe matrix, n<=4, all good counts)",
        worst < 1e-10,
        f"max |QQ^H - I| = {worst:.3e}",
    )


def _check_dense_agreement() -> CheckResult:
    worst = 0.0
    for n in range(1, 5):
        for good in range(0, (1 << n) + 1):
            oracle = OracleSpec(n, good)
            worst = max(
                worst,
                float(np.abs(dense_iterate(oracle) - probe_iterate(oracle)).max()),
            )
    return CheckResult(
        "matrix-free iterate vs dense Kronecker build",
        worst < 1e-10,
        f"max elementwise gap = {worst:.3e}",
    )


def _check_preparation() -> CheckResult:
    worst = 0.0
    for n in range(1, 5):
        for good in range(0, (1 << n) + 1):
            oracle = OracleSpec(n, good)
            dense_state = dense_preparation(oracle)[:, 0]
            worst = max(
                worst, float(np.abs(dense_state - prepare_a(oracle).amps).max())
            )
    return CheckResult(
        "preparation state vs dense Kronecker build",
        worst < 1e-12,
        f"max amplitude gap = {worst:.3e}",
    )


def _check_rotation_identity() -> CheckResult:
    worst = 0.0
    for n in range(1, 7):
        for good in range(0, (1 << n) + 1):
            oracle = OracleSpec(n, good)
            for m in range(0, 9):
                state = prepare_a(oracle)
                apply_q_power(state, oracle, m)
                gap = abs(
                    flag_probability(state) - analytic_flag_probability(oracle, m)
                )
                worst = max(worst, gap)
    return CheckResult(
        "rotation identity sin^2((2m+1) theta) (n<=6, m<=8)",
        worst < 1e-9,
        f"max probability gap = {worst:.3e}",
    )


def _check_reflections_involutive() -> CheckResult:
    rng = _rng()
    worst = 0.0
    for n in (2, 3, 5):
        amps = rng.normal(size=2 << n) + 1j * rng.normal(size=2 << n)
        amps /= np.linalg.norm(amps)
        for op in (apply_s_chi, apply_s_0):
            state = Statevector(n, amps.copy())
            op(state)
            op(state)
            worst = max(worst, float(np.abs(state.amps - amps).max()))
    return CheckResult(
        "flag-phase and zero reflections are involutions",
        worst < 1e-12,
        f"max amplitude gap after double application = {worst:.3e}",
    )


def _check_binomial_confidence() -> CheckResult:
    cases = [
        (5, 10, 0.05),
        (0, 16, 0.05),
        (16, 16, 0.05),
        (1, 7, 0.2),
        (3, 30, 0.01),
        (27, 30, 0.10),
        (50, 100, 0.05),
    ]
    worst = 0.0
    for hits, shots, alpha in cases:
        got = binomial_confidence(hits, shots, alpha)
        want = reference_binomial_confidence(hits, shots, alpha)
        worst = max(worst, abs(got[0] - want[0]), abs(got[1] - want[1]))
    return CheckResult(
        "exact binomial interval vs direct tail-sum bisection",
        worst < 1e-9,
        f"max bound gap = {worst:.3e}",
    )


def _check_power_selection() -> CheckResult:
    intervals = [
        (0.361, 0.362),
        (0.10, 0.11),
        (0.785, 0.786),
        (1.2, 1.25),
        (0.0, 1.0),
        (0.5, 0.503),
    ]
    ok = True
    detail = "all scans agree"
    for lo, hi in intervals:
        got_k, got_flag = find_next_k(ConfidenceInterval(lo, hi), 0)
        want = reference_largest_power(lo, hi)
        if want is None or (got_k, got_flag) != want:
            ok = False
            detail = f"disagreement on [{lo}, {hi}]: got {(got_k, got_flag)}, want {want}"
            break
    return CheckResult("next-power search vs exhaustive scan", ok, detail)


def run_checks() -> list[CheckResult]:
    """Run the whole brute-force suite; order is stable for scripting."""
    return [
        _check_preparation(),
        _check_unitarity(),
        _check_dense_agreement(),
        _check_rotation_identity(),
        _check_reflections_involutive(),
        _check_binomial_confidence(),
        _check_power_selection(),
    ]
