"""Matrix-free statevector core for amplitude amplification.

The register holds ``n`` domain qubits plus one flag qubit.  Amplitudes live
in a flat complex array of length ``2**(n+1)`` indexed so that bit 0 is the
flag and bits 1..n are the domain index ``d``::

    index = (d << 1) | flag

State preparation loads the uniform superposition over the domain and raises
the flag exactly on a chosen "good" subset of indices, so the flag-1
probability equals ``a = |good| / 2**n``.  Writing ``theta = arcsin(sqrt(a))``,
each amplification iterate advances the flag-1 probability along the rotation

    sin^2(theta) -> sin^2(3*theta) -> ... -> sin^2((2m+1)*theta)

All operators are applied as O(2**(n+1)) passes over the amplitude array;
no gate matrices are ever materialized here (dense cross-checks live in
:mod:`qaelab.verify` and the test suite).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

__all__ = [
    "OracleSpec",
    "Statevector",
    "prepare_a",
    "apply_s_chi",
    "apply_s_0",
    "apply_q",
    "apply_q_power",
    "flag_probability",
    "analytic_flag_probability",
    "Backend",
    "StatevectorBackend",
    "AnalyticBackend",
    "make_backend",
    "measure_flag",
]


@dataclass(frozen=True)
class OracleSpec:
    """Membership oracle over an ``n``-qubit domain.

    Args:
        n: number of domain qubits; the domain is ``{0, ..., 2**n - 1}``.
        good_count: number of marked ("good") domain indices.
        good_set: the marked indices themselves.  Defaults to the first
            ``good_count`` indices ``{0, ..., good_count - 1}``.
    """

    n: int
    good_count: int
    good_set: frozenset[int] = None  # type: ignore[assignment]

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError(f"need at least one domain qubit, got n={self.n}")
        size = 1 << self.n
        if not 0 <= self.good_count <= size:
            raise ValueError(
                f"good_count={self.good_count} outside [0, {size}] for n={self.n}"
            )
        if self.good_set is None:
            object.__setattr__(self, "good_set", frozenset(range(self.good_count)))
        else:
            object.__setattr__(self, "good_set", frozenset(self.good_set))
        if len(self.good_set) != self.good_count:
            raise ValueError(
                f"good_set has {len(self.good_set)} elements, expected {self.good_count}"
            )
        for d in self.good_set:
            if not 0 <= d < size:
                raise ValueError(f"good index {d} outside the domain [0, {size})")

    @property
    def domain_size(self) -> int:
        return 1 << self.n

    @property
    def a(self) -> float:
        """Flag-1 probability right after state preparation."""
        return self.good_count / self.domain_size

    @property
    def theta(self) -> float:
        """Rotation angle ``arcsin(sqrt(a))`` in ``[0, pi/2]``."""
        return math.asin(min(1.0, math.sqrt(self.a)))


@dataclass
class Statevector:
    """Dense amplitudes over ``n`` domain qubits plus the flag (bit 0)."""

    n: int
    amps: np.ndarray

    def __post_init__(self) -> None:
        self.amps = np.asarray(self.amps, dtype=np.complex128)
        expected = 2 << self.n
        if self.amps.shape != (expected,):
            raise ValueError(
                f"amplitude array has shape {self.amps.shape}, expected ({expected},)"
            )

    @classmethod
    def basis(cls, n: int, index: int) -> "Statevector":
        """Computational basis state |index> on the full register."""
        amps = np.zeros(2 << n, dtype=np.complex128)
        amps[index] = 1.0
        return cls(n, amps)

    def copy(self) -> "Statevector":
        return Statevector(self.n, self.amps.copy())

    def norm_sq(self) -> float:
        return float(np.real(np.vdot(self.amps, self.amps)))


@lru_cache(maxsize=128)
def _marked_even_indices(oracle: OracleSpec) -> np.ndarray:
    """Flag-0 array positions ``d << 1`` of the good domain indices, sorted."""
    idx = np.fromiter((d << 1 for d in sorted(oracle.good_set)), dtype=np.intp,
                      count=oracle.good_count)
    return idx


def prepare_a(oracle: OracleSpec) -> Statevector:
    """Build the post-preparation state: uniform over the domain, flag set on good indices.

    Every domain index carries amplitude ``2**(-n/2)``; the flag qubit is 1
    exactly on ``oracle.good_set``, so ``flag_probability`` equals ``oracle.a``.
    """
    size = oracle.domain_size
    amps = np.zeros(2 * size, dtype=np.complex128)
    positions = np.arange(size, dtype=np.intp) << 1
    good = _marked_even_indices(oracle)
    if good.size:
        positions[good >> 1] |= 1
    amps[positions] = 1.0 / math.sqrt(size)
    return Statevector(oracle.n, amps)


def apply_s_chi(state: Statevector) -> Statevector:
    """Negate every flag-1 amplitude, in place."""
    state.amps[1::2] *= -1.0
    return state


def apply_s_0(state: Statevector) -> Statevector:
    """Reflect about the all-zeros basis state: only amplitude 0 changes sign."""
    state.amps[0] = -state.amps[0]
    return state


def _apply_mark(state: Statevector, oracle: OracleSpec) -> None:
    """Flip the flag bit on every good domain index (a self-inverse swap)."""
    even = _marked_even_indices(oracle)
    if even.size:
        a = state.amps
        tmp = a[even]  # fancy indexing copies
        a[even] = a[even + 1]
        a[even + 1] = tmp


def _apply_hadamard_domain(state: Statevector) -> None:
    """Hadamard on every domain qubit: a normalized Walsh transform over rows."""
    size = 1 << state.n
    table = state.amps.reshape(size, 2)
    h = 1
    while h < size:
        block = table.reshape(-1, 2 * h, 2)
        top = block[:, :h, :].copy()
        block[:, :h, :] = top + block[:, h:, :]
        block[:, h:, :] = top - block[:, h:, :]
        h <<= 1
    state.amps *= 2.0 ** (-0.5 * state.n)


def apply_q(state: Statevector, oracle: OracleSpec) -> Statevector:
    """One amplification iterate, in place.

    Factors act right to left: flag-phase flip, inverse preparation
    (un-mark then Hadamards), reflection about the all-zeros state,
    preparation (Hadamards then mark).
    """
    apply_s_chi(state)
    _apply_mark(state, oracle)
    _apply_hadamard_domain(state)
    apply_s_0(state)
    _apply_hadamard_domain(state)
    _apply_mark(state, oracle)
    return state


def apply_q_power(state: Statevector, oracle: OracleSpec, m: int) -> Statevector:
    """Apply the amplification iterate ``m`` times (``m = 0`` is a no-op)."""
    if m < 0:
        raise ValueError(f"power must be non-negative, got {m}")
    for _ in range(m):
        apply_q(state, oracle)
    return state


def flag_probability(state: Statevector) -> float:
    """Probability of reading 1 on the flag qubit."""
    odd = state.amps[1::2]
    return float(np.real(np.vdot(odd, odd)))


def analytic_flag_probability(oracle: OracleSpec, m: int) -> float:
    """Closed-form flag-1 probability after ``m`` iterates: ``sin^2((2m+1) theta)``."""
    if m < 0:
        raise ValueError(f"power must be non-negative, got {m}")
    return math.sin((2 * m + 1) * oracle.theta) ** 2


class Backend:
    """Source of the flag-1 probability for a given oracle and iterate power."""

    name = "abstract"

    def flag_probability(self, oracle: OracleSpec, m: int) -> float:
        raise NotImplementedError


class StatevectorBackend(Backend):
    """Runs the full register simulation and reads the probability off the state."""

    name = "sv"

    def flag_probability(self, oracle: OracleSpec, m: int) -> float:
        state = prepare_a(oracle)
        apply_q_power(state, oracle, m)
        return flag_probability(state)


class AnalyticBackend(Backend):
    """Uses the rotation closed form directly; no state is materialized."""

    name = "analytic"

    def flag_probability(self, oracle: OracleSpec, m: int) -> float:
        return analytic_flag_probability(oracle, m)


def make_backend(name: str) -> Backend:
    """Map a backend name ('sv'/'statevector' or 'analytic') to an instance."""
    if name in ("sv", "statevector"):
        return StatevectorBackend()
    if name == "analytic":
        return AnalyticBackend()
    raise ValueError(f"unknown backend {name!r}: expected 'sv' or 'analytic'")


def measure_flag(
    backend: Backend,
    oracle: OracleSpec,
    m: int,
    shots: int,
    rng: np.random.Generator,
) -> int:
    """Sample the number of flag-1 outcomes over ``shots`` runs of one circuit.

    The count is binomial with the backend's flag probability; a fixed
    generator state makes the draw reproducible.
    """
    if shots < 1:
        raise ValueError(f"shots must be positive, got {shots}")
    p = backend.flag_probability(oracle, m)
    p = min(1.0, max(0.0, p))
    return int(rng.binomial(shots, p))
