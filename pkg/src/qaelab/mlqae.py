"""Maximum-likelihood amplitude estimation over a ladder of amplified circuits.

One circuit is run per entry of a power schedule; the flag hit counts from
all circuits are combined into a joint Bernoulli log-likelihood in the
rotation angle, which is maximized by a coarse grid scan followed by
golden-section refinement.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import AnalyticBackend, Backend, OracleSpec, measure_flag

__all__ = [
    "Schedule",
    "eis_schedule",
    "lis_schedule",
    "oracle_call_count",
    "MeasurementRecord",
    "log_likelihood",
    "maximize_likelihood",
    "MlqaeReport",
    "run_mlqae",
]

GRID_POINTS = 100_000
#: probabilities are clamped at this floor inside logarithms so that hit
#: counts of 0 or N stay finite at the boundary angles
LIKELIHOOD_FLOOR = 1e-300
_REFINE_TOL = 1e-10
_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class Schedule:
    """Which powers of the amplification iterate to run.

    ``kind`` is ``"eis"`` (exponentially spaced) or ``"lis"`` (linearly
    spaced); ``depth`` is the number of amplified circuits beyond the
    zero-power one.
    """

    kind: str
    depth: int
    powers: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.kind not in ("eis", "lis"):
            raise ValueError(f"unknown schedule kind {self.kind!r}")
        if not self.powers or self.powers[0] != 0:
            raise ValueError("a schedule must start at power 0")
        for prev, cur in zip(self.powers, self.powers[1:]):
            if cur <= prev:
                raise ValueError(f"powers must increase strictly, got {self.powers}")


def eis_schedule(depth: int) -> Schedule:
    """Exponential ladder ``(0, 1, 2, 4, ..., 2**(depth-1))``."""
    if depth < 0:
        raise ValueError(f"depth must be non-negative, got {depth}")
    return Schedule("eis", depth, (0,) + tuple(2**j for j in range(depth)))


def lis_schedule(depth: int) -> Schedule:
    """Linear ladder ``(0, 1, 2, ..., depth)``."""
    if depth < 0:
        raise ValueError(f"depth must be non-negative, got {depth}")
    return Schedule("lis", depth, tuple(range(depth + 1)))


def oracle_call_count(schedule: Schedule, shots: int) -> int:
    """Total oracle queries: a power-m circuit costs ``2m + 1`` per shot."""
    return shots * sum(2 * m + 1 for m in schedule.powers)


@dataclass(frozen=True)
class MeasurementRecord:
    """Flag-1 hit count observed for one circuit of the schedule."""

    power: int
    shots: int
    hits: int

    def __post_init__(self) -> None:
        if self.power < 0:
            raise ValueError(f"power must be non-negative, got {self.power}")
        if self.shots < 1:
            raise ValueError(f"shots must be positive, got {self.shots}")
        if not 0 <= self.hits <= self.shots:
            raise ValueError(f"hits={self.hits} outside [0, {self.shots}]")


def log_likelihood(records, theta):
    """Joint log-likelihood of the records at rotation angle ``theta``.

    Accepts a scalar angle or an ndarray of angles; the return matches the
    input shape.  Each record with power ``m`` contributes

        hits * log(sin^2((2m+1) theta)) + (shots - hits) * log(cos^2((2m+1) theta))

    with both squared terms clamped below at ``LIKELIHOOD_FLOOR``.
    """
    angles = np.asarray(theta, dtype=float)
    total = np.zeros(angles.shape)
    for rec in records:
        c = 2 * rec.power + 1
        s2 = np.sin(c * angles) ** 2
        c2 = np.cos(c * angles) ** 2
        total = total + rec.hits * np.log(np.maximum(s2, LIKELIHOOD_FLOOR))
        total = total + (rec.shots - rec.hits) * np.log(np.maximum(c2, LIKELIHOOD_FLOOR))
    if np.ndim(theta) == 0:
        return float(total)
    return total


def _golden_max(f, lo: float, hi: float, tol: float) -> float:
    """Golden-section maximizer on [lo, hi] for a unimodal f."""
    x1 = hi - _INV_PHI * (hi - lo)
    x2 = lo + _INV_PHI * (hi - lo)
    f1, f2 = f(x1), f(x2)
    while hi - lo > tol:
        if f1 < f2:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + _INV_PHI * (hi - lo)
            f2 = f(x2)
        else:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - _INV_PHI * (hi - lo)
            f1 = f(x1)
    return 0.5 * (lo + hi)


def maximize_likelihood(records, grid_points: int = GRID_POINTS) -> float:
    """Angle in [0, pi/2] maximizing the joint log-likelihood.

    Stage one evaluates a uniform grid; stage two refines between the grid
    neighbours of the best point by golden section down to 1e-10.  Ties go
    to the smaller angle, and the result never scores below the best grid
    point.
    """
    if not records:
        raise ValueError("need at least one measurement record")
    grid = np.linspace(0.0, math.pi / 2, grid_points)
    values = log_likelihood(records, grid)
    best = int(np.argmax(values))  # first occurrence: smallest angle wins ties
    lo = float(grid[best - 1]) if best > 0 else float(grid[0])
    hi = float(grid[best + 1]) if best + 1 < grid_points else float(grid[-1])
    theta = _golden_max(lambda t: log_likelihood(records, t), lo, hi, _REFINE_TOL)
    coarse_theta = float(grid[best])
    coarse_value = float(values[best])
    refined_value = log_likelihood(records, theta)
    if refined_value < coarse_value or (refined_value == coarse_value and coarse_theta < theta):
        theta = coarse_theta
    return float(theta)


@dataclass(frozen=True)
class MlqaeReport:
    """Outcome of one maximum-likelihood estimation run."""

    theta_hat: float
    a_hat: float
    oracle_calls: int
    records: tuple[MeasurementRecord, ...]
    log_likelihood_at_max: float


def run_mlqae(
    oracle: OracleSpec,
    depth: int,
    shots: int,
    *,
    kind: str = "eis",
    backend: Backend | None = None,
    rng: np.random.Generator,
) -> MlqaeReport:
    """Run the schedule, collect hit counts, and maximize the joint likelihood.

    Args:
        oracle: the membership oracle fixing the true amplitude.
        depth: number of amplified circuits beyond the zero-power circuit.
        shots: measurement repetitions per circuit.
        kind: ``"eis"`` or ``"lis"`` power spacing.
        backend: probability source; defaults to the analytic closed form.
        rng: seeded generator used for every draw, in schedule order.
    """
    if kind == "eis":
        schedule = eis_schedule(depth)
    elif kind == "lis":
        schedule = lis_schedule(depth)
    else:
        raise ValueError(f"unknown schedule kind {kind!r}")
    if backend is None:
        backend = AnalyticBackend()
    records = tuple(
        MeasurementRecord(power, shots, measure_flag(backend, oracle, power, shots, rng))
        for power in schedule.powers
    )
    theta_hat = maximize_likelihood(records)
    return MlqaeReport(
        theta_hat=theta_hat,
        a_hat=math.sin(theta_hat) ** 2,
        oracle_calls=oracle_call_count(schedule, shots),
        records=records,
        log_likelihood_at_max=log_likelihood(records, theta_hat),
    )
