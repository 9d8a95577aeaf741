"""Iterative amplitude estimation with exact binomial confidence intervals.

The estimator maintains a confidence interval for the rotation angle in
[0, pi/2].  Each round picks the largest amplification power whose scaled
interval still sits inside a single cosine half-plane, measures at that
power, converts an exact (Clopper-Pearson) interval for the flag probability
back to angles, and intersects.  Rounds at an unchanged power pool their
shots.  The loop stops once the induced amplitude interval is narrower than
twice the target precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import beta as _beta

from .core import AnalyticBackend, Backend, OracleSpec, measure_flag

__all__ = [
    "ConfidenceInterval",
    "find_next_k",
    "binomial_confidence",
    "invert_to_theta",
    "RoundRecord",
    "IqaeReport",
    "IterationCapError",
    "max_rounds",
    "run_iqae",
]

_TWO_PI = 2.0 * math.pi
_HALF_PI = 0.5 * math.pi
#: the round cap is this multiple of the nominal round budget
CAP_MULTIPLIER = 10


@dataclass(frozen=True)
class ConfidenceInterval:
    """Closed angle interval inside [0, pi/2]."""

    theta_lo: float
    theta_hi: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.theta_lo <= self.theta_hi <= _HALF_PI:
            raise ValueError(
                f"bad interval [{self.theta_lo}, {self.theta_hi}]: "
                "need 0 <= lo <= hi <= pi/2"
            )

    @property
    def width(self) -> float:
        return self.theta_hi - self.theta_lo

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.theta_lo + self.theta_hi)

    def intersect(self, other: "ConfidenceInterval") -> "ConfidenceInterval":
        """Intersection with ``other``, collapsed onto the nearest edge of
        ``self`` when the two are disjoint (the result is never empty and
        never leaves ``self``)."""
        lo = min(max(other.theta_lo, self.theta_lo), self.theta_hi)
        hi = max(min(other.theta_hi, self.theta_hi), self.theta_lo)
        return ConfidenceInterval(lo, hi)


def _half_plane(interval: ConfidenceInterval, k: int) -> bool | None:
    """True/False if the scaled interval sits in an upper/lower cosine
    half-plane mod 2*pi, None if it straddles a boundary."""
    scale = 4 * k + 2
    r_lo = (scale * interval.theta_lo) % _TWO_PI
    r_hi = (scale * interval.theta_hi) % _TWO_PI
    if r_lo <= r_hi <= math.pi:
        return True
    if math.pi <= r_lo <= r_hi:
        return False
    return None


def _half_plane_of_midpoint(interval: ConfidenceInterval, k: int) -> bool:
    return ((4 * k + 2) * interval.midpoint) % _TWO_PI <= math.pi


def find_next_k(
    interval: ConfidenceInterval, k_current: int, ratio: int = 2
) -> tuple[int, bool]:
    """Largest admissible amplification power for the next round.

    A power ``k`` is admissible when the scaled interval
    ``[(4k+2) theta_lo, (4k+2) theta_hi]`` spans at most pi and sits inside
    one cosine half-plane mod 2*pi.  The largest admissible power is
    returned only if it reaches ``ratio * k_current``; otherwise the
    current power is kept, with its half-plane recomputed from the interval
    midpoint (valid because intervals only ever shrink).

    Returns:
        ``(k, upper)`` where ``upper`` says the scaled interval lies in
        ``[0, pi]`` mod 2*pi.
    """
    if k_current < 0:
        raise ValueError(f"current power must be non-negative, got {k_current}")
    if ratio < 2:
        raise ValueError(f"growth ratio must be at least 2, got {ratio}")
    width = interval.width
    if width > 0.0:
        # largest k with (4k+2) * width <= pi
        k_cap = int((math.pi / width - 2.0) / 4.0)
        lowest = ratio * k_current if k_current >= 1 else 0
        for k in range(k_cap, lowest - 1, -1):
            flag = _half_plane(interval, k)
            if flag is not None:
                return k, flag
    return k_current, _half_plane_of_midpoint(interval, k_current)


def binomial_confidence(hits: int, shots: int, alpha: float) -> tuple[float, float]:
    """Exact two-sided binomial confidence interval (Clopper-Pearson).

    Bounds come from Beta quantiles: the lower bound is the alpha/2 quantile
    of Beta(hits, shots - hits + 1) (0 when hits == 0), the upper the
    1 - alpha/2 quantile of Beta(hits + 1, shots - hits) (1 when
    hits == shots).  Always contains hits/shots.
    """
    if shots < 1:
        raise ValueError(f"shots must be positive, got {shots}")
    if not 0 <= hits <= shots:
        raise ValueError(f"hits={hits} outside [0, {shots}]")
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must be in (0, 1), got {alpha}")
    if hits == 0:
        p_lo = 0.0
    else:
        p_lo = float(_beta.ppf(alpha / 2.0, hits, shots - hits + 1))
    if hits == shots:
        p_hi = 1.0
    else:
        p_hi = float(_beta.ppf(1.0 - alpha / 2.0, hits + 1, shots - hits))
    return p_lo, p_hi


def invert_to_theta(
    p_lo: float,
    p_hi: float,
    k: int,
    upper_half_plane: bool,
    winding: int = 0,
) -> ConfidenceInterval:
    """Map a flag-probability interval back to angles at amplification power ``k``.

    With ``phi = (4k+2) theta`` the probability is ``p = (1 - cos(phi)) / 2``.
    The half-plane flag fixes the cosine branch and the caller-tracked
    winding number restores the lost multiple of 2*pi before dividing the
    scaling out.  Results are clipped into [0, pi/2].
    """
    if not 0.0 <= p_lo <= p_hi <= 1.0:
        raise ValueError(f"bad probability interval [{p_lo}, {p_hi}]")
    if winding < 0:
        raise ValueError(f"winding must be non-negative, got {winding}")
    scale = 4 * k + 2
    lo_arc = math.acos(max(-1.0, min(1.0, 1.0 - 2.0 * p_lo)))
    hi_arc = math.acos(max(-1.0, min(1.0, 1.0 - 2.0 * p_hi)))
    if upper_half_plane:
        scaled_lo, scaled_hi = lo_arc, hi_arc
    else:
        scaled_lo, scaled_hi = _TWO_PI - hi_arc, _TWO_PI - lo_arc
    base = _TWO_PI * winding
    theta_lo = (base + scaled_lo) / scale
    theta_hi = (base + scaled_hi) / scale
    return ConfidenceInterval(
        max(0.0, min(theta_lo, _HALF_PI)),
        max(0.0, min(theta_hi, _HALF_PI)),
    )


@dataclass(frozen=True)
class RoundRecord:
    """State after one measurement round."""

    k: int
    upper_half_plane: bool
    shots: int  # pooled shots at this power, including this round
    hits: int  # pooled hits at this power
    interval_after: ConfidenceInterval


@dataclass(frozen=True)
class IqaeReport:
    """Outcome of one iterative estimation run."""

    a_hat: float
    a_lo: float
    a_hi: float
    oracle_calls: int
    rounds: tuple[RoundRecord, ...]
    epsilon: float
    alpha: float


class IterationCapError(RuntimeError):
    """Round cap reached before the target width; the partial report is attached."""

    def __init__(self, report: IqaeReport):
        self.report = report
        super().__init__(
            f"interval still {report.a_hi - report.a_lo:.3g} wide after "
            f"{len(report.rounds)} rounds (target 2*epsilon = {2 * report.epsilon:.3g})"
        )


def max_rounds(epsilon: float) -> int:
    """Nominal round budget ``ceil(log2(pi / (8 epsilon))) + 1``."""
    if not 0.0 < epsilon < 0.5:
        raise ValueError(f"epsilon must be in (0, 0.5), got {epsilon}")
    return math.ceil(math.log2(math.pi / (8.0 * epsilon))) + 1


def _report(
    interval: ConfidenceInterval,
    calls: int,
    rounds: list[RoundRecord],
    epsilon: float,
    alpha: float,
) -> IqaeReport:
    return IqaeReport(
        a_hat=math.sin(interval.midpoint) ** 2,
        a_lo=math.sin(interval.theta_lo) ** 2,
        a_hi=math.sin(interval.theta_hi) ** 2,
        oracle_calls=calls,
        rounds=tuple(rounds),
        epsilon=epsilon,
        alpha=alpha,
    )


def run_iqae(
    oracle: OracleSpec,
    epsilon: float,
    alpha: float,
    shots: int,
    *,
    backend: Backend | None = None,
    rng: np.random.Generator,
    ratio: int = 2,
) -> IqaeReport:
    """Iteratively narrow a confidence interval for the amplitude.

    Args:
        oracle: the membership oracle fixing the true amplitude.
        epsilon: target half-width for the final amplitude interval.
        alpha: overall confidence budget; each round spends
            ``alpha / max_rounds(epsilon)`` (union bound).
        shots: measurement repetitions per round (pooled while the power
            stays unchanged).
        backend: probability source; defaults to the analytic closed form.
        rng: seeded generator used for every draw, in round order.
        ratio: minimum power growth factor between accepted powers.

    Raises:
        IterationCapError: after ``10 * max_rounds(epsilon)`` rounds without
            reaching the target width.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must be in (0, 1), got {alpha}")
    if shots < 1:
        raise ValueError(f"shots must be positive, got {shots}")
    budget = max_rounds(epsilon)
    alpha_round = alpha / budget
    cap = CAP_MULTIPLIER * budget
    interval = ConfidenceInterval(0.0, _HALF_PI)
    k = 0
    pooled_shots = 0
    pooled_hits = 0
    calls = 0
    rounds: list[RoundRecord] = []
    if backend is None:
        backend = AnalyticBackend()
    while True:
        a_lo = math.sin(interval.theta_lo) ** 2
        a_hi = math.sin(interval.theta_hi) ** 2
        if a_hi - a_lo <= 2.0 * epsilon:
            break
        if len(rounds) >= cap:
            raise IterationCapError(_report(interval, calls, rounds, epsilon, alpha))
        k_next, upper = find_next_k(interval, k, ratio)
        if k_next != k:
            pooled_shots = 0
            pooled_hits = 0
            k = k_next
        hits = measure_flag(backend, oracle, k, shots, rng)
        calls += shots * (2 * k + 1)
        pooled_shots += shots
        pooled_hits += hits
        p_lo, p_hi = binomial_confidence(pooled_hits, pooled_shots, alpha_round)
        winding = math.floor((4 * k + 2) * interval.midpoint / _TWO_PI)
        contribution = invert_to_theta(p_lo, p_hi, k, upper, winding)
        interval = interval.intersect(contribution)
        rounds.append(RoundRecord(k, upper, pooled_shots, pooled_hits, interval))
    return _report(interval, calls, rounds, epsilon, alpha)
