"""Sample-complexity and greedy-optimality bounds.

All minimal-``L`` solvers exploit that the finite-population left-hand side
``L (W - L) / (W - 1)`` is concave in ``L`` and peaks at ``W / 2``: if the peak
fails the inequality the query is infeasible, otherwise a binary search over
``[1, W/2]`` finds the smallest ``L`` that satisfies it.  Comparisons are done
in exact rational arithmetic so that 90-digit sequence-space sizes are safe.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .enumeration import count_sequences


@dataclass(frozen=True)
class BoundQuery:
    omega_size: int
    epsilon: float
    delta: float
    r_sigma: float | None = None

    def __post_init__(self):
        if int(self.omega_size) != self.omega_size or self.omega_size < 2:
            raise ValueError("omega_size must be an integer >= 2")
        if not self.epsilon > 0:
            raise ValueError("epsilon must be > 0")
        if not 0 < self.delta < 1:
            raise ValueError("delta must lie in (0, 1)")
        if self.r_sigma is not None and not self.r_sigma > 0:
            raise ValueError("r_sigma must be > 0 when given")
        object.__setattr__(self, "omega_size", int(self.omega_size))

    @classmethod
    def from_classes(cls, n_classes: int, n_tasks: int, epsilon: float, delta: float,
                     r_sigma: float | None = None) -> "BoundQuery":
        return cls(count_sequences(n_classes, n_tasks), epsilon, delta, r_sigma)


@dataclass(frozen=True)
class BoundReport:
    formula_id: str
    required_L: int | None
    lhs_max: float
    rhs: float
    extra: dict = field(default_factory=dict)

    @property
    def feasible(self) -> bool:
        return self.required_L is not None

    def as_dict(self) -> dict:
        return {"formula": self.formula_id,
                "required_L": self.required_L if self.feasible else "INFEASIBLE",
                # the approximate formula has no finite-population peak
                "lhs_max": self.lhs_max if math.isfinite(self.lhs_max) else None,
                "rhs": self.rhs, **self.extra}


def _min_L(pool: int, denom: int, rhs: float) -> tuple[int | None, float]:
    """Smallest integer L >= 1 with ``L (pool - L) / denom >= rhs``; None if none exists."""
    target = Fraction(rhs) * denom
    peak = pool // 2
    if peak < 1:
        return None, 0.0
    lhs_max = float(Fraction(peak * (pool - peak), denom))
    if peak * (pool - peak) < target:
        return None, lhs_max
    lo, hi = 1, peak
    while lo < hi:
        mid = (lo + hi) // 2
        if mid * (pool - mid) >= target:
            hi = mid
        else:
            lo = mid + 1
    return lo, lhs_max


def rs_lhs(L: int, omega: int) -> Fraction:
    return Fraction(L * (omega - L), omega - 1)


def edge_lhs(L: int, omega: int) -> Fraction:
    return Fraction(L * (omega - 2 - L), omega - 3)


def rs_rhs(omega: int, epsilon: float, delta: float) -> float:
    # math.log is exact-to-double for arbitrarily large Python ints
    return (math.log(2) + math.log(omega) - math.log(delta)) / (2 * epsilon**2)


def edge_rhs(omega: int, epsilon: float, delta: float, r_sigma: float) -> float:
    return (math.log(2) + math.log(omega - 2) - math.log(delta)) * r_sigma**2 / (2 * epsilon**2)


def min_samples_rs(q: BoundQuery) -> BoundReport:
    """Random sampling without replacement: ``L (W-L)/(W-1) >= ln(2W/delta) / (2 eps^2)``."""
    if q.r_sigma is not None:
        raise ValueError("min_samples_rs takes no r_sigma; use min_samples_edge")
    rhs = rs_rhs(q.omega_size, q.epsilon, q.delta)
    L, lhs_max = _min_L(q.omega_size, q.omega_size - 1, rhs)
    return BoundReport("thm1", L, lhs_max, rhs, {"omega_size": q.omega_size})


def with_replacement_samples(omega: int, epsilon: float, delta: float) -> int:
    return math.ceil(rs_rhs(omega, epsilon, delta))


def min_samples_rs_approx(n_classes: int, epsilon: float, delta: float) -> BoundReport:
    """``ceil((N ln(N/e) + ln(2/delta)) / (2 eps^2))``."""
    if n_classes < 3:
        raise ValueError("the approximation needs N >= 3")
    if not epsilon > 0 or not 0 < delta < 1:
        raise ValueError("need epsilon > 0 and 0 < delta < 1")
    rhs = (n_classes * (math.log(n_classes) - 1) + math.log(2 / delta)) / (2 * epsilon**2)
    return BoundReport("remark2", math.ceil(rhs), math.inf, rhs, {"n_classes": n_classes})


def min_samples_edge(q: BoundQuery) -> BoundReport:
    """Extreme-assisted sampling: ``L (W-2-L)/(W-3) >= ln(2(W-2)/delta) R^2 / (2 eps^2)``.

    The reported ``total_cost`` adds the two extreme sequences.
    """
    if q.r_sigma is None:
        raise ValueError("min_samples_edge needs r_sigma")
    if q.omega_size < 4:
        raise ValueError("extreme-assisted bound needs |Omega| >= 4")
    rhs = edge_rhs(q.omega_size, q.epsilon, q.delta, q.r_sigma)
    L, lhs_max = _min_L(q.omega_size - 2, q.omega_size - 3, rhs)
    extra = {"omega_size": q.omega_size, "r_sigma": q.r_sigma,
             "total_cost": None if L is None else L + 2}
    return BoundReport("thm2", L, lhs_max, rhs, extra)


def extreme_miss_probability(tail_fraction: float, n_samples: float) -> float:
    """Chance that ``L`` uniform draws all miss a tail holding ``tail_fraction`` of the space."""
    if not 0 <= tail_fraction <= 1:
        raise ValueError("tail_fraction must lie in [0, 1]")
    if n_samples < 0:
        raise ValueError("L must be >= 0")
    return math.exp(-tail_fraction * n_samples)


@dataclass(frozen=True)
class GreedyBound:
    expected_random_score: float
    delta_gap: float
    high_prob_guarantee: float
    threshold: float
    threshold_ok: bool

    def as_dict(self) -> dict:
        return {"formula": "greedy", "expected_random_score": self.expected_random_score,
                "delta_gap": self.delta_gap, "high_prob_guarantee": self.high_prob_guarantee,
                "threshold": self.threshold, "threshold_ok": self.threshold_ok}


def greedy_bound(n_classes: int, n_tasks: int, s_bar: float, upper: float) -> GreedyBound:
    """Closed forms of the greedy optimality bound.

    Requires ``0 <= s_bar <= upper`` and ``upper > 0``; similarities that can go
    negative must be shifted by the caller first.
    """
    n, k = n_classes, n_tasks
    if k < 2:
        raise ValueError("greedy bound needs K >= 2")
    if s_bar < 0 or upper < 0:
        raise ValueError("s_bar and U must be non-negative")
    if upper == 0 or s_bar > upper:
        raise ValueError("need U > 0 and s_bar <= U")
    scale = n**2 * (k - 1) / (2 * k**2)
    expected = scale * s_bar
    gap = expected - 2 * n * (math.log(k) + 1) / (k - 1) * upper
    threshold = 4 * k**2 * (math.log(k) + 1) / (n * (k - 1) ** 2) * upper
    return GreedyBound(expected, gap, 1 - math.exp(-k / 2), threshold, s_bar >= threshold)
