"""Closed-form decoding failure probability of random linear fountain codes.

With n received rows whose K coefficients are uniform on GF(q), the
probability that the n x K matrix is rank deficient is

    F = 1 - prod_{k=1..K} (1 - q**-(n - k + 1))

and F = 1 whenever n < K.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable


@dataclass(frozen=True)
class OverheadPoint:
    K: int
    n: int

    @property
    def epsilon(self) -> float:
        return self.n / self.K - 1

    @classmethod
    def from_epsilon(cls, K: int, epsilon: float) -> OverheadPoint:
        return cls(K, received_count(K, epsilon))


def received_count(K: int, epsilon: float) -> int:
    """Integer number of received symbols for overhead ``epsilon``."""
    return int(round(K * (1 + epsilon)))


def failure_rate(K: int, n: int, q: int) -> float:
    if K < 1:
        raise ValueError("K must be >= 1")
    if q < 2:
        raise ValueError("q must be >= 2")
    if n < K:
        return 1.0
    # log of the success probability, accumulated term by term
    log_success = math.fsum(math.log1p(-float(q) ** -(n - k + 1)) for k in range(1, K + 1))
    return -math.expm1(log_success)


def failure_curve(K: int, q: int, epsilon_grid: Iterable[float]) -> list[tuple[float, float]]:
    return [(eps, failure_rate(K, received_count(K, eps), q)) for eps in epsilon_grid]
