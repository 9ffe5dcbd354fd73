"""Degree distributions for LT-style fountain codes.

Four families are provided: the ideal soliton, Luby's robust soliton,
the fixed Raptor distribution, and a half-fixed/half-random distribution
whose eight tail degrees are redrawn uniformly from ``{3, ..., q}``.

Anything with a ``sample(rng, size)`` method returning an int array of
degrees can act as a degree source for the encoders.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Protocol

import numpy as np

PMF_TOL = 1e-9

# (degree, coefficient) of the Raptor output distribution, as printed.
RAPTOR_TERMS = (
    (1, 0.007969),
    (2, 0.493570),
    (3, 0.166220),
    (4, 0.072646),
    (5, 0.082558),
    (8, 0.056058),
    (9, 0.037229),
    (19, 0.055590),
    (65, 0.025023),
    (66, 0.003135),
)
RAPTOR_RAW_SUM = sum(c for _, c in RAPTOR_TERMS)
FIXED_HEAD = RAPTOR_TERMS[:2]
TAIL_COEFFICIENTS = tuple(c for _, c in RAPTOR_TERMS[2:])
TAIL_MODES = ("per-symbol", "per-session")


class DegreeSource(Protocol):
    def sample(self, rng: np.random.Generator, size: int | None = None): ...


@dataclass(frozen=True, eq=False)
class DegreePMF:
    """Probability mass over degrees in ``[1, K]`` with positive mass only."""

    K: int
    degrees: np.ndarray
    probs: np.ndarray
    _cdf: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        degrees = np.asarray(self.degrees, dtype=np.int64)
        probs = np.asarray(self.probs, dtype=float)
        if degrees.ndim != 1 or degrees.shape != probs.shape or degrees.size == 0:
            raise ValueError("degrees and probs must be equal-length non-empty 1-D arrays")
        if np.any(np.diff(degrees) <= 0):
            raise ValueError("degrees must be strictly increasing")
        if degrees[0] < 1 or degrees[-1] > self.K:
            raise ValueError(f"degrees must lie in [1, {self.K}]")
        if np.any(probs <= 0) or np.any(probs > 1):
            raise ValueError("probabilities must lie in (0, 1]")
        if abs(probs.sum() - 1.0) > PMF_TOL:
            raise ValueError(f"probabilities sum to {probs.sum()!r}, not 1")
        cdf = np.cumsum(probs)
        cdf[-1] = 1.0
        for name, arr in (("degrees", degrees), ("probs", probs), ("_cdf", cdf)):
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)

    @classmethod
    def from_weights(cls, K: int, weights: dict[int, float]) -> DegreePMF:
        """Normalise non-negative weights; zero-weight degrees are dropped."""
        items = sorted((d, w) for d, w in weights.items() if w > 0)
        total = math.fsum(w for _, w in items)
        return cls(K, np.array([d for d, _ in items]), np.array([w / total for _, w in items]))

    @property
    def entries(self) -> list[tuple[int, float]]:
        return [(int(d), float(p)) for d, p in zip(self.degrees, self.probs)]

    def as_dict(self) -> dict[int, float]:
        return dict(self.entries)

    def prob(self, d: int) -> float:
        i = np.searchsorted(self.degrees, d)
        if i < self.degrees.size and self.degrees[i] == d:
            return float(self.probs[i])
        return 0.0

    def mean(self) -> float:
        return float(self.degrees @ self.probs)

    def sample(self, rng: np.random.Generator, size: int | None = None):
        """Inverse-CDF sampling over the sorted support."""
        u = rng.random(size)
        return self.degrees[np.searchsorted(self._cdf, u, side="right")]


def sample_degree(pmf: DegreeSource, rng: np.random.Generator) -> int:
    return int(pmf.sample(rng))


def ideal_soliton(K: int) -> DegreePMF:
    if K < 1:
        raise ValueError("K must be >= 1")
    d = np.arange(1, K + 1)
    probs = np.empty(K)
    probs[0] = 1.0 / K
    probs[1:] = 1.0 / (d[1:] * (d[1:] - 1))
    return DegreePMF(K, d, probs)


@dataclass(frozen=True)
class RobustSolitonParams:
    K: int
    c: float
    delta: float

    def __post_init__(self):
        if self.K < 1:
            raise ValueError("K must be >= 1")
        if self.c <= 0:
            raise ValueError("c must be positive")
        if not 0 < self.delta < 1:
            raise ValueError("delta must lie in (0, 1)")

    @property
    def S(self) -> float:
        """Expected number of degree-one symbols."""
        return self.c * math.log(self.K / self.delta) * math.sqrt(self.K)

    @property
    def spike(self) -> int:
        """Position of the spike, ``round(K/S)`` clamped to ``[2, K]``."""
        return min(max(round(self.K / self.S), 2), self.K)


def robust_soliton_tau(params: RobustSolitonParams) -> np.ndarray:
    """Unnormalised spike term; element ``d-1`` holds tau(d) for d = 1..K."""
    K, S, spike = params.K, params.S, params.spike
    if spike < 2:
        raise ValueError(f"spike position must be >= 2 (K={K} too small)")
    if S < params.delta:
        raise ValueError(f"S={S:.4g} < delta gives a negative spike weight")
    tau = np.zeros(K)
    d = np.arange(1, spike)
    tau[: spike - 1] = S / K / d
    tau[spike - 1] = S / K * math.log(S / params.delta)
    return tau


def robust_soliton(params: RobustSolitonParams) -> DegreePMF:
    tau = robust_soliton_tau(params)
    rho = ideal_soliton(params.K).probs
    raw = rho + tau
    beta = math.fsum(raw)
    return DegreePMF(params.K, np.arange(1, params.K + 1), raw / beta)


def robust_soliton_beta(params: RobustSolitonParams) -> float:
    return math.fsum(ideal_soliton(params.K).probs + robust_soliton_tau(params))


def raptor_omega(K: int) -> DegreePMF:
    if K < 66:
        raise ValueError("the Raptor distribution needs K >= 66")
    return DegreePMF.from_weights(K, dict(RAPTOR_TERMS))


@dataclass(frozen=True)
class NovelTailRealization:
    """One draw of the eight tail degrees, each paired with its coefficient."""

    q: int
    tail_degrees: tuple[int, ...]

    def __post_init__(self):
        if len(self.tail_degrees) != len(TAIL_COEFFICIENTS):
            raise ValueError("need exactly eight tail degrees")
        if any(not 3 <= r <= self.q for r in self.tail_degrees):
            raise ValueError(f"tail degrees must lie in [3, {self.q}]")

    @property
    def assignments(self) -> list[tuple[float, int]]:
        return list(zip(TAIL_COEFFICIENTS, self.tail_degrees))

    def raw_weights(self) -> dict[int, float]:
        """Unnormalised mass, colliding tail degrees merged by summation."""
        w = dict(FIXED_HEAD)
        for coef, r in self.assignments:
            w[r] = w.get(r, 0.0) + coef
        return w

    def pmf(self, K: int) -> DegreePMF:
        return DegreePMF.from_weights(K, self.raw_weights())


def _check_novel(q: int, K: int) -> None:
    if q < 4:
        raise ValueError("the randomised-tail distribution needs q >= 4")
    if K < q:
        raise ValueError(f"K={K} must be >= q={q}")


def draw_tail(q: int, rng: np.random.Generator) -> NovelTailRealization:
    r = rng.integers(3, q + 1, size=len(TAIL_COEFFICIENTS))
    return NovelTailRealization(q, tuple(int(x) for x in r))


def novel_marginal(q: int, K: int) -> DegreePMF:
    """Per-symbol law: head kept, tail mass spread evenly over 3..q."""
    _check_novel(q, K)
    w = dict(FIXED_HEAD)
    share = math.fsum(TAIL_COEFFICIENTS) / (q - 2)
    for r in range(3, q + 1):
        w[r] = share
    return DegreePMF.from_weights(K, w)


@dataclass(frozen=True)
class NovelSampler:
    """Per-symbol degree source: fresh tail degrees for every encoded symbol.

    Only the tail degree attached to the selected term affects the output,
    so a symbol's degree is drawn by picking a term by its coefficient and,
    for a tail term, a uniform degree in ``3..q``. This has the same law as
    drawing all eight degrees and sampling the merged distribution.
    """

    q: int
    K: int

    def __post_init__(self):
        _check_novel(self.q, self.K)

    @property
    def tail_mode(self) -> str:
        return "per-symbol"

    def marginal(self) -> DegreePMF:
        return novel_marginal(self.q, self.K)

    def sample(self, rng: np.random.Generator, size: int | None = None):
        u = rng.random(size)
        r = rng.integers(3, self.q + 1, size=size)
        head = np.searchsorted(_HEAD_CDF, u, side="right")
        d = np.where(head == 0, 1, np.where(head == 1, 2, r))
        return d if size is not None else int(d)


_HEAD_CDF = np.cumsum([c / RAPTOR_RAW_SUM for _, c in FIXED_HEAD])


def novel_omega(q: int, K: int, mode: str = "per-symbol", rng: np.random.Generator | None = None):
    """Build the randomised-tail distribution.

    ``per-symbol`` returns a :class:`NovelSampler`. ``per-session`` draws the
    eight tail degrees once from ``rng`` and returns the merged DegreePMF.
    """
    _check_novel(q, K)
    if mode == "per-symbol":
        return NovelSampler(q, K)
    if mode == "per-session":
        if rng is None:
            raise ValueError("per-session mode needs a generator")
        return draw_tail(q, rng).pmf(K)
    raise ValueError(f"unknown tail mode {mode!r}; expected one of {TAIL_MODES}")
