"""Monte Carlo failure-rate experiments over (distribution, q, overhead) grids.

Each trial owns a generator seeded from ``(seed, distribution, q, n,
trial_index)``, so results do not depend on trial order or on how trials
are split across worker processes.
"""

from __future__ import annotations

import csv
import logging
import math
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields
from typing import Iterable, Sequence

import numpy as np

from . import _kernels
from .analytic import failure_rate, received_count
from .codec import lt_matrix, random_linear_matrix
from .degree import TAIL_MODES, RobustSolitonParams, novel_omega, raptor_omega, robust_soliton
from .decoders import square_replace
from .gf import FieldError, factor_prime_power

log = logging.getLogger(__name__)

DECODE_MODES = ("square-replace", "rectangular")
DEFAULT_EPSILONS = (0.0, 0.01, 0.02, 0.03, 0.04, 0.05)
CI_TRIALS = 1000


class ConfigError(ValueError):
    pass


class IntegrityError(RuntimeError):
    """A decode reported success but recovered the wrong symbols."""


@dataclass(frozen=True)
class Distribution:
    kind: str  # robust | raptor | novel | random-linear
    c: float = 0.05
    delta: float = 0.01

    @property
    def label(self) -> str:
        if self.kind == "robust":
            return f"robust-soliton-c{self.c:g}-d{self.delta:g}"
        return self.kind

    def degree_source(self, K: int, q: int, tail_mode: str):
        if self.kind == "robust":
            return robust_soliton(RobustSolitonParams(K, self.c, self.delta))
        if self.kind == "raptor":
            return raptor_omega(K)
        if self.kind == "novel" and tail_mode == "per-symbol":
            return novel_omega(q, K, "per-symbol")
        return None


def parse_distributions(tokens: Iterable[str], c: float = 0.05,
                        deltas: Sequence[float] = (0.01, 0.001)) -> list[Distribution]:
    """``robust`` expands to one entry per delta; ``robust:0.01`` picks one."""
    out = []
    for tok in tokens:
        tok = tok.strip()
        if tok == "robust":
            out.extend(Distribution("robust", c, d) for d in deltas)
        elif tok.startswith("robust:"):
            out.append(Distribution("robust", c, float(tok.split(":", 1)[1])))
        elif tok in ("raptor", "novel", "random-linear"):
            out.append(Distribution(tok))
        else:
            raise ConfigError(f"unknown distribution {tok!r}")
    return out


@dataclass
class ExperimentConfig:
    K: int = 100
    q_list: tuple[int, ...] = (4, 8, 16, 32)
    distributions: tuple[str, ...] = ("robust", "raptor", "novel")
    c: float = 0.05
    deltas: tuple[float, ...] = (0.01, 0.001)
    epsilon_grid: tuple[float, ...] = DEFAULT_EPSILONS
    trials: int = 10000
    seed: int = 0
    decode_mode: str = "square-replace"
    tail_mode: str = "per-symbol"
    workers: int = 1

    def expanded(self) -> list[Distribution]:
        return parse_distributions(self.distributions, self.c, self.deltas)

    def validate(self) -> None:
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if self.K < 1:
            raise ConfigError("K must be >= 1")
        if self.seed < 0:
            raise ConfigError("seed must be non-negative")
        if any(e < 0 for e in self.epsilon_grid):
            raise ConfigError("overheads must be non-negative")
        if self.decode_mode not in DECODE_MODES:
            raise ConfigError(f"decode mode must be one of {DECODE_MODES}")
        if self.tail_mode not in TAIL_MODES:
            raise ConfigError(f"tail mode must be one of {TAIL_MODES}")
        for q in self.q_list:
            try:
                factor_prime_power(q)
            except FieldError as e:
                raise ConfigError(str(e)) from None
        for dist in self.expanded():
            if dist.kind == "robust":
                try:
                    RobustSolitonParams(self.K, dist.c, dist.delta)
                except ValueError as e:
                    raise ConfigError(str(e)) from None
            if dist.kind == "raptor" and self.K < 66:
                raise ConfigError("the Raptor distribution needs K >= 66")
            if dist.kind == "novel":
                if min(self.q_list) < 4:
                    raise ConfigError("the randomised-tail distribution needs q >= 4")
                if self.K < max(self.q_list):
                    raise ConfigError("the randomised-tail distribution needs K >= q")


@dataclass
class ResultRow:
    distribution: str
    q: int
    K: int
    epsilon: float
    n: int
    trials: int
    failures: int
    failure_rate: float
    std_err: float
    decode_mode: str
    seed: int | str
    tail_mode: str

    @classmethod
    def from_counts(cls, distribution, q, K, epsilon, n, trials, failures, decode_mode, seed, tail_mode):
        p = failures / trials
        return cls(distribution, q, K, epsilon, n, trials, failures, p,
                   math.sqrt(p * (1 - p) / trials), decode_mode, seed, tail_mode)


COLUMNS = tuple(f.name for f in fields(ResultRow))


@dataclass(frozen=True)
class Slice:
    """Everything a worker needs to run trials of one grid point."""

    dist: Distribution
    q: int
    K: int
    n: int
    seed: int
    decode_mode: str
    tail_mode: str
    symbol_len: int = 1


@dataclass
class TrialOutcome:
    failed: bool
    mismatches: int = 0
    rank: int = 0


def trial_rng(seed: int, label: str, q: int, n: int, trial_index: int) -> np.random.Generator:
    key = [seed, zlib.crc32(label.encode()), q, n, trial_index]
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(key)))


def run_trial(sl: Slice, trial_index: int, degrees=None) -> TrialOutcome:
    """Encode ``n`` symbols of a fresh source block and decode them by GE.

    ``degrees`` may carry a prebuilt degree source for ``sl``; it is
    rebuilt when omitted.
    """
    K, q, n = sl.K, sl.q, sl.n
    if degrees is None and sl.dist.kind != "random-linear":
        degrees = sl.dist.degree_source(K, q, sl.tail_mode)
    rng = trial_rng(sl.seed, sl.dist.label, q, n, trial_index)
    t = _kernels.field_tables(q)
    source = rng.integers(0, q, size=(K, sl.symbol_len)).astype(t.dtype)
    if sl.dist.kind == "random-linear":
        rows = random_linear_matrix(K, q, n, rng)
    else:
        if degrees is None:  # per-session randomised tail: one law per code instance
            degrees = novel_omega(q, K, "per-session", rng)
        rows = lt_matrix(K, q, n, degrees, rng)
    payloads = _kernels.matvec(rows, source, t.mul, t.mode, t.add)
    if sl.decode_mode == "square-replace" and n > K:
        stacked, _ = square_replace(np.hstack([rows, payloads]), K, rng)
        rows, payloads = stacked[:, :K], stacked[:, K:]
    rank, X = _kernels.ge_solve(rows, payloads, t.mul, t.neg, t.inv, t.mode, t.add, False, True)
    if rank < K:
        return TrialOutcome(True, 0, int(rank))
    return TrialOutcome(False, int(np.count_nonzero(X != source)), int(rank))


def _run_chunk(args) -> tuple[int, int]:
    sl, start, stop = args
    degrees = None
    if sl.dist.kind != "random-linear":
        degrees = sl.dist.degree_source(sl.K, sl.q, sl.tail_mode)
    failures = mismatches = 0
    for t in range(start, stop):
        out = run_trial(sl, t, degrees)
        failures += out.failed
        mismatches += out.mismatches
    return failures, mismatches


def _chunks(trials: int, parts: int) -> list[tuple[int, int]]:
    step = max(1, math.ceil(trials / parts))
    return [(a, min(a + step, trials)) for a in range(0, trials, step)]


def run_experiment(config: ExperimentConfig) -> list[ResultRow]:
    """Run the full grid; rows ordered by distribution, then q, then overhead."""
    config.validate()
    slices = []
    for dist in config.expanded():
        for q in config.q_list:
            for eps in config.epsilon_grid:
                n = received_count(config.K, eps)
                slices.append((eps, Slice(dist, q, config.K, n, config.seed,
                                          config.decode_mode, config.tail_mode)))

    jobs = []
    parts = max(1, config.workers)
    for i, (_, sl) in enumerate(slices):
        for a, b in _chunks(config.trials, parts):
            jobs.append((i, (sl, a, b)))

    if config.workers > 1:
        with ProcessPoolExecutor(config.workers) as pool:
            results = list(pool.map(_run_chunk, [j for _, j in jobs]))
    else:
        results = [_run_chunk(j) for _, j in jobs]

    failures = [0] * len(slices)
    mismatches = [0] * len(slices)
    for (i, _), (f, m) in zip(jobs, results):
        failures[i] += f
        mismatches[i] += m

    rows = []
    for (eps, sl), f, m in zip(slices, failures, mismatches):
        if m:
            raise IntegrityError(f"{m} mismatched symbols after successful decodes at "
                                 f"{sl.dist.label}, q={sl.q}, n={sl.n}")
        tail = config.tail_mode if sl.dist.kind == "novel" else ""
        rows.append(ResultRow.from_counts(sl.dist.label, sl.q, sl.K, eps, sl.n, config.trials, f,
                                          config.decode_mode, config.seed, tail))
        log.info("%s q=%d n=%d: %d/%d failures", sl.dist.label, sl.q, sl.n, f, config.trials)
    return rows


def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.6g}"
    return str(v)


def write_csv(rows: Sequence[ResultRow], destination) -> None:
    with open(destination, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(COLUMNS)
        for r in rows:
            w.writerow([_fmt(getattr(r, c)) for c in COLUMNS])


_INT_COLUMNS = {"q", "K", "n", "trials", "failures"}
_FLOAT_COLUMNS = {"epsilon", "failure_rate", "std_err"}


def read_csv(source) -> list[ResultRow]:
    rows = []
    with open(source, newline="") as fh:
        for rec in csv.DictReader(fh):
            vals = {}
            for c in COLUMNS:
                v = rec[c]
                if c in _INT_COLUMNS:
                    vals[c] = int(v)
                elif c in _FLOAT_COLUMNS:
                    vals[c] = float(v)
                elif c == "seed":
                    vals[c] = int(v) if v.lstrip("-").isdigit() else v
                else:
                    vals[c] = v
            rows.append(ResultRow(**vals))
    return rows


def epsilon_grid(eps_max: float, eps_step: float) -> tuple[float, ...]:
    if eps_step <= 0 or eps_max < 0:
        raise ConfigError("need eps-max >= 0 and eps-step > 0")
    count = int(math.floor(eps_max / eps_step + 1e-9)) + 1
    return tuple(round(i * eps_step, 10) for i in range(count))


def analytic_rows(K: int, q_list: Sequence[int], grid: Sequence[float]) -> list[ResultRow]:
    """Closed-form random-linear failure rates in the simulator's row schema."""
    rows = []
    for q in q_list:
        for eps in grid:
            n = received_count(K, eps)
            rows.append(ResultRow("random-linear-analytic", q, K, eps, n, 0, 0,
                                  failure_rate(K, n, q), 0.0, "analytic", "", ""))
    return rows
