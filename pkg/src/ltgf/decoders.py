"""Erasure decoders: peeling (BP), Gaussian elimination, and the
square-matrix row-replacement variant used by the simulations."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import _kernels
from .codec import EncodedSymbol
from .gf import FieldSpec

SUCCESS = "success"
BP_STALL = "bp-stall"
SINGULAR = "singular"


@dataclass
class DecodeReport:
    status: str
    K: int
    resolved_count: int
    recovered: np.ndarray | None = None
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        if (self.status == SUCCESS) != (self.resolved_count == self.K):
            raise ValueError("status is success exactly when every symbol is resolved")

    @property
    def success(self) -> bool:
        return self.status == SUCCESS


@dataclass(frozen=True, eq=False)
class LinearSystem:
    """Dense rows over GF(q): ``coefficients`` is n x K, ``payloads`` n x L."""

    field: FieldSpec
    coefficients: np.ndarray
    payloads: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.coefficients, dtype=np.int64)
        b = np.asarray(self.payloads, dtype=np.int64)
        if b.ndim == 1:
            b = b[:, None]
        if a.ndim != 2 or b.ndim != 2 or a.shape[0] != b.shape[0]:
            raise ValueError("need an n x K coefficient matrix and n payload rows")
        object.__setattr__(self, "coefficients", a)
        object.__setattr__(self, "payloads", b)

    @property
    def K(self) -> int:
        return self.coefficients.shape[1]

    @classmethod
    def from_symbols(cls, symbols: Sequence[EncodedSymbol], K: int, field: FieldSpec) -> LinearSystem:
        _check_indices(symbols, K)
        rows = np.array([s.dense_row(K) for s in symbols], dtype=np.int64).reshape(len(symbols), K)
        L = len(symbols[0].payload) if symbols else 1
        return cls(field, rows, np.array([s.payload for s in symbols], dtype=np.int64).reshape(len(symbols), L))


def _check_indices(symbols: Iterable[EncodedSymbol], K: int) -> None:
    for s in symbols:
        if s.indices[-1] >= K or s.indices[0] < 0:
            raise ValueError(f"symbol references index outside [0, {K})")


def bp_decode(symbols: Sequence[EncodedSymbol], K: int, field: FieldSpec) -> DecodeReport:
    """Peel degree-one check nodes until everything is resolved or none remain."""
    _check_indices(symbols, K)
    f = field
    checks = []  # per check node: {index: coefficient}, payload list
    touching: list[set[int]] = [set() for _ in range(K)]
    for n, s in enumerate(symbols):
        checks.append([dict(zip(s.indices, s.coefficients)), list(s.payload)])
        for k, c in zip(s.indices, s.coefficients):
            if c:
                touching[k].add(n)
            else:
                del checks[-1][0][k]
    L = len(symbols[0].payload) if symbols else 1
    x: list[list[int] | None] = [None] * K
    ripple = [n for n, (edges, _) in enumerate(checks) if len(edges) == 1]
    rounds = 0
    while ripple:
        n = ripple.pop()
        edges, payload = checks[n]
        if len(edges) != 1:
            continue
        (k, c), = edges.items()
        rounds += 1
        value = [f.div(v, c) for v in payload]
        x[k] = value
        for m in touching[k]:
            e, y = checks[m]
            cm = e.pop(k)
            checks[m][1] = [f.sub(yi, f.mul(cm, vi)) for yi, vi in zip(y, value)]
            if len(e) == 1:
                ripple.append(m)
        touching[k].clear()
    resolved = sum(v is not None for v in x)
    if resolved == K:
        return DecodeReport(SUCCESS, K, K, np.array(x, dtype=np.int64).reshape(K, L), {"peel_rounds": rounds})
    return DecodeReport(BP_STALL, K, resolved, None, {"peel_rounds": rounds})


def ge_decode(system: LinearSystem, pivot: str = "first") -> DecodeReport:
    """Gaussian elimination with first-nonzero partial pivoting.

    ``pivot="last"`` takes the last eligible row instead; the verdict is a
    rank property and does not depend on this choice.
    """
    if pivot not in ("first", "last"):
        raise ValueError("pivot must be 'first' or 'last'")
    t = _kernels.field_tables(system.field.q)
    rank, X = _kernels.ge_solve(system.coefficients.astype(t.dtype), system.payloads.astype(t.dtype),
                                t.mul, t.neg, t.inv, t.mode, t.add, pivot == "last", False)
    K = system.K
    diag = {"pivot_count": int(rank), "rows": system.coefficients.shape[0]}
    if rank == K:
        return DecodeReport(SUCCESS, K, K, X.astype(np.int64), diag)
    return DecodeReport(SINGULAR, K, int(rank), None, diag)


def square_replace(rows: np.ndarray, K: int, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Keep the first K rows; each later row overwrites a uniformly chosen one.

    Works on any per-row array (coefficients, payloads stacked side by side).
    Returns the K-row result and the replaced positions in arrival order.
    """
    n = rows.shape[0]
    if n < K:
        raise ValueError(f"need at least K={K} rows, got {n}")
    out = rows[:K].copy()
    targets = rng.integers(0, K, size=n - K)
    for j, t in enumerate(targets):
        out[t] = rows[K + j]
    return out, targets


def ge_square_replace(stream: Iterable[EncodedSymbol], K: int, field: FieldSpec, n: int,
                      rng: np.random.Generator) -> DecodeReport:
    """Decode from ``n`` received symbols with the square-matrix shortcut.

    Not the information-optimal decode: rows overwritten by later arrivals
    are discarded. Use :func:`ge_decode` on all ``n`` rows for that.
    """
    if n < K:
        raise ValueError(f"n={n} must be >= K={K}")
    received = []
    for s in stream:
        received.append(s)
        if len(received) == n:
            break
    if len(received) < n:
        raise ValueError(f"stream ended after {len(received)} of {n} symbols")
    sysm = LinearSystem.from_symbols(received, K, field)
    stacked = np.hstack([sysm.coefficients, sysm.payloads])
    square, targets = square_replace(stacked, K, rng)
    report = ge_decode(LinearSystem(field, square[:, :K], square[:, K:]))
    report.diagnostics["replaced_rows"] = targets.tolist()
    return report


@dataclass
class Consistency:
    bp: DecodeReport
    ge: DecodeReport

    @property
    def consistent(self) -> bool:
        if not self.bp.success:
            return True
        return self.ge.success and np.array_equal(self.bp.recovered, self.ge.recovered)


def bp_implies_ge(symbols: Sequence[EncodedSymbol], K: int, field: FieldSpec) -> Consistency:
    """Run both decoders; BP success must imply GE success with equal output."""
    return Consistency(bp_decode(symbols, K, field), ge_decode(LinearSystem.from_symbols(symbols, K, field)))
