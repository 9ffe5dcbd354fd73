"""Fountain encoders over GF(q): LT and dense random linear."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

import numpy as np

from . import _kernels
from .degree import DegreeSource
from .gf import FieldSpec


@dataclass(frozen=True, eq=False)
class SourceBlock:
    """K source symbols, each ``symbol_len`` field elements long."""

    field: FieldSpec
    symbols: np.ndarray

    def __post_init__(self):
        s = np.array(self.symbols, dtype=np.int64)
        if s.ndim == 1:
            s = s[:, None]
        if s.ndim != 2 or s.shape[0] < 1 or s.shape[1] < 1:
            raise ValueError("symbols must be a non-empty K x symbol_len array")
        if s.min() < 0 or s.max() >= self.field.q:
            raise ValueError(f"symbol values must lie in [0, {self.field.q})")
        s.flags.writeable = False
        object.__setattr__(self, "symbols", s)

    @property
    def K(self) -> int:
        return self.symbols.shape[0]

    @property
    def symbol_len(self) -> int:
        return self.symbols.shape[1]

    @classmethod
    def random(cls, field: FieldSpec, K: int, rng: np.random.Generator, symbol_len: int = 1):
        return cls(field, rng.integers(0, field.q, size=(K, symbol_len)))


@dataclass(frozen=True)
class EncodedSymbol:
    indices: tuple[int, ...]
    coefficients: tuple[int, ...]
    payload: tuple[int, ...]

    def __post_init__(self):
        if len(self.indices) != len(self.coefficients) or not self.indices:
            raise ValueError("indices and coefficients must be non-empty and of equal length")
        if any(b <= a for a, b in zip(self.indices, self.indices[1:])):
            raise ValueError("indices must be strictly increasing")

    @property
    def degree(self) -> int:
        return len(self.indices)

    def dense_row(self, K: int) -> np.ndarray:
        row = np.zeros(K, dtype=np.int64)
        row[list(self.indices)] = self.coefficients
        return row


def combine(field: FieldSpec, coefficients, symbols) -> np.ndarray:
    """Elementwise sum of ``coefficients[i] * symbols[i]`` over GF(q)."""
    c = np.asarray(coefficients, dtype=np.int64)
    s = np.asarray(symbols, dtype=np.int64)
    if s.ndim == 1:
        s = s[:, None]
    if c.shape[0] != s.shape[0]:
        raise ValueError(f"{c.shape[0]} coefficients for {s.shape[0]} symbols")
    t = _kernels.field_tables(field.q)
    out = _kernels.matvec(c[None, :].astype(t.dtype), s.astype(t.dtype), t.mul, t.mode, t.add)
    return out[0].astype(np.int64)


def _pick(K: int, d: int, rng: np.random.Generator) -> np.ndarray:
    return np.sort(rng.choice(K, size=d, replace=False))


def encode_lt(block: SourceBlock, degrees: DegreeSource, rng: np.random.Generator) -> EncodedSymbol:
    """One LT symbol: degree from ``degrees``, distinct indices, nonzero coefficients."""
    f = block.field
    d = int(degrees.sample(rng))
    if not 1 <= d <= block.K:
        raise ValueError(f"degree {d} outside [1, {block.K}]")
    idx = _pick(block.K, d, rng)
    coef = rng.integers(1, f.q, size=d)
    payload = combine(f, coef, block.symbols[idx])
    return EncodedSymbol(tuple(map(int, idx)), tuple(map(int, coef)), tuple(map(int, payload)))


def encode_random_linear(block: SourceBlock, rng: np.random.Generator) -> EncodedSymbol:
    """Dense row: every coefficient uniform on GF(q), zero included."""
    f = block.field
    coef = rng.integers(0, f.q, size=block.K)
    payload = combine(f, coef, block.symbols)
    return EncodedSymbol(tuple(range(block.K)), tuple(map(int, coef)), tuple(map(int, payload)))


def lt_stream(block: SourceBlock, degrees: DegreeSource, rng: np.random.Generator) -> Iterator[EncodedSymbol]:
    while True:
        yield encode_lt(block, degrees, rng)


def random_linear_stream(block: SourceBlock, rng: np.random.Generator) -> Iterator[EncodedSymbol]:
    while True:
        yield encode_random_linear(block, rng)


def lt_matrix(K: int, q: int, n: int, degrees: DegreeSource, rng: np.random.Generator) -> np.ndarray:
    """Coefficient rows of ``n`` LT symbols as a dense n x K array.

    Same law as ``n`` calls to :func:`encode_lt`, drawn in bulk.
    """
    d = np.asarray(degrees.sample(rng, n), dtype=np.int64)
    if d.min() < 1 or d.max() > K:
        raise ValueError(f"degree source produced a degree outside [1, {K}]")
    total = int(d.sum())
    u = rng.random(total)
    coef = rng.integers(1, q, size=total)
    out = np.zeros((n, K), dtype=_kernels.field_tables(q).dtype)
    return _kernels.lt_rows(K, d, u, coef, out)


def random_linear_matrix(K: int, q: int, n: int, rng: np.random.Generator) -> np.ndarray:
    return rng.integers(0, q, size=(n, K)).astype(_kernels.field_tables(q).dtype)


def encode_rows(field: FieldSpec, rows: np.ndarray, block: SourceBlock) -> np.ndarray:
    """Payloads for dense coefficient rows (n x symbol_len)."""
    t = _kernels.field_tables(field.q)
    out = _kernels.matvec(np.asarray(rows).astype(t.dtype), block.symbols.astype(t.dtype), t.mul, t.mode, t.add)
    return out.astype(np.int64)


def format_symbol(sym: EncodedSymbol) -> str:
    """``degree | indices... | coefficients... | payload...``"""
    parts = [str(sym.degree), " ".join(map(str, sym.indices)),
             " ".join(map(str, sym.coefficients)), " ".join(map(str, sym.payload))]
    return " | ".join(parts)


def parse_symbol(line: str) -> EncodedSymbol:
    fields = [f.split() for f in line.strip().split("|")]
    if len(fields) != 4 or len(fields[0]) != 1:
        raise ValueError(f"malformed symbol line: {line!r}")
    degree = int(fields[0][0])
    idx, coef, payload = (tuple(int(x) for x in f) for f in fields[1:])
    if len(idx) != degree:
        raise ValueError(f"degree {degree} but {len(idx)} indices")
    return EncodedSymbol(idx, coef, payload)
