"""Compiled inner loops for elimination and batch encoding over GF(q).

Field arithmetic is passed in as tables so one compiled function serves
every field: a full ``q x q`` product table, negation and inverse tables,
and an addition mode (0: XOR, otherwise the ``q x q`` addition table).
Elements are stored as uint8 for q <= 256 and uint16 up to ``MAX_KERNEL_Q``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numba import njit

from .gf import field_new

ADD_XOR, ADD_TABLE = 0, 1
MAX_KERNEL_Q = 4096


@dataclass(frozen=True, eq=False)
class Tables:
    dtype: type
    mul: np.ndarray
    neg: np.ndarray
    inv: np.ndarray
    mode: int
    add: np.ndarray


@lru_cache(maxsize=None)
def field_tables(q: int) -> Tables:
    f = field_new(q)
    if q > MAX_KERNEL_Q:
        raise ValueError(f"compiled kernels support q <= {MAX_KERNEL_Q}, got {q}")
    dt = np.uint8 if q <= 256 else np.uint16
    if f.p == 2:
        mode, add = ADD_XOR, np.zeros((1, 1), dtype=dt)
    else:
        mode, add = ADD_TABLE, f.add_table().astype(dt)
    return Tables(dt, f.mul_table().astype(dt), f.neg_table.astype(dt), f.inv_table.astype(dt), mode, add)


@njit(cache=True)
def matvec(A, X, mul, mode, add):
    """Return A @ X over GF(q); A is n x K, X is K x L."""
    n, K = A.shape
    out = np.zeros((n, X.shape[1]), dtype=X.dtype)
    L = X.shape[1]
    for r in range(n):
        for k in range(K):
            a = A[r, k]
            if a != 0:
                for j in range(L):
                    v = mul[a, X[k, j]]
                    out[r, j] = out[r, j] ^ v if mode == ADD_XOR else add[out[r, j], v]
    return out


@njit(cache=True)
def ge_solve(A, B, mul, neg, inv, mode, add, pivot_last, stop_on_deficit):
    """Forward elimination then back substitution on copies of A, B.

    Returns ``(rank, X)``; ``X`` is meaningful only when
    ``rank == K``. The pivot row for each column is the first (or, with
    ``pivot_last``, the last) remaining row with a nonzero entry. With
    ``stop_on_deficit`` elimination stops at the first pivot-free column
    and the returned rank is only a lower bound (and < K).
    """
    A = A.copy()
    B = B.copy()
    n, K = A.shape
    L = B.shape[1]
    row = 0
    for col in range(K):
        if row == n:
            break
        piv = -1
        if pivot_last:
            for r in range(n - 1, row - 1, -1):
                if A[r, col] != 0:
                    piv = r
                    break
        else:
            for r in range(row, n):
                if A[r, col] != 0:
                    piv = r
                    break
        if piv < 0:
            if stop_on_deficit:
                break
            continue
        if piv != row:
            for c in range(K):
                t = A[row, c]
                A[row, c] = A[piv, c]
                A[piv, c] = t
            for j in range(L):
                t = B[row, j]
                B[row, j] = B[piv, j]
                B[piv, j] = t
        s = inv[A[row, col]]
        for c in range(col, K):
            A[row, c] = mul[s, A[row, c]]
        for j in range(L):
            B[row, j] = mul[s, B[row, j]]
        for r in range(row + 1, n):
            f = A[r, col]
            if f != 0:
                nf = neg[f]
                if mode == ADD_XOR:
                    for c in range(col, K):
                        A[r, c] ^= mul[nf, A[row, c]]
                    for j in range(L):
                        B[r, j] ^= mul[nf, B[row, j]]
                else:
                    for c in range(col, K):
                        A[r, c] = add[A[r, c], mul[nf, A[row, c]]]
                    for j in range(L):
                        B[r, j] = add[B[r, j], mul[nf, B[row, j]]]
        row += 1
    rank = row
    X = np.zeros((K, L), dtype=B.dtype)
    if rank == K:
        # rows 0..K-1 are now unit upper triangular
        for i in range(K - 1, -1, -1):
            for j in range(L):
                X[i, j] = B[i, j]
            for c in range(i + 1, K):
                a = A[i, c]
                if a != 0:
                    na = neg[a]
                    for j in range(L):
                        v = mul[na, X[c, j]]
                        X[i, j] = X[i, j] ^ v if mode == ADD_XOR else add[X[i, j], v]
    return rank, X


@njit(cache=True)
def lt_rows(K, degrees, u_index, coef, out):
    """Fill ``out`` (n x K, zeroed) with LT rows.

    Row r takes ``degrees[r]`` distinct indices by a partial Fisher-Yates
    shuffle driven by uniforms ``u_index`` and uses the matching entries of
    ``coef`` (values in 1..q-1). Both flat arrays are consumed in order.
    """
    perm = np.empty(K, dtype=np.int64)
    pos = 0
    for r in range(degrees.shape[0]):
        d = degrees[r]
        for i in range(K):
            perm[i] = i
        for j in range(d):
            k = j + int(u_index[pos + j] * (K - j))
            if k >= K:
                k = K - 1
            t = perm[j]
            perm[j] = perm[k]
            perm[k] = t
            out[r, perm[j]] = coef[pos + j]
        pos += d
    return out
