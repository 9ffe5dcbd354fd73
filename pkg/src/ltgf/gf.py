"""Arithmetic over finite fields GF(q), q = p**m.

Elements are plain ints in ``[0, q)``. For ``m > 1`` an element's base-p
digits are the coefficients of a polynomial residue (least significant
digit = constant term). Multiplication goes through log/antilog tables
built from the smallest primitive element of the field.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

MAX_ORDER = 1 << 16

# Lexicographically least monic irreducible, written low degree first.
DEFAULT_MODULI = {
    4: (1, 1, 1),  # x^2 + x + 1
    8: (1, 1, 0, 1),  # x^3 + x + 1
    16: (1, 1, 0, 0, 1),  # x^4 + x + 1
    32: (1, 0, 1, 0, 0, 1),  # x^5 + x^2 + 1
}


class FieldError(ValueError):
    pass


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


def factor_prime_power(q: int) -> tuple[int, int]:
    """Return ``(p, m)`` with ``q == p**m``, or raise FieldError."""
    if q < 2:
        raise FieldError(f"field order must be >= 2, got {q}")
    p = next(d for d in range(2, q + 1) if q % d == 0)
    m, rest = 0, q
    while rest % p == 0:
        rest //= p
        m += 1
    if rest != 1 or not _is_prime(p):
        raise FieldError(f"{q} is not a prime power")
    return p, m


def _digits(v: int, p: int, m: int) -> list[int]:
    out = []
    for _ in range(m):
        v, r = divmod(v, p)
        out.append(r)
    return out


def _undigits(ds, p: int) -> int:
    v = 0
    for d in reversed(ds):
        v = v * p + d
    return v


def _poly_mod(a: list[int], mod: tuple[int, ...], p: int) -> list[int]:
    a = list(a)
    deg = len(mod) - 1
    for i in range(len(a) - 1, deg - 1, -1):
        c = a[i] % p
        if c:
            for j in range(deg + 1):
                a[i - deg + j] = (a[i - deg + j] - c * mod[j]) % p
    return [x % p for x in a[:deg]] + [0] * max(0, deg - len(a))


def _poly_mulmod(a: list[int], b: list[int], mod: tuple[int, ...], p: int) -> list[int]:
    prod = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                prod[i + j] = (prod[i + j] + x * y) % p
    return _poly_mod(prod, mod, p)


def is_irreducible(poly: tuple[int, ...], p: int) -> bool:
    """Trial division by every monic polynomial of degree 1..deg//2."""
    deg = len(poly) - 1
    for d in range(1, deg // 2 + 1):
        for low in range(p**d):
            divisor = tuple(_digits(low, p, d)) + (1,)
            if not any(_poly_mod(list(poly), divisor, p)):
                return False
    return True


def least_irreducible(p: int, m: int) -> tuple[int, ...]:
    for low in range(p**m):
        poly = tuple(_digits(low, p, m)) + (1,)
        if poly[0] != 0 and is_irreducible(poly, p):
            return poly
    raise FieldError(f"no irreducible polynomial of degree {m} over GF({p})")  # pragma: no cover


@dataclass(frozen=True, eq=False)
class FieldSpec:
    """A finite field context. Immutable; share freely between workers."""

    q: int
    p: int
    m: int
    modulus: tuple[int, ...]
    exp: np.ndarray = field(repr=False)
    log: np.ndarray = field(repr=False)
    neg_table: np.ndarray = field(repr=False)
    inv_table: np.ndarray = field(repr=False)

    def __reduce__(self):
        return field_new, (self.q,)

    def _check(self, a: int) -> None:
        if not 0 <= a < self.q:
            raise FieldError(f"{a} is not an element of GF({self.q})")

    def add(self, a: int, b: int) -> int:
        self._check(a)
        self._check(b)
        if self.p == 2:
            return a ^ b
        if self.m == 1:
            return (a + b) % self.p
        da, db = _digits(a, self.p, self.m), _digits(b, self.p, self.m)
        return _undigits([(x + y) % self.p for x, y in zip(da, db)], self.p)

    def neg(self, a: int) -> int:
        self._check(a)
        return int(self.neg_table[a])

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        self._check(a)
        self._check(b)
        if a == 0 or b == 0:
            return 0
        return int(self.exp[int(self.log[a]) + int(self.log[b])])

    def inv(self, a: int) -> int:
        self._check(a)
        if a == 0:
            raise ZeroDivisionError(f"0 has no inverse in GF({self.q})")
        return int(self.inv_table[a])

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, e: int) -> int:
        self._check(a)
        if a == 0:
            return 1 if e == 0 else 0
        return int(self.exp[(int(self.log[a]) * e) % (self.q - 1)])

    # vectorised helpers over integer arrays

    def add_arrays(self, a, b) -> np.ndarray:
        a, b = np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64)
        if self.p == 2:
            return a ^ b
        if self.m == 1:
            return (a + b) % self.p
        out = np.zeros(np.broadcast(a, b).shape, dtype=np.int64)
        scale = 1
        for _ in range(self.m):
            out += ((a // scale + b // scale) % self.p) * scale
            scale *= self.p
        return out

    def mul_arrays(self, a, b) -> np.ndarray:
        a, b = np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64)
        prod = self.exp[self.log[a] + self.log[b]]
        return np.where((a == 0) | (b == 0), 0, prod)

    def add_table(self) -> np.ndarray:
        r = np.arange(self.q)
        return self.add_arrays(r[:, None], r[None, :])

    def mul_table(self) -> np.ndarray:
        r = np.arange(self.q)
        return self.mul_arrays(r[:, None], r[None, :])


def _build(q: int, p: int, m: int, modulus: tuple[int, ...]) -> FieldSpec:
    def mul_slow(a: int, b: int) -> int:
        if m == 1:
            return a * b % p
        return _undigits(_poly_mulmod(_digits(a, p, m), _digits(b, p, m), modulus, p), p)

    exp = np.zeros(2 * (q - 1) + 1, dtype=np.int64)
    log = np.zeros(q, dtype=np.int64)
    for g in range(1, q):
        x, seen = 1, 0
        for i in range(q - 1):
            exp[i] = x
            x = mul_slow(x, g)
            if x == 1:
                seen = i + 1
                break
        if seen == q - 1:
            break
    else:  # pragma: no cover
        raise FieldError(f"no primitive element found for GF({q})")
    for i in range(q - 1):
        exp[i + q - 1] = exp[i]
        log[exp[i]] = i
    exp[2 * (q - 1)] = exp[0]

    neg = np.zeros(q, dtype=np.int64)
    for a in range(q):
        neg[a] = _undigits([(-d) % p for d in _digits(a, p, m)], p)
    inv = np.zeros(q, dtype=np.int64)
    for a in range(1, q):
        inv[a] = exp[(q - 1 - log[a]) % (q - 1)]
    for arr in (exp, log, neg, inv):
        arr.flags.writeable = False
    return FieldSpec(q, p, m, modulus, exp, log, neg, inv)


@lru_cache(maxsize=None)
def field_new(q: int) -> FieldSpec:
    """Construct GF(q). Raises FieldError when q is not a prime power."""
    q = int(q)
    p, m = factor_prime_power(q)
    if q > MAX_ORDER:
        raise FieldError(f"GF({q}) is larger than the supported maximum {MAX_ORDER}")
    if m == 1:
        modulus: tuple[int, ...] = ()
    else:
        modulus = DEFAULT_MODULI.get(q) or least_irreducible(p, m)
    return _build(q, p, m, modulus)
