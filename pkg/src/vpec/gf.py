"""Arithmetic over small finite fields GF(p^m).

Elements are integers in ``[0, q)``; the base-p digits of an element are the
coefficients of its polynomial representation (least significant digit is
the constant term).  Fields with ``q <= 2**12`` get log/exp and addition
tables; larger fields fall back to polynomial arithmetic.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

MAX_ORDER = 2**16
TABLE_ORDER = 2**12


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def _poly_mod(a: list[int], mod: tuple[int, ...], p: int) -> list[int]:
    """Remainder of ``a`` by the monic polynomial ``mod`` (low-order first)."""
    a = [c % p for c in a]
    deg = len(mod) - 1
    for i in range(len(a) - 1, deg - 1, -1):
        c = a[i]
        if c:
            for j in range(deg + 1):
                a[i - deg + j] = (a[i - deg + j] - c * mod[j]) % p
    return a[:deg] + [0] * max(0, deg - len(a))


def _is_irreducible(mod: tuple[int, ...], p: int) -> bool:
    m = len(mod) - 1
    if m == 1:
        return True
    # trial division by every monic polynomial of degree 1..m//2
    for d in range(1, m // 2 + 1):
        for low in itertools.product(range(p), repeat=d):
            divisor = tuple(low) + (1,)
            if not any(_poly_mod(list(mod), divisor, p)):
                return False
    return True


def lowest_irreducible(p: int, m: int) -> tuple[int, ...]:
    """Lowest monic irreducible of degree ``m`` over Z_p.

    Polynomials are ordered by their coefficient vectors read from the
    highest degree down, i.e. by the base-p integer they encode.  The result
    is returned low-order first.
    """
    for value in range(p**m):
        low = tuple((value // p**i) % p for i in range(m))
        mod = low + (1,)
        if m == 1 or (low[0] != 0 and _is_irreducible(mod, p)):
            return mod
    raise ValueError(f"no irreducible polynomial of degree {m} over Z_{p}")


@dataclass(frozen=True)
class FieldSpec:
    """GF(p^m) with a fixed modulus.  Immutable; tables are built lazily."""

    p: int
    m: int
    modulus: tuple[int, ...]
    q: int = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "q", self.p**self.m)

    def __repr__(self) -> str:
        return f"GF({self.p}^{self.m})" if self.m > 1 else f"GF({self.p})"

    # -- representation -------------------------------------------------

    def to_poly(self, a: int) -> list[int]:
        return [(a // self.p**i) % self.p for i in range(self.m)]

    def from_poly(self, coeffs) -> int:
        return sum((c % self.p) * self.p**i for i, c in enumerate(coeffs))

    def _check(self, a: int) -> int:
        if not 0 <= a < self.q:
            raise ValueError(f"{a} is not an element of {self!r}")
        return a

    # -- tables ----------------------------------------------------------

    @property
    def tabulated(self) -> bool:
        return self.q <= TABLE_ORDER

    @cached_property
    def _slow_generator(self) -> int:
        order = self.q - 1
        factors = [f for f in range(2, order + 1) if order % f == 0 and is_prime(f)]
        for g in range(2 if self.q > 2 else 1, self.q):
            if all(self._pow_slow(g, order // f) != 1 for f in factors):
                return g
        return 1

    @cached_property
    def _exp_log(self) -> tuple[np.ndarray, np.ndarray]:
        order = self.q - 1
        exp = np.zeros(2 * order, dtype=np.int64)
        log = np.zeros(self.q, dtype=np.int64)
        g = self._slow_generator
        x = 1
        for i in range(order):
            exp[i] = x
            log[x] = i
            x = self._mul_slow(x, g)
        exp[order:] = exp[:order]
        return exp, log

    @cached_property
    def add_table(self) -> np.ndarray:
        a = np.arange(self.q, dtype=np.int64)
        if self.m == 1:
            return (a[:, None] + a[None, :]) % self.p
        if self.p == 2:
            return a[:, None] ^ a[None, :]
        digits = np.stack([(a // self.p**i) % self.p for i in range(self.m)])
        out = np.zeros((self.q, self.q), dtype=np.int64)
        for i in range(self.m):
            out += ((digits[i][:, None] + digits[i][None, :]) % self.p) * self.p**i
        return out

    @cached_property
    def neg_table(self) -> np.ndarray:
        a = np.arange(self.q, dtype=np.int64)
        digits = [(a // self.p**i) % self.p for i in range(self.m)]
        return sum(((-d) % self.p) * self.p**i for i, d in enumerate(digits))

    @cached_property
    def mul_table(self) -> np.ndarray:
        exp, log = self._exp_log
        a = np.arange(self.q)
        t = exp[(log[:, None] + log[None, :]) % (self.q - 1)]
        t[0, :] = 0
        t[:, 0] = 0
        return t

    @cached_property
    def inv_table(self) -> np.ndarray:
        exp, log = self._exp_log
        t = exp[(-log) % (self.q - 1)]
        t[0] = 0
        return t

    # -- slow polynomial arithmetic (q > TABLE_ORDER) --------------------

    def _add_slow(self, a: int, b: int) -> int:
        if self.m == 1:
            return (a + b) % self.p
        if self.p == 2:
            return a ^ b
        return self.from_poly(x + y for x, y in zip(self.to_poly(a), self.to_poly(b)))

    def _neg_slow(self, a: int) -> int:
        return self.from_poly(-c for c in self.to_poly(a))

    def _mul_slow(self, a: int, b: int) -> int:
        if self.m == 1:
            return a * b % self.p
        pa, pb = self.to_poly(a), self.to_poly(b)
        prod = [0] * (2 * self.m - 1)
        for i, x in enumerate(pa):
            if x:
                for j, y in enumerate(pb):
                    prod[i + j] += x * y
        return self.from_poly(_poly_mod(prod, self.modulus, self.p))

    def _pow_slow(self, a: int, e: int) -> int:
        result = 1
        while e:
            if e & 1:
                result = self._mul_slow(result, a)
            a = self._mul_slow(a, a)
            e >>= 1
        return result

    # -- scalar API --------------------------------------------------------

    def add(self, a: int, b: int) -> int:
        self._check(a), self._check(b)
        return int(self.add_table[a, b]) if self.tabulated else self._add_slow(a, b)

    def neg(self, a: int) -> int:
        self._check(a)
        return int(self.neg_table[a]) if self.tabulated else self._neg_slow(a)

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        self._check(a), self._check(b)
        return int(self.mul_table[a, b]) if self.tabulated else self._mul_slow(a, b)

    def inv(self, a: int) -> int:
        if self._check(a) == 0:
            raise ZeroDivisionError(f"0 has no inverse in {self!r}")
        if self.tabulated:
            return int(self.inv_table[a])
        return self._pow_slow(a, self.q - 2)

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, e: int) -> int:
        """Square-and-multiply; negative exponents go through the inverse."""
        self._check(a)
        if e < 0:
            a, e = self.inv(a), -e
        result = 1
        while e:
            if e & 1:
                result = self.mul(result, a)
            a = self.mul(a, a)
            e >>= 1
        return result

    # -- array API (elementwise on integer arrays) ----------------------

    def vadd(self, a, b) -> np.ndarray:
        a, b = np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64)
        if self.m == 1:
            return (a + b) % self.p
        if self.p == 2:
            return a ^ b
        if self.tabulated:
            return self.add_table[a, b]
        return np.vectorize(self._add_slow, otypes=[np.int64])(a, b)

    def vneg(self, a) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        if self.m == 1:
            return (-a) % self.p
        if self.p == 2:
            return a
        if self.tabulated:
            return self.neg_table[a]
        return np.vectorize(self._neg_slow, otypes=[np.int64])(a)

    def vsub(self, a, b) -> np.ndarray:
        return self.vadd(a, self.vneg(b))

    def vmul(self, a, b) -> np.ndarray:
        a, b = np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64)
        if self.m == 1:
            return (a * b) % self.p
        if self.tabulated:
            return self.mul_table[a, b]
        return np.vectorize(self._mul_slow, otypes=[np.int64])(a, b)

    def matmul(self, a, b) -> np.ndarray:
        """Matrix product over the field (2-D or 1-D @ 2-D)."""
        a, b = np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64)
        if self.m == 1:
            # entries < 2**16, so int64 accumulation is exact for inner dims < 2**31
            return (a @ b) % self.p
        vec = a.ndim == 1
        a2 = a[None, :] if vec else a
        out = np.zeros((a2.shape[0], b.shape[1]), dtype=np.int64)
        for t in range(a2.shape[1]):
            out = self.vadd(out, self.vmul(a2[:, t, None], b[None, t, :]))
        return out[0] if vec else out

    # -- linear algebra ----------------------------------------------------

    def row_reduce(self, mat) -> tuple[np.ndarray, list[int]]:
        """Reduced row echelon form and pivot columns."""
        a = np.array(mat, dtype=np.int64, copy=True)
        rows, cols = a.shape
        pivots: list[int] = []
        r = 0
        for c in range(cols):
            if r == rows:
                break
            nz = np.nonzero(a[r:, c])[0]
            if nz.size == 0:
                continue
            pr = r + int(nz[0])
            if pr != r:
                a[[r, pr]] = a[[pr, r]]
            a[r] = self.vmul(a[r], self.inv(int(a[r, c])))
            for i in range(rows):
                if i != r and a[i, c]:
                    a[i] = self.vsub(a[i], self.vmul(a[r], int(a[i, c])))
            pivots.append(c)
            r += 1
        return a, pivots

    def rank(self, mat) -> int:
        return len(self.row_reduce(mat)[1])

    def matinv(self, mat) -> np.ndarray:
        a = np.asarray(mat, dtype=np.int64)
        n = a.shape[0]
        if a.shape != (n, n):
            raise ValueError("matrix is not square")
        aug = np.concatenate([a, np.eye(n, dtype=np.int64)], axis=1)
        red, pivots = self.row_reduce(aug)
        if pivots[:n] != list(range(n)):
            raise np.linalg.LinAlgError("matrix is singular over the field")
        return red[:, n:]


def field_build(p: int, m: int = 1) -> FieldSpec:
    """Build GF(p^m) with the lowest monic irreducible modulus."""
    if not is_prime(p):
        raise ValueError(f"characteristic {p} is not prime")
    if m < 1:
        raise ValueError("degree must be >= 1")
    if p**m > MAX_ORDER:
        raise ValueError(f"field order {p}^{m} exceeds {MAX_ORDER}")
    return FieldSpec(p, m, lowest_irreducible(p, m))


def field_of_order(q: int) -> FieldSpec:
    """GF(q) for a prime power ``q``."""
    for p in range(2, q + 1):
        if q % p == 0:
            break
    m = 0
    r = q
    while r % p == 0:
        r //= p
        m += 1
    if r != 1 or q < 2:
        raise ValueError(f"{q} is not a prime power")
    return field_build(p, m)
