"""Interleaved codes viewed as arrays whose columns are the symbols.

An array codeword of an l-level interleaving has one constituent codeword per
row.  Distances between arrays count differing *columns*.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Sequence

import numpy as np

from .budget import BudgetExceeded, check_budget
from .lincode import (
    LinearCode,
    all_words,
    is_list_decodable,
    is_strongly_list_decodable,
    min_distance,
)


@dataclass(frozen=True, eq=False)
class InterleavedCode:
    codes: tuple[LinearCode, ...]

    def __post_init__(self):
        if not self.codes:
            raise ValueError("need at least one constituent code")
        if len({c.n for c in self.codes}) != 1:
            raise ValueError("constituent codes must share the length n")
        object.__setattr__(self, "codes", tuple(self.codes))

    @classmethod
    def power(cls, code: LinearCode, levels: int) -> "InterleavedCode":
        return cls((code,) * levels)

    @property
    def levels(self) -> int:
        return len(self.codes)

    @property
    def n(self) -> int:
        return self.codes[0].n

    def contains(self, array) -> bool:
        array = np.asarray(array)
        return array.shape == (self.levels, self.n) and all(
            c.contains(row) for c, row in zip(self.codes, array)
        )


def column_distance(a, b) -> int:
    a, b = np.asarray(a), np.asarray(b)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch {a.shape} vs {b.shape}")
    if a.ndim == 1:
        return int(np.count_nonzero(a != b))
    return int(np.count_nonzero(np.any(a != b, axis=0)))


def _row_list(code: LinearCode, row, tau: int, budget) -> np.ndarray:
    """Indices (into code.codewords) of codewords within distance tau of row."""
    check_budget(code.q**code.k, budget, "per-row codeword enumeration")
    dist = (code.codewords != np.asarray(row)[None, :]).sum(axis=1)
    return np.nonzero(dist <= tau)[0]


def check_lifting_field(q: int, L: int) -> None:
    if q <= math.comb(L + 1, 2):
        raise ValueError(f"need q > C(L+1, 2) = {math.comb(L + 1, 2)}, got q = {q}")


def iterative_list_decode(ic: InterleavedCode, Y, tau: int, L: int, budget=None) -> list[np.ndarray]:
    """All array codewords within column distance tau of Y, row by row.

    Each level decodes the next row exhaustively, pairs every surviving
    prefix with every row candidate, and keeps the pairs whose column
    distance to the matching prefix of Y is at most tau.  The result is
    ordered lexicographically by the row messages.
    """
    for c in ic.codes:
        check_lifting_field(c.q, L)
    Y = np.asarray(Y, dtype=np.int64)
    if Y.shape != (ic.levels, ic.n):
        raise ValueError(f"received array must be {ic.levels} x {ic.n}")
    # survivors: (message indices per row, bool mask of columns differing from Y so far)
    survivors: list[tuple[tuple[int, ...], np.ndarray]] = [((), np.zeros(ic.n, dtype=bool))]
    for level, code in enumerate(ic.codes):
        cands = _row_list(code, Y[level], tau, budget)
        diffs = code.codewords[cands] != Y[level][None, :]
        nxt = []
        for msgs, mask in survivors:
            for c, d in zip(cands, diffs):
                m = mask | d
                if np.count_nonzero(m) <= tau:
                    nxt.append((msgs + (int(c),), m))
        survivors = nxt
        if not survivors:
            break
    survivors.sort(key=lambda s: s[0])
    return [
        np.stack([code.codewords[i] for code, i in zip(ic.codes, msgs)]) for msgs, _ in survivors
    ]


def _column_distance_matrix(ic: InterleavedCode, Y, budget) -> np.ndarray:
    """Column distances from Y to every array codeword, flattened in message order."""
    total = math.prod(c.q**c.k for c in ic.codes)
    check_budget(total, budget, "array codeword enumeration")
    Y = np.asarray(Y, dtype=np.int64)
    mask = np.zeros((1, ic.n), dtype=bool)
    for code, row in zip(ic.codes, Y):
        d = code.codewords != row[None, :]
        mask = (mask[:, None, :] | d[None, :, :]).reshape(-1, ic.n)
    return mask.sum(axis=1)


def brute_force_list_decode(ic: InterleavedCode, Y, tau: int, budget=None) -> list[np.ndarray]:
    """Same contract as :func:`iterative_list_decode`, by full enumeration."""
    dist = _column_distance_matrix(ic, Y, budget)
    out = []
    for flat in np.nonzero(dist <= tau)[0]:
        rows, rem = [], int(flat)
        for code in reversed(ic.codes):
            rem, i = divmod(rem, code.q**code.k)
            rows.append(code.codewords[i])
        out.append(np.stack(rows[::-1]))
    return out


# -- property checks -----------------------------------------------------------


@dataclass
class PreservationReport:
    passed: bool
    checked: int = 0
    max_list_size: int = 0
    exhaustive: bool = False
    counterexample: Optional[np.ndarray] = None
    detail: str = ""


def default_sampler(ic: InterleavedCode, tau: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform arrays, codewords with up to tau columns replaced, and arrays
    whose columns are drawn from two or three random codewords."""
    q = ic.codes[0].q

    def codeword():
        return np.stack([c.codewords[rng.integers(len(c.codewords))] for c in ic.codes])

    kind = rng.integers(3)
    if kind == 0:
        return rng.integers(0, q, size=(ic.levels, ic.n))
    if kind == 1:
        y = codeword()
        cols = rng.choice(ic.n, size=min(tau, ic.n), replace=False)
        y[:, cols] = rng.integers(0, q, size=(ic.levels, len(cols)))
        return y
    sources = [codeword() for _ in range(int(rng.integers(2, 4)))]
    pick = rng.integers(len(sources), size=ic.n)
    return np.stack([sources[p][:, j] for j, p in enumerate(pick)], axis=1)


Sampler = Callable[[InterleavedCode, int, np.random.Generator], np.ndarray]


def check_preservation(
    code: LinearCode,
    tau: int,
    L: int,
    levels: int,
    sampler: Sampler = default_sampler,
    samples: int = 1000,
    seed: int = 0,
    budget=None,
) -> PreservationReport:
    """Check that the l-level interleaving keeps (tau, L)-list decodability.

    Exhaustive over all received arrays when q^(l*n) fits the budget,
    otherwise over ``samples`` arrays from ``sampler``.
    """
    check_lifting_field(code.q, L)
    if not is_list_decodable(code, tau, L, budget):
        raise ValueError(f"base code is not ({tau},{L})-list decodable")
    ic = InterleavedCode.power(code, levels)
    space = code.q ** (levels * code.n)
    try:
        check_budget(space, budget)
        exhaustive = True
    except BudgetExceeded:
        exhaustive = False
    if exhaustive:
        width = levels * code.n
        arrays = (
            w.reshape(levels, code.n)
            for start in range(0, space, 1 << 16)
            for w in all_words(code.q, width, start, min(space, start + (1 << 16)))
        )
    else:
        rng = np.random.default_rng(seed)
        arrays = (sampler(ic, tau, rng) for _ in range(samples))
    report = PreservationReport(passed=True, exhaustive=exhaustive)
    for Y in arrays:
        size = len(iterative_list_decode(ic, Y, tau, L, budget))
        report.checked += 1
        report.max_list_size = max(report.max_list_size, size)
        if size > L:
            report.passed = False
            report.counterexample = Y
            report.detail = f"list of size {size} > {L}"
            break
    return report


def check_strong_preservation(
    codes: Sequence[LinearCode],
    tau,
    levels: Optional[int] = None,
    sampler: Sampler = default_sampler,
    samples: int = 1000,
    seed: int = 0,
    budget=None,
) -> PreservationReport:
    """Check strong (tau, 2)-list decodability of an interleaving.

    ``codes`` lists the constituents (a single code is repeated ``levels``
    times).  Requires tau in Z/3, tau <= (2d-1)/3 for the common distance
    bound d, and each constituent strongly-(tau, 2)-list decodable.  For each
    received array the minimum summed distance over all triples of distinct
    array codewords is the sum of the three smallest distances.
    """
    tau = Fraction(tau)
    if tau <= 0 or (3 * tau).denominator != 1:
        raise ValueError("tau must be a positive multiple of 1/3")
    codes = list(codes)
    if levels is not None:
        if len(codes) == 1:
            codes = codes * levels
        elif len(codes) != levels:
            raise ValueError("levels does not match the number of constituent codes")
    d = min(min_distance(c, budget) for c in codes)
    if tau > Fraction(2 * d - 1, 3):
        raise ValueError(f"tau = {tau} exceeds (2d-1)/3 = {Fraction(2 * d - 1, 3)}")
    for c in {id(c): c for c in codes}.values():
        if not is_strongly_list_decodable(c, tau, 2, budget):
            raise ValueError(f"constituent {c!r} is not strongly-({tau},2)-list decodable")
    return strong_triple_check(codes, tau, sampler, samples, seed, budget)


def strong_triple_check(
    codes: Sequence[LinearCode],
    tau,
    sampler: Sampler = default_sampler,
    samples: int = 1000,
    seed: int = 0,
    budget=None,
) -> PreservationReport:
    """The sampled triple test alone, without checking preconditions."""
    tau = Fraction(tau)
    ic = InterleavedCode(tuple(codes))
    rng = np.random.default_rng(seed)
    radius = max(1, int(tau))
    report = PreservationReport(passed=True)
    for _ in range(samples):
        Y = sampler(ic, radius, rng)
        dist = _column_distance_matrix(ic, Y, budget)
        smallest = np.sort(np.partition(dist, 2)[:3]) if dist.size > 3 else np.sort(dist)
        report.checked += 1
        if len(smallest) == 3 and smallest.sum() <= 3 * tau:
            report.passed = False
            report.counterexample = Y
            report.detail = f"three codewords with summed column distance {smallest.sum()} <= {3 * tau}"
            break
    return report
