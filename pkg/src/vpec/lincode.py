"""Linear codes over GF(q): GRS construction, systematic windows, and
definition-level (exhaustive) list-decodability checks."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Optional

import numpy as np

from .budget import check_budget
from .gf import FieldSpec, field_build


@dataclass(frozen=True, eq=False)
class LinearCode:
    field: FieldSpec
    generator: np.ndarray

    def __post_init__(self):
        g = np.asarray(self.generator, dtype=np.int64)
        if g.ndim != 2:
            raise ValueError("generator must be a k x n matrix")
        if g.size and (g.min() < 0 or g.max() >= self.field.q):
            raise ValueError("generator entries must be field elements")
        g.setflags(write=False)
        object.__setattr__(self, "generator", g)
        if g.shape[0] > g.shape[1]:
            raise ValueError("k must not exceed n")
        if self.field.rank(g) != g.shape[0]:
            raise ValueError("generator does not have full row rank")

    @property
    def n(self) -> int:
        return self.generator.shape[1]

    @property
    def k(self) -> int:
        return self.generator.shape[0]

    @property
    def q(self) -> int:
        return self.field.q

    def __repr__(self) -> str:
        return f"LinearCode([{self.n},{self.k}] over {self.field!r})"

    @cached_property
    def messages(self) -> np.ndarray:
        """All q^k messages in lexicographic order (first symbol most significant)."""
        return all_words(self.q, self.k)

    @cached_property
    def codewords(self) -> np.ndarray:
        """Codewords aligned with :attr:`messages`."""
        return self.field.matmul(self.messages, self.generator)

    @cached_property
    def _rref(self) -> tuple[np.ndarray, list[int]]:
        return self.field.row_reduce(self.generator)

    def contains(self, word) -> bool:
        word = np.asarray(word, dtype=np.int64)
        rref, pivots = self._rref
        return bool(np.array_equal(self.field.matmul(word[pivots], rref), word))


@dataclass(frozen=True)
class GrsParams:
    alphas: tuple[int, ...]
    multipliers: tuple[int, ...]

    def __post_init__(self):
        if len(set(self.alphas)) != len(self.alphas):
            raise ValueError("evaluation points must be pairwise distinct")
        if any(v == 0 for v in self.multipliers):
            raise ValueError("column multipliers must be nonzero")
        if len(self.alphas) != len(self.multipliers):
            raise ValueError("need one multiplier per evaluation point")

    def to_dict(self) -> dict:
        return {"alphas": list(self.alphas), "multipliers": list(self.multipliers)}


def all_words(q: int, n: int, start: int = 0, stop: Optional[int] = None) -> np.ndarray:
    """Words of F_q^n with indices in [start, stop), lexicographically ordered."""
    stop = q**n if stop is None else stop
    idx = np.arange(start, stop, dtype=np.int64)
    powers = q ** np.arange(n - 1, -1, -1, dtype=np.int64)
    return (idx[:, None] // powers[None, :]) % q


def grs_build(field: FieldSpec, n: int, k: int, params: GrsParams) -> LinearCode:
    """Row i of the generator is (v_j * alpha_j^i)_j."""
    if len(params.alphas) != n:
        raise ValueError("need n evaluation points")
    if n > field.q:
        raise ValueError("GRS length cannot exceed the field size")
    if not 1 <= k <= n:
        raise ValueError("need 1 <= k <= n")
    rows = [
        [field.mul(v, field.pow(a, i)) for a, v in zip(params.alphas, params.multipliers)]
        for i in range(k)
    ]
    return LinearCode(field, np.array(rows, dtype=np.int64))


def repetition_code(field: FieldSpec, n: int) -> LinearCode:
    return LinearCode(field, np.ones((1, n), dtype=np.int64))


def encode(code: LinearCode, message) -> np.ndarray:
    message = np.asarray(message, dtype=np.int64)
    if message.shape != (code.k,):
        raise ValueError(f"message length {message.shape} != k = {code.k}")
    return code.field.matmul(message, code.generator)


def min_distance(code: LinearCode, budget: int | None = None) -> int:
    check_budget(code.q**code.k, budget, "codeword enumeration")
    weights = np.count_nonzero(code.codewords[1:], axis=1)
    return int(weights.min()) if weights.size else code.n


def is_mds(code: LinearCode, budget: int | None = None) -> bool:
    return min_distance(code, budget) == code.n - code.k + 1


def window(n: int, start: int, size: int) -> list[int]:
    """Cyclic column window ``start, start+1, ..., start+size-1`` (mod n)."""
    return [(start + t) % n for t in range(size)]


def systematic_window_generator(code: LinearCode, start: int) -> np.ndarray:
    """Generator of the same code with the identity in the cyclic window at ``start``."""
    cols = window(code.n, start, code.k)
    try:
        inv = code.field.matinv(code.generator[:, cols])
    except np.linalg.LinAlgError:
        raise ValueError(f"columns {cols} are not an information set; code is not MDS") from None
    return code.field.matmul(inv, code.generator)


# -- exhaustive list-decoding checks ------------------------------------------


def _smallest_distance_chunks(code: LinearCode, count: int, budget: int | None):
    """Yield (words, d) where row r of d holds the ``count`` smallest Hamming
    distances from words[r] to the code, ascending."""
    q, n = code.q, code.n
    check_budget(q**n, budget, "received-word enumeration")
    check_budget(q**code.k, budget, "codeword enumeration")
    cw = code.codewords
    count = min(count, len(cw))
    chunk = max(1, (1 << 22) // (len(cw) * n))
    for start in range(0, q**n, chunk):
        words = all_words(q, n, start, min(q**n, start + chunk))
        dist = (words[:, None, :] != cw[None, :, :]).sum(axis=2)
        if count < dist.shape[1]:
            dist = np.partition(dist, count - 1, axis=1)[:, :count]
        yield words, np.sort(dist, axis=1)


def list_decoding_violation(code: LinearCode, tau: int, L: int, budget=None):
    """A received word with more than L codewords within distance tau, or None."""
    if L + 1 > code.q**code.k:
        return None
    for words, dist in _smallest_distance_chunks(code, L + 1, budget):
        bad = np.nonzero(dist[:, L] <= tau)[0]
        if bad.size:
            return words[bad[0]]
    return None


def is_list_decodable(code: LinearCode, tau: int, L: int, budget: int | None = None) -> bool:
    """True iff no y has more than L codewords in the Hamming ball B(y, tau)."""
    return list_decoding_violation(code, tau, L, budget) is None


def _as_radius(tau, L: int) -> Fraction:
    tau = Fraction(tau)
    if tau < 0 or (tau * (L + 1)).denominator != 1:
        raise ValueError(f"radius {tau} must be a nonnegative multiple of 1/{L + 1}")
    return tau


def strong_list_decoding_violation(code: LinearCode, tau, L: int, budget=None):
    """A received word whose L+1 nearest codewords have summed distance <= (L+1)tau."""
    limit = _as_radius(tau, L) * (L + 1)
    if L + 1 > code.q**code.k:
        return None
    for words, dist in _smallest_distance_chunks(code, L + 1, budget):
        bad = np.nonzero(dist.sum(axis=1) <= limit)[0]
        if bad.size:
            return words[bad[0]]
    return None


def is_strongly_list_decodable(code: LinearCode, tau, L: int, budget: int | None = None) -> bool:
    """Average-radius check: every L+1 distinct codewords have summed distance
    from every y exceeding (L+1)*tau.  The minimum over (L+1)-subsets is the sum
    of the L+1 smallest distances, so that is what gets compared."""
    return strong_list_decoding_violation(code, tau, L, budget) is None


def l_mds_radius(n: int, k: int, L: int) -> Fraction:
    return Fraction(L * (n - k), L + 1)


def check_l_mds_order(code: LinearCode, L: int) -> None:
    limit = min(code.q - 1, math.comb(code.n - 1, code.k - 1))
    if not 1 <= L <= limit:
        raise ValueError(f"L = {L} outside [1, min(q-1, C(n-1,k-1))] = [1, {limit}]")


def is_l_mds(code: LinearCode, L: int, budget: int | None = None) -> bool:
    check_l_mds_order(code, L)
    return is_strongly_list_decodable(code, l_mds_radius(code.n, code.k, L), L, budget)


class SearchExhausted(RuntimeError):
    """No L-MDS GRS code was found within the iteration budget."""


def search_l_mds(
    field: FieldSpec, n: int, k: int, L: int, seed: int = 0, max_iters: int = 1000, budget=None
) -> GrsParams:
    """Random GRS search; iteration i draws from its own stream seeded by (seed, i)."""
    if n > field.q:
        raise ValueError(f"GRS length {n} exceeds field size {field.q}")
    limit = min(field.q - 1, math.comb(n - 1, k - 1))
    if not 1 <= L <= limit:
        raise ValueError(f"L = {L} outside [1, min(q-1, C(n-1,k-1))] = [1, {limit}]")
    for i in range(max_iters):
        rng = np.random.default_rng([seed, i])
        alphas = tuple(int(a) for a in rng.choice(field.q, size=n, replace=False))
        mults = tuple(int(v) for v in rng.integers(1, field.q, size=n))
        params = GrsParams(alphas, mults)
        if is_l_mds(grs_build(field, n, k, params), L, budget):
            return params
    raise SearchExhausted(f"no {L}-MDS [{n},{k}] GRS code over {field!r} in {max_iters} draws")


# -- serialization --------------------------------------------------------------


def code_to_dict(code: LinearCode) -> dict:
    f = code.field
    return {
        "q": f.q,
        "p": f.p,
        "m": f.m,
        "n": code.n,
        "k": code.k,
        "generator": code.generator.tolist(),
    }


def code_from_dict(data: dict) -> LinearCode:
    field = field_build(int(data["p"]), int(data["m"]))
    if field.q != int(data["q"]):
        raise ValueError("q does not equal p^m")
    code = LinearCode(field, np.array(data["generator"], dtype=np.int64))
    if (code.n, code.k) != (int(data["n"]), int(data["k"])):
        raise ValueError("declared (n, k) do not match the generator")
    return code


def dump_code(code: LinearCode) -> str:
    return json.dumps(code_to_dict(code))


def load_code(text: str) -> LinearCode:
    return code_from_dict(json.loads(text))
