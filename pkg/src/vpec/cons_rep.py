"""Repetition-style VPEC code on N = 2T+1 packets.

Packet j carries every message symbol except the s symbols in the cyclic
window ``S_j = {j, ..., j+s-1}``.  Indices are 0-based throughout: symbol i
is missing from packets ``i-s+1, ..., i`` (mod N) and every other packet
offers a candidate for it.  The decoder fixes symbols by majority, resolves
what is left pairwise, and erases at most s symbols.
"""

from __future__ import annotations

import bisect
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .core import ERASURE, PacketLayout, PacketSet, ReconstructionWord, VpecCodeSpec


@dataclass(frozen=True)
class RepVpecCode:
    T: int
    s: int = 1

    def __post_init__(self):
        if self.T < 1 or not 1 <= self.s <= self.T:
            raise ValueError(f"need T >= 1 and 1 <= s <= T, got T={self.T}, s={self.s}")

    @property
    def N(self) -> int:
        return 2 * self.T + 1

    @property
    def packet_length(self) -> int:
        return self.N - self.s

    @property
    def rate(self) -> Fraction:
        return Fraction(self.packet_length, self.N)

    @property
    def distortion(self) -> Fraction:
        return Fraction(self.s, self.N)

    def layout(self, q: int) -> PacketLayout:
        return PacketLayout(self.N, self.packet_length, q)


def window(code: RepVpecCode, j: int) -> tuple[list[int], list[int]]:
    """The window S_j and its complement, both as index lists."""
    N = code.N
    inside = [(j + t) % N for t in range(code.s)]
    members = set(inside)
    return inside, [i for i in range(N) if i not in members]


def encode(code: RepVpecCode, x: Sequence) -> PacketSet:
    if len(x) != code.N:
        raise ValueError(f"message length {len(x)} != 2T+1 = {code.N}")
    return tuple(tuple(x[i] for i in window(code, j)[1]) for j in range(code.N))


def _received_matrix(code: RepVpecCode, received: PacketSet) -> tuple[np.ndarray, np.ndarray]:
    """M[j, i] is packet j's candidate for symbol i; ``present`` masks valid entries."""
    N = code.N
    received = tuple(received)
    if len(received) != N or any(len(p) != code.packet_length for p in received):
        raise ValueError(f"expected {N} packets of length {code.packet_length}")
    offset = (np.arange(N)[None, :] - np.arange(N)[:, None]) % N
    present = offset >= code.s
    M = np.zeros((N, N), dtype=np.int64)
    M[present] = np.asarray(received, dtype=np.int64).reshape(-1)
    return M, present


@dataclass(frozen=True)
class CandidateMultiset:
    values: tuple
    index: int
    packets: tuple[int, ...]

    def __len__(self):
        return len(self.values)

    def frequency(self, symbol) -> int:
        return self.values.count(symbol)


def candidates(code: RepVpecCode, received: PacketSet, i: int) -> CandidateMultiset:
    """A_i: the candidates for symbol i from the packets that carry it."""
    M, present = _received_matrix(code, received)
    rows = [int(j) for j in np.nonzero(present[:, i])[0]]
    return CandidateMultiset(tuple(int(v) for v in M[rows, i]), i, tuple(rows))


def most_frequent(values) -> tuple[int, int]:
    """A most frequent symbol and its frequency; ties go to the smallest symbol.

    Boyer-Moore voting finds the strict-majority symbol if there is one; a
    full count is only needed when the vote's winner is not a majority.
    """
    values = list(values.values if isinstance(values, CandidateMultiset) else values)
    if not values:
        raise ValueError("empty multiset")
    cand, votes = None, 0
    for v in values:
        if votes == 0:
            cand, votes = v, 1
        elif v == cand:
            votes += 1
        else:
            votes -= 1
    freq = values.count(cand)
    if 2 * freq > len(values):
        return cand, freq
    counts = Counter(values)
    best = max(counts.values())
    return min(v for v, c in counts.items() if c == best), best


def find_pair(I: Sequence[int], T: int, s: int) -> tuple[int, int]:
    """Lexicographically first (i1, i2) in I with (i2 - i1) mod 2T+1 in [s, 2T+1-s].

    The difference set is symmetric, so the first pair has i1 < i2 and it
    suffices to look for the smallest partner at or above i1 + s.
    """
    N = 2 * T + 1
    ordered = sorted(I)
    for i1 in ordered:
        pos = bisect.bisect_left(ordered, i1 + s)
        if pos < len(ordered) and ordered[pos] - i1 <= N - s:
            return i1, ordered[pos]
    raise ValueError(f"no valid pair in an index set of size {len(ordered)} <= s = {s}")


def uz_flags(A1, A2, B1, B2, T: int, s: int) -> tuple[bool, bool, bool, bool]:
    """(U1, U2, Z1, Z2) with xi_l the most frequent symbol of A_l."""
    xi1, fa1 = most_frequent(A1)
    xi2, fa2 = most_frequent(A2)
    fb1 = list(B1).count(xi1)
    fb2 = list(B2).count(xi2)
    return (
        fb1 <= T - fa2,
        fb2 <= T - fa1,
        fb1 >= s + fa2 - T,
        fb2 >= s + fa1 - T,
    )


def _majority_pass(code: RepVpecCode, M, present) -> tuple[list, list[int]]:
    y: list = [ERASURE] * code.N
    unresolved = []
    for i in range(code.N):
        v, f = most_frequent(M[present[:, i], i].tolist())
        if f >= code.T + 1:
            y[i] = v
        else:
            unresolved.append(i)
    return y, unresolved


def decode_alg1(code: RepVpecCode, received: PacketSet) -> ReconstructionWord:
    """Majority decoding for s = 1, falling back on the one packet that
    omits the smallest unresolved symbol."""
    if code.s != 1:
        raise ValueError("the single-window decoder requires s = 1")
    M, present = _received_matrix(code, received)
    y, unresolved = _majority_pass(code, M, present)
    if not unresolved:
        return ReconstructionWord(y)
    i = unresolved[0]
    y = [int(M[i, j]) if j != i else ERASURE for j in range(code.N)]
    return ReconstructionWord(y)


def decode_alg2(code: RepVpecCode, received: PacketSet) -> ReconstructionWord:
    T, s, N = code.T, code.s, code.N
    M, present = _received_matrix(code, received)
    y, I = _majority_pass(code, M, present)

    def win(j):
        return [(j + t) % N for t in range(s)]

    while len(I) > s:
        i1, i2 = find_pair(I, T, s)
        A1 = M[present[:, i1], i1].tolist()
        A2 = M[present[:, i2], i2].tolist()
        B1 = M[win(i2 - s + 1), i1].tolist()
        B2 = M[win(i1 - s + 1), i2].tolist()
        U1, U2, Z1, Z2 = uz_flags(A1, A2, B1, B2, T, s)
        xi = {i1: most_frequent(A1)[0], i2: most_frequent(A2)[0]}
        other_b = {i1: B1, i2: B2}
        before = len(I)
        for this, other, U, Z, Z_other in ((i1, i2, U1, Z1, Z2), (i2, i1, U2, Z2, Z1)):
            if U:
                target, value = other, most_frequent(other_b[other])[0]
            elif Z or not Z_other:
                target, value = this, xi[this]
            else:
                continue
            if target in I:
                y[target] = value
                I.remove(target)
        if len(I) == before:
            raise AssertionError(f"pair ({i1}, {i2}) resolved nothing; decoder invariant broken")
    return ReconstructionWord(y)


def vpec_spec(code: RepVpecCode, q: int, decoder: str = "alg2") -> VpecCodeSpec:
    dec = {"alg1": decode_alg1, "alg2": decode_alg2}[decoder]
    return VpecCodeSpec(
        layout=code.layout(q),
        k=code.N,
        T=code.T,
        D=code.distortion,
        encode=lambda x: encode(code, x),
        decode=lambda r: dec(code, r),
        name=f"rep(T={code.T},s={code.s})",
    )


# -- batching: k = m(2T+1) ----------------------------------------------------


def encode_batched(code: RepVpecCode, x: Sequence) -> list[PacketSet]:
    """Round r carries (x_{0,r}, ..., x_{N-1,r}) where x is split into N
    consecutive blocks of length m."""
    N = code.N
    if len(x) % N:
        raise ValueError(f"message length {len(x)} is not a multiple of 2T+1 = {N}")
    m = len(x) // N
    return [encode(code, [x[i * m + r] for i in range(N)]) for r in range(m)]


def decode_batched(code: RepVpecCode, rounds: Sequence[PacketSet], decoder=decode_alg2) -> ReconstructionWord:
    N, m = code.N, len(rounds)
    out: list = [ERASURE] * (N * m)
    for r, received in enumerate(rounds):
        for i, v in enumerate(decoder(code, received)):
            out[i * m + r] = v
    return ReconstructionWord(out)
