"""VPEC code from a list-decodable MDS code via N-level interleaving.

The message is split into N rows of length K = rho*N.  Row i is encoded with
a generator of the base code that is systematic on the cyclic column window
starting at i, and column j of the resulting N x N array is packet j.  The
decoder list-decodes the array against column errors and erases every
column on which the list disagrees.  Indices are 0-based.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .core import ERASURE, PacketLayout, PacketSet, ReconstructionWord, VpecCodeSpec
from .interleave import InterleavedCode, check_lifting_field, iterative_list_decode
from .lincode import LinearCode, is_list_decodable, systematic_window_generator, window


def lmds_rate_factor(N: int, T: int, L: int) -> Fraction:
    """rho = 1 - (1 + 1/L) T / N."""
    return 1 - (1 + Fraction(1, L)) * Fraction(T, N)


def check_parameters(N: int, T: int, L: int) -> Fraction:
    if N < 2 * T + 1:
        raise ValueError(f"need N >= 2T+1, got N={N}, T={T}")
    if not 2 <= L or L * T > N:
        raise ValueError(f"need 2 <= L <= N/T, got L={L}")
    if T % L:
        raise ValueError(f"need L | T, got L={L}, T={T}")
    rho = lmds_rate_factor(N, T, L)
    if (rho * N).denominator != 1:
        raise ValueError(f"rho*N = {rho * N} is not an integer")
    return rho


@dataclass(frozen=True, eq=False)
class LmdsVpecCode:
    base: LinearCode
    T: int
    L: int
    rho: Fraction
    generators: tuple[np.ndarray, ...]

    @property
    def N(self) -> int:
        return self.base.n

    @property
    def K(self) -> int:
        """Row length rho*N."""
        return self.base.k

    @property
    def k(self) -> int:
        return self.N * self.K

    @property
    def rate(self) -> Fraction:
        return Fraction(1, self.K)

    @property
    def distortion(self) -> Fraction:
        return Fraction(self.L * self.T, self.N)

    @property
    def tau(self) -> Fraction:
        return Fraction(self.L * (self.N - self.K), self.L + 1)

    @property
    def interleaved(self) -> InterleavedCode:
        return InterleavedCode.power(self.base, self.N)

    def layout(self) -> PacketLayout:
        return PacketLayout(self.N, self.N, self.base.q)


def build(base: LinearCode, T: int, L: int, *, verify: bool = True, budget=None) -> LmdsVpecCode:
    """Assemble the code; ``verify`` runs the exhaustive (T, L) list-decoding check."""
    N = base.n
    rho = check_parameters(N, T, L)
    if base.k != rho * N:
        raise ValueError(f"base dimension {base.k} != rho*N = {rho * N}")
    check_lifting_field(base.q, L)
    if verify and not is_list_decodable(base, T, L, budget):
        raise ValueError(f"base code is not ({T},{L})-list decodable")
    gens = tuple(systematic_window_generator(base, i) for i in range(N))
    for g in gens:
        g.setflags(write=False)
    return LmdsVpecCode(base, T, L, rho, gens)


def encode(code: LmdsVpecCode, x: Sequence[int]) -> np.ndarray:
    """N x N array whose row i is x_i * G_i."""
    x = np.asarray(x, dtype=np.int64)
    if x.shape != (code.k,):
        raise ValueError(f"message length {x.shape} != k = {code.k}")
    rows = x.reshape(code.N, code.K)
    f = code.base.field
    return np.stack([f.matmul(rows[i], code.generators[i]) for i in range(code.N)])


def packetize(array) -> PacketSet:
    array = np.asarray(array)
    if array.ndim != 2 or array.shape[0] != array.shape[1]:
        raise ValueError(f"expected a square array, got shape {array.shape}")
    return tuple(tuple(int(v) for v in array[:, j]) for j in range(array.shape[1]))


def depacketize(packets: PacketSet) -> np.ndarray:
    array = np.asarray(packets, dtype=np.int64).T
    if array.ndim != 2 or array.shape[0] != array.shape[1]:
        raise ValueError("expected N packets of length N")
    return array


def info_coordinates(code: LmdsVpecCode, j: int) -> set[int]:
    """Message coordinates i*K + r whose systematic column (i + r) mod N is j."""
    N, K = code.N, code.K
    return {i * K + (j - i) % N for i in range(N) if (j - i) % N < K}


def _read_message(code: LmdsVpecCode, array: np.ndarray, erased_columns=frozenset()) -> list:
    out: list = []
    for i in range(code.N):
        for col in window(code.N, i, code.K):
            out.append(ERASURE if col in erased_columns else int(array[i, col]))
    return out


def decode(code: LmdsVpecCode, Y, budget=None) -> ReconstructionWord:
    """Read the message directly when Y is an array codeword; otherwise
    list-decode with radius T and erase the columns where the list disagrees.

    An empty list means more than T columns were corrupted; the output is
    then all erasures with ``flagged=True``.
    """
    Y = np.asarray(Y, dtype=np.int64)
    if Y.shape != (code.N, code.N):
        raise ValueError(f"received array must be {code.N} x {code.N}")
    ic = code.interleaved
    if ic.contains(Y):
        return ReconstructionWord(_read_message(code, Y))
    found = iterative_list_decode(ic, Y, code.T, code.L, budget)
    if not found:
        return ReconstructionWord((ERASURE,) * code.k, flagged=True)
    stack = np.stack(found)
    disagree = np.any(np.any(stack != stack[0][None], axis=0), axis=0)
    erased = frozenset(int(j) for j in np.nonzero(disagree)[0])
    return ReconstructionWord(_read_message(code, found[0], erased))


def vpec_spec(code: LmdsVpecCode) -> VpecCodeSpec:
    return VpecCodeSpec(
        layout=code.layout(),
        k=code.k,
        T=code.T,
        D=code.distortion,
        encode=lambda x: packetize(encode(code, x)),
        decode=lambda packets: decode(code, depacketize(packets)),
        name=f"lmds(N={code.N},T={code.T},L={code.L})",
    )


def max_erased_coordinates(code: LmdsVpecCode) -> int:
    return code.K * code.L * code.T


def lmds_points(N: int, T: int, L: int) -> tuple[Fraction, Fraction]:
    """(per-packet rate, distortion) = (1/(N - (1+1/L)T), LT/N)."""
    rho = check_parameters(N, T, L)
    return Fraction(1) / (rho * N), Fraction(L * T, N)


__all__ = [
    "LmdsVpecCode",
    "build",
    "check_parameters",
    "decode",
    "depacketize",
    "encode",
    "info_coordinates",
    "lmds_points",
    "lmds_rate_factor",
    "max_erased_coordinates",
    "packetize",
    "vpec_spec",
]
