"""Packets, erasure distortion, adversaries, and worst-case verification.

A code is tested as an encoder/decoder pair over an integer alphabet
``range(q)``.  Packets are tuples of symbols; a packet set is a tuple of N
packets.  Decoders return a :class:`ReconstructionWord` in which ``None``
marks an erasure.
"""

from __future__ import annotations

import functools
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterator, Optional, Sequence

import numpy as np

from .budget import check_budget

ERASURE = None

Packet = tuple
PacketSet = tuple


@functools.total_ordering
class _Infinity:
    """Distortion of a reconstruction containing a wrong symbol."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INFINITY"

    def __str__(self):
        return "inf"

    def __eq__(self, other):
        return other is self

    def __hash__(self):
        return hash("vpec-infinity")

    def __lt__(self, other):
        return False

    def __gt__(self, other):
        return other is not self


INFINITY = _Infinity()


def format_distortion(value) -> str:
    if value is INFINITY:
        return "inf"
    value = Fraction(value)
    return f"{value.numerator}/{value.denominator}"


@dataclass(frozen=True)
class ReconstructionWord:
    symbols: tuple
    flagged: bool = False

    def __post_init__(self):
        object.__setattr__(self, "symbols", tuple(self.symbols))

    def __len__(self):
        return len(self.symbols)

    def __iter__(self):
        return iter(self.symbols)

    def __getitem__(self, i):
        return self.symbols[i]

    @property
    def erasures(self) -> int:
        return sum(s is ERASURE for s in self.symbols)

    @property
    def erased_positions(self) -> list[int]:
        return [i for i, s in enumerate(self.symbols) if s is ERASURE]

    def to_json(self) -> list:
        return [None if s is ERASURE else int(s) for s in self.symbols]


def erasure_distortion(x: Sequence[int], x_hat) -> Fraction | _Infinity:
    """Fraction of erased symbols, or INFINITY if any symbol is wrong."""
    x_hat = tuple(x_hat)
    if len(x) != len(x_hat):
        raise ValueError(f"length mismatch: {len(x)} vs {len(x_hat)}")
    erased = 0
    for a, b in zip(x, x_hat):
        if b is ERASURE:
            erased += 1
        elif a != b:
            return INFINITY
    return Fraction(erased, len(x))


@dataclass(frozen=True)
class PacketLayout:
    N: int
    length: int
    q: int

    def __post_init__(self):
        if self.N < 1 or self.length < 1 or self.q < 2:
            raise ValueError("need N >= 1, packet length >= 1 and q >= 2")

    @property
    def packet_alphabet(self) -> int:
        return self.q**self.length

    def validate(self, packets) -> PacketSet:
        packets = tuple(tuple(int(s) for s in p) for p in packets)
        if len(packets) != self.N:
            raise ValueError(f"expected {self.N} packets, got {len(packets)}")
        for p in packets:
            if len(p) != self.length or any(not 0 <= s < self.q for s in p):
                raise ValueError(f"packet {p} does not fit length {self.length} over q={self.q}")
        return packets


@dataclass
class VpecCodeSpec:
    """Parameters (N, k, R, D) and T of a fixed-blocklength code plus its
    encoder and decoder.  ``R`` is the per-packet rate ``length / k``."""

    layout: PacketLayout
    k: int
    T: int
    D: Fraction
    encode: Callable[[tuple], PacketSet]
    decode: Callable[[PacketSet], ReconstructionWord]
    name: str = "code"

    def __post_init__(self):
        self.D = Fraction(self.D)
        if not 0 <= self.D <= 1:
            raise ValueError("distortion budget must lie in [0, 1]")
        if not 0 <= self.T < self.layout.N:
            raise ValueError("need 0 <= T < N")

    @property
    def N(self) -> int:
        return self.layout.N

    @property
    def q(self) -> int:
        return self.layout.q

    @property
    def R(self) -> Fraction:
        return Fraction(self.layout.length, self.k)


# -- code tables (message -> packets), used by the definition-level checks ---


def packet_index(packet: Sequence[int], q: int) -> int:
    idx = 0
    for s in packet:
        idx = idx * q + int(s)
    return idx


def packet_from_index(idx: int, q: int, length: int) -> tuple:
    out = []
    for _ in range(length):
        idx, r = divmod(idx, q)
        out.append(r)
    return tuple(reversed(out))


@dataclass
class CodeTable:
    """Explicit enumeration of a code: every message and its packet set.

    ``words`` holds each codeword as N packet indices in ``range(q**length)``.
    """

    layout: PacketLayout
    k: int
    messages: list[tuple]
    words: np.ndarray = field(repr=False)

    @classmethod
    def from_encoder(cls, layout: PacketLayout, k: int, encode, budget=None) -> "CodeTable":
        check_budget(layout.q**k, budget, "message enumeration")
        messages = list(itertools.product(range(layout.q), repeat=k))
        return cls.from_pairs(layout, k, ((m, encode(m)) for m in messages))

    @classmethod
    def from_pairs(cls, layout: PacketLayout, k: int, pairs) -> "CodeTable":
        messages, words = [], []
        for m, packets in pairs:
            packets = layout.validate(packets)
            messages.append(tuple(m))
            words.append([packet_index(p, layout.q) for p in packets])
        return cls(layout, k, messages, np.array(words, dtype=np.int64).reshape(-1, layout.N))

    @classmethod
    def from_spec(cls, spec: VpecCodeSpec, budget=None) -> "CodeTable":
        return cls.from_encoder(spec.layout, spec.k, spec.encode, budget)

    def packets_of(self, i: int) -> PacketSet:
        L = self.layout
        return tuple(packet_from_index(int(w), L.q, L.length) for w in self.words[i])


def table_to_dict(table: CodeTable, **extra) -> dict:
    L = table.layout
    doc = {"format": "vpec-table", "N": L.N, "length": L.length, "q": L.q, "k": table.k}
    doc.update(extra)
    doc["entries"] = [
        {"msg": list(m), "packets": [list(p) for p in table.packets_of(i)]}
        for i, m in enumerate(table.messages)
    ]
    return doc


def table_from_dict(doc: dict) -> CodeTable:
    if doc.get("format") != "vpec-table":
        raise ValueError("not a vpec-table document")
    layout = PacketLayout(int(doc["N"]), int(doc["length"]), int(doc["q"]))
    k = int(doc["k"])
    pairs = []
    for e in doc["entries"]:
        if len(e["msg"]) != k:
            raise ValueError(f"message {e['msg']} does not have length k = {k}")
        pairs.append((tuple(int(v) for v in e["msg"]), tuple(tuple(p) for p in e["packets"])))
    if len({m for m, _ in pairs}) != len(pairs):
        raise ValueError("duplicate messages in table")
    return CodeTable.from_pairs(layout, k, pairs)


def _agreement(messages: Sequence[tuple]) -> tuple:
    first = messages[0]
    return tuple(
        s if all(m[j] == s for m in messages[1:]) else ERASURE for j, s in enumerate(first)
    )


def ball_intersection_decode(table: CodeTable, y: PacketSet, T: int) -> ReconstructionWord:
    """Reference decoder: keep the coordinates on which every message whose
    codeword lies within packet distance T of y agrees, erase the rest.

    An empty ball gives an all-erasure word with ``flagged=True``.
    """
    y = table.layout.validate(y)
    yi = np.array([packet_index(p, table.layout.q) for p in y], dtype=np.int64)
    dist = (table.words != yi[None, :]).sum(axis=1)
    members = [table.messages[i] for i in np.nonzero(dist <= T)[0]]
    if not members:
        return ReconstructionWord((ERASURE,) * table.k, flagged=True)
    return ReconstructionWord(_agreement(members))


def table_decoder(table: CodeTable, T: int) -> Callable[[PacketSet], ReconstructionWord]:
    return lambda y: ball_intersection_decode(table, y, T)


def _packet_ball(word: np.ndarray, T: int, alphabet: int) -> Iterator[tuple]:
    N = len(word)
    yield tuple(int(v) for v in word)
    for t in range(1, T + 1):
        for pos in itertools.combinations(range(N), t):
            choices = [[v for v in range(alphabet) if v != word[j]] for j in pos]
            for vals in itertools.product(*choices):
                y = [int(v) for v in word]
                for j, v in zip(pos, vals):
                    y[j] = v
                yield tuple(y)


def lemma1_counterexample(table: CodeTable, T: int, D, budget=None) -> Optional[dict]:
    """First violated condition of the T-VPEC characterization, or None.

    Condition 1: packet-level minimum distance at least T+1 (2T+1 if D = 0).
    Condition 2: for every received y, the messages whose codewords lie in
    B(y, T) share a common agreement set of at least (1-D)k coordinates.
    """
    D = Fraction(D)
    L = table.layout
    check_budget(L.packet_alphabet**L.N, budget, "received packet-set enumeration")
    words = table.words
    need = T + 1 if D > 0 else 2 * T + 1
    for i in range(len(words)):
        dist = (words[i + 1 :] != words[i][None, :]).sum(axis=1)
        bad = np.nonzero(dist < need)[0]
        if bad.size:
            j = i + 1 + int(bad[0])
            return {
                "condition": 1,
                "messages": [table.messages[i], table.messages[j]],
                "distance": int(dist[bad[0]]),
                "required": need,
            }
    balls: dict[tuple, list[int]] = {}
    for i, w in enumerate(words):
        for y in _packet_ball(w, T, L.packet_alphabet):
            balls.setdefault(y, []).append(i)
    min_agree = (1 - D) * table.k
    for y, members in balls.items():
        if len(members) < 2:
            continue
        agree = _agreement([table.messages[i] for i in members])
        size = sum(s is not ERASURE for s in agree)
        if size < min_agree:
            return {
                "condition": 2,
                "received": [packet_from_index(v, L.q, L.length) for v in y],
                "messages": [table.messages[i] for i in members],
                "agreement": size,
                "required": min_agree,
            }
    return None


def verify_lemma1(table: CodeTable, T: int, D, budget=None) -> bool:
    return lemma1_counterexample(table, T, D, budget) is None


# -- adversaries --------------------------------------------------------------


@dataclass(frozen=True)
class Corruption:
    altered: tuple[int, ...]
    packets: PacketSet


def corruption_count(layout: PacketLayout, T: int) -> int:
    a = layout.packet_alphabet - 1
    return sum(math.comb(layout.N, t) * a**t for t in range(T + 1))


def exhaustive_corruptions(packets: PacketSet, T: int, q: int) -> Iterator[Corruption]:
    """Every choice of at most T packets and every altered content for them."""
    N, length = len(packets), len(packets[0])
    words = list(itertools.product(range(q), repeat=length))
    for t in range(T + 1):
        for pos in itertools.combinations(range(N), t):
            choices = [[w for w in words if w != tuple(packets[j])] for j in pos]
            for vals in itertools.product(*choices):
                out = list(packets)
                for j, v in zip(pos, vals):
                    out[j] = v
                yield Corruption(pos, tuple(out))


def random_corruptions(
    packets: PacketSet, T: int, q: int, rng: np.random.Generator, trials: int, exact: bool = False
) -> Iterator[Corruption]:
    """Seeded corruptions; the number of altered packets is uniform on
    [0, T] (or exactly T when ``exact``), each altered packet changes."""
    N, length = len(packets), len(packets[0])
    for _ in range(trials):
        t = T if exact else int(rng.integers(0, T + 1))
        pos = tuple(sorted(int(j) for j in rng.choice(N, size=t, replace=False)))
        out = list(packets)
        for j in pos:
            while True:
                v = tuple(int(s) for s in rng.integers(0, q, size=length))
                if v != tuple(packets[j]):
                    break
            out[j] = v
        yield Corruption(pos, tuple(out))


def swap_to_codeword(
    packets: PacketSet, other: PacketSet, T: int, rng: Optional[np.random.Generator] = None
) -> Iterator[Corruption]:
    """Replace packets with those of another codeword.

    With an rng, one random subset of T positions; otherwise every subset of
    size at most T.
    """
    N = len(packets)
    if rng is not None:
        subsets = [tuple(sorted(int(j) for j in rng.choice(N, size=T, replace=False)))]
    else:
        subsets = [s for t in range(T + 1) for s in itertools.combinations(range(N), t)]
    for pos in subsets:
        out = list(packets)
        for j in pos:
            out[j] = tuple(other[j])
        altered = tuple(j for j in pos if tuple(other[j]) != tuple(packets[j]))
        yield Corruption(altered, tuple(out))


def adversary_channel(
    packets: PacketSet,
    strategy: str,
    T: int,
    q: int,
    *,
    seed: int = 0,
    trials: int = 1,
    other: Optional[PacketSet] = None,
) -> Iterator[Corruption]:
    """Dispatch to one of ``exhaustive``, ``random`` or ``swap``."""
    packets = tuple(tuple(p) for p in packets)
    if not 0 <= T < len(packets):
        raise ValueError("need 0 <= T < N")
    if strategy == "exhaustive":
        return exhaustive_corruptions(packets, T, q)
    if strategy == "random":
        return random_corruptions(packets, T, q, np.random.default_rng(seed), trials)
    if strategy == "swap":
        if other is None:
            raise ValueError("swap strategy needs the other codeword")
        return swap_to_codeword(packets, other, T)
    raise ValueError(f"unknown adversary strategy {strategy!r}")


# -- worst-case distortion ------------------------------------------------------


@dataclass
class AdversaryReport:
    worst: Fraction | _Infinity = Fraction(0)
    total: Fraction = Fraction(0)
    trials: int = 0
    wrong_symbol_events: int = 0
    max_erasures: int = 0
    exhaustive: bool = False
    worst_case: Optional[dict] = None

    @property
    def mean(self) -> Fraction:
        return self.total / self.trials if self.trials else Fraction(0)

    def record(self, message, corruption: Corruption, output: ReconstructionWord) -> Fraction | _Infinity:
        d = erasure_distortion(message, output)
        self.trials += 1
        if d is INFINITY:
            self.wrong_symbol_events += 1
        else:
            self.total += d
            self.max_erasures = max(self.max_erasures, output.erasures)
        if d > self.worst or self.worst_case is None:
            self.worst = max(self.worst, d)
            self.worst_case = {
                "msg": list(message),
                "altered": list(corruption.altered),
                "values": [list(corruption.packets[j]) for j in corruption.altered],
                "output": output.to_json(),
                "distortion": format_distortion(d),
            }
        return d


def exhaustive_space(spec: VpecCodeSpec, T: int) -> int:
    return spec.q**spec.k * corruption_count(spec.layout, T)


def run_adversary(
    spec: VpecCodeSpec,
    T: int,
    mode: str = "exhaustive",
    *,
    seed: int = 0,
    trials: int = 1000,
    budget=None,
    trace: Optional[Callable[[dict], None]] = None,
) -> AdversaryReport:
    """Drive the decoder against an adversary altering at most T packets.

    ``exhaustive`` covers every message and every corruption, so ``worst`` is
    exactly D_T.  ``random`` draws ``trials`` (message, corruption) pairs,
    ``swap`` moves T random packets onto another random codeword, and
    ``mixed`` alternates the two.  Sampled modes only lower-bound D_T.
    """
    report = AdversaryReport(exhaustive=mode == "exhaustive")

    def run(message, corruption):
        out = spec.decode(corruption.packets)
        d = report.record(message, corruption, out)
        if trace is not None:
            trace(
                {
                    "msg": list(message),
                    "altered": list(corruption.altered),
                    "values": [list(corruption.packets[j]) for j in corruption.altered],
                    "output": out.to_json(),
                    "distortion": format_distortion(d),
                }
            )

    if mode == "exhaustive":
        check_budget(exhaustive_space(spec, T), budget, "adversary enumeration")
        for message in itertools.product(range(spec.q), repeat=spec.k):
            packets = spec.encode(message)
            for c in exhaustive_corruptions(packets, T, spec.q):
                run(message, c)
    elif mode in ("random", "swap", "mixed"):
        rng = np.random.default_rng(seed)
        for t in range(trials):
            message = tuple(int(v) for v in rng.integers(0, spec.q, size=spec.k))
            packets = spec.encode(message)
            if mode == "swap" or (mode == "mixed" and t % 2):
                other = tuple(int(v) for v in rng.integers(0, spec.q, size=spec.k))
                corruptions = swap_to_codeword(packets, spec.encode(other), T, rng)
            else:
                corruptions = random_corruptions(packets, T, spec.q, rng, 1)
            for c in corruptions:
                run(message, c)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return report


def worst_case_distortion(
    spec: VpecCodeSpec, T: int, budget=None, mode: str = "exhaustive", seed: int = 0, trials: int = 1000
) -> Fraction | _Infinity:
    return run_adversary(spec, T, mode, seed=seed, trials=trials, budget=budget).worst
