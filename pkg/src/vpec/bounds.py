"""Converse bounds, achievable rate-distortion curves and anticode sizes.

Everything here is exact: rates and distortions are :class:`Fraction`
values and logarithms are bracketed by integer comparisons.  ``R`` is the
per-packet rate (packet length divided by message length) unless a curve
says it is an overall rate ``R^O = N R``.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
import math
from dataclasses import dataclass, field
from decimal import Context, Decimal
from fractions import Fraction
from typing import Iterable, Optional, Sequence

import numpy as np

from .budget import check_budget


class Infeasible(ValueError):
    """Parameters for which the requested quantity does not exist."""


def f_poly(T: int) -> int:
    """F(T) = T + floor(T^2 / 4) + 1."""
    if T < 1:
        raise ValueError("need T >= 1")
    return T + T * T // 4 + 1


def _check_NT(N: int, T: int) -> None:
    if not (T >= 1 and N > T):
        raise ValueError(f"need N > T >= 1, got N={N}, T={T}")


def converse_rate(N: int, T: int, D, variant: str = "singleton") -> Fraction:
    """Lower bound on the per-packet rate.

    ``singleton``: 1/(N-T) for D > 0 and 1/(N-2T) at D = 0 (which needs
    N >= 2T+1).  ``linear``: (1-D)/(N-2T) for linear codes with N >= 2T+1.
    """
    _check_NT(N, T)
    D = Fraction(D)
    if not 0 <= D <= 1:
        raise ValueError("D must lie in [0, 1]")
    if variant == "singleton":
        if D == 0:
            if N <= 2 * T:
                raise Infeasible(f"D = 0 needs N >= 2T+1, got N={N}, T={T}")
            return Fraction(1, N - 2 * T)
        return Fraction(1, N - T)
    if variant == "linear":
        if N <= 2 * T:
            raise Infeasible(f"the linear bound needs N >= 2T+1, got N={N}, T={T}")
        return (1 - D) / (N - 2 * T)
    raise ValueError(f"unknown variant {variant!r}")


# -- anticodes ------------------------------------------------------------------


def diametric_radius(q: int, n: int, d: int) -> int:
    """Largest r >= 0 with 2r <= min(d, (2(n-d)-q)/(q-2)); 0 when none qualifies."""
    if q < 2 or n - d < 1 or d < 0:
        raise ValueError(f"need q >= 2, d >= 0 and n - d >= 1, got q={q}, n={n}, d={d}")
    bound = Fraction(d)
    if q > 2:
        bound = min(bound, Fraction(2 * (n - d) - q, q - 2))
    return max(0, math.floor(bound / 2))


def anticode_size(q: int, n: int, d: int) -> int:
    """Ant_q(n, d) as |K_r|: words with at least n-d+r ones among the first
    n-d+2r coordinates, times q^(d-2r) for the free tail."""
    r = diametric_radius(q, n, d)
    head = n - d + 2 * r
    inside = sum(math.comb(head, j) * (q - 1) ** (head - j) for j in range(n - d + r, head + 1))
    return inside * q ** (d - 2 * r)


def diametric_family(q: int, n: int, d: int, budget=None) -> np.ndarray:
    """The words of K_r, with symbol 1 playing the distinguished role."""
    check_budget(q**n, budget, "anticode witness enumeration")
    r = diametric_radius(q, n, d)
    head = n - d + 2 * r
    words = np.array(list(itertools.product(range(q), repeat=n)), dtype=np.int64).reshape(-1, n)
    return words[(words[:, :head] == 1).sum(axis=1) >= n - d + r]


def is_anticode(words: np.ndarray, d: int) -> bool:
    words = np.asarray(words)
    for start in range(0, len(words), 512):
        block = words[start : start + 512]
        if ((block[:, None, :] != words[None, :, :]).sum(axis=2) > d).any():
            return False
    return True


def _max_clique(adj: list[int], candidates: int) -> int:
    """Maximum clique size inside the vertex bitset ``candidates``.

    Branch and bound with a greedy colouring bound; vertices are bit
    positions and ``adj[v]`` is the neighbour bitset of v.
    """
    best = 0

    def colour_order(P: int) -> list[tuple[int, int]]:
        order = []
        colour = 0
        while P:
            colour += 1
            Q = P
            while Q:
                v = (Q & -Q).bit_length() - 1
                Q &= ~(1 << v) & ~adj[v]
                P &= ~(1 << v)
                order.append((v, colour))
        return order

    def expand(size: int, P: int) -> None:
        nonlocal best
        for v, c in reversed(colour_order(P)):
            if size + c <= best:
                return
            NP = P & adj[v]
            if NP:
                expand(size + 1, NP)
            elif size + 1 > best:
                best = size + 1
            P &= ~(1 << v)

    expand(0, candidates)
    return best


EXACT_ANTICODE_LIMIT = 81


def anticode_brute_force(q: int, n: int, d: int, *, exact_limit: int = EXACT_ANTICODE_LIMIT) -> int:
    """Maximum anticode size by clique search on the distance-<=d graph.

    Translations are automorphisms of the graph, so some maximum clique
    contains the zero word and only its neighbourhood is searched.
    """
    size = q**n
    if size > exact_limit:
        raise ValueError(f"exact search limited to q^n <= {exact_limit}, got {size}")
    if d >= n:
        return size
    words = np.array(list(itertools.product(range(q), repeat=n)), dtype=np.int64)
    close = (words[:, None, :] != words[None, :, :]).sum(axis=2) <= d
    np.fill_diagonal(close, False)
    adj = [sum(1 << int(u) for u in np.nonzero(row)[0]) for row in close]
    return 1 + _max_clique(adj, adj[0])


# -- rational logarithms ------------------------------------------------------------


def exact_log(q: int, a: int) -> Optional[int]:
    """e with q^e == a, or None."""
    e, v = 0, 1
    while v < a:
        v *= q
        e += 1
    return e if v == a else None


def log_upper(q: int, a: int, denominator: int = 1 << 12) -> Fraction:
    """Smallest c/denominator with q^c >= a^denominator, an upper bound on log_q(a)."""
    if a < 1 or q < 2:
        raise ValueError("need a >= 1 and q >= 2")
    e = exact_log(q, a)
    if e is not None:
        return Fraction(e)
    target = a**denominator
    c = math.ceil(denominator * math.log(a) / math.log(q))
    while q**c < target:
        c += 1
    while c > 0 and q ** (c - 1) >= target:
        c -= 1
    return Fraction(c, denominator)


def converse_anticode(N: int, T: int, k: int, D, q: int, denominator: int = 1 << 12) -> Fraction:
    """(1 - log_q(Ant_q(k, kD)) / k) / (N - 2T), never above the true value.

    kD must be an integer; a non-power anticode size uses an upper bound on
    the logarithm so the returned rate bound stays valid.
    """
    _check_NT(N, T)
    if N < 2 * T + 1:
        raise Infeasible(f"need N >= 2T+1, got N={N}, T={T}")
    D = Fraction(D)
    if not 0 <= D < 1:
        raise ValueError("need 0 <= D < 1")
    d = D * k
    if d.denominator != 1:
        raise ValueError(f"kD = {d} must be an integer")
    ant = anticode_size(q, k, int(d))
    return (1 - log_upper(q, ant, denominator) / k) / (N - 2 * T)


def corollary1_applies(k: int, D, q: int) -> bool:
    return q >= Fraction(2 * k) * (1 - Fraction(D)) / 3 + 2


def corollary1_bound(N: int, T: int, k: int, D, q: int) -> Fraction:
    """max{(1-D)/(N-2T), 1/(N-T)} when q >= 2k(1-D)/3 + 2, otherwise the
    anticode bound combined with the singleton bound."""
    _check_NT(N, T)
    if N < 2 * T + 1:
        raise Infeasible(f"need N >= 2T+1, got N={N}, T={T}")
    D = Fraction(D)
    if corollary1_applies(k, D, q):
        return max((1 - D) / (N - 2 * T), Fraction(1, N - T))
    return max(converse_anticode(N, T, k, D, q), converse_rate(N, T, D))


# -- curves -----------------------------------------------------------------------


@dataclass(frozen=True)
class RdPoint:
    R: Fraction
    D: Fraction

    def __post_init__(self):
        object.__setattr__(self, "R", Fraction(self.R))
        object.__setattr__(self, "D", Fraction(self.D))
        if self.D < 0:
            raise ValueError("distortion must be nonnegative")


@dataclass(frozen=True)
class RdCurve:
    """A piecewise-linear curve through ``points`` in order of rate.

    Rates are non-decreasing; equal consecutive rates form a vertical step.
    """

    name: str
    points: tuple[RdPoint, ...]
    kind: str = "achievable"
    note: str = ""

    def __post_init__(self):
        pts = tuple(p if isinstance(p, RdPoint) else RdPoint(*p) for p in self.points)
        object.__setattr__(self, "points", pts)
        if any(b.R < a.R for a, b in zip(pts, pts[1:])):
            raise ValueError(f"curve {self.name}: rates must be non-decreasing")

    @property
    def domain(self) -> tuple[Fraction, Fraction]:
        return self.points[0].R, self.points[-1].R

    def distortion_at(self, R) -> Optional[Fraction]:
        """Smallest distortion on the curve at rate R, or None outside its span."""
        R = Fraction(R)
        values = [p.D for p in self.points if p.R == R]
        for a, b in zip(self.points, self.points[1:]):
            if a.R < R < b.R:
                values.append(a.D + (b.D - a.D) * (R - a.R) / (b.R - a.R))
        return min(values) if values else None


@dataclass
class CurveSet:
    curves: dict[str, RdCurve] = field(default_factory=dict)
    omitted: dict[str, str] = field(default_factory=dict)

    def add(self, curve: RdCurve) -> None:
        self.curves[curve.name] = curve

    def __getitem__(self, name: str) -> RdCurve:
        return self.curves[name]

    def __contains__(self, name: str) -> bool:
        return name in self.curves


def _curve(name, pts, kind="achievable", note="") -> RdCurve:
    return RdCurve(name, tuple(sorted((RdPoint(*p) for p in pts), key=lambda p: p.R)), kind, note)


def mds_curve(N: int, T: int) -> RdCurve:
    """Time sharing between [N, N-2T] and [N, N-T] MDS codes."""
    if N < 2 * T + 1:
        raise Infeasible(f"need N >= 2T+1, got N={N}, T={T}")
    return _curve("mds", [(Fraction(1, N - T), 1), (Fraction(1, N - 2 * T), 0)])


def polytope_distortion(N: int, T: int, R) -> Fraction:
    R = Fraction(R)
    lo, hi = Fraction(1, N - T), Fraction(1, N - 2 * T)
    if not lo <= R <= hi:
        raise ValueError(f"R must lie in [1/(N-T), 1/(N-2T)] = [{lo}, {hi}]")
    return (hi - R) / (hi - lo) * Fraction(f_poly(T), N)


def polytope_curve(N: int, T: int) -> RdCurve:
    if N < f_poly(T) + 1:
        raise Infeasible(f"needs N >= F(T)+1 = {f_poly(T) + 1}")
    return _curve(
        "polytope",
        [(Fraction(1, N - T), Fraction(f_poly(T), N)), (Fraction(1, N - 2 * T), 0)],
        note="external construction, not implemented",
    )


def lmds_check(N: int, T: int, L: int) -> Optional[str]:
    """Reason why L-MDS interleaving does not apply, or None."""
    if N < 2 * T + 1:
        return f"N={N} < 2T+1"
    if not 2 <= L or L * T > N:
        return f"L={L} outside [2, N/T]"
    if T % L:
        return f"L={L} does not divide T={T}"
    return None


def lmds_point(N: int, T: int, L: int) -> RdPoint:
    reason = lmds_check(N, T, L)
    if reason:
        raise Infeasible(reason)
    rho_n = N - (1 + Fraction(1, L)) * T
    return RdPoint(1 / rho_n, Fraction(L * T, N))


def cons1_corollary_distortion(N: int, T: int, L: int, R) -> Fraction:
    """Closed-form distortion of the time-shared broken line for one L."""
    R = Fraction(R)
    rho = 1 - (1 + Fraction(1, L)) * Fraction(T, N)
    F = f_poly(T)
    if R <= 1 / (rho * N):
        return ((1 - Fraction(T, N) - rho * (N - T) * R) * F + (rho * (N - T) * R - rho) * L * T) / (
            N - T - rho * N
        )
    return (rho - rho * (N - 2 * T) * R) / (rho * N - (N - 2 * T)) * L * T


def cons1_curve(N: int, T: int, Ls: Iterable[int]) -> tuple[RdCurve, dict[str, str]]:
    """Broken line through the polytope point, one point per admissible L,
    and the [N, N-2T] MDS point."""
    if N < f_poly(T) + 1:
        raise Infeasible(f"needs N >= F(T)+1 = {f_poly(T) + 1}")
    pts = [(Fraction(1, N - T), Fraction(f_poly(T), N)), (Fraction(1, N - 2 * T), 0)]
    skipped = {}
    for L in Ls:
        reason = lmds_check(N, T, L)
        if reason:
            skipped[f"cons1_L{L}"] = reason
            continue
        p = lmds_point(N, T, L)
        pts.append((p.R, p.D))
    return _curve("cons1", pts), skipped


def cons2_curve(N: int, T: int) -> RdCurve:
    """(R, 1-R) for (T+1)/(2T+1) <= R <= 1, only when N = 2T+1."""
    if N != 2 * T + 1:
        raise Infeasible(f"needs N = 2T+1, got N={N}, T={T}")
    pts = [(Fraction(N - s, N), Fraction(s, N)) for s in range(T + 1)]
    return _curve("cons2", pts)


def cons2_link_curve(N: int, T: int) -> RdCurve:
    """Time sharing between the polytope point and the s = T repetition point."""
    if N != 2 * T + 1:
        raise Infeasible(f"needs N = 2T+1, got N={N}, T={T}")
    if N < f_poly(T) + 1:
        raise Infeasible(f"needs N >= F(T)+1 = {f_poly(T) + 1}")
    return _curve(
        "cons2_link",
        [(Fraction(1, T + 1), Fraction(f_poly(T), N)), (Fraction(T + 1, N), Fraction(T, N))],
        note="time sharing with the external polytope point",
    )


def converse_curves(N: int, T: int) -> tuple[list[RdCurve], dict[str, str]]:
    """Boundaries of the singleton and linear converse regions, as the
    smallest admissible distortion at each rate."""
    _check_NT(N, T)
    lo = Fraction(1, N - T)
    if N < 2 * T + 1:
        return [_curve("converse_singleton", [(lo, 1), (lo, 0)], "converse", "D = 0 infeasible")], {
            "converse_linear": f"needs N >= 2T+1, got N={N}, T={T}"
        }
    hi = Fraction(1, N - 2 * T)
    singleton = _curve("converse_singleton", [(lo, 1), (lo, 0), (hi, 0)], "converse")
    knee = 1 - lo * (N - 2 * T)
    linear = _curve("converse_linear", [(lo, 1), (lo, knee), (hi, 0)], "converse")
    return [singleton, linear], {}


def achievable_curves(N: int, T: int, Ls: Sequence[int] = (2,)) -> CurveSet:
    """Every achievable curve that applies to (N, T); the rest are listed in
    ``omitted`` with the reason."""
    _check_NT(N, T)
    out = CurveSet()
    for name, make in (
        ("mds", lambda: mds_curve(N, T)),
        ("polytope", lambda: polytope_curve(N, T)),
        ("cons2", lambda: cons2_curve(N, T)),
        ("cons2_link", lambda: cons2_link_curve(N, T)),
    ):
        try:
            out.add(make())
        except Infeasible as exc:
            out.omitted[name] = str(exc)
    try:
        curve, skipped = cons1_curve(N, T, Ls)
        out.omitted.update(skipped)
        if len(curve.points) > 2:
            out.add(curve)
        else:
            out.omitted["cons1"] = "no admissible L"
    except Infeasible as exc:
        out.omitted["cons1"] = str(exc)
    return out


def all_curves(N: int, T: int, Ls: Sequence[int] = (2,)) -> CurveSet:
    out = achievable_curves(N, T, Ls)
    conv, omitted = converse_curves(N, T)
    for c in conv:
        out.add(c)
    out.omitted.update(omitted)
    return out


# -- overall-rate asymptotics ---------------------------------------------------------


def asymptotic_f(x, L: int) -> Fraction:
    """f(x) = Lx - (L-1)/(L+1) - (L-1)/((L+1)(L - (L+1)x))."""
    x = Fraction(x)
    return L * x - Fraction(L - 1, L + 1) - Fraction(1, L + 1) * (L - 1) / (L - (L + 1) * x)


def mds_overall_distortion(theta, RO) -> Fraction:
    theta, RO = Fraction(theta), Fraction(RO)
    return (1 - theta) / theta * (1 - (1 - 2 * theta) * RO)


def lmds_overall_point(theta, L: int) -> RdPoint:
    theta = Fraction(theta)
    if L - (L + 1) * theta <= 0:
        raise Infeasible(f"theta = {theta} too large for L = {L}")
    return RdPoint(Fraction(L) / (L - (L + 1) * theta), L * theta)


@dataclass
class AsymptoticSummary:
    theta: Fraction
    L: int
    curves: CurveSet
    lmds_point: RdPoint
    mds_at_lmds_rate: Fraction
    f_theta: Fraction
    lmds_beats_mds: Optional[bool]
    polytope_diverges: bool = True


def asymptotic_curves(theta, L: int) -> AsymptoticSummary:
    """Curves in the (R^O, D) plane for T/N = theta as N grows.

    ``lmds_beats_mds`` is only asserted for theta <= 1/(L+1); outside that
    range it is None.  The polytope distortion grows without bound and has
    no curve.
    """
    theta = Fraction(theta)
    if not 0 < theta < Fraction(1, 2):
        raise ValueError("need 0 < theta < 1/2")
    if L < 2:
        raise ValueError("need L >= 2")
    lo, hi = 1 / (1 - theta), 1 / (1 - 2 * theta)
    out = CurveSet()
    out.add(_curve("mds", [(lo, 1), (hi, 0)]))
    out.add(_curve("converse_singleton", [(lo, 1), (lo, 0), (hi, 0)], "converse"))
    out.add(_curve("converse_linear", [(lo, 1), (lo, theta / (1 - theta)), (hi, 0)], "converse"))
    out.omitted["polytope"] = "distortion F(T)/N diverges as N grows"
    p = lmds_overall_point(theta, L)
    if p.D <= 1:
        out.add(_curve(f"lmds_L{L}", [(lo, 1), (p.R, p.D), (hi, 0)]))
    else:
        out.omitted[f"lmds_L{L}"] = "distortion L*theta exceeds 1"
    mds_d = mds_overall_distortion(theta, p.R)
    beats = p.D <= mds_d if theta <= Fraction(1, L + 1) else None
    return AsymptoticSummary(theta, L, out, p, mds_d, asymptotic_f(theta, L), beats)


# -- serialization ------------------------------------------------------------------------

_DECIMAL = Context(prec=40)


def format_rational(x) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def format_decimal(x, digits: int = 12) -> str:
    x = Fraction(x)
    value = _DECIMAL.divide(Decimal(x.numerator), Decimal(x.denominator))
    return format(value, f".{digits}g")


CSV_HEADER = ("curve", "R_exact", "D_exact", "R_dec", "D_dec")


def curve_rows(curves: Iterable[RdCurve]) -> list[dict]:
    return [
        {
            "curve": c.name,
            "R_exact": format_rational(p.R),
            "D_exact": format_rational(p.D),
            "R_dec": format_decimal(p.R),
            "D_dec": format_decimal(p.D),
        }
        for c in curves
        for p in c.points
    ]


def curves_to_csv(curves: Iterable[RdCurve], header_comment: Optional[str] = None) -> str:
    buf = io.StringIO()
    if header_comment:
        for line in header_comment.splitlines():
            buf.write(f"# {line}\n")
    writer = csv.DictWriter(buf, fieldnames=CSV_HEADER, lineterminator="\n")
    writer.writeheader()
    writer.writerows(curve_rows(curves))
    return buf.getvalue()


def curves_to_json(curves: Iterable[RdCurve], meta: Optional[dict] = None) -> str:
    doc = {"meta": meta or {}, "rows": curve_rows(curves)}
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def read_curve_csv(text: str) -> dict[str, list[RdPoint]]:
    """Parse a curve CSV (comment lines allowed) back to exact points."""
    lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
    out: dict[str, list[RdPoint]] = {}
    for row in csv.DictReader(lines):
        out.setdefault(row["curve"], []).append(RdPoint(Fraction(row["R_exact"]), Fraction(row["D_exact"])))
    return out
