"""Acceptance criteria, one test per criterion.

Each test records a PASS/FAIL line that the terminal summary prints under
"acceptance criteria".
"""

from __future__ import annotations

import time
from fractions import Fraction

import numpy as np
from conftest import record_acceptance
from vpec import bounds
from vpec import cons_lmds as cl
from vpec import cons_rep as cr
from vpec.cli import main
from vpec.core import (
    INFINITY,
    CodeTable,
    VpecCodeSpec,
    run_adversary,
    table_decoder,
    verify_lemma1,
)
from vpec.interleave import (
    InterleavedCode,
    brute_force_list_decode,
    column_distance,
    default_sampler,
    iterative_list_decode,
)
from vpec.lincode import grs_build, is_list_decodable, repetition_code, search_l_mds
from vpec.gf import field_build


def finish(number: int, passed: bool, detail: str) -> None:
    record_acceptance(number, passed, detail)
    print(f"criterion {number}: {'PASS' if passed else 'FAIL'}  {detail}")
    assert passed, detail


# -- 1 ------------------------------------------------------------------------------


def test_criterion_01_repetition_exhaustive_soundness():
    runs = []
    for T, s, q, limit in [(1, 1, 3, 5.0), (2, 1, 2, 60.0), (2, 2, 2, 60.0)]:
        spec = cr.vpec_spec(cr.RepVpecCode(T, s), q)
        start = time.perf_counter()
        rep = run_adversary(spec, T, "exhaustive")
        elapsed = time.perf_counter() - start
        budget = Fraction(s, 2 * T + 1)
        ok = rep.wrong_symbol_events == 0 and rep.worst <= budget and elapsed < limit
        if (T, s, q) == (1, 1, 3):
            ok = ok and rep.worst == Fraction(1, 3) and rep.trials == 27 * 25
        runs.append((ok, f"T={T},s={s},q={q}: worst {rep.worst}, wrong {rep.wrong_symbol_events}, "
                         f"{rep.trials} trials, {elapsed:.2f}s"))
    finish(1, all(ok for ok, _ in runs), "; ".join(d for _, d in runs))


# -- 2 ------------------------------------------------------------------------------


def test_criterion_02_zero_error_lossless(lmds_code):
    rng = np.random.default_rng(2)
    checked, failures = 0, 0
    for T, s, q in [(1, 1, 2), (1, 1, 3), (2, 1, 2), (2, 2, 3), (3, 2, 5), (5, 5, 4), (10, 7, 3)]:
        code = cr.RepVpecCode(T, s)
        for dec in (cr.decode_alg1, cr.decode_alg2):
            if dec is cr.decode_alg1 and s != 1:
                continue
            for _ in range(200):
                x = tuple(int(v) for v in rng.integers(0, q, size=code.N))
                checked += 1
                failures += dec(code, cr.encode(code, x)).symbols != x
    for _ in range(1000):
        x = tuple(int(v) for v in rng.integers(0, 7, size=10))
        checked += 1
        failures += cl.decode(lmds_code, cl.encode(lmds_code, x)).symbols != x
    finish(2, failures == 0, f"{checked - failures}/{checked} uncorrupted messages recovered exactly")


# -- 3 ------------------------------------------------------------------------------


def test_criterion_03_alg2_complexity():
    rng = np.random.default_rng(3)
    Ts = [10, 50, 100, 500, 1000]
    times = []
    for T in Ts:
        code = cr.RepVpecCode(T, T)
        samples = []
        for _ in range(3 if T >= 500 else 7):
            x = tuple(int(v) for v in rng.integers(0, 5, size=code.N))
            packets = list(cr.encode(code, x))
            j = int(rng.integers(code.N))
            packets[j] = tuple(int(v) for v in rng.integers(0, 5, size=code.packet_length))
            start = time.perf_counter()
            out = cr.decode_alg2(code, packets)
            samples.append(time.perf_counter() - start)
            assert out.erasures <= T and all(v is None or v == x[i] for i, v in enumerate(out))
        times.append(float(np.median(samples)))
    b, _ = np.polyfit(np.log(Ts), np.log(times), 1)
    ok = b <= 3.3 and times[-1] < 10.0
    detail = f"fitted exponent b = {b:.2f}, T=1000 decode {times[-1]:.3f}s"
    finish(3, ok, detail)


# -- 4 ------------------------------------------------------------------------------


def test_criterion_04_interleaved_construction_end_to_end(gf7):
    start = time.perf_counter()
    params = search_l_mds(gf7, 5, 2, 2, seed=1, max_iters=10**4)
    base = grs_build(gf7, 5, 2, params)
    found = is_list_decodable(base, 2, 2)
    code = cl.build(base, 2, 2)
    spec = cl.vpec_spec(code)
    rep = run_adversary(spec, 2, "mixed", seed=42, trials=10**4)
    zero = run_adversary(spec, 0, "random", seed=43, trials=10**3)
    elapsed = time.perf_counter() - start
    ok = (
        found
        and rep.wrong_symbol_events == 0
        and rep.max_erasures <= 8
        and rep.worst <= Fraction(4, 5)
        and zero.worst == 0
        and zero.wrong_symbol_events == 0
        and elapsed < 600
    )
    detail = (
        f"(a) witness {params.to_dict()} list decodable: {found}; "
        f"(b) {rep.trials} trials, wrong {rep.wrong_symbol_events}, max erased {rep.max_erasures}/10, "
        f"worst {rep.worst}; (c) zero-error worst {zero.worst}; {elapsed:.1f}s"
    )
    finish(4, ok, detail)


# -- 5 ------------------------------------------------------------------------------


def test_criterion_05_interleaving_preservation(witness_code):
    ic = InterleavedCode.power(witness_code, 2)
    rng = np.random.default_rng(5)
    mismatches, largest = 0, 0
    for _ in range(1000):
        Y = default_sampler(ic, 2, rng)
        it = iterative_list_decode(ic, Y, 2, 2)
        bf = brute_force_list_decode(ic, Y, 2)
        mismatches += [a.tobytes() for a in it] != [a.tobytes() for a in bf]
        largest = max(largest, len(it))
    rep = repetition_code(field_build(2), 2)
    ric = InterleavedCode.power(rep, 2)
    Y = np.array([[0, 1], [1, 0]])
    control = len(brute_force_list_decode(ric, Y, 2))
    ok = mismatches == 0 and largest <= 2 and control == 4
    detail = f"1000 arrays, {mismatches} mismatches, max list {largest}; [2,1] repetition control list size {control}"
    finish(5, ok, detail)


# -- 6 ------------------------------------------------------------------------------


def test_criterion_06_strong_preservation(witness_code):
    tau = Fraction(7, 3)
    ic = InterleavedCode.power(witness_code, 2)
    cw = witness_code.codewords
    rng = np.random.default_rng(0)
    violating, first = 0, None
    for _ in range(1000):
        Y = default_sampler(ic, 2, rng)
        # column distance between Y and every array codeword (message pair a, b)
        d0 = cw != Y[0][None, :]
        d1 = cw != Y[1][None, :]
        dist = (d0[:, None, :] | d1[None, :, :]).sum(axis=2).reshape(-1)
        smallest = np.argsort(dist, kind="stable")[:3]
        if dist[smallest].sum() <= 3 * tau:
            violating += 1
            if first is None:
                first = (Y, [divmod(int(i), len(cw)) for i in smallest], dist[smallest].tolist())
    detail = f"tau = 7/3, 1000 arrays, {violating} with a triple of summed column distance <= 7"
    if first is not None:
        Y, triple, dists = first
        # recheck the reported triple with the library's own column distance
        arrays = [np.stack([cw[a], cw[b]]) for a, b in triple]
        assert all(ic.contains(A) for A in arrays)
        assert [column_distance(Y, A) for A in arrays] == dists
        detail += f"; first: rows {Y.tolist()}, codeword pairs {triple}, distances {dists}"
    finish(6, violating == 0, detail)


# -- 7 ------------------------------------------------------------------------------


def test_criterion_07_diametric_theorem():
    mismatches = []
    for q in (2, 3):
        for n in range(1, 5):
            for d in range(n):
                if bounds.anticode_size(q, n, d) != bounds.anticode_brute_force(q, n, d):
                    mismatches.append((q, n, d))
    witness_fail = []
    for q in (2, 3):
        for n in range(1, 9):
            for d in range(n):
                fam = bounds.diametric_family(q, n, d)
                if len(fam) != bounds.anticode_size(q, n, d) or not bounds.is_anticode(fam, d):
                    witness_fail.append((q, n, d))
    identity_fail = []
    identity_checked = 0
    for q in range(2, 17):
        for n in range(1, 25):
            for d in range(n):
                if q >= Fraction(2 * (n - d), 3) + 2:
                    identity_checked += 1
                    exact = bounds.anticode_brute_force(q, n, d) if q**n <= bounds.EXACT_ANTICODE_LIMIT else None
                    if bounds.anticode_size(q, n, d) != q**d or exact not in (None, q**d):
                        identity_fail.append((q, n, d))
    specific = (bounds.anticode_size(2, 3, 1), bounds.anticode_size(2, 4, 2))
    ok = not mismatches and not witness_fail and not identity_fail and specific == (2, 5)
    detail = (
        f"exact mismatches {mismatches}, witness failures {witness_fail}, "
        f"Ant_2(3,1), Ant_2(4,2) = {specific}, q^d identity on {identity_checked} triples, failures {identity_fail}"
    )
    finish(7, ok, detail)


# -- 8 ------------------------------------------------------------------------------


def test_criterion_08_figures(tmp_path, capsys):
    assert main(["figure", "--id", "2", "--out-dir", str(tmp_path)]) == 0
    assert main(["figure", "--id", "1", "--out-dir", str(tmp_path)]) == 0
    capsys.readouterr()
    fig2 = bounds.read_curve_csv((tmp_path / "fig2_N128_T18.csv").read_text())["cons1"]
    want2 = [
        bounds.RdPoint(Fraction(1, 110), Fraction(100, 128)),
        bounds.RdPoint(Fraction(1, 104), Fraction(54, 128)),
        bounds.RdPoint(Fraction(1, 101), Fraction(36, 128)),
        bounds.RdPoint(Fraction(1, 92), 0),
    ]
    endpoints = {}
    for name in ("fig1_N3_T1", "fig1_N5_T2"):
        pts = bounds.read_curve_csv((tmp_path / f"{name}.csv").read_text())["cons2"]
        endpoints[name] = (pts[0].R, pts[0].D)
    want1 = {"fig1_N3_T1": (Fraction(2, 3), Fraction(1, 3)), "fig1_N5_T2": (Fraction(3, 5), Fraction(2, 5))}
    optimal = []
    for T in (1, 2):
        N = 2 * T + 1
        q = -(-4 * (T + 2) // 3)
        curve = bounds.cons2_curve(N, T)
        for s in range(T + 1):
            D = Fraction(s, N)
            R = bounds.corollary1_bound(N, T, N, D, q)
            optimal.append(R == 1 - D and curve.distortion_at(R) == D)
    ok = fig2 == want2 and endpoints == want1 and all(optimal)
    detail = (
        f"fig2 cons1 {[(str(p.R), str(p.D)) for p in fig2]}; "
        f"fig1 cons2 endpoints {[(str(r), str(d)) for r, d in endpoints.values()]}; "
        f"bound = 1-D on cons2 curve for {sum(optimal)}/{len(optimal)} points"
    )
    finish(8, ok, detail)


# -- 9 ------------------------------------------------------------------------------


def test_criterion_09_asymptotics():
    zeros = [bounds.asymptotic_f(Fraction(1, L + 1), L) for L in range(2, 11)]
    comps = []
    for theta in (Fraction(1, 20), Fraction(1, 10)):
        L = 2
        RO = Fraction(L) / (L - (L + 1) * theta)
        comps.append((theta, L * theta, bounds.mds_overall_distortion(theta, RO)))
    ok = all(z == 0 for z in zeros) and all(lm <= md for _, lm, md in comps)
    detail = "f(1/(L+1)) = 0 for L=2..10: " + str(all(z == 0 for z in zeros)) + "; " + ", ".join(
        f"theta={t}: L-MDS {lm} vs MDS {md}" for t, lm, md in comps
    )
    finish(9, ok, detail)


# -- 10 -----------------------------------------------------------------------------


def _worst_route(table: CodeTable, T: int, D: Fraction) -> bool:
    index = {m: i for i, m in enumerate(table.messages)}
    spec = VpecCodeSpec(
        table.layout, table.k, T, D, lambda m: table.packets_of(index[tuple(m)]), table_decoder(table, T)
    )
    worst_T = run_adversary(spec, T, "exhaustive").worst
    worst_0 = run_adversary(spec, 0, "exhaustive").worst
    return worst_T is not INFINITY and worst_T <= D and worst_0 == 0


def _variant(table: CodeTable, packets_for) -> CodeTable:
    pairs = [(m, packets_for(i, m)) for i, m in enumerate(table.messages)]
    return CodeTable.from_pairs(table.layout, table.k, pairs)


def test_criterion_10_lemma1_equivalence():
    T, D = 1, Fraction(1, 3)
    base = CodeTable.from_spec(cr.vpec_spec(cr.RepVpecCode(1, 1), 2))
    P = base.packets_of
    flip = {(0, 0): (1, 1), (1, 1): (0, 0), (0, 1): (0, 1), (1, 0): (1, 0)}
    rng = np.random.default_rng(10)
    perm = rng.permutation(len(base.messages))
    variants = {
        "original": base,
        # relabel the content of packet 0 by a bijection: distances unchanged
        "relabel_packet0": _variant(base, lambda i, m: (flip[P(i)[0]],) + P(i)[1:]),
        # reorder packets: distances unchanged
        "rotate_packets": _variant(base, lambda i, m: P(i)[1:] + P(i)[:1]),
        # shuffle which message owns which codeword
        "shuffle_messages": _variant(base, lambda i, m: P(int(perm[i]))),
        # two messages share a codeword
        "collision": _variant(base, lambda i, m: P(1) if i == 0 else P(i)),
        # codeword of message 0 moved to packet distance 1 from message 1
        "near_collision": _variant(base, lambda i, m: (P(0)[0],) + P(1)[1:] if i == 0 else P(i)),
    }
    rows, agree = [], True
    for name, table in variants.items():
        a = verify_lemma1(table, T, D)
        b = _worst_route(table, T, D)
        agree &= a == b
        rows.append(f"{name}: lemma1={a} worst-case={b}")
    results = {name: verify_lemma1(t, T, D) for name, t in variants.items()}
    ok = (
        agree
        and results["original"]
        and not results["collision"]
        and not results["near_collision"]
        and len(variants) - 1 >= 5
    )
    finish(10, ok, "; ".join(rows))
