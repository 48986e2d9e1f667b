from __future__ import annotations

import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vpec import cons_rep
from vpec.budget import BudgetExceeded
from vpec.core import (
    ERASURE,
    INFINITY,
    CodeTable,
    PacketLayout,
    ReconstructionWord,
    VpecCodeSpec,
    adversary_channel,
    ball_intersection_decode,
    corruption_count,
    erasure_distortion,
    format_distortion,
    lemma1_counterexample,
    run_adversary,
    swap_to_codeword,
    table_decoder,
    table_from_dict,
    table_to_dict,
    verify_lemma1,
    worst_case_distortion,
)

E = ERASURE


def table_spec(table: CodeTable, T: int, D) -> VpecCodeSpec:
    lookup = {m: table.packets_of(i) for i, m in enumerate(table.messages)}
    return VpecCodeSpec(table.layout, table.k, T, Fraction(D), lookup.__getitem__, table_decoder(table, T))


def lemma1_by_adversary(table: CodeTable, T: int, D) -> bool:
    """Run the ball decoder against every adversary with budgets T and 0."""
    spec = table_spec(table, T, D)
    return worst_case_distortion(spec, T) <= Fraction(D) and worst_case_distortion(spec, 0) == 0


def test_distortion_examples():
    assert erasure_distortion((1, 2, 3), (1, 2, 3)) == 0
    assert erasure_distortion((1, 2, 3), (1, E, 3)) == Fraction(1, 3)
    assert erasure_distortion((1, 2), (1, 3)) is INFINITY
    assert erasure_distortion((1, 2), (E, 3)) is INFINITY
    with pytest.raises(ValueError):
        erasure_distortion((1, 2), (1,))


def test_infinity_orders_above_rationals():
    assert INFINITY > Fraction(1) and not INFINITY < Fraction(10**9)
    assert max(Fraction(1, 2), INFINITY) is INFINITY
    assert format_distortion(INFINITY) == "inf"
    assert format_distortion(Fraction(2, 4)) == "1/2"
    assert format_distortion(0) == "0/1"


@given(st.lists(st.integers(0, 4), min_size=1, max_size=8), st.data())
def test_distortion_monotone_in_erasures(x, data):
    mask = data.draw(st.lists(st.booleans(), min_size=len(x), max_size=len(x)))
    more = data.draw(st.lists(st.booleans(), min_size=len(x), max_size=len(x)))
    a = [E if m else v for v, m in zip(x, mask)]
    b = [E if m or n else v for v, m, n in zip(x, mask, more)]
    da, db = erasure_distortion(x, a), erasure_distortion(x, b)
    assert db >= da
    assert (da == db) == (a == b)


def test_reconstruction_word():
    w = ReconstructionWord([1, E, 2, E])
    assert w.erasures == 2
    assert w.erased_positions == [1, 3]
    assert w.to_json() == [1, None, 2, None]


def test_spec_validation():
    layout = PacketLayout(3, 1, 2)
    with pytest.raises(ValueError):
        VpecCodeSpec(layout, 2, 3, 0, None, None)
    with pytest.raises(ValueError):
        VpecCodeSpec(layout, 2, 1, Fraction(3, 2), None, None)
    with pytest.raises(ValueError):
        PacketLayout(0, 1, 2)
    assert VpecCodeSpec(PacketLayout(3, 2, 3), 3, 1, Fraction(1, 3), None, None).R == Fraction(2, 3)


def test_corruption_counting():
    layout = PacketLayout(3, 2, 3)
    assert corruption_count(layout, 1) == 25
    packets = ((0, 0), (1, 1), (2, 2))
    seen = {c.packets for c in adversary_channel(packets, "exhaustive", 1, 3)}
    assert len(seen) == 25
    oracle = sum(math.comb(3, t) * 8**t for t in range(2))
    assert oracle == 25
    assert [c.packets for c in adversary_channel(packets, "exhaustive", 0, 3)] == [packets]


def test_random_adversary_respects_budget():
    packets = ((0, 0), (1, 1), (2, 2), (0, 1), (1, 0))
    for c in adversary_channel(packets, "random", 2, 3, seed=9, trials=200):
        changed = [j for j in range(5) if c.packets[j] != packets[j]]
        assert changed == list(c.altered)
        assert len(changed) <= 2


def test_swap_stays_within_budget():
    a = ((0,), (0,), (0,), (0,), (0,))
    b = ((1,), (1,), (0,), (1,), (1,))
    for T in range(5):
        for c in swap_to_codeword(a, b, T):
            assert sum(x != y for x, y in zip(c.packets, a)) <= T
    with pytest.raises(ValueError):
        list(adversary_channel(a, "swap", 1, 2))
    with pytest.raises(ValueError):
        adversary_channel(a, "teleport", 1, 2)


@pytest.fixture
def tiny_table() -> CodeTable:
    # k = 3 over GF(2), N = 3 packets of one symbol; messages 000 and 010 are
    # at packet distance 1 and agree on coordinates 0 and 2
    layout = PacketLayout(3, 1, 2)
    pairs = [((0, 0, 0), ((0,), (0,), (0,))), ((0, 1, 0), ((0,), (0,), (1,))), ((1, 1, 1), ((1,), (1,), (1,)))]
    return CodeTable.from_pairs(layout, 3, pairs)


def test_ball_decoder_examples(tiny_table):
    exact = ball_intersection_decode(tiny_table, ((1,), (1,), (1,)), 0)
    assert exact.symbols == (1, 1, 1)
    both = ball_intersection_decode(tiny_table, ((0,), (0,), (0,)), 1)
    assert both.symbols == (0, E, 0)
    empty = ball_intersection_decode(tiny_table, ((1,), (0,), (1,)), 0)
    assert empty.flagged and empty.erasures == 3


def test_lemma1_condition_failures(tiny_table):
    bad = lemma1_counterexample(tiny_table, 1, Fraction(1, 3))
    assert bad["condition"] == 1 and bad["distance"] == 1
    # repetition of one bit over three packets has distance 3 = 2T+1 for T = 1
    rep = CodeTable.from_pairs(PacketLayout(3, 1, 2), 1, [((0,), ((0,),) * 3), ((1,), ((1,),) * 3)])
    assert verify_lemma1(rep, 1, 0)
    # distance 2T with D = 0 must fail
    rep2 = CodeTable.from_pairs(PacketLayout(2, 1, 2), 1, [((0,), ((0,),) * 2), ((1,), ((1,),) * 2)])
    assert lemma1_counterexample(rep2, 1, 0)["condition"] == 1
    assert not lemma1_by_adversary(rep2, 1, 0)


def test_rep_code_lemma1_and_worst_case():
    code = cons_rep.RepVpecCode(1, 1)
    spec = cons_rep.vpec_spec(code, 2)
    table = CodeTable.from_spec(spec)
    assert verify_lemma1(table, 1, Fraction(1, 3))
    assert not verify_lemma1(table, 1, 0)
    assert worst_case_distortion(spec, 1) == Fraction(1, 3)
    assert worst_case_distortion(spec, 0) == 0
    assert lemma1_by_adversary(table, 1, Fraction(1, 3))


def test_ball_decoder_erasures_on_rep_code():
    code = cons_rep.RepVpecCode(1, 1)
    spec = cons_rep.vpec_spec(code, 3)
    table = CodeTable.from_spec(spec)
    report = run_adversary(table_spec(table, 1, Fraction(1, 3)), 1)
    assert report.wrong_symbol_events == 0
    assert report.max_erasures <= 1


@st.composite
def random_tables(draw):
    layout = PacketLayout(3, 1, 2)
    k = 2
    words = draw(st.lists(st.integers(0, 7), min_size=4, max_size=4))
    pairs = [
        (m, tuple((w >> (2 - j)) & 1 for j in range(3)))
        for m, w in zip(itertools.product(range(2), repeat=k), words)
    ]
    return CodeTable.from_pairs(layout, k, [(m, tuple((b,) for b in p)) for m, p in pairs])


@given(random_tables(), st.integers(0, 2), st.sampled_from([Fraction(0), Fraction(1, 2), Fraction(1)]))
@settings(max_examples=120, deadline=None)
def test_lemma1_equivalence(table, T, D):
    assert verify_lemma1(table, T, D) == lemma1_by_adversary(table, T, D)


def test_table_json_roundtrip(tiny_table):
    doc = table_to_dict(tiny_table, name="tiny")
    back = table_from_dict(doc)
    assert back.messages == tiny_table.messages
    assert np.array_equal(back.words, tiny_table.words)
    assert doc["name"] == "tiny"
    doc["entries"].append(doc["entries"][0])
    with pytest.raises(ValueError):
        table_from_dict(doc)
    with pytest.raises(ValueError):
        table_from_dict({"format": "other"})


@pytest.mark.parametrize("mode", ["random", "swap", "mixed"])
def test_sampled_modes_deterministic(mode):
    spec = cons_rep.vpec_spec(cons_rep.RepVpecCode(2, 2), 3)
    a = run_adversary(spec, 2, mode, seed=5, trials=200)
    b = run_adversary(spec, 2, mode, seed=5, trials=200)
    assert (a.worst, a.total, a.max_erasures, a.worst_case) == (b.worst, b.total, b.max_erasures, b.worst_case)
    assert a.trials == 200 and a.wrong_symbol_events == 0
    assert not a.exhaustive


def test_exhaustive_budget():
    spec = cons_rep.vpec_spec(cons_rep.RepVpecCode(2, 1), 3)
    with pytest.raises(BudgetExceeded):
        run_adversary(spec, 2, budget=1000)
    with pytest.raises(ValueError):
        run_adversary(spec, 2, "psychic")


def test_trace_format():
    spec = cons_rep.vpec_spec(cons_rep.RepVpecCode(1, 1), 2)
    lines = []
    run_adversary(spec, 1, "random", seed=1, trials=5, trace=lines.append)
    assert len(lines) == 5
    for rec in lines:
        assert set(rec) == {"msg", "altered", "values", "output", "distortion"}
        assert len(rec["values"]) == len(rec["altered"])
        num, den = rec["distortion"].split("/")
        assert int(den) > 0 and int(num) >= 0
