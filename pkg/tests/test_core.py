import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ncrelay.core import (
    Payload,
    ScenarioId,
    build_codebook,
    encode_slot,
    slot_plan,
    throughput,
)

ALL = list(ScenarioId)


def test_exactly_seven_scenarios():
    assert len(ALL) == 7
    assert {s.value for s in ALL} == {"n3a", "n3b", "n3c", "n4a", "n4b", "n4c", "n4d"}


def test_from_string_roundtrip_and_error():
    assert ScenarioId.from_string(" N4d ") is ScenarioId.N4D
    with pytest.raises(ValueError, match="n9z"):
        ScenarioId.from_string("n9z")


def test_nodes():
    assert ScenarioId.N3B.nodes == ("S", "R")
    assert ScenarioId.N4C.nodes == ("S", "R", "T")


# -- slot plans --------------------------------------------------------------

def test_slot_counts():
    expected = {"n3a": 2, "n3b": 3, "n3c": 2, "n4a": 3, "n4b": 5, "n4c": 3, "n4d": 4}
    for s in ALL:
        assert len(slot_plan(s)) == expected[s.value]


def test_four_node_hybrid_plan():
    plan = slot_plan(ScenarioId.N4D)
    rows = [(sl.index, sl.tx, sl.payload, sl.energy) for sl in plan]
    assert rows == [
        (1, "S", Payload.SOURCE_BIT, Fraction(1)),
        (2, "R", Payload.FORWARDED_ESTIMATE, Fraction(1, 2)),
        (3, "T", Payload.XOR_ESTIMATE_OWN, Fraction(1)),
        (4, "R", Payload.OWN_BIT, Fraction(1, 2)),
    ]


def test_relay_split_energy_plan():
    plan = slot_plan(ScenarioId.N3B)
    r_slots = [sl for sl in plan if sl.tx == "R"]
    assert [sl.energy for sl in r_slots] == [Fraction(1, 2), Fraction(1, 2)]


def test_every_node_spends_unit_energy():
    # total energy constraint: each node burns exactly E_m per frame
    for s in ALL:
        plan = slot_plan(s)
        for node in s.nodes:
            assert plan.node_energy(node) == 1


def test_joint_vs_standalone_split():
    plan = slot_plan(ScenarioId.N4B)
    assert [sl.index for sl in plan.joint_slots] == [1, 2, 3]
    assert [sl.index for sl in plan.standalone_slots] == [4, 5]
    # non-cooperative plans keep everything in the joint (product) codebook
    assert slot_plan(ScenarioId.N4A).joint_slots == slot_plan(ScenarioId.N4A).slots
    assert slot_plan(ScenarioId.N4A).standalone_slots == ()


# -- throughput --------------------------------------------------------------

def test_throughput_table():
    expected = {
        "n3a": Fraction(1),
        "n3b": Fraction(2, 3),
        "n3c": Fraction(1),
        "n4a": Fraction(1),
        "n4b": Fraction(3, 5),
        "n4c": Fraction(1),
        "n4d": Fraction(3, 4),
    }
    for s in ALL:
        assert throughput(s) == expected[s.value]


def test_network_coding_recovers_throughput():
    assert throughput(ScenarioId.N3C) == throughput(ScenarioId.N3A) == 1
    assert throughput(ScenarioId.N3B) < 1


# -- codebooks ---------------------------------------------------------------

def test_product_codebook_three_nodes():
    cb = build_codebook(ScenarioId.N3A)
    assert cb.free_bits == ("s", "r")
    assert cb.symbol_sets() == {(0, 0), (0, 1), (1, 0), (1, 1)}


def test_xor_codebook_three_nodes():
    cb = build_codebook(ScenarioId.N3C)
    # c = [b_s, b_s ^ b_r], lexicographic in (b_s, b_r)
    assert [w.symbols for w in cb] == [(0, 0), (0, 1), (1, 1), (1, 0)]


def test_hybrid_codebook_four_nodes():
    cb = build_codebook(ScenarioId.N4D)
    assert cb.free_bits == ("s", "t")
    assert cb.symbol_sets() == {(0, 0, 0), (0, 0, 1), (1, 1, 1), (1, 1, 0)}
    for w in cb:
        b_s, b_t = w.bits.b_s, w.bits.b_t
        assert w.symbols == (b_s, b_s, b_s ^ b_t)


def test_codebook_sizes():
    expected = {"n3a": 4, "n3b": 2, "n3c": 4, "n4a": 8, "n4b": 2, "n4c": 8, "n4d": 4}
    for s in ALL:
        cb = build_codebook(s)
        assert len(cb) == expected[s.value]
        assert len(cb) == 2 ** len(cb.free_bits)


def test_codebook_lexicographic_by_free_bits():
    for s in ALL:
        cb = build_codebook(s)
        tuples = [tuple(w.bits.of(n) for n in cb.free_bits) for w in cb]
        assert tuples == sorted(tuples)
        assert tuples == list(itertools.product((0, 1), repeat=len(cb.free_bits)))


def test_codebooks_closed_under_xor():
    # every scenario's map bits -> symbols is linear over GF(2)
    for s in ALL:
        cb = build_codebook(s)
        words = cb.symbol_sets()
        for a, b in itertools.product(cb, repeat=2):
            assert (a ^ b) in words


@settings(max_examples=60, derandomize=True)
@given(st.sampled_from(ALL), st.data())
def test_codeword_reachable_from_unique_bits(scenario, data):
    cb = build_codebook(scenario)
    bits = tuple(data.draw(st.integers(0, 1)) for _ in cb.free_bits)
    matches = [w for w in cb if tuple(w.bits.of(n) for n in cb.free_bits) == bits]
    assert len(matches) == 1


# -- slot encoding -----------------------------------------------------------

def test_encode_slot_rules():
    assert encode_slot(Payload.XOR_ESTIMATE_OWN, own_bit=1, relay_estimate=1) == 0
    assert encode_slot(Payload.XOR_ESTIMATE_OWN, own_bit=1, relay_estimate=0) == 1
    assert encode_slot(Payload.FORWARDED_ESTIMATE, relay_estimate=0) == 0
    assert encode_slot(Payload.SOURCE_BIT, own_bit=1) == 1
    assert encode_slot(Payload.OWN_BIT, own_bit=0) == 0


def test_encode_slot_missing_estimate():
    with pytest.raises(ValueError):
        encode_slot(Payload.FORWARDED_ESTIMATE, own_bit=0)
    with pytest.raises(ValueError):
        encode_slot(Payload.XOR_ESTIMATE_OWN, own_bit=0)
    with pytest.raises(ValueError):
        encode_slot(Payload.SOURCE_BIT)
