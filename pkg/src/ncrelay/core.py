"""Scenario catalog for binary network-coded cooperative relaying.

Seven TDMA topologies are supported. Three-node networks consist of a
source S, a relay R and a destination D; four-node networks add a second
relay T. Every node has one information bit of its own per frame, every
transmission is BPSK, and each node spends exactly one unit of symbol
energy per frame no matter how its slots are split.

    n3a  S, R send their own bits in 2 slots (no cooperation)
    n3b  S sends; R forwards its estimate of S's bit (half energy) and
         its own bit (half energy): 3 slots
    n3c  S sends; R sends estimate-of-S XOR own-bit at full energy: 2 slots
    n4a  S, R, T send their own bits in 3 slots (no cooperation)
    n4b  S sends; R and T each forward their estimate (half energy) and
         their own bit (half energy): 5 slots
    n4c  S sends; R and T each send estimate XOR own-bit: 3 slots
    n4d  S sends; R forwards its estimate (half energy), T sends
         estimate XOR own-bit, R sends its own bit (half energy): 4 slots

Slots whose payload involves the source bit (directly, forwarded, or
XOR-combined) are detected jointly at the destination against a small
codebook; own-data slots appended after a cooperative phase carry no
information about the other bits and are detected on their own.  In the
non-cooperative scenarios every slot is independent, and the codebook is
the full product set (joint detection then factorizes slot by slot).
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterator


class ScenarioId(enum.Enum):
    """Identifier of one of the seven supported relaying scenarios."""

    N3A = "n3a"
    N3B = "n3b"
    N3C = "n3c"
    N4A = "n4a"
    N4B = "n4b"
    N4C = "n4c"
    N4D = "n4d"

    @classmethod
    def from_string(cls, text: str) -> "ScenarioId":
        try:
            return cls(text.strip().lower())
        except ValueError:
            valid = ", ".join(s.value for s in cls)
            raise ValueError(f"unknown scenario {text!r} (expected one of {valid})") from None

    @property
    def nodes(self) -> tuple[str, ...]:
        """Transmitting nodes, in slot-schedule order of first appearance."""
        if self in (ScenarioId.N3A, ScenarioId.N3B, ScenarioId.N3C):
            return ("S", "R")
        return ("S", "R", "T")


class Payload(enum.Enum):
    """What a node puts on the air during one slot."""

    SOURCE_BIT = "source_bit"            # the source's own information bit
    FORWARDED_ESTIMATE = "forwarded_estimate"  # relay's demodulated estimate of the source bit
    XOR_ESTIMATE_OWN = "xor_estimate_own"      # estimate XOR relay's own bit (binary network coding)
    OWN_BIT = "own_bit"                  # relay's own information bit

    @property
    def needs_estimate(self) -> bool:
        return self in (Payload.FORWARDED_ESTIMATE, Payload.XOR_ESTIMATE_OWN)


@dataclass(frozen=True)
class Slot:
    """One TDMA slot: who transmits, what, and with which energy share.

    ``energy`` is the fraction of the per-frame symbol energy budget E_m
    spent on this slot.
    """

    index: int
    tx: str
    payload: Payload
    energy: Fraction


@dataclass(frozen=True)
class SlotPlan:
    """Ordered slot schedule of a scenario."""

    scenario: ScenarioId
    slots: tuple[Slot, ...]

    def __len__(self) -> int:
        return len(self.slots)

    def __iter__(self) -> Iterator[Slot]:
        return iter(self.slots)

    @property
    def cooperative(self) -> bool:
        return any(s.payload.needs_estimate for s in self.slots)

    @property
    def joint_slots(self) -> tuple[Slot, ...]:
        """Slots detected jointly against the codebook.

        Own-data slots that trail a cooperative phase are independent of
        the codebook bits and are excluded; in non-cooperative plans all
        slots enter the (product) codebook.
        """
        if not self.cooperative:
            return self.slots
        return tuple(s for s in self.slots if s.payload is not Payload.OWN_BIT)

    @property
    def standalone_slots(self) -> tuple[Slot, ...]:
        joint = set(s.index for s in self.joint_slots)
        return tuple(s for s in self.slots if s.index not in joint)

    def node_energy(self, node: str) -> Fraction:
        return sum((s.energy for s in self.slots if s.tx == node), Fraction(0))


_F1 = Fraction(1)
_F12 = Fraction(1, 2)

_PLANS: dict[ScenarioId, tuple[tuple[str, Payload, Fraction], ...]] = {
    ScenarioId.N3A: (
        ("S", Payload.SOURCE_BIT, _F1),
        ("R", Payload.OWN_BIT, _F1),
    ),
    ScenarioId.N3B: (
        ("S", Payload.SOURCE_BIT, _F1),
        ("R", Payload.FORWARDED_ESTIMATE, _F12),
        ("R", Payload.OWN_BIT, _F12),
    ),
    ScenarioId.N3C: (
        ("S", Payload.SOURCE_BIT, _F1),
        ("R", Payload.XOR_ESTIMATE_OWN, _F1),
    ),
    ScenarioId.N4A: (
        ("S", Payload.SOURCE_BIT, _F1),
        ("R", Payload.OWN_BIT, _F1),
        ("T", Payload.OWN_BIT, _F1),
    ),
    ScenarioId.N4B: (
        ("S", Payload.SOURCE_BIT, _F1),
        ("R", Payload.FORWARDED_ESTIMATE, _F12),
        ("T", Payload.FORWARDED_ESTIMATE, _F12),
        ("R", Payload.OWN_BIT, _F12),
        ("T", Payload.OWN_BIT, _F12),
    ),
    ScenarioId.N4C: (
        ("S", Payload.SOURCE_BIT, _F1),
        ("R", Payload.XOR_ESTIMATE_OWN, _F1),
        ("T", Payload.XOR_ESTIMATE_OWN, _F1),
    ),
    ScenarioId.N4D: (
        ("S", Payload.SOURCE_BIT, _F1),
        ("R", Payload.FORWARDED_ESTIMATE, _F12),
        ("T", Payload.XOR_ESTIMATE_OWN, _F1),
        ("R", Payload.OWN_BIT, _F12),
    ),
}


@lru_cache(maxsize=None)
def slot_plan(scenario: ScenarioId) -> SlotPlan:
    """The slot schedule of ``scenario`` (slot indices are 1-based)."""
    rows = _PLANS[scenario]
    slots = tuple(Slot(i + 1, tx, payload, energy) for i, (tx, payload, energy) in enumerate(rows))
    return SlotPlan(scenario, slots)


@dataclass(frozen=True)
class InformationBits:
    """Per-node information bits of one frame; absent nodes stay ``None``."""

    b_s: int | None = None
    b_r: int | None = None
    b_t: int | None = None

    def of(self, name: str) -> int | None:
        return {"s": self.b_s, "r": self.b_r, "t": self.b_t}[name]

    def present(self) -> tuple[str, ...]:
        return tuple(n for n in ("s", "r", "t") if self.of(n) is not None)


@dataclass(frozen=True)
class Codeword:
    """Symbols of the jointly detected slots plus the bits that generate them."""

    scenario: ScenarioId
    symbols: tuple[int, ...]
    bits: InformationBits

    def __xor__(self, other: "Codeword") -> tuple[int, ...]:
        return tuple(a ^ b for a, b in zip(self.symbols, other.symbols))


@dataclass(frozen=True)
class Codebook:
    """All joint-slot codewords of a scenario, lexicographic in the free bits."""

    scenario: ScenarioId
    codewords: tuple[Codeword, ...]
    free_bits: tuple[str, ...]

    def __len__(self) -> int:
        return len(self.codewords)

    def __iter__(self) -> Iterator[Codeword]:
        return iter(self.codewords)

    def symbol_sets(self) -> set[tuple[int, ...]]:
        return {c.symbols for c in self.codewords}


def _slot_symbol(slot: Slot, bits: dict[str, int]) -> int:
    """Clean-codeword symbol of a joint slot (relay estimates error free)."""
    if slot.payload is Payload.SOURCE_BIT:
        return bits["s"]
    if slot.payload is Payload.FORWARDED_ESTIMATE:
        return bits["s"]
    if slot.payload is Payload.XOR_ESTIMATE_OWN:
        return bits["s"] ^ bits[slot.tx.lower()]
    return bits[slot.tx.lower()]  # OWN_BIT


@lru_cache(maxsize=None)
def build_codebook(scenario: ScenarioId) -> Codebook:
    """Enumerate the joint-detection codebook of ``scenario``.

    Free bits are the information bits that influence at least one joint
    slot; the codebook holds exactly one codeword per free-bit tuple.
    """
    plan = slot_plan(scenario)
    joint = plan.joint_slots

    free: list[str] = []
    for name in ("s", "r", "t"):
        for slot in joint:
            if slot.payload is Payload.SOURCE_BIT and name == "s":
                break
            if slot.payload is Payload.FORWARDED_ESTIMATE and name == "s":
                break
            if slot.payload is Payload.XOR_ESTIMATE_OWN and name in ("s", slot.tx.lower()):
                break
            if slot.payload is Payload.OWN_BIT and name == slot.tx.lower():
                break
        else:
            continue
        free.append(name)

    words = []
    seen: dict[tuple[int, ...], tuple[int, ...]] = {}
    for combo in itertools.product((0, 1), repeat=len(free)):
        bits = dict(zip(free, combo))
        symbols = tuple(_slot_symbol(s, bits) for s in joint)
        if symbols in seen:
            raise RuntimeError(f"codebook of {scenario} is not injective: {symbols}")
        seen[symbols] = combo
        words.append(Codeword(scenario, symbols, InformationBits(**{f"b_{n}": b for n, b in bits.items()})))
    return Codebook(scenario, tuple(words), tuple(free))


def throughput(scenario: ScenarioId) -> Fraction:
    """Information bits delivered per slot (sum over all nodes)."""
    plan = slot_plan(scenario)
    n_bits = len(scenario.nodes)
    return Fraction(n_bits, len(plan))


def encode_slot(payload: Payload, own_bit: int | None = None, relay_estimate: int | None = None):
    """Binary symbol actually transmitted in a slot.

    ``own_bit`` is the transmitter's own information bit; slots that
    re-encode the source bit take the transmitter's demodulated estimate
    through ``relay_estimate``.  Arguments may be numpy integer arrays.
    """
    if payload.needs_estimate and relay_estimate is None:
        raise ValueError(f"{payload.value} requires a relay estimate")
    if payload is Payload.FORWARDED_ESTIMATE:
        return relay_estimate
    if own_bit is None:
        raise ValueError(f"{payload.value} requires the transmitter's own bit")
    if payload is Payload.XOR_ESTIMATE_OWN:
        return relay_estimate ^ own_bit
    return own_bit  # SOURCE_BIT and OWN_BIT both send the transmitter's own bit
