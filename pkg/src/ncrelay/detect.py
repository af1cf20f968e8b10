"""Relay and destination detection.

Relays demodulate the source broadcast by per-link ML.  The destination
runs a reliability-weighted joint metric over the scenario codebook
(cooperative maximum-ratio combining): branches carried by a relay are
scaled by lambda = min(gamma_source_relay, gamma_relay_dest) /
gamma_relay_dest, which throttles a relay branch down to the quality of
the worst hop, while branches transmitted by the node that owns the bit
keep unit weight.  Trailing own-data slots are detected standalone.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .core import (
    Codebook,
    InformationBits,
    ScenarioId,
    build_codebook,
    slot_plan,
)


def relay_ml(y, h, energy: float, n0: float = 1.0):
    """ML demodulation of one BPSK slot: argmin_b |y - sqrt(E) h (1-2b)|^2.

    Reduces to the sign of Re{h* y}; the energy and noise scales cannot
    change a binary antipodal decision.  Ties resolve to 0.  Inputs may
    be numpy arrays (elementwise decisions).
    """
    if not energy > 0.0:
        raise ValueError(f"slot energy must be positive, got {energy}")
    if not n0 > 0.0:
        raise ValueError(f"noise level must be positive, got {n0}")
    corr = np.real(np.conj(h) * y)
    return np.where(corr >= 0.0, 0, 1) if np.ndim(corr) else (0 if corr >= 0.0 else 1)


def detect_own_bit(y, h, energy: float, n0: float = 1.0):
    """Standalone ML detection of a relay's own-data slot (same rule as relay_ml)."""
    return relay_ml(y, h, energy, n0)


def cmrc_lambda(gamma_sr, gamma_rd):
    """Reliability weight min(gamma_sr, gamma_rd) / gamma_rd of a relayed branch.

    Equals 1 whenever the incoming hop is at least as good as the outgoing
    one, and decays like gamma_sr / gamma_rd when the relay's own reception
    is the bottleneck.
    """
    gamma_sr = np.asarray(gamma_sr, dtype=float) if np.ndim(gamma_sr) else float(gamma_sr)
    if np.any(np.asarray(gamma_sr) < 0.0):
        raise ValueError("gamma_sr must be nonnegative")
    if np.any(np.asarray(gamma_rd) <= 0.0):
        raise ValueError("gamma_rd must be positive")
    return np.minimum(gamma_sr, gamma_rd) / gamma_rd


@dataclass(frozen=True)
class RelayDecision:
    """A relay's demodulated source bit, with simulation-side bookkeeping."""

    node: str
    estimate: int
    correct: bool | None = None


@dataclass(frozen=True)
class ReceivedFrame:
    """Destination observations of the jointly detected slots.

    ``y`` has the slot axis last; a leading axis, when present, runs over
    frames.  ``energies`` are the absolute per-slot symbol energies.
    """

    scenario: ScenarioId
    y: np.ndarray
    energies: tuple[float, ...]


@dataclass(frozen=True)
class CsiAtDestination:
    """Channel state the destination uses: per-slot gains and weights.

    ``h`` holds the gain of each joint slot's transmitter-to-destination
    link (aligned with the slot order of the frame), ``lam`` the per-slot
    combining weights.  The instantaneous source-relay SNRs the weights
    were derived from may be kept for bookkeeping.
    """

    h: np.ndarray
    lam: np.ndarray
    gamma_sr: np.ndarray | None = None
    gamma_st: np.ndarray | None = None


@lru_cache(maxsize=None)
def _codebook_arrays(scenario: ScenarioId):
    """Symbol matrix (K codewords x L slots), tie-break ranks, and bit columns."""
    cb: Codebook = build_codebook(scenario)
    symbols = np.array([c.symbols for c in cb.codewords], dtype=np.int8)
    # ties resolve to the smallest codeword in symbol order, which may
    # differ from the free-bit enumeration order of the codebook
    order = sorted(range(len(cb)), key=lambda k: cb.codewords[k].symbols)
    rank = np.empty(len(cb), dtype=np.int64)
    for r, k in enumerate(order):
        rank[k] = r
    bit_cols = {name: np.array([c.bits.of(name) for c in cb.codewords], dtype=np.int8) for name in cb.free_bits}
    return cb, symbols, rank, bit_cols


def joint_metrics(scenario: ScenarioId, y: np.ndarray, h: np.ndarray, lam: np.ndarray, energies, n0: float) -> np.ndarray:
    """Codebook metrics sum_slots lam |y - sqrt(E) h (1-2c)|^2 / N_0.

    Returns shape ``(..., K)`` for ``y`` of shape ``(..., L)``.
    """
    _, symbols, _, _ = _codebook_arrays(scenario)
    n_codewords, n_slots = symbols.shape
    y = np.asarray(y)
    if y.shape[-1] != n_slots:
        raise ValueError(f"expected {n_slots} joint slots for {scenario}, got {y.shape[-1]}")
    h = np.broadcast_to(np.asarray(h), y.shape)
    lam = np.broadcast_to(np.asarray(lam, dtype=float), y.shape)
    amp = np.sqrt(np.asarray(energies, dtype=float))
    metrics = np.zeros(y.shape[:-1] + (n_codewords,), dtype=float)
    for k in range(n_codewords):
        acc = 0.0
        for s in range(n_slots):
            diff = y[..., s] - amp[s] * h[..., s] * (1 - 2 * int(symbols[k, s]))
            acc = acc + lam[..., s] * (diff.real * diff.real + diff.imag * diff.imag)
        metrics[..., k] = acc / n0
    return metrics


def _decide(scenario: ScenarioId, metrics: np.ndarray) -> dict[str, np.ndarray]:
    cb, _, rank, bit_cols = _codebook_arrays(scenario)
    best = np.min(metrics, axis=-1, keepdims=True)
    tied_rank = np.where(metrics == best, rank, np.iinfo(np.int64).max)
    choice_rank = np.min(tied_rank, axis=-1)
    # invert the rank permutation to recover the codebook index
    inverse = np.argsort(rank)
    idx = inverse[choice_rank]
    return {name: col[idx] for name, col in bit_cols.items()}


def destination_detect_batch(
    scenario: ScenarioId,
    y: np.ndarray,
    h: np.ndarray,
    lam: np.ndarray,
    energies,
    n0: float = 1.0,
) -> dict[str, np.ndarray]:
    """Joint C-MRC detection over a batch of frames.

    Returns one decided-bit array per free bit of the codebook, keyed by
    the lowercase node letter.
    """
    if not n0 > 0.0:
        raise ValueError(f"noise level must be positive, got {n0}")
    metrics = joint_metrics(scenario, y, h, lam, energies, n0)
    return _decide(scenario, metrics)


def destination_detect(scenario: ScenarioId, frame: ReceivedFrame, csi: CsiAtDestination, n0: float = 1.0) -> InformationBits:
    """Joint C-MRC detection of a single frame's codebook bits."""
    decided = destination_detect_batch(scenario, frame.y, csi.h, csi.lam, frame.energies, n0)
    return InformationBits(**{f"b_{name}": int(np.asarray(bit).item()) for name, bit in decided.items()})


def slot_weights(scenario: ScenarioId, gamma: dict[str, np.ndarray]) -> list:
    """Per-joint-slot combining weights from instantaneous full-energy SNRs."""
    weights = []
    for slot in slot_plan(scenario).joint_slots:
        if slot.payload.needs_estimate:
            node = slot.tx.lower()
            weights.append(cmrc_lambda(gamma["s" + node], gamma[node + "d"]))
        else:
            weights.append(1.0)
    return weights


def joint_slot_links(scenario: ScenarioId) -> tuple[str, ...]:
    """Destination-incident link of each joint slot, in slot order."""
    return tuple(s.tx.lower() + "d" for s in slot_plan(scenario).joint_slots)


def joint_slot_energies(scenario: ScenarioId, em: float) -> tuple[float, ...]:
    """Absolute symbol energy of each joint slot for a frame budget ``em``."""
    return tuple(float(s.energy) * em for s in slot_plan(scenario).joint_slots)
