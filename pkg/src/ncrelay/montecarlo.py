"""Monte Carlo bit error rate estimation for the TDMA relay scenarios.

Frames are simulated in fixed-size blocks.  Every block owns a private
random stream keyed by (snr_key, block_index) under the experiment seed,
and blocks are always consumed in index order, so results are bit
identical for any worker count and for any ordering of the swept
operating points.

Draw order inside a block (one generator, documented so the stream stays
reproducible across refactors):

1. information bits, one array per present node, in node order;
2. fading gains, per link in canonical link order, real parts before
   imaginary parts;
3. relay-reception noise, one array per demodulating relay, in node
   order;
4. destination noise, one array per slot, in slot order.
"""

from __future__ import annotations

import math
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .channel import (
    FadingProfile,
    RngStream,
    sample_awgn,
    sample_channel,
    scenario_links,
    transmit_bpsk,
)
from .core import Payload, ScenarioId, encode_slot, slot_plan
from .detect import destination_detect_batch, detect_own_bit, relay_ml, slot_weights

# 95% two-sided normal quantile used for all confidence intervals
Z_95 = 1.959963984540054

DEFAULT_MIN_ERRORS = 200
DEFAULT_MAX_FRAMES = 10**8
DEFAULT_BLOCK_FRAMES = 1 << 16


def wilson_interval(errors: int, trials: int, z: float = Z_95) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion.

    Stays inside (0, 1) and remains informative at zero observed errors,
    where the upper limit is about z^2 / trials.
    """
    if trials <= 0:
        raise ValueError(f"trials must be positive, got {trials}")
    if not 0 <= errors <= trials:
        raise ValueError(f"errors must lie in [0, {trials}], got {errors}")
    p = errors / trials
    zz = z * z / trials
    denom = 1.0 + zz
    center = (p + zz / 2.0) / denom
    half = (z / denom) * math.sqrt(p * (1.0 - p) / trials + zz / (4.0 * trials))
    # the limits are exactly 0 and 1 at the boundary counts; the
    # cancellation center -+ half only reproduces that up to rounding
    lo = 0.0 if errors == 0 else max(center - half, 0.0)
    hi = 1.0 if errors == trials else min(center + half, 1.0)
    return lo, hi


@dataclass(frozen=True)
class SimConfig:
    """One simulation run: a scenario swept over E_m/N_0 operating points."""

    scenario: ScenarioId
    snr_db: tuple[float, ...]
    sigma2: Mapping[str, float] = field(default_factory=dict)
    seed: int = 0
    min_errors: int = DEFAULT_MIN_ERRORS
    max_frames: int = DEFAULT_MAX_FRAMES
    block_frames: int = DEFAULT_BLOCK_FRAMES
    workers: int = 1


@dataclass(frozen=True)
class BerEstimate:
    """Estimated bit error rate of one node at one operating point."""

    scenario: ScenarioId
    node: str
    em_n0_db: float
    trials: int
    errors: int
    target_errors: int = DEFAULT_MIN_ERRORS

    @property
    def ber(self) -> float:
        return self.errors / self.trials

    @property
    def ci(self) -> tuple[float, float]:
        return wilson_interval(self.errors, self.trials)

    @property
    def resolved(self) -> bool:
        """Whether the error target was met (rather than the frame cap)."""
        return self.errors >= self.target_errors


def snr_stream_key(em_n0_db: float) -> int:
    """Stable integer stream key of an operating point (microdecibel grid)."""
    return int(round(em_n0_db * 1e6))


def _simulate_block(
    scenario: ScenarioId,
    profile: FadingProfile,
    rng: np.random.Generator,
    n_frames: int,
    n0: float = 1.0,
) -> dict[str, int]:
    """Simulate ``n_frames`` frames; return per-node bit error counts."""
    plan = slot_plan(scenario)
    em = profile.em_n0 * n0
    letters = tuple(n.lower() for n in scenario.nodes)

    bits = {x: rng.integers(0, 2, size=n_frames, dtype=np.int8) for x in letters}
    chan = sample_channel(profile, scenario_links(scenario), rng, size=n_frames)

    # relays demodulate the source broadcast slot before retransmitting
    estimates: dict[str, np.ndarray] = {}
    demodulating = tuple(
        x for x in ("r", "t") if any(s.tx.lower() == x and s.payload.needs_estimate for s in plan)
    )
    if demodulating:
        src = next(s for s in plan if s.payload is Payload.SOURCE_BIT)
        e_src = float(src.energy) * em
        for x in demodulating:
            noise = sample_awgn(n0, rng, size=n_frames)
            y_relay = transmit_bpsk(bits["s"], e_src, chan.h["s" + x], noise)
            estimates[x] = relay_ml(y_relay, chan.h["s" + x], e_src, n0)

    y_slots = []
    for slot in plan:
        x = slot.tx.lower()
        symbol = encode_slot(slot.payload, own_bit=bits[x], relay_estimate=estimates.get(x))
        noise = sample_awgn(n0, rng, size=n_frames)
        y_slots.append(transmit_bpsk(symbol, float(slot.energy) * em, chan.h[x + "d"], noise))

    joint = plan.joint_slots
    y = np.stack([y_slots[s.index - 1] for s in joint], axis=-1)
    h = np.stack([chan.h[s.tx.lower() + "d"] for s in joint], axis=-1)
    lam = np.stack(
        [np.broadcast_to(np.asarray(w, dtype=float), (n_frames,)) for w in slot_weights(scenario, chan.gamma)],
        axis=-1,
    )
    energies = [float(s.energy) * em for s in joint]
    decided = destination_detect_batch(scenario, y, h, lam, energies, n0)

    for slot in plan.standalone_slots:
        x = slot.tx.lower()
        decided[x] = detect_own_bit(y_slots[slot.index - 1], chan.h[x + "d"], float(slot.energy) * em, n0)

    return {x.upper(): int(np.count_nonzero(decided[x] != bits[x])) for x in letters}


def run_point(
    scenario: ScenarioId | str,
    em_n0_db: float,
    sigma2: Mapping[str, float] | None = None,
    *,
    seed: int = 0,
    min_errors: int = DEFAULT_MIN_ERRORS,
    max_frames: int = DEFAULT_MAX_FRAMES,
    block_frames: int = DEFAULT_BLOCK_FRAMES,
    workers: int = 1,
    stop_nodes: Sequence[str] | None = None,
) -> list[BerEstimate]:
    """Estimate every node's BER at one operating point.

    Blocks are simulated until each node has accumulated ``min_errors``
    bit errors or ``max_frames`` frames have been consumed, whichever
    comes first.  The stop rule is evaluated in block order, so the
    outcome does not depend on ``workers``.  ``stop_nodes`` restricts the
    error target to a subset of nodes (all nodes still get estimates);
    useful when one node's bit is orders of magnitude more reliable.
    """
    if isinstance(scenario, str):
        scenario = ScenarioId.from_string(scenario)
    if block_frames <= 0:
        raise ValueError(f"block_frames must be positive, got {block_frames}")
    if max_frames <= 0:
        raise ValueError(f"max_frames must be positive, got {max_frames}")
    profile = FadingProfile(em_n0=10.0 ** (em_n0_db / 10.0), sigma2=dict(sigma2 or {}))
    key = snr_stream_key(em_n0_db)
    nodes = scenario.nodes
    tracked = nodes if stop_nodes is None else tuple(n.upper() for n in stop_nodes)
    if unknown := set(tracked) - set(nodes):
        raise ValueError(f"stop_nodes {sorted(unknown)} not transmitters of {scenario.value}")

    n_blocks = -(-max_frames // block_frames)

    def sizes(i: int) -> int:
        return min(block_frames, max_frames - i * block_frames)

    def block(i: int) -> dict[str, int]:
        rng = RngStream(seed, key=(key, i)).generator()
        return _simulate_block(scenario, profile, rng, sizes(i))

    errors = {n: 0 for n in nodes}
    trials = 0
    next_i = 0
    pending: deque = deque()
    with ThreadPoolExecutor(max_workers=max(workers, 1)) as pool:
        while True:
            while len(pending) < max(workers, 1) and next_i < n_blocks:
                pending.append((next_i, pool.submit(block, next_i)))
                next_i += 1
            if not pending:
                break
            i, fut = pending.popleft()
            counts = fut.result()
            trials += sizes(i)
            for n in nodes:
                errors[n] += counts[n]
            if all(errors[n] >= min_errors for n in tracked):
                break
    return [BerEstimate(scenario, n, em_n0_db, trials, errors[n], min_errors) for n in nodes]


def run_sweep(
    scenario: ScenarioId | str,
    snr_db: Sequence[float],
    sigma2: Mapping[str, float] | None = None,
    *,
    seed: int = 0,
    min_errors: int = DEFAULT_MIN_ERRORS,
    max_frames: int = DEFAULT_MAX_FRAMES,
    block_frames: int = DEFAULT_BLOCK_FRAMES,
    workers: int = 1,
) -> list[BerEstimate]:
    """Sweep the operating point; flat result list ordered (point, node).

    Each point draws from its own stream family, so permuting ``snr_db``
    permutes the output rows without changing any estimate.
    """
    out: list[BerEstimate] = []
    for db in snr_db:
        out.extend(
            run_point(
                scenario,
                db,
                sigma2,
                seed=seed,
                min_errors=min_errors,
                max_frames=max_frames,
                block_frames=block_frames,
                workers=workers,
            )
        )
    return out


def run_config(config: SimConfig) -> list[BerEstimate]:
    """Run a full simulation described by a :class:`SimConfig`."""
    return run_sweep(
        config.scenario,
        config.snr_db,
        config.sigma2,
        seed=config.seed,
        min_errors=config.min_errors,
        max_frames=config.max_frames,
        block_frames=config.block_frames,
        workers=config.workers,
    )
