"""Rayleigh block-fading channel, BPSK transmission and seeded sampling.

Links are directed and named by endpoint pair: ``sd``, ``sr``, ``st``,
``rd``, ``td``.  Each gain h_XY is circularly symmetric complex Gaussian
with zero mean and variance sigma2_XY per real dimension, so
E[|h_XY|^2] = 2 sigma2_XY.  Fading is block fading: one realization per
frame, shared by every slot of that frame.

Instantaneous and average link SNR follow the full-energy convention

    gamma_XY    = |h_XY|^2 (E_m/N_0)
    gammabar_XY = 2 sigma2_XY (E_m/N_0)

independently of how much of E_m a given slot actually spends; slot
energies enter the transmitted waveform, not the SNR bookkeeping.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Mapping

import numpy as np

from .core import ScenarioId

LINK_NAMES: tuple[str, ...] = ("sd", "sr", "st", "rd", "td")

_SCENARIO_LINKS: dict[ScenarioId, tuple[str, ...]] = {
    ScenarioId.N3A: ("sd", "rd"),
    ScenarioId.N3B: ("sd", "sr", "rd"),
    ScenarioId.N3C: ("sd", "sr", "rd"),
    ScenarioId.N4A: ("sd", "rd", "td"),
    ScenarioId.N4B: ("sd", "sr", "st", "rd", "td"),
    ScenarioId.N4C: ("sd", "sr", "st", "rd", "td"),
    ScenarioId.N4D: ("sd", "sr", "st", "rd", "td"),
}


def scenario_links(scenario: ScenarioId) -> tuple[str, ...]:
    """Directed links a scenario actually uses, in canonical sampling order."""
    return _SCENARIO_LINKS[scenario]


@dataclass(frozen=True)
class FadingProfile:
    """Per-link fading variances together with the operating E_m/N_0 (linear)."""

    em_n0: float
    sigma2: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self):
        if not self.em_n0 > 0.0:
            raise ValueError(f"em_n0 must be positive, got {self.em_n0}")
        clean = {}
        for link, value in dict(self.sigma2).items():
            if link not in LINK_NAMES:
                raise ValueError(f"unknown link {link!r} (expected one of {LINK_NAMES})")
            if not value > 0.0:
                raise ValueError(f"sigma2[{link!r}] must be positive, got {value}")
            clean[link] = float(value)
        object.__setattr__(self, "sigma2", MappingProxyType(clean))

    def sigma2_of(self, link: str) -> float:
        """Per-dimension variance of one link; unset links default to 1.0."""
        if link not in LINK_NAMES:
            raise ValueError(f"unknown link {link!r}")
        return self.sigma2.get(link, 1.0)


@dataclass(frozen=True)
class AvgSnr:
    """Average SNR gammabar_XY = 2 sigma2_XY (E_m/N_0) per link."""

    gamma: Mapping[str, float]

    @classmethod
    def from_profile(cls, profile: FadingProfile, links: tuple[str, ...] = LINK_NAMES) -> "AvgSnr":
        return cls(MappingProxyType({l: 2.0 * profile.sigma2_of(l) * profile.em_n0 for l in links}))

    def __getitem__(self, link: str) -> float:
        return self.gamma[link]


@dataclass(frozen=True)
class RngStream:
    """Value identifying one reproducible random stream.

    Two generators built from equal streams yield identical draws.  The
    key tuple is hashed through numpy's SeedSequence spawn mechanism, so
    distinct keys give statistically independent streams under one seed.
    """

    seed: int
    key: tuple[int, ...] = ()

    def generator(self) -> np.random.Generator:
        return np.random.default_rng(np.random.SeedSequence(self.seed, spawn_key=self.key))


@dataclass(frozen=True)
class ChannelRealization:
    """Block-fading gains and instantaneous SNRs for one frame (or a batch)."""

    h: Mapping[str, np.ndarray]
    gamma: Mapping[str, np.ndarray]


def sample_channel(
    profile: FadingProfile,
    links: tuple[str, ...],
    rng: np.random.Generator,
    size: int | None = None,
) -> ChannelRealization:
    """Draw one block-fading realization per frame for the given links.

    Consumes the generator in a fixed order (links as listed; real parts
    before imaginary parts) so that equal streams reproduce bit-identical
    realizations.
    """
    h: dict[str, np.ndarray] = {}
    gamma: dict[str, np.ndarray] = {}
    for link in links:
        scale = np.sqrt(profile.sigma2_of(link))
        re = rng.normal(0.0, scale, size=size)
        im = rng.normal(0.0, scale, size=size)
        gain = re + 1j * im
        h[link] = gain
        gamma[link] = (re * re + im * im) * profile.em_n0
    return ChannelRealization(MappingProxyType(h), MappingProxyType(gamma))


def sample_awgn(n0: float, rng: np.random.Generator, size: int | None = None) -> np.ndarray:
    """Complex AWGN with variance N_0/2 per real dimension (N_0 = 0 gives zeros)."""
    if n0 < 0.0:
        raise ValueError(f"noise level must be nonnegative, got {n0}")
    scale = np.sqrt(n0 / 2.0)
    return rng.normal(0.0, scale, size=size) + 1j * rng.normal(0.0, scale, size=size)


def transmit_bpsk(symbol, energy: float, h, noise):
    """Received sample y = sqrt(E) h (1 - 2 b) + n for binary symbol b."""
    return np.sqrt(energy) * h * (1 - 2 * symbol) + noise
