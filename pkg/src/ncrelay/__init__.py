"""Link-level simulation and asymptotic error analysis of binary
network-coded cooperative relaying over Rayleigh block fading.

Seven TDMA scenarios with one source, one or two relays carrying their
own traffic, and a common destination.  Relays either repeat their own
data, forward demodulated source bits, or transmit the XOR of both; the
destination runs a reliability-weighted joint ML detector over each
frame's codebook.  The analytic side provides leading-order ABEP
expressions and a numerical Laplace inversion of the pairwise error
probability integrals behind them.
"""

from .channel import AvgSnr, FadingProfile, RngStream
from .core import Codebook, Payload, ScenarioId, build_codebook, slot_plan, throughput
from .montecarlo import BerEstimate, SimConfig, run_config, run_point, run_sweep, wilson_interval

__all__ = [
    "AvgSnr",
    "BerEstimate",
    "Codebook",
    "FadingProfile",
    "Payload",
    "RngStream",
    "ScenarioId",
    "SimConfig",
    "build_codebook",
    "run_config",
    "run_point",
    "run_sweep",
    "slot_plan",
    "throughput",
    "wilson_interval",
]

__version__ = "0.1.0"
