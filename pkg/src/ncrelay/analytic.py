"""Closed-form high-SNR error analysis and pairwise error probabilities.

The destination's codebook detector is analyzed through pairwise error
probabilities (PEP) conditioned on which relays demodulated the source
bit correctly.  Conditioning cases are weighted by products of
Q(sqrt(2 gamma)) relay error probabilities, and each conditioned PEP is
averaged over Rayleigh fading by numerically inverting its
moment-generating function along a vertical line in the complex plane.
At high SNR every conditioned average collapses onto integrals of the
family

    (1/2 pi j) Int s^-m (1-s)^-p  prod_k [1 - (1 + s dhat_k)^(-1/2)] ds

taken over Re(s) = delta with 0 < delta < 1 and every 1 + delta dhat_k
positive.  The double-bracket member with m = 4, p = 1 gives the
both-relays-wrong term of the four-node scenarios; the module also
carries the scenario ABEP leading-term table and a Monte Carlo PEP
estimator used as an independent cross-check of the analytics.

Union-bound averaging over the codebook then yields per-node ABEP
predictions whose slopes equal the per-term diversity orders.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Mapping, Sequence

import numpy as np
from scipy import special

from .channel import FadingProfile, sample_awgn, sample_channel, scenario_links, transmit_bpsk
from .core import Codebook, Codeword, Payload, ScenarioId, build_codebook, encode_slot, slot_plan
from .detect import cmrc_lambda, relay_ml

CASES: tuple[str, ...] = ("ok-ok", "ok-nok", "nok-ok", "nok-nok")

#: coefficient of the both-relays-wrong cubic term of the five-slot
#: four-node scheme, kept as a rounded reference constant; a fresh
#: saddle-point evaluation of the underlying double-bracket integral
#: gives a smaller value, so the two are deliberately not tied together
K1 = 0.4853

#: exact coefficient of the one-relay-wrong cubic terms of the same scheme
K2 = (525.0 + 11.0 * math.sqrt(5.0)) / 800.0

#: exact coefficient of the relay-decode-error quadratic term of the
#: decode-and-forward schemes (three-node and hybrid four-node)
SINGLE_RELAY_NOK = (45.0 + math.sqrt(5.0)) / 160.0


def q_func(x):
    """Gaussian tail probability Q(x) = 0.5 erfc(x / sqrt(2)); array friendly."""
    return 0.5 * special.erfc(np.asarray(x, dtype=float) / math.sqrt(2.0)) if np.ndim(x) else 0.5 * math.erfc(x / math.sqrt(2.0))


def exact_rayleigh_bpsk(gbar: float) -> float:
    """Exact BPSK bit error probability over one Rayleigh link of average SNR gbar."""
    if gbar < 0.0:
        raise ValueError(f"average SNR must be nonnegative, got {gbar}")
    return 0.5 * (1.0 - math.sqrt(gbar / (1.0 + gbar)))


def relay_error_probs(gamma_sr, gamma_st):
    """Probabilities of the four relay-correctness cases given instantaneous SNRs.

    Order: (ok-ok, ok-nok, nok-ok, nok-nok), the first flag describing
    relay R and the second relay T.  Inputs may be arrays.
    """
    p_r = q_func(np.sqrt(2.0 * np.asarray(gamma_sr, dtype=float)))
    p_t = q_func(np.sqrt(2.0 * np.asarray(gamma_st, dtype=float)))
    if np.ndim(p_r) == 0:
        p_r, p_t = float(p_r), float(p_t)
    return ((1 - p_r) * (1 - p_t), (1 - p_r) * p_t, p_r * (1 - p_t), p_r * p_t)


# ---------------------------------------------------------------------------
# pairwise decision-variable coefficients
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PairwiseCoefficients:
    """Signed level differences of a codeword pair, per destination branch.

    ``d_*`` in {0, +-2} are twice the symbol differences of the S, R and T
    slots; ``dhat_*`` in {0, +-4} fold in the hypothesized relay estimate
    (positive when the relay re-encoded the true codeword, negative when
    it erred).  d and dhat vanish together branch by branch.
    """

    d_s: int
    d_r: int
    d_t: int
    dhat_r: int
    dhat_t: int
    case: str


def pairwise_coeffs(c: Codeword, c_alt: Codeword, case: str) -> PairwiseCoefficients:
    """Branch coefficients of the pair (c -> c_alt) under one relay case.

    The case string names relay R first and relay T second; the second
    flag is ignored in scenarios whose codebook has no T branch.
    """
    if case not in CASES:
        raise ValueError(f"unknown case {case!r} (expected one of {CASES})")
    if c.scenario is not c_alt.scenario:
        raise ValueError("codewords come from different scenarios")
    ok = {"R": case.split("-")[0] == "ok", "T": case.split("-")[1] == "ok"}
    b_s = c.bits.b_s
    if b_s is None:
        raise ValueError("transmitted codeword carries no source bit")

    d = {"S": 0, "R": 0, "T": 0}
    dhat = {"R": 0, "T": 0}
    for i, slot in enumerate(slot_plan(c.scenario).joint_slots):
        diff = 2 * (c_alt.symbols[i] - c.symbols[i])
        d[slot.tx] = diff
        if slot.tx == "S":
            continue
        if slot.payload is Payload.FORWARDED_ESTIMATE:
            est = b_s if ok[slot.tx] else 1 - b_s
            dhat[slot.tx] = 2 * (1 - 2 * est) * diff
        elif slot.payload is Payload.XOR_ESTIMATE_OWN:
            own = c.bits.of(slot.tx.lower())
            est = b_s if ok[slot.tx] else 1 - b_s
            dhat[slot.tx] = 2 * (1 - 2 * (est ^ own)) * diff
        else:  # OWN_BIT inside a product codebook: the sender knows its bit
            own = c.bits.of(slot.tx.lower())
            dhat[slot.tx] = 2 * (1 - 2 * own) * diff
    return PairwiseCoefficients(d["S"], d["R"], d["T"], dhat["R"], dhat["T"], case)


# ---------------------------------------------------------------------------
# contour quadrature
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ContourSpec:
    """Vertical-line quadrature plan for the MGF inversion integrals.

    ``delta`` is the abscissa Re(s); it must satisfy 0 < delta < 1 and
    1 + delta*dhat > 0 for every negative bracket argument.  ``None``
    picks half the distance to the nearest constraint, capped at 0.4.
    ``t_max`` truncates the imaginary axis where the integrand's
    |s|^-(m+p) envelope bounds the tail below 1e-9.
    """

    delta: float | None = None
    t_max: float | None = None
    nodes: int = 24
    rel_tol: float = 1e-6
    max_doublings: int = 5

    def resolve_delta(self, dhats: Sequence[float]) -> float:
        limit = 1.0
        for d in dhats:
            if d < 0.0:
                limit = min(limit, -1.0 / d)
        if self.delta is None:
            return min(0.4, 0.5 * limit)
        if not 0.0 < self.delta < 1.0:
            raise ValueError(f"contour abscissa must lie in (0, 1), got {self.delta}")
        if self.delta >= limit:
            raise ValueError(
                f"contour abscissa {self.delta} crosses the branch cut of a bracket "
                f"(need delta < {limit})"
            )
        return self.delta

    def resolve_t_max(self, total_power: int) -> float:
        if self.t_max is not None:
            if not self.t_max > 0.0:
                raise ValueError(f"t_max must be positive, got {self.t_max}")
            return self.t_max
        # (1/pi) * T^-(q-1) / (q-1) <= 1e-9 for envelope |f| ~ |t|^-q
        q = total_power
        t = (1.0 / ((q - 1) * math.pi * 1e-9)) ** (1.0 / (q - 1))
        return max(50.0, 1.5 * t)


@lru_cache(maxsize=None)
def _gauss_legendre(n: int):
    return np.polynomial.legendre.leggauss(n)


def _panel_edges(delta: float, t_max: float) -> np.ndarray:
    edges = [0.0]
    step = max(delta, 1e-3)
    while edges[-1] < t_max:
        edges.append(min(edges[-1] + step, t_max))
        step *= 2.0
    return np.asarray(edges)


def laplace_rate_integral(
    s_power: int,
    one_minus_s_power: int,
    dhats: Sequence[float],
    contour: ContourSpec | None = None,
) -> float:
    """Numerical value of (1/2 pi j) Int s^-m (1-s)^-p prod[1-(1+s d)^-1/2] ds.

    The line Re(s) = delta is parameterized as s = delta + j t; conjugate
    symmetry folds the integral onto t >= 0, doubling the real part.
    Gauss-Legendre panels are refined by node doubling until two passes
    agree to ``rel_tol`` in relative terms; disagreement raises.
    """
    if s_power < 1 or one_minus_s_power < 0:
        raise ValueError("integrand powers out of range")
    if any(d == 0.0 for d in dhats):
        return 0.0
    contour = contour or ContourSpec()
    delta = contour.resolve_delta(dhats)
    t_max = contour.resolve_t_max(s_power + one_minus_s_power)
    edges = _panel_edges(delta, t_max)

    def evaluate(nodes_per_panel: int) -> float:
        base_x, base_w = _gauss_legendre(nodes_per_panel)
        half = 0.5 * (edges[1:] - edges[:-1])
        mid = 0.5 * (edges[1:] + edges[:-1])
        t = (mid[:, None] + half[:, None] * base_x[None, :]).ravel()
        w = (half[:, None] * base_w[None, :]).ravel()
        s = delta + 1j * t
        f = s ** (-s_power) * (1.0 - s) ** (-one_minus_s_power)
        for d in dhats:
            f = f * (1.0 - 1.0 / np.sqrt(1.0 + s * d))
        return float(np.sum(w * f.real) / math.pi)

    nodes = contour.nodes
    value = evaluate(nodes)
    for _ in range(contour.max_doublings):
        nodes *= 2
        refined = evaluate(nodes)
        if abs(refined - value) <= contour.rel_tol * max(abs(refined), 1e-300):
            return refined
        value = refined
    raise RuntimeError(
        f"contour quadrature did not converge to {contour.rel_tol:g} "
        f"(delta={delta}, t_max={t_max}, dhats={tuple(dhats)})"
    )


def i4_numeric(dhat_r: float, dhat_t: float, contour: ContourSpec | None = None) -> float:
    """The double-bracket inversion integral with s^-4 (1-s)^-1 kernel.

    Vanishes identically when either bracket argument is zero and is
    invariant to the admissible choice of contour abscissa.
    """
    return laplace_rate_integral(4, 1, (dhat_r, dhat_t), contour)


def theta_integral(a: float) -> float:
    """Int_0^(pi/2) sin^2(t) / (1 + a sin^2(t)) dt for 1 + a > 0.

    Evaluates (pi/2a)[1 - (1+a)^(-1/2)] through log1p/expm1 so that the
    small-|a| cancellation is avoided; a = 0 returns the limit pi/4.
    """
    if not 1.0 + a > 0.0:
        raise ValueError(f"require 1 + a > 0, got a = {a}")
    if a == 0.0:
        return math.pi / 4.0
    return -(math.pi / (2.0 * a)) * math.expm1(-0.5 * math.log1p(a))


def apep_term4(
    gbar_sd: float,
    gbar_sr: float,
    gbar_st: float,
    coeffs: PairwiseCoefficients,
    contour: ContourSpec | None = None,
) -> float:
    """High-SNR PEP contribution of the both-relays-wrong conditioning case.

    Only the source-destination and the two source-relay average SNRs
    survive in this term; the relay-destination hops drop out because the
    combining weights clamp erroneous branches to the source-relay quality.
    """
    if coeffs.case != "nok-nok":
        raise ValueError(f"expected nok-nok coefficients, got case {coeffs.case!r}")
    if coeffs.d_s == 0 or coeffs.dhat_r == 0 or coeffs.dhat_t == 0:
        raise ValueError("term requires all three branches active (nonzero d_s, dhat_r, dhat_t)")
    for name, g in (("gbar_sd", gbar_sd), ("gbar_sr", gbar_sr), ("gbar_st", gbar_st)):
        if not g > 0.0:
            raise ValueError(f"{name} must be positive, got {g}")
    i4 = i4_numeric(coeffs.dhat_r, coeffs.dhat_t, contour)
    return i4 / (4.0 * gbar_sd * gbar_sr * gbar_st * coeffs.d_s**2 * coeffs.dhat_r * coeffs.dhat_t)


# ---------------------------------------------------------------------------
# Monte Carlo pairwise-error oracle
# ---------------------------------------------------------------------------

def apep_bruteforce(
    scenario: ScenarioId,
    c: Codeword,
    c_alt: Codeword,
    profile: FadingProfile,
    frames: int,
    seed: int,
    relay_case: str | None = None,
    chunk: int = 1 << 20,
) -> float:
    """Monte Carlo PEP Pr{metric(c_alt) < metric(c)} with simulated relays.

    Transmits the information bits behind ``c``, lets the relays actually
    demodulate (so relay errors occur at their natural rate), and compares
    the destination's combining metric on the two hypotheses.  With
    ``relay_case`` set, only error events coinciding with that
    relay-correctness pattern are counted, giving one conditioned addend
    of the PEP (the four addends sum to the unconditioned estimate).
    """
    if frames < 1:
        raise ValueError("frames must be >= 1")
    if relay_case is not None and relay_case not in CASES:
        raise ValueError(f"unknown case {relay_case!r} (expected one of {CASES})")
    if c.symbols == c_alt.symbols:
        raise ValueError("pairwise error is undefined for identical codewords")

    joint = slot_plan(scenario).joint_slots
    links = scenario_links(scenario)
    estimating = [s.tx for s in joint if s.payload.needs_estimate]
    em = profile.em_n0  # N_0 = 1 normalization
    n0 = 1.0
    bits = {name: c.bits.of(name) for name in ("s", "r", "t")}

    hits = 0
    done = 0
    chunk_idx = 0
    while done < frames:
        n = min(chunk, frames - done)
        rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(chunk_idx,)))
        real = sample_channel(profile, links, rng, size=n)

        estimates: dict[str, np.ndarray] = {}
        ok_flags: dict[str, np.ndarray] = {}
        for node in ("R", "T"):
            if node not in estimating:
                continue
            in_link = "s" + node.lower()
            y_in = transmit_bpsk(bits["s"], em, real.h[in_link], sample_awgn(n0, rng, size=n))
            est = relay_ml(y_in, real.h[in_link], em, n0)
            estimates[node] = est
            ok_flags[node] = est == bits["s"]

        metric_ref = 0.0
        metric_alt = 0.0
        for i, slot in enumerate(joint):
            node = slot.tx.lower()
            own = bits[node]
            symbol = encode_slot(slot.payload, own, estimates.get(slot.tx))
            h = real.h[node + "d"]
            energy = float(slot.energy) * em
            y = transmit_bpsk(symbol, energy, h, sample_awgn(n0, rng, size=n))
            if slot.payload.needs_estimate:
                lam = cmrc_lambda(real.gamma["s" + node], real.gamma[node + "d"])
            else:
                lam = 1.0
            amp = np.sqrt(energy)
            for target, word in ((0, c), (1, c_alt)):
                diff = y - amp * h * (1 - 2 * word.symbols[i])
                term = lam * (diff.real**2 + diff.imag**2) / n0
                if target == 0:
                    metric_ref = metric_ref + term
                else:
                    metric_alt = metric_alt + term

        event = metric_alt < metric_ref
        if relay_case is not None:
            want = dict(zip(("R", "T"), relay_case.split("-")))
            for node, flag in ok_flags.items():
                event = event & (flag if want[node] == "ok" else ~flag)
        hits += int(np.count_nonzero(event))
        done += n
        chunk_idx += 1
    return hits / frames


# ---------------------------------------------------------------------------
# leading-term ABEP table and union bound
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AbepTerm:
    coefficient: float
    exponents: tuple[tuple[str, int], ...]

    @property
    def diversity_order(self) -> int:
        return sum(e for _, e in self.exponents)


@dataclass(frozen=True)
class AbepExpression:
    """Sum of coefficient / prod(gammabar_link^exponent) leading terms."""

    scenario: ScenarioId
    node: str
    terms: tuple[AbepTerm, ...]

    def evaluate(self, avg_snr) -> float:
        total = 0.0
        for term in self.terms:
            value = term.coefficient
            for link, exp in term.exponents:
                value /= avg_snr[link] ** exp
            total += value
        return total

    @property
    def diversity_order(self) -> int:
        return min(t.diversity_order for t in self.terms)

    def rows(self) -> list[dict]:
        out = []
        for term in self.terms:
            exps = dict(term.exponents)
            out.append(
                {
                    "scenario": self.scenario.value,
                    "node": self.node,
                    "coefficient": term.coefficient,
                    **{f"exp_{link}": exps.get(link, 0) for link in ("sd", "sr", "st", "rd", "td")},
                }
            )
        return out


def _term(coefficient: float, **exponents: int) -> AbepTerm:
    return AbepTerm(coefficient, tuple(sorted(exponents.items())))


_ABEP_TABLE: dict[tuple[ScenarioId, str], tuple[AbepTerm, ...]] = {
    (ScenarioId.N3A, "S"): (_term(0.25, sd=1),),
    (ScenarioId.N3A, "R"): (_term(0.25, rd=1),),
    (ScenarioId.N3B, "S"): (_term(0.375, sd=1, rd=1), _term(SINGLE_RELAY_NOK, sd=1, sr=1)),
    (ScenarioId.N3B, "R"): (_term(0.5, rd=1),),
    (ScenarioId.N3C, "S"): (_term(0.25, sd=1),),
    (ScenarioId.N3C, "R"): (_term(0.25, sd=1), _term(0.25, sr=1), _term(0.25, rd=1)),
    (ScenarioId.N4A, "S"): (_term(0.25, sd=1),),
    (ScenarioId.N4A, "R"): (_term(0.25, rd=1),),
    (ScenarioId.N4A, "T"): (_term(0.25, td=1),),
    (ScenarioId.N4B, "S"): (
        _term(0.625, sd=1, rd=1, td=1),
        _term(K1, sd=1, sr=1, st=1),
        _term(K2, sd=1, sr=1, td=1),
        _term(K2, sd=1, st=1, rd=1),
    ),
    (ScenarioId.N4B, "R"): (_term(0.5, rd=1),),
    (ScenarioId.N4B, "T"): (_term(0.5, td=1),),
    (ScenarioId.N4C, "S"): (_term(0.25, sd=1),),
    (ScenarioId.N4C, "R"): (_term(0.25, sd=1), _term(0.25, sr=1), _term(0.25, rd=1)),
    (ScenarioId.N4C, "T"): (_term(0.25, sd=1), _term(0.25, st=1), _term(0.25, td=1)),
    (ScenarioId.N4D, "S"): (_term(0.375, sd=1, rd=1), _term(SINGLE_RELAY_NOK, sd=1, sr=1)),
    (ScenarioId.N4D, "R"): (_term(0.5, rd=1),),
    (ScenarioId.N4D, "T"): (_term(0.25, st=1), _term(0.25, td=1)),
}


def asymptotic_abep_expression(scenario: ScenarioId, node: str) -> AbepExpression:
    """Leading-term ABEP expression of one node in one scenario."""
    key = (scenario, node.upper())
    if key not in _ABEP_TABLE:
        raise ValueError(f"no ABEP entry for node {node!r} in scenario {scenario.value}")
    return AbepExpression(scenario, node.upper(), _ABEP_TABLE[key])


def asymptotic_abep(scenario: ScenarioId, node: str, avg_snr) -> float:
    """Leading-term ABEP value at the given per-link average SNRs."""
    return asymptotic_abep_expression(scenario, node).evaluate(avg_snr)


def all_abep_rows() -> list[dict]:
    """Every stored leading term as one serializable row."""
    rows = []
    for scenario in ScenarioId:
        for node in scenario.nodes:
            rows.extend(asymptotic_abep_expression(scenario, node).rows())
    return rows


def union_bound_abep(
    scenario: ScenarioId,
    node: str,
    avg_snr,
    apep: Callable[[Codeword, Codeword, Mapping], float],
    codebook: Codebook | None = None,
) -> float:
    """Union bound on a node's codebook-bit error rate.

    Averages, over equiprobable transmitted codewords, the pairwise error
    probabilities toward every codeword whose bit for ``node`` differs.
    The evaluator is pluggable: closed-form high-SNR terms and the Monte
    Carlo estimator satisfy the same (c, c_alt, avg_snr) signature.
    """
    cb = codebook if codebook is not None else build_codebook(scenario)
    letter = node.lower()
    if len(cb) > 1 and letter not in cb.free_bits:
        raise ValueError(f"bit of node {node!r} is not part of the joint codebook of {scenario.value}")
    total = 0.0
    for c in cb:
        for c_alt in cb:
            if c_alt.symbols == c.symbols:
                continue
            if c.bits.of(letter) == c_alt.bits.of(letter):
                continue
            total += apep(c, c_alt, avg_snr)
    return total / len(cb)
