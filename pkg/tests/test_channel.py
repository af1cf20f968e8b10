import numpy as np
import pytest
from scipy import stats

from ncrelay.channel import (
    LINK_NAMES,
    AvgSnr,
    FadingProfile,
    RngStream,
    sample_awgn,
    sample_channel,
    scenario_links,
    transmit_bpsk,
)
from ncrelay.core import ScenarioId


def test_scenario_links():
    assert scenario_links(ScenarioId.N3A) == ("sd", "rd")
    assert scenario_links(ScenarioId.N3B) == ("sd", "sr", "rd")
    assert scenario_links(ScenarioId.N4B) == ("sd", "sr", "st", "rd", "td")


def test_profile_validation():
    with pytest.raises(ValueError):
        FadingProfile(em_n0=0.0)
    with pytest.raises(ValueError):
        FadingProfile(em_n0=1.0, sigma2={"zz": 1.0})
    with pytest.raises(ValueError):
        FadingProfile(em_n0=1.0, sigma2={"sd": -1.0})
    p = FadingProfile(em_n0=2.0, sigma2={"sr": 0.5})
    assert p.sigma2_of("sr") == 0.5
    assert p.sigma2_of("sd") == 1.0  # unset links default to unit variance


def test_avg_snr_bookkeeping():
    p = FadingProfile(em_n0=10.0, sigma2={"sd": 2.0})
    snrs = AvgSnr.from_profile(p)
    assert snrs["sd"] == pytest.approx(2.0 * 2.0 * 10.0)
    assert snrs["rd"] == pytest.approx(2.0 * 1.0 * 10.0)


def test_rng_stream_determinism():
    a = RngStream(7, key=(3, 1)).generator().normal(size=8)
    b = RngStream(7, key=(3, 1)).generator().normal(size=8)
    c = RngStream(7, key=(3, 2)).generator().normal(size=8)
    np.testing.assert_array_equal(a, b)
    assert not np.array_equal(a, c)


def test_sample_channel_determinism():
    p = FadingProfile(em_n0=5.0)
    links = scenario_links(ScenarioId.N3B)
    r1 = sample_channel(p, links, RngStream(1, (0,)).generator(), size=16)
    r2 = sample_channel(p, links, RngStream(1, (0,)).generator(), size=16)
    for link in links:
        np.testing.assert_array_equal(r1.h[link], r2.h[link])
        np.testing.assert_array_equal(r1.gamma[link], r2.gamma[link])


def test_gain_moments_and_snr():
    # sigma2 = 1/2 -> E[|h|^2] = 1 and E[gamma] = E_m/N_0
    p = FadingProfile(em_n0=4.0, sigma2={l: 0.5 for l in LINK_NAMES})
    real = sample_channel(p, ("sd",), RngStream(11, (0,)).generator(), size=10**6)
    power = np.abs(real.h["sd"]) ** 2
    assert np.mean(power) == pytest.approx(1.0, rel=0.01)
    assert np.mean(real.gamma["sd"]) == pytest.approx(4.0, rel=0.01)
    np.testing.assert_allclose(real.gamma["sd"], power * 4.0, rtol=1e-12)


def test_gain_power_matches_two_sigma2():
    p = FadingProfile(em_n0=1.0, sigma2={"sd": 1.7})
    real = sample_channel(p, ("sd",), RngStream(3, (0,)).generator(), size=10**6)
    assert np.mean(np.abs(real.h["sd"]) ** 2) == pytest.approx(2 * 1.7, rel=0.01)


def test_snr_is_exponential():
    gbar = 2.0 * 0.8 * 3.0
    p = FadingProfile(em_n0=3.0, sigma2={"sd": 0.8})
    real = sample_channel(p, ("sd",), RngStream(19, (0,)).generator(), size=10**5)
    stat = stats.kstest(real.gamma["sd"], "expon", args=(0.0, gbar))
    assert stat.pvalue > 0.01


def test_frame_independence():
    p = FadingProfile(em_n0=1.0)
    real = sample_channel(p, ("sd",), RngStream(23, (0,)).generator(), size=10**6)
    power = np.abs(real.h["sd"]) ** 2
    x = power - power.mean()
    lag1 = np.dot(x[:-1], x[1:]) / np.dot(x, x)
    assert abs(lag1) < 0.01


def test_awgn_moments_and_zero_limit():
    rng = RngStream(5, (0,)).generator()
    n = sample_awgn(3.0, rng, size=10**6)
    assert np.var(n.real) == pytest.approx(1.5, rel=0.01)
    assert np.var(n.imag) == pytest.approx(1.5, rel=0.01)
    assert abs(np.mean(n)) < 0.01
    np.testing.assert_array_equal(sample_awgn(0.0, rng, size=100), np.zeros(100))
    with pytest.raises(ValueError):
        sample_awgn(-1.0, rng, size=4)


def test_awgn_streams_uncorrelated():
    a = sample_awgn(1.0, RngStream(40, (0,)).generator(), size=10**6)
    b = sample_awgn(1.0, RngStream(40, (1,)).generator(), size=10**6)
    corr = np.corrcoef(a.real, b.real)[0, 1]
    assert abs(corr) < 0.01


def test_transmit_bpsk_examples():
    assert transmit_bpsk(0, 4.0, 1.0, 0.0) == pytest.approx(2.0)
    assert transmit_bpsk(1, 4.0, 1.0, 0.0) == pytest.approx(-2.0)
    assert transmit_bpsk(0, 0.0, 1.0 + 1j, 0.25 - 1j) == 0.25 - 1j  # noise passthrough
    h = 0.3 - 0.7j
    assert transmit_bpsk(1, 2.0, h, 0.0) == pytest.approx(-np.sqrt(2.0) * h)
