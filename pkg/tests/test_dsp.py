"""Filtering, spectral estimation, RMS, correlation, and phasor extraction."""

import numpy as np
import pytest

from seastrain.dsp import (
    TimeSeries,
    complex_amplitude,
    lowpass,
    pearson_correlation,
    welch_psd,
    windowed_rms,
)
from seastrain.errors import InvalidArgumentError, UndefinedCorrelationError


def make_tone(freq_hz, fs, duration_s, amplitude=1.0, phase=0.0):
    t = np.arange(int(round(duration_s * fs))) / fs
    return TimeSeries(fs, amplitude * np.cos(2 * np.pi * freq_hz * t + phase))


# -- lowpass -------------------------------------------------------------------


def test_lowpass_preserves_dc():
    x = TimeSeries(100.0, np.full(2000, 3.7))
    y = lowpass(x, 3.0)
    assert np.max(np.abs(y.samples - 3.7)) < 1e-9


def test_lowpass_passband_amplitude():
    fs = 500.0
    x = make_tone(0.4, fs, 60.0)
    y = lowpass(x, 3.0)
    core = y.samples[int(10 * fs) : -int(10 * fs)]
    amp = np.sqrt(2.0 * np.mean(core**2))
    assert abs(amp - 1.0) < 0.01


def test_lowpass_stopband_attenuation():
    fs = 500.0
    x = make_tone(10.0, fs, 60.0)
    y = lowpass(x, 3.0)
    core = y.samples[int(10 * fs) : -int(10 * fs)]
    amp = np.sqrt(2.0 * np.mean(core**2))
    assert amp <= 0.01  # >= 40 dB down


def test_lowpass_keeps_length_and_rejects_bad_cutoff():
    x = make_tone(1.0, 100.0, 10.0)
    assert len(lowpass(x, 3.0)) == len(x)
    with pytest.raises(InvalidArgumentError):
        lowpass(x, 0.0)
    with pytest.raises(InvalidArgumentError):
        lowpass(x, 50.0)


def test_lowpass_then_windowed_rms_close_to_original():
    fs = 500.0
    x = make_tone(0.4, fs, 120.0, amplitude=0.7)
    before = np.median(windowed_rms(x, 10.0))
    after = np.median(windowed_rms(lowpass(x, 3.0), 10.0))
    assert abs(after - before) / before < 0.015


# -- welch_psd -----------------------------------------------------------------


def test_welch_single_tone_peak_bin():
    fs = 200.0
    x = make_tone(0.8, fs, 120.0)
    psd = welch_psd(x, 60.0)
    assert psd.resolution_hz == pytest.approx(1.0 / 60.0)
    f_peak = psd.frequencies_hz[np.argmax(psd.power)]
    assert abs(f_peak - 0.8) <= psd.resolution_hz
    assert psd.frequencies_hz[0] == 0.0


def test_welch_parseval_on_white_noise():
    fs = 200.0
    sigma = 2.0
    worst = 0.0
    for seed in range(20):
        rng = np.random.default_rng(seed)
        x = TimeSeries(fs, sigma * rng.standard_normal(int(120 * fs)))
        psd = welch_psd(x, 60.0)
        integral = np.sum(psd.power) * psd.resolution_hz
        worst = max(worst, abs(integral - np.var(x.samples)) / np.var(x.samples))
    assert worst < 0.10


def test_welch_zero_signal_and_offset_invariance():
    fs = 100.0
    zero = TimeSeries(fs, np.zeros(int(32 * fs)))
    assert np.all(welch_psd(zero, 16.0).power == 0.0)

    rng = np.random.default_rng(7)
    base = rng.standard_normal(int(64 * fs))
    a = welch_psd(TimeSeries(fs, base), 16.0)
    b = welch_psd(TimeSeries(fs, base + 42.0), 16.0)
    assert np.allclose(a.power, b.power, rtol=1e-10, atol=1e-12)


def test_welch_preconditions():
    x = make_tone(1.0, 100.0, 4.0)
    with pytest.raises(InvalidArgumentError):
        welch_psd(x, 8.0)  # record shorter than one segment
    with pytest.raises(InvalidArgumentError):
        welch_psd(x, 0.1)  # fewer than 16 samples per segment
    with pytest.raises(InvalidArgumentError):
        welch_psd(x, 2.0, overlap_fraction=1.0)


# -- windowed_rms --------------------------------------------------------------


def test_windowed_rms_counts_and_discards_partial():
    fs = 100.0
    x = TimeSeries(fs, np.random.default_rng(0).standard_normal(int(120 * fs)))
    assert len(windowed_rms(x, 10.0)) == 12
    y = TimeSeries(fs, np.random.default_rng(0).standard_normal(int(125 * fs)))
    assert len(windowed_rms(y, 10.0)) == 12


def test_windowed_rms_of_sinusoid():
    fs = 100.0
    amp = 0.42
    x = make_tone(0.5, fs, 120.0, amplitude=amp)  # 5 whole periods per window
    values = windowed_rms(x, 10.0)
    assert np.max(np.abs(values - amp / np.sqrt(2.0))) < 1e-6 * amp


def test_windowed_rms_of_constant_is_zero():
    x = TimeSeries(50.0, np.full(1000, 5.0))
    assert np.all(windowed_rms(x, 2.0) == 0.0)


# -- pearson_correlation -------------------------------------------------------


def test_pearson_self_and_negation():
    x = TimeSeries(10.0, np.random.default_rng(3).standard_normal(500))
    neg = TimeSeries(10.0, -x.samples)
    assert pearson_correlation(x, x) == pytest.approx(1.0)
    assert pearson_correlation(x, neg) == pytest.approx(-1.0)


def test_pearson_errors():
    x = TimeSeries(10.0, np.arange(10.0))
    short = TimeSeries(10.0, np.arange(5.0))
    const = TimeSeries(10.0, np.full(10, 2.0))
    with pytest.raises(InvalidArgumentError):
        pearson_correlation(x, short)
    with pytest.raises(UndefinedCorrelationError):
        pearson_correlation(x, const)


# -- complex_amplitude ---------------------------------------------------------


def test_complex_amplitude_of_cosine_and_sine():
    fs = 200.0
    t = np.arange(int(60 * fs)) / fs
    cos = TimeSeries(fs, np.cos(2 * np.pi * 0.8 * t))
    sin = TimeSeries(fs, np.sin(2 * np.pi * 0.8 * t))
    amp, phase = complex_amplitude(cos, 0.8)
    assert amp == pytest.approx(1.0, abs=0.02)
    assert phase == pytest.approx(0.0, abs=1e-6)
    amp, phase = complex_amplitude(sin, 0.8)
    assert amp == pytest.approx(1.0, abs=0.02)
    assert phase == pytest.approx(-np.pi / 2, abs=1e-6)


def test_complex_amplitude_scales_with_amplitude():
    x = make_tone(1.2, 100.0, 50.0, amplitude=3.5)
    amp, _ = complex_amplitude(x, 1.2)
    assert amp == pytest.approx(3.5, rel=0.02)


def test_complex_amplitude_delay_law():
    fs, f0, tau = 200.0, 0.8, 0.3
    t = np.arange(int(60 * fs)) / fs
    x = TimeSeries(fs, np.cos(2 * np.pi * f0 * t))
    delayed = TimeSeries(fs, np.cos(2 * np.pi * f0 * (t - tau)))
    _, ph_x = complex_amplitude(x, f0)
    _, ph_d = complex_amplitude(delayed, f0)
    measured = np.mod(ph_x - ph_d, 2 * np.pi)
    # oracle: the cross-spectrum of the two full series at f0
    cross = np.sum(x.samples * np.exp(-2j * np.pi * f0 * t)) * np.conj(
        np.sum(delayed.samples * np.exp(-2j * np.pi * f0 * t))
    )
    expected = np.mod(np.angle(cross), 2 * np.pi)
    assert measured == pytest.approx(np.mod(2 * np.pi * f0 * tau, 2 * np.pi), abs=1e-6)
    assert measured == pytest.approx(expected, abs=1e-6)


def test_phase_differences_invariant_to_global_time_shift():
    fs, f0 = 100.0, 0.7
    t = np.arange(int(80 * fs)) / fs
    offsets = (0.0, 0.37, 1.94)
    for shift in (0.0, 2.13):
        phases = []
        for off in offsets:
            x = TimeSeries(fs, np.cos(2 * np.pi * f0 * (t - shift) + off))
            phases.append(complex_amplitude(x, f0)[1])
        diffs = np.diff(phases)
        if shift == 0.0:
            reference = diffs
        else:
            assert np.allclose(diffs, reference, atol=1e-9)


def test_complex_amplitude_rejects_out_of_band_f0():
    x = make_tone(1.0, 100.0, 10.0)
    with pytest.raises(InvalidArgumentError):
        complex_amplitude(x, 0.0)
    with pytest.raises(InvalidArgumentError):
        complex_amplitude(x, 50.0)


# -- TimeSeries validation -----------------------------------------------------


def test_timeseries_validation():
    with pytest.raises(InvalidArgumentError):
        TimeSeries(0.0, np.arange(10.0))
    with pytest.raises(InvalidArgumentError):
        TimeSeries(10.0, np.array([1.0]))
    with pytest.raises(InvalidArgumentError):
        TimeSeries(10.0, np.array([1.0, np.nan]))
