"""Signal-processing primitives for DAS strain series.

Low-pass filtering, Welch power spectral density, windowed RMS, Pearson
correlation, and single-frequency complex amplitude extraction. All
functions are pure and operate on :class:`TimeSeries`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import signal

from .errors import InvalidArgumentError, UndefinedCorrelationError


@dataclass
class TimeSeries:
    """A uniformly sampled real-valued series."""

    sample_rate_hz: float
    samples: np.ndarray

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=float)
        if not self.sample_rate_hz > 0:
            raise InvalidArgumentError(
                f"sample_rate_hz must be > 0, got {self.sample_rate_hz}"
            )
        if self.samples.ndim != 1 or self.samples.size < 2:
            raise InvalidArgumentError("samples must be a 1-D array of length >= 2")
        if not np.all(np.isfinite(self.samples)):
            raise InvalidArgumentError("samples contain non-finite values")

    def __len__(self) -> int:
        return self.samples.size

    def times(self) -> np.ndarray:
        return np.arange(self.samples.size) / self.sample_rate_hz


@dataclass
class Psd:
    """One-sided power spectral density on an ascending frequency grid."""

    frequencies_hz: np.ndarray
    power: np.ndarray
    resolution_hz: float

    def __post_init__(self):
        self.frequencies_hz = np.asarray(self.frequencies_hz, dtype=float)
        self.power = np.asarray(self.power, dtype=float)
        if self.frequencies_hz.shape != self.power.shape:
            raise InvalidArgumentError("frequency and power arrays differ in length")
        if np.any(self.power < 0):
            raise InvalidArgumentError("power values must be nonnegative")


def lowpass(x: TimeSeries, cutoff_hz: float) -> TimeSeries:
    """Zero-phase low-pass filter.

    Butterworth (order 5, -3 dB point at 1.5x the cutoff) applied forward
    and backward with ``sosfiltfilt``, so the net response is the squared
    magnitude with zero phase: passband error at 0.8x cutoff is ~0.2%,
    attenuation at 3x cutoff is ~60 dB. Output length equals input length.
    """
    nyq = x.sample_rate_hz / 2.0
    if not 0 < cutoff_hz < nyq:
        raise InvalidArgumentError(
            f"cutoff_hz must lie in (0, {nyq}), got {cutoff_hz}"
        )
    # keep the design frequency below Nyquist when the cutoff is close to it
    f3 = min(1.5 * cutoff_hz, 0.5 * (cutoff_hz + nyq))
    sos = signal.butter(5, f3, btype="low", fs=x.sample_rate_hz, output="sos")
    return TimeSeries(x.sample_rate_hz, signal.sosfiltfilt(sos, x.samples))


def welch_psd(
    x: TimeSeries,
    segment_s: float,
    overlap_fraction: float = 0.5,
    window: str = "hann",
) -> Psd:
    """Welch PSD with per-segment mean removal.

    Density-normalized: the integral of power over frequency approximates
    the signal variance (within taper bias).

    Parameters
    ----------
    x : TimeSeries
    segment_s : float
        Segment length in seconds; must hold at least 16 samples and fit
        within the record.
    overlap_fraction : float
        Fractional overlap between segments, in [0, 1).
    window : str
        Taper name understood by scipy.
    """
    nperseg = int(round(segment_s * x.sample_rate_hz))
    if nperseg < 16:
        raise InvalidArgumentError(
            f"segment of {segment_s} s holds only {nperseg} samples (< 16)"
        )
    if not 0 <= overlap_fraction < 1:
        raise InvalidArgumentError(
            f"overlap_fraction must lie in [0, 1), got {overlap_fraction}"
        )
    if len(x) < nperseg:
        raise InvalidArgumentError(
            f"record of {len(x)} samples is shorter than one {nperseg}-sample segment"
        )
    freqs, power = signal.welch(
        x.samples,
        fs=x.sample_rate_hz,
        window=window,
        nperseg=nperseg,
        noverlap=int(round(overlap_fraction * nperseg)),
        detrend="constant",
        scaling="density",
    )
    # tiny negative excursions from float cancellation are clipped
    return Psd(freqs, np.maximum(power, 0.0), float(freqs[1] - freqs[0]))


def windowed_rms(x: TimeSeries, window_s: float) -> np.ndarray:
    """RMS of consecutive non-overlapping windows, mean removed per window.

    The trailing partial window is discarded. A 120 s record with 10 s
    windows yields exactly 12 values.
    """
    win = int(round(window_s * x.sample_rate_hz))
    if win < 1:
        raise InvalidArgumentError(f"window of {window_s} s holds no samples")
    n_win = len(x) // win
    if n_win == 0:
        return np.empty(0)
    blocks = x.samples[: n_win * win].reshape(n_win, win)
    blocks = blocks - blocks.mean(axis=1, keepdims=True)
    return np.sqrt(np.mean(blocks**2, axis=1))


def pearson_correlation(x: TimeSeries, y: TimeSeries) -> float:
    """Sample Pearson correlation coefficient of two equal-length series."""
    if len(x) != len(y):
        raise InvalidArgumentError(
            f"series lengths differ: {len(x)} vs {len(y)}"
        )
    xd = x.samples - x.samples.mean()
    yd = y.samples - y.samples.mean()
    sx = np.sqrt(np.sum(xd**2))
    sy = np.sqrt(np.sum(yd**2))
    if sx == 0.0 or sy == 0.0:
        raise UndefinedCorrelationError("correlation of a constant series is undefined")
    r = float(np.sum(xd * yd) / (sx * sy))
    return max(-1.0, min(1.0, r))


def complex_amplitude(x: TimeSeries, f0_hz: float) -> tuple[float, float]:
    """Amplitude and phase of the component at a single frequency.

    Projects the Hann-tapered, mean-removed series onto exp(-i*2*pi*f0*t)
    and rescales so a pure cosine A*cos(2*pi*f0*t + phi) returns (A, phi).
    With this convention sin(2*pi*f0*t) has phase -pi/2, and a copy delayed
    by tau has its phase reduced by 2*pi*f0*tau.

    Returns
    -------
    (amplitude, phase_rad)
    """
    nyq = x.sample_rate_hz / 2.0
    if not 0 < f0_hz < nyq:
        raise InvalidArgumentError(f"f0_hz must lie in (0, {nyq}), got {f0_hz}")
    y = x.samples - x.samples.mean()
    w = np.hanning(len(y))
    t = x.times()
    c = np.sum(w * y * np.exp(-2j * np.pi * f0_hz * t))
    amplitude = 2.0 * abs(c) / w.sum()
    return float(amplitude), float(np.angle(c))


def complex_tone(x: TimeSeries, f0_hz: float) -> complex:
    """Complex phasor A*exp(i*phi) at f0; same convention as complex_amplitude."""
    amplitude, phase = complex_amplitude(x, f0_hz)
    return amplitude * np.exp(1j * phase)
