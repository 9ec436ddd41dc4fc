"""Wave parameter estimation from DAS records.

Three procedures:

* wave period from the dominant peak of a Welch PSD,
* wave height from a zero-intercept linear calibration of windowed strain
  RMS against known heights,
* joint direction of arrival and wavelength from delay-and-sum beamforming
  over two cable layouts with a known angular offset.

A single straight cable only observes the along-cable projection
k*cos(theta) of the wave vector, so one layout constrains (DOA, wavelength)
to a cosine locus; two layouts with known DOA difference intersect in a
unique solution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dassim import DasRecord
from .dsp import Psd
from .errors import (
    DegenerateCurveError,
    DegenerateFitError,
    InconsistentLayoutsError,
    InvalidArgumentError,
    NoPeakError,
    WeakPeakError,
)

DEFAULT_BAND_HZ = (0.05, 3.0)
DEFAULT_K_GRID_POINTS = 2048
DEFAULT_THETA_STEP_DEG = 0.1
# beamformer dominance rule: peak must exceed twice the median beam power
BEAM_PEAK_MEDIAN_FACTOR = 2.0


@dataclass
class HeightCalibration:
    """Zero-intercept slope mapping median strain RMS to wave height."""

    slope: float
    fit_points: list[tuple[float, float]]
    rmspe_percent: float

    def __post_init__(self):
        if not self.slope > 0:
            raise InvalidArgumentError(f"slope must be > 0, got {self.slope}")
        if self.rmspe_percent < 0:
            raise InvalidArgumentError("rmspe_percent must be >= 0")


@dataclass
class BeamSpectrum:
    """Delay-and-sum beam power over a scanned apparent-wavenumber grid."""

    apparent_wavenumbers: np.ndarray
    power: np.ndarray
    peak_k_app: float
    f0_hz: float

    def __post_init__(self):
        self.apparent_wavenumbers = np.asarray(self.apparent_wavenumbers, dtype=float)
        self.power = np.asarray(self.power, dtype=float)

    def power_at(self, k_app: float) -> float:
        """Beam power at an arbitrary wavenumber, linearly interpolated."""
        return float(
            np.interp(k_app, self.apparent_wavenumbers, self.power, left=0.0, right=0.0)
        )


@dataclass
class DoaEstimate:
    """Jointly solved (DOA, wavelength) for a dual-layout measurement.

    DOAs are cable-relative, anticlockwise positive; ``doa_c2_deg -
    doa_c1_deg`` equals the imposed layout difference. ``ambiguity_flag``
    is set when the mirror solution was discarded without beam-power
    evidence.
    """

    doa_c1_deg: float
    doa_c2_deg: float
    wavelength_m: float
    apparent_wavelength_c1_m: float
    apparent_wavelength_c2_m: float
    delta_deg: float
    ambiguity_flag: bool


def _parabolic_refine(x: np.ndarray, y: np.ndarray, i: int) -> float:
    """Sub-grid peak location from a 3-point parabola on log(y) around i.

    Falls back to x[i] at grid edges or when a neighbor is nonpositive.
    The offset is clamped to half a grid step, so the result stays inside
    the scanned grid.
    """
    if i == 0 or i == len(x) - 1:
        return float(x[i])
    if y[i - 1] <= 0 or y[i] <= 0 or y[i + 1] <= 0:
        return float(x[i])
    la, lb, lc = math.log(y[i - 1]), math.log(y[i]), math.log(y[i + 1])
    denom = la - 2.0 * lb + lc
    if denom >= 0:  # not a local maximum in log space
        return float(x[i])
    offset = 0.5 * (la - lc) / denom
    offset = max(-0.5, min(0.5, offset))
    return float(x[i] + offset * (x[i + 1] - x[i]))


def estimate_period(
    psd: Psd,
    f_min_hz: float = DEFAULT_BAND_HZ[0],
    f_max_hz: float = DEFAULT_BAND_HZ[1],
    interpolate: bool = True,
    min_peak_ratio: float | None = None,
) -> tuple[float, float]:
    """Wave period from the strongest in-band PSD peak.

    The fundamental is assumed to be the global in-band maximum (harmonics
    are weaker). With ``interpolate`` the peak frequency is refined by a
    3-point parabola on log power, which resolves finer than the bin
    spacing. ``min_peak_ratio``, when given, requires the peak to exceed
    that multiple of the median in-band power, otherwise WeakPeakError.

    Returns
    -------
    (period_s, peak_freq_hz)
    """
    if not f_min_hz > 0:
        raise InvalidArgumentError(f"f_min_hz must be > 0, got {f_min_hz}")
    if not f_max_hz > f_min_hz:
        raise InvalidArgumentError("f_max_hz must exceed f_min_hz")
    freqs, power = psd.frequencies_hz, psd.power
    band = np.nonzero((freqs >= f_min_hz) & (freqs <= f_max_hz))[0]
    if band.size == 0:
        raise InvalidArgumentError(
            f"band [{f_min_hz}, {f_max_hz}] Hz is empty on this PSD grid"
        )
    band_power = power[band]
    if np.all(band_power == 0.0):
        raise NoPeakError("no spectral power in the analysis band")
    i_local = int(np.argmax(band_power))
    i = int(band[i_local])
    if min_peak_ratio is not None:
        med = float(np.median(band_power))
        if med > 0 and power[i] <= min_peak_ratio * med:
            raise WeakPeakError(
                f"peak at {freqs[i]:.4g} Hz is only {power[i] / med:.2f}x the "
                f"median in-band power (need > {min_peak_ratio}x)"
            )
    if interpolate:
        f_peak = _parabolic_refine(freqs, power, i)
    else:
        f_peak = float(freqs[i])
    return 1.0 / f_peak, f_peak


def rmspe(predicted, actual) -> float:
    """Root mean square percentage error, 100*sqrt(mean(((pred-act)/act)^2))."""
    pred = np.asarray(predicted, dtype=float)
    act = np.asarray(actual, dtype=float)
    if pred.shape != act.shape:
        raise InvalidArgumentError("predicted and actual differ in length")
    if pred.size == 0:
        raise InvalidArgumentError("rmspe of empty lists is undefined")
    if np.any(act == 0.0):
        raise InvalidArgumentError("actual values must be nonzero")
    return 100.0 * float(np.sqrt(np.mean(((pred - act) / act) ** 2)))


def distribution_stats(values) -> tuple[float, float]:
    """(median, interquartile range) with linear-interpolation percentiles."""
    v = np.asarray(values, dtype=float)
    if v.size == 0:
        raise InvalidArgumentError("distribution_stats of an empty list")
    q25, q50, q75 = np.percentile(v, [25.0, 50.0, 75.0])
    return float(q50), float(q75 - q25)


def fit_height_calibration(samples) -> HeightCalibration:
    """Fit the zero-intercept line through per-height median RMS values.

    Parameters
    ----------
    samples : iterable of (height_m, rms_values)
        One entry per record; entries sharing a height are pooled.

    The slope minimizes least squares through the origin over the medians:
    slope = sum(h * median_h) / sum(h^2). Goodness of fit is the RMSPE
    between slope*h and the medians.
    """
    pooled: dict[float, list[float]] = {}
    for height, rms_values in samples:
        h = float(height)
        if not h > 0:
            raise InvalidArgumentError(f"heights must be > 0, got {h}")
        values = np.asarray(rms_values, dtype=float)
        if values.size == 0:
            raise InvalidArgumentError(f"no RMS values supplied for height {h}")
        pooled.setdefault(h, []).extend(values.tolist())
    if len(pooled) < 2:
        raise DegenerateFitError(
            f"calibration needs >= 2 distinct heights, got {len(pooled)}"
        )
    heights = np.array(sorted(pooled))
    medians = np.array([np.median(pooled[h]) for h in heights])
    slope = float(np.sum(heights * medians) / np.sum(heights**2))
    error = rmspe(slope * heights, medians)
    return HeightCalibration(
        slope=slope,
        fit_points=list(zip(heights.tolist(), medians.tolist())),
        rmspe_percent=error,
    )


def estimate_height(cal: HeightCalibration, rms_values) -> float:
    """Wave height from calibrated RMS samples: median(rms) / slope."""
    values = np.asarray(rms_values, dtype=float)
    if values.size == 0:
        raise InvalidArgumentError("rms_values must not be empty")
    return float(np.median(values)) / cal.slope


def _channel_phasors(rec: DasRecord, f0_hz: float) -> np.ndarray:
    """Complex amplitude of every channel at f0, matching dsp.complex_amplitude.

    Vectorized over channels: the Hann taper and the probe exponential are
    built once for the whole record instead of per channel.
    """
    data = rec.data - rec.data.mean(axis=1, keepdims=True)
    t = np.arange(rec.n_samples) / rec.sample_rate_hz
    w = np.hanning(rec.n_samples)
    probe = w * np.exp(-2j * np.pi * f0_hz * t)
    return 2.0 * (data @ probe) / w.sum()


def default_k_grid(spacing_m: float, n_points: int = DEFAULT_K_GRID_POINTS) -> np.ndarray:
    """Symmetric wavenumber grid strictly inside (-pi/spacing, pi/spacing)."""
    if not spacing_m > 0:
        raise InvalidArgumentError(f"spacing_m must be > 0, got {spacing_m}")
    k_nyq = math.pi / spacing_m
    return np.linspace(-k_nyq, k_nyq, n_points + 2)[1:-1]


def beamform_apparent_wavenumber(
    rec: DasRecord, f0_hz: float, k_grid: np.ndarray | None = None
) -> BeamSpectrum:
    """Delay-and-sum beam power over apparent wavenumber at one frequency.

    Each channel contributes its complex amplitude a_n at f0; the beam
    output is B(k) = |sum_n a_n * exp(-i*k*s_n)|^2 / N^2 with uniform
    weights and s_n the channel arc-length. The grid is signed: the sign of
    the peak carries the along-cable propagation sense (under the
    exp(-i*w*t) amplitude convention a wave travelling toward increasing
    arc length peaks at negative k); its magnitude k_app = |k*cos(theta)|
    is all a 1-D array learns about the 2-D wave vector. The reported peak
    is refined by parabolic interpolation on log power.
    """
    if rec.n_channels < 4:
        raise InvalidArgumentError(
            f"beamforming needs >= 4 channels, got {rec.n_channels}"
        )
    nyq = rec.sample_rate_hz / 2.0
    if not 0 < f0_hz < nyq:
        raise InvalidArgumentError(f"f0_hz must lie in (0, {nyq}), got {f0_hz}")
    positions = rec.channel_positions_m
    min_spacing = float(np.min(np.diff(positions)))
    if min_spacing <= 0:
        raise InvalidArgumentError(
            "channel positions must be strictly increasing for beamforming"
        )
    k_spatial_nyq = math.pi / min_spacing
    if k_grid is None:
        k_grid = default_k_grid(min_spacing)
    else:
        k_grid = np.asarray(k_grid, dtype=float)
        if np.any(np.abs(k_grid) >= k_spatial_nyq):
            raise InvalidArgumentError(
                f"k grid reaches |k| >= pi/spacing = {k_spatial_nyq:.4g} rad/m "
                "(spatial aliasing)"
            )

    amplitudes = _channel_phasors(rec, f0_hz)
    steering = np.exp(-1j * np.outer(k_grid, positions))
    beam = np.abs(steering @ amplitudes) ** 2 / rec.n_channels**2

    i_peak = int(np.argmax(beam))
    peak = beam[i_peak]
    median = float(np.median(beam))
    if peak <= BEAM_PEAK_MEDIAN_FACTOR * median:
        raise WeakPeakError(
            f"beam peak {peak:.4g} does not exceed {BEAM_PEAK_MEDIAN_FACTOR}x "
            f"the median beam power {median:.4g}"
        )
    peak_k = _parabolic_refine(k_grid, beam, i_peak)
    return BeamSpectrum(
        apparent_wavenumbers=k_grid, power=beam, peak_k_app=peak_k, f0_hz=f0_hz
    )


def default_theta_grid(step_deg: float = DEFAULT_THETA_STEP_DEG) -> np.ndarray:
    """DOA grid covering (-90, 90) degrees exclusive."""
    if not step_deg > 0:
        raise InvalidArgumentError(f"step_deg must be > 0, got {step_deg}")
    n = int(math.floor((90.0 - step_deg / 2) / step_deg))
    return np.arange(-n, n + 1) * step_deg


def wavelength_doa_curve(
    spectrum: BeamSpectrum, theta_grid_deg: np.ndarray | None = None
) -> list[tuple[float, float]]:
    """The (DOA, wavelength) locus consistent with one beam measurement.

    lambda(theta) = (2*pi/|peak_k_app|) * cos(theta); even in theta, which
    is the left-right ambiguity of a single straight cable.
    """
    if spectrum.peak_k_app == 0.0:
        raise DegenerateCurveError(
            "apparent wavenumber peak is zero; wavelength is unbounded"
        )
    if theta_grid_deg is None:
        theta_grid_deg = default_theta_grid()
    lambda_app = 2.0 * math.pi / abs(spectrum.peak_k_app)
    thetas = np.asarray(theta_grid_deg, dtype=float)
    wavelengths = lambda_app * np.cos(np.deg2rad(thetas))
    return list(zip(thetas.tolist(), wavelengths.tolist()))


def solve_dual_layout(
    lambda_app_c1_m: float,
    lambda_app_c2_m: float,
    delta_deg: float,
    spectra: tuple[BeamSpectrum, BeamSpectrum] | None = None,
) -> DoaEstimate:
    """Intersect two wavelength-DOA loci with a known layout offset.

    Solves lambda_app1*cos(theta) = lambda_app2*cos(theta + delta) in
    closed form:

        tan(theta) = (lambda_app2*cos(delta) - lambda_app1)
                     / (lambda_app2*sin(delta))

    giving theta relative to layout C1, theta + delta relative to C2, and
    the true wavelength lambda_app1*cos(theta). The mirrored wave
    (theta -> -theta - delta, applied to both layouts) explains swapped
    apparent wavelengths; when beam spectra are supplied the candidate with
    the larger summed beam power at its implied peaks wins, otherwise the
    mirror is discarded and ``ambiguity_flag`` is set.
    """
    if not lambda_app_c1_m > 0 or not lambda_app_c2_m > 0:
        raise InvalidArgumentError("apparent wavelengths must be > 0")
    if not 0.0 < abs(delta_deg) < 90.0:
        raise InvalidArgumentError(
            f"delta_deg must satisfy 0 < |delta| < 90, got {delta_deg}"
        )
    delta = math.radians(delta_deg)
    theta = math.atan(
        (lambda_app_c2_m * math.cos(delta) - lambda_app_c1_m)
        / (lambda_app_c2_m * math.sin(delta))
    )
    if not (math.cos(theta) > 0 and math.cos(theta + delta) > 0):
        raise InconsistentLayoutsError(
            "no DOA in (-90, 90) degrees has positive cosines on both layouts "
            f"(apparent wavelengths {lambda_app_c1_m:.4g} m / {lambda_app_c2_m:.4g} m, "
            f"delta {delta_deg} deg)"
        )
    doa_c1 = math.degrees(theta)
    wavelength = lambda_app_c1_m * math.cos(theta)

    candidates = [(doa_c1, wavelength)]
    # mirror across the bisector of the two layouts; coincides with the
    # primary when the DOA bisects them, in which case there is no ambiguity
    mirror_c1 = -doa_c1 - delta_deg
    mc1, mc2 = math.radians(mirror_c1), math.radians(mirror_c1 + delta_deg)
    if abs(mirror_c1 - doa_c1) > 1e-9 and math.cos(mc1) > 0 and math.cos(mc2) > 0:
        mirror_wavelength = 0.5 * (
            lambda_app_c1_m * math.cos(mc1) + lambda_app_c2_m * math.cos(mc2)
        )
        candidates.append((mirror_c1, mirror_wavelength))

    ambiguity = len(candidates) > 1 and spectra is None
    best_c1, best_wavelength = candidates[0]
    if spectra is not None and len(candidates) > 1:
        spec1, spec2 = spectra

        def score(c1_deg: float, wl: float) -> float:
            k1 = math.copysign(
                2.0 * math.pi * math.cos(math.radians(c1_deg)) / wl, spec1.peak_k_app
            )
            k2 = math.copysign(
                2.0 * math.pi * math.cos(math.radians(c1_deg + delta_deg)) / wl,
                spec2.peak_k_app,
            )
            return spec1.power_at(k1) + spec2.power_at(k2)

        best_c1, best_wavelength = max(candidates, key=lambda c: score(*c))

    return DoaEstimate(
        doa_c1_deg=best_c1,
        doa_c2_deg=best_c1 + delta_deg,
        wavelength_m=best_wavelength,
        apparent_wavelength_c1_m=lambda_app_c1_m,
        apparent_wavelength_c2_m=lambda_app_c2_m,
        delta_deg=delta_deg,
        ambiguity_flag=ambiguity,
    )
