"""Linear wave theory for the tank: dispersion relation and surface elevation.

A monochromatic plane wave in water of finite depth obeys

    w^2 = g * k * tanh(k * h),   w = 2*pi/T,  k = 2*pi/lambda

which links period and wavelength. Everything here is a pure function; the
wave generator in the tank controls height and period only, so waves are
strictly monochromatic (no spectra).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError

GRAVITY_MPS2 = 9.80665


@dataclass(frozen=True)
class TankEnvironment:
    """Still-water properties of the tank."""

    depth_m: float = 4.5
    gravity_mps2: float = GRAVITY_MPS2

    def __post_init__(self):
        if not self.depth_m > 0:
            raise InvalidArgumentError(f"depth_m must be > 0, got {self.depth_m}")
        if not self.gravity_mps2 > 0:
            raise InvalidArgumentError(f"gravity_mps2 must be > 0, got {self.gravity_mps2}")


@dataclass(frozen=True)
class WaveSpec:
    """One monochromatic plane wave.

    Attributes
    ----------
    height_m : float
        Crest-to-trough wave height H.
    period_s : float
        Wave period T.
    doa_deg : float
        Direction of arrival in the tank frame, degrees, anticlockwise
        positive, in (-180, 180].
    wavelength_m : float
        Wavelength consistent with ``period_s`` under the dispersion
        relation; build instances with :func:`make_wave` so this holds.
    phase_rad : float
        Initial phase.
    """

    height_m: float
    period_s: float
    doa_deg: float
    wavelength_m: float
    phase_rad: float = 0.0

    def __post_init__(self):
        if not self.height_m > 0:
            raise InvalidArgumentError(f"height_m must be > 0, got {self.height_m}")
        if not self.period_s > 0:
            raise InvalidArgumentError(f"period_s must be > 0, got {self.period_s}")
        if not self.wavelength_m > 0:
            raise InvalidArgumentError(f"wavelength_m must be > 0, got {self.wavelength_m}")
        if not -180.0 < self.doa_deg <= 180.0:
            raise InvalidArgumentError(
                f"doa_deg must lie in (-180, 180], got {self.doa_deg}"
            )

    @property
    def angular_frequency(self) -> float:
        return 2.0 * math.pi / self.period_s

    @property
    def wavenumber(self) -> float:
        return 2.0 * math.pi / self.wavelength_m


def solve_dispersion(period_s: float, env: TankEnvironment) -> float:
    """Solve the dispersion relation for the wavelength of a given period.

    Uses bracketed bisection on f(k) = g*k*tanh(k*h) - w^2, which is
    strictly increasing in k, so convergence is guaranteed. Iterates to
    machine precision on k; the relative residual of the returned root is
    far below 1e-10.

    Parameters
    ----------
    period_s : float
        Wave period T [s], > 0.
    env : TankEnvironment
        Water depth and gravity.

    Returns
    -------
    float
        Wavelength lambda = 2*pi/k [m].
    """
    if not period_s > 0:
        raise InvalidArgumentError(f"period_s must be > 0, got {period_s}")
    g, h = env.gravity_mps2, env.depth_m
    omega_sq = (2.0 * math.pi / period_s) ** 2

    def f(k: float) -> float:
        return g * k * math.tanh(k * h) - omega_sq

    lo = 1e-12
    hi = max(2.0 * omega_sq / g, 1e-6)  # deep-water k is omega^2/g
    while f(hi) < 0.0:
        hi *= 2.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if f(mid) < 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-15 * hi:
            break
    return 2.0 * math.pi / (0.5 * (lo + hi))


def period_for_wavelength(wavelength_m: float, env: TankEnvironment) -> float:
    """Inverse of :func:`solve_dispersion`; closed form, handy for tests."""
    if not wavelength_m > 0:
        raise InvalidArgumentError(f"wavelength_m must be > 0, got {wavelength_m}")
    k = 2.0 * math.pi / wavelength_m
    omega = math.sqrt(env.gravity_mps2 * k * math.tanh(k * env.depth_m))
    return 2.0 * math.pi / omega


def dispersion_residual(wave: WaveSpec, env: TankEnvironment) -> float:
    """Relative residual |w^2 - g*k*tanh(k*h)| / w^2 of a wave's (T, lambda)."""
    omega_sq = wave.angular_frequency**2
    k = wave.wavenumber
    return abs(omega_sq - env.gravity_mps2 * k * math.tanh(k * env.depth_m)) / omega_sq


def make_wave(
    height_m: float,
    period_s: float,
    doa_deg: float,
    env: TankEnvironment,
    phase_rad: float = 0.0,
) -> WaveSpec:
    """Build a WaveSpec with the wavelength solved from the dispersion relation."""
    wavelength = solve_dispersion(period_s, env)
    return WaveSpec(
        height_m=height_m,
        period_s=period_s,
        doa_deg=doa_deg,
        wavelength_m=wavelength,
        phase_rad=phase_rad,
    )


def surface_elevation(wave: WaveSpec, x_m, y_m, t_s):
    """Surface elevation of the plane wave at tank position (x, y) and time t.

    eta(x, y, t) = (H/2) * cos(k*(x*cos(theta) + y*sin(theta)) - w*t + phi)

    Accepts scalars or numpy arrays (broadcast); returns the same shape.
    """
    k = wave.wavenumber
    omega = wave.angular_frequency
    theta = math.radians(wave.doa_deg)
    proj = np.asarray(x_m) * math.cos(theta) + np.asarray(y_m) * math.sin(theta)
    arg = k * proj - omega * np.asarray(t_s) + wave.phase_rad
    return 0.5 * wave.height_m * np.cos(arg)
