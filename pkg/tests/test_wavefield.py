"""Dispersion relation and plane-wave surface elevation."""

import math

import numpy as np
import pytest

from seastrain.errors import InvalidArgumentError
from seastrain.wavefield import (
    TankEnvironment,
    WaveSpec,
    dispersion_residual,
    make_wave,
    period_for_wavelength,
    solve_dispersion,
    surface_elevation,
)

ENV = TankEnvironment()  # 4.5 m depth, g = 9.80665


def bisection_oracle(period_s, depth_m, g=9.80665):
    """Independent root finder: plain bisection on g*k*tanh(k*h) - w^2."""
    w2 = (2 * math.pi / period_s) ** 2
    f = lambda k: g * k * math.tanh(k * depth_m) - w2
    lo, hi = 1e-6, 1e3
    assert f(lo) < 0 < f(hi)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if f(mid) < 0:
            lo = mid
        else:
            hi = mid
    return 2 * math.pi / (0.5 * (lo + hi))


def test_tank_wavelength_at_long_period():
    lam = solve_dispersion(2.5, ENV)
    assert lam == pytest.approx(bisection_oracle(2.5, 4.5), rel=1e-9)
    assert lam == pytest.approx(9.69776, abs=2e-2)


def test_tank_wavelength_at_short_period_matches_deep_water():
    lam = solve_dispersion(1.25, ENV)
    deep = ENV.gravity_mps2 * 1.25**2 / (2 * math.pi)
    assert lam == pytest.approx(bisection_oracle(1.25, 4.5), rel=1e-9)
    assert lam == pytest.approx(2.44, abs=5e-3)
    assert abs(lam - deep) / deep < 1e-3


def test_deep_water_limit():
    deep_env = TankEnvironment(depth_m=1e6)
    for period in (1.0, 2.5, 8.0):
        expected = deep_env.gravity_mps2 * period**2 / (2 * math.pi)
        assert solve_dispersion(period, deep_env) == pytest.approx(expected, rel=1e-6)


def test_dispersion_residual_is_tiny_on_a_grid():
    for period in np.linspace(0.5, 10.0, 25):
        for depth in (0.5, 4.5, 50.0):
            env = TankEnvironment(depth_m=depth)
            wave = make_wave(0.3, float(period), 0.0, env)
            assert dispersion_residual(wave, env) < 1e-10


def test_dispersion_monotone_in_period():
    periods = np.linspace(0.5, 10.0, 100)
    wavelengths = [solve_dispersion(float(t), ENV) for t in periods]
    assert all(b > a for a, b in zip(wavelengths, wavelengths[1:]))


def test_dispersion_rejects_bad_arguments():
    with pytest.raises(InvalidArgumentError):
        solve_dispersion(0.0, ENV)
    with pytest.raises(InvalidArgumentError):
        solve_dispersion(-2.0, ENV)
    with pytest.raises(InvalidArgumentError):
        TankEnvironment(depth_m=0.0)
    with pytest.raises(InvalidArgumentError):
        TankEnvironment(gravity_mps2=-9.8)


def test_period_for_wavelength_round_trip():
    lam = solve_dispersion(2.5, ENV)
    assert period_for_wavelength(lam, ENV) == pytest.approx(2.5, rel=1e-12)


def test_wavespec_validation():
    with pytest.raises(InvalidArgumentError):
        WaveSpec(height_m=-0.1, period_s=2.5, doa_deg=0.0, wavelength_m=9.7)
    with pytest.raises(InvalidArgumentError):
        WaveSpec(height_m=0.3, period_s=2.5, doa_deg=181.0, wavelength_m=9.7)
    with pytest.raises(InvalidArgumentError):
        WaveSpec(height_m=0.3, period_s=2.5, doa_deg=-180.0, wavelength_m=9.7)
    wave = make_wave(0.3, 2.5, -20.0, ENV)
    assert dispersion_residual(wave, ENV) < 1e-9


def test_crest_amplitude_is_half_height():
    wave = make_wave(0.30, 2.5, 30.0, ENV)
    assert surface_elevation(wave, 0.0, 0.0, 0.0) == pytest.approx(0.15, abs=1e-15)


def test_elevation_periodic_in_time():
    wave = make_wave(0.30, 2.5, -20.0, ENV, phase_rad=0.7)
    t = np.linspace(0.0, 5.0, 41)
    a = surface_elevation(wave, 3.0, -2.0, t)
    b = surface_elevation(wave, 3.0, -2.0, t + wave.period_s)
    assert np.max(np.abs(a - b)) < 1e-12


def test_spatial_period_along_propagation_direction():
    wave = make_wave(0.30, 2.5, 25.0, ENV)
    u = np.array([math.cos(math.radians(25.0)), math.sin(math.radians(25.0))])
    p0 = np.array([1.0, 2.0])
    p1 = p0 + wave.wavelength_m * u
    half = p0 + 0.5 * wave.wavelength_m * u
    t = 0.8
    assert surface_elevation(wave, *p0, t) == pytest.approx(
        surface_elevation(wave, *p1, t), abs=1e-12
    )
    assert surface_elevation(wave, *half, t) == pytest.approx(
        -surface_elevation(wave, *p0, t), abs=1e-12
    )


def test_zero_time_mean_over_integer_periods():
    wave = make_wave(0.30, 2.5, -5.0, ENV, phase_rad=1.1)
    t = np.arange(8 * 500) * (wave.period_s / 500)  # 8 full periods
    eta = surface_elevation(wave, 4.0, 1.0, t)
    assert abs(np.mean(eta)) < 1e-12 * wave.height_m
