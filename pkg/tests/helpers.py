"""Shared builders for the test suite."""

import dataclasses

from seastrain.dassim import (
    CableGeometry,
    SimConfig,
    clean_signal_rms,
    synthesize_das,
)
from seastrain.wavefield import TankEnvironment, make_wave

TANK_CHANNEL_START_M = 161.0
TANK_CHANNEL_SPACING_M = 0.80
TANK_CHANNEL_COUNT = 19


def tank_setup(
    height=0.30,
    period=2.5,
    cable_doa=-20.0,
    tank_doa=-20.0,
    n_channels=TANK_CHANNEL_COUNT,
):
    """Environment, wave, and geometry for one tank condition.

    ``cable_doa`` is the wave direction relative to the cable axis; the
    frame angle (cable axis) is adjusted to realize it for the fixed
    tank-frame wave direction.
    """
    env = TankEnvironment()
    wave = make_wave(height, period, tank_doa, env)
    geom = CableGeometry.uniform(
        TANK_CHANNEL_START_M,
        TANK_CHANNEL_SPACING_M,
        n_channels,
        axis_angle_deg=tank_doa - cable_doa,
    )
    return env, wave, geom


def simulate_tank(
    height=0.30,
    period=2.5,
    cable_doa=-20.0,
    noise_fraction=0.0,
    seed=0,
    sample_rate_hz=2000.0,
    duration_s=120.0,
    harmonic_gains=(1.0, 0.3, 0.1),
    n_channels=TANK_CHANNEL_COUNT,
    coupling_mode="height-proportional",
):
    """Synthesize one record; noise is expressed as a fraction of signal RMS."""
    env, wave, geom = tank_setup(height, period, cable_doa, n_channels=n_channels)
    cfg = SimConfig(
        sample_rate_hz=sample_rate_hz,
        duration_s=duration_s,
        harmonic_gains=harmonic_gains,
        seed=seed,
        coupling_mode=coupling_mode,
    )
    if noise_fraction:
        cfg = dataclasses.replace(
            cfg, noise_rms=noise_fraction * clean_signal_rms(wave, geom, env, cfg)
        )
    return synthesize_das(wave, geom, env, cfg), wave, geom, env, cfg
