"""seastrain: sea-state estimation from distributed acoustic sensing.

Simulates DAS strain records of water-tank plane waves and estimates wave
period, height, and direction of arrival from them. Ships as a core
library, an HTTP service (:mod:`seastrain.service`), and a CLI
(:mod:`seastrain.cli`) that drives the service.
"""

__version__ = "0.1.0"

from .dassim import CableGeometry, DasRecord, SimConfig, directional_sensitivity, synthesize_das
from .dsp import Psd, TimeSeries
from .estimators import (
    BeamSpectrum,
    DoaEstimate,
    HeightCalibration,
    beamform_apparent_wavenumber,
    estimate_height,
    estimate_period,
    fit_height_calibration,
    solve_dual_layout,
)
from .recordio import read_das_record, write_das_record
from .wavefield import TankEnvironment, WaveSpec, make_wave, solve_dispersion, surface_elevation

__all__ = [
    "__version__",
    "BeamSpectrum",
    "CableGeometry",
    "DasRecord",
    "DoaEstimate",
    "HeightCalibration",
    "Psd",
    "SimConfig",
    "TankEnvironment",
    "TimeSeries",
    "WaveSpec",
    "beamform_apparent_wavenumber",
    "directional_sensitivity",
    "estimate_height",
    "estimate_period",
    "fit_height_calibration",
    "make_wave",
    "read_das_record",
    "solve_dispersion",
    "solve_dual_layout",
    "surface_elevation",
    "synthesize_das",
    "write_das_record",
]
