"""Distributed Rydberg RF receiver array simulator.

Steady-state four-level EIT/Autler-Townes optics, the AM-carrier to
photocurrent signal chain with a calibrated noise budget, and SIMO scaling
of SNR, bandwidth, and Shannon capacity with receiver count.
"""

__version__ = "0.1.0"

from .errors import (
    BadSlope,
    CalibrationDiverged,
    ConfigError,
    InsufficientPoints,
    NoCrossing,
    NonpositiveNoise,
    ParseError,
    RydArrayError,
    SingularSystem,
)
from .obe import (
    BeamGeometry,
    CellSpec,
    DensityMatrix,
    LevelScheme,
    QuadratureSpec,
    absorption_coefficient,
    doppler_averaged_absorption,
    steady_state,
    transmission_spectrum,
)
from .signal_chain import (
    DetectorModel,
    DynamicResponse,
    ModulationSpec,
    NoiseModel,
    dynamic_attenuation,
    electrical_signal_power,
    noise_floor_power,
    probe_rabi,
    scheme_at_power,
    snr_db,
    snr_vs_probe_power,
    transduce_fundamental,
)
from .array_model import (
    ArraySnapshot,
    ReceiverVolume,
    ScalingFit,
    bw_scaling_law,
    capacity,
    capacity_curve,
    capacity_of_n,
    combined_signal_amplitude,
    combined_snr_db,
    find_bandwidth,
    fit_slope,
    snr_scaling_law,
    snr_to_optical_ratio,
    snr_vs_fam,
)
from .calibrate import CalibrationResult, NoiseAnchors, calibrate_noise
from .config import SimulationConfig, config_from_dict, load_config
from .tables import ScanTable, read_table, write_table
from .harness import ScanSpec, run_scan

__all__ = [name for name in dir() if not name.startswith("_")]
