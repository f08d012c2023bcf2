"""Flat TOML configuration covering every tunable default.

All keys live at the top level of the file and map one-to-one onto the
fields of SimulationConfig below; an empty file yields the documented
defaults.  Unknown keys and unphysical values are rejected with the
offending key named.

The noise coefficients and the signal scale default to the calibrated
profile produced by calibrate.calibrate_noise from the published anchor
features (analyser floor pinned to 1, detector floor +1.5 dB, shot
crossover 5 uW, quadratic onset 50 uW, shot-only ceiling 32 dB).  The
quadrature defaults here are the production speed/accuracy tradeoff for
signal-chain sweeps and are coarser than the QuadratureSpec type defaults.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from . import obe, signal_chain as sc
from .array_model import ArraySnapshot, ReceiverVolume
from .errors import ConfigError
from .obe import TWO_PI

MHZ = TWO_PI * 1e6
KHZ = TWO_PI * 1e3


@dataclass(frozen=True)
class SimulationConfig:
    # Level scheme (Rabi frequencies and detunings in 2pi MHz, decays below)
    omega_p_mhz: float = 1.9
    omega_c_mhz: float = 8.0
    omega_rf_mhz: float = 0.0
    delta_p_mhz: float = 0.0
    delta_c_mhz: float = 0.0
    delta_rf_mhz: float = 0.0
    gamma2_mhz: float = 6.07
    gamma3_khz: float = 10.0
    gamma4_khz: float = 10.0
    gamma_transit_khz: float = 100.0

    # Beam geometry and cell
    lambda_p_nm: float = 780.0
    lambda_c_nm: float = 480.0
    theta_deg: float = 2.0
    waist_p_um: float = 70.0
    waist_c_um: float = 60.0
    cell_length_mm: float = 75.0
    temperature_k: float = 358.15
    density_m3: float = 1e18
    od_resonant: float = 5.0

    # Doppler quadrature
    quad_longitudinal: int = 32
    quad_transverse: int = 8
    sigma_cut: float = 4.0
    stretch: float = 4.0

    # Modulation and probe power
    f_am_khz: float = 100.0
    depth: float = 0.5
    carrier_mhz: float = 5.0
    probe_power_uw: float = 150.0
    i_sat_w_m2: float = 1.1e3
    samples_per_period: int = 256

    # Detector, noise (calibrated profile), dynamics
    responsivity: float = 1.0
    load_conversion: float = 3.807790717096312e20
    rbw_khz: float = 3.0
    sa_floor: float = 1.0
    det_floor: float = 0.4125375625070294
    shot_coeff: float = 280982.88606392033
    aom_coeff: float = 5223930012.471148
    corner_khz: float = 174.0
    lowpass_poles: int = 2

    # Receiver array
    n_receivers: int = 1
    receiver_power_uw: float = 110.0
    receiver_offsets_mhz: tuple = (0.0, 3.0, 6.0, 10.0)
    receiver_efficiencies: tuple = (1.0, 1.0, 1.0, 1.0)
    receiver_signs: tuple = (1, 1, 1, 1)
    min_separation_mhz: float = 3.0

    # Analysis conventions
    snr_convention: str = "amplitude"
    bw_threshold_db: float = 10.0

    def __post_init__(self):
        _validate(self)

    def replace(self, **changes) -> "SimulationConfig":
        return dataclasses.replace(self, **changes)

    # --- builders -------------------------------------------------------

    def scheme(self) -> obe.LevelScheme:
        return obe.LevelScheme(
            omega_p=self.omega_p_mhz * MHZ, omega_c=self.omega_c_mhz * MHZ,
            omega_rf=self.omega_rf_mhz * MHZ, delta_p=self.delta_p_mhz * MHZ,
            delta_c=self.delta_c_mhz * MHZ, delta_rf=self.delta_rf_mhz * MHZ,
            gamma2=self.gamma2_mhz * MHZ, gamma3=self.gamma3_khz * KHZ,
            gamma4=self.gamma4_khz * KHZ,
            gamma_transit=self.gamma_transit_khz * KHZ)

    def geometry(self) -> obe.BeamGeometry:
        return obe.BeamGeometry(
            lambda_p=self.lambda_p_nm * 1e-9, lambda_c=self.lambda_c_nm * 1e-9,
            theta=self.theta_deg, waist_p=self.waist_p_um * 1e-6,
            waist_c=self.waist_c_um * 1e-6)

    def cell(self) -> obe.CellSpec:
        return obe.CellSpec(length=self.cell_length_mm * 1e-3,
                            temperature=self.temperature_k,
                            density=self.density_m3,
                            od_resonant=self.od_resonant)

    def quad(self) -> obe.QuadratureSpec:
        return obe.QuadratureSpec(n_longitudinal=self.quad_longitudinal,
                                  n_transverse=self.quad_transverse,
                                  sigma_cut=self.sigma_cut, stretch=self.stretch)

    def modulation(self) -> sc.ModulationSpec:
        return sc.ModulationSpec(f_am=self.f_am_khz * 1e3,
                                 omega_rf_carrier=self.carrier_mhz * MHZ,
                                 depth=self.depth)

    def detector(self) -> sc.DetectorModel:
        return sc.DetectorModel(responsivity=self.responsivity,
                                rbw=self.rbw_khz * 1e3,
                                load_conversion=self.load_conversion)

    def noise(self) -> sc.NoiseModel:
        return sc.NoiseModel(sa_floor=self.sa_floor, det_floor=self.det_floor,
                             shot_coeff=self.shot_coeff, aom_coeff=self.aom_coeff)

    def dynamics(self) -> sc.DynamicResponse:
        return sc.DynamicResponse.from_corner(self.corner_khz * 1e3,
                                              poles=self.lowpass_poles)

    def array(self) -> ArraySnapshot:
        n = self.n_receivers
        recs = [ReceiverVolume(probe_power=self.receiver_power_uw * 1e-6,
                               detuning_offset=self.receiver_offsets_mhz[i] * MHZ,
                               efficiency=self.receiver_efficiencies[i],
                               response_sign=int(self.receiver_signs[i]))
                for i in range(n)]
        return ArraySnapshot(receivers=recs, scheme=self.scheme(),
                             geometry=self.geometry(), cell=self.cell(),
                             quad=self.quad(),
                             min_separation=self.min_separation_mhz * MHZ)


_NONNEGATIVE = (
    "omega_p_mhz", "omega_c_mhz", "omega_rf_mhz", "gamma2_mhz", "gamma3_khz",
    "gamma4_khz", "gamma_transit_khz", "sa_floor", "det_floor", "shot_coeff",
    "aom_coeff", "f_am_khz", "bw_threshold_db",
)
_POSITIVE = (
    "lambda_p_nm", "lambda_c_nm", "waist_p_um", "waist_c_um", "cell_length_mm",
    "temperature_k", "density_m3", "od_resonant", "sigma_cut", "carrier_mhz",
    "probe_power_uw", "i_sat_w_m2", "responsivity", "load_conversion",
    "rbw_khz", "corner_khz", "receiver_power_uw", "min_separation_mhz",
)


def _validate(cfg: SimulationConfig) -> None:
    for key in _NONNEGATIVE:
        if getattr(cfg, key) < 0:
            raise ConfigError(f"{key} must be >= 0, got {getattr(cfg, key)}", key)
    for key in _POSITIVE:
        if getattr(cfg, key) <= 0:
            raise ConfigError(f"{key} must be > 0, got {getattr(cfg, key)}", key)
    if not 0.0 <= cfg.theta_deg < 90.0:
        raise ConfigError("theta_deg must be in [0, 90)", "theta_deg")
    if not 0.0 <= cfg.depth <= 1.0:
        raise ConfigError("depth must be in [0, 1]", "depth")
    if cfg.quad_longitudinal < 1 or cfg.quad_transverse < 1:
        raise ConfigError("quadrature node counts must be >= 1",
                          "quad_longitudinal")
    if cfg.stretch < 0:
        raise ConfigError("stretch must be >= 0", "stretch")
    if cfg.lowpass_poles < 1:
        raise ConfigError("lowpass_poles must be >= 1", "lowpass_poles")
    if cfg.samples_per_period < 8:
        raise ConfigError("samples_per_period must be >= 8", "samples_per_period")
    if cfg.n_receivers < 1:
        raise ConfigError("n_receivers must be >= 1", "n_receivers")
    if cfg.n_receivers > len(cfg.receiver_offsets_mhz):
        raise ConfigError("n_receivers exceeds the listed receiver_offsets_mhz",
                          "n_receivers")
    if (len(cfg.receiver_efficiencies) < cfg.n_receivers
            or len(cfg.receiver_signs) < cfg.n_receivers):
        raise ConfigError("per-receiver lists shorter than n_receivers",
                          "receiver_efficiencies")
    for e in cfg.receiver_efficiencies[:cfg.n_receivers]:
        if not 0.0 < e <= 1.0:
            raise ConfigError("receiver efficiencies must be in (0, 1]",
                              "receiver_efficiencies")
    for s in cfg.receiver_signs[:cfg.n_receivers]:
        if s not in (-1, 1):
            raise ConfigError("receiver signs must be -1 or +1", "receiver_signs")
    if cfg.snr_convention not in ("amplitude", "power"):
        raise ConfigError("snr_convention must be 'amplitude' or 'power'",
                          "snr_convention")


_FIELD_TYPES = {f.name: f for f in dataclasses.fields(SimulationConfig)}
_TUPLE_KEYS = {"receiver_offsets_mhz", "receiver_efficiencies", "receiver_signs"}
_INT_KEYS = {"quad_longitudinal", "quad_transverse", "samples_per_period",
             "lowpass_poles", "n_receivers"}


def config_from_dict(data: dict) -> SimulationConfig:
    """Build a config from a flat key-value mapping (strings coerced)."""
    kwargs = {}
    for key, value in data.items():
        if key not in _FIELD_TYPES:
            raise ConfigError(f"unknown configuration key {key!r}", key)
        try:
            kwargs[key] = _coerce(key, value)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad value for {key!r}: {exc}", key) from None
    return SimulationConfig(**kwargs)


def _coerce(key, value):
    if key in _TUPLE_KEYS:
        if isinstance(value, str):
            value = [v for v in value.strip("[]() ").split(",") if v.strip()]
        items = [int(v) if key == "receiver_signs" else float(v) for v in value]
        return tuple(items)
    if key == "snr_convention":
        return str(value)
    if key in _INT_KEYS:
        i = int(str(value), 0) if isinstance(value, str) else int(value)
        if isinstance(value, float) and value != i:
            raise ValueError("expected an integer")
        return i
    return float(value)


def apply_overrides(cfg: SimulationConfig, overrides: dict) -> SimulationConfig:
    """Apply key=value overrides (values may be strings) onto a config."""
    base = {f.name: getattr(cfg, f.name) for f in dataclasses.fields(cfg)}
    for key, value in overrides.items():
        if key not in _FIELD_TYPES:
            raise ConfigError(f"unknown configuration key {key!r}", key)
        try:
            base[key] = _coerce(key, value)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad value for {key!r}: {exc}", key) from None
    return SimulationConfig(**base)


def load_config(source) -> SimulationConfig:
    """Parse a flat TOML file into a SimulationConfig."""
    if hasattr(source, "read"):
        text = source.read()
        if isinstance(text, bytes):
            text = text.decode()
    else:
        with open(source, "rb") as fh:
            text = fh.read().decode()
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"invalid TOML: {exc}", "") from None
    return config_from_dict(data)
