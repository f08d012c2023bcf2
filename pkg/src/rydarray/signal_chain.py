"""AM carrier -> probe transmission -> photocurrent -> spectrum-analyser SNR.

The carrier RF Rabi frequency is amplitude modulated, the quasi-static probe
transmission is sampled over one modulation period, and the first Fourier
coefficient gives the detected optical tone.  A low-pass factor models the
finite dark-state re-pumping time, the detector maps optical watts to
electrical watts, and the noise floor follows the measured power law
(floors + linear shot term + quadratic modulator term).
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import obe
from .errors import NonpositiveNoise
from .obe import BeamGeometry, CellSpec, LevelScheme, QuadratureSpec
from .tables import ScanTable

TWO_PI = 2.0 * np.pi

#: Effective probe saturation intensity, W/m^2.  Much larger than the
#: free-space two-level value: it absorbs transverse beam-profile and
#: Doppler-class averaging so that microwatt-scale probe powers map onto
#: effective Rabi frequencies of a few MHz (weak relative to gamma2).
#: Configurable wherever it is consumed.
I_SAT = 1.1e3


@dataclass(frozen=True)
class ModulationSpec:
    """Sinusoidal amplitude modulation of the RF carrier."""

    f_am: float
    omega_rf_carrier: float
    depth: float = 0.5

    def __post_init__(self):
        if self.f_am <= 0:
            raise ValueError("f_am must be positive")
        if not 0.0 <= self.depth <= 1.0:
            raise ValueError("depth must be in [0, 1]")


@dataclass(frozen=True)
class DetectorModel:
    """Photodetector plus spectrum-analyser front end."""

    responsivity: float = 1.0      # V per optical W
    rbw: float = 3e3               # spectrum-analyser resolution bandwidth, Hz
    load_conversion: float = 1.0   # electrical W per V^2

    def __post_init__(self):
        if self.responsivity <= 0 or self.rbw <= 0 or self.load_conversion <= 0:
            raise ValueError("detector parameters must be positive")


@dataclass(frozen=True)
class NoiseModel:
    """Noise power spectral densities in detector-electrical units per Hz."""

    sa_floor: float = 1.0
    det_floor: float = 0.0
    shot_coeff: float = 0.0   # per optical W
    aom_coeff: float = 0.0    # per optical W^2

    def __post_init__(self):
        for name in ("sa_floor", "det_floor", "shot_coeff", "aom_coeff"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")

    def replace(self, **changes) -> "NoiseModel":
        return dataclasses.replace(self, **changes)


@dataclass(frozen=True)
class DynamicResponse:
    """Low-pass response of the atomic medium to the modulation.

    omega_eit is the dark-state re-pumping rate; the corner frequency is
    omega_eit / 2 pi.  poles sets the asymptotic rolloff order (1 pole gives
    -20 dB of electrical power per frequency decade).
    """

    omega_eit: float
    poles: int = 1

    def __post_init__(self):
        if self.omega_eit <= 0:
            raise ValueError("omega_eit must be positive")
        if self.poles < 1:
            raise ValueError("poles must be >= 1")

    @property
    def corner_hz(self) -> float:
        return self.omega_eit / TWO_PI

    @classmethod
    def from_pumping_rate(cls, omega_c: float, gamma: float, poles: int = 1) -> "DynamicResponse":
        """Corner at the EIT pumping rate omega_c^2 / (2 gamma)."""
        return cls(omega_eit=omega_c ** 2 / (2.0 * gamma), poles=poles)

    @classmethod
    def from_corner(cls, corner_hz: float, poles: int = 1) -> "DynamicResponse":
        return cls(omega_eit=TWO_PI * corner_hz, poles=poles)


class TransductionResult(NamedTuple):
    delta_p1: float       # optical W at f_AM
    response_sign: int    # sign of dT/dOmega_RF at the carrier point


def probe_rabi(probe_power: float, geometry: BeamGeometry,
               gamma2: float = obe.GAMMA_5P, i_sat: float = I_SAT) -> float:
    """Peak probe Rabi frequency for a Gaussian beam of the given power."""
    intensity = 2.0 * probe_power / (np.pi * geometry.waist_p ** 2)
    return gamma2 * np.sqrt(intensity / (2.0 * i_sat))


def scheme_at_power(scheme: LevelScheme, geometry: BeamGeometry,
                    probe_power: float, i_sat: float = I_SAT) -> LevelScheme:
    """Copy of `scheme` with omega_p set from the optical probe power."""
    return scheme.replace(omega_p=probe_rabi(probe_power, geometry, scheme.gamma2, i_sat))


def transduce_fundamental(scheme: LevelScheme, mod: ModulationSpec,
                          geometry: BeamGeometry, cell: CellSpec,
                          quad: QuadratureSpec, probe_power: float,
                          n_samples: int = 256) -> TransductionResult:
    """Optical tone amplitude |dP_1| at f_AM from quasi-static transmission.

    One modulation period is sampled at n_samples points, the transmission is
    evaluated at each instantaneous RF Rabi frequency, and the magnitude of
    the first Fourier coefficient of the transmitted power is returned
    together with the sign of the local transmission response dT/dOmega_RF.
    """
    if probe_power <= 0:
        raise ValueError("probe_power must be positive")
    carrier = mod.omega_rf_carrier
    phases = TWO_PI * np.arange(n_samples) / n_samples
    omega_t = carrier * (1.0 + mod.depth * np.cos(phases))

    # cos is symmetric over the period: only the first half is distinct.
    half = n_samples // 2 + 1
    eval_rf = omega_t[:half]
    # Two extra points give the finite-difference response sign at the carrier.
    h = max(1e-3 * carrier, 1e-6 * scheme.gamma2)
    eval_rf = np.concatenate([eval_rf, [carrier - h, carrier + h]])

    a = obe.doppler_absorption_many(scheme, geometry, cell, quad, omega_rf=eval_rf)
    t = np.exp(-cell.od_resonant * a)
    sign = 1 if t[-1] >= t[-2] else -1
    t_half = t[:half]
    transmission = np.concatenate([t_half, t_half[-2 + n_samples % 2::-1]])[:n_samples]

    if mod.depth == 0.0:
        return TransductionResult(0.0, sign)
    power = probe_power * transmission
    c1 = (2.0 / n_samples) * np.sum(power * np.exp(-1j * phases))
    return TransductionResult(float(np.abs(c1)), sign)


def dynamic_attenuation(f_am: float, resp: DynamicResponse) -> float:
    """Amplitude attenuation of the detected tone at modulation frequency f_am."""
    if f_am < 0:
        raise ValueError("f_am must be >= 0")
    return float((1.0 + (f_am / resp.corner_hz) ** 2) ** (-resp.poles / 2.0))


def electrical_signal_power(delta_p1: float, det: DetectorModel) -> float:
    """RMS electrical tone power seen by the spectrum analyser."""
    if delta_p1 < 0:
        raise ValueError("delta_p1 must be >= 0")
    return det.load_conversion * (det.responsivity * delta_p1) ** 2 / 2.0


def noise_floor_power(total_optical_power: float, noise: NoiseModel,
                      det: DetectorModel) -> float:
    """Displayed noise power within one resolution bandwidth."""
    if total_optical_power < 0:
        raise ValueError("total_optical_power must be >= 0")
    p = total_optical_power
    psd = noise.sa_floor + noise.det_floor + noise.shot_coeff * p + noise.aom_coeff * p * p
    return psd * det.rbw


def snr_db(signal_power: float, noise_power: float) -> float:
    """Power ratio in dB; -inf sentinel for zero signal."""
    if noise_power <= 0:
        raise NonpositiveNoise("noise power must be positive")
    if signal_power == 0:
        return float("-inf")
    return 10.0 * np.log10(signal_power / noise_power)


def snr_vs_probe_power(powers, scheme: LevelScheme, mod: ModulationSpec,
                       geometry: BeamGeometry, cell: CellSpec, quad: QuadratureSpec,
                       noise: NoiseModel, det: DetectorModel,
                       dynamics: DynamicResponse, i_sat: float = I_SAT) -> ScanTable:
    """SNR_dB as a function of probe power; omega_p follows sqrt(power)."""
    powers = np.asarray(powers, dtype=float)
    if powers.size == 0:
        raise ValueError("power sweep must be non-empty")
    att = dynamic_attenuation(mod.f_am, dynamics)
    rows = []
    for p in powers:
        if p == 0.0:
            dp1 = 0.0
        else:
            s = scheme_at_power(scheme, geometry, p, i_sat)
            dp1 = transduce_fundamental(s, mod, geometry, cell, quad, p).delta_p1 * att
        sig = electrical_signal_power(dp1, det)
        nse = noise_floor_power(p, noise, det)
        rows.append((p, dp1, sig, nse, snr_db(sig, nse)))
    return ScanTable(
        columns=["probe_power_w", "delta_p1_w", "signal_el_w", "noise_el_w", "snr_db"],
        rows=np.array(rows),
        metadata={"f_am_hz": repr(mod.f_am), "depth": repr(mod.depth)},
    )
