"""Multi-receiver combining and SIMO scaling of SNR, bandwidth, capacity.

Several probe beams (receiver volumes) share one photodetector: their
modulation amplitudes add with sign, the noise floor is evaluated at the
total optical power, and the combined SNR feeds the Shannon-Hartley
capacity.  Closed-form scaling laws (SNR +20 log10 N, logarithmic
bandwidth growth) are provided alongside the first-principles path so the
regime where they hold is measurable.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import signal_chain as sc
from .errors import BadSlope, InsufficientPoints, NoCrossing
from .obe import TWO_PI, BeamGeometry, CellSpec, LevelScheme, QuadratureSpec
from .signal_chain import DetectorModel, DynamicResponse, ModulationSpec, NoiseModel
from .tables import ScanTable


@dataclass(frozen=True)
class ReceiverVolume:
    """One probe beam: its power, frequency offset, and contrast factor."""

    probe_power: float
    detuning_offset: float = 0.0   # rad/s probe-frequency (AOM) offset
    efficiency: float = 1.0        # per-receiver EIT-contrast factor
    response_sign: int = 1         # sign of dT/dOmega_RF at this offset

    def __post_init__(self):
        if self.probe_power <= 0:
            raise ValueError("probe_power must be positive")
        if not 0.0 < self.efficiency <= 1.0:
            raise ValueError("efficiency must be in (0, 1]")
        if self.response_sign not in (-1, 1):
            raise ValueError("response_sign must be -1 or +1")


@dataclass(frozen=True)
class ArraySnapshot:
    """A set of receiver volumes sharing coupling beam, cell, and geometry.

    Receiver transduction is evaluated at the shared level scheme; the
    per-receiver detuning offsets enter through the minimum-separation
    constraint and the efficiency/sign factors, not as a probe detuning of
    the shared scheme.
    """

    receivers: tuple
    scheme: LevelScheme
    geometry: BeamGeometry = field(default_factory=BeamGeometry)
    cell: CellSpec = field(default_factory=CellSpec)
    quad: QuadratureSpec = field(default_factory=QuadratureSpec)
    min_separation: float = TWO_PI * 3e6

    def __post_init__(self):
        object.__setattr__(self, "receivers", tuple(self.receivers))
        if not self.receivers:
            raise ValueError("array must contain at least one receiver")
        offs = [r.detuning_offset for r in self.receivers]
        for i in range(len(offs)):
            for j in range(i + 1, len(offs)):
                if abs(offs[i] - offs[j]) < self.min_separation:
                    raise ValueError(
                        f"receivers {i} and {j} are separated by less than "
                        f"the minimum {self.min_separation:.3g} rad/s")

    @property
    def total_power(self) -> float:
        return sum(r.probe_power for r in self.receivers)


@dataclass(frozen=True)
class ScalingFit:
    """Slope and single-receiver anchors of an SNR-vs-f_AM falloff."""

    m: float          # dB per Hz, negative for a physical falloff
    bw1: float        # Hz, single-receiver 10-dB bandwidth
    snr_db_1: float   # dB at the reference modulation frequency


def _receiver_amplitudes(array: ArraySnapshot, mod: ModulationSpec,
                         i_sat: float = sc.I_SAT) -> np.ndarray:
    """Unsigned dP1 of every receiver; duplicates share one solve."""
    amps = {}
    for r in array.receivers:
        if r.probe_power not in amps:
            s = sc.scheme_at_power(array.scheme, array.geometry, r.probe_power, i_sat)
            amps[r.probe_power] = sc.transduce_fundamental(
                s, mod, array.geometry, array.cell, array.quad, r.probe_power).delta_p1
    return np.array([amps[r.probe_power] for r in array.receivers])


def combined_signal_amplitude(array: ArraySnapshot, mod: ModulationSpec,
                              i_sat: float = sc.I_SAT) -> float:
    """Signed sum of receiver amplitudes on the shared photodetector (W)."""
    amps = _receiver_amplitudes(array, mod, i_sat)
    signs = np.array([r.response_sign for r in array.receivers])
    effs = np.array([r.efficiency for r in array.receivers])
    return float(np.sum(signs * effs * amps))


def combined_snr_db(array: ArraySnapshot, mod: ModulationSpec, noise: NoiseModel,
                    det: DetectorModel, dynamics: DynamicResponse,
                    independent_detectors: bool = False,
                    i_sat: float = sc.I_SAT) -> float:
    """SNR of the combined channel; noise taken at the total optical power."""
    amps = _receiver_amplitudes(array, mod, i_sat)
    effs = np.array([r.efficiency for r in array.receivers])
    if independent_detectors:
        amp = float(np.sum(effs * amps))
    else:
        signs = np.array([r.response_sign for r in array.receivers])
        amp = abs(float(np.sum(signs * effs * amps)))
    amp *= sc.dynamic_attenuation(mod.f_am, dynamics)
    sig = sc.electrical_signal_power(amp, det)
    nse = sc.noise_floor_power(array.total_power, noise, det)
    return sc.snr_db(sig, nse)


def snr_scaling_law(n: int, snr_db_1: float) -> float:
    """Closed-form SIMO SNR for n identical receivers."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return snr_db_1 + 20.0 * np.log10(n)


def bw_scaling_law(n: int, fit: ScalingFit) -> float:
    """Closed-form bandwidth growth bw1 + (20/|m|) log10 n.

    The falloff slope is stored negative (dB lost per Hz); only its
    magnitude enters, so the bandwidth grows for any physical fit.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if fit.m >= 0:
        raise BadSlope("falloff slope must be negative")
    return fit.bw1 + (20.0 / abs(fit.m)) * np.log10(n)


def capacity(f_am: float, snr_power_ratio: float) -> float:
    """Shannon-Hartley capacity in bits/s."""
    if snr_power_ratio < 0:
        raise ValueError("snr_power_ratio must be >= 0")
    return f_am * np.log2(1.0 + snr_power_ratio)


def capacity_of_n(n: int, snr_opt_1: float, f_am: float) -> float:
    """SIMO capacity f_am * log2(1 + n * snr_opt_1)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return f_am * np.log2(1.0 + n * snr_opt_1)


def snr_to_optical_ratio(snr_db: float, convention: str = "amplitude") -> float:
    """Map spectrum-analyser SNR_dB to the capacity formula's SNR ratio.

    "amplitude" follows 10^(dB/20) (optical-power ratio behind a square-law
    detector); "power" is the conventional electrical 10^(dB/10).
    """
    if convention == "amplitude":
        return float(10.0 ** (snr_db / 20.0))
    if convention == "power":
        return float(10.0 ** (snr_db / 10.0))
    raise ValueError(f"unknown SNR convention {convention!r}")


def find_bandwidth(curve: ScanTable, threshold_db: float = 10.0) -> float:
    """First downward crossing of the SNR threshold, linearly interpolated."""
    f = curve.column("f_am_hz")
    s = curve.column("snr_db")
    if len(f) == 0:
        raise ValueError("curve is empty")
    if np.any(np.diff(f) <= 0):
        raise ValueError("curve must be sorted by f_am")
    for i in range(len(f) - 1):
        if s[i] >= threshold_db and s[i + 1] < threshold_db:
            frac = (s[i] - threshold_db) / (s[i] - s[i + 1])
            return float(f[i] + frac * (f[i + 1] - f[i]))
    raise NoCrossing(f"SNR curve never crosses {threshold_db} dB from above")


def fit_slope(curve: ScanTable, window=None) -> ScalingFit:
    """Least-squares line through SNR_dB vs f_AM inside the window.

    The default window spans from the frequency where the curve has dropped
    3 dB below its maximum down to the 10-dB cutoff.
    """
    f = curve.column("f_am_hz")
    s = curve.column("snr_db")
    if window is None:
        smax = s.max()
        above = np.nonzero(s >= smax - 3.0)[0]
        lo = f[above[-1]]
        hi = find_bandwidth(curve)
        window = (lo, hi)
    lo, hi = window
    mask = (f >= lo) & (f <= hi)
    if np.count_nonzero(mask) < 3:
        raise InsufficientPoints(
            f"only {np.count_nonzero(mask)} points in window [{lo:g}, {hi:g}] Hz")
    m, b = np.polyfit(f[mask], s[mask], 1)
    try:
        bw1 = find_bandwidth(curve)
    except NoCrossing:
        bw1 = float("nan")
    return ScalingFit(m=float(m), bw1=bw1, snr_db_1=float(s.max()))


def snr_vs_fam(f_am_values, array: ArraySnapshot, mod: ModulationSpec,
               noise: NoiseModel, det: DetectorModel, dynamics: DynamicResponse,
               i_sat: float = sc.I_SAT) -> ScanTable:
    """SNR_dB over a modulation-frequency sweep (one transduction solve)."""
    f_am_values = np.asarray(f_am_values, dtype=float)
    if f_am_values.size == 0:
        raise ValueError("f_am sweep must be non-empty")
    amps = _receiver_amplitudes(array, mod, i_sat)
    signs = np.array([r.response_sign for r in array.receivers])
    effs = np.array([r.efficiency for r in array.receivers])
    amp0 = abs(float(np.sum(signs * effs * amps)))
    nse = sc.noise_floor_power(array.total_power, noise, det)
    rows = []
    for f in f_am_values:
        amp = amp0 * sc.dynamic_attenuation(f, dynamics)
        rows.append((f, sc.snr_db(sc.electrical_signal_power(amp, det), nse)))
    return ScanTable(columns=["f_am_hz", "snr_db"], rows=np.array(rows),
                     metadata={"n_receivers": repr(len(array.receivers))})


def capacity_curve(f_am_values, array: ArraySnapshot, mod: ModulationSpec,
                   noise: NoiseModel, det: DetectorModel, dynamics: DynamicResponse,
                   snr_convention: str = "amplitude",
                   i_sat: float = sc.I_SAT) -> ScanTable:
    """(f_am, snr_db, capacity) table; transduction solved once per receiver."""
    table = snr_vs_fam(f_am_values, array, mod, noise, det, dynamics, i_sat)
    f = table.column("f_am_hz")
    s = table.column("snr_db")
    cap = np.array([
        capacity(fi, snr_to_optical_ratio(si, snr_convention)) if np.isfinite(si)
        else 0.0
        for fi, si in zip(f, s)])
    rows = np.column_stack([f, s, cap])
    return ScanTable(columns=["f_am_hz", "snr_db", "capacity_bps"], rows=rows,
                     metadata=dict(table.metadata, snr_convention=snr_convention))
