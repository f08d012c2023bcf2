"""Steady-state optical Bloch equations for the four-level Rydberg EIT ladder.

The ladder is |1> (5S1/2) --probe--> |2> (5P3/2) --coupling--> |3> (Rydberg D)
--RF--> |4> (Rydberg F).  All rates and detunings are angular frequencies in
rad/s.  The rotating-frame Hamiltonian is

    H = [[0,     Wp/2,  0,     0   ],
         [Wp/2, -Dp,    Wc/2,  0   ],
         [0,     Wc/2, -(Dp+Dc),        Wrf/2],
         [0,     0,     Wrf/2, -(Dp+Dc+Drf)]]

with decay channels |2>->|1> (gamma2), |3>->|2> (gamma3), |4>->|3> (gamma4)
and a transit-time pure dephasing acting on every coherence.  The rotating
frame is chosen such that Im(rho_21) > 0 is the absorptive quadrature of the
probe coherence, i.e. the equation of motion reads drho/dt = +i[H, rho] + D(rho).
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np
import scipy.constants as const

from .errors import SingularSystem

TWO_PI = 2.0 * np.pi

#: Natural decay rate of Rb87 5P3/2, rad/s.
GAMMA_5P = TWO_PI * 6.07e6

#: Rb87 atomic mass, kg.
RB87_MASS = 86.909180531 * const.atomic_mass

# (destination, source) index pairs for the three population decay channels.
_DECAY_CHANNELS = ((0, 1), (1, 2), (2, 3))

# vec(rho) uses row-major ordering: element (i, j) sits at index 4*i + j.
_DIAG_IDX = np.array([0, 5, 10, 15])
_OFFDIAG_IDX = np.array([n for n in range(16) if n not in (0, 5, 10, 15)])


@dataclass(frozen=True)
class LevelScheme:
    """Rabi frequencies, detunings and decoherence rates of the ladder.

    Decay defaults for the Rydberg states (gamma3, gamma4) and the transit
    dephasing are order-of-magnitude values for a warm cell with ~70 um beam
    waists; they are meant to be overridden when better numbers are known.
    """

    omega_p: float
    omega_c: float = 0.0
    omega_rf: float = 0.0
    delta_p: float = 0.0
    delta_c: float = 0.0
    delta_rf: float = 0.0
    gamma2: float = GAMMA_5P
    gamma3: float = TWO_PI * 10e3
    gamma4: float = TWO_PI * 10e3
    gamma_transit: float = TWO_PI * 100e3

    def __post_init__(self):
        for name in ("gamma2", "gamma3", "gamma4", "gamma_transit"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")

    def replace(self, **changes) -> "LevelScheme":
        return dataclasses.replace(self, **changes)

    @property
    def gamma21(self) -> float:
        """Decay rate of the probe coherence rho_21."""
        return 0.5 * self.gamma2 + self.gamma_transit


@dataclass(frozen=True)
class DensityMatrix:
    """A 4x4 steady-state density matrix with physicality checks."""

    rho: np.ndarray

    HERMITICITY_TOL = 1e-10
    TRACE_TOL = 1e-10
    POSITIVITY_TOL = -1e-8

    def validate(self) -> None:
        r = self.rho
        if np.abs(r - r.conj().T).max() > self.HERMITICITY_TOL:
            raise ValueError("density matrix is not Hermitian")
        if abs(np.trace(r).real - 1.0) > self.TRACE_TOL or abs(np.trace(r).imag) > self.TRACE_TOL:
            raise ValueError("density matrix trace differs from 1")
        if np.linalg.eigvalsh(0.5 * (r + r.conj().T)).min() < self.POSITIVITY_TOL:
            raise ValueError("density matrix has a significantly negative eigenvalue")

    def population(self, level: int) -> float:
        """Population of level 1..4."""
        return self.rho[level - 1, level - 1].real

    def coherence(self, upper: int, lower: int) -> complex:
        """Coherence <upper|rho|lower> with 1-based level labels."""
        return self.rho[upper - 1, lower - 1]


@dataclass(frozen=True)
class BeamGeometry:
    """Wavelengths, waists and the probe/coupling crossing angle."""

    lambda_p: float = 780e-9
    lambda_c: float = 480e-9
    theta: float = 2.0  # degrees between the counter-propagating beams
    waist_p: float = 70e-6
    waist_c: float = 60e-6

    def __post_init__(self):
        if self.lambda_p <= 0 or self.lambda_c <= 0:
            raise ValueError("wavelengths must be positive")
        if not 0.0 <= self.theta < 90.0:
            raise ValueError("theta must be in [0, 90) degrees")

    @property
    def k_p(self) -> float:
        return TWO_PI / self.lambda_p

    @property
    def k_c(self) -> float:
        return TWO_PI / self.lambda_c

    @property
    def theta_rad(self) -> float:
        return np.deg2rad(self.theta)


@dataclass(frozen=True)
class CellSpec:
    """Vapour cell length, temperature, density and resonant optical depth.

    od_resonant is the measured weak-probe two-level optical depth at line
    centre (Doppler included); transmission spectra use T = exp(-OD * A) with
    the Doppler-averaged absorption A normalised to 1 on two-level resonance.
    """

    length: float = 0.075
    temperature: float = 358.15
    density: float = 1e18
    od_resonant: float = 5.0
    mass: float = RB87_MASS

    def __post_init__(self):
        for name in ("length", "temperature", "density", "od_resonant", "mass"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")

    @property
    def sigma_v(self) -> float:
        """1-D Maxwell-Boltzmann velocity standard deviation, m/s."""
        return float(np.sqrt(const.k * self.temperature / self.mass))


@dataclass(frozen=True)
class QuadratureSpec:
    """Velocity-grid sizes for the Doppler average.

    stretch > 0 applies a sinh node concentration towards v = 0, where the
    velocity-selective single-photon resonance is only a few m/s wide;
    stretch = 0 gives a plain uniform grid.
    """

    n_longitudinal: int = 64
    n_transverse: int = 16
    sigma_cut: float = 4.0
    stretch: float = 4.0

    def __post_init__(self):
        if self.n_longitudinal < 1 or self.n_transverse < 1:
            raise ValueError("node counts must be >= 1")
        if self.sigma_cut <= 0:
            raise ValueError("sigma_cut must be positive")
        if self.stretch < 0:
            raise ValueError("stretch must be >= 0")


# ---------------------------------------------------------------------------
# Batched steady-state solver
# ---------------------------------------------------------------------------

def hamiltonian(omega_p, omega_c, omega_rf, delta_p, delta_c, delta_rf) -> np.ndarray:
    """RWA ladder Hamiltonian (units of rad/s).  Arguments broadcast."""
    shape = np.broadcast(
        np.asarray(omega_p), np.asarray(omega_c), np.asarray(omega_rf),
        np.asarray(delta_p), np.asarray(delta_c), np.asarray(delta_rf),
    ).shape
    H = np.zeros(shape + (4, 4), dtype=complex)
    # Complex Rabi frequencies carry an optical phase; H stays Hermitian.
    H[..., 0, 1] = 0.5 * np.asarray(omega_p)
    H[..., 1, 0] = 0.5 * np.conj(omega_p)
    H[..., 1, 2] = 0.5 * np.asarray(omega_c)
    H[..., 2, 1] = 0.5 * np.conj(omega_c)
    H[..., 2, 3] = 0.5 * np.asarray(omega_rf)
    H[..., 3, 2] = 0.5 * np.conj(omega_rf)
    H[..., 1, 1] = -np.asarray(delta_p) + 0j
    H[..., 2, 2] = -(np.asarray(delta_p) + np.asarray(delta_c)) + 0j
    H[..., 3, 3] = -(np.asarray(delta_p) + np.asarray(delta_c) + np.asarray(delta_rf)) + 0j
    return H


def _dissipator(gamma2, gamma3, gamma4, gamma_transit, shape) -> np.ndarray:
    """Superoperator for the cascade decay plus transit dephasing."""
    D = np.zeros(shape + (16, 16), dtype=complex)
    for g, (to, frm) in zip((gamma2, gamma3, gamma4), _DECAY_CHANNELS):
        D[..., 4 * to + to, 4 * frm + frm] += g
        for k in range(4):
            D[..., 4 * frm + k, 4 * frm + k] -= 0.5 * np.asarray(g)
            D[..., 4 * k + frm, 4 * k + frm] -= 0.5 * np.asarray(g)
    for n in _OFFDIAG_IDX:
        D[..., n, n] -= gamma_transit
    return D


def _liouvillian(H, gamma2, gamma3, gamma4, gamma_transit) -> np.ndarray:
    """Matrix L with d vec(rho)/dt = L vec(rho), row-major vec ordering."""
    eye = np.eye(4)
    # vec(A rho B) = (A kron B^T) vec(rho)
    comm = (np.einsum("...ab,cd->...acbd", H, eye)
            - np.einsum("ab,...dc->...acbd", eye, H))
    shape = H.shape[:-2]
    L = 1j * comm.reshape(shape + (16, 16))
    L += _dissipator(gamma2, gamma3, gamma4, gamma_transit, shape)
    return L


# Cap on simultaneous 16x16 systems; keeps peak memory around a few hundred MB.
_CHUNK = 32768


def steady_state_grid(omega_p, omega_c, omega_rf, delta_p, delta_c, delta_rf,
                      gamma2, gamma3, gamma4, gamma_transit) -> np.ndarray:
    """Steady-state density matrices for broadcast parameter arrays.

    Returns an array of shape broadcast(...) + (4, 4).  Raises SingularSystem
    if any parameter set fails to produce a unique steady state.  Large
    batches are solved in fixed-size chunks, reduced in index order, so the
    result is bit-stable regardless of chunking.
    """
    args = np.broadcast_arrays(
        *(np.asarray(a, dtype=complex) for a in (
            omega_p, omega_c, omega_rf, delta_p, delta_c, delta_rf,
            gamma2, gamma3, gamma4, gamma_transit)))
    shape = args[0].shape
    flat = [a.reshape(-1) for a in args]
    n = flat[0].size
    if n > _CHUNK:
        out = np.empty((n, 4, 4), dtype=complex)
        for start in range(0, n, _CHUNK):
            sl = slice(start, min(start + _CHUNK, n))
            out[sl] = _steady_state_chunk(*(a[sl] for a in flat))
        return out.reshape(shape + (4, 4))
    return _steady_state_chunk(*flat).reshape(shape + (4, 4))


def _steady_state_chunk(omega_p, omega_c, omega_rf, delta_p, delta_c, delta_rf,
                        gamma2, gamma3, gamma4, gamma_transit) -> np.ndarray:
    H = hamiltonian(omega_p, omega_c, omega_rf, delta_p, delta_c, delta_rf)
    L = _liouvillian(H, gamma2, gamma3, gamma4, gamma_transit)
    shape = L.shape[:-2]

    # Replace the drho11/dt row by the trace constraint; keep the original
    # row to verify afterwards that the solution is a genuine null vector.
    row0 = L[..., 0, :].copy()
    L[..., 0, :] = 0.0
    L[..., 0, _DIAG_IDX] = 1.0
    b = np.zeros(shape + (16, 1), dtype=complex)
    b[..., 0, 0] = 1.0
    try:
        v = np.linalg.solve(L, b)[..., 0]
    except np.linalg.LinAlgError as exc:
        raise SingularSystem(f"steady-state system is singular: {exc}") from exc
    if not np.all(np.isfinite(v)):
        raise SingularSystem("steady-state solve produced non-finite entries")

    # The replaced equation must also be satisfied (scaled by the row norm).
    resid = np.abs(np.einsum("...k,...k->...", row0, v))
    scale = np.linalg.norm(row0, axis=-1) * np.linalg.norm(v, axis=-1) + 1e-300
    if np.any(resid / scale > 1e-8):
        raise SingularSystem("steady state is not unique (replaced row residual too large)")

    return v.reshape(shape + (4, 4))


def steady_state(scheme: LevelScheme) -> DensityMatrix:
    """Steady state of the Lindblad master equation for one parameter set."""
    if scheme.gamma2 == 0 and scheme.gamma_transit == 0:
        raise SingularSystem("need gamma2 > 0 or gamma_transit > 0 for a unique steady state")
    rho = steady_state_grid(
        scheme.omega_p, scheme.omega_c, scheme.omega_rf,
        scheme.delta_p, scheme.delta_c, scheme.delta_rf,
        scheme.gamma2, scheme.gamma3, scheme.gamma4, scheme.gamma_transit,
    )
    # Symmetrise away the ~1e-15 Hermiticity residue of the linear solve.
    rho = 0.5 * (rho + rho.conj().T)
    return DensityMatrix(rho)


# ---------------------------------------------------------------------------
# Absorption and Doppler averaging
# ---------------------------------------------------------------------------

def absorption_coefficient(scheme: LevelScheme) -> float:
    """Normalised probe absorption A = c_norm * Im(rho_21) / omega_p.

    c_norm = gamma2 + 2*gamma_transit makes a weak resonant probe with no
    coupling and no RF give A = 1, so T = exp(-OD * A) reproduces the
    two-level Beer-Lambert law.
    """
    if scheme.omega_p <= 0:
        raise ValueError("omega_p must be positive to normalise the absorption")
    rho = steady_state(scheme).rho
    return 2.0 * scheme.gamma21 * rho[1, 0].imag / scheme.omega_p


def velocity_grid(geometry: BeamGeometry, cell: CellSpec, quad: QuadratureSpec):
    """Maxwell-Boltzmann weighted velocity nodes (v_z, v_t, weight).

    Uniform grids over +-sigma_cut standard deviations with Gaussian
    (trapezoid-corrected) weights; deterministic and convergent for smooth
    integrands.  The transverse axis collapses to a single node at theta = 0.
    """
    sigma = cell.sigma_v

    def axis(n):
        if n == 1 or sigma == 0.0:
            return np.zeros(1), np.ones(1)
        if quad.stretch > 0:
            u = np.linspace(-1.0, 1.0, n)
            a = quad.stretch
            x = quad.sigma_cut * np.sinh(a * u) / np.sinh(a)
            jac = quad.sigma_cut * a * np.cosh(a * u) / np.sinh(a)
        else:
            x = np.linspace(-quad.sigma_cut, quad.sigma_cut, n)
            jac = np.ones(n)
        w = np.exp(-0.5 * x * x) * jac
        w[0] *= 0.5
        w[-1] *= 0.5
        return x * sigma, w / w.sum()

    vz, wz = axis(quad.n_longitudinal)
    if geometry.theta == 0.0:
        vt, wt = np.zeros(1), np.ones(1)
    else:
        vt, wt = axis(quad.n_transverse)

    VZ, VT = np.meshgrid(vz, vt, indexing="ij")
    W = np.outer(wz, wt)
    return VZ.ravel(), VT.ravel(), W.ravel()


def _doppler_shifts(geometry: BeamGeometry, vz, vt):
    """Per-velocity detuning shifts (d_delta_p, d_delta_c)."""
    th = geometry.theta_rad
    d_p = -geometry.k_p * vz
    d_c = geometry.k_c * (vz * np.cos(th) - vt * np.sin(th))
    return d_p, d_c


def _two_level_reference(scheme: LevelScheme, geometry: BeamGeometry, vz, weights):
    """Doppler-averaged weak-probe two-level absorption at resonance.

    Analytic per velocity class: a Lorentzian of HWHM gamma21 in k_p*v,
    normalised to 1 at v = 0.  Serves as the normalisation of the Doppler
    average so that od_resonant keeps its two-level Beer-Lambert meaning.
    """
    g = scheme.gamma21
    return float(np.sum(weights * g * g / (g * g + (geometry.k_p * vz) ** 2)))


def doppler_averaged_absorption(scheme: LevelScheme, geometry: BeamGeometry,
                                cell: CellSpec, quad: QuadratureSpec) -> float:
    """Velocity-averaged probe absorption, normalised to 1 on two-level resonance."""
    return float(doppler_absorption_many(
        scheme, geometry, cell, quad,
        delta_p=np.atleast_1d(scheme.delta_p),
        delta_c=np.atleast_1d(scheme.delta_c),
        omega_rf=np.atleast_1d(scheme.omega_rf),
    )[0])


def doppler_absorption_many(scheme: LevelScheme, geometry: BeamGeometry,
                            cell: CellSpec, quad: QuadratureSpec,
                            delta_p=None, delta_c=None, omega_rf=None) -> np.ndarray:
    """Doppler-averaged absorption for 1-D arrays of scan parameters.

    Any of delta_p / delta_c / omega_rf may be an array (they broadcast
    against each other); unspecified parameters are taken from `scheme`.
    All scan points and velocity nodes are solved in a single batched call.
    """
    if scheme.omega_p <= 0:
        raise ValueError("omega_p must be positive to normalise the absorption")
    delta_p = np.atleast_1d(scheme.delta_p if delta_p is None else delta_p)
    delta_c = np.atleast_1d(scheme.delta_c if delta_c is None else delta_c)
    omega_rf = np.atleast_1d(scheme.omega_rf if omega_rf is None else omega_rf)
    npts = np.broadcast(delta_p, delta_c, omega_rf).shape[0]

    vz, vt, w = velocity_grid(geometry, cell, quad)
    sh_p, sh_c = _doppler_shifts(geometry, vz, vt)

    # shape (npts, nvel)
    dp = np.broadcast_to(delta_p.reshape(-1, 1), (npts, vz.size)) + sh_p
    dc = np.broadcast_to(delta_c.reshape(-1, 1), (npts, vz.size)) + sh_c
    wrf = np.broadcast_to(omega_rf.reshape(-1, 1), (npts, vz.size))

    rho = steady_state_grid(
        scheme.omega_p, scheme.omega_c, wrf, dp, dc, scheme.delta_rf,
        scheme.gamma2, scheme.gamma3, scheme.gamma4, scheme.gamma_transit,
    )
    absorption = 2.0 * scheme.gamma21 * rho[..., 1, 0].imag / scheme.omega_p
    averaged = absorption @ w
    return averaged / _two_level_reference(scheme, geometry, vz, w)


def transmission_spectrum(base_scheme: LevelScheme, sweep, axis: str,
                          geometry: BeamGeometry, cell: CellSpec,
                          quad: QuadratureSpec) -> list:
    """Probe transmission T = exp(-OD * A) along a detuning sweep.

    `axis` selects which detuning is swept ("probe" or "coupling"); input
    ordering is preserved.  Solver failures are re-raised with the offending
    detuning attached.
    """
    sweep = np.asarray(sweep, dtype=float)
    if sweep.size == 0:
        raise ValueError("sweep must be non-empty")
    if axis not in ("probe", "coupling"):
        raise ValueError("axis must be 'probe' or 'coupling'")
    kwargs = {"delta_p": sweep} if axis == "probe" else {"delta_c": sweep}
    try:
        a = doppler_absorption_many(base_scheme, geometry, cell, quad, **kwargs)
    except SingularSystem:
        # Localise the failure for the error message.
        for d in sweep:
            try:
                s = base_scheme.replace(**({"delta_p": d} if axis == "probe" else {"delta_c": d}))
                doppler_averaged_absorption(s, geometry, cell, quad)
            except SingularSystem as exc:
                raise SingularSystem(f"at {axis} detuning {d:g} rad/s: {exc}") from exc
        raise
    transmission = np.exp(-cell.od_resonant * a)
    return list(zip(sweep.tolist(), transmission.tolist()))
