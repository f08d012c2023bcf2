"""Doppler averaging and beam-crossing geometry.

In a warm vapour cell the probe and coupling beams cross at a small angle.
Because the two beams are not perfectly counter-propagating, the residual
two-photon Doppler shift grows with the crossing angle and broadens the EIT
line.  This demo sweeps the probe detuning at several crossing angles and
reports the fitted full width at half maximum of the transparency window.

Writes plot-ready CSVs to demos/out/ and prints a short summary.
"""

import dataclasses
import pathlib

import numpy as np

from rydarray import (
    QuadratureSpec,
    ScanTable,
    SimulationConfig,
    write_table,
)
from rydarray.obe import doppler_absorption_many

TWO_PI = 2.0 * np.pi
OUT = pathlib.Path(__file__).parent / "out"


def fwhm(detunings, absorption):
    """Width of the EIT dip at half depth, by linear interpolation."""
    dip = int(np.argmin(absorption))
    half = 0.5 * (absorption[dip] + max(absorption[0], absorption[-1]))

    def cross(indices):
        for i in indices:
            lo, hi = sorted((i, i + 1))
            if (absorption[lo] - half) * (absorption[hi] - half) < 0:
                frac = (half - absorption[lo]) / (absorption[hi] - absorption[lo])
                return detunings[lo] + frac * (detunings[hi] - detunings[lo])
        return None

    left = cross(range(dip - 1, -1, -1))
    right = cross(range(dip, len(detunings) - 1))
    if left is None or right is None:
        return np.nan
    return right - left


def main():
    OUT.mkdir(exist_ok=True)
    cfg = SimulationConfig()
    # a strong, symmetric drive keeps the transparency window easy to fit
    scheme = cfg.scheme().replace(omega_p=TWO_PI * 8e6, omega_c=TWO_PI * 8e6)
    cell = cfg.cell()
    quad = QuadratureSpec(n_longitudinal=96, n_transverse=16, stretch=4.0)
    sweep = np.linspace(-TWO_PI * 40e6, TWO_PI * 40e6, 121)

    angles = [0.0, 1.0, 2.0, 4.0]
    profiles = {}
    print("EIT linewidth vs beam-crossing angle "
          "(Omega_p = Omega_c = 2pi x 8 MHz):")
    for theta in angles:
        geometry = dataclasses.replace(cfg.geometry(), theta=theta)
        a = doppler_absorption_many(scheme, geometry, cell, quad, delta_p=sweep)
        profiles[theta] = a
        width = fwhm(sweep, a)
        print(f"  theta = {theta:3.1f} deg: FWHM = 2pi x "
              f"{width / TWO_PI / 1e6:6.2f} MHz")

    table = ScanTable(
        columns=["delta_p_rad_s",
                 *[f"absorption_theta_{t:g}deg" for t in angles]],
        rows=np.column_stack([sweep, *profiles.values()]),
        metadata={"description": "Doppler-averaged absorption vs crossing angle"})
    write_table(table, OUT / "linewidth_vs_angle.csv")

    print("\nThe residual two-photon Doppler shift scales with sin(theta),")
    print("so even a few degrees of crossing angle visibly broadens the line.")
    print(f"CSV output in {OUT}/")


if __name__ == "__main__":
    main()
