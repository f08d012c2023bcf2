"""Single-receiver signal chain: AM transduction, noise budget, SNR peak.

An amplitude-modulated RF carrier rides on the EIT resonance; the receiver
reads it out as a modulation of the transmitted probe power.  This demo

1. sweeps probe power and records the demodulated signal, the electrical
   noise floor, and the resulting SNR,
2. decomposes the noise floor into its power-law contributions (analyser
   floor, detector floor, shot noise, AOM/intensity noise),
3. locates the probe power that maximises SNR.

Writes plot-ready CSVs to demos/out/ and prints a short summary.
"""

import pathlib

import numpy as np
from scipy.interpolate import CubicSpline

from rydarray import (
    ScanTable,
    SimulationConfig,
    noise_floor_power,
    snr_vs_probe_power,
    write_table,
)

OUT = pathlib.Path(__file__).parent / "out"


def main():
    OUT.mkdir(exist_ok=True)
    cfg = SimulationConfig()
    powers = np.geomspace(2e-6, 1.2e-3, 40)

    table = snr_vs_probe_power(
        powers, cfg.scheme(), cfg.modulation(), cfg.geometry(), cfg.cell(),
        cfg.quad(), cfg.noise(), cfg.detector(), cfg.dynamics(),
        i_sat=cfg.i_sat_w_m2)
    write_table(table, OUT / "snr_vs_probe_power.csv")

    # noise decomposition: zero out all but one coefficient at a time
    noise = cfg.noise()
    det = cfg.detector()
    parts = {
        "sa_floor": noise.replace(det_floor=0, shot_coeff=0, aom_coeff=0),
        "det_floor": noise.replace(sa_floor=0, shot_coeff=0, aom_coeff=0),
        "shot": noise.replace(sa_floor=0, det_floor=0, aom_coeff=0),
        "aom": noise.replace(sa_floor=0, det_floor=0, shot_coeff=0),
    }
    rows = np.column_stack(
        [powers, [noise_floor_power(p, noise, det) for p in powers]]
        + [[noise_floor_power(p, m, det) for p in powers]
           for m in parts.values()])
    write_table(ScanTable(columns=["probe_power_w", "total", *parts], rows=rows),
                OUT / "noise_budget.csv")

    print("noise floor regimes (slope of log-noise vs log-power):")
    for p_mark, label in [(1e-8, "floor-dominated"), (20e-6, "shot-dominated"),
                          (800e-6, "AOM-dominated")]:
        n = np.array([noise_floor_power(p, noise, det)
                      for p in (p_mark * 0.9, p_mark * 1.1)])
        slope = np.diff(10 * np.log10(n))[0] / np.diff(
            np.log10([p_mark * 0.9, p_mark * 1.1]))[0]
        print(f"  P = {p_mark * 1e6:6g} uW: d(noise dB)/d(log10 P) "
              f"= {slope:4.1f}  ({label})")

    snr = table.column("snr_db")
    spline = CubicSpline(np.log10(powers), snr)
    dense = np.linspace(np.log10(powers[0]), np.log10(powers[-1]), 500)
    best = dense[np.argmax(spline(dense))]
    print(f"\nSNR peaks at P = {10 ** best * 1e6:.0f} uW "
          f"({spline(best):.1f} dB in a {det.rbw / 1e3:.0f} kHz RBW):")
    print("below the peak the signal grows faster than the shot noise;")
    print("above it, intensity (AOM) noise grows as P^2 and wins.")
    print(f"CSV output in {OUT}/")


if __name__ == "__main__":
    main()
