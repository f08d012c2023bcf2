"""Sweep definitions and deterministic scan execution.

A ScanSpec names one swept variable, its range, and the full parameter set
(a SimulationConfig).  run_scan dispatches to the matching analysis and
returns a ScanTable whose metadata records every configuration key, the
package version, and a timestamp (pinnable for byte-identical output).
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from datetime import datetime, timezone

import numpy as np

from . import __version__, array_model as am, obe, signal_chain as sc
from .config import MHZ, SimulationConfig
from .errors import RydArrayError
from .tables import ScanTable

SWEPT_VARIABLES = ("probe_power", "f_am", "detuning", "n_receivers")


@dataclass(frozen=True)
class ScanSpec:
    swept_variable: str
    start: float
    stop: float
    steps: int
    config: SimulationConfig
    log_spacing: bool = False

    def __post_init__(self):
        if self.swept_variable not in SWEPT_VARIABLES:
            raise ValueError(f"swept_variable must be one of {SWEPT_VARIABLES}")
        if self.steps < 2:
            raise ValueError("steps must be >= 2")
        if not self.start < self.stop:
            raise ValueError("start must be < stop")
        if self.log_spacing and self.start <= 0:
            raise ValueError("log spacing requires start > 0")

    def grid(self) -> np.ndarray:
        if self.log_spacing:
            return np.geomspace(self.start, self.stop, self.steps)
        return np.linspace(self.start, self.stop, self.steps)


def _metadata(spec: ScanSpec, pin_timestamp=None) -> dict:
    md = {"generator": "rydarray", "version": __version__,
          "timestamp": pin_timestamp if pin_timestamp is not None
          else datetime.now(timezone.utc).isoformat(),
          "swept_variable": spec.swept_variable,
          "start": repr(float(spec.start)), "stop": repr(float(spec.stop)),
          "steps": repr(int(spec.steps)), "log_spacing": repr(spec.log_spacing)}
    for f in dataclasses.fields(SimulationConfig):
        md[f.name] = repr(getattr(spec.config, f.name))
    return md


def run_scan(spec: ScanSpec, pin_timestamp=None) -> ScanTable:
    """Execute the sweep; errors are re-raised annotated with the row index."""
    cfg = spec.config
    grid = spec.grid()
    dispatch = {"probe_power": _scan_probe_power, "f_am": _scan_f_am,
                "detuning": _scan_detuning, "n_receivers": _scan_n_receivers}
    columns, rows = dispatch[spec.swept_variable](cfg, grid)
    return ScanTable(columns=columns, rows=np.asarray(rows, dtype=float),
                     metadata=_metadata(spec, pin_timestamp))


def _annotate(exc: RydArrayError, index: int, value: float):
    raise type(exc)(f"row {index} (swept value {value:g}): {exc}") from exc


def _scan_probe_power(cfg: SimulationConfig, grid):
    rows = []
    columns = None
    for i, p in enumerate(grid):
        try:
            tb = sc.snr_vs_probe_power(
                [p], cfg.scheme(), cfg.modulation(), cfg.geometry(), cfg.cell(),
                cfg.quad(), cfg.noise(), cfg.detector(), cfg.dynamics(),
                i_sat=cfg.i_sat_w_m2)
        except RydArrayError as exc:
            _annotate(exc, i, p)
        columns = tb.columns
        rows.append(tb.rows[0])
    return columns, rows


def _scan_f_am(cfg: SimulationConfig, grid):
    array = cfg.array()
    try:
        # one batched call: the transduction is solved once for the whole grid
        tb = am.capacity_curve(grid, array, cfg.modulation(), cfg.noise(),
                               cfg.detector(), cfg.dynamics(),
                               cfg.snr_convention, i_sat=cfg.i_sat_w_m2)
        return ["f_am_hz", "snr_db", "capacity_bps"], list(tb.rows)
    except RydArrayError:
        pass
    # re-run point by point so the failing row is identified
    rows = []
    for i, f in enumerate(grid):
        mod = dataclasses.replace(cfg.modulation(), f_am=f)
        try:
            tb = am.capacity_curve([f], array, mod, cfg.noise(), cfg.detector(),
                                   cfg.dynamics(), cfg.snr_convention,
                                   i_sat=cfg.i_sat_w_m2)
        except RydArrayError as exc:
            _annotate(exc, i, f)
        rows.append(tb.rows[0])
    return ["f_am_hz", "snr_db", "capacity_bps"], rows


def _scan_detuning(cfg: SimulationConfig, grid):
    try:
        points = obe.transmission_spectrum(
            cfg.scheme(), grid, "probe", cfg.geometry(), cfg.cell(), cfg.quad())
    except RydArrayError:
        # re-run point by point so the failing row is identified
        points = []
        for i, d in enumerate(grid):
            try:
                points.extend(obe.transmission_spectrum(
                    cfg.scheme(), [d], "probe", cfg.geometry(), cfg.cell(),
                    cfg.quad()))
            except RydArrayError as exc:
                _annotate(exc, i, d)
    return ["delta_p_rad_s", "transmission"], [list(p) for p in points]


def _scan_n_receivers(cfg: SimulationConfig, grid):
    ns = sorted({int(round(n)) for n in grid})
    mod = cfg.modulation()
    rows = []
    for i, n in enumerate(ns):
        try:
            array = cfg.replace(n_receivers=n).array()
            snr = am.combined_snr_db(array, mod, cfg.noise(), cfg.detector(),
                                     cfg.dynamics(), i_sat=cfg.i_sat_w_m2)
            ratio = am.snr_to_optical_ratio(snr, cfg.snr_convention)
            cap = am.capacity(mod.f_am, ratio)
        except RydArrayError as exc:
            _annotate(exc, i, n)
        rows.append((n, snr, cap))
    return ["n_receivers", "snr_db", "capacity_bps"], rows
