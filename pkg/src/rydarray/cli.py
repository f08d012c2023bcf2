"""Command-line frontend: one subcommand per analysis, plot-ready CSV out.

Exit codes: 0 success, 2 usage or configuration error, 3 analysis-domain
error (e.g. no bandwidth crossing), 4 internal numerical failure.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import array_model as am, signal_chain as sc
from .calibrate import NoiseAnchors, calibrate_noise
from .config import SimulationConfig, apply_overrides, load_config
from .errors import (BadSlope, CalibrationDiverged, ConfigError,
                     InsufficientPoints, NoCrossing, NonpositiveNoise,
                     ParseError, SingularSystem)
from .harness import ScanSpec, run_scan
from .tables import ScanTable, read_table, write_table

USAGE_ERROR, DOMAIN_ERROR, NUMERICAL_ERROR = 2, 3, 4


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default=argparse.SUPPRESS,
                        help="TOML configuration file")
    common.add_argument("--out", default=argparse.SUPPRESS,
                        help="output CSV path (default: stdout)")
    common.add_argument("--set", action="append", default=argparse.SUPPRESS,
                        metavar="KEY=VALUE",
                        help="override one configuration key (repeatable)")
    common.add_argument("--threads", type=int, default=argparse.SUPPRESS,
                        help="cap the BLAS thread count")
    common.add_argument("--pin-timestamp", default=argparse.SUPPRESS,
                        help="fixed timestamp string for reproducible output")

    parser = argparse.ArgumentParser(
        prog="rydarray",
        description="Rydberg RF receiver-array simulator",
        parents=[common])
    parser.set_defaults(config=None, out=None, set=[], threads=None,
                        pin_timestamp=None)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spectrum", help="probe transmission vs detuning",
                       parents=[common])
    p.add_argument("--axis", choices=["probe", "coupling"], default="probe")
    p.add_argument("--start-mhz", type=float, default=-40.0)
    p.add_argument("--stop-mhz", type=float, default=40.0)
    p.add_argument("--steps", type=int, default=161)

    p = sub.add_parser("snr", help="SNR sweep over probe power or f_AM", parents=[common])
    p.add_argument("--sweep", choices=["probe_power", "f_am"], required=True)
    p.add_argument("--start", type=float, required=True,
                   help="start (W for probe_power, Hz for f_am)")
    p.add_argument("--stop", type=float, required=True)
    p.add_argument("--steps", type=int, default=50)
    p.add_argument("--log", action="store_true", help="logarithmic spacing")

    p = sub.add_parser("bandwidth", help="10-dB bandwidth of the SNR curve", parents=[common])
    p.add_argument("--f-max", type=float, default=3e6)
    p.add_argument("--steps", type=int, default=400)
    p.add_argument("--n-sweep", type=int, default=None, metavar="NMAX",
                   help="also tabulate bandwidth for N = 1..NMAX receivers")

    p = sub.add_parser("capacity", help="Shannon capacity curves", parents=[common])
    p.add_argument("--sweep", choices=["f_am", "n"], default="f_am")
    p.add_argument("--start", type=float, default=5e3)
    p.add_argument("--stop", type=float, default=3e6)
    p.add_argument("--steps", type=int, default=400)

    p = sub.add_parser("noise", help="noise floor vs probe power", parents=[common])
    p.add_argument("--start", type=float, default=1e-6)
    p.add_argument("--stop", type=float, default=1e-3)
    p.add_argument("--steps", type=int, default=60)
    p.add_argument("--calibrate", action="store_true",
                   help="re-fit the noise model from the built-in anchors "
                        "and emit it as a config fragment")

    p = sub.add_parser("scaling", help="SNR scaling with receiver count", parents=[common])
    p.add_argument("--n-max", type=int, default=4)
    p.add_argument("--from-csv", default=None,
                   help="ingest a measured (f_am_hz, snr_db) table instead "
                        "of simulating")
    return parser


def _load(args) -> SimulationConfig:
    cfg = load_config(args.config) if args.config else SimulationConfig()
    overrides = {}
    for item in args.set:
        key, sep, value = item.partition("=")
        if not sep:
            raise ConfigError(f"--set expects KEY=VALUE, got {item!r}", item)
        overrides[key.strip()] = value.strip()
    return apply_overrides(cfg, overrides) if overrides else cfg


def _emit(table: ScanTable, args) -> None:
    if args.out:
        write_table(table, args.out)
    else:
        write_table(table, sys.stdout)


def _run(args) -> int:
    cfg = _load(args)
    if args.threads is not None:
        try:
            from threadpoolctl import threadpool_limits
            threadpool_limits(limits=args.threads)
        except ImportError:
            print("warning: threadpoolctl not installed; --threads ignored",
                  file=sys.stderr)

    if args.command == "spectrum":
        if args.axis == "probe":
            spec = ScanSpec("detuning", args.start_mhz * 2e6 * np.pi,
                            args.stop_mhz * 2e6 * np.pi, args.steps, cfg)
            _emit(run_scan(spec, args.pin_timestamp), args)
            return 0
        from . import __version__, obe
        sweep = np.linspace(args.start_mhz, args.stop_mhz, args.steps) * 2e6 * np.pi
        points = obe.transmission_spectrum(cfg.scheme(), sweep, "coupling",
                                           cfg.geometry(), cfg.cell(), cfg.quad())
        table = ScanTable(["delta_c_rad_s", "transmission"],
                          np.array([list(p) for p in points]),
                          metadata={"generator": "rydarray",
                                    "version": __version__, "axis": "coupling"})
        _emit(table, args)
        return 0

    if args.command == "snr":
        spec = ScanSpec(args.sweep, args.start, args.stop, args.steps, cfg,
                        log_spacing=args.log)
        _emit(run_scan(spec, args.pin_timestamp), args)
        return 0

    if args.command == "bandwidth":
        fgrid = np.geomspace(5e3, args.f_max, args.steps)
        ns = range(1, (args.n_sweep or cfg.n_receivers) + 1) if args.n_sweep \
            else [cfg.n_receivers]
        rows = []
        for n in ns:
            ncfg = cfg.replace(n_receivers=n)
            table = _snr_curve(ncfg, fgrid)
            bw = am.find_bandwidth(table, cfg.bw_threshold_db)
            rows.append((n, bw))
            print(f"n = {n}: bandwidth_hz = {bw!r}")
        if args.out:
            write_table(ScanTable(["n_receivers", "bandwidth_hz"],
                                  np.array(rows, dtype=float)), args.out)
        return 0

    if args.command == "capacity":
        if args.sweep == "f_am":
            spec = ScanSpec("f_am", args.start, args.stop, args.steps, cfg,
                            log_spacing=True)
        else:
            spec = ScanSpec("n_receivers", 1, max(2, int(args.stop)),
                            max(2, int(args.stop)), cfg)
        _emit(run_scan(spec, args.pin_timestamp), args)
        return 0

    if args.command == "noise":
        if args.calibrate:
            powers = np.geomspace(2e-6, 1.2e-3, 20)
            dp1 = _dp1_curve(cfg, powers)
            result = calibrate_noise(NoiseAnchors(), powers, dp1,
                                     rbw=cfg.rbw_khz * 1e3)
            out = sys.stdout if not args.out else open(args.out, "w")
            try:
                for key, value in (("sa_floor", result.noise.sa_floor),
                                   ("det_floor", result.noise.det_floor),
                                   ("shot_coeff", result.noise.shot_coeff),
                                   ("aom_coeff", result.noise.aom_coeff),
                                   ("load_conversion", result.signal_scale)):
                    out.write(f"{key} = {value!r}\n")
            finally:
                if args.out:
                    out.close()
            for key, value in result.residuals.items():
                print(f"# residual {key}: {value * 100:+.2f}%", file=sys.stderr)
            return 0
        powers = np.geomspace(args.start, args.stop, args.steps)
        det = cfg.detector()
        noise = cfg.noise()
        no_aom = noise.replace(aom_coeff=0.0)
        rows = [(p, sc.noise_floor_power(p, noise, det),
                 sc.noise_floor_power(p, no_aom, det)) for p in powers]
        _emit(ScanTable(["probe_power_w", "noise_el_w", "noise_el_w_no_aom"],
                        np.array(rows)), args)
        return 0

    if args.command == "scaling":
        if args.from_csv:
            table = read_table(args.from_csv)
            fit = am.fit_slope(table)
            print(f"m_db_per_hz = {fit.m!r}")
            print(f"bw1_hz = {fit.bw1!r}")
            print(f"snr_db_1 = {fit.snr_db_1!r}")
            return 0
        mod = cfg.modulation()
        snrs = []
        for n in range(1, args.n_max + 1):
            ncfg = cfg.replace(n_receivers=n)
            snrs.append(am.combined_snr_db(
                ncfg.array(), mod, cfg.noise(), cfg.detector(), cfg.dynamics(),
                i_sat=cfg.i_sat_w_m2))
        for n, s in enumerate(snrs, start=1):
            ratio = 10.0 ** ((s - snrs[0]) / 20.0)
            print(f"n = {n}: snr_db = {s:.4f}  optical_ratio = {ratio:.4f} "
                  f"(ideal {n})")
        return 0

    raise AssertionError(f"unhandled command {args.command!r}")


def _snr_curve(cfg: SimulationConfig, fgrid) -> ScanTable:
    return am.snr_vs_fam(fgrid, cfg.array(), cfg.modulation(), cfg.noise(),
                         cfg.detector(), cfg.dynamics(), i_sat=cfg.i_sat_w_m2)


def _dp1_curve(cfg: SimulationConfig, powers) -> np.ndarray:
    mod = cfg.modulation()
    out = []
    for p in powers:
        scheme = sc.scheme_at_power(cfg.scheme(), cfg.geometry(), p,
                                    cfg.i_sat_w_m2)
        out.append(sc.transduce_fundamental(
            scheme, mod, cfg.geometry(), cfg.cell(), cfg.quad(), p,
            n_samples=cfg.samples_per_period).delta_p1)
    return np.array(out)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if exc.code is not None else 0
    try:
        return _run(args)
    except (ConfigError, ParseError, ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except (NoCrossing, BadSlope, InsufficientPoints,
            CalibrationDiverged) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return DOMAIN_ERROR
    except (SingularSystem, NonpositiveNoise, FloatingPointError,
            np.linalg.LinAlgError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return NUMERICAL_ERROR


if __name__ == "__main__":
    sys.exit(main())
