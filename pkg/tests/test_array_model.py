"""Array combining and scaling-law tests: closed forms to machine precision,
sign algebra of shared-detector combining, and curve-analysis utilities on
synthetic lines with known answers."""

import numpy as np
import pytest

from rydarray import (
    ArraySnapshot,
    BadSlope,
    NoCrossing,
    InsufficientPoints,
    ReceiverVolume,
    ScalingFit,
    ScanTable,
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
from rydarray import signal_chain as _sc_names  # noqa: F401  (import check)
from rydarray.signal_chain import (
    dynamic_attenuation,
    electrical_signal_power,
    noise_floor_power,
    snr_db,
    scheme_at_power,
    transduce_fundamental,
)

TWO_PI = 2.0 * np.pi


def _array(config, n, signs=None, efficiencies=None, power=110e-6):
    signs = signs or [1] * n
    efficiencies = efficiencies or [1.0] * n
    recs = [ReceiverVolume(probe_power=power, detuning_offset=i * TWO_PI * 4e6,
                           efficiency=efficiencies[i], response_sign=signs[i])
            for i in range(n)]
    return ArraySnapshot(receivers=recs, scheme=config.scheme(),
                         geometry=config.geometry(), cell=config.cell(),
                         quad=config.quad())


class TestClosedFormLaws:
    def test_snr_scaling_exact(self):
        rng = np.random.default_rng(3)
        for _ in range(50):
            snr1 = rng.uniform(-30.0, 60.0)
            n = int(rng.integers(1, 50))
            assert abs(snr_scaling_law(n, snr1)
                       - (snr1 + 20.0 * np.log10(n))) < 1e-12

    def test_bw_scaling_exact(self):
        rng = np.random.default_rng(4)
        for _ in range(50):
            fit = ScalingFit(m=-rng.uniform(1e-6, 1e-3), bw1=rng.uniform(1e4, 1e6),
                             snr_db_1=rng.uniform(0, 40))
            n = int(rng.integers(1, 20))
            assert abs(bw_scaling_law(n, fit)
                       - (fit.bw1 + 20.0 / abs(fit.m) * np.log10(n))) < 1e-9

    def test_bw_scaling_rejects_nonnegative_slope(self):
        with pytest.raises(BadSlope):
            bw_scaling_law(2, ScalingFit(m=0.0, bw1=1e5, snr_db_1=20.0))

    def test_capacity_closed_form(self):
        rng = np.random.default_rng(5)
        for _ in range(50):
            f = rng.uniform(1e3, 1e6)
            s = rng.uniform(0.0, 1e4)
            assert abs(capacity(f, s) - f * np.log2(1.0 + s)) < 1e-9
        assert capacity(1e5, 0.0) == 0.0

    def test_capacity_of_n(self):
        assert capacity_of_n(4, 3.0, 1e5) == pytest.approx(1e5 * np.log2(13.0))
        with pytest.raises(ValueError):
            capacity_of_n(0, 1.0, 1e5)

    def test_snr_to_optical_ratio_conventions(self):
        assert snr_to_optical_ratio(20.0, "amplitude") == pytest.approx(10.0)
        assert snr_to_optical_ratio(20.0, "power") == pytest.approx(100.0)
        with pytest.raises(ValueError):
            snr_to_optical_ratio(20.0, "voltage")


class TestCombining:
    def test_two_identical_receivers_double_the_amplitude(self, config):
        mod = config.modulation()
        a1 = combined_signal_amplitude(_array(config, 1), mod,
                                       i_sat=config.i_sat_w_m2)
        a2 = combined_signal_amplitude(_array(config, 2), mod,
                                       i_sat=config.i_sat_w_m2)
        assert a2 == pytest.approx(2.0 * a1, rel=1e-12)

    def test_opposite_signs_cancel_to_zero(self, config):
        mod = config.modulation()
        a = combined_signal_amplitude(_array(config, 2, signs=[1, -1]), mod,
                                      i_sat=config.i_sat_w_m2)
        assert a == 0.0

    def test_majority_sign_dominates(self, config):
        mod = config.modulation()
        a1 = combined_signal_amplitude(_array(config, 1), mod,
                                       i_sat=config.i_sat_w_m2)
        a31 = combined_signal_amplitude(_array(config, 4, signs=[1, 1, 1, -1]),
                                        mod, i_sat=config.i_sat_w_m2)
        assert abs(a31) == pytest.approx(2.0 * a1, rel=1e-12)

    def test_efficiency_weights_amplitudes(self, config):
        mod = config.modulation()
        a1 = combined_signal_amplitude(_array(config, 1), mod,
                                       i_sat=config.i_sat_w_m2)
        a = combined_signal_amplitude(
            _array(config, 2, efficiencies=[1.0, 0.25]), mod,
            i_sat=config.i_sat_w_m2)
        assert a == pytest.approx(1.25 * a1, rel=1e-12)

    def test_single_receiver_matches_signal_chain(self, config):
        mod = config.modulation()
        array = _array(config, 1, power=150e-6)
        snr = combined_snr_db(array, mod, config.noise(), config.detector(),
                              config.dynamics(), i_sat=config.i_sat_w_m2)
        scheme = scheme_at_power(config.scheme(), config.geometry(), 150e-6,
                                 config.i_sat_w_m2)
        dp1 = transduce_fundamental(scheme, mod, config.geometry(),
                                    config.cell(), config.quad(), 150e-6).delta_p1
        dp1 *= dynamic_attenuation(mod.f_am, config.dynamics())
        expected = snr_db(electrical_signal_power(dp1, config.detector()),
                          noise_floor_power(150e-6, config.noise(),
                                            config.detector()))
        assert snr == pytest.approx(expected, rel=1e-12)

    def test_floor_dominated_follows_20log10n(self, config):
        mod = config.modulation()
        floor_noise = config.noise().replace(shot_coeff=0.0, aom_coeff=0.0)
        snr1 = combined_snr_db(_array(config, 1), mod, floor_noise,
                               config.detector(), config.dynamics(),
                               i_sat=config.i_sat_w_m2)
        for n in (2, 3, 4):
            snr_n = combined_snr_db(_array(config, n), mod, floor_noise,
                                    config.detector(), config.dynamics(),
                                    i_sat=config.i_sat_w_m2)
            assert abs(snr_n - snr_scaling_law(n, snr1)) < 0.5

    def test_cancelled_array_reports_minus_inf(self, config):
        mod = config.modulation()
        snr = combined_snr_db(_array(config, 2, signs=[1, -1]), mod,
                              config.noise(), config.detector(),
                              config.dynamics(), i_sat=config.i_sat_w_m2)
        assert snr == float("-inf")

    def test_independent_detectors_ignore_signs(self, config):
        mod = config.modulation()
        same = combined_snr_db(_array(config, 2), mod, config.noise(),
                               config.detector(), config.dynamics(),
                               i_sat=config.i_sat_w_m2)
        flipped = combined_snr_db(_array(config, 2, signs=[1, -1]), mod,
                                  config.noise(), config.detector(),
                                  config.dynamics(), independent_detectors=True,
                                  i_sat=config.i_sat_w_m2)
        assert flipped == pytest.approx(same, rel=1e-12)

    def test_minimum_separation_enforced(self, config):
        recs = [ReceiverVolume(probe_power=1e-4, detuning_offset=0.0),
                ReceiverVolume(probe_power=1e-4, detuning_offset=TWO_PI * 1e6)]
        with pytest.raises(ValueError):
            ArraySnapshot(receivers=recs, scheme=config.scheme(),
                          min_separation=TWO_PI * 3e6)


def _line_table(f, snr):
    return ScanTable(columns=["f_am_hz", "snr_db"],
                     rows=np.column_stack([f, snr]))


class TestCurveAnalysis:
    def test_find_bandwidth_on_synthetic_line(self):
        f = np.linspace(1e4, 3e5, 59)
        snr = 40.0 - 30.0 * (f / 1e5)  # crosses 10 dB at exactly 100 kHz
        assert find_bandwidth(_line_table(f, snr)) == pytest.approx(1e5, rel=1e-12)

    def test_find_bandwidth_threshold_argument(self):
        f = np.linspace(1e4, 3e5, 59)
        snr = 40.0 - 30.0 * (f / 1e5)
        assert find_bandwidth(_line_table(f, snr), threshold_db=25.0) == \
            pytest.approx(5e4, rel=1e-12)

    def test_find_bandwidth_no_crossing(self):
        f = np.linspace(1e4, 3e5, 10)
        with pytest.raises(NoCrossing):
            find_bandwidth(_line_table(f, np.full_like(f, 30.0)))

    def test_find_bandwidth_requires_sorted_curve(self):
        with pytest.raises(ValueError):
            find_bandwidth(_line_table(np.array([2e5, 1e5]),
                                       np.array([20.0, 5.0])))

    def test_fit_slope_recovers_exact_line(self):
        f = np.linspace(1e4, 3e5, 59)
        m_true = -30.0 / 1e5
        snr = 40.0 + m_true * f
        fit = fit_slope(_line_table(f, snr), window=(2e4, 2.5e5))
        assert fit.m == pytest.approx(m_true, abs=1e-9 * abs(m_true))

    def test_fit_slope_offset_invariance(self):
        f = np.linspace(1e4, 3e5, 59)
        snr = 40.0 - 30.0 * (f / 1e5)
        m1 = fit_slope(_line_table(f, snr), window=(2e4, 2.5e5)).m
        m2 = fit_slope(_line_table(f, snr + 7.0), window=(2e4, 2.5e5)).m
        assert m1 == pytest.approx(m2, rel=1e-12)

    def test_fit_slope_insufficient_points(self):
        f = np.linspace(1e4, 3e5, 59)
        snr = 40.0 - 30.0 * (f / 1e5)
        with pytest.raises(InsufficientPoints):
            fit_slope(_line_table(f, snr), window=(1.0, 2.0))

    def test_bw_law_consistent_with_shifted_lines(self):
        # raising a straight 10-dB-crossing line by 20 log10(n) moves the
        # crossing exactly as the closed-form law predicts
        f = np.linspace(1e4, 2e6, 4001)
        m = -30.0 / 1e5
        snr1 = 40.0 + m * f
        fit = fit_slope(_line_table(f, snr1), window=(2e4, 9e4))
        for n in (2, 3, 4):
            bw_n = find_bandwidth(_line_table(f, snr1 + 20.0 * np.log10(n)))
            assert bw_n == pytest.approx(bw_scaling_law(n, fit), rel=1e-3)


class TestSweeps:
    def test_snr_vs_fam_matches_pointwise(self, config):
        mod = config.modulation()
        array = _array(config, 2)
        fgrid = np.array([1e4, 1e5, 5e5])
        table = snr_vs_fam(fgrid, array, mod, config.noise(), config.detector(),
                           config.dynamics(), i_sat=config.i_sat_w_m2)
        assert table.columns == ["f_am_hz", "snr_db"]
        # pointwise: same combining evaluated at one frequency
        import dataclasses
        for f, s in zip(table.column("f_am_hz"), table.column("snr_db")):
            mod_f = dataclasses.replace(mod, f_am=f)
            direct = combined_snr_db(array, mod_f, config.noise(),
                                     config.detector(), config.dynamics(),
                                     i_sat=config.i_sat_w_m2)
            assert s == pytest.approx(direct, rel=1e-12)

    def test_snr_vs_fam_monotone_decreasing(self, config):
        mod = config.modulation()
        table = snr_vs_fam(np.geomspace(1e4, 1e6, 20), _array(config, 1), mod,
                           config.noise(), config.detector(), config.dynamics(),
                           i_sat=config.i_sat_w_m2)
        s = table.column("snr_db")
        assert np.all(np.diff(s) < 0)

    def test_capacity_curve_columns_and_formula(self, config):
        mod = config.modulation()
        table = capacity_curve(np.geomspace(1e4, 1e6, 10), _array(config, 1),
                               mod, config.noise(), config.detector(),
                               config.dynamics(),
                               snr_convention=config.snr_convention,
                               i_sat=config.i_sat_w_m2)
        assert table.columns == ["f_am_hz", "snr_db", "capacity_bps"]
        f = table.column("f_am_hz")
        s = table.column("snr_db")
        c = table.column("capacity_bps")
        expected = f * np.log2(1.0 + 10.0 ** (s / 20.0))
        assert np.allclose(c, expected, rtol=1e-12)

    def test_empty_sweep_rejected(self, config):
        with pytest.raises(ValueError):
            snr_vs_fam([], _array(config, 1), config.modulation(),
                       config.noise(), config.detector(), config.dynamics())
