"""Configuration loading: defaults, validation, coercion, TOML parsing."""

import io

import numpy as np
import pytest

from rydarray import ConfigError, SimulationConfig, config_from_dict, load_config
from rydarray.config import MHZ, apply_overrides

TWO_PI = 2.0 * np.pi


class TestDefaults:
    def test_empty_file_gives_defaults(self):
        cfg = load_config(io.StringIO(""))
        assert cfg == SimulationConfig()

    def test_scalar_keys_parsed(self):
        cfg = load_config(io.StringIO("theta_deg = 0.0\nomega_c_mhz = 12.5\n"))
        assert cfg.theta_deg == 0.0
        assert cfg.omega_c_mhz == 12.5
        # everything else keeps its default
        assert cfg.replace(theta_deg=2.0, omega_c_mhz=8.0) == SimulationConfig()

    def test_tuple_keys_parsed(self):
        cfg = load_config(io.StringIO(
            "n_receivers = 2\nreceiver_offsets_mhz = [0.0, 7.5]\n"
            "receiver_signs = [1, -1]\n"))
        assert cfg.receiver_offsets_mhz == (0.0, 7.5)
        assert cfg.receiver_signs == (1, -1)


class TestValidation:
    def test_negative_rabi_rejected_naming_key(self):
        with pytest.raises(ConfigError) as err:
            load_config(io.StringIO("omega_c_mhz = -8\n"))
        assert err.value.key == "omega_c_mhz"

    def test_unknown_key_rejected(self):
        with pytest.raises(ConfigError) as err:
            load_config(io.StringIO("omega_c_mzh = 8\n"))
        assert err.value.key == "omega_c_mzh"

    def test_invalid_toml_reported(self):
        with pytest.raises(ConfigError):
            load_config(io.StringIO("omega_c_mhz = = 8\n"))

    def test_bad_value_type(self):
        with pytest.raises(ConfigError) as err:
            config_from_dict({"omega_c_mhz": "eight"})
        assert err.value.key == "omega_c_mhz"

    def test_domain_checks(self):
        for key, value in (("depth", 1.5), ("theta_deg", 95.0),
                           ("lowpass_poles", 0), ("n_receivers", 0),
                           ("snr_convention", "voltage"),
                           ("receiver_signs", (2, 1, 1, 1))):
            with pytest.raises(ConfigError):
                SimulationConfig().replace(**{key: value})

    def test_n_receivers_needs_enough_offsets(self):
        with pytest.raises(ConfigError) as err:
            config_from_dict({"n_receivers": 3,
                              "receiver_offsets_mhz": [0.0, 5.0]})
        assert err.value.key == "n_receivers"


class TestOverridesAndBuilders:
    def test_apply_overrides_coerces_strings(self):
        cfg = apply_overrides(SimulationConfig(),
                              {"probe_power_uw": "200", "lowpass_poles": "1"})
        assert cfg.probe_power_uw == 200.0
        assert cfg.lowpass_poles == 1

    def test_apply_overrides_rejects_unknown(self):
        with pytest.raises(ConfigError):
            apply_overrides(SimulationConfig(), {"nope": "1"})

    def test_scheme_builder_units(self):
        cfg = SimulationConfig()
        s = cfg.scheme()
        assert s.omega_c == pytest.approx(cfg.omega_c_mhz * MHZ)
        assert s.gamma2 == pytest.approx(TWO_PI * 6.07e6)
        assert s.gamma_transit == pytest.approx(TWO_PI * 100e3)

    def test_geometry_and_cell_builders(self):
        cfg = SimulationConfig()
        geo = cfg.geometry()
        assert geo.lambda_p == pytest.approx(780e-9)
        assert geo.theta == 2.0
        cell = cfg.cell()
        assert cell.length == pytest.approx(0.075)
        assert cell.od_resonant == 5.0

    def test_dynamics_builder(self):
        dyn = SimulationConfig().dynamics()
        assert dyn.corner_hz == pytest.approx(174e3)
        assert dyn.poles == 2

    def test_array_builder(self):
        cfg = SimulationConfig().replace(n_receivers=3)
        arr = cfg.array()
        assert len(arr.receivers) == 3
        assert arr.total_power == pytest.approx(3 * 110e-6)
        assert arr.receivers[1].detuning_offset == pytest.approx(3.0 * MHZ)
