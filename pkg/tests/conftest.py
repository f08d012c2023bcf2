"""Shared fixtures: fast quadrature and the calibrated signal chain."""

import numpy as np
import pytest

from rydarray import (
    BeamGeometry,
    CellSpec,
    LevelScheme,
    NoiseAnchors,
    QuadratureSpec,
    SimulationConfig,
    calibrate_noise,
    scheme_at_power,
    transduce_fundamental,
)

TWO_PI = 2.0 * np.pi


@pytest.fixture(scope="session")
def config():
    return SimulationConfig()


@pytest.fixture(scope="session")
def geometry(config):
    return config.geometry()


@pytest.fixture(scope="session")
def cell(config):
    return config.cell()


@pytest.fixture(scope="session")
def quad(config):
    return config.quad()


@pytest.fixture(scope="session")
def base_scheme(config):
    """Weak probe, coupling on, RF carrier supplied per test."""
    return config.scheme()


@pytest.fixture(scope="session")
def dp1_curve(config, geometry, cell, quad):
    """Tabulated optical tone amplitude dP1(P) for the default chain."""
    mod = config.modulation()
    powers = np.geomspace(2e-6, 1.2e-3, 20)
    scheme = config.scheme()
    dp1 = np.array([
        transduce_fundamental(
            scheme_at_power(scheme, geometry, p, config.i_sat_w_m2),
            mod, geometry, cell, quad, p).delta_p1
        for p in powers])
    return powers, dp1


@pytest.fixture(scope="session")
def calibration(dp1_curve, config):
    powers, dp1 = dp1_curve
    return calibrate_noise(NoiseAnchors(), powers, dp1, rbw=config.rbw_khz * 1e3)
