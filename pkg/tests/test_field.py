import math

import numpy as np
import pytest

from twocolor.field import (
    FieldConfig,
    FieldConfigError,
    config_from_lab,
    electric_field,
    keldysh_gamma,
    omega_for_keldysh,
    ponderomotive_energy,
    vector_potential,
    vector_potential_integral,
)

RNG = np.random.default_rng(20240817)


def sample_complex_times(cfg, n=40, im_max=2.5):
    wt = RNG.uniform(-6, 6, n) + 1j * RNG.uniform(-im_max, im_max, n)
    return wt / cfg.omega


def test_amplitude_partition(cfg45):
    for theta in np.linspace(0, math.pi / 2, 19):
        cfg = cfg45.with_theta(float(theta))
        assert cfg.E1 >= 0 and cfg.E2 >= 0
        assert cfg.E1**2 + cfg.E2**2 == pytest.approx(cfg.E0**2, rel=1e-15)


def test_ratio_round_trip(cfg45):
    for theta in np.linspace(1e-3, math.pi / 2 - 1e-3, 17):
        cfg = cfg45.with_theta(float(theta))
        assert math.atan(cfg.amplitude_ratio) == pytest.approx(theta, abs=1e-12)


def test_field_zero_at_equal_mixing(cfg45):
    assert abs(electric_field(cfg45, 0.0)) < 1e-15 * cfg45.E0


def test_field_peak_monochromatic(cfg0):
    assert electric_field(cfg0, 0.0) == pytest.approx(cfg0.E0, rel=1e-15)


def test_field_positive_at_25deg(cfg45):
    cfg = cfg45.with_theta(math.radians(25.0))
    val = electric_field(cfg, 0.0)
    assert val == pytest.approx(0.0517, abs=3e-4)
    assert val > 0


def test_vector_potential_zero_at_origin(cfg45):
    for theta in (0.0, 0.3, math.pi / 4):
        cfg = cfg45.with_theta(theta)
        assert abs(vector_potential(cfg, 0.0)) < 1e-16


def test_vector_potential_monochromatic_quarter_period(cfg0):
    t = (math.pi / 2) / cfg0.omega
    assert vector_potential(cfg0, t) == pytest.approx(-cfg0.E0 / cfg0.omega, rel=1e-12)
    assert abs(vector_potential(cfg0, t)) == pytest.approx(1.873, abs=2e-3)


def test_vector_potential_derivative_is_minus_field(cfg45):
    h = 1e-6
    for t in sample_complex_times(cfg45, 25):
        dA = (vector_potential(cfg45, t + h) - vector_potential(cfg45, t - h)) / (2 * h)
        e = electric_field(cfg45, t)
        assert abs(dA + e) < 1e-8 * max(1.0, abs(e))


def test_periodicity_complex_times(cfg45):
    cfg = cfg45.with_theta(0.7)
    T = cfg.period
    for t in sample_complex_times(cfg, 20):
        assert abs(electric_field(cfg, t + T) - electric_field(cfg, t)) < 1e-12 * cfg.E0 * np.exp(
            2 * abs(t.imag) * cfg.omega * cfg.n2)
        assert abs(vector_potential(cfg, t + T) - vector_potential(cfg, t)) < 1e-10 * max(
            1.0, abs(vector_potential(cfg, t)))


def test_cauchy_riemann_analyticity(cfg45):
    # numerical d/d(Re t) must equal -i d/d(Im t) for analytic functions
    h = 1e-5
    for func in (electric_field, vector_potential):
        for t in sample_complex_times(cfg45, 15, im_max=1.5):
            dre = (func(cfg45, t + h) - func(cfg45, t - h)) / (2 * h)
            dim = (func(cfg45, t + 1j * h) - func(cfg45, t - 1j * h)) / (2 * h)
            assert abs(dre - dim / 1j) < 1e-8 * max(1.0, abs(dre))


def test_ponderomotive_energy_values(cfg45, cfg0, cfg90):
    assert ponderomotive_energy(cfg0) == pytest.approx(cfg0.E0**2 / (4 * cfg0.omega**2), rel=1e-14)
    assert ponderomotive_energy(cfg0) == pytest.approx(0.877, abs=2e-3)
    assert ponderomotive_energy(cfg45) == pytest.approx(5 * cfg45.E0**2 / (32 * cfg45.omega**2), rel=1e-14)
    assert ponderomotive_energy(cfg45) == pytest.approx(0.548, abs=2e-3)
    assert ponderomotive_energy(cfg90) == pytest.approx(ponderomotive_energy(cfg0) / 4.0, rel=1e-14)


def test_keldysh_gamma_values(cfg45, cfg0):
    assert keldysh_gamma(cfg45) == pytest.approx(0.675, abs=1e-3)
    assert keldysh_gamma(cfg0) == pytest.approx(
        cfg0.omega * math.sqrt(2 * cfg0.Ip) / cfg0.E0, rel=1e-14)
    assert keldysh_gamma(cfg0) == pytest.approx(0.534, abs=1e-3)


def test_keldysh_equal_mixing_closed_form(cfg45):
    closed = 4 * cfg45.omega * math.sqrt(cfg45.Ip / (5 * cfg45.E0**2))
    assert keldysh_gamma(cfg45) == pytest.approx(closed, rel=1e-12)


def test_keldysh_rejects_vanishing_field(cfg45):
    dead = FieldConfig(E0=0.0, omega=cfg45.omega, theta=cfg45.theta, Ip=cfg45.Ip)
    with pytest.raises(FieldConfigError):
        keldysh_gamma(dead)


def test_omega_for_keldysh_round_trip(cfg45):
    for gamma in (0.3, 0.675, 1.5):
        w = omega_for_keldysh(gamma, cfg45.E0, cfg45.Ip, cfg45.theta)
        assert keldysh_gamma(cfg45.with_omega(w)) == pytest.approx(gamma, rel=1e-12)


def test_config_validation():
    with pytest.raises(FieldConfigError):
        FieldConfig(E0=0.1, omega=-1.0, theta=0.1, Ip=0.5)
    with pytest.raises(FieldConfigError):
        FieldConfig(E0=0.1, omega=0.05, theta=2.0, Ip=0.5)
    with pytest.raises(FieldConfigError):
        FieldConfig(E0=0.1, omega=0.05, theta=0.1, Ip=-0.5)
    with pytest.raises(FieldConfigError):
        FieldConfig(E0=0.1, omega=0.05, theta=0.1, Ip=0.5, n1=0)
    with pytest.raises(FieldConfigError):
        config_from_lab(4e14, 800.0, intensity_au=0.011, theta_deg=45.0)


def test_antiderivative_of_vector_potential(cfg45):
    h = 1e-6
    for t in sample_complex_times(cfg45, 10):
        d = (vector_potential_integral(cfg45, t + h)
             - vector_potential_integral(cfg45, t - h)) / (2 * h)
        assert abs(d - vector_potential(cfg45, t)) < 1e-7 * max(1.0, abs(d))
