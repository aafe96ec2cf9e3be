import math

import numpy as np
import pytest

from twocolor.action import (
    action,
    action_derivatives,
    action_first_derivative,
    action_second_derivative,
    action_third_derivative,
)
from twocolor.field import FieldConfig, electric_field, ponderomotive_energy, vector_potential
from twocolor.saddles import find_saddles

RNG = np.random.default_rng(7)

_GL = np.polynomial.legendre.leggauss(40)


def quadrature_action(cfg, p, t, panels=64):
    """Independent oracle: composite Gauss quadrature along 0 -> t."""
    nodes, weights = _GL
    edges = np.linspace(0.0, 1.0, panels + 1)
    total = 0.0j
    for a, b in zip(edges[:-1], edges[1:]):
        mid = 0.5 * (a + b) * t
        half = 0.5 * (b - a) * t
        ts = mid + half * nodes
        k = p + vector_potential(cfg, ts)
        total += half * np.sum(weights * (cfg.Ip + 0.5 * k * k))
    return total


def test_reference_point_zero(cfg45):
    for p in (-0.7, 0.0, 1.3):
        assert action(cfg45, p, 0.0) == 0.0


def test_free_particle(cfg45):
    free = FieldConfig(E0=0.0, omega=cfg45.omega, theta=cfg45.theta, Ip=cfg45.Ip)
    for p in (-0.4, 0.9):
        for t in (3.7, 2.0 + 5.0j):
            assert action(free, p, t) == pytest.approx((free.Ip + p * p / 2) * t, rel=1e-14)
            ev = action_derivatives(free, p, t)
            assert ev.dS == pytest.approx(free.Ip + p * p / 2, rel=1e-14)
            assert ev.d2S == 0


def test_closed_form_matches_quadrature_spot(cfg45):
    # the documented spot check: p = 0, t = 0.5 + 0.3j (both time scales)
    for t in (0.5 + 0.3j, (0.5 + 0.3j) / cfg45.omega):
        closed = action(cfg45, 0.0, t)
        quad = quadrature_action(cfg45, 0.0, t)
        assert abs(closed - quad) < 1e-10 * abs(quad)


@pytest.mark.parametrize("theta_deg", [0.0, 25.0, 45.0, 90.0])
@pytest.mark.parametrize("p", [-0.5, 0.0, 0.8])
def test_closed_form_matches_quadrature_random_segments(cfg45, theta_deg, p):
    cfg = cfg45.with_theta(math.radians(theta_deg))
    rng = np.random.default_rng(42)
    for _ in range(6):
        wt = rng.uniform(-10, 10) + 1j * rng.uniform(-3, 3)
        t = wt / cfg.omega
        closed = action(cfg, p, t)
        quad = quadrature_action(cfg, p, t)
        assert abs(closed - quad) < 1e-9 * max(1.0, abs(quad))


def test_nondefault_orders_and_phase():
    cfg = FieldConfig(E0=0.09, omega=0.05, theta=0.6, Ip=0.45, phi2=0.8, n1=1, n2=3)
    for p in (0.0, -0.3):
        t = (1.2 + 0.9j) / cfg.omega
        assert abs(action(cfg, p, t) - quadrature_action(cfg, p, t)) < 1e-9
    same = FieldConfig(E0=0.09, omega=0.05, theta=0.6, Ip=0.45, phi2=0.8, n1=2, n2=2)
    t = (0.7 - 0.4j) / same.omega
    assert abs(action(same, 0.2, t) - quadrature_action(same, 0.2, t)) < 1e-9


def test_first_derivative_identity(cfg45):
    for t in RNG.uniform(-5, 5, 20) + 1j * RNG.uniform(-2, 2, 20):
        t = t / cfg45.omega
        k = 0.3 + vector_potential(cfg45, t)
        assert action_first_derivative(cfg45, 0.3, t) == pytest.approx(
            cfg45.Ip + 0.5 * k * k, rel=1e-15)
        assert action_second_derivative(cfg45, 0.3, t) == pytest.approx(
            -k * electric_field(cfg45, t), rel=1e-15)


def test_second_derivative_finite_difference(cfg45):
    h = 1e-6
    pts = RNG.uniform(-5, 5, 100) + 1j * RNG.uniform(-2, 2, 100)
    for wt in pts:
        t = wt / cfg45.omega
        fd = (action_first_derivative(cfg45, 0.1, t + h)
              - action_first_derivative(cfg45, 0.1, t - h)) / (2 * h)
        an = action_second_derivative(cfg45, 0.1, t)
        assert abs(fd - an) < 1e-8 * max(1.0, abs(an))


def test_third_derivative_finite_difference(cfg45):
    h = 1e-5
    for wt in RNG.uniform(-4, 4, 20) + 1j * RNG.uniform(-1.5, 1.5, 20):
        t = wt / cfg45.omega
        fd = (action_second_derivative(cfg45, -0.2, t + h)
              - action_second_derivative(cfg45, -0.2, t - h)) / (2 * h)
        an = action_third_derivative(cfg45, -0.2, t)
        assert abs(fd - an) < 1e-6 * max(1.0, abs(an))


def test_period_increment_is_constant(cfg45):
    # S(p, t+T) - S(p, t) equals T (Ip + p^2/2 + Up) independently of t
    p = 0.37
    T = cfg45.period
    expected = T * (cfg45.Ip + p * p / 2 + ponderomotive_energy(cfg45))
    for wt in RNG.uniform(-6, 6, 12) + 1j * RNG.uniform(-2, 2, 12):
        t = wt / cfg45.omega
        inc = action(cfg45, p, t + T) - action(cfg45, p, t)
        assert abs(inc - expected) < 1e-10 * abs(expected)


def test_action_analyticity(cfg45):
    h = 1e-5
    for wt in RNG.uniform(-5, 5, 12) + 1j * RNG.uniform(-2, 2, 12):
        t = wt / cfg45.omega
        dre = (action(cfg45, 0.0, t + h) - action(cfg45, 0.0, t - h)) / (2 * h)
        dim = (action(cfg45, 0.0, t + 1j * h) - action(cfg45, 0.0, t - 1j * h)) / (2 * h)
        assert abs(dre - dim / 1j) < 1e-8 * max(1.0, abs(dre))


def test_derivative_vanishes_at_saddles(cfg45):
    for s in find_saddles(cfg45, 0.0):
        assert abs(action_first_derivative(cfg45, 0.0, s.t)) < 1e-10
