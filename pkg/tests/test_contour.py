import math

import numpy as np
import pytest

from twocolor.action import action, action_second_derivative
from twocolor.amplitude import direct_amplitude
from twocolor.contour import (
    ContourTopologyError,
    DegenerateSaddleError,
    build_contour,
    contour_quadrature,
    descent_directions,
    landscape_grid,
    trace_descent_path,
)
from twocolor.field import FieldConfig
from twocolor.saddles import find_saddles, label_saddles
from twocolor.sweeps import find_coalescence


def integrand_magnitude(cfg, p, wt):
    return math.exp(-complex(action(cfg, p, wt / cfg.omega)).imag)


def test_descent_directions_antipodal(cfg45):
    for theta in (0.1, 0.45, 0.8, 1.3):
        cfg = cfg45.with_theta(theta)
        for s in find_saddles(cfg, 0.1):
            a, b = descent_directions(s, cfg, 0.1)
            assert abs(math.remainder(a - b - math.pi, 2 * math.pi)) < 1e-12


def test_descent_directions_monochromatic_are_horizontal(cfg0):
    # S'' is purely imaginary with positive imaginary part at these
    # saddles, so the integrand falls off fastest along the real axis
    for s in find_saddles(cfg0, 0.0):
        d2 = complex(action_second_derivative(cfg0, 0.0, s.t))
        assert d2.real == pytest.approx(0.0, abs=1e-12 * abs(d2))
        assert d2.imag > 0
        a, b = descent_directions(s, cfg0, 0.0)
        assert sorted([abs(a), abs(b)]) == pytest.approx([0.0, math.pi], abs=1e-12)


def test_descent_directions_decay_sampled(cfg45):
    # |integrand| must strictly decrease a small step along both
    # directions, for every saddle over a spread of mixing angles
    eps = 1e-3
    count = 0
    for theta in np.linspace(0.05, 1.5, 10):
        cfg = cfg45.with_theta(float(theta))
        for p in (0.0, 0.25):
            for s in find_saddles(cfg, p):
                m0 = integrand_magnitude(cfg, p, s.wt)
                for phi in descent_directions(s, cfg, p):
                    m1 = integrand_magnitude(cfg, p, s.wt + eps * np.exp(1j * phi))
                    assert m1 < m0
                count += 1
    assert count >= 50


def test_descent_directions_degenerate_raises(cfg45):
    cp = find_coalescence(cfg45.E0, cfg45.omega, cfg45.Ip)
    cfg = FieldConfig(E0=cfg45.E0, omega=cfg45.omega, theta=cp.theta_star, Ip=cfg45.Ip)
    from twocolor.saddles import SaddlePoint

    merged = SaddlePoint(t=cp.t_star, wt=cp.wt_star, branch="minus", residual=0.0)
    with pytest.raises(DegenerateSaddleError):
        descent_directions(merged, cfg, 0.0)


def test_traced_path_stays_on_level_set(cfg45):
    s = find_saddles(cfg45, 0.0)[0]
    phi = descent_directions(s, cfg45, 0.0)[0]
    path = trace_descent_path(cfg45, 0.0, s.wt, phi, floor_im_action=35.0)
    ref = complex(action(cfg45, 0.0, s.t))
    for wt in path.points[:: max(1, len(path.points) // 50)]:
        val = complex(action(cfg45, 0.0, wt / cfg45.omega))
        assert abs(val.real - ref.real) < 1e-6 * max(1.0, abs(ref))


def test_traced_path_monotone_suppression(cfg45):
    for s in find_saddles(cfg45, 0.0):
        for phi in descent_directions(s, cfg45, 0.0):
            path = trace_descent_path(cfg45, 0.0, s.wt, phi, floor_im_action=35.0)
            assert path.termination == "floor"
            # integrand magnitude never grows along the path
            assert np.all(np.diff(path.im_action) > -1e-12)


@pytest.mark.parametrize("theta_deg,expected", [
    (8.0, {"A", "D"}),
    (15.0, {"A", "D"}),
    (25.0, {"A", "B", "C", "D"}),
    (45.0, {"A", "B", "C", "D"}),
    (80.0, {"A", "B", "C", "D"}),
])
def test_contributing_sets(cfg45, theta_deg, expected):
    chain = build_contour(cfg45.with_theta(math.radians(theta_deg)), 0.0)
    assert {s.label for s in chain.contributing} == expected


def test_monochromatic_two_saddle_chain(cfg0):
    chain = build_contour(cfg0, 0.0)
    assert len(chain.contributing) == 2
    assert not chain.degenerate
    # chain endpoints exactly at the real-axis window boundaries
    assert chain.segments[0][0] == pytest.approx(-math.pi / 2 + 0j)
    assert chain.segments[-1][-1] == pytest.approx(3 * math.pi / 2 + 0j)


def test_chain_continuity(cfg45):
    for theta in (0.15, cfg45.theta, 1.4):
        chain = build_contour(cfg45.with_theta(theta), 0.0)
        for a, b in zip(chain.segments[:-1], chain.segments[1:]):
            assert abs(a[-1] - b[0]) < 1e-8


def test_window_edge_saddle_attaches_endpoint(cfg90):
    chain = build_contour(cfg90, 0.0)
    assert {s.label for s in chain.contributing} == {"A", "B", "C", "D"}
    assert chain.diagnostics["end_left"][0] == "saddle"


def test_contributing_switch_brackets_coalescence(cfg45):
    cp = find_coalescence(cfg45.E0, cfg45.omega, cfg45.Ip)
    below = build_contour(cfg45.with_theta(cp.theta_star - 0.02), 0.0)
    above = build_contour(cfg45.with_theta(cp.theta_star + 0.02), 0.0)
    assert len(below.contributing) == 2
    assert len(above.contributing) == 4


def test_near_coalescence_flags_degenerate(cfg45):
    cp = find_coalescence(cfg45.E0, cfg45.omega, cfg45.Ip)
    chain = build_contour(cfg45.with_theta(cp.theta_star + 1.5e-4), 0.0)
    assert chain.degenerate
    assert all(s.degenerate for s in chain.saddles)


@pytest.mark.parametrize("theta_deg,p", [
    (10.0, 0.0), (25.0, -0.3), (45.0, 0.0), (45.0, 0.5), (70.0, 0.2),
])
def test_deformation_invariance(cfg45, theta_deg, p):
    cfg = cfg45.with_theta(math.radians(theta_deg))
    chain = build_contour(cfg, p)
    q_chain = contour_quadrature(chain, cfg, p)
    q_axis = direct_amplitude(cfg, p)
    assert abs(q_chain - q_axis) < 1e-6 * abs(q_axis)


def test_rebuild_is_stable(cfg45):
    # classification is a pure function of (cfg, p)
    first = {s.label: s.contributes for s in build_contour(cfg45, 0.0).saddles}
    second = {s.label: s.contributes for s in build_contour(cfg45, 0.0).saddles}
    assert first == second == {"A": True, "B": True, "C": True, "D": True}


def test_landscape_grid_shape(cfg45):
    re, im, s = landscape_grid(cfg45, 0.0, n_re=40, n_im=20)
    assert re.shape == (40,) and im.shape == (20,) and s.shape == (20, 40)
    # real axis row has purely real action (Im S = 0)
    assert np.max(np.abs(s.imag[0])) < 1e-10


def test_no_saddles_raises_topology_error(cfg45):
    free = FieldConfig(E0=0.0, omega=cfg45.omega, theta=0.3, Ip=0.5)
    with pytest.raises(ContourTopologyError):
        build_contour(free, 0.0)
