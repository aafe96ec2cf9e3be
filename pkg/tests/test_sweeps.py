import math

import numpy as np
import pytest

from twocolor.action import action_first_derivative, action_second_derivative
from twocolor.field import FieldConfig, keldysh_gamma
from twocolor.sweeps import (
    COALESCENCE_GUARD,
    ContinuationError,
    continue_saddles,
    find_coalescence,
    rstar_curve,
    track_saddles,
)
from twocolor.saddles import find_saddles, label_saddles


def axis_coalescence_oracle(E0, omega, Ip, n_theta=2000):
    """Independent oracle for the p = 0 fold of the (1, 2) switchover.

    On the Re(wt) = 0 axis, p + A = i h with
    h(x) = (E0/w) [ (sin th / 2) sinh 2x - cos th sinh x ];   x = w Im t.
    The lower branch pair merges where the dip of h just touches
    -sqrt(2 Ip): bisection on the dip depth over theta.
    """
    xs = np.linspace(1e-4, 6.0, 60001)
    s1, s2 = np.sinh(xs), np.sinh(2 * xs)
    target = math.sqrt(2 * Ip)

    def depth(theta):
        h = (E0 / omega) * (0.5 * math.sin(theta) * s2 - math.cos(theta) * s1)
        i = int(np.argmin(h))
        return h[i] + target, xs[i]

    lo, hi = 1e-3, math.pi / 2 - 1e-3
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        d, x = depth(mid)
        if d < 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi), x


def test_coalescence_against_axis_oracle(cfg45):
    cp = find_coalescence(cfg45.E0, cfg45.omega, cfg45.Ip)
    theta_o, x_o = axis_coalescence_oracle(cfg45.E0, cfg45.omega, cfg45.Ip)
    assert cp.theta_star == pytest.approx(theta_o, abs=2e-4)
    assert cp.wt_star.imag == pytest.approx(x_o, abs=2e-4)
    assert abs(cp.wt_star.real) < 1e-9
    assert cp.residual_dS < 1e-9 and cp.residual_d2S < 1e-9
    assert 0 < cp.r_star < 1


def test_coalescence_point_derivative_residuals(cfg45):
    cp = find_coalescence(cfg45.E0, cfg45.omega, cfg45.Ip)
    cfg = FieldConfig(E0=cfg45.E0, omega=cfg45.omega, theta=cp.theta_star, Ip=cfg45.Ip)
    assert abs(action_first_derivative(cfg, 0.0, cp.t_star)) < 1e-9
    assert abs(action_second_derivative(cfg, 0.0, cp.t_star)) < 1e-9


def test_coalescence_gamma_is_config_keldysh(cfg45):
    cp = find_coalescence(cfg45.E0, cfg45.omega, cfg45.Ip)
    cfg_star = FieldConfig(E0=cfg45.E0, omega=cfg45.omega, theta=cp.theta_star,
                           Ip=cfg45.Ip)
    assert cp.gamma == pytest.approx(keldysh_gamma(cfg_star), rel=1e-12)


def test_rstar_curve_monotone_and_bounded(cfg45):
    gammas = list(np.geomspace(0.1, 4.0, 9))
    table = rstar_curve(gammas, cfg45.Ip, cfg45.E0**2)
    rs = table.column("rstar")
    gs = table.column("gamma")
    assert np.all(np.diff(gs) > 0)
    assert np.all(np.diff(rs) < 0)
    assert np.all((rs > 0) & (rs < 1))
    for g_req, g_got in zip(gammas, gs):
        assert g_got == pytest.approx(g_req, rel=1e-9)


def test_rstar_large_gamma_asymptote(cfg45):
    table = rstar_curve([5.0], cfg45.Ip, cfg45.E0**2)
    r = float(table.column("rstar")[0])
    assert abs(r - 1.0 / 20.0) / r < 0.05


def test_rstar_small_gamma_asymptote_corrected_exponent(cfg45):
    # 1 - R* ~ cbrt(135/32) gamma^(2/3): the ratio approaches 1 from below
    coeff = (135.0 / 32.0) ** (1.0 / 3.0)
    table = rstar_curve([0.3, 0.15, 0.08, 0.04], cfg45.Ip, cfg45.E0**2)
    rs = table.column("rstar")
    gs = table.column("gamma")
    ratios = (1.0 - rs) / (coeff * gs ** (2.0 / 3.0))
    assert np.all(np.diff(ratios) > 0)  # toward 1 as gamma decreases
    assert np.all(ratios < 1.0)
    assert ratios[-1] > 0.8


def test_track_labels_and_reversal(cfg45):
    thetas = [math.radians(t) for t in (10, 25, 45, 60, 80)]
    fwd = track_saddles([cfg45.with_theta(t) for t in thetas], 0.0)
    rev = track_saddles([cfg45.with_theta(t) for t in reversed(thetas)], 0.0)

    def snapshot(table, theta_deg):
        return sorted(
            (r[3], round(r[5], 9), round(r[6], 9))
            for r in table.rows if abs(r[1] - theta_deg) < 1e-9
        )

    for th in (10, 25, 45, 60, 80):
        assert snapshot(fwd, th) == snapshot(rev, th)


def test_track_narrative_coalescence(cfg45):
    thetas = np.linspace(8.0, 80.0, 37)
    table = track_saddles([cfg45.with_theta(math.radians(t)) for t in thetas], 0.0)

    def imag_of(label, theta_deg):
        for r in table.rows:
            if r[3] == label and abs(r[1] - theta_deg) < 1e-9:
                return r[6]
        return None

    # C descends from high imaginary part toward A ...
    assert imag_of("C", 8.0) > 2.0
    assert imag_of("C", 18.0) < 1.6
    # ... and above the fold A and C sit symmetrically off axis
    for r in table.rows:
        if abs(r[1] - 45.0) < 1e-9 and r[3] in "AC":
            assert abs(abs(r[5]) - 0.9505) < 2e-3


def test_track_free_particle_errors(cfg45):
    free = FieldConfig(E0=0.0, omega=cfg45.omega, theta=0.4, Ip=0.5)
    with pytest.raises(ContinuationError):
        track_saddles([free, free.with_theta(0.5)], 0.0)


def test_track_flags_degenerate_near_fold(cfg45):
    cp = find_coalescence(cfg45.E0, cfg45.omega, cfg45.Ip)
    eps = 0.0004
    thetas = [cp.theta_star - eps, cp.theta_star, cp.theta_star + eps]
    table = track_saddles([cfg45.with_theta(t) for t in thetas], 0.0)
    mid = [r for r in table.rows if abs(r[1] - math.degrees(cp.theta_star)) < 1e-9]
    assert any(r[8] for r in mid)  # degenerate flag set at the fold node


def test_continue_saddles_in_momentum(cfg45):
    base = label_saddles(cfg45, find_saddles(cfg45, 0.0))
    moved = continue_saddles(cfg45, 0.0, base, cfg45, 0.35)
    assert len(moved) == len(base)
    for s in moved:
        assert abs(action_first_derivative(cfg45, 0.35, s.t)) < 1e-10
    fresh = find_saddles(cfg45, 0.35)
    for s in moved:
        assert min(abs(s.wt - f.wt) for f in fresh) < 1e-8
    assert _sep(moved) > COALESCENCE_GUARD


def _sep(saddles):
    return min(
        abs(a.wt - b.wt)
        for i, a in enumerate(saddles) for b in saddles[i + 1:]
    )
