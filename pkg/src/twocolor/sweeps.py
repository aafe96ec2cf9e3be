"""Saddle tracking across parameter sweeps and the coalescence locus.

Continuation keeps saddle identities (labels) while theta, omega or p
vary; the coalescence solver finds the mixing angle at which two saddles
merge into one second-order saddle (S' = S'' = 0), and the scaling curve
maps that amplitude ratio R* = tan(theta*) against the Keldysh parameter
of the coalescing configuration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .action import (
    action_first_derivative,
    action_second_derivative,
    action_third_derivative,
)
from .field import FieldConfig, keldysh_gamma, omega_for_keldysh
from .saddles import (
    SaddlePoint,
    canonical_wt,
    find_saddles,
    label_saddles,
    SADDLE_TOLERANCE,
)
from .tables import SweepTable

COALESCENCE_GUARD = 0.05  # omega*t distance below which identities blur
IM_FOLLOW_CAP = 12.0  # tracks above this Im(wt) are treated as escaped


class ContinuationError(RuntimeError):
    pass


class CoalescenceError(RuntimeError):
    def __init__(self, message, last_iterate=None):
        super().__init__(message)
        self.last_iterate = last_iterate


def _newton_polish(cfg: FieldConfig, p: float, wt: complex, max_iter=60) -> tuple[complex, float]:
    """Undamped Newton on S' from a nearby predictor; returns (wt, residual)."""
    w = cfg.omega
    z = complex(wt)
    for _ in range(max_iter):
        f = complex(action_first_derivative(cfg, p, z / w))
        d2 = complex(action_second_derivative(cfg, p, z / w))
        if abs(d2) < 1e-300:
            break
        step = -w * f / d2
        z += step
        if abs(step) < 1e-13:
            break
    res = abs(action_first_derivative(cfg, p, z / w))
    return z, res


def continue_saddles(
    cfg0: FieldConfig,
    p0: float,
    saddles: list[SaddlePoint],
    cfg1: FieldConfig,
    p1: float,
    *,
    guard: float = COALESCENCE_GUARD,
    tol: float = SADDLE_TOLERANCE,
    min_step: float = 1e-4,
) -> list[SaddlePoint]:
    """Continue labelled saddles from (cfg0, p0) to (cfg1, p1).

    The straight parameter segment is bisected adaptively: a step is
    accepted only when every track converges and moves unambiguously
    (movement below half the old pairwise separation).  Tracks closer
    than ``guard`` are flagged degenerate; tracks escaping above
    IM_FOLLOW_CAP are dropped.
    """

    def blend(s):
        theta = cfg0.theta + s * (cfg1.theta - cfg0.theta)
        omega = cfg0.omega + s * (cfg1.omega - cfg0.omega)
        E0 = cfg0.E0 + s * (cfg1.E0 - cfg0.E0)
        cfg = FieldConfig(E0=E0, omega=omega, theta=theta, Ip=cfg0.Ip,
                          phi2=cfg0.phi2, n1=cfg0.n1, n2=cfg0.n2)
        return cfg, p0 + s * (p1 - p0)

    tracks = [
        SaddlePoint(t=s.t, wt=s.wt, branch=s.branch, residual=s.residual,
                    label=s.label, order=s.order, degenerate=s.degenerate)
        for s in saddles
    ]
    s_now = 0.0
    ds = 1.0
    while s_now < 1.0 - 1e-15:
        ds = min(ds, 1.0 - s_now)
        cfg, p = blend(s_now + ds)
        sep0 = _min_separation(tracks)
        move_cap = 0.45 * sep0 if len(tracks) > 1 else 0.6
        cand: list[tuple[complex, float]] = []
        failure = None
        for tr in tracks:
            z, res = _newton_polish(cfg, p, tr.wt)
            if res > tol or not np.isfinite(z):
                failure = "diverged"
                break
            if abs(z - tr.wt) > move_cap:
                failure = "swap-risk"
                break
            cand.append((z, res))
        if failure is None and len(cand) > 1:
            sep1 = min(
                abs(cand[i][0] - cand[j][0])
                for i in range(len(cand))
                for j in range(i + 1, len(cand))
            )
            # slow down before entering the guard zone so tracked roots
            # approach each other gently and identities never swap
            if sep1 < guard <= 0.5 * sep0 and ds > min_step:
                failure = "close-approach"
        if failure is not None:
            if ds <= min_step:
                if failure == "diverged":
                    raise ContinuationError(
                        f"continuation stalled at s={s_now + ds:.6g}")
                # at minimal step the predictor is as good as it gets:
                # accept nearest-continuation and flag the ambiguity
                cand = []
                for tr in tracks:
                    z, res = _newton_polish(cfg, p, tr.wt)
                    if res > tol or not np.isfinite(z):
                        raise ContinuationError(
                            f"continuation stalled at s={s_now + ds:.6g}")
                    cand.append((z, res))
                for tr in tracks:
                    tr.degenerate = True
            else:
                ds *= 0.5
                continue
        for tr, (z, res) in zip(tracks, cand):
            tr.wt = complex(z)
            tr.t = complex(z) / cfg.omega
            tr.residual = res
        if _min_separation(tracks) < guard:
            for tr in tracks:
                tr.degenerate = True
        s_now += ds
        ds *= 2.0
        tracks = [tr for tr in tracks if tr.wt.imag < IM_FOLLOW_CAP]
        if not tracks:
            raise ContinuationError("all tracks escaped the followed strip")
    return tracks


def _min_separation(tracks) -> float:
    if len(tracks) < 2:
        return math.inf
    best = math.inf
    for i in range(len(tracks)):
        for j in range(i + 1, len(tracks)):
            best = min(best, abs(tracks[i].wt - tracks[j].wt))
    return best


def _match_labels(prev: list[SaddlePoint], found: list[SaddlePoint], guard: float) -> None:
    """Propagate labels from the previous node by nearest continuation."""
    taken: dict[int, float] = {}
    for tr in sorted(prev, key=lambda s: s.label):
        if not found:
            break
        dists = [abs(tr.wt - s.wt) for s in found]
        j = int(np.argmin(dists))
        if j in taken or dists[j] > 0.45 * _min_separation(prev) + guard:
            for s in found:
                s.degenerate = True
            continue
        found[j].label = tr.label
        taken[j] = dists[j]


def track_saddles(
    cfgs: list[FieldConfig],
    p: float,
    *,
    guard: float = COALESCENCE_GUARD,
    im_cap: float = 3.0,
) -> SweepTable:
    """Track labelled saddles across a monotone one-parameter sweep.

    Each node is solved fresh (grid seeds plus the previous node's roots
    as predictors); labels are anchored at the node with the largest
    mixing angle, where the events are well separated and ordered as in
    the pure-second-colour limit, and propagated to every other node.
    For the canonical p = 0, phi2 = 0 scan the labelling is determined
    by the saddle geometry alone, so both sweep directions produce
    identical assignments; tracked pairs closer than ``guard`` are
    flagged degenerate.
    """
    if not cfgs:
        raise ValueError("empty sweep")
    thetas = [c.theta for c in cfgs]
    anchor = int(np.argmax(thetas))

    canonical = (
        p == 0.0 and cfgs[0].phi2 == 0.0 and (cfgs[0].n1, cfgs[0].n2) == (1, 2)
    )
    per_node: list[list[SaddlePoint] | None] = [None] * len(cfgs)

    def solve(i: int, prev: list[SaddlePoint] | None) -> list[SaddlePoint]:
        extra = [s.wt for s in prev] if prev else None
        found = find_saddles(cfgs[i], p, n_re=24, n_im=12, im_cap=im_cap,
                             extra_seeds=extra)
        if _min_separation(found) < guard:
            for s in found:
                s.degenerate = True
        if canonical:
            label_saddles(cfgs[i], found)
            for s in list(found):
                if s.order == 2 and s.label == "A":
                    # exact fold: report both merged identities, flagged
                    s.degenerate = True
                    found.append(SaddlePoint(
                        t=s.t, wt=s.wt, branch=s.branch, residual=s.residual,
                        label="C", order=2, degenerate=True))
        elif prev is not None:
            _match_labels(prev, found, guard)
        else:
            found.sort(key=lambda s: s.wt.real)
            for s, lab in zip(found, ("A", "B", "C", "D")):
                s.label = lab
        return found

    per_node[anchor] = solve(anchor, None)
    if not per_node[anchor]:
        raise ContinuationError("no saddles at the sweep anchor")
    for i in range(anchor + 1, len(cfgs)):
        per_node[i] = solve(i, per_node[i - 1])
    for i in range(anchor - 1, -1, -1):
        per_node[i] = solve(i, per_node[i + 1])

    table = SweepTable(
        name="saddle_tracks",
        columns=[
            "node", "theta_deg", "omega_au", "label", "branch",
            "re_wt", "im_wt", "residual", "degenerate", "in_window",
        ],
        metadata={
            "p_au": p,
            "guard_wt": guard,
            "im_cap_wt": im_cap,
            "anchor_node": anchor,
        },
    )
    for i, (cfg, sads) in enumerate(zip(cfgs, per_node)):
        for s in sorted(sads, key=lambda s: s.label):
            wt = canonical_wt(s.wt)
            table.append(
                i, math.degrees(cfg.theta), cfg.omega, s.label, s.branch,
                float(wt.real), float(wt.imag), s.residual,
                bool(s.degenerate), bool(wt.imag < im_cap),
            )
    return table


@dataclass(frozen=True)
class CoalescencePoint:
    """Mixing angle and complex time where two saddles merge (S'=S''=0)."""

    theta_star: float
    r_star: float
    t_star: complex
    wt_star: complex
    gamma: float  # Keldysh parameter of the coalescing configuration
    kappa: float  # single-colour Keldysh parameter omega sqrt(2 Ip)/E0
    residual_dS: float
    residual_d2S: float


def _dtheta_derivatives(cfg: FieldConfig, p: float, t: complex):
    """(dS'/dtheta, dS''/dtheta) at fixed omega, E0."""
    w = cfg.omega
    u1 = cfg.n1 * w * t
    u2 = cfg.n2 * w * t + cfg.phi2
    da1 = -cfg.E0 * math.sin(cfg.theta) / (cfg.n1 * w)
    da2 = cfg.E0 * math.cos(cfg.theta) / (cfg.n2 * w)
    dA = -da1 * np.sin(u1) + da2 * np.sin(u2)
    dE = -cfg.E0 * math.sin(cfg.theta) * np.cos(u1) - cfg.E0 * math.cos(cfg.theta) * np.cos(u2)
    from .field import electric_field, vector_potential

    k = p + vector_potential(cfg, t)
    e = electric_field(cfg, t)
    return k * dA, -(dA * e + k * dE)


def find_coalescence(
    E0: float,
    omega: float,
    Ip: float,
    p: float = 0.0,
    *,
    phi2: float = 0.0,
    n1: int = 1,
    n2: int = 2,
    seed: tuple[float, complex] | None = None,
    tol: float = 1e-11,
) -> CoalescencePoint:
    """Solve S' = S'' = 0 for (t*, theta*) at fixed E0, omega, Ip.

    A least-squares Gauss-Newton iteration on the four real equations
    {Re S', Im S', Re S'', Im S''} in the three unknowns
    (Re t, Im t, theta) stays well conditioned through the degenerate
    Jacobians near the fold.  The seed comes from a coarse theta sweep
    locating the closest saddle pair, unless given explicitly as
    (theta0, wt0).
    """

    def make_cfg(theta):
        return FieldConfig(E0=E0, omega=omega, theta=theta, Ip=Ip,
                           phi2=phi2, n1=n1, n2=n2)

    if seed is None:
        seed = _coalescence_seed(make_cfg, p)
    theta, wt = float(seed[0]), complex(seed[1])

    def system(theta, wt):
        cfg = make_cfg(theta)
        t = wt / omega
        d1 = complex(action_first_derivative(cfg, p, t))
        d2 = complex(action_second_derivative(cfg, p, t))
        return cfg, np.array([d1.real, d1.imag, d2.real, d2.imag])

    cfg, F = system(theta, wt)
    best = float(np.linalg.norm(F))
    for _ in range(120):
        t = wt / omega
        d2 = complex(action_second_derivative(cfg, p, t))
        d3 = complex(action_third_derivative(cfg, p, t))
        dth1, dth2 = _dtheta_derivatives(cfg, p, t)
        dth1, dth2 = complex(dth1), complex(dth2)
        # columns: d/dRe(wt), d/dIm(wt), d/dtheta  (time derivs carry 1/omega)
        J = np.array([
            [d2.real / omega, -d2.imag / omega, dth1.real],
            [d2.imag / omega, d2.real / omega, dth1.imag],
            [d3.real / omega, -d3.imag / omega, dth2.real],
            [d3.imag / omega, d3.real / omega, dth2.imag],
        ])
        step, *_ = np.linalg.lstsq(J, -F, rcond=None)
        # keep the iteration local: the fold geometry is only trusted nearby
        big = max(abs(step[0] + 1j * step[1]) / 0.3, abs(step[2]) / 0.1, 1.0)
        step = step / big
        lam = 1.0
        for _h in range(25):
            th_t = min(max(theta + lam * step[2], 1e-9), math.pi / 2 - 1e-9)
            wt_t = wt + lam * (step[0] + 1j * step[1])
            cfg_t, F_t = system(th_t, wt_t)
            if np.linalg.norm(F_t) < best or lam < 1e-6:
                break
            lam *= 0.5
        theta, wt, cfg, F = th_t, wt_t, cfg_t, F_t
        best = float(np.linalg.norm(F))
        if best < tol and np.hypot(*(lam * step[:2])) < 1e-12:
            break
    res1 = abs(complex(action_first_derivative(cfg, p, wt / omega)))
    res2 = abs(complex(action_second_derivative(cfg, p, wt / omega)))
    if res1 > 1e-9 or res2 > 1e-9:
        raise CoalescenceError(
            f"coalescence solve did not converge (|S'|={res1:.2e}, |S''|={res2:.2e})",
            last_iterate=(theta, wt),
        )
    wt = canonical_wt(wt)
    return CoalescencePoint(
        theta_star=theta,
        r_star=math.tan(theta),
        t_star=wt / omega,
        wt_star=wt,
        gamma=keldysh_gamma(cfg),
        kappa=omega * math.sqrt(2.0 * Ip) / E0,
        residual_dS=res1,
        residual_d2S=res2,
    )


def _coalescence_seed(make_cfg, p: float) -> tuple[float, complex]:
    """Seed (theta0, wt0) for the coalescence Newton iteration.

    For p = 0 and phi2 = 0 the merging pair sits on the Re(wt) = 0 axis,
    where p + A(i y) = i h(y) is purely imaginary; the pair exists while
    the dip of h reaches -sqrt(2 Ip) and merges when the dip just
    touches it, so bisection on the dip depth brackets theta*.
    Otherwise a coarse theta sweep locates the closest saddle pair.
    """
    probe = make_cfg(0.5)
    if p == 0.0 and probe.phi2 == 0.0:
        xs = np.linspace(1e-4, 8.0, 4001)
        s1, s2 = np.sinh(probe.n1 * xs), np.sinh(probe.n2 * xs)
        target = math.sqrt(2.0 * probe.Ip)

        def dip(theta):
            cfg = make_cfg(theta)
            h = -cfg.a1 * s1 + cfg.a2 * s2
            i = int(np.argmin(h))
            return h[i] + target, xs[i]

        lo, hi = 1e-4, math.pi / 2 - 1e-4
        dlo, _ = dip(lo)
        dhi, _ = dip(hi)
        if dlo < 0.0 < dhi:
            for _ in range(50):
                mid = 0.5 * (lo + hi)
                dmid, xmid = dip(mid)
                if dmid < 0:
                    lo = mid
                else:
                    hi = mid
            return 0.5 * (lo + hi), 1j * xmid

    thetas = np.arctan(np.geomspace(0.02, 0.99, 49))
    best = (math.inf, None, None)
    for th in thetas:
        sads = find_saddles(make_cfg(float(th)), p, n_re=24, n_im=12)
        for i in range(len(sads)):
            for j in range(i + 1, len(sads)):
                d = abs(sads[i].wt - sads[j].wt)
                if d < best[0]:
                    best = (d, float(th), 0.5 * (sads[i].wt + sads[j].wt))
    if best[1] is None:
        raise CoalescenceError("no saddle pair found to seed the coalescence solve")
    return best[1], best[2]


def rstar_curve(
    gamma_list,
    Ip: float,
    intensity_au: float,
    *,
    phi2: float = 0.0,
    n1: int = 1,
    n2: int = 2,
) -> SweepTable:
    """Coalescence ratio R* over a list of Keldysh parameters.

    Each gamma is realised by varying omega at fixed Ip and intensity;
    gamma refers to the Keldysh parameter of the coalescing
    configuration itself (theta = theta*), the definition under which
    the long-wavelength asymptote R* ~ 1/(4 gamma) holds.  The
    equal-mixing value gamma_equal_mix = keldysh(theta=45 deg) and the
    single-colour kappa are tabulated alongside for cross reference.
    """
    E0 = math.sqrt(intensity_au)
    table = SweepTable(
        name="rstar_curve",
        columns=[
            "gamma", "kappa", "gamma_equal_mix", "omega_au",
            "theta_star_deg", "rstar",
            "asymptote_small_gamma", "asymptote_large_gamma",
        ],
        metadata={
            "Ip_au": Ip,
            "intensity_au": intensity_au,
            "n1": n1,
            "n2": n2,
            "phi2_rad": phi2,
            "gamma_definition": "keldysh parameter of the coalescing configuration",
        },
    )
    order = np.argsort(np.asarray(gamma_list, dtype=float))
    results = {}
    seed = None
    for idx in order:
        gamma = float(gamma_list[idx])
        omega_lo = omega_for_keldysh(gamma, E0, Ip, math.pi / 4, n1, n2, phi2)
        omega_hi = gamma * E0 / math.sqrt(2.0 * Ip)  # kappa == gamma
        omega_lo, omega_hi = min(omega_lo, omega_hi), max(omega_lo, omega_hi)
        omega_lo *= 0.98
        omega_hi *= 1.02

        def gap(omega_val):
            nonlocal seed
            cp = find_coalescence(E0, omega_val, Ip, phi2=phi2, n1=n1, n2=n2, seed=seed)
            seed = (cp.theta_star, cp.wt_star)
            return cp.gamma - gamma, cp

        lo, hi = omega_lo, omega_hi
        glo, cplo = gap(lo)
        ghi, cphi = gap(hi)
        if glo > 0 or ghi < 0:
            raise CoalescenceError(f"gamma={gamma} not bracketed by omega scan")
        cp = cplo if abs(glo) < abs(ghi) else cphi
        for _ in range(80):
            mid = 0.5 * (lo + hi)
            gm, cp = gap(mid)
            if abs(gm) < 1e-12 or hi - lo < 1e-14 * hi:
                break
            if gm > 0:
                hi = mid
            else:
                lo = mid
        results[int(idx)] = cp
    two_thirds_coeff = (135.0 / 32.0) ** (1.0 / 3.0)
    for i, gamma in enumerate(gamma_list):
        cp = results[i]
        gamma_eq = keldysh_gamma(
            FieldConfig(E0=E0, omega=cp.kappa * E0 / math.sqrt(2 * Ip),
                        theta=math.pi / 4, Ip=Ip, phi2=phi2, n1=n1, n2=n2)
        )
        table.append(
            cp.gamma, cp.kappa, gamma_eq,
            cp.kappa * E0 / math.sqrt(2.0 * Ip),
            math.degrees(cp.theta_star), cp.r_star,
            1.0 - two_thirds_coeff * cp.gamma ** 1.5,
            1.0 / (4.0 * cp.gamma),
        )
    return table
