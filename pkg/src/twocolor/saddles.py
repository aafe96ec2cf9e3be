"""Saddle points of the semi-classical action: S'(p, t_s) = 0.

Each upper-half-plane solution is a discrete ionisation event.  Solutions
satisfy p + A(t_s) = +/- i sqrt(2 Ip) (the "branch" sign); Re(w t_s) is
reduced to the canonical window [-pi/2, 3 pi/2), chosen so the event
labels A-D line up with the pure-second-colour ordering.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dataclass_field

import numpy as np

from .action import action_first_derivative, action_second_derivative
from .field import FieldConfig, vector_potential

LABELS = ("A", "B", "C", "D")

WINDOW_LO = -math.pi / 2.0
WINDOW_SPAN = 2.0 * math.pi

#: Re(w t) values within this distance of the window's right edge snap to
#: the left edge, keeping roots that sit exactly on the boundary stable.
WINDOW_SNAP = 1e-9

SADDLE_TOLERANCE = 1e-10  # |S'(t_s)| in a.u.


@dataclass
class SaddlePoint:
    """One complex ionisation time with diagnostics.

    ``t`` is the saddle time in a.u., ``wt`` the dimensionless omega*t
    reduced to the canonical window.  ``order`` is 2 only at an exact
    coalescence.  ``contributes`` stays None until a contour decides it.
    """

    t: complex
    wt: complex
    branch: str
    residual: float
    label: str = "unassigned"
    order: int = 1
    contributes: bool | None = None
    degenerate: bool = dataclass_field(default=False)

    def shifted(self, periods: int, cfg: FieldConfig) -> "SaddlePoint":
        """Translate by an integer number of field periods."""
        dwt = periods * WINDOW_SPAN
        return SaddlePoint(
            t=self.t + dwt / cfg.omega,
            wt=self.wt + dwt,
            branch=self.branch,
            residual=self.residual,
            label=self.label,
            order=self.order,
            contributes=self.contributes,
            degenerate=self.degenerate,
        )


def canonical_wt(wt):
    """Reduce Re(wt) to [-pi/2, 3 pi/2), with a snap at the right edge."""
    wt = np.asarray(wt, dtype=complex)
    re = np.real(wt)
    red = np.mod(re - WINDOW_LO, WINDOW_SPAN) + WINDOW_LO
    red = np.where(WINDOW_LO + WINDOW_SPAN - red < WINDOW_SNAP, WINDOW_LO, red)
    out = red + 1j * np.imag(wt)
    return out if out.ndim else complex(out)


def _newton_batch(cfg: FieldConfig, p: float, seeds_wt, max_iter=80, max_halvings=20,
                  step_tol=1e-12):
    """Damped Newton on S' for a batch of omega*t seeds.

    Steps are halved (up to ``max_halvings``) whenever |S'| would grow.
    Seeds wandering out of the upper-half strip are abandoned early.
    Returns the converged omega*t values (unfiltered).
    """
    w = cfg.omega
    z = np.asarray(seeds_wt, dtype=complex).ravel().copy()
    active = np.ones(z.shape, dtype=bool)
    with np.errstate(over="ignore", invalid="ignore"):
        f = action_first_derivative(cfg, p, z / w)
        for _ in range(max_iter):
            if not active.any():
                break
            za = z[active]
            fa = f[active]
            d2 = action_second_derivative(cfg, p, za / w)
            d2 = np.where(np.abs(d2) < 1e-300, 1e-300, d2)
            step = -w * fa / d2
            lam = np.ones(step.shape)
            trial = za + step
            ftrial = action_first_derivative(cfg, p, trial / w)
            for _h in range(max_halvings):
                worse = (np.abs(ftrial) > np.abs(fa)) & (np.abs(step) * lam > step_tol)
                if not worse.any():
                    break
                wi = np.flatnonzero(worse)
                lam[wi] *= 0.5
                trial[wi] = za[wi] + lam[wi] * step[wi]
                ftrial[wi] = action_first_derivative(cfg, p, trial[wi] / w)
            z[active] = trial
            f[active] = ftrial
            moved = np.abs(lam * step)
            idx = np.flatnonzero(active)
            active[idx[moved < step_tol]] = False
            # runaway guards: drop seeds that left the relevant strip
            za = z[idx]
            out = (
                (za.imag > 12.0)
                | (za.imag < -1e-3)
                | (np.abs(za.real) > 6.0 * math.pi)
                | ~np.isfinite(za)
                | ~np.isfinite(f[idx])
            )
            active[idx[out]] = False
    keep = (
        np.isfinite(z)
        & (z.imag > -1e-6)
        & (z.imag < 12.5)
        & (np.abs(z.real) < 6.5 * math.pi)
    )
    return z[keep]


def find_saddles(
    cfg: FieldConfig,
    p: float,
    *,
    n_re: int = 48,
    n_im: int = 24,
    im_cap: float = 3.0,
    tol: float = SADDLE_TOLERANCE,
    dedupe: float = 1e-8,
    extra_seeds=None,
) -> list[SaddlePoint]:
    """All saddle points in the canonical window with 0 < Im(wt) < im_cap.

    Damped Newton iteration on S' from a uniform n_re x n_im grid of
    starting points (plus any ``extra_seeds`` in omega*t); duplicates
    within ``dedupe`` (periodic in Re) are merged keeping the
    lower-residual root.  Roots above im_cap are dropped: their
    contributions are exponentially negligible.
    """
    if cfg.E0 == 0.0:
        return []
    re = WINDOW_LO + WINDOW_SPAN * (np.arange(n_re) + 0.5) / n_re
    im = im_cap * (np.arange(n_im) + 0.5) / n_im
    seeds = (re[:, None] + 1j * im[None, :]).ravel()
    if extra_seeds is not None:
        seeds = np.concatenate([seeds, np.asarray(extra_seeds, dtype=complex).ravel()])
    roots = _newton_batch(cfg, p, seeds)

    w = cfg.omega
    res = np.abs(action_first_derivative(cfg, p, roots / w))
    keep = (res < tol) & (roots.imag > 1e-9) & (roots.imag < im_cap)
    roots = canonical_wt(roots[keep])
    res = res[keep]
    if roots.size == 0:
        return []

    order = np.lexsort((roots.imag, roots.real))
    roots, res = roots[order], res[order]
    saddles: list[SaddlePoint] = []
    for z, r in zip(roots, res):
        dup = None
        for s in saddles:
            dre = abs(z.real - s.wt.real)
            dre = min(dre, WINDOW_SPAN - dre)
            if math.hypot(dre, z.imag - s.wt.imag) < dedupe:
                dup = s
                break
        if dup is not None:
            if r < dup.residual:
                dup.wt = complex(z)
                dup.t = complex(z) / w
                dup.residual = float(r)
            continue
        k = p + vector_potential(cfg, z / w)
        d2 = abs(action_second_derivative(cfg, p, z / w))
        saddles.append(
            SaddlePoint(
                t=complex(z) / w,
                wt=complex(z),
                branch="plus" if k.imag > 0 else "minus",
                residual=float(r),
                order=2 if d2 < 1e-9 else 1,
                degenerate=bool(d2 < 1e-9),
            )
        )
    saddles.sort(key=lambda s: (s.wt.real, s.wt.imag))
    return saddles


def analytic_saddles_monochromatic(
    E: float,
    omega: float,
    Ip: float,
    p: float,
    *,
    window_omega: float | None = None,
    im_cap: float = 3.0,
) -> list[complex]:
    """Closed-form saddles for a single-colour field E cos(omega t).

    Inverts sin(omega t_s) = (p -/+ i sqrt(2 Ip)) omega / E over both
    branch signs and all periods whose Re(window_omega * t) falls in the
    canonical window.  ``window_omega`` (default omega) sets the window
    frequency, so the pure-second-colour limit of a two-colour scan can
    be checked in the fundamental's window.  The signed amplitude E fixes
    the carrier phase (E < 0 for a -cos field).

    Returns saddle times t_s (a.u.) sorted by canonical Re(w t).
    """
    if E == 0.0:
        return []
    ww = omega if window_omega is None else window_omega
    sq = math.sqrt(2.0 * Ip)
    out: list[complex] = []
    kmax = int(math.ceil(omega / ww)) + 2
    for sign in (+1.0, -1.0):
        z = (p - 1j * sign * sq) * omega / E
        u0 = complex(np.arcsin(z))
        for base in (u0, math.pi - u0):
            for k in range(-kmax, kmax + 1):
                u = base + 2.0 * math.pi * k
                if u.imag <= 1e-12:
                    continue
                t = u / omega
                wt = canonical_wt(ww * t)
                if wt.imag >= im_cap:
                    continue
                t = wt / ww
                if all(abs(ww * t - ww * s) > 1e-9 for s in out):
                    out.append(complex(t))
    out.sort(key=lambda t: ((ww * t).real, (ww * t).imag))
    return out


def _on_axis(wt: complex, re0: float, tol: float = 1e-6) -> bool:
    return abs(wt.real - re0) < tol


def label_saddles(cfg: FieldConfig, saddles: list[SaddlePoint]) -> list[SaddlePoint]:
    """Assign A-D labels from the saddle geometry at p = 0, phi2 = 0.

    For the (n1, n2) = (1, 2) switchover the labels are anchored at the
    pure-second-colour end (A, B, C, D by increasing Re(wt) from -pi/2)
    and follow the events continuously backwards in theta, which reduces
    to branch bookkeeping:

    * D is the lone saddle on the Re(wt) = pi axis (plus branch);
    * B is the plus-branch saddle on the Re(wt) = 0 axis, at any theta;
    * A and C are the minus-branch pair: below the coalescence both sit
      on the Re(wt) = 0 axis (A lower), above it they flank B (A left).
    """
    if (cfg.n1, cfg.n2) != (1, 2) or cfg.phi2 != 0.0:
        return saddles
    axis0 = [s for s in saddles if _on_axis(s.wt, 0.0)]
    axispi = [s for s in saddles if _on_axis(s.wt, math.pi)]
    off = [s for s in saddles if s not in axis0 and s not in axispi]
    if len(axispi) == 1 and axispi[0].branch == "plus":
        axispi[0].label = "D"
    for s in axis0:
        if s.branch == "plus":
            s.label = "B"
    dip = sorted((s for s in axis0 if s.branch == "minus"), key=lambda s: s.wt.imag)
    if len(dip) == 2:
        dip[0].label, dip[1].label = "A", "C"
    elif len(dip) == 1:
        # either C escaped above the followed strip, or an exact fold
        dip[0].label = "A"
    else:
        off = sorted((s for s in off if s.branch == "minus"), key=lambda s: s.wt.real)
        if len(off) == 2:
            off[0].label, off[1].label = "A", "C"
    return saddles
