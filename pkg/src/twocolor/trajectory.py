"""Semi-classical electron displacement after a tunnelling event.

x(t) = int_{t_s}^{t} (p + A(t')) dt' along the two-legged contour that
runs from the complex ionisation time straight down to the real axis and
onwards along it.  The antiderivative of A is elementary and entire, so
both legs evaluate in closed form and the result is path independent;
the physical coordinate is Re x on the real-time leg, and the tunnel
exit is x_exit = Re x(Re t_s).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .field import FieldConfig, vector_potential_integral
from .saddles import SaddlePoint, find_saddles, label_saddles
from .sweeps import ContinuationError, continue_saddles


@dataclass
class TrajectoryRecord:
    """Displacement history of one orbit at one drift momentum."""

    label: str
    p: float
    t_saddle: complex
    t_grid: np.ndarray  # real times, from Re(t_s) to t_end
    x: np.ndarray  # complex displacement on the real-time leg
    x_exit: float
    truncated: bool = False


def displacement(cfg: FieldConfig, p: float, t_saddle: complex, t):
    """Closed-form x(t) with x(t_saddle) = 0; valid for complex t."""
    return (
        p * (t - t_saddle)
        + vector_potential_integral(cfg, t)
        - vector_potential_integral(cfg, t_saddle)
    )


def trajectory(
    saddle: SaddlePoint,
    cfg: FieldConfig,
    p: float,
    t_end: float | None = None,
    n_samples: int = 1024,
) -> TrajectoryRecord:
    """Trajectory record for one ionisation event.

    The grid spans the real-time leg, from the tunnel exit time Re(t_s)
    to ``t_end`` (default two field periods later, enough to show the
    revisits of the core near one fundamental cycle).
    """
    t0 = saddle.t.real
    if t_end is None:
        t_end = t0 + 2.0 * cfg.period
    t_grid = np.linspace(t0, t_end, n_samples)
    x = displacement(cfg, p, saddle.t, t_grid)
    return TrajectoryRecord(
        label=saddle.label,
        p=p,
        t_saddle=saddle.t,
        t_grid=t_grid,
        x=x,
        x_exit=float(x[0].real),
    )


def trajectory_band(
    cfg: FieldConfig,
    label: str,
    p_values,
    t_end: float | None = None,
    n_samples: int = 1024,
) -> list[TrajectoryRecord]:
    """Trajectories of one labelled orbit over a small momentum band.

    The labelled saddle is continued in p from the p = 0 solution; if
    continuation breaks inside the band the affected records are marked
    truncated and carry no samples.
    """
    base = label_saddles(cfg, find_saddles(cfg, 0.0))
    matches = [s for s in base if s.label == label]
    if not matches:
        raise ValueError(f"no orbit labelled {label!r} for this configuration")

    p_values = np.asarray(p_values, dtype=float)
    order = np.argsort(np.abs(p_values), kind="stable")
    records: dict[int, TrajectoryRecord] = {}
    for sign in (+1, -1):
        tracks = [matches[0]]
        p_prev = 0.0
        for i in order:
            pv = float(p_values[i])
            if (pv > 0) != (sign > 0) and pv != 0.0:
                continue
            if i in records:
                continue
            try:
                tracks = continue_saddles(cfg, p_prev, tracks, cfg, pv)
            except ContinuationError:
                records[i] = TrajectoryRecord(
                    label=label, p=pv, t_saddle=math.nan * 1j,
                    t_grid=np.empty(0), x=np.empty(0, dtype=complex),
                    x_exit=math.nan, truncated=True,
                )
                continue
            p_prev = pv
            records[i] = trajectory(tracks[0], cfg, pv, t_end=t_end,
                                    n_samples=n_samples)
    return [records[i] for i in range(len(p_values))]
