"""Steepest-descent integration contour through the saddle landscape.

The ionisation integrand is written as P exp(i S(p, t)); its magnitude
|P| exp(-Im S) is 1 on the real axis, exponentially suppressed where
Im S is large and positive, and exponentially enhanced where Im S is
negative.  Saddles of S are mountain passes of the magnitude; constant
Re S curves through a saddle are its steepest descent/ascent lines (by
the Cauchy-Riemann relations they are exactly the gradient lines of
Im S).  The valid deformation of the real-axis window integral ascends
from each window endpoint into a suppressed region ("valley"), crosses
passes along their descent lines, and hops between valleys only deep
inside the suppressed set, where the integrand is below exp(-30).
Which saddles that chain crosses is precisely the contributing set of
the saddle-point sum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from .action import (
    action,
    action_first_derivative,
    action_second_derivative,
)
from .field import FieldConfig
from .saddles import SaddlePoint, WINDOW_LO, WINDOW_SPAN, find_saddles, label_saddles

#: integrand suppression (in units of e^-1) required of valley interiors
VALLEY_LEVEL = 30.0
#: extra suppression gained along a descent path before it may stop
FLOOR_GAIN = 30.0
#: omega*t distance at which a path is said to hit another saddle
SADDLE_PROXIMITY = 1e-4
#: omega*t distance below which a saddle pair makes the chain degenerate
DEGENERACY_GUARD = 0.05


class TraceError(RuntimeError):
    """Level-set tracing failed (projection loss or step explosion)."""

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class ContourTopologyError(RuntimeError):
    """No consistent chain could be assembled from the traced paths."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class DegenerateSaddleError(RuntimeError):
    """Saddle too close to second order for a quadratic treatment."""


@dataclass
class DescentPath:
    """One traced constant-Re-S curve leaving a saddle (or an endpoint)."""

    start_wt: complex
    phi: float
    points: np.ndarray  # complex omega*t polyline, starts at start_wt
    im_action: np.ndarray
    termination: str  # 'floor' | 'axis' | 'saddle' | 'lateral'
    hit_saddle: int | None = None
    valley: int | None = None


@dataclass
class ContourChain:
    """Ordered steepest-descent chain across the canonical window."""

    segments: list  # list of complex omega*t polylines, continuous
    endpoints: tuple
    saddles: list  # every SaddlePoint, with .contributes filled in
    contributing: list  # the chained subset, in traversal order
    exit_directions: dict  # saddle index -> traversal direction phi
    degenerate: bool
    diagnostics: dict = field(default_factory=dict)


def descent_directions(saddle: SaddlePoint | complex, cfg: FieldConfig, p: float):
    """The two antipodal steepest-descent directions at an order-1 saddle.

    Along t = t_s + eps e^{i phi} the integrand magnitude falls fastest
    when 2 phi + arg(S'') = pi/2 (mod 2 pi); the quadratic term in
    i S is then -|S''| eps^2 / 2.
    """
    wt = saddle.wt if isinstance(saddle, SaddlePoint) else complex(saddle)
    d2 = complex(action_second_derivative(cfg, p, wt / cfg.omega))
    if abs(d2) < 1e-9:
        raise DegenerateSaddleError(
            f"|S''| = {abs(d2):.2e} at wt = {wt:.6f}: saddle is (near) second order"
        )
    phi = 0.5 * (math.pi / 2.0 - math.atan2(d2.imag, d2.real))
    phi = math.remainder(phi, 2.0 * math.pi)
    other = math.remainder(phi + math.pi, 2.0 * math.pi)
    return (phi, other)


def _unit_descent(cfg: FieldConfig, p: float, wt: complex) -> complex:
    """Unit tangent of the constant-Re-S line with Im S increasing."""
    d1 = complex(action_first_derivative(cfg, p, wt / cfg.omega))
    a = abs(d1)
    if a == 0.0:
        return 0.0j
    return 1j * d1.conjugate() / a


def _project_level(cfg, p, wt, re_target, tol=1e-10, max_iter=4):
    """Newton-project wt back onto the Re S = re_target level set."""
    w = cfg.omega
    for _ in range(max_iter):
        s = complex(action(cfg, p, wt / w))
        miss = s.real - re_target
        if abs(miss) < tol:
            return wt, abs(miss)
        d1 = complex(action_first_derivative(cfg, p, wt / w)) / w
        a = abs(d1)
        if a < 1e-14:
            break
        wt = wt - (miss / a) * (d1.conjugate() / a)
    s = complex(action(cfg, p, wt / w))
    return wt, abs(s.real - re_target)


def trace_descent_path(
    cfg: FieldConfig,
    p: float,
    start_wt: complex,
    phi: float,
    *,
    other_saddles_wt=(),
    floor_im_action: float,
    seed_step: float = 1e-4,
    ds_min: float = 1e-3,
    ds_max: float = 1e-1,
    lateral_span: float = 3.0 * math.pi,
    max_steps: int = 40000,
    include_start: bool = True,
) -> DescentPath:
    """Follow the constant-Re-S curve from ``start_wt`` along ``phi``.

    The curve is the steepest-descent line of the integrand magnitude:
    Im S increases monotonically along it at rate |S'|.  Adaptive
    predictor (RK2 on the unit-tangent field) plus a Newton projection
    back onto the level set each step.  Terminates on reaching
    ``floor_im_action``, the real axis, another saddle (a Stokes
    connection) or the lateral span guard.
    """
    w = cfg.omega
    re_level = complex(action(cfg, p, start_wt / w)).real

    pts = [start_wt] if include_start else []
    ims = [complex(action(cfg, p, start_wt / w)).imag] if include_start else []
    wt = start_wt + seed_step * np.exp(1j * phi)
    wt, _ = _project_level(cfg, p, wt, re_level)
    termination, hit = None, None

    others = np.asarray(other_saddles_wt, dtype=complex)
    s_abs = max(1.0, abs(complex(action(cfg, p, start_wt / w))))
    for _ in range(max_steps):
        sval = complex(action(cfg, p, wt / w))
        pts.append(wt)
        ims.append(sval.imag)
        if abs(sval.real - re_level) > 1e-5 * s_abs:
            raise TraceError(
                f"level-set loss {abs(sval.real - re_level):.2e} at wt = {wt:.4f}",
                partial=np.asarray(pts),
            )
        if sval.imag >= floor_im_action:
            termination = "floor"
            break
        if wt.imag <= 0.0:
            termination = "axis"
            break
        if abs(wt.real - start_wt.real) > lateral_span:
            termination = "lateral"
            break
        if others.size:
            dist = np.abs(others - wt)
            j = int(np.argmin(dist))
            if dist[j] < SADDLE_PROXIMITY:
                termination = "saddle"
                hit = j
                break
            prox_cap = max(float(dist[j]) / 4.0, SADDLE_PROXIMITY / 2.0)
        else:
            prox_cap = ds_max
        d1 = complex(action_first_derivative(cfg, p, wt / w)) / w
        d2 = complex(action_second_derivative(cfg, p, wt / w)) / w**2
        a1 = abs(d1)
        if a1 < 1e-12:
            termination = "saddle"
            hit = None
            break
        ds = 0.5 * a1 / max(abs(d2), 1e-12)
        ds = min(ds, 2.0 / a1, ds_max)
        # the proximity cap must win over the step floor, or the tracer
        # orbits a nearby fixed point instead of converging onto it
        ds = min(max(ds, ds_min), prox_cap)
        k1 = _unit_descent(cfg, p, wt)
        k2 = _unit_descent(cfg, p, wt + 0.5 * ds * k1)
        if k2 == 0.0j:
            k2 = k1
        wt_new = wt + ds * k2
        wt_new, _ = _project_level(cfg, p, wt_new, re_level)
        # the projected step must still make progress upward in Im S
        wt = wt_new
    else:
        raise TraceError("descent trace exceeded the step budget",
                         partial=np.asarray(pts))
    if termination == "axis" and pts:
        wt_last = pts[-1]
        pts[-1] = complex(wt_last.real, 0.0)
    return DescentPath(
        start_wt=start_wt,
        phi=phi,
        points=np.asarray(pts, dtype=complex),
        im_action=np.asarray(ims, dtype=float),
        termination=termination,
        hit_saddle=hit,
    )


def landscape_grid(
    cfg: FieldConfig,
    p: float,
    *,
    re_range=(WINDOW_LO, WINDOW_LO + WINDOW_SPAN),
    im_range=(0.0, 3.0),
    n_re: int = 600,
    n_im: int = 300,
):
    """Action on a regular omega*t grid: (re, im, S[n_im, n_re])."""
    re = np.linspace(re_range[0], re_range[1], n_re)
    im = np.linspace(im_range[0], im_range[1], n_im)
    wt = re[None, :] + 1j * im[:, None]
    with np.errstate(over="ignore", invalid="ignore"):
        s = action(cfg, p, wt / cfg.omega)
    return re, im, s


class _ValleyMap:
    """Connected components of the suppressed region Im S >= level."""

    def __init__(self, cfg, p, level, re_lo, re_hi, im_hi, n_re, n_im):
        self.re, self.im, s = landscape_grid(
            cfg, p, re_range=(re_lo, re_hi), im_range=(0.0, im_hi),
            n_re=n_re, n_im=n_im,
        )
        with np.errstate(invalid="ignore"):
            mask = np.nan_to_num(s.imag, nan=-np.inf) >= level
        self.labels, self.count = ndimage.label(mask, structure=np.ones((3, 3), int))
        self.dre = self.re[1] - self.re[0]
        self.dim = self.im[1] - self.im[0]

    def component(self, wt: complex) -> int | None:
        i = int(round((wt.imag - self.im[0]) / self.dim))
        j = int(round((wt.real - self.re[0]) / self.dre))
        ni, nj = self.labels.shape
        for radius in range(0, 4):
            for di in range(-radius, radius + 1):
                for dj in range(-radius, radius + 1):
                    if max(abs(di), abs(dj)) != radius:
                        continue
                    ii, jj = i + di, j + dj
                    if 0 <= ii < ni and 0 <= jj < nj and self.labels[ii, jj]:
                        return int(self.labels[ii, jj])
        return None

    def cell_center(self, ij) -> complex:
        return self.re[ij[1]] + 1j * self.im[ij[0]]

    def connect(self, a: complex, b: complex, comp: int) -> np.ndarray:
        """Polyline from a to b staying inside component ``comp``."""
        line = a + (b - a) * np.linspace(0.0, 1.0, 64)
        ii = np.clip(np.round((line.imag - self.im[0]) / self.dim).astype(int), 0,
                     self.labels.shape[0] - 1)
        jj = np.clip(np.round((line.real - self.re[0]) / self.dre).astype(int), 0,
                     self.labels.shape[1] - 1)
        if np.all(self.labels[ii, jj] == comp):
            return np.asarray([a, b], dtype=complex)
        # BFS on the component's cells (8-neighbourhood)
        start = (int(ii[0]), int(jj[0]))
        goal = (int(ii[-1]), int(jj[-1]))
        from collections import deque

        prev = {start: None}
        queue = deque([start])
        while queue:
            cur = queue.popleft()
            if cur == goal:
                break
            ci, cj = cur
            for di in (-1, 0, 1):
                for dj in (-1, 0, 1):
                    nxt = (ci + di, cj + dj)
                    if nxt in prev:
                        continue
                    if not (0 <= nxt[0] < self.labels.shape[0]
                            and 0 <= nxt[1] < self.labels.shape[1]):
                        continue
                    if self.labels[nxt] != comp:
                        continue
                    prev[nxt] = cur
                    queue.append(nxt)
        if goal not in prev:
            raise ContourTopologyError(
                "valley connector could not be routed", {"from": a, "to": b})
        cells = []
        cur = goal
        while cur is not None:
            cells.append(cur)
            cur = prev[cur]
        cells.reverse()
        mids = [self.cell_center(c) for c in cells]
        return np.asarray([a] + mids + [b], dtype=complex)


def _trace_endpoint(cfg, p, wt0, saddles_wt, floor_abs):
    """Ascend from a real-axis window endpoint into the suppressed set."""
    return trace_descent_path(
        cfg, p, complex(wt0), math.pi / 2.0,
        other_saddles_wt=saddles_wt,
        floor_im_action=floor_abs,
        seed_step=1e-9,
        include_start=True,
    )


def build_contour(
    cfg: FieldConfig,
    p: float,
    *,
    im_cap: float = 3.0,
    grid_n_re: int = 720,
    grid_n_im: int = 300,
    saddle_kwargs: dict | None = None,
    saddles: list[SaddlePoint] | None = None,
) -> ContourChain:
    """Assemble the valid integration chain across the canonical window.

    Builds the valley graph (valleys as nodes, saddles as edges through
    their two descent legs), walks it from the left window endpoint's
    valley to the right one's, and marks exactly the walked saddles as
    contributing.  The chain starts and ends on the real axis at the
    window boundaries, so its integral equals the real-axis window
    integral of the same integrand.
    """
    w = cfg.omega
    if saddles is None:
        saddles = find_saddles(cfg, p, im_cap=im_cap, **(saddle_kwargs or {}))
        label_saddles(cfg, saddles)
    if not saddles:
        raise ContourTopologyError("no saddle points found", {"saddles": []})
    sep = math.inf
    for i in range(len(saddles)):
        for j in range(i + 1, len(saddles)):
            sep = min(sep, abs(saddles[i].wt - saddles[j].wt))
    degenerate = sep < DEGENERACY_GUARD

    # periodic copies so Stokes connections and window-edge saddles resolve
    copies_wt, copies_key = [], []
    for k in (-1, 0, 1):
        for idx, s in enumerate(saddles):
            copies_wt.append(s.wt + k * WINDOW_SPAN)
            copies_key.append((idx, k))
    copies_wt = np.asarray(copies_wt, dtype=complex)

    im_levels = [complex(action(cfg, p, s.wt / w)).imag for s in saddles]

    legs: dict[int, list[DescentPath | None]] = {}
    for idx, s in enumerate(saddles):
        if im_levels[idx] < -10.0:
            # deeply submerged pass: its barrier dwarfs every admissible
            # alternative, so it can never win a place on the chain
            legs[idx] = [None, None]
            continue
        try:
            phis = descent_directions(s, cfg, p)
        except DegenerateSaddleError:
            legs[idx] = [None, None]
            continue
        floor = max(im_levels[idx] + FLOOR_GAIN, VALLEY_LEVEL + 3.0)
        pair = []
        others = copies_wt[np.abs(copies_wt - s.wt) > 1e-12]
        for phi in phis:
            try:
                pair.append(
                    trace_descent_path(
                        cfg, p, s.wt, phi,
                        other_saddles_wt=others,
                        floor_im_action=floor,
                    )
                )
            except TraceError:
                pair.append(None)
        legs[idx] = pair

    end_floor = VALLEY_LEVEL + 5.0
    end_left = _trace_endpoint(cfg, p, WINDOW_LO, copies_wt, end_floor)
    end_right = _trace_endpoint(cfg, p, WINDOW_LO + WINDOW_SPAN, copies_wt, end_floor)

    strip_lo = WINDOW_LO - 1.5 * math.pi
    strip_hi = WINDOW_LO + WINDOW_SPAN + 1.5 * math.pi
    top = 3.2
    for pair in legs.values():
        for leg in pair:
            if leg is not None and leg.termination == "floor":
                top = max(top, float(leg.points[-1].imag))
    for end in (end_left, end_right):
        top = max(top, float(end.points[-1].imag))
    vmap = _ValleyMap(cfg, p, VALLEY_LEVEL, strip_lo, strip_hi, top + 1.2,
                      grid_n_re, grid_n_im)

    def copy_node(flat_index: int, extra_shift: int):
        idx, k = copies_key[flat_index]
        shift = k + extra_shift
        return ("saddle", idx, shift) if abs(shift) <= 1 else None

    def terminal_node(path: DescentPath | None, shift: int):
        """Graph node reached by a leg translated by ``shift`` periods."""
        if path is None:
            return None
        if path.termination == "floor":
            comp = vmap.component(path.points[-1] + shift * WINDOW_SPAN)
            return ("valley", comp) if comp is not None else None
        if path.termination == "saddle" and path.hit_saddle is not None:
            return copy_node(path.hit_saddle, shift)
        return None

    nl = terminal_node(end_left, 0)
    nr = terminal_node(end_right, 0)
    diagnostics = {
        "end_left": nl,
        "end_right": nr,
        "valley_count": vmap.count,
        "im_action_at_saddles": dict(enumerate(im_levels)),
        "legs": {
            (idx, li): (leg.termination if leg is not None else "failed")
            for idx, pair in legs.items() for li, leg in enumerate(pair)
        },
    }
    if nl is None or nr is None:
        raise ContourTopologyError("window endpoint failed to reach a valley",
                                   diagnostics)

    from collections import deque

    def walk(admitted):
        """Breadth-first chain between the endpoint nodes, if one exists."""
        edges: dict[object, list] = {}

        def add_edge(a, b, via):
            edges.setdefault(a, []).append((b, via))
            edges.setdefault(b, []).append((a, via))

        for shift in (-1, 0, 1):
            for idx in admitted:
                for li, leg in enumerate(legs[idx]):
                    node = terminal_node(leg, shift)
                    if node is not None:
                        add_edge(("saddle", idx, shift), node, (idx, li, shift))
        prev: dict[object, object] = {nl: None}
        via_edge: dict[object, tuple] = {}
        queue = deque([nl])
        while queue:
            cur = queue.popleft()
            if cur == nr:
                break
            for nxt, via in sorted(edges.get(cur, ()), key=str):
                if nxt in prev:
                    continue
                prev[nxt] = cur
                via_edge[nxt] = via
                queue.append(nxt)
        if nr not in prev:
            return None, None
        path = []
        cur = nr
        while cur is not None:
            path.append(cur)
            cur = prev[cur]
        path.reverse()
        return path, via_edge

    # minimax pass admission: a valid deformation slides downhill off the
    # ridges, so it crosses between valleys at the least-suppressed passes
    # available (largest Im S first); saddles are admitted in that order
    # until the endpoints connect, and later (costlier) passes never enter
    admitted: set[int] = set()
    for node in (nl, nr):
        if node[0] == "saddle":
            admitted.add(node[1])
    node_path, via_edge = walk(admitted) if admitted else (None, None)
    for idx in sorted(legs, key=lambda i: (-im_levels[i], i)):
        if node_path is not None:
            break
        if idx in admitted:
            continue
        admitted.add(idx)
        node_path, via_edge = walk(admitted)
    if node_path is None:
        raise ContourTopologyError("no chain connects the window endpoints",
                                   diagnostics)
    diagnostics["node_path"] = list(node_path)

    # assemble ordered, continuous segments along the walk
    segments: list[np.ndarray] = []
    contributing_idx: list[int] = []
    exit_directions: dict[int, float] = {}

    def append_seg(pts):
        pts = np.asarray(pts, dtype=complex)
        if len(pts) < 2:
            return
        if segments and abs(segments[-1][-1] - pts[0]) > 1e-12:
            segments.append(np.asarray([segments[-1][-1], pts[0]]))
        segments.append(pts)

    append_seg(end_left.points)
    arrival = end_left.points[-1]
    if nl[0] == "saddle":
        arrival_exact = saddles[nl[1]].wt + nl[2] * WINDOW_SPAN
        append_seg([arrival, arrival_exact])
        arrival = arrival_exact
        if nl[1] not in contributing_idx:
            contributing_idx.append(nl[1])

    for i in range(1, len(node_path)):
        node = node_path[i]
        sidx, li, shift = via_edge[node]
        leg_pts = legs[sidx][li].points + shift * WINDOW_SPAN
        if node[0] == "saddle":
            # valley -> saddle: join within the valley, then descend the leg
            if node_path[i - 1][0] == "valley":
                append_seg(vmap.connect(arrival, leg_pts[-1], node_path[i - 1][1]))
            else:
                append_seg([arrival, leg_pts[-1]])
            append_seg(leg_pts[::-1])
            arrival = leg_pts[0]
            if sidx not in contributing_idx:
                contributing_idx.append(sidx)
        else:
            # saddle -> valley: climb the leg away from the saddle
            append_seg([arrival, leg_pts[0]])
            append_seg(leg_pts)
            arrival = leg_pts[-1]
            exit_directions.setdefault(sidx, legs[sidx][li].phi)

    if node_path[-1][0] == "valley":
        append_seg(vmap.connect(arrival, end_right.points[-1], node_path[-1][1]))
    else:
        append_seg([arrival, end_right.points[-1]])
    append_seg(end_right.points[::-1])

    for idx, s in enumerate(saddles):
        s.contributes = idx in contributing_idx
        s.degenerate = s.degenerate or degenerate
    contributing = [saddles[i] for i in contributing_idx]

    return ContourChain(
        segments=segments,
        endpoints=(complex(WINDOW_LO), complex(WINDOW_LO + WINDOW_SPAN)),
        saddles=saddles,
        contributing=contributing,
        exit_directions=exit_directions,
        degenerate=degenerate,
        diagnostics=diagnostics,
    )


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(16)


def _gl_chord(f, a: complex, b: complex) -> complex:
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    return half * np.sum(_GL_WEIGHTS * f(mid + half * _GL_NODES))


def _adaptive_chord(f, a, b, tol, depth=0) -> complex:
    whole = _gl_chord(f, a, b)
    mid = 0.5 * (a + b)
    split = _gl_chord(f, a, mid) + _gl_chord(f, mid, b)
    if abs(split - whole) <= tol or depth >= 24:
        return split
    return (_adaptive_chord(f, a, mid, 0.5 * tol, depth + 1)
            + _adaptive_chord(f, mid, b, 0.5 * tol, depth + 1))


def contour_quadrature(chain: ContourChain, cfg: FieldConfig, p: float,
                       rel_tol: float = 1e-9) -> complex:
    """Integrate the ionisation integrand along the chain.

    Composite 16-point Gauss panels per polyline chord with adaptive
    splitting.  The integrand is entire, so the result must equal the
    real-axis quadrature across the same window; valley chords carry
    integrand magnitudes below exp(-30) and are numerically irrelevant
    but are kept for continuity.
    """
    from .amplitude import prefactor

    w = cfg.omega
    pref = prefactor(0.0, cfg.Ip)

    def f(wt):
        with np.errstate(over="ignore", invalid="ignore"):
            val = pref * np.exp(1j * action(cfg, p, wt / w)) / w
        return np.nan_to_num(val, nan=0.0, posinf=0.0, neginf=0.0)

    rough = 0.0j
    chords = []
    for seg in chain.segments:
        for a, b in zip(seg[:-1], seg[1:]):
            if a != b:
                chords.append((a, b))
                rough += _gl_chord(f, a, b)
    scale = max(abs(rough), 1e-12)
    tol = rel_tol * scale / max(len(chords), 1)
    total = 0.0j
    for a, b in chords:
        total += _adaptive_chord(f, a, b, tol)
    return complex(total)
