"""Command-line front end: reproducible analyses writing CSV/JSON tables.

Every command takes the physical scenario in laboratory or atomic units
(exactly one of each pair), writes '#'-commented metadata headers into
its output files and contains no clock or randomness, so identical
invocations give byte-identical artifacts.

Exit codes: 0 success, 2 usage error, 3 numerical failure (with a
diagnostic JSON file in the output directory).
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__, units
from .amplitude import spectrum, yield_vs_gamma
from .contour import ContourTopologyError, TraceError, build_contour, landscape_grid
from .field import FieldConfig, FieldConfigError, keldysh_gamma
from .saddles import canonical_wt, find_saddles, label_saddles
from .sweeps import CoalescenceError, ContinuationError, find_coalescence, rstar_curve, track_saddles
from .tables import SweepTable
from .trajectory import trajectory_band

NUMERICAL_ERRORS = (
    CoalescenceError,
    ContinuationError,
    ContourTopologyError,
    TraceError,
    ValueError,
)


@dataclass
class RunConfig:
    """Validated scenario + grid controls for one CLI invocation."""

    intensity_au: float
    omega_au: float
    theta_deg: float
    phi2_rad: float
    n1: int
    n2: int
    ip_au: float
    p_min: float
    p_max: float
    p_count: int
    gamma_list: list[float]
    theta_list: list[float] | None
    grid_res: tuple[int, int]
    exclude_orbits: tuple[str, ...]
    out: Path
    fmt: str
    deterministic: bool = True  # no clocks, no randomness: always on

    def field_config(self, theta_deg: float | None = None) -> FieldConfig:
        th = self.theta_deg if theta_deg is None else theta_deg
        return FieldConfig(
            E0=math.sqrt(self.intensity_au),
            omega=self.omega_au,
            theta=math.radians(th),
            Ip=self.ip_au,
            phi2=self.phi2_rad,
            n1=self.n1,
            n2=self.n2,
        )

    def metadata(self) -> dict:
        return {
            "version": __version__,
            "intensity_au": self.intensity_au,
            "intensity_wcm2": units.intensity_au_to_wcm2(self.intensity_au),
            "omega_au": self.omega_au,
            "theta_deg": self.theta_deg,
            "phi2_rad": self.phi2_rad,
            "n1": self.n1,
            "n2": self.n2,
            "ip_au": self.ip_au,
            "saddle_tolerance_au": 1e-10,
            "im_cap_wt": 3.0,
            "deterministic": True,
        }

    def p_grid(self) -> np.ndarray:
        return np.linspace(self.p_min, self.p_max, self.p_count)


def _parse_floats(text: str) -> list[float]:
    return [float(tok) for tok in text.split(",") if tok.strip()]


def _build_parser() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    g = shared.add_argument_group("scenario")
    g.add_argument("--intensity-wcm2", type=float, help="total intensity in W/cm^2")
    g.add_argument("--intensity-au", type=float, help="total intensity in a.u.")
    g.add_argument("--wavelength-nm", type=float, help="fundamental wavelength in nm")
    g.add_argument("--omega-au", type=float, help="fundamental frequency in a.u.")
    g.add_argument("--theta-deg", type=float, default=45.0, help="mixing angle in degrees")
    g.add_argument("--phi2-rad", type=float, default=0.0, help="second-colour phase")
    g.add_argument("--orders", default="1,2", help="harmonic orders n1,n2")
    g.add_argument("--ip-au", type=float, help="ionisation potential in a.u.")
    g.add_argument("--ip-ev", type=float, help="ionisation potential in eV")
    h = shared.add_argument_group("grids and output")
    h.add_argument("--p-min", type=float, default=-2.0)
    h.add_argument("--p-max", type=float, default=2.0)
    h.add_argument("--p-count", type=int, default=801)
    h.add_argument("--gamma-list", default=None, help="comma-separated Keldysh values")
    h.add_argument("--theta-list", default=None, help="comma-separated angles in degrees")
    h.add_argument("--grid-res", default="600x300", help="landscape resolution, e.g. 600x300")
    h.add_argument("--exclude-orbit", action="append", default=[], metavar="LABEL",
                   help="drop a labelled orbit from saddle-point sums")
    h.add_argument("--format", dest="fmt", choices=("csv", "json"), default="csv")
    h.add_argument("--out", default="twocolor_out", help="output directory")

    parser = argparse.ArgumentParser(
        prog="twocolor",
        description="Saddle-point analysis of two-colour strong-field ionisation",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("landscape", parents=[shared],
                   help="action landscape, saddles and contour for one field")
    sub.add_parser("switchover", parents=[shared],
                   help="mixing-angle sweep with tracked saddles and contributing flags")
    sub.add_parser("spectrum", parents=[shared],
                   help="orbit-resolved photoelectron spectrum over a momentum grid")
    sub.add_parser("yields", parents=[shared],
                   help="per-orbit integrated yields over a Keldysh-parameter list")
    sub.add_parser("rstar", parents=[shared],
                   help="coalescence amplitude-ratio curve over Keldysh parameters")
    sub.add_parser("trajectories", parents=[shared],
                   help="semi-classical trajectories for every labelled orbit")
    return parser


def _run_config(parser: argparse.ArgumentParser, args: argparse.Namespace) -> RunConfig:
    if (args.intensity_wcm2 is None) and (args.intensity_au is None):
        args.intensity_wcm2 = 4e14
    if (args.intensity_wcm2 is not None) and (args.intensity_au is not None):
        parser.error("give exactly one of --intensity-wcm2 / --intensity-au")
    if (args.wavelength_nm is None) and (args.omega_au is None):
        args.wavelength_nm = 800.0
    if (args.wavelength_nm is not None) and (args.omega_au is not None):
        parser.error("give exactly one of --wavelength-nm / --omega-au")
    if (args.ip_au is None) and (args.ip_ev is None):
        args.ip_au = 0.5
    if (args.ip_au is not None) and (args.ip_ev is not None):
        parser.error("give exactly one of --ip-au / --ip-ev")

    intensity = (args.intensity_au if args.intensity_au is not None
                 else units.intensity_wcm2_to_au(args.intensity_wcm2))
    omega = (args.omega_au if args.omega_au is not None
             else units.wavelength_nm_to_omega_au(args.wavelength_nm))
    ip = args.ip_au if args.ip_au is not None else units.energy_ev_to_au(args.ip_ev)
    try:
        n1, n2 = (int(tok) for tok in args.orders.split(","))
    except ValueError:
        parser.error("--orders must look like '1,2'")
    for name, value in (("intensity", intensity), ("omega", omega), ("Ip", ip)):
        if not value > 0:
            parser.error(f"{name} must be positive")
    if not 0.0 <= args.theta_deg <= 90.0:
        parser.error("--theta-deg must lie in [0, 90]")
    if args.p_count < 2 or args.p_min >= args.p_max:
        parser.error("momentum grid needs p_min < p_max and p_count >= 2")
    try:
        res = tuple(int(tok) for tok in args.grid_res.replace("x", ",").split(","))
        assert len(res) == 2 and res[0] > 1 and res[1] > 1
    except (ValueError, AssertionError):
        parser.error("--grid-res must look like '600x300'")
    bad = [lab for lab in args.exclude_orbit if lab not in ("A", "B", "C", "D")]
    if bad:
        parser.error(f"unknown orbit labels: {bad}")
    gammas = _parse_floats(args.gamma_list) if args.gamma_list else []
    thetas = _parse_floats(args.theta_list) if args.theta_list else None
    if any(g <= 0 for g in gammas):
        parser.error("--gamma-list values must be positive")
    if thetas is not None and any(not 0 <= t <= 90 for t in thetas):
        parser.error("--theta-list values must lie in [0, 90]")
    return RunConfig(
        intensity_au=intensity,
        omega_au=omega,
        theta_deg=args.theta_deg,
        phi2_rad=args.phi2_rad,
        n1=n1,
        n2=n2,
        ip_au=ip,
        p_min=args.p_min,
        p_max=args.p_max,
        p_count=args.p_count,
        gamma_list=gammas,
        theta_list=thetas,
        grid_res=res,
        exclude_orbits=tuple(sorted(set(args.exclude_orbit))),
        out=Path(args.out),
        fmt=args.fmt,
    )


def cmd_landscape(run: RunConfig) -> list[Path]:
    cfg = run.field_config()
    meta = run.metadata()
    meta["keldysh_gamma"] = keldysh_gamma(cfg)

    n_re, n_im = run.grid_res
    re, im, s = landscape_grid(cfg, 0.0, n_re=n_re, n_im=n_im)
    grid = SweepTable(name="landscape", metadata=meta,
                      columns=["re_wt", "im_wt", "imS", "reS"])
    for i, y in enumerate(im):
        for j, x in enumerate(re):
            grid.append(float(x), float(y), float(s[i, j].imag), float(s[i, j].real))

    chain = build_contour(cfg, 0.0)
    sad = SweepTable(name="saddles", metadata=meta,
                     columns=["label", "re_wt", "im_wt", "branch", "order",
                              "residual", "contributes", "degenerate"])
    for s_ in chain.saddles:
        wt = canonical_wt(s_.wt)
        sad.append(s_.label, float(wt.real), float(wt.imag), s_.branch, s_.order,
                   s_.residual, bool(s_.contributes), bool(s_.degenerate))

    cont = SweepTable(name="contour", metadata=meta,
                      columns=["segment", "point", "re_wt", "im_wt"])
    for si, seg in enumerate(chain.segments):
        for pi, z in enumerate(seg):
            cont.append(si, pi, float(z.real), float(z.imag))

    out = run.out
    out.mkdir(parents=True, exist_ok=True)
    return [
        grid.write(out / "landscape", run.fmt),
        sad.write(out / "saddles", run.fmt),
        cont.write(out / "contour", run.fmt),
    ]


def cmd_switchover(run: RunConfig) -> list[Path]:
    thetas = run.theta_list if run.theta_list is not None else list(np.linspace(0.0, 90.0, 46))
    cfgs = [run.field_config(th) for th in thetas]
    table = track_saddles(cfgs, 0.0)
    table.name = "switchover"
    table.metadata.update(run.metadata())

    contrib_cols = {}
    for i, cfg in enumerate(cfgs):
        try:
            chain = build_contour(cfg, 0.0)
            contrib_cols[i] = {s.label: bool(s.contributes) for s in chain.saddles}
        except (ContourTopologyError, TraceError):
            contrib_cols[i] = {}
    table.columns.append("contributes")
    table.columns.append("n_contributing")
    for row in table.rows:
        node, label = row[0], row[3]
        flags = contrib_cols.get(node, {})
        row.append(bool(flags.get(label, False)))
        row.append(int(sum(flags.values())))

    if len(cfgs) > 1:
        cfg0 = cfgs[0]
        try:
            cp = find_coalescence(cfg0.E0, cfg0.omega, cfg0.Ip,
                                  phi2=cfg0.phi2, n1=cfg0.n1, n2=cfg0.n2)
            table.metadata["theta_star_deg"] = math.degrees(cp.theta_star)
            table.metadata["r_star"] = cp.r_star
            table.metadata["coalescence_re_wt"] = float(cp.wt_star.real)
            table.metadata["coalescence_im_wt"] = float(cp.wt_star.imag)
        except CoalescenceError:
            table.metadata["theta_star_deg"] = math.nan
            table.metadata["r_star"] = math.nan

    run.out.mkdir(parents=True, exist_ok=True)
    return [table.write(run.out / "switchover", run.fmt)]


def cmd_spectrum(run: RunConfig) -> list[Path]:
    cfg = run.field_config()
    table = spectrum(cfg, run.p_grid(), exclude_orbits=run.exclude_orbits)
    table.metadata.update(run.metadata())
    table.metadata["keldysh_gamma"] = keldysh_gamma(cfg)
    run.out.mkdir(parents=True, exist_ok=True)
    return [table.write(run.out / "spectrum", run.fmt)]


def cmd_yields(run: RunConfig) -> list[Path]:
    gammas = run.gamma_list or [0.3, 0.45, 0.675, 0.9, 1.2, 1.5]
    table = yield_vs_gamma(
        run.ip_au, run.intensity_au, gammas,
        theta=math.radians(run.theta_deg),
        p_grid=run.p_grid(),
        n1=run.n1, n2=run.n2, phi2=run.phi2_rad,
        exclude_orbits=run.exclude_orbits,
    )
    table.metadata.update(run.metadata())
    run.out.mkdir(parents=True, exist_ok=True)
    return [table.write(run.out / "yields", run.fmt)]


def cmd_rstar(run: RunConfig) -> list[Path]:
    gammas = run.gamma_list or list(np.geomspace(0.05, 5.0, 25))
    table = rstar_curve(gammas, run.ip_au, run.intensity_au,
                        phi2=run.phi2_rad, n1=run.n1, n2=run.n2)
    table.metadata.update(run.metadata())
    run.out.mkdir(parents=True, exist_ok=True)
    return [table.write(run.out / "rstar", run.fmt)]


def cmd_trajectories(run: RunConfig) -> list[Path]:
    cfg = run.field_config()
    base = label_saddles(cfg, find_saddles(cfg, 0.0))
    band = [-0.05, -0.025, 0.0, 0.025, 0.05]
    table = SweepTable(
        name="trajectories", metadata={**run.metadata(), "band_p": "+-0.05"},
        columns=["label", "p", "wt", "re_x", "im_x", "x_exit", "truncated"],
    )
    for s in sorted(base, key=lambda s: s.label):
        if s.label == "unassigned":
            continue
        for rec in trajectory_band(cfg, s.label, band):
            if rec.truncated:
                table.append(rec.label, rec.p, math.nan, math.nan, math.nan,
                             math.nan, True)
                continue
            for t, x in zip(rec.t_grid[::4], rec.x[::4]):
                table.append(rec.label, rec.p, float(cfg.omega * t),
                             float(x.real), float(x.imag), rec.x_exit, False)
    run.out.mkdir(parents=True, exist_ok=True)
    return [table.write(run.out / "trajectories", run.fmt)]


_COMMANDS = {
    "landscape": cmd_landscape,
    "switchover": cmd_switchover,
    "spectrum": cmd_spectrum,
    "yields": cmd_yields,
    "rstar": cmd_rstar,
    "trajectories": cmd_trajectories,
}


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        run = _run_config(parser, args)
    except FieldConfigError as exc:
        parser.error(str(exc))
    try:
        paths = _COMMANDS[args.command](run)
    except NUMERICAL_ERRORS as exc:
        run.out.mkdir(parents=True, exist_ok=True)
        diag = run.out / "error.json"
        diag.write_text(json.dumps({
            "command": args.command,
            "error": type(exc).__name__,
            "message": str(exc),
            "scenario": {k: v for k, v in run.metadata().items()},
        }, indent=1, default=str) + "\n", encoding="utf-8")
        print(f"numerical failure: {exc} (diagnostics in {diag})", file=sys.stderr)
        return 3
    for path in paths:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
