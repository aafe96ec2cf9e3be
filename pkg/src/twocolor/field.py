"""Bichromatic linearly polarised laser field and derived quantities.

The field is a superposition of two harmonics of a fundamental frequency
omega (all quantities in atomic units),

    E(t) = E1 cos(n1 w t) - E2 cos(n2 w t + phi2),

with amplitudes E1 = E0 cos(theta), E2 = E0 sin(theta) so that the total
intensity E1^2 + E2^2 = E0^2 stays constant while the mixing angle theta
sweeps from 0 (pure n1-colour) to pi/2 (pure n2-colour).  The amplitude
ratio is R = E2/E1 = tan(theta).

All field functions are entire in t and accept complex times.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from . import units


class FieldConfigError(ValueError):
    """Raised for physically invalid field parameters."""


@dataclass(frozen=True)
class FieldConfig:
    """Physical scenario: field amplitudes, frequencies and target.

    Attributes
    ----------
    E0 : total field-strength amplitude, a.u. (E0 = sqrt(I0[a.u.]))
    omega : fundamental angular frequency, a.u.
    theta : mixing angle in radians, within [0, pi/2]
    Ip : ionisation potential, a.u.
    phi2 : relative phase of the second colour, radians
    n1, n2 : harmonic orders of the two colours (positive integers)
    """

    E0: float
    omega: float
    theta: float
    Ip: float
    phi2: float = 0.0
    n1: int = 1
    n2: int = 2

    def __post_init__(self):
        if self.omega <= 0:
            raise FieldConfigError("omega must be positive")
        if self.Ip <= 0:
            raise FieldConfigError("Ip must be positive")
        if self.E0 < 0:
            raise FieldConfigError("E0 must be non-negative")
        if not 0.0 <= self.theta <= math.pi / 2:
            raise FieldConfigError("theta must lie in [0, pi/2]")
        if int(self.n1) != self.n1 or int(self.n2) != self.n2 or self.n1 < 1 or self.n2 < 1:
            raise FieldConfigError("harmonic orders n1, n2 must be positive integers")

    @property
    def E1(self) -> float:
        return self.E0 * math.cos(self.theta)

    @property
    def E2(self) -> float:
        return self.E0 * math.sin(self.theta)

    @property
    def a1(self) -> float:
        """Vector-potential amplitude of the first colour, E1/(n1 w)."""
        return self.E1 / (self.n1 * self.omega)

    @property
    def a2(self) -> float:
        """Vector-potential amplitude of the second colour, E2/(n2 w)."""
        return self.E2 / (self.n2 * self.omega)

    @property
    def amplitude_ratio(self) -> float:
        """R = E2/E1 = tan(theta)."""
        return math.tan(self.theta)

    @property
    def period(self) -> float:
        """Period of the fundamental, 2 pi / omega."""
        return 2.0 * math.pi / self.omega

    def with_theta(self, theta: float) -> "FieldConfig":
        return replace(self, theta=theta)

    def with_omega(self, omega: float) -> "FieldConfig":
        return replace(self, omega=omega)


def config_from_lab(
    intensity_wcm2: float | None = None,
    wavelength_nm: float | None = None,
    *,
    intensity_au: float | None = None,
    omega_au: float | None = None,
    theta_deg: float = 45.0,
    Ip_au: float | None = 0.5,
    Ip_ev: float | None = None,
    phi2: float = 0.0,
    n1: int = 1,
    n2: int = 2,
) -> FieldConfig:
    """Build a FieldConfig from laboratory or atomic units.

    Exactly one of (intensity_wcm2 | intensity_au) and one of
    (wavelength_nm | omega_au) must be given; Ip may be given in a.u.
    (default 0.5, atomic hydrogen) or in eV.
    """
    if (intensity_wcm2 is None) == (intensity_au is None):
        raise FieldConfigError("give exactly one of intensity_wcm2 or intensity_au")
    if (wavelength_nm is None) == (omega_au is None):
        raise FieldConfigError("give exactly one of wavelength_nm or omega_au")
    if intensity_au is None:
        intensity_au = units.intensity_wcm2_to_au(intensity_wcm2)
    if omega_au is None:
        omega_au = units.wavelength_nm_to_omega_au(wavelength_nm)
    if Ip_ev is not None:
        Ip = units.energy_ev_to_au(Ip_ev)
    elif Ip_au is not None:
        Ip = Ip_au
    else:
        raise FieldConfigError("ionisation potential missing")
    if intensity_au < 0:
        raise FieldConfigError("intensity must be non-negative")
    return FieldConfig(
        E0=math.sqrt(intensity_au),
        omega=omega_au,
        theta=math.radians(theta_deg),
        Ip=Ip,
        phi2=phi2,
        n1=n1,
        n2=n2,
    )


def electric_field(cfg: FieldConfig, t):
    """E(t) = E1 cos(n1 w t) - E2 cos(n2 w t + phi2), analytic in complex t."""
    t = np.asarray(t) if np.ndim(t) else t
    w = cfg.omega
    return cfg.E1 * np.cos(cfg.n1 * w * t) - cfg.E2 * np.cos(cfg.n2 * w * t + cfg.phi2)


def electric_field_derivative(cfg: FieldConfig, t):
    """dE/dt, used by curvature-sensitive solvers."""
    w = cfg.omega
    return (
        -cfg.E1 * cfg.n1 * w * np.sin(cfg.n1 * w * t)
        + cfg.E2 * cfg.n2 * w * np.sin(cfg.n2 * w * t + cfg.phi2)
    )


def vector_potential(cfg: FieldConfig, t):
    """A(t) = -int E dt with zero cycle average.

    For integer harmonic orders the zero-mean gauge constant vanishes,
    leaving pure sine terms; the drift momentum p is then the asymptotic
    photoelectron momentum.
    """
    w = cfg.omega
    return -cfg.a1 * np.sin(cfg.n1 * w * t) + cfg.a2 * np.sin(cfg.n2 * w * t + cfg.phi2)


def vector_potential_integral(cfg: FieldConfig, t):
    """Antiderivative of A(t) (integration constant arbitrary but fixed).

    Closed form used by both the action and the trajectory integrals;
    being entire it makes those integrals path independent.
    """
    w = cfg.omega
    return (cfg.a1 / (cfg.n1 * w)) * np.cos(cfg.n1 * w * t) - (
        cfg.a2 / (cfg.n2 * w)
    ) * np.cos(cfg.n2 * w * t + cfg.phi2)


def ponderomotive_energy(cfg: FieldConfig) -> float:
    """Cycle-averaged quiver energy U_p = <A^2>/2 of the two-colour field.

    For distinct harmonics the colours contribute independently,
    U_p = E1^2/(4 n1^2 w^2) + E2^2/(4 n2^2 w^2); for n1 == n2 the cross
    term survives with its cos(phi2) weight.
    """
    up = 0.25 * (cfg.a1**2 + cfg.a2**2)
    if cfg.n1 == cfg.n2:
        up -= 0.5 * cfg.a1 * cfg.a2 * math.cos(cfg.phi2)
    return up


def keldysh_gamma(cfg: FieldConfig) -> float:
    """Keldysh adiabaticity parameter gamma = sqrt(Ip / (2 U_p))."""
    up = ponderomotive_energy(cfg)
    if up <= 0.0:
        raise FieldConfigError("Keldysh parameter undefined for a vanishing field")
    return math.sqrt(cfg.Ip / (2.0 * up))


def omega_for_keldysh(
    gamma: float,
    E0: float,
    Ip: float,
    theta: float,
    n1: int = 1,
    n2: int = 2,
    phi2: float = 0.0,
) -> float:
    """Frequency realising a requested gamma at fixed E0, Ip and theta.

    U_p scales as 1/omega^2, so gamma is linear in omega:
    omega = gamma * sqrt(2 C_U / Ip) with C_U = U_p * omega^2.
    """
    if E0 <= 0:
        raise FieldConfigError("need a non-vanishing field to realise gamma")
    c1 = (E0 * math.cos(theta) / n1) ** 2 / 4.0
    c2 = (E0 * math.sin(theta) / n2) ** 2 / 4.0
    cu = c1 + c2
    if n1 == n2:
        cu -= 0.5 * math.cos(phi2) * math.sqrt(c1 * c2) * 2.0
    return gamma * math.sqrt(2.0 * cu / Ip)
