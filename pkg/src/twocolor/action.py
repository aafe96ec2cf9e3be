"""Closed-form semi-classical action S(p, t) and its time derivatives.

S(p, t) = int_0^t [ Ip + (p + A(t'))^2 / 2 ] dt'

with the reference point S(p, 0) = 0: the reference only contributes a
global phase to amplitudes, which drops out of every observable used here
(|Psi|, per-orbit magnitudes, yields, saddle locations).  Expanding
(p + A)^2 over products of sines gives elementary antiderivatives, so S
is evaluated exactly for any complex t; no quadrature at runtime.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .field import FieldConfig, electric_field, electric_field_derivative, vector_potential


@dataclass(frozen=True)
class ActionEvaluation:
    """Action and first two time derivatives at one (p, t) point.

    dS = Ip + (p + A(t))^2 / 2 and d2S = -(p + A(t)) E(t), both exact.
    """

    S: complex
    dS: complex
    d2S: complex


def _antiderivative(cfg: FieldConfig, p, t):
    """Raw antiderivative of Ip + (p + A)^2 / 2 (constant not fixed)."""
    w = cfg.omega
    n1, n2 = cfg.n1, cfg.n2
    a1, a2 = cfg.a1, cfg.a2
    u1 = n1 * w * t
    u2 = n2 * w * t + cfg.phi2

    out = (cfg.Ip + 0.5 * p * p + 0.25 * (a1 * a1 + a2 * a2)) * t
    out = out + p * a1 * np.cos(u1) / (n1 * w) - p * a2 * np.cos(u2) / (n2 * w)
    out = out - (a1 * a1 / (8.0 * n1 * w)) * np.sin(2.0 * u1)
    out = out - (a2 * a2 / (8.0 * n2 * w)) * np.sin(2.0 * u2)
    if a1 != 0.0 and a2 != 0.0:
        if n1 == n2:
            cross_minus = t * np.cos(cfg.phi2)
        else:
            cross_minus = np.sin((n1 - n2) * w * t - cfg.phi2) / ((n1 - n2) * w)
        cross_plus = np.sin((n1 + n2) * w * t + cfg.phi2) / ((n1 + n2) * w)
        out = out - 0.5 * a1 * a2 * (cross_minus - cross_plus)
    return out


def action(cfg: FieldConfig, p: float, t):
    """S(p, t) with S(p, 0) = 0; entire in t, vectorised over t."""
    return _antiderivative(cfg, p, t) - _antiderivative(cfg, p, 0.0)


def action_first_derivative(cfg: FieldConfig, p: float, t):
    """S'(p, t) = Ip + (p + A(t))^2 / 2."""
    k = p + vector_potential(cfg, t)
    return cfg.Ip + 0.5 * k * k


def action_second_derivative(cfg: FieldConfig, p: float, t):
    """S''(p, t) = -(p + A(t)) E(t)."""
    return -(p + vector_potential(cfg, t)) * electric_field(cfg, t)


def action_third_derivative(cfg: FieldConfig, p: float, t):
    """S'''(p, t) = E(t)^2 - (p + A(t)) E'(t)."""
    e = electric_field(cfg, t)
    return e * e - (p + vector_potential(cfg, t)) * electric_field_derivative(cfg, t)


def action_derivatives(cfg: FieldConfig, p: float, t) -> ActionEvaluation:
    """Evaluate S, S' and S'' at a single complex time."""
    return ActionEvaluation(
        S=complex(action(cfg, p, t)),
        dS=complex(action_first_derivative(cfg, p, t)),
        d2S=complex(action_second_derivative(cfg, p, t)),
    )
