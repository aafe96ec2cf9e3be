"""Unit conversions between laboratory units and atomic units (a.u.)."""

from __future__ import annotations

# 1 a.u. of intensity expressed in W/cm^2.
INTENSITY_WCM2_PER_AU = 3.50944758e16
# omega[a.u.] * wavelength[nm] for light in vacuum.
OMEGA_AU_TIMES_NM = 45.5633526
# 1 hartree in eV.
HARTREE_EV = 27.211386


def intensity_wcm2_to_au(value: float) -> float:
    return value / INTENSITY_WCM2_PER_AU


def intensity_au_to_wcm2(value: float) -> float:
    return value * INTENSITY_WCM2_PER_AU


def wavelength_nm_to_omega_au(value: float) -> float:
    return OMEGA_AU_TIMES_NM / value


def omega_au_to_wavelength_nm(value: float) -> float:
    return OMEGA_AU_TIMES_NM / value


def energy_ev_to_au(value: float) -> float:
    return value / HARTREE_EV


def energy_au_to_ev(value: float) -> float:
    return value * HARTREE_EV


_CONVERTERS = {
    ("W/cm2", "intensity_au"): intensity_wcm2_to_au,
    ("intensity_au", "W/cm2"): intensity_au_to_wcm2,
    ("nm", "omega_au"): wavelength_nm_to_omega_au,
    ("omega_au", "nm"): omega_au_to_wavelength_nm,
    ("eV", "energy_au"): energy_ev_to_au,
    ("energy_au", "eV"): energy_au_to_ev,
}


def convert_units(value: float, from_unit: str, to_unit: str) -> float:
    """Convert ``value`` between a supported pair of units.

    Supported pairs: W/cm2 <-> intensity_au, nm <-> omega_au,
    eV <-> energy_au.  Raises ValueError for any other pair.
    """
    if from_unit == to_unit:
        return value
    try:
        conv = _CONVERTERS[(from_unit, to_unit)]
    except KeyError:
        raise ValueError(f"unsupported unit conversion {from_unit!r} -> {to_unit!r}") from None
    return conv(value)
