"""Rotary-wing propulsion power and per-slot flight energy."""

import numpy as np
from scipy.optimize import minimize_scalar

from .data_model import AeroParams

SPEED_TOLERANCE = 1e-3


def propulsion_power(v, p: AeroParams):
    """
    Propulsion power of level flight at horizontal speed ``v``.

    Args:
        v: speed in m/s, scalar or array
        p: aerodynamic parameters

    Returns:
        Power in watts, same shape as ``v``
    """
    v = np.asarray(v, dtype=float)
    blade = p.p_blade * (1.0 + 3.0 * v**2 / p.v_tip**2)
    ratio = v**2 / (2.0 * p.v0**2)
    induced = p.p_induced * np.sqrt(np.sqrt(1.0 + ratio**2) - ratio)
    parasite = 0.5 * p.d0 * p.rho_air * p.solidity * p.disc_area * v**3
    power = blade + induced + parasite
    return float(power) if power.ndim == 0 else power


def propulsion_power_derivative(v, p: AeroParams):
    """Analytic dP/dv."""
    v = np.asarray(v, dtype=float)
    ratio = v**2 / (2.0 * p.v0**2)
    d_ratio = v / p.v0**2
    inner = np.sqrt(1.0 + ratio**2) - ratio
    d_inner = (ratio / np.sqrt(1.0 + ratio**2) - 1.0) * d_ratio
    blade = p.p_blade * 6.0 * v / p.v_tip**2
    induced = p.p_induced * 0.5 * d_inner / np.sqrt(inner)
    parasite = 1.5 * p.d0 * p.rho_air * p.solidity * p.disc_area * v**2
    derivative = blade + induced + parasite
    return float(derivative) if derivative.ndim == 0 else derivative


def hover_power(p: AeroParams) -> float:
    return p.p_blade + p.p_induced


def flight_energy(
    v_now: float,
    mean_speed_now: float,
    mean_speed_prev: float,
    z_now: float,
    z_prev: float,
    slot_duration: float,
    p: AeroParams,
) -> float:
    """Slot energy: propulsion plus kinetic and potential changes, floored at zero."""
    if slot_duration <= 0:
        raise ValueError("slot duration must be positive")
    energy = (
        propulsion_power(v_now, p) * slot_duration
        + 0.5 * p.mass_kg * (mean_speed_now**2 - mean_speed_prev**2)
        + p.mass_kg * p.gravity * (z_now - z_prev)
    )
    return max(float(energy), 0.0)


def energy_optimal_speed(p: AeroParams, v_max: float = 60.0) -> float:
    """Speed in [0, v_max] that minimizes propulsion power."""
    result = minimize_scalar(
        lambda v: propulsion_power(v, p),
        bounds=(0.0, v_max),
        method="bounded",
        options={"xatol": SPEED_TOLERANCE * 0.1},
    )
    return float(result.x)
