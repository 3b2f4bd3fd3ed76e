"""Unit conventions and physical constants.

Internal convention: energies/frequencies in cm^-1, time in fs, with hbar
absorbed into the cm^-1 <-> angular-frequency conversion. A level splitting
of E cm^-1 therefore oscillates at E * CM1_TO_RAD_PER_FS rad/fs.
"""

import math

#: Speed of light in cm/fs (exact).
SPEED_OF_LIGHT_CM_PER_FS = 2.99792458e-5

#: Angular frequency (rad/fs) of a 1 cm^-1 splitting: 2*pi*c.
CM1_TO_RAD_PER_FS = 2.0 * math.pi * SPEED_OF_LIGHT_CM_PER_FS

#: Same conversion per ps; 1 cm^-1 <-> 2*pi*0.0299792458 rad/ps.
CM1_TO_RAD_PER_PS = CM1_TO_RAD_PER_FS * 1000.0

#: Boltzmann constant in cm^-1 per kelvin.
KB_CM1_PER_K = 0.695034

FS_PER_PS = 1000.0


def thermal_energy_cm1(temperature_k: float) -> float:
    """k_B * T in cm^-1."""
    if temperature_k <= 0:
        raise ValueError(f"temperature must be positive, got {temperature_k}")
    return KB_CM1_PER_K * temperature_k


def wavenumber_to_nm(wavenumber_cm1):
    """Convert a transition energy in cm^-1 to its wavelength in nm."""
    return 1.0e7 / wavenumber_cm1


def nm_to_wavenumber(wavelength_nm):
    """Convert a wavelength in nm to the transition energy in cm^-1."""
    return 1.0e7 / wavelength_nm
