"""Physical constants and unit conversions.

Internal units: energies and (imaginary) frequencies in eV, lengths in nm.
Conversion to SI happens only when a free energy or pressure is returned.
"""
from dataclasses import dataclass
import math


@dataclass(frozen=True)
class PhysicalConstants:
    boltzmann: float = 8.617333262e-5      # eV/K
    hbar_c: float = 197.3269804            # eV nm
    ev_to_joule: float = 1.602176634e-19   # J/eV


CONSTANTS = PhysicalConstants()

KB = CONSTANTS.boltzmann
HBAR_C = CONSTANTS.hbar_c
EV = CONSTANTS.ev_to_joule

# eV/nm^2 -> J/m^2 and eV/nm^3 -> Pa
ENERGY_DENSITY_SI = EV * 1e18
PRESSURE_SI = EV * 1e27

ZETA3 = 1.2020569031595942853997381615114499907649862923405
ZETA2 = math.pi ** 2 / 6.0


def matsubara_spacing(temperature):
    """Spacing of the Matsubara frequencies, 2 pi k_B T, in eV."""
    return 2.0 * math.pi * KB * temperature
