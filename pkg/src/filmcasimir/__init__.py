"""Casimir free energy and pressure of metal films on metal plates (Lifshitz theory)."""
from .materials import (DrudeParameters, Material, SpectralTable, builtin_material,
                        load_spectral_table, synthetic_drude_table)
from .permittivity import PermittivityModel, Variant
from .lifshitz import (FilmSystem, classical_free_energy, classical_pressure, compute, free_energy,
                       ideal_metal_limit, pressure, reflection, zero_freq_coefficients)

__version__ = "0.1.0"
