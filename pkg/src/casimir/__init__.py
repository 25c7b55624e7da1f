"""Thermal Casimir free energies and sphere-plate forces between layered
metals and superconductors on the imaginary frequency axis."""

__version__ = "0.1.0"

from .materials import (  # noqa: E402
    BcsSuperconductor,
    Drude,
    DrudeLorentz,
    Oscillator,
    PerfectConductor,
    Plasma,
    Vacuum,
    bcs_gap,
    gold,
    kappa,
    niobium,
    permittivity,
)
from .reflection import Layer, LayeredStack, Polarization, Prescription  # noqa: E402
from .lifshitz import free_energy_difference, free_energy_per_area, mode_term  # noqa: E402
