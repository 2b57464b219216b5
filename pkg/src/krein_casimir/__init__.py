"""Casimir energies of spherical cavities from the scattering phase (Krein) formula.

Modules: :mod:`specfun` (spherical Bessel/Hankel, 3j, harmonics, rotations),
:mod:`geometry` (sphere configurations), :mod:`numerics` (log-determinants,
phase tracking, quadrature), :mod:`scattering` (multiple-scattering matrix
and integrated density of states), :mod:`casimir` (energy pipelines) and
:mod:`cli`.
"""
from .casimir import (
    EnergyResult,
    GeometryQuery,
    fermionic_energy_exact,
    fermionic_energy_sphere_plate_approx,
    fermionic_energy_two_sphere_approx,
    pfa_sphere_plate,
    pfa_two_spheres_leading,
    scalar_energy_sphere_plate,
    scalar_energy_two_spheres,
    scalar_semiclassical_two_bounce,
)
from .geometry import Configuration, FermiGas, Scatterer, Truncation, build_configuration, two_spheres
from .scattering import assemble_m, integrated_dos_exact, logdet_m, logdet_m_converged

__version__ = "0.1.0"
