"""Numerical sub-Riemannian calculus on the first Heisenberg group.

Korányi spherical coordinates, the horizontal frame, ball and sphere
quadrature, cap eigenproblems and an Alt-Caffarelli-Friedman type functional.
"""

from .heis import HPoint, SphericalPoint, from_spherical, gauge_norm, group_mul, to_spherical
from .quad import QuadSpec, energy_boundary, energy_bulk, integrate_ball, integrate_sphere_H
from .spectral import CapProblem, acf_term, char_alpha, h_value, lambda0, solve_cap

__version__ = "0.1.0"

__all__ = [
    "HPoint", "SphericalPoint", "from_spherical", "gauge_norm", "group_mul", "to_spherical",
    "QuadSpec", "energy_boundary", "energy_bulk", "integrate_ball", "integrate_sphere_H",
    "CapProblem", "acf_term", "char_alpha", "h_value", "lambda0", "solve_cap",
]
