"""Numerical laboratory for planar Coulomb gases, reproducing kernels and
concentration operators."""

from .errors import ConvergenceError, DomainError, InvalidWindowError, LabError, NumericalError, ResourceError
from .geometry import Cut, Disk, Polygon, Rect, Window, quadrature, regularity_kappa, window_from_dict
from .kernel import Erfc, FiniteN, Ginibre, erfc_F
from .potential import GINIBRE, RadialPotential, micro_frame
from .operators import build, counting, spectrum
from .gas import Configuration, SamplerConfig, fekete, hamiltonian, sample

__version__ = "0.1.0"

__all__ = [
    "ConvergenceError", "DomainError", "InvalidWindowError", "LabError", "NumericalError", "ResourceError",
    "Cut", "Disk", "Polygon", "Rect", "Window", "quadrature", "regularity_kappa", "window_from_dict",
    "Erfc", "FiniteN", "Ginibre", "erfc_F", "GINIBRE", "RadialPotential", "micro_frame",
    "build", "counting", "spectrum", "Configuration", "SamplerConfig", "fekete", "hamiltonian", "sample",
]
