"""
FEM modul: Hermite kubni elementi za uklješteni nosač
"""

from .hermite import Mesh, shape_functions, element_mass, element_stiffness
from .assembly import (
    AssemblyError,
    ClampCompatibilityWarning,
    FemSystem,
    ModalFilter,
    NodalField,
    assemble,
    interpolate,
)
from .nonlinear import nonlinear_force, lp_integral

__all__ = [
    'Mesh',
    'shape_functions',
    'element_mass',
    'element_stiffness',
    'AssemblyError',
    'ClampCompatibilityWarning',
    'FemSystem',
    'NodalField',
    'assemble',
    'interpolate',
    'ModalFilter',
    'nonlinear_force',
    'lp_integral',
]
