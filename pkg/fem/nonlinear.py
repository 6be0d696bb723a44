"""Gauss-Legendre kvadratura nelinearnih članova po elementima."""
import numpy as np

from .assembly import FemSystem, NodalField
from .hermite import element_dofs, shape_functions

# 6 tačaka: tačno do stepena 11
GAUSS_ORDER = 6
_GAUSS_X, _GAUSS_W = np.polynomial.legendre.leggauss(GAUSS_ORDER)
GAUSS_POINTS = 0.5 * (_GAUSS_X + 1.0)  # prebačeno na [0, 1]
GAUSS_WEIGHTS = 0.5 * _GAUSS_W


def _element_values(sys: FemSystem, Q: NodalField):
    """Vrednosti 𝒱_h u Gausovim tačkama: (n_elements, GAUSS_ORDER) i bazne funkcije (4, GAUSS_ORDER)"""
    dofs = element_dofs(sys.mesh)
    local = sys.full_vector(Q)[dofs]
    phi, _ = shape_functions(GAUSS_POINTS, sys.mesh.h)
    return local @ phi, phi, dofs


def nonlinear_force(sys: FemSystem, Q: NodalField, p: float) -> NodalField:
    """F_i = ∫ 𝒱_h |𝒱_h|^{p-2} φ_i dx, ograničeno na slobodne DOF-ove"""
    if not np.all(np.isfinite(Q)):
        raise ValueError("nonlinear_force: non-finite field entries")
    values, phi, dofs = _element_values(sys, Q)
    integrand = values * np.abs(values) ** (p - 2.0)
    local_force = sys.mesh.h * (integrand * GAUSS_WEIGHTS) @ phi.T
    full = np.bincount(dofs.ravel(), weights=local_force.ravel(), minlength=sys.mesh.n_dofs)
    return full[sys.free_dofs]


def lp_integral(sys: FemSystem, Q: NodalField, p: float) -> float:
    """∫ |𝒱_h|^p dx"""
    values, _, _ = _element_values(sys, Q)
    return float(sys.mesh.h * np.sum(np.abs(values) ** p * GAUSS_WEIGHTS))
