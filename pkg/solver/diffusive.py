"""
Difuzna (extended-variable) aproksimacija temperovanog Caputo prigušenja.

ξ-mreža je uniformna na (0, R]; β je parna funkcija pa svaki integral po ℝ
nosi faktor 2.
"""
import logging
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy import special

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class XiGrid:
    theta: float
    R: float
    M_xi: int
    dxi: float
    xi: np.ndarray
    mu: np.ndarray


@dataclass(frozen=True)
class CrankNicolsonCoefficients:
    decay: np.ndarray  # (2 - Δt k_ℓ) / (2 + Δt k_ℓ)
    gain: np.ndarray   # 2 Δt μ_ℓ / (2 + Δt k_ℓ)


@dataclass
class DiffusiveField:
    """Red ℓ matrice G su nodalni koeficijenti pomoćne promenljive 𝒢_ℓ.

    `mass_norms`, kada postoji, drži ‖𝒢_ℓ‖²_M i ažurira se zajedno sa G.
    """
    G: np.ndarray
    mass_norms: Optional[np.ndarray] = None

    @classmethod
    def zeros(cls, M_xi: int, n_free: int, track_norms: bool = False) -> "DiffusiveField":
        return cls(np.zeros((M_xi, n_free)), np.zeros(M_xi) if track_norms else None)

    def copy(self) -> "DiffusiveField":
        norms = None if self.mass_norms is None else self.mass_norms.copy()
        return DiffusiveField(self.G.copy(), norms)

    def advance(self, coeffs: CrankNicolsonCoefficients, v_half: np.ndarray,
                Mv: Optional[np.ndarray] = None):
        """Crank-Nicolson korak na mestu.

        ‖r𝒢 + cv‖²_M = r²‖𝒢‖²_M + 2rc 𝒢ᵀMv + c²vᵀMv, pa je za norme
        dovoljan jedan proizvod G @ Mv.
        """
        r, c = coeffs.decay, coeffs.gain
        if self.mass_norms is not None:
            if Mv is None:
                raise ValueError("advance: Mv is required when mass norms are tracked")
            cross = self.G @ Mv
            self.mass_norms *= r * r
            self.mass_norms += 2.0 * r * c * cross + c * c * float(v_half @ Mv)
        self.G *= r[:, None]
        self.G += np.multiply.outer(c, v_half)


def build_grid(theta: float, R: float, M_xi: int) -> XiGrid:
    dxi = R / M_xi
    xi = dxi * np.arange(1, M_xi + 1)
    mu = xi ** ((2.0 * theta - 1.0) / 2.0)
    return XiGrid(theta, R, M_xi, dxi, xi, mu)


def analytic_A0(theta: float, vartheta: float) -> float:
    """A0 = (π / sin θπ) ϑ^{θ-1}"""
    return math.pi / math.sin(theta * math.pi) * vartheta ** (theta - 1.0)


def quadrature_A0(grid: XiGrid, vartheta: float) -> float:
    return float(2.0 * np.sum(grid.mu**2 / (grid.xi**2 + vartheta)) * grid.dxi)


def cn_coefficients(grid: XiGrid, vartheta: float, dt: float) -> CrankNicolsonCoefficients:
    k = grid.xi**2 + vartheta
    denom = 2.0 + dt * k
    return CrankNicolsonCoefficients((2.0 - dt * k) / denom, 2.0 * dt * grid.mu / denom)


def update_aux(grid: XiGrid,
               field: DiffusiveField,
               vartheta: float,
               dt: float,
               v_half: np.ndarray,
               coeffs: Optional[CrankNicolsonCoefficients] = None) -> DiffusiveField:
    """Crank-Nicolson korak za sve mode: 𝒢ⁿ⁺¹ = r_ℓ 𝒢ⁿ + c_ℓ v_half (novo polje, bez normi)"""
    if coeffs is None:
        coeffs = cn_coefficients(grid, vartheta, dt)
    updated = DiffusiveField(field.G.copy())
    updated.advance(coeffs, np.asarray(v_half, dtype=float))
    return updated


def tilde_weights(grid: XiGrid, vartheta: float, dt: float) -> np.ndarray:
    """μ̃_ℓ = r_ℓ μ_ℓ"""
    return cn_coefficients(grid, vartheta, dt).decay * grid.mu


def fractional_force(grid: XiGrid,
                     field: DiffusiveField,
                     b: float,
                     weights: Optional[np.ndarray] = None) -> np.ndarray:
    """2b Σ_ℓ w_ℓ 𝒢_ℓ Δξ (podrazumevano w = μ)"""
    w = grid.mu if weights is None else weights
    return 2.0 * b * grid.dxi * (w @ field.G)


def c_augm_coeff(grid: XiGrid, vartheta: float, dt: float, b: float) -> float:
    """Skalar koji množi matricu mase u 𝐂_augm"""
    k = grid.xi**2 + vartheta
    return float(dt * b * np.sum(2.0 * grid.mu**2 * grid.dxi / (2.0 + dt * k)))


def auxiliary_energy(grid: XiGrid, field: DiffusiveField, weights: Optional[np.ndarray] = None) -> float:
    """Σ_ℓ w_ℓ ‖𝒢_ℓ‖² Δξ (euklidska norma koeficijenata)"""
    w = grid.mu if weights is None else weights
    return float(np.sum(w * np.sum(field.G**2, axis=1)) * grid.dxi)


def scalar_response(grid: XiGrid, vartheta: float, dt: float,
                    velocity: Sequence[float], b: Optional[float] = None) -> np.ndarray:
    """Izlaz difuznog sistema za skalarni ulaz v(t_n); vraća niz dužine len(velocity)"""
    if b is None:
        b = math.sin(grid.theta * math.pi) / math.pi
    velocity = np.asarray(velocity, dtype=float)
    coeffs = cn_coefficients(grid, vartheta, dt)
    field = DiffusiveField.zeros(grid.M_xi, 1)
    out = np.zeros(len(velocity))
    for n in range(1, len(velocity)):
        v_half = np.array([0.5 * (velocity[n - 1] + velocity[n])])
        field = update_aux(grid, field, vartheta, dt, v_half, coeffs)
        out[n] = fractional_force(grid, field, b)[0]
    return out


def l1_tempered_derivative(values: Sequence[float], dt: float, theta: float, vartheta: float) -> np.ndarray:
    """Temperovani Caputo izvod po-delovima-linearnog signala (L1 konvolucija).

    Težine su tačni integrali (t-s)^{-θ} e^{-ϑ(t-s)} po svakom podintervalu.
    """
    values = np.asarray(values, dtype=float)
    slopes = np.diff(values) / dt
    n_points = len(values)
    a = 1.0 - theta
    out = np.zeros(n_points)
    for n in range(1, n_points):
        lags = dt * np.arange(n, -1, -1)  # t_n - t_j za j = 0..n
        P = special.gammainc(a, vartheta * lags)
        out[n] = vartheta ** (-a) * np.sum(slopes[:n] * (P[:-1] - P[1:]))
    return out


def tempered_derivative_of_ramp(t: float, theta: float, vartheta: float) -> float:
    """Zatvorena forma za 𝒱(t) = t: γ(1-θ, ϑt) / (Γ(1-θ) ϑ^{1-θ})"""
    a = 1.0 - theta
    return float(special.gammainc(a, vartheta * t) / vartheta**a)
