"""
Hermite kubni elementi za uklješteni Euler-Bernoulli nosač.

Svaki čvor nosi dva stepena slobode: vrednost q_i i nagib r_i. Lokalni
redosled na elementu je (q_i, r_i, q_{i+1}, r_{i+1}).
"""
from dataclasses import dataclass
from typing import Tuple

import numpy as np


@dataclass(frozen=True)
class Mesh:
    """Uniformna mreža na [0, L]"""
    L: float
    N_nodes: int

    @property
    def h(self) -> float:
        return self.L / (self.N_nodes - 1)

    @property
    def n_elements(self) -> int:
        return self.N_nodes - 1

    @property
    def n_dofs(self) -> int:
        return 2 * self.N_nodes

    @property
    def nodes(self) -> np.ndarray:
        return np.arange(self.N_nodes) * self.h


def shape_functions(xi, h: float) -> Tuple[np.ndarray, np.ndarray]:
    """Vrednosti (φ0..φ3) i druge izvode po x (φ0''..φ3'') u referentnoj koordinati xi.

    `xi` može biti skalar ili niz; rezultat ima oblik (4,) + shape(xi).
    """
    xi = np.asarray(xi, dtype=float)
    xi2 = xi * xi
    xi3 = xi2 * xi
    phi = np.stack([
        1.0 - 3.0 * xi2 + 2.0 * xi3,
        h * (xi - 2.0 * xi2 + xi3),
        3.0 * xi2 - 2.0 * xi3,
        h * (-xi2 + xi3),
    ])
    # d²/dx² = (1/h²) d²/dξ²
    d2phi = np.stack([
        (-6.0 + 12.0 * xi) / h**2,
        (-4.0 + 6.0 * xi) / h,
        (6.0 - 12.0 * xi) / h**2,
        (-2.0 + 6.0 * xi) / h,
    ])
    return phi, d2phi


def element_mass(h: float) -> np.ndarray:
    """Konzistentna matrica mase elementa (zatvorena forma)"""
    return (h / 420.0) * np.array([
        [156.0, 22.0 * h, 54.0, -13.0 * h],
        [22.0 * h, 4.0 * h**2, 13.0 * h, -3.0 * h**2],
        [54.0, 13.0 * h, 156.0, -22.0 * h],
        [-13.0 * h, -3.0 * h**2, -22.0 * h, 4.0 * h**2],
    ])


def element_stiffness(h: float) -> np.ndarray:
    """Matrica krutosti elementa za ∫ v'' w'' dx (zatvorena forma)"""
    return (1.0 / h**3) * np.array([
        [12.0, 6.0 * h, -12.0, 6.0 * h],
        [6.0 * h, 4.0 * h**2, -6.0 * h, 2.0 * h**2],
        [-12.0, -6.0 * h, 12.0, -6.0 * h],
        [6.0 * h, 2.0 * h**2, -6.0 * h, 4.0 * h**2],
    ])


def element_dofs(mesh: Mesh) -> np.ndarray:
    """Globalni indeksi (n_elements, 4) za standardnu 2-DOF-po-čvoru povezanost"""
    first = 2 * np.arange(mesh.n_elements)
    return first[:, None] + np.arange(4)[None, :]
