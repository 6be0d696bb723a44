import logging
import warnings
from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import numpy as np
from scipy import sparse
from scipy.linalg import LinAlgError, cholesky_banded, cho_solve_banded, eigh

from .hermite import Mesh, element_dofs, element_mass, element_stiffness

logger = logging.getLogger(__name__)

# Element spaja dva čvora × dva DOF-a: gornja poluširina trake je 3
BAND_U = 3

# Vektor koeficijenata slobodnih DOF-ova (vrednost/nagib naizmenično)
NodalField = np.ndarray


class AssemblyError(ValueError):
    pass


class ClampCompatibilityWarning(UserWarning):
    """Interpolirana funkcija ne zadovoljava uklještene granične uslove"""


def to_upper_banded(matrix: sparse.spmatrix, u: int = BAND_U) -> np.ndarray:
    """Simetrična matrica -> gornja trakasta forma za `cholesky_banded`"""
    n = matrix.shape[0]
    ab = np.zeros((u + 1, n))
    for k in range(u + 1):
        if k < n:
            ab[u - k, k:] = matrix.diagonal(k)
    return ab


@dataclass(frozen=True)
class FemSystem:
    mesh: Mesh
    M_full: sparse.csr_matrix
    K_full: sparse.csr_matrix
    free_dofs: np.ndarray
    M_mat: sparse.csr_matrix
    K_mat: sparse.csr_matrix
    M_band: np.ndarray
    K_band: np.ndarray
    M_chol: np.ndarray

    @property
    def n_free(self) -> int:
        return len(self.free_dofs)

    @property
    def value_positions(self) -> np.ndarray:
        """Pozicije DOF-ova vrednosti (q_i) unutar vektora slobodnih DOF-ova"""
        return np.arange(0, self.n_free, 2)

    def full_vector(self, Q: NodalField) -> np.ndarray:
        """Ugrađuje slobodne DOF-ove u puni vektor (uklješteni DOF-ovi = 0)"""
        full = np.zeros(self.mesh.n_dofs)
        full[self.free_dofs] = Q
        return full

    def solve_mass(self, rhs: np.ndarray) -> np.ndarray:
        return cho_solve_banded((self.M_chol, False), rhs)

    def mass_norm2(self, v: np.ndarray) -> float:
        """‖v‖²_M"""
        return float(v @ (self.M_mat @ v))

    def nodal_values(self, Q: NodalField) -> np.ndarray:
        """Vrednosti u svim čvorovima, uključujući uklještene krajeve"""
        return self.full_vector(Q)[0::2]

    def sup_norm(self, Q: NodalField) -> float:
        if len(Q) == 0:
            return 0.0
        return float(np.max(np.abs(Q[self.value_positions])))

    def modes(self) -> Tuple[np.ndarray, np.ndarray]:
        """Sopstvene frekvencije ω (rastuće) i M-ortonormirani modovi K φ = ω² M φ"""
        omega2, phi = eigh(self.K_mat.toarray(), self.M_mat.toarray())
        return np.sqrt(np.maximum(omega2, 0.0)), phi


def _assemble_global(mesh: Mesh, element_matrix: np.ndarray) -> sparse.csr_matrix:
    dofs = element_dofs(mesh)
    rows = np.repeat(dofs, 4, axis=1).ravel()
    cols = np.tile(dofs, (1, 4)).ravel()
    data = np.tile(element_matrix.ravel(), mesh.n_elements)
    n = mesh.n_dofs
    return sparse.coo_matrix((data, (rows, cols)), shape=(n, n)).tocsr()


def assemble(mesh: Mesh) -> FemSystem:
    """Sklapa globalne M i K i eliminiše uklještene DOF-ove (prva dva, poslednja dva)"""
    if mesh.N_nodes < 3:
        raise AssemblyError(f"need at least 3 nodes for a clamped beam, got {mesh.N_nodes}")

    h = mesh.h
    M_full = _assemble_global(mesh, element_mass(h))
    K_full = _assemble_global(mesh, element_stiffness(h))

    free = np.arange(2, mesh.n_dofs - 2)
    M_mat = M_full[free][:, free].tocsr()
    K_mat = K_full[free][:, free].tocsr()
    M_band = to_upper_banded(M_mat)
    K_band = to_upper_banded(K_mat)

    try:
        M_chol = cholesky_banded(M_band, lower=False)
    except LinAlgError as e:
        raise AssemblyError(f"mass matrix is not positive definite: {e}")

    logger.debug("Assembled %d elements, %d free DOFs (h=%.3e)", mesh.n_elements, len(free), h)
    return FemSystem(mesh, M_full, K_full, free, M_mat, K_mat, M_band, K_band, M_chol)


def _centered_derivative(f: Callable[[float], float], x: float, L: float) -> float:
    eps = 1e-6 * max(L, 1.0)
    if x - eps < 0.0:
        return (f(x + eps) - f(x)) / eps
    if x + eps > L:
        return (f(x) - f(x - eps)) / eps
    return (f(x + eps) - f(x - eps)) / (2.0 * eps)


def interpolate(mesh: Mesh,
                f: Callable[[float], float],
                fprime: Optional[Callable[[float], float]] = None,
                tol: float = 1e-10) -> NodalField:
    """Hermite interpolant: q_i = f(x_i), r_i = f'(x_i) u slobodnim čvorovima.

    Bez `fprime` nagib se računa centralnim razlikama.
    """
    derivative = fprime if fprime is not None else (lambda x: _centered_derivative(f, x, mesh.L))

    ends = [f(0.0), f(mesh.L), derivative(0.0), derivative(mesh.L)]
    scale = max(1.0, max(abs(f(x)) for x in mesh.nodes))
    # jednostrane razlike na krajevima imaju grešku O(eps)
    slope_tol = tol if fprime is not None else 1e-4
    if max(abs(ends[0]), abs(ends[1])) > tol * scale or max(abs(ends[2]), abs(ends[3])) > slope_tol * scale:
        warnings.warn(
            "interpolated data does not satisfy the clamped conditions "
            f"(f(0), f(L), f'(0), f'(L)) = {tuple(float(v) for v in ends)}",
            ClampCompatibilityWarning,
            stacklevel=2,
        )

    interior = mesh.nodes[1:-1]
    field = np.empty(2 * len(interior))
    field[0::2] = [f(x) for x in interior]
    field[1::2] = [derivative(x) for x in interior]
    return field


@dataclass(frozen=True)
class ModalFilter:
    """M-ortogonalni projektor na modove sa ω <= omega_max.

    Modovi su istovremeno M- i K-ortogonalni, pa projekcija ne povećava
    ni ‖·‖_M ni ‖·‖_K.
    """
    basis: np.ndarray    # (n_free, k), M-ortonormirani modovi
    M_basis: np.ndarray  # M @ basis
    omega_max: float

    @classmethod
    def build(cls, sys: FemSystem, omega_max: float) -> Optional["ModalFilter"]:
        """None kada su svi modovi ispod granice"""
        omega, phi = sys.modes()
        keep = omega <= omega_max
        if keep.all():
            return None
        basis = phi[:, keep]
        logger.debug("Mode filter keeps %d of %d modes (omega <= %.3e)", int(keep.sum()), len(omega), omega_max)
        return cls(basis, np.asarray(sys.M_mat @ basis), omega_max)

    @property
    def n_modes(self) -> int:
        return self.basis.shape[1]

    def apply(self, v: NodalField) -> NodalField:
        return self.basis @ (self.M_basis.T @ v)

    def apply_rows(self, G: np.ndarray) -> np.ndarray:
        """Projekcija svakog reda matrice (npr. polja 𝒢_ℓ)"""
        return (G @ self.M_basis) @ self.basis.T
