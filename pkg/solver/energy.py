"""
Diskretna energija E_Δⁿ po komponentama.

Frakcioni član je b·Σ_ℓ ‖𝒢_ℓ‖²_M Δξ: sa tom formom diskretni zakon
disipacije važi tačno za svako θ (za θ = 1/2 je μ_ℓ ≡ 1).
"""
from typing import Optional

import numpy as np

from fem.assembly import FemSystem
from fem.nonlinear import lp_integral
from models.simulation_config import SimulationConfig
from models.simulation_state import EnergyRecord, State

from .delay_line import DelayBuffer
from .diffusive import DiffusiveField, XiGrid


def effective_b(cfg: SimulationConfig) -> float:
    """b iz izabrane konvencije, 0 kada je frakciono prigušenje isključeno"""
    return cfg.b_coeff if cfg.fractional_on else 0.0


def modal_mass_norms(sys: FemSystem, field: DiffusiveField) -> np.ndarray:
    """‖𝒢_ℓ‖²_M za svaki mod ℓ, računato iz G"""
    G = field.G
    if G.size == 0:
        return np.zeros(G.shape[0])
    MG = (sys.M_mat @ G.T).T
    return np.einsum("ij,ij->i", G, MG)


def fractional_energy(sys: FemSystem, grid: Optional[XiGrid], field: Optional[DiffusiveField], b: float) -> float:
    if b == 0.0 or grid is None or field is None:
        return 0.0
    norms = field.mass_norms if field.mass_norms is not None else modal_mass_norms(sys, field)
    return float(b * grid.dxi * np.sum(norms))


def discrete_energy(sys: FemSystem,
                    cfg: SimulationConfig,
                    state: State,
                    field: Optional[DiffusiveField],
                    buf: Optional[DelayBuffer],
                    grid: Optional[XiGrid] = None) -> EnergyRecord:
    """Komponente E_Δⁿ; van opsega float-a zapis ostaje sa inf/nan vrednostima"""
    with np.errstate(over="ignore", invalid="ignore"):
        kinetic = 0.5 * sys.mass_norm2(state.Qd)
        elastic = 0.5 * float(state.Q @ (sys.K_mat @ state.Q))
        fractional = fractional_energy(sys, grid, field, effective_b(cfg))
        potential = lp_integral(sys, state.Q, cfg.p) / cfg.p if cfg.source_on else 0.0
    running_sum = buf.running_sum if buf is not None else 0.0
    delay = 0.5 * cfg.a2 * running_sum
    return EnergyRecord.compose(
        t=state.t,
        kinetic=kinetic,
        elastic=elastic,
        fractional=fractional,
        delay=delay,
        potential=potential,
        sup_norm=sys.sup_norm(state.Q),
        running_sum=running_sum,
    )
