"""
Observables: energija, funkcionali I i J, fit eksponencijalnog opadanja i detekcija blow-up-a
"""
import logging
import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from scipy import integrate

from fem.assembly import FemSystem
from fem.nonlinear import lp_integral
from models.simulation_config import SimulationConfig
from models.simulation_state import EnergyRecord, EnergyTrace, State, VerdictKind
from solver.delay_line import DelayBuffer
from solver.diffusive import DiffusiveField, XiGrid, build_grid
from solver.energy import discrete_energy, effective_b, fractional_energy, modal_mass_norms

from .regime import default_v_weight

logger = logging.getLogger(__name__)

__all__ = [
    'DecayFit',
    'DecayFitError',
    'discrete_energy',
    'continuous_E0',
    'continuous_I0',
    'functionals_IJ',
    'weighted_energy',
    'fit_decay_rate',
    'detect_blowup',
    'energy_dissipation',
]


class DecayFitError(ValueError):
    pass


@dataclass(frozen=True)
class DecayFit:
    w: float
    K: float
    r_squared: float

    def __iter__(self):
        return iter((self.w, self.K, self.r_squared))


def _profile_integrals(cfg: SimulationConfig) -> Tuple[float, float]:
    """(‖𝒱₀''‖², ∫|𝒱₀|^p) adaptivnom kvadraturom, nezavisno od mreže"""
    L, lam, p = cfg.L, cfg.lambda_, cfg.p
    if lam == 0.0:
        return 0.0, 0.0

    def second_derivative(x: float) -> float:
        u = x / L
        return lam * (2.0 - 12.0 * u + 12.0 * u * u) / L**2

    def profile(x: float) -> float:
        u = x / L
        return lam * u * u * (1.0 - u) ** 2

    bending, _ = integrate.quad(lambda x: second_derivative(x) ** 2, 0.0, L, epsabs=0.0, epsrel=1e-13)
    lp, _ = integrate.quad(lambda x: abs(profile(x)) ** p, 0.0, L, epsabs=0.0, epsrel=1e-13, limit=200)
    return bending, lp


def continuous_E0(cfg: SimulationConfig) -> float:
    """E(0) = ½‖𝒱₀''‖² - (1/p)‖𝒱₀‖_p^p za 𝒱₁ = 0, f₀ = 0, 𝒢 = 0"""
    bending, lp = _profile_integrals(cfg)
    return 0.5 * bending - lp / cfg.p


def continuous_I0(cfg: SimulationConfig) -> float:
    """I(0) = ‖𝒱₀''‖² - ‖𝒱₀‖_p^p"""
    bending, lp = _profile_integrals(cfg)
    return bending - lp


def functionals_IJ(sys: FemSystem,
                   cfg: SimulationConfig,
                   state: State,
                   field: Optional[DiffusiveField],
                   buf: Optional[DelayBuffer],
                   v_weight: Optional[float] = None,
                   grid: Optional[XiGrid] = None) -> Tuple[float, float]:
    """I i J na diskretnom stanju.

    Član kašnjenja v·s·∫∫|z|² se diskretizuje kao v·Δt·Σ‖Q̇ʲ‖²_M iz istog
    prstena normi koji koristi energija.
    """
    v = default_v_weight(cfg) if v_weight is None else v_weight
    if grid is None and field is not None and cfg.fractional_on:
        grid = build_grid(cfg.theta, cfg.R_xi, cfg.M_xi)

    bending = float(state.Q @ (sys.K_mat @ state.Q))
    fractional = fractional_energy(sys, grid, field, effective_b(cfg))
    lp = lp_integral(sys, state.Q, cfg.p) if cfg.source_on else 0.0
    delay = v * cfg.dt * (buf.running_sum if buf is not None else 0.0)

    I = bending + 2.0 * fractional - lp + delay
    J = 0.5 * bending + fractional - lp / cfg.p + delay
    return I, J


def weighted_energy(record: EnergyRecord, v_weight: float, dt: float) -> float:
    """E u kontinualnoj formi: član kašnjenja nosi v·Δt umesto a2/2"""
    return (record.kinetic + record.elastic + record.fractional - record.potential
            + v_weight * dt * record.running_sum)


def fit_decay_rate(trace: EnergyTrace, t_start: float) -> DecayFit:
    """Linearni fit ln E = ln K - w t na [t_start, T]"""
    times = trace.times()
    totals = trace.totals()
    mask = times >= t_start - 1e-12
    t, E = times[mask], totals[mask]
    if len(t) < 2:
        raise DecayFitError(f"need at least 2 records after t={t_start}, got {len(t)}")
    if np.any(E <= 0.0):
        bad = float(t[np.argmax(E <= 0.0)])
        raise DecayFitError(f"non-positive energy at t={bad:.6g} inside fit window")

    y = np.log(E)
    slope, intercept = np.polyfit(t, y, 1)
    residual = y - (slope * t + intercept)
    ss_res = float(np.sum(residual**2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r_squared = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return DecayFit(w=-float(slope), K=math.exp(intercept), r_squared=r_squared)


def detect_blowup(trace: EnergyTrace, cfg: SimulationConfig) -> Optional[float]:
    """Prvo t sa sup-normom iznad praga ili vreme otkaza integratora, šta je ranije"""
    candidates = []
    sup = trace.sup_norms()
    above = np.nonzero(sup > cfg.blowup_threshold)[0]
    if len(above):
        candidates.append(float(trace.times()[above[0]]))
    if trace.verdict.kind == VerdictKind.BLEW_UP and trace.verdict.t is not None:
        candidates.append(float(trace.verdict.t))
    return min(candidates) if candidates else None


def energy_dissipation(sys: FemSystem,
                       cfg: SimulationConfig,
                       grid: Optional[XiGrid],
                       prev: State,
                       curr: State,
                       prev_field: Optional[DiffusiveField],
                       curr_field: Optional[DiffusiveField]) -> float:
    """Disipacija iz diskretnog zakona energije (bez izvora i kašnjenja):

        Eⁿ - Eⁿ⁺¹ = Δt a1 ‖v̄‖²_M + 2bΔtΔξ Σ_ℓ (ξ_ℓ² + ϑ) ‖𝒢̄_ℓ‖²_M,

    gde su v̄ i 𝒢̄ srednje vrednosti dva nivoa.
    """
    dt = cfg.dt
    v_mid = 0.5 * (prev.Qd + curr.Qd)
    friction = dt * cfg.a1 * sys.mass_norm2(v_mid)
    b = effective_b(cfg)
    if b == 0.0 or grid is None or prev_field is None or curr_field is None:
        return friction
    G_mid = DiffusiveField(0.5 * (prev_field.G + curr_field.G))
    k = grid.xi**2 + cfg.vartheta
    fractional = 2.0 * b * dt * grid.dxi * float(np.sum(k * modal_mass_norms(sys, G_mid)))
    return friction + fractional
