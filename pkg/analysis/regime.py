"""
Provera teorijskog režima pre simulacije: uslovi (A1), (A2) i interval za v.

Sve provere koriste analitičko A0 = (π / sin θπ) ϑ^{θ-1}.
"""
from typing import Optional, Tuple

from models.simulation_config import SimulationConfig
from solver.diffusive import analytic_A0


def damping_product(cfg: SimulationConfig) -> float:
    """b·A0 (za section2 konvenciju jednako ϑ^{θ-1})"""
    return cfg.b_coeff * analytic_A0(cfg.theta, cfg.vartheta)


def check_a1_condition(cfg: SimulationConfig) -> bool:
    """a1 > a2 + 2bA0"""
    return cfg.a1 > cfg.a2 + 2.0 * damping_product(cfg)


def admissible_v_interval(cfg: SimulationConfig) -> Optional[Tuple[float, float]]:
    """(a2/2 + bA0, a1 - bA0 - a2/2) ili None kada je interval prazan"""
    bA0 = damping_product(cfg)
    lo = 0.5 * cfg.a2 + bA0
    hi = cfg.a1 - bA0 - 0.5 * cfg.a2
    if lo >= hi:
        return None
    return lo, hi


def check_a2_condition(cfg: SimulationConfig) -> bool:
    """ϑ^{1-θ} < a2 (režim u kome dominira kašnjenje)"""
    return cfg.vartheta ** (1.0 - cfg.theta) < cfg.a2


def default_v_weight(cfg: SimulationConfig) -> float:
    interval = admissible_v_interval(cfg)
    if interval is None:
        raise ValueError(
            f"admissible v interval is empty for a1={cfg.a1}, a2={cfg.a2}; pass v_weight explicitly"
        )
    return 0.5 * (interval[0] + interval[1])
