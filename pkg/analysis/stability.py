"""
Konstante potencijalne jame i kritične amplitude
================================================

Za profil 𝒱₀ = λ(x/L)²(1-x/L)² sa 𝒱₁ = 0 važi (smena u = x/L):

    ‖𝒱₀''‖²   = 0.8 λ² / L³
    ∫|𝒱₀|^p   = λ^p · L · B(2p+1, 2p+1)

pa je E(0)(λ) = 0.4λ²/L³ - (λ^p/p) L B, bez ikakve kvadrature.
"""
import logging
import math
from dataclasses import asdict, dataclass
from typing import Any, Dict, Iterable, List, Optional, Tuple

from scipy import optimize, special

from models.simulation_config import Prediction, RegimeReport, SimulationConfig

from .observables import continuous_E0, continuous_I0
from .regime import admissible_v_interval, check_a1_condition, check_a2_condition

logger = logging.getLogger(__name__)

# Vrednosti (λ_c, d, λ_d) iz objavljene tabele, L = 1
PUBLISHED_TABLE1: Dict[int, Tuple[float, float, float]] = {
    3: (14414.4, 16.2348, 6.372),
    4: (591.66, 2.4674, 2.484),
    5: (198.15, 1.3788, 1.8567),
    6: (112.87, 1.0472, 1.6180),
    7: (79.90, 0.8467, 1.455),
    8: (63.15, 0.806, 1.419),
    9: (53.21, 0.688, 1.311),
}


# Unosi za koje objavljena d (pa i λ_d) ne odgovara formuli za d
KNOWN_MISPRINTS = {(7, "d"), (7, "lambda_d"), (9, "d"), (9, "lambda_d")}


class WellDepthError(ValueError):
    pass


@dataclass(frozen=True)
class WellConstants:
    p: float
    C_star: float
    d: float
    lambda_c: float
    lambda_d: float

    def to_dict(self) -> Dict[str, float]:
        return asdict(self)


def sobolev_constant(L: float = 1.0) -> float:
    """C*_p = L²/π²"""
    return L**2 / math.pi**2


def well_depth(p: float, L: float = 1.0) -> float:
    """d = ((p-2)/2p) · C*^{2/(2-p)}"""
    if p <= 2.0:
        raise ValueError(f"source exponent must be > 2, got {p}")
    return (p - 2.0) / (2.0 * p) * sobolev_constant(L) ** (2.0 / (2.0 - p))


def _beta(p: float) -> float:
    return float(special.beta(2.0 * p + 1.0, 2.0 * p + 1.0))


def profile_energy(lam: float, p: float, L: float = 1.0) -> float:
    """E(0) za referentni profil u zatvorenoj formi"""
    return 0.4 * lam**2 / L**3 - lam**p * L * _beta(p) / p


def _energy_maximizer(p: float, L: float) -> float:
    return (0.8 / (L**4 * _beta(p))) ** (1.0 / (p - 2.0))


def lambda_critical(p: float, L: float = 1.0) -> float:
    """λ_c: E(0) = 0"""
    try:
        lam = (0.4 * p / (L**4 * _beta(p))) ** (1.0 / (p - 2.0))
    except OverflowError:
        lam = math.inf
    if math.isfinite(lam) and lam > 0.0:
        return lam

    logger.debug("lambda_critical closed form not finite for p=%s, bisecting", p)
    lo = _energy_maximizer(p, L)
    hi = 2.0 * lo
    while profile_energy(hi, p, L) > 0.0:
        hi *= 2.0
    return optimize.brentq(lambda lam: profile_energy(lam, p, L), lo, hi, xtol=1e-14, rtol=1e-14)


def lambda_depth(p: float, L: float = 1.0) -> float:
    """Najmanji pozitivan koren E(0)(λ) = d"""
    d = well_depth(p, L)
    lam_max = _energy_maximizer(p, L)
    e_max = profile_energy(lam_max, p, L)
    if e_max <= d:
        raise WellDepthError(f"no amplitude reaches the well depth for p={p}: max E(0)={e_max:.6g} <= d={d:.6g}")
    return optimize.brentq(lambda lam: profile_energy(lam, p, L) - d, 0.0, lam_max, xtol=1e-14, rtol=1e-14)


def well_constants(p: float, L: float = 1.0) -> WellConstants:
    return WellConstants(
        p=p,
        C_star=sobolev_constant(L),
        d=well_depth(p, L),
        lambda_c=lambda_critical(p, L),
        lambda_d=lambda_depth(p, L),
    )


def table1(p_list: Iterable[float], L: float = 1.0) -> List[WellConstants]:
    return [well_constants(p, L) for p in p_list]


def compare_table1(rows: List[WellConstants]) -> List[Dict[str, Any]]:
    """Relativna odstupanja od objavljenih vrednosti (samo za p iz tabele)"""
    report = []
    for row in rows:
        printed = PUBLISHED_TABLE1.get(int(row.p)) if float(row.p).is_integer() else None
        if printed is None:
            continue
        for name, computed, reference in zip(("lambda_c", "d", "lambda_d"),
                                             (row.lambda_c, row.d, row.lambda_d), printed):
            report.append({
                "p": row.p,
                "quantity": name,
                "computed": computed,
                "printed": reference,
                "rel_dev": abs(computed - reference) / abs(reference),
                "misprint": (int(row.p), name) in KNOWN_MISPRINTS,
            })
    return report


def check_small_energy(cfg: SimulationConfig, E0: float, I0: Optional[float] = None) -> bool:
    """C*^p ((2p/(p-2)) E0)^{(p-2)/2} < 1 i I(0) > 0"""
    p = cfg.p
    if I0 is None:
        I0 = continuous_I0(cfg)
    product = sobolev_constant(cfg.L) ** p * ((2.0 * p / (p - 2.0)) * max(E0, 0.0)) ** ((p - 2.0) / 2.0)
    return product < 1.0 and I0 > 0.0


def lambda_band(cfg: SimulationConfig) -> str:
    """Položaj λ u odnosu na λ_d i λ_c"""
    try:
        lam_d = lambda_depth(cfg.p, cfg.L)
    except WellDepthError:
        return ""
    lam_c = lambda_critical(cfg.p, cfg.L)
    if cfg.lambda_ < lam_d:
        return "inside_well"
    if cfg.lambda_ < lam_c:
        return "above_well"
    return "negative_energy"


def build_regime_report(cfg: SimulationConfig) -> RegimeReport:
    a1_holds = check_a1_condition(cfg)
    a2_holds = check_a2_condition(cfg)
    E0 = continuous_E0(cfg)
    small_energy = check_small_energy(cfg, E0)

    if a1_holds and E0 > 0.0 and small_energy:
        predicted = Prediction.EXPONENTIAL_DECAY
    elif E0 < 0.0 and a2_holds:
        predicted = Prediction.BLOW_UP
    else:
        predicted = Prediction.INDETERMINATE

    return RegimeReport(
        a1_condition_holds=a1_holds,
        a2_condition_holds=a2_holds,
        v_interval=admissible_v_interval(cfg),
        E0=E0,
        d_depth=well_depth(cfg.p, cfg.L),
        small_energy_holds=small_energy,
        predicted=predicted,
        lambda_band=lambda_band(cfg),
    )
