from dataclasses import dataclass, fields
from enum import Enum
from typing import Any, Dict, Optional, Tuple
import math


class BConvention(str, Enum):
    """Koja definicija konstante b se koristi"""
    SECTION2 = "section2"  # b = sin(θπ)/π
    SECTION7 = "section7"  # b = sin(θπ)/π · a1


class Prediction(str, Enum):
    EXPONENTIAL_DECAY = "ExponentialDecay"
    BLOW_UP = "BlowUp"
    INDETERMINATE = "Indeterminate"


@dataclass(frozen=True)
class SimulationConfig:
    """Svi fizički, diskretizacioni i kontrolni parametri jednog run-a.

    Instance se prave isključivo preko `parsers.config_parser.validate_config`,
    posle validacije su nepromenljive i mogu se deliti između procesa.
    """
    L: float
    T: float
    N_nodes: int
    dt: float
    theta: float
    vartheta: float
    a1: float
    a2: float
    s_delay: float
    p: float
    lambda_: float
    R_xi: float = 200.0
    M_xi: int = 400
    newmark_beta: float = 0.25
    newmark_gamma: float = 0.5
    nl_tol: float = 1e-10
    nl_max_iter: int = 50
    blowup_threshold: float = 1e8
    b_convention: BConvention = BConvention.SECTION2
    source_on: bool = True
    fractional_on: bool = True
    snapshot_stride: int = 100
    decay_fit_start: Optional[float] = None
    retry_halving: bool = True
    mode_cutoff: Optional[float] = 2.0
    mode_filter_stride: int = 1000

    @property
    def m_delay(self) -> int:
        """Broj koraka kašnjenja m = s/Δt"""
        return int(round(self.s_delay / self.dt))

    @property
    def n_steps(self) -> int:
        return int(math.floor(self.T / self.dt + 1e-9))

    @property
    def b_coeff(self) -> float:
        b = math.sin(self.theta * math.pi) / math.pi
        if self.b_convention == BConvention.SECTION7:
            b *= self.a1
        return b

    @property
    def fit_start(self) -> float:
        if self.decay_fit_start is not None:
            return self.decay_fit_start
        return 2.0 * self.s_delay

    @property
    def omega_cutoff(self) -> Optional[float]:
        """Najveća ugaona frekvencija početnih podataka, mode_cutoff / Δt"""
        if self.mode_cutoff is None:
            return None
        return self.mode_cutoff / self.dt

    def to_dict(self) -> Dict[str, Any]:
        """Vraća mapu sa imenima ključeva iz konfiguracionog fajla"""
        result = {}
        for f in fields(self):
            value = getattr(self, f.name)
            if isinstance(value, Enum):
                value = value.value
            key = "lambda" if f.name == "lambda_" else f.name
            result[key] = value
        return result

    def replace(self, **changes: Any) -> Dict[str, Any]:
        """Sirova mapa sa izmenama, spremna za ponovnu validaciju"""
        raw = self.to_dict()
        raw.update(changes)
        return raw


@dataclass(frozen=True)
class RegimeReport:
    a1_condition_holds: bool
    a2_condition_holds: bool
    v_interval: Optional[Tuple[float, float]]
    E0: float
    d_depth: float
    small_energy_holds: bool
    predicted: Prediction
    lambda_band: str = ""

    def to_dict(self) -> Dict[str, Any]:
        lo, hi = self.v_interval if self.v_interval else (float("nan"), float("nan"))
        return {
            "a1_condition_holds": self.a1_condition_holds,
            "a2_condition_holds": self.a2_condition_holds,
            "v_interval_lo": lo,
            "v_interval_hi": hi,
            "E0": self.E0,
            "d_depth": self.d_depth,
            "small_energy_holds": self.small_energy_holds,
            "predicted": self.predicted.value,
            "lambda_band": self.lambda_band,
        }
