import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional

import numpy as np
import pandas as pd


@dataclass
class State:
    """Pomeranje, brzina i ubrzanje (slobodni DOF-ovi) na jednom vremenskom nivou"""
    Q: np.ndarray
    Qd: np.ndarray
    Qdd: np.ndarray
    n: int = 0
    t: float = 0.0

    def is_finite(self) -> bool:
        return bool(np.all(np.isfinite(self.Q)) and np.all(np.isfinite(self.Qd))
                    and np.all(np.isfinite(self.Qdd)))


ENERGY_COLUMNS = [
    "t", "kinetic", "elastic", "fractional", "delay", "potential", "total", "sup_norm", "running_sum",
]


@dataclass(frozen=True)
class EnergyRecord:
    t: float
    kinetic: float
    elastic: float
    fractional: float
    delay: float
    potential: float
    total: float
    sup_norm: float
    running_sum: float = 0.0

    @classmethod
    def compose(cls, t: float, kinetic: float, elastic: float, fractional: float,
                delay: float, potential: float, sup_norm: float,
                running_sum: float = 0.0) -> "EnergyRecord":
        total = kinetic + elastic + fractional + delay - potential
        return cls(t, kinetic, elastic, fractional, delay, potential, total, sup_norm, running_sum)

    def is_finite(self) -> bool:
        return all(math.isfinite(getattr(self, c)) for c in ENERGY_COLUMNS)


class VerdictKind(str, Enum):
    COMPLETED = "Completed"
    BLEW_UP = "BlewUpAt"
    FAILED = "FailedAt"


@dataclass(frozen=True)
class RunVerdict:
    kind: VerdictKind
    t: Optional[float] = None
    reason: str = ""

    @classmethod
    def completed(cls) -> "RunVerdict":
        return cls(VerdictKind.COMPLETED)

    @classmethod
    def blew_up(cls, t: float, reason: str = "") -> "RunVerdict":
        return cls(VerdictKind.BLEW_UP, t, reason)

    @classmethod
    def failed(cls, t: float, reason: str) -> "RunVerdict":
        return cls(VerdictKind.FAILED, t, reason)

    def __str__(self) -> str:
        if self.kind == VerdictKind.COMPLETED:
            return self.kind.value
        return f"{self.kind.value}({self.t:.17g})"


@dataclass
class EnergyTrace:
    """Vremenska serija diskretne energije i presuda run-a"""
    records: List[EnergyRecord] = field(default_factory=list)
    verdict: RunVerdict = field(default_factory=RunVerdict.completed)
    decay_rate: Optional[float] = None

    def append(self, record: EnergyRecord):
        if self.records and record.t <= self.records[-1].t:
            raise ValueError(f"Energy records must have increasing t ({record.t} after {self.records[-1].t})")
        self.records.append(record)

    def __len__(self) -> int:
        return len(self.records)

    def times(self) -> np.ndarray:
        return np.array([r.t for r in self.records])

    def totals(self) -> np.ndarray:
        return np.array([r.total for r in self.records])

    def sup_norms(self) -> np.ndarray:
        return np.array([r.sup_norm for r in self.records])

    def h_values(self) -> np.ndarray:
        """H(t) = -E(t)"""
        return -self.totals()

    def total_at(self, t: float) -> float:
        """Ukupna energija u prvom zapisu sa vremenom >= t"""
        times = self.times()
        idx = int(np.searchsorted(times, t - 1e-12))
        idx = min(idx, len(times) - 1)
        return self.records[idx].total

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            [[getattr(r, c) for c in ENERGY_COLUMNS] for r in self.records],
            columns=ENERGY_COLUMNS,
        )


@dataclass
class Snapshot:
    t: float
    x: np.ndarray
    values: np.ndarray


@dataclass
class RunResult:
    snapshots: List[Snapshot]
    trace: EnergyTrace
    verdict: RunVerdict
    dt_used: float
    iterations: List[int] = field(default_factory=list)
    wall_time: float = 0.0

    def summary(self, t_star: Optional[float] = None) -> Dict[str, Any]:
        """Sadržaj summary izveštaja; bez t_star se za blow-up uzima vreme iz presude"""
        if t_star is None and self.verdict.kind == VerdictKind.BLEW_UP:
            t_star = self.verdict.t
        return {
            "verdict": self.verdict.kind.value,
            "t_star": t_star,
            "w": self.trace.decay_rate,
            "E0": self.trace.records[0].total if self.trace.records else None,
            "wall": self.wall_time,
            "dt_used": self.dt_used,
            "records": len(self.trace),
            "reason": self.verdict.reason or None,
        }
