"""
Kružni bafer prošlih brzina/ubrzanja za član sa kašnjenjem a2·𝒱_t(x, t-s).

Prsten drži nivoe n-m .. n (m+1 parova). Normi prsten drži ‖Q̇ʲ‖²_M za
j = n-m .. n-1, tj. prozor koji ulazi u diskretnu energiju na nivou n.
"""
import logging
from collections import deque
from typing import Callable, Deque, Optional, Tuple

import numpy as np

from config.settings import settings

logger = logging.getLogger(__name__)

# f0(j) -> brzina (slobodni DOF-ovi) istorije na nivou j ∈ {-m, ..., -1}
HistoryFn = Callable[[int], np.ndarray]


class DelayBufferError(RuntimeError):
    pass


class DelayBuffer:
    def __init__(self, m: int, dt: float, refresh_every: Optional[int] = None):
        if m < 1:
            raise ValueError(f"delay steps m must be >= 1, got {m}")
        self.m = m
        self.dt = dt
        self.refresh_every = refresh_every or settings.DELAY_SUM_REFRESH
        self.ring: Deque[Tuple[np.ndarray, np.ndarray]] = deque(maxlen=m + 1)
        self.norm_ring: Deque[float] = deque(maxlen=m)
        self.head_norm = 0.0
        self.running_sum = 0.0
        self.head_level = 0
        self._pushes = 0
        self._initialized = False

    @classmethod
    def init(cls,
             m: int,
             dt: float,
             history: HistoryFn,
             v0: np.ndarray,
             norm: Callable[[np.ndarray], float]) -> "DelayBuffer":
        """Puni prsten istorijom f0 na τ = -mΔt .. -Δt i nivoom 0 sa 𝒱₁.

        Ubrzanja u prozoru istorije su nula; ubrzanje nivoa 0 se postavlja
        posle početnog rešavanja (`set_head_acceleration`).
        """
        buf = cls(m, dt)
        zeros = np.zeros_like(v0)
        for j in range(-m, 0):
            v = np.asarray(history(j), dtype=float)
            buf.ring.append((v, zeros))
            buf.norm_ring.append(norm(v))
        buf.ring.append((np.asarray(v0, dtype=float), zeros))
        buf.head_norm = norm(v0)
        buf.running_sum = float(sum(buf.norm_ring))
        buf.head_level = 0
        buf._initialized = True
        return buf

    def set_head_acceleration(self, a: np.ndarray):
        v, _ = self.ring[-1]
        self.ring[-1] = (v, np.asarray(a, dtype=float))

    def _level(self, j: int) -> Tuple[np.ndarray, np.ndarray]:
        idx = j - (self.head_level - self.m)
        if not 0 <= idx <= self.m:
            raise DelayBufferError(f"level {j} not stored (head level {self.head_level})")
        return self.ring[idx]

    def get_delayed(self, n: int) -> np.ndarray:
        """Q̇ⁿ⁺¹⁻ᵐ = Q̇ⁿ⁻ᵐ + (Δt/2)(Q̈ⁿ⁻ᵐ + Q̈ⁿ⁺¹⁻ᵐ); za n+1-m <= 0 sačuvana vrednost"""
        if not self._initialized:
            raise DelayBufferError("delay buffer queried before init")
        target = n + 1 - self.m
        if target <= 0:
            return self._level(target)[0]
        v_old, a_old = self._level(target - 1)
        _, a_new = self._level(target)
        return v_old + 0.5 * self.dt * (a_old + a_new)

    def push(self, v: np.ndarray, a: np.ndarray, m_norm: float):
        """Dodaje nivo n+1; najstariji nivo ispada, suma se ažurira inkrementalno"""
        if not self._initialized:
            raise DelayBufferError("delay buffer pushed before init")
        if self.ring and len(v) != len(self.ring[-1][0]):
            raise ValueError(f"dimension mismatch: {len(v)} vs {len(self.ring[-1][0])}")
        evicted = self.norm_ring[0] if len(self.norm_ring) == self.m else 0.0
        self.norm_ring.append(self.head_norm)
        self.running_sum += self.head_norm - evicted
        self.head_norm = float(m_norm)
        self.ring.append((np.asarray(v, dtype=float), np.asarray(a, dtype=float)))
        self.head_level += 1
        self._pushes += 1
        if self._pushes % self.refresh_every == 0:
            self.refresh_sum()

    def refresh_sum(self):
        """Ponovo računa sumu normi da bi se ograničio drift"""
        fresh = float(sum(self.norm_ring))
        if fresh and abs(fresh - self.running_sum) > 1e-9 * abs(fresh):
            logger.debug("Delay running sum drift %.3e corrected", fresh - self.running_sum)
        self.running_sum = fresh
