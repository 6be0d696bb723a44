"""
Sweep parametara: Dekartova mreža do dve promenljive, paralelno po procesima.

Redosled redova u mapi je redosled mreže, nezavisno od broja radnika.
"""
import logging
import math
import re
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from itertools import product
from typing import Any, Dict, List, Sequence, Tuple

from models.simulation_config import SimulationConfig
from models.simulation_state import VerdictKind
from parsers.config_parser import FIELD_SPECS, ConfigError, validate_config
from solver.newmark import run

from .observables import DecayFitError, continuous_E0, fit_decay_rate

logger = logging.getLogger(__name__)

MAP_COLUMNS_TAIL = ["verdict", "E0", "w", "t_star"]
MAX_VARIED = 2

_NUMERIC_KEYS = {key for key, (convert, _) in FIELD_SPECS.items() if convert is float}


class SweepSpecError(ValueError):
    pass


@dataclass(frozen=True)
class VarySpec:
    name: str
    values: Tuple[float, ...]


class VarySpecParser:
    """Parsira `name=start:step:stop` (uključivo) ili `name=v1,v2,...`"""

    def __init__(self):
        self.spec_pattern = re.compile(r'^\s*([A-Za-z_][A-Za-z0-9_]*)\s*=\s*(.+?)\s*$')

    def parse(self, spec: str) -> VarySpec:
        match = self.spec_pattern.match(spec)
        if not match:
            raise SweepSpecError(f"expected 'name=start:step:stop' or 'name=v1,v2', got {spec!r}")
        name, body = match.group(1), match.group(2)
        if name not in _NUMERIC_KEYS:
            raise SweepSpecError(f"cannot vary {name!r}; numeric keys: {', '.join(sorted(_NUMERIC_KEYS))}")
        try:
            if ':' in body:
                values = self._parse_range(body)
            else:
                values = tuple(float(v) for v in body.split(',') if v.strip())
        except ValueError as e:
            raise SweepSpecError(f"bad values in {spec!r}: {e}")
        return VarySpec(name, values)

    @staticmethod
    def _parse_range(body: str) -> Tuple[float, ...]:
        parts = body.split(':')
        if len(parts) != 3:
            raise ValueError("range must be start:step:stop")
        start, step, stop = (float(p) for p in parts)
        if not step > 0:
            raise ValueError(f"step must be > 0, got {step}")
        if stop < start:
            return ()
        count = int(math.floor((stop - start) / step + 1e-9)) + 1
        return tuple(float(f"{start + i * step:.12g}") for i in range(count))


def build_sweep_grid(base: SimulationConfig,
                     specs: Sequence[VarySpec]) -> List[Tuple[Dict[str, float], SimulationConfig]]:
    """Tačke mreže u leksikografskom redosledu (prvi --vary je spoljna petlja)"""
    if not 1 <= len(specs) <= MAX_VARIED:
        raise SweepSpecError(f"sweep takes 1 or 2 varied parameters, got {len(specs)}")
    names = [s.name for s in specs]
    if len(set(names)) != len(names):
        raise SweepSpecError(f"parameter varied twice: {names}")

    points = []
    for combo in product(*(s.values for s in specs)):
        params = dict(zip(names, combo))
        try:
            cfg = validate_config(base.replace(**params))
        except ConfigError as e:
            raise SweepSpecError(f"invalid sweep point {params}: {e}")
        points.append((params, cfg))
    return points


def sweep_point(cfg: SimulationConfig) -> Dict[str, Any]:
    """Jedna tačka mape: presuda, E(0) i w ili t*"""
    result = run(cfg)
    row: Dict[str, Any] = {
        "verdict": result.verdict.kind.value,
        "E0": continuous_E0(cfg),
        "w": float("nan"),
        "t_star": float("nan"),
    }
    if result.verdict.kind == VerdictKind.COMPLETED:
        try:
            row["w"] = fit_decay_rate(result.trace, cfg.fit_start).w
        except DecayFitError as e:
            logger.info("No decay fit for lambda=%g: %s", cfg.lambda_, e)
    elif result.verdict.kind == VerdictKind.BLEW_UP:
        row["t_star"] = result.verdict.t
    return row


def run_sweep(base: SimulationConfig, specs: Sequence[VarySpec], workers: int = 1) -> List[Dict[str, Any]]:
    points = build_sweep_grid(base, specs)
    configs = [cfg for _, cfg in points]
    logger.info("Sweep over %d points with %d worker(s)", len(configs), workers)

    if workers <= 1 or len(configs) <= 1:
        outcomes = [sweep_point(cfg) for cfg in configs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as executor:
            outcomes = list(executor.map(sweep_point, configs))

    return [{**params, **outcome} for (params, _), outcome in zip(points, outcomes)]
