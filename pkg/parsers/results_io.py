"""
Upis i čitanje izlaza run-a: CSV sa punom preciznošću i `key = value` izveštaji.

Svaki fajl koji ResultsWriter upiše ResultsReader ponovo čita bez gubitka.
"""
import logging
import math
import os
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence

import numpy as np
import pandas as pd

from config.settings import settings
from models.simulation_config import SimulationConfig
from models.simulation_state import ENERGY_COLUMNS, EnergyRecord, EnergyTrace, Snapshot

from .config_parser import ConfigParser

logger = logging.getLogger(__name__)

ENERGY_FILE = "energy.csv"
SNAPSHOT_FILE = "snapshots.csv"
REGIME_FILE = "regime.txt"
SUMMARY_FILE = "summary.txt"
CONFIG_FILE = "config.txt"
MAP_FILE = "map.csv"
SNAPSHOT_COLUMNS = ["t", "x", "value"]
TABLE1_COLUMNS = ["p", "lambda_c", "d", "lambda_d"]


def _format_value(value: Any) -> str:
    if value is None:
        return "none"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


class ResultsWriter:
    """Piše izlaze jednog run-a (ili sweep-a) u izlazni direktorijum"""

    def __init__(self, out_dir: Optional[str] = None):
        self.out_dir = out_dir or settings.OUTPUT_FOLDER
        self.float_format = settings.CSV_FLOAT_FORMAT

    def _path(self, name: str) -> str:
        os.makedirs(self.out_dir, exist_ok=True)
        return os.path.join(self.out_dir, name)

    def write_frame(self, frame: pd.DataFrame, name: str) -> str:
        path = self._path(name)
        frame.to_csv(path, index=False, float_format=self.float_format, na_rep="nan", encoding="utf-8")
        logger.debug("Wrote %d rows to %s", len(frame), path)
        return path

    def write_energy(self, trace: EnergyTrace) -> str:
        return self.write_frame(trace.to_frame(), ENERGY_FILE)

    def write_snapshots(self, snapshots: Iterable[Snapshot]) -> str:
        blocks = [
            pd.DataFrame({"t": np.full(len(s.x), s.t), "x": s.x, "value": s.values})
            for s in snapshots
        ]
        frame = pd.concat(blocks, ignore_index=True) if blocks else pd.DataFrame(columns=SNAPSHOT_COLUMNS)
        return self.write_frame(frame, SNAPSHOT_FILE)

    def write_report(self, values: Mapping[str, Any], name: str) -> str:
        path = self._path(name)
        with open(path, "w", encoding="utf-8") as f:
            for key, value in values.items():
                f.write(f"{key} = {_format_value(value)}\n")
        return path

    def write_config(self, config: SimulationConfig) -> str:
        path = self._path(CONFIG_FILE)
        with open(path, "w", encoding="utf-8") as f:
            f.write(ConfigParser.format_config(config))
        return path

    def write_map(self, rows: Sequence[Mapping[str, Any]], columns: Sequence[str]) -> str:
        frame = pd.DataFrame(list(rows), columns=list(columns))
        return self.write_frame(frame, MAP_FILE)

    def write_table1(self, rows: Sequence[Any], path: str) -> str:
        """Tabela (p, λ_c, d, λ_d) na zadatu putanju"""
        frame = pd.DataFrame([[r.p, r.lambda_c, r.d, r.lambda_d] for r in rows], columns=TABLE1_COLUMNS)
        frame.to_csv(path, index=False, float_format=self.float_format, encoding="utf-8")
        return path


class ResultsReader:
    def __init__(self, out_dir: Optional[str] = None):
        self.out_dir = out_dir or settings.OUTPUT_FOLDER

    def _path(self, name: str) -> str:
        return name if os.path.isabs(name) or os.path.dirname(name) else os.path.join(self.out_dir, name)

    def read_frame(self, name: str) -> pd.DataFrame:
        return pd.read_csv(self._path(name), float_precision="round_trip")

    def read_energy(self, name: str = ENERGY_FILE) -> EnergyTrace:
        frame = self.read_frame(name)
        trace = EnergyTrace()
        for row in frame[ENERGY_COLUMNS].itertuples(index=False):
            trace.append(EnergyRecord(*(float(v) for v in row)))
        return trace

    def read_snapshots(self, name: str = SNAPSHOT_FILE) -> List[Snapshot]:
        frame = self.read_frame(name)
        return [
            Snapshot(float(t), group["x"].to_numpy(), group["value"].to_numpy())
            for t, group in frame.groupby("t", sort=False)
        ]

    def read_report(self, name: str) -> Dict[str, str]:
        """Čita `key = value` izveštaj kao mapu stringova"""
        values: Dict[str, str] = {}
        with open(self._path(name), "r", encoding="utf-8") as f:
            for line in f:
                if "=" not in line:
                    continue
                key, value = line.split("=", 1)
                values[key.strip()] = value.strip()
        return values

    def read_config(self, name: str = CONFIG_FILE) -> SimulationConfig:
        return ConfigParser().parse_config_file(self._path(name))

    def read_table1(self, path: str) -> pd.DataFrame:
        return pd.read_csv(path, float_precision="round_trip")


def parse_report_float(text: str) -> float:
    return math.nan if text in ("none", "") else float(text)
