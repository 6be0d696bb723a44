import logging
import math
import re
from typing import Any, Callable, Dict, Mapping, Optional, Tuple

from config.settings import settings
from models.simulation_config import BConvention, SimulationConfig

logger = logging.getLogger(__name__)

DELAY_TOLERANCE = 1e-9


class ConfigError(ValueError):
    """Greška u konfiguraciji; `line` je broj linije u fajlu ako je poznat"""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message)


def _parse_bool(text: Any) -> bool:
    if isinstance(text, bool):
        return text
    value = str(text).strip().lower()
    if value in ("1", "true", "yes", "on"):
        return True
    if value in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _parse_int(text: Any) -> int:
    if isinstance(text, bool):
        raise ValueError(f"not an integer: {text!r}")
    if isinstance(text, int):
        return text
    value = float(text)
    if not value.is_integer():
        raise ValueError(f"not an integer: {text!r}")
    return int(value)


def _parse_optional_float(text: Any) -> Optional[float]:
    if text is None or str(text).strip().lower() in ("", "none"):
        return None
    return float(text)


# ključ -> (konverzija, obavezan)
FIELD_SPECS: Dict[str, Tuple[Callable[[Any], Any], bool]] = {
    "L": (float, True),
    "T": (float, True),
    "N_nodes": (_parse_int, True),
    "dt": (float, True),
    "theta": (float, True),
    "vartheta": (float, True),
    "a1": (float, True),
    "a2": (float, True),
    "s_delay": (float, True),
    "p": (float, True),
    "lambda": (float, True),
    "R_xi": (float, False),
    "M_xi": (_parse_int, False),
    "newmark_beta": (float, False),
    "newmark_gamma": (float, False),
    "nl_tol": (float, False),
    "nl_max_iter": (_parse_int, False),
    "blowup_threshold": (float, False),
    "b_convention": (BConvention, False),
    "source_on": (_parse_bool, False),
    "fractional_on": (_parse_bool, False),
    "snapshot_stride": (_parse_int, False),
    "decay_fit_start": (_parse_optional_float, False),
    "retry_halving": (_parse_bool, False),
    "mode_cutoff": (_parse_optional_float, False),
    "mode_filter_stride": (_parse_int, False),
}


def validate_config(raw: Mapping[str, Any]) -> SimulationConfig:
    """Validira sirovu mapu parametara i vraća SimulationConfig sa podrazumevanim vrednostima"""
    unknown = sorted(set(raw) - set(FIELD_SPECS))
    if unknown:
        raise ConfigError(f"unknown keys: {', '.join(unknown)}")
    missing = [key for key, (_, required) in FIELD_SPECS.items() if required and key not in raw]
    if missing:
        raise ConfigError(f"missing required keys: {', '.join(missing)}")

    values: Dict[str, Any] = {}
    for key, value in raw.items():
        convert, _ = FIELD_SPECS[key]
        try:
            values[key] = convert(value)
        except (TypeError, ValueError) as e:
            raise ConfigError(f"invalid value for {key}: {e}")
    if "snapshot_stride" not in values:
        values["snapshot_stride"] = settings.SNAPSHOT_STRIDE

    for key in ("L", "T", "dt"):
        if not (math.isfinite(values[key]) and values[key] > 0):
            raise ConfigError(f"{key} must be positive, got {values[key]}")
    if values["N_nodes"] < 3:
        raise ConfigError(f"N_nodes must be >= 3, got {values['N_nodes']}")
    if not 0.0 < values["theta"] < 1.0:
        raise ConfigError(f"fractional order out of range: theta={values['theta']} not in (0, 1)")
    if not values["vartheta"] > 0:
        raise ConfigError(f"tempering vartheta must be > 0, got {values['vartheta']}")
    if values["a1"] < 0 or values["a2"] < 0:
        raise ConfigError("damping coefficients a1, a2 must be >= 0")
    if not values["p"] > 2:
        raise ConfigError(f"source exponent p must be > 2, got {values['p']}")
    if values["lambda"] < 0:
        raise ConfigError("initial amplitude lambda must be >= 0")
    if not values["s_delay"] > 0:
        raise ConfigError(f"delay s_delay must be > 0, got {values['s_delay']}")

    ratio = values["s_delay"] / values["dt"]
    m = round(ratio)
    if m < 1 or abs(ratio - m) > DELAY_TOLERANCE * max(1.0, ratio):
        raise ConfigError(
            f"delay not a multiple of dt: s_delay/dt = {ratio!r} is not an integer"
        )

    if values.get("R_xi", 1.0) <= 0:
        raise ConfigError("R_xi must be > 0")
    if values.get("M_xi", 1) < 1:
        raise ConfigError("M_xi must be >= 1")
    if not 0.0 <= values.get("newmark_beta", 0.25) <= 0.5:
        raise ConfigError("newmark_beta must lie in [0, 1/2]")
    if not 0.0 <= values.get("newmark_gamma", 0.5) <= 1.0:
        raise ConfigError("newmark_gamma must lie in [0, 1]")
    if values.get("nl_tol", 1e-10) <= 0 or values.get("nl_max_iter", 50) < 1:
        raise ConfigError("nl_tol must be > 0 and nl_max_iter >= 1")
    if values.get("blowup_threshold", 1e8) <= 0:
        raise ConfigError("blowup_threshold must be > 0")
    if values["snapshot_stride"] < 1:
        raise ConfigError("snapshot_stride must be >= 1")
    cutoff = values.get("mode_cutoff", 2.0)
    if cutoff is not None and not cutoff > 0:
        raise ConfigError(f"mode_cutoff must be > 0 or none, got {cutoff}")
    if values.get("mode_filter_stride", 1000) < 0:
        raise ConfigError("mode_filter_stride must be >= 0 (0 filters the initial data only)")

    values["lambda_"] = values.pop("lambda")
    config = SimulationConfig(**values)
    logger.debug("Validated config: m=%d, n_steps=%d", config.m_delay, config.n_steps)
    return config


class ConfigParser:
    """Parser za ravne `key = value` konfiguracione fajlove"""

    def __init__(self):
        self.line_pattern = re.compile(r'^\s*([A-Za-z_][A-Za-z0-9_]*)\s*=\s*(.*?)\s*$')

    def parse_text(self, text: str) -> Dict[str, str]:
        """Parsira tekst u sirovu mapu; greške nose broj linije"""
        raw: Dict[str, str] = {}
        for line_num, line in enumerate(text.splitlines(), 1):
            stripped = line.split('#', 1)[0].strip()
            if not stripped:
                continue
            match = self.line_pattern.match(stripped)
            if not match or not match.group(2):
                raise ConfigError(f"expected 'key = value', got {line.strip()!r}", line_num)
            key, value = match.group(1), match.group(2)
            if key not in FIELD_SPECS:
                raise ConfigError(f"unknown key {key!r}", line_num)
            if key in raw:
                raise ConfigError(f"duplicate key {key!r}", line_num)
            raw[key] = value
        return raw

    def parse_config_file(self, file_path: str) -> SimulationConfig:
        """Čita i validira konfiguracioni fajl"""
        with open(file_path, 'r', encoding='utf-8') as f:
            text = f.read()
        return validate_config(self.parse_text(text))

    @staticmethod
    def format_config(config: SimulationConfig) -> str:
        """Serijalizuje config u isti `key = value` format (round-trip)"""
        lines = []
        for key, value in config.to_dict().items():
            if value is None:
                value = "none"
            elif isinstance(value, float):
                value = repr(value)
            lines.append(f"{key} = {value}")
        return "\n".join(lines) + "\n"
