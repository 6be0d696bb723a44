import os
from dataclasses import dataclass, field
from typing import List


@dataclass
class Settings:
    # Putanje
    OUTPUT_FOLDER = "output"

    # Izlazni fajlovi
    CSV_FLOAT_FORMAT = "%.17g"  # puna preciznost za round-trip
    SNAPSHOT_STRIDE = 100

    # Simulacija
    PROGRESS_EVERY = 10000  # koraka između progress log linija
    DELAY_SUM_REFRESH = 1000
    AUX_NORM_REFRESH = 1000  # koraka između tačnog preračuna ‖𝒢_ℓ‖²_M
    TABLE1_P_VALUES: List[int] = field(default_factory=lambda: [3, 4, 5, 6, 7, 8, 9])

    # Sweep
    DEFAULT_WORKERS = int(os.environ.get("PLATESIM_WORKERS", "1"))

    # Logovanje
    LOG_LEVEL = os.environ.get("PLATESIM_LOG_LEVEL", "INFO")


settings = Settings()
