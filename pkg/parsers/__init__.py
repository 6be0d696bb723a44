"""
Parsers modul: konfiguracioni fajlovi i izlazni CSV/izveštaji
"""

from .config_parser import ConfigError, ConfigParser, validate_config
from .results_io import ResultsReader, ResultsWriter

__all__ = [
    'ConfigError',
    'ConfigParser',
    'validate_config',
    'ResultsReader',
    'ResultsWriter',
]
