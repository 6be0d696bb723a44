"""
Analysis modul: režimi, observables, konstante potencijalne jame i sweep
"""

from .regime import (
    check_a1_condition,
    admissible_v_interval,
    check_a2_condition,
)
from .observables import (
    DecayFit,
    DecayFitError,
    discrete_energy,
    continuous_E0,
    continuous_I0,
    functionals_IJ,
    weighted_energy,
    fit_decay_rate,
    detect_blowup,
    energy_dissipation,
)
from .stability import (
    KNOWN_MISPRINTS,
    PUBLISHED_TABLE1,
    WellConstants,
    WellDepthError,
    well_depth,
    lambda_critical,
    lambda_depth,
    check_small_energy,
    lambda_band,
    well_constants,
    table1,
    compare_table1,
    build_regime_report,
)
from .sweep import SweepSpecError, VarySpec, VarySpecParser, run_sweep

__all__ = [
    'check_a1_condition',
    'admissible_v_interval',
    'check_a2_condition',
    'DecayFit',
    'DecayFitError',
    'discrete_energy',
    'continuous_E0',
    'continuous_I0',
    'functionals_IJ',
    'weighted_energy',
    'fit_decay_rate',
    'detect_blowup',
    'energy_dissipation',
    'KNOWN_MISPRINTS',
    'PUBLISHED_TABLE1',
    'WellConstants',
    'WellDepthError',
    'well_depth',
    'lambda_critical',
    'lambda_depth',
    'check_small_energy',
    'lambda_band',
    'well_constants',
    'table1',
    'compare_table1',
    'build_regime_report',
    'SweepSpecError',
    'VarySpec',
    'VarySpecParser',
    'run_sweep',
]
