"""
Solver modul: frakciona memorija, linija kašnjenja i Newmark integrator
"""

from .diffusive import (
    XiGrid,
    DiffusiveField,
    build_grid,
    analytic_A0,
    quadrature_A0,
    update_aux,
    fractional_force,
    scalar_response,
    l1_tempered_derivative,
    tempered_derivative_of_ramp,
)
from .delay_line import DelayBuffer, DelayBufferError
from .energy import discrete_energy, effective_b
from .newmark import (
    StepFailure,
    NonConvergenceError,
    NonFiniteError,
    EffectiveOperator,
    NewmarkStepper,
    reference_profile,
    run,
)

__all__ = [
    'XiGrid',
    'DiffusiveField',
    'build_grid',
    'analytic_A0',
    'quadrature_A0',
    'update_aux',
    'fractional_force',
    'scalar_response',
    'l1_tempered_derivative',
    'tempered_derivative_of_ramp',
    'DelayBuffer',
    'DelayBufferError',
    'discrete_energy',
    'effective_b',
    'StepFailure',
    'NonConvergenceError',
    'NonFiniteError',
    'EffectiveOperator',
    'NewmarkStepper',
    'reference_profile',
    'run',
]
