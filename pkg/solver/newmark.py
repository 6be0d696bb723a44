"""
Newmark-β integrator za kompletan diskretni sistem
==================================================

Sistem u koraku n -> n+1 (svi vektori na slobodnim DOF-ovima):

    A_eff Q̈ⁿ⁺¹ = r0 + F(Qⁿ⁺¹),
    A_eff = (1 + γΔt(a1 + c_augm)) M + βΔt² K,

gde r0 sadrži sve poznate članove: prediktore, frakcionu istoriju
-2bΣμ̃_ℓ M 𝐆_ℓⁿ Δξ, c_augm članove istorije i zakašnjelu brzinu.
Nelinearnost F(Qⁿ⁺¹) rešava se Picard iteracijom sa faktorizacijom
koja se računa jednom po run-u.
"""
import dataclasses
import logging
import time
from dataclasses import dataclass
from typing import Callable, List, Optional, Tuple

import numpy as np
from scipy.linalg import LinAlgError, cholesky_banded, cho_solve_banded

from config.settings import settings
from fem.assembly import AssemblyError, FemSystem, ModalFilter, NodalField, assemble, interpolate
from fem.hermite import Mesh
from fem.nonlinear import nonlinear_force
from models.simulation_config import SimulationConfig
from models.simulation_state import EnergyTrace, RunResult, RunVerdict, Snapshot, State, VerdictKind

from .delay_line import DelayBuffer
from .diffusive import (
    CrankNicolsonCoefficients,
    DiffusiveField,
    XiGrid,
    build_grid,
    c_augm_coeff,
    cn_coefficients,
)
from .energy import discrete_energy, effective_b, modal_mass_norms

logger = logging.getLogger(__name__)

SpatialFn = Callable[[float], float]
HistoryFn = Callable[[float, float], float]


class StepFailure(RuntimeError):
    def __init__(self, t: float, message: str):
        super().__init__(message)
        self.t = t


class NonConvergenceError(StepFailure):
    """Picard iteracija nije konvergirala u nl_max_iter koraka"""

    def __init__(self, t: float, iterations: int, diverging: bool, residual: float):
        kind = "diverging" if diverging else "stalled"
        super().__init__(t, f"fixed-point iteration {kind} at t={t:.6g} "
                            f"after {iterations} iterations (last update {residual:.3e})")
        self.iterations = iterations
        self.diverging = diverging


class NonFiniteError(StepFailure):
    def __init__(self, t: float):
        super().__init__(t, f"non-finite state at t={t:.6g}")


@dataclass(frozen=True)
class EffectiveOperator:
    """Faktorisana A_eff (gornja traka) i skalar c_augm"""
    chol: np.ndarray
    c_augm: float
    mass_scale: float

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        return cho_solve_banded((self.chol, False), rhs)


def build_operator(sys: FemSystem, cfg: SimulationConfig, c_augm: float) -> EffectiveOperator:
    dt = cfg.dt
    mass_scale = 1.0 + cfg.newmark_gamma * dt * (cfg.a1 + c_augm)
    band = mass_scale * sys.M_band + cfg.newmark_beta * dt**2 * sys.K_band
    try:
        chol = cholesky_banded(band, lower=False)
    except LinAlgError as e:
        raise AssemblyError(f"effective matrix is not positive definite: {e}")
    return EffectiveOperator(chol, c_augm, mass_scale)


def reference_profile(cfg: SimulationConfig) -> Tuple[SpatialFn, SpatialFn]:
    """𝒱₀ = λ(x/L)²(1-x/L)² i njen izvod"""
    L, lam = cfg.L, cfg.lambda_

    def value(x: float) -> float:
        u = x / L
        return lam * u * u * (1.0 - u) ** 2

    def slope(x: float) -> float:
        u = x / L
        return lam * 2.0 * u * (1.0 - u) * (1.0 - 2.0 * u) / L

    return value, slope


class NewmarkStepper:
    """Drži sve što je konstantno tokom jednog run-a: sistem, ξ-mrežu, A_eff"""

    def __init__(self, sys: FemSystem, cfg: SimulationConfig):
        self.sys = sys
        self.cfg = cfg
        self.b = effective_b(cfg)

        self.grid: Optional[XiGrid] = None
        self.coeffs: Optional[CrankNicolsonCoefficients] = None
        self.mu_tilde: Optional[np.ndarray] = None
        c_augm = 0.0
        if cfg.fractional_on:
            self.grid = build_grid(cfg.theta, cfg.R_xi, cfg.M_xi)
            self.coeffs = cn_coefficients(self.grid, cfg.vartheta, cfg.dt)
            self.mu_tilde = self.coeffs.decay * self.grid.mu
            c_augm = c_augm_coeff(self.grid, cfg.vartheta, cfg.dt, self.b)

        self.operator = build_operator(sys, cfg, c_augm)
        self.mode_filter: Optional[ModalFilter] = None
        if cfg.omega_cutoff is not None:
            self.mode_filter = ModalFilter.build(sys, cfg.omega_cutoff)
        self.last_iterations = 0

    def new_field(self) -> Optional[DiffusiveField]:
        if self.grid is None:
            return None
        return DiffusiveField.zeros(self.grid.M_xi, self.sys.n_free, track_norms=True)

    def filter_due(self, n: int) -> bool:
        """Da li se stanje posle koraka n projektuje na niske modove"""
        stride = self.cfg.mode_filter_stride
        return self.mode_filter is not None and stride > 0 and n % stride == 0

    def _source(self, Q: NodalField) -> np.ndarray:
        if not self.cfg.source_on:
            return np.zeros_like(Q)
        return nonlinear_force(self.sys, Q, self.cfg.p)

    def _mass(self, v: np.ndarray) -> np.ndarray:
        return self.sys.M_mat @ v

    def initial_acceleration(self, Q0: NodalField, Qd0: NodalField,
                             field: Optional[DiffusiveField], buf: DelayBuffer) -> np.ndarray:
        """M Q̈⁰ = F(Q⁰) - K Q⁰ - a1 M Q̇⁰ - (frakciona sila) - a2 M Q̇⁻ᵐ"""
        sys, cfg = self.sys, self.cfg
        rhs = self._source(Q0) - sys.K_mat @ Q0 - cfg.a1 * self._mass(Qd0)
        if field is not None and self.grid is not None:
            rhs -= 2.0 * self.b * self.grid.dxi * self._mass(self.grid.mu @ field.G)
        rhs -= cfg.a2 * self._mass(buf.get_delayed(-1))
        return sys.solve_mass(rhs)

    def step(self, state: State, field: Optional[DiffusiveField],
             buf: DelayBuffer) -> Tuple[State, Optional[DiffusiveField]]:
        """Jedan korak; bafer kašnjenja i polje 𝒢 se ažuriraju na mestu.

        Na koracima filter_due(n) novo stanje i redovi 𝒢 se projektuju na
        niske modove pre upisa u bafer kašnjenja.
        """
        # stanje neposredno pred prag može imati norme van opsega float-a
        with np.errstate(over="ignore", invalid="ignore"):
            return self._advance(state, field, buf)

    def _advance(self, state: State, field: Optional[DiffusiveField],
                 buf: DelayBuffer) -> Tuple[State, Optional[DiffusiveField]]:
        sys, cfg = self.sys, self.cfg
        dt, beta, gamma = cfg.dt, cfg.newmark_beta, cfg.newmark_gamma
        t_next = (state.n + 1) * dt
        Q, Qd, Qdd = state.Q, state.Qd, state.Qdd

        pred_Q = Q + dt * Qd + (0.5 - beta) * dt**2 * Qdd
        pred_V = Qd + (1.0 - gamma) * dt * Qdd
        delayed = buf.get_delayed(state.n)

        rhs_known = -(sys.K_mat @ pred_Q) - cfg.a1 * self._mass(pred_V) - cfg.a2 * self._mass(delayed)
        if field is not None:
            history = 2.0 * self.b * self.grid.dxi * (self.mu_tilde @ field.G)
            history += self.operator.c_augm * (2.0 * Qd + (1.0 - gamma) * dt * Qdd)
            rhs_known -= self._mass(history)

        Qdd_new = self._solve_implicit(rhs_known, pred_Q, Qdd, t_next)
        Q_new = pred_Q + beta * dt**2 * Qdd_new
        Qd_new = pred_V + gamma * dt * Qdd_new

        filtering = self.filter_due(state.n + 1)
        if filtering:
            Q_new, Qd_new, Qdd_new = (self.mode_filter.apply(x) for x in (Q_new, Qd_new, Qdd_new))

        new_state = State(Q_new, Qd_new, Qdd_new, state.n + 1, t_next)
        if not new_state.is_finite():
            raise NonFiniteError(t_next)

        if field is not None:
            v_half = 0.5 * (Qd + Qd_new)
            field.advance(self.coeffs, v_half, self._mass(v_half))
            if filtering:
                field.G = self.mode_filter.apply_rows(field.G)
            if filtering or new_state.n % settings.AUX_NORM_REFRESH == 0:
                field.mass_norms = modal_mass_norms(sys, field)
        buf.push(Qd_new, Qdd_new, sys.mass_norm2(Qd_new))
        return new_state, field

    def _solve_implicit(self, rhs_known: np.ndarray, pred_Q: np.ndarray,
                        guess: np.ndarray, t: float) -> np.ndarray:
        cfg = self.cfg
        bdt2 = cfg.newmark_beta * cfg.dt**2
        if not cfg.source_on:
            self.last_iterations = 1
            return self.operator.solve(rhs_known)

        current = guess
        updates: List[float] = []
        for it in range(1, cfg.nl_max_iter + 1):
            trial = pred_Q + bdt2 * current
            if not np.all(np.isfinite(trial)):
                raise NonFiniteError(t)
            nxt = self.operator.solve(rhs_known + self._source(trial))
            if not np.all(np.isfinite(nxt)):
                raise NonFiniteError(t)
            update = float(np.linalg.norm(nxt - current))
            scale = max(float(np.linalg.norm(nxt)), np.finfo(float).tiny)
            current = nxt
            updates.append(update)
            if update <= cfg.nl_tol * scale:
                self.last_iterations = it
                return current

        diverging = len(updates) > 1 and updates[-1] > updates[0]
        raise NonConvergenceError(t, cfg.nl_max_iter, diverging, updates[-1])


def _history_buffer(sys: FemSystem, cfg: SimulationConfig, Qd0: np.ndarray,
                    history: Optional[HistoryFn]) -> DelayBuffer:
    m, dt = cfg.m_delay, cfg.dt
    if history is None:
        zeros = np.zeros(sys.n_free)
        level_fn = lambda j: zeros  # noqa: E731
    else:
        def level_fn(j: int) -> np.ndarray:
            tau = j * dt
            return interpolate(sys.mesh, lambda x: history(x, tau))
    return DelayBuffer.init(m, dt, level_fn, Qd0, sys.mass_norm2)


def _snapshot(sys: FemSystem, state: State) -> Snapshot:
    return Snapshot(state.t, sys.mesh.nodes.copy(), sys.nodal_values(state.Q))


def _run_once(cfg: SimulationConfig,
              sys: FemSystem,
              initial_displacement: Optional[SpatialFn],
              initial_velocity: Optional[SpatialFn],
              history: Optional[HistoryFn]) -> Tuple[RunResult, Optional[StepFailure]]:
    started = time.perf_counter()
    stepper = NewmarkStepper(sys, cfg)

    if initial_displacement is None:
        value, slope = reference_profile(cfg)
        Q0 = interpolate(sys.mesh, value, slope)
    else:
        Q0 = interpolate(sys.mesh, initial_displacement)
    Qd0 = np.zeros(sys.n_free) if initial_velocity is None else interpolate(sys.mesh, initial_velocity)
    if stepper.mode_filter is not None:
        # zadržavaju se samo modovi sa ωΔt <= mode_cutoff
        Q0, Qd0 = stepper.mode_filter.apply(Q0), stepper.mode_filter.apply(Qd0)

    field = stepper.new_field()
    buf = _history_buffer(sys, cfg, Qd0, history)
    Qdd0 = stepper.initial_acceleration(Q0, Qd0, field, buf)
    buf.set_head_acceleration(Qdd0)
    state = State(Q0, Qd0, Qdd0, 0, 0.0)

    trace = EnergyTrace()
    trace.append(discrete_energy(sys, cfg, state, field, buf, stepper.grid))
    snapshots = [_snapshot(sys, state)]
    iterations: List[int] = []
    failure: Optional[StepFailure] = None
    verdict = RunVerdict.completed()
    stride = max(1, cfg.snapshot_stride)

    for _ in range(cfg.n_steps):
        try:
            state, field = stepper.step(state, field, buf)
        except StepFailure as e:
            failure = e
            break
        iterations.append(stepper.last_iterations)
        record = discrete_energy(sys, cfg, state, field, buf, stepper.grid)
        trace.append(record)
        if state.n % stride == 0:
            snapshots.append(_snapshot(sys, state))
        if record.sup_norm > cfg.blowup_threshold:
            if not record.is_finite():
                logger.debug("Energy out of float range at t=%.6g, row kept as non-finite", state.t)
            verdict = RunVerdict.blew_up(state.t, f"sup norm {record.sup_norm:.3e} above threshold")
            break
        if state.n % settings.PROGRESS_EVERY == 0:
            logger.debug("t=%.4f E=%.6e sup=%.3e iters=%d", state.t, record.total,
                         record.sup_norm, stepper.last_iterations)

    # poslednji izračunati korak se uvek čuva
    if snapshots[-1].t != state.t:
        snapshots.append(_snapshot(sys, state))

    if failure is not None:
        if isinstance(failure, NonFiniteError) or getattr(failure, "diverging", False):
            verdict = RunVerdict.blew_up(failure.t, str(failure))
        else:
            verdict = RunVerdict.failed(failure.t, str(failure))

    trace.verdict = verdict
    result = RunResult(snapshots, trace, verdict, cfg.dt, iterations, time.perf_counter() - started)
    return result, failure


def run(cfg: SimulationConfig,
        initial_displacement: Optional[SpatialFn] = None,
        initial_velocity: Optional[SpatialFn] = None,
        history: Optional[HistoryFn] = None,
        sys: Optional[FemSystem] = None) -> RunResult:
    """Kompletan run: inicijalizacija, N_t koraka, energija u svakom koraku.

    Podrazumevani početni podaci su λ(x/L)²(1-x/L)², 𝒱₁ = 0 i f₀ = 0;
    𝒱₀ i 𝒱₁ se projektuju na modove sa ωΔt <= mode_cutoff, a stanje i 𝒢
    ponovo na svakih mode_filter_stride koraka.
    `StepFailure` nikad ne izlazi iz ove funkcije: pretvara se u presudu.
    Kod divergentne Picard iteracije ceo run se ponavlja jednom sa Δt/2.
    """
    if sys is None:
        sys = assemble(Mesh(cfg.L, cfg.N_nodes))

    result, failure = _run_once(cfg, sys, initial_displacement, initial_velocity, history)
    diverged = isinstance(failure, NonConvergenceError) and failure.diverging
    if diverged and cfg.retry_halving:
        logger.warning("Fixed-point iteration diverged at t=%.6g, retrying with dt=%.3e",
                       failure.t, cfg.dt / 2)
        halved = dataclasses.replace(cfg, dt=cfg.dt / 2)
        retry, _ = _run_once(halved, sys, initial_displacement, initial_velocity, history)
        retry.wall_time += result.wall_time
        result = retry

    if result.verdict.kind == VerdictKind.BLEW_UP:
        logger.warning("Run blew up at t=%.6g (%s)", result.verdict.t, result.verdict.reason)
    else:
        logger.info("Run finished: %s (%d records, %.2fs)", result.verdict, len(result.trace), result.wall_time)
    return result
