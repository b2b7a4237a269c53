"""
Projected (Riemannian) gradient descent on products of unit spheres.

Retraction is row re-normalization. Optional monotone backtracking and a
per-row displacement clip keep large steps stable.
"""
import logging
import time
import uuid
from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional, Tuple

import numpy as np
from pydantic import BaseModel

from hugkit.core.config import settings
from hugkit.core.exceptions import (
    CoincidentPointsError,
    DegenerateMeanError,
    EmptyClassError,
    InvalidInputError,
    NonFiniteError,
    ZeroRowError,
)
from hugkit.core.logging_config import experiment_logger, get_logger
from hugkit.models.base import ArrayModel
from hugkit.models.geometry import PointConfig
from hugkit.models.proxy_set import ProxySet, ProxyStrategy
from hugkit.models.state import LabeledState
from hugkit.models.trajectory import Trajectory, TrajectoryRecord
from hugkit.schemas.loss import LossSpec, LossVariant
from hugkit.schemas.optim import OptimConfig, ScheduleKind, StepSchedule
from hugkit.services.energy_service import riesz_terms
from hugkit.services.geometry_service import (
    derive_seed,
    normalize_array,
    project_rows,
    sample_gaussian_sphere,
)
from hugkit.services.losses import LossResult, compute_loss
from hugkit.services.proxy_service import effective_proxies, route_proxy_gradient

logger = get_logger(__name__)

# Backtracking gives up after this many halvings
MAX_HALVINGS = 60

Velocity = Tuple[np.ndarray, np.ndarray]


class RunOutcome(ArrayModel):
    """
    Result of one optimization run.
    """
    final_state: LabeledState
    trajectory: Trajectory
    proxy_set: Optional[ProxySet] = None
    final_loss: float
    iterations: int
    converged: bool


class EnergyMinimum(BaseModel):
    """
    Best configuration found by minimize_energy.
    """
    config: PointConfig
    energy: float
    restart: int
    energies: List[float]

    model_config = {
        "arbitrary_types_allowed": True
    }


def default_energy_config(seed: int = 0, restarts: Optional[int] = None) -> OptimConfig:
    """Settings used for energy minimization when none are given."""
    return OptimConfig(
        step_size=0.1,
        max_iters=3000,
        grad_tol=1e-12,
        schedule=StepSchedule(kind=ScheduleKind.CONSTANT),
        seed=seed,
        restarts=restarts or settings.DEFAULT_RESTARTS,
        line_search=True,
    )


def _apply_update(
    arr: np.ndarray,
    velocity: np.ndarray,
    grad: np.ndarray,
    eta: float,
    cfg: OptimConfig,
    normalized: bool
) -> Tuple[np.ndarray, np.ndarray]:
    new_velocity = cfg.momentum * velocity + grad
    update = eta * new_velocity
    if cfg.max_displacement is not None:
        lengths = np.linalg.norm(update, axis=1)
        scale = np.minimum(1.0, cfg.max_displacement / np.maximum(lengths, 1e-300))
        update = update * scale[:, None]
    moved = arr - update
    if not np.all(np.isfinite(moved)):
        raise NonFiniteError()
    if normalized:
        moved = normalize_array(moved)
    return moved, new_velocity


def pgd_step(
    state: LabeledState,
    grad_features: np.ndarray,
    grad_proxies: Optional[np.ndarray],
    cfg: OptimConfig,
    velocity: Optional[Velocity] = None,
    step_size: Optional[float] = None
) -> Tuple[LabeledState, Velocity]:
    """
    One projected heavy-ball step.

    velocity' = momentum * velocity + grad; rows move by -step * velocity'
    and are re-normalized (sphere states only).

    Args:
        state: Current state
        grad_features: Tangent (or Euclidean, for raw states) feature gradient
        grad_proxies: Proxy gradient, or None to leave proxies untouched
        cfg: Optimizer settings
        velocity: Previous (features, proxies) velocity; zeros when None
        step_size: Overrides cfg.step_size

    Raises:
        NonFiniteError: If an updated entry is NaN or inf
    """
    eta = cfg.step_size if step_size is None else step_size
    if velocity is None:
        velocity = (np.zeros_like(state.X), np.zeros_like(state.W))
    vel_x, vel_w = velocity

    new_x, vel_x = _apply_update(state.X, vel_x, grad_features, eta, cfg, state.normalized)
    new_w = None
    if grad_proxies is not None:
        new_w, vel_w = _apply_update(state.W, vel_w, grad_proxies, eta, cfg, state.normalized)

    return state.with_arrays(features=new_x, proxies=new_w), (vel_x, vel_w)


class _Runner:
    """
    Iteration state of a single run: the labeled state, the proxy
    parameters and all velocities.
    """

    def __init__(
        self,
        state: LabeledState,
        spec: LossSpec,
        cfg: OptimConfig,
        proxy_set: Optional[ProxySet]
    ):
        self.spec = spec
        self.cfg = cfg
        self.proxy_set = proxy_set
        self.strategy = proxy_set.strategy if proxy_set is not None else ProxyStrategy.LEARNABLE
        self.trains_proxies = spec.variant.uses_proxies and not self.strategy.is_static

        if proxy_set is not None and self.strategy == ProxyStrategy.PARTIALLY_LEARNABLE:
            state = state.with_arrays(proxies=effective_proxies(proxy_set).points)
        self.state = state
        self.velocity: Velocity = (np.zeros_like(state.X), np.zeros_like(state.W))
        self.param_velocity = (
            np.zeros_like(proxy_set.rotation_params)
            if self.strategy == ProxyStrategy.PARTIALLY_LEARNABLE else None
        )

    def gradients(self, result: LossResult) -> Tuple[np.ndarray, Optional[np.ndarray]]:
        """Feature gradient and the routed proxy-side gradient (None if frozen)."""
        if not self.trains_proxies:
            return result.grad_features, None
        if self.strategy == ProxyStrategy.PARTIALLY_LEARNABLE:
            return result.grad_features, route_proxy_gradient(self.proxy_set, result.grad_proxies)
        return result.grad_features, result.grad_proxies

    def grad_norm(self, result: LossResult) -> float:
        grad_x, grad_p = self.gradients(result)
        total = float(np.sum(grad_x ** 2))
        if grad_p is not None:
            total += float(np.sum(grad_p ** 2))
        return float(np.sqrt(total))

    def propose(self, result: LossResult, eta: float):
        """Candidate (state, velocity, param_velocity, proxy_set) after one step."""
        grad_x, grad_p = self.gradients(result)
        proxy_set = self.proxy_set
        param_velocity = self.param_velocity

        if self.strategy == ProxyStrategy.PARTIALLY_LEARNABLE and grad_p is not None:
            state, velocity = pgd_step(self.state, grad_x, None, self.cfg, self.velocity, eta)
            param_velocity = self.cfg.momentum * self.param_velocity + grad_p
            params = proxy_set.rotation_params - eta * param_velocity
            if not np.all(np.isfinite(params)):
                raise NonFiniteError()
            proxy_set = proxy_set.with_params(params)
            state = state.with_arrays(proxies=effective_proxies(proxy_set).points)
        else:
            state, velocity = pgd_step(self.state, grad_x, grad_p, self.cfg, self.velocity, eta)
        return state, velocity, param_velocity, proxy_set

    def accept(self, proposal) -> None:
        self.state, self.velocity, self.param_velocity, self.proxy_set = proposal

    def reset_velocity(self) -> None:
        self.velocity = (np.zeros_like(self.state.X), np.zeros_like(self.state.W))
        if self.param_velocity is not None:
            self.param_velocity = np.zeros_like(self.param_velocity)


def _evaluate(state: LabeledState, spec: LossSpec, iteration: int) -> LossResult:
    result = compute_loss(state, spec, iteration)
    if not np.isfinite(result.value):
        raise NonFiniteError(iteration)
    return result


def _proxy_energy(state: LabeledState) -> Optional[float]:
    """Average Riesz 2-energy of the normalized proxies, None where undefined."""
    num_proxies = state.W.shape[0]
    if num_proxies < 2:
        return None
    try:
        energy, _ = riesz_terms(normalize_array(state.W), 2.0, "proxies", with_grad=False)
    except (CoincidentPointsError, ZeroRowError):
        return None
    return energy / (num_proxies * (num_proxies - 1))


def _snapshot(state: LabeledState, run_id: str, iteration: int):
    from hugkit.services.gnc_service import gnc_report

    try:
        report = gnc_report(state.features, state.labels, state.proxies)
    except (DegenerateMeanError, CoincidentPointsError, EmptyClassError) as exc:
        logger.warning(
            f"GNC snapshot skipped: {exc.message}",
            extra={"run_id": run_id, "iteration": iteration, "error_code": exc.code}
        )
        return None
    experiment_logger.log_event(
        "run.snapshot",
        run_id=run_id,
        iteration=iteration,
        details={"collapse_metric": report.collapse_metric, "acme": report.acme},
        level=logging.DEBUG
    )
    return report


def run(
    state: LabeledState,
    spec: LossSpec,
    cfg: OptimConfig,
    proxy_set: Optional[ProxySet] = None,
    gnc_every: Optional[int] = None,
    run_id: Optional[str] = None
) -> RunOutcome:
    """
    Minimize the configured loss from state.

    Stops after cfg.max_iters steps or once the gradient norm of all trained
    quantities drops below cfg.grad_tol. Records every cfg.record_every
    iterations, with a GNC snapshot on records whose iteration is a multiple
    of gnc_every.

    Args:
        state: Initial state
        spec: Loss configuration
        cfg: Optimizer settings
        proxy_set: Proxy strategy; proxies are learnable when None
        gnc_every: GNC snapshot cadence, or None for no snapshots
        run_id: Correlation id for logs

    Raises:
        NonFiniteError: With the failing iteration index
    """
    if spec.variant.normalized != state.normalized:
        raise InvalidInputError(
            f"{spec.variant.value} expects {'normalized' if spec.variant.normalized else 'raw'} state"
        )
    run_id = run_id or uuid.uuid4().hex[:8]
    start = time.time()
    runner = _Runner(state, spec, cfg, proxy_set)
    trajectory = Trajectory()

    experiment_logger.log_event(
        "run.start",
        run_id=run_id,
        details={"variant": spec.variant.value, "strategy": runner.strategy.value,
                 "max_iters": cfg.max_iters}
    )

    result = _evaluate(runner.state, spec, 0)
    eta = None
    converged = False
    iteration = 0
    while True:
        grad_norm = runner.grad_norm(result)
        if iteration % cfg.record_every == 0:
            gnc = None
            if gnc_every is not None and iteration % gnc_every == 0:
                gnc = _snapshot(runner.state, run_id, iteration)
            trajectory.append(TrajectoryRecord(
                iteration=iteration,
                loss=result.value,
                inter_term=result.inter_term,
                intra_term=result.intra_term + result.penalty_term,
                grad_norm=grad_norm,
                proxy_energy=_proxy_energy(runner.state),
                gnc=gnc,
            ))
            logger.debug(
                f"loss={result.value:.10g} grad_norm={grad_norm:.3e}",
                extra={"run_id": run_id, "iteration": iteration}
            )

        if grad_norm < cfg.grad_tol:
            converged = True
            break
        if iteration >= cfg.max_iters:
            break

        scheduled = cfg.schedule.step_at(cfg.step_size, iteration, cfg.max_iters)
        try:
            if cfg.line_search:
                eta = scheduled if eta is None else min(2.0 * eta, scheduled)
                accepted = None
                for _ in range(MAX_HALVINGS):
                    proposal = runner.propose(result, eta)
                    # trial and current loss share this iteration's representative draw
                    candidate = _evaluate(proposal[0], spec, iteration)
                    if candidate.value <= result.value:
                        accepted = (proposal, candidate)
                        break
                    eta *= 0.5
                    runner.reset_velocity()
                if accepted is None:
                    # no decrease at any step length: stationary to precision
                    converged = True
                    break
                runner.accept(accepted[0])
                result = accepted[1]
                if spec.variant == LossVariant.PF_HUG_RELAXED:
                    result = _evaluate(runner.state, spec, iteration + 1)
            else:
                runner.accept(runner.propose(result, scheduled))
                result = _evaluate(runner.state, spec, iteration + 1)
        except NonFiniteError:
            raise NonFiniteError(iteration) from None
        iteration += 1

    duration_ms = round((time.time() - start) * 1000, 2)
    experiment_logger.log_event(
        "run.finish",
        run_id=run_id,
        iteration=iteration,
        duration_ms=duration_ms,
        details={"loss": result.value, "converged": converged}
    )

    return RunOutcome(
        final_state=runner.state,
        trajectory=trajectory,
        proxy_set=runner.proxy_set,
        final_loss=result.value,
        iterations=iteration,
        converged=converged,
    )


def _descend_energy(points: np.ndarray, s: float, cfg: OptimConfig) -> Tuple[np.ndarray, float]:
    """Projected descent of the Riesz s-energy of one configuration."""
    energy, grad = riesz_terms(points, s)
    grad = project_rows(points, grad)
    velocity = np.zeros_like(points)
    eta = None

    for iteration in range(cfg.max_iters):
        if np.sqrt(np.sum(grad ** 2)) < cfg.grad_tol:
            break
        scheduled = cfg.schedule.step_at(cfg.step_size, iteration, cfg.max_iters)
        if not cfg.line_search:
            points, velocity = _apply_update(points, velocity, grad, scheduled, cfg, True)
            energy, grad = riesz_terms(points, s)
            grad = project_rows(points, grad)
            continue

        eta = scheduled if eta is None else min(2.0 * eta, scheduled)
        for _ in range(MAX_HALVINGS):
            candidate, cand_velocity = _apply_update(points, velocity, grad, eta, cfg, True)
            cand_energy, cand_grad = riesz_terms(candidate, s)
            if cand_energy <= energy:
                break
            eta *= 0.5
            velocity = np.zeros_like(points)
        else:
            break
        points, velocity, energy = candidate, cand_velocity, cand_energy
        grad = project_rows(points, cand_grad)

    return points, energy


def minimize_energy(n: int, d: int, s: float, cfg: Optional[OptimConfig] = None) -> EnergyMinimum:
    """
    Best-of-restarts minimizer of the Riesz s-energy of n points on S^(d-1).

    Restart r starts from Gaussian points seeded with derive_seed(cfg.seed, r);
    restarts run on worker threads and the lowest energy wins (ties go to
    the lowest restart index).
    """
    if n < 2:
        raise InvalidInputError(f"need n >= 2 points, got {n}", "n")
    cfg = cfg or default_energy_config()

    def one_restart(r: int) -> Tuple[np.ndarray, float]:
        start = sample_gaussian_sphere(n, d, derive_seed(cfg.seed, r)).points
        return _descend_energy(start.copy(), s, cfg)

    workers = max(1, min(cfg.restarts, settings.SWEEP_WORKERS))
    with ThreadPoolExecutor(max_workers=workers) as pool:
        outcomes = list(pool.map(one_restart, range(cfg.restarts)))

    energies = [energy for _, energy in outcomes]
    best = int(np.argmin(energies))
    logger.debug(
        f"minimize_energy n={n} d={d} s={s}: best {energies[best]:.12g} (restart {best})"
    )
    return EnergyMinimum(
        config=PointConfig(points=outcomes[best][0]),
        energy=energies[best],
        restart=best,
        energies=energies,
    )
