"""
Population-based maximization over box-bounded continuous vectors.

Two optimizers share one problem/params/result contract:
- hho_optimize: Harris Hawks Optimization (exploration, soft/hard besiege and
  their Levy-flight rapid-dive variants, switched by a decaying escape energy)
- random_search: uniform sampling baseline

Randomness: hawk i in iteration t draws from its own generator seeded by
SeedSequence(seed, spawn_key=(t, i)), t = 0 being initialization. Moves are
computed from the population snapshot taken at the start of the iteration and
applied in hawk order, so parallel evaluation cannot change the result.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Dict, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field
from scipy.special import gamma

from config.settings import (
    DEFAULT_HAWKS,
    DEFAULT_LEVY_BETA,
    DEFAULT_MAX_ITERATIONS,
    DEFAULT_SEED,
    DEFAULT_STAGNATION_EPSILON,
    DEFAULT_STAGNATION_WINDOW,
    DEFAULT_WORKERS,
)
from src.errors import InvalidBounds, InvalidParameter
from src.logger_config import get_logger

logger = get_logger("optimizer_core")

# Rapid-dive Levy steps are scaled as in the reference HHO formulation
LEVY_SCALE = 0.01
PROGRESS_LOG_EVERY = 50

Objective = Callable[[np.ndarray], float]


@dataclass
class SearchProblem:
    """Maximize objective(x) for x in [lower, upper] (per coordinate)."""

    dimension: int
    lower: np.ndarray
    upper: np.ndarray
    objective: Objective

    @classmethod
    def box(cls, objective: Objective, dimension: int, low: float, high: float) -> "SearchProblem":
        """Same scalar bounds on every coordinate"""
        return cls(
            dimension=dimension,
            lower=np.full(dimension, float(low)),
            upper=np.full(dimension, float(high)),
            objective=objective,
        )

    def validated_bounds(self) -> Tuple[np.ndarray, np.ndarray]:
        if not callable(self.objective):
            raise InvalidParameter("objective is not callable")
        if self.dimension < 1:
            raise InvalidBounds(f"dimension must be >= 1, got {self.dimension}")
        lower = np.asarray(self.lower, dtype=np.float64).reshape(-1)
        upper = np.asarray(self.upper, dtype=np.float64).reshape(-1)
        if lower.shape != (self.dimension,) or upper.shape != (self.dimension,):
            raise InvalidBounds(
                f"bounds must have {self.dimension} entries, got {lower.size} lower / {upper.size} upper"
            )
        if not (np.all(np.isfinite(lower)) and np.all(np.isfinite(upper))):
            raise InvalidBounds("bounds must be finite")
        if np.any(lower > upper):
            bad = int(np.argmax(lower > upper))
            raise InvalidBounds(f"lower[{bad}]={lower[bad]} is greater than upper[{bad}]={upper[bad]}")
        return lower, upper


class OptimizerParams(BaseModel):
    """Run parameters shared by both optimizers."""

    model_config = ConfigDict(extra='forbid', frozen=True)

    population_size: int = Field(default=DEFAULT_HAWKS, ge=2)
    max_iterations: int = Field(default=DEFAULT_MAX_ITERATIONS, ge=1)
    # None disables stagnation stopping
    stagnation_window: Optional[int] = Field(default=DEFAULT_STAGNATION_WINDOW, ge=1)
    stagnation_epsilon: float = Field(default=DEFAULT_STAGNATION_EPSILON, ge=0.0)
    levy_beta: float = Field(default=DEFAULT_LEVY_BETA, gt=1.0, le=2.0)
    seed: int = Field(default=DEFAULT_SEED, ge=0)
    max_evaluations: Optional[int] = Field(default=None, ge=1)
    workers: int = Field(default=DEFAULT_WORKERS, ge=1)


@dataclass(frozen=True, eq=False)
class OptimizationResult:
    """Best point found plus the best-so-far trace (one entry per iteration)."""

    optimizer: str
    best_position: np.ndarray
    best_fitness: float
    history: Tuple[float, ...]
    evaluation_trace: Tuple[int, ...]
    iterations_run: int
    evaluations: int
    stop_reason: str
    branch_counts: Dict[str, int] = field(default_factory=dict)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, OptimizationResult):
            return NotImplemented
        return (
            self.optimizer == other.optimizer
            and np.array_equal(self.best_position, other.best_position)
            and self.best_fitness == other.best_fitness
            and self.history == other.history
            and self.evaluation_trace == other.evaluation_trace
            and self.iterations_run == other.iterations_run
            and self.evaluations == other.evaluations
            and self.stop_reason == other.stop_reason
        )

    def history_frame(self) -> pd.DataFrame:
        return pd.DataFrame({
            "iteration": np.arange(1, len(self.history) + 1),
            "best_fitness": list(self.history),
            "evaluations": list(self.evaluation_trace),
        })

    def history_csv(self) -> str:
        """CSV with columns iteration,best_fitness,evaluations"""
        return self.history_frame().to_csv(index=False, lineterminator="\n")

    def summary(self) -> Dict[str, object]:
        return {
            "optimizer": self.optimizer,
            "best_fitness": self.best_fitness,
            "iterations_run": self.iterations_run,
            "evaluations": self.evaluations,
            "stop_reason": self.stop_reason,
            "initial_best_fitness": self.history[0] if self.history else None,
        }


def escape_energy(e0: float, t: int, max_t: int) -> float:
    """Prey escape energy E = 2 * E0 * (1 - t / T)."""
    return 2.0 * e0 * (1.0 - t / max_t)


def mantegna_sigma(beta: float) -> float:
    """Standard deviation of the numerator normal in Mantegna's algorithm."""
    numerator = gamma(1.0 + beta) * math.sin(math.pi * beta / 2.0)
    denominator = gamma((1.0 + beta) / 2.0) * beta * 2.0 ** ((beta - 1.0) / 2.0)
    return float((numerator / denominator) ** (1.0 / beta))


def levy_step(dim: int, beta: float, rng: np.random.Generator) -> np.ndarray:
    """Levy-flight step of dim components: u / |v|^(1/beta), u ~ N(0, sigma_u^2), v ~ N(0, 1)."""
    if not 1.0 < beta <= 2.0:
        raise InvalidParameter(f"levy beta must lie in (1, 2], got {beta}")
    u = rng.normal(0.0, mantegna_sigma(beta), dim)
    v = rng.normal(0.0, 1.0, dim)
    return u / np.abs(v) ** (1.0 / beta)


def detect_stagnation(history: Sequence[float], window: int, epsilon: float) -> bool:
    """True iff the best-so-far improved by less than epsilon over the last `window` iterations."""
    if len(history) < window + 1:
        return False
    return history[-1] - history[len(history) - 1 - window] < epsilon


def _substream(seed: int, iteration: int, member: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(iteration, member)))


class _BatchEvaluator:
    """Evaluates candidate batches in order, optionally on a thread pool; counts calls."""

    def __init__(self, objective: Objective, workers: int):
        self._objective = objective
        self._workers = workers
        self._pool: Optional[ThreadPoolExecutor] = None
        self.count = 0

    def __enter__(self) -> "_BatchEvaluator":
        if self._workers > 1:
            self._pool = ThreadPoolExecutor(max_workers=self._workers, thread_name_prefix="fitness")
        return self

    def __exit__(self, *exc_info) -> None:
        if self._pool is not None:
            self._pool.shutdown(wait=True)

    def _score(self, position: np.ndarray) -> float:
        value = float(self._objective(position))
        return -math.inf if math.isnan(value) else value

    def __call__(self, positions: List[np.ndarray]) -> np.ndarray:
        if not positions:
            return np.empty(0)
        if self._pool is not None and len(positions) > 1:
            scores = list(self._pool.map(self._score, positions))
        else:
            scores = [self._score(p) for p in positions]
        self.count += len(positions)
        return np.asarray(scores, dtype=np.float64)


class _BestTracker:
    """Best position ever evaluated; earlier wins ties."""

    def __init__(self, dimension: int):
        self.position = np.zeros(dimension)
        self.fitness = -math.inf
        self._seen = False

    def update(self, positions: List[np.ndarray], scores: np.ndarray) -> None:
        if scores.size == 0:
            return
        best = int(np.argmax(scores))
        if not self._seen or scores[best] > self.fitness:
            self.position = np.array(positions[best], dtype=np.float64)
            self.fitness = float(scores[best])
            self._seen = True


class _HawkMove(NamedTuple):
    branch: str
    candidate: np.ndarray
    # rapid-dive fallback, evaluated only when candidate does not improve the hawk
    dive: Optional[np.ndarray]


def _hho_move(
    rng: np.random.Generator,
    hawk: np.ndarray,
    snapshot: np.ndarray,
    rabbit: np.ndarray,
    mean: np.ndarray,
    lower: np.ndarray,
    upper: np.ndarray,
    t: int,
    max_t: int,
    beta: float,
) -> _HawkMove:
    dim = hawk.size
    energy = escape_energy(2.0 * rng.random() - 1.0, t, max_t)

    if abs(energy) >= 1.0:
        if rng.random() < 0.5:
            partner = snapshot[rng.integers(len(snapshot))]
            r1, r2 = rng.random(2)
            candidate = partner - r1 * np.abs(partner - 2.0 * r2 * hawk)
        else:
            r3, r4 = rng.random(2)
            candidate = (rabbit - mean) - r3 * (lower + r4 * (upper - lower))
        return _HawkMove("exploration", np.clip(candidate, lower, upper), None)

    escape_roll = rng.random()
    jump = 2.0 * (1.0 - rng.random())
    soft = abs(energy) >= 0.5

    if escape_roll >= 0.5:
        if soft:
            candidate = (rabbit - hawk) - energy * np.abs(jump * rabbit - hawk)
            return _HawkMove("soft_besiege", np.clip(candidate, lower, upper), None)
        candidate = rabbit - energy * np.abs(rabbit - hawk)
        return _HawkMove("hard_besiege", np.clip(candidate, lower, upper), None)

    anchor = hawk if soft else mean
    first = rabbit - energy * np.abs(jump * rabbit - anchor)
    second = first + rng.random(dim) * LEVY_SCALE * levy_step(dim, beta, rng)
    branch = "soft_besiege_dive" if soft else "hard_besiege_dive"
    return _HawkMove(branch, np.clip(first, lower, upper), np.clip(second, lower, upper))


def _uniform_point(rng: np.random.Generator, lower: np.ndarray, upper: np.ndarray) -> np.ndarray:
    return lower + rng.random(lower.size) * (upper - lower)


def _stop_reason(history: List[float], evaluations: int, params: OptimizerParams) -> Optional[str]:
    if params.max_evaluations is not None and evaluations >= params.max_evaluations:
        return "evaluation_budget"
    if params.stagnation_window is not None and detect_stagnation(
        history, params.stagnation_window, params.stagnation_epsilon
    ):
        return "stagnation"
    return None


def hho_optimize(problem: SearchProblem, params: OptimizerParams) -> OptimizationResult:
    """
    Maximize problem.objective with Harris Hawks Optimization.

    |E| >= 1 explores (random-hawk-relative or population-mean-relative move);
    |E| < 1 besieges the best hawk (the rabbit): soft/hard by |E| >= 0.5, with
    Levy rapid dives when the escape roll r < 0.5. Dive candidates replace a hawk
    only if they improve it. Stops at max_iterations, on stagnation or when the
    evaluation budget is reached.

    Args:
        problem: Objective plus box bounds of the search space
        params: Population size, iteration cap, stagnation rule, seed and workers

    Returns:
        OptimizationResult with the best position, its fitness and the
        best-so-far trace; a given seed yields the same result for any
        worker count

    Raises:
        InvalidBounds: inconsistent problem bounds
    """
    lower, upper = problem.validated_bounds()
    n = params.population_size
    max_t = params.max_iterations
    seed = params.seed
    logger.info(
        f"HHO start: dim={problem.dimension}, hawks={n}, max_iterations={max_t}, seed={seed}, workers={params.workers}"
    )

    branch_counts: Dict[str, int] = {}
    history: List[float] = []
    trace: List[int] = []
    stop_reason = "max_iterations"
    tracker = _BestTracker(problem.dimension)

    with _BatchEvaluator(problem.objective, params.workers) as evaluate:
        hawks = np.stack([_uniform_point(_substream(seed, 0, i), lower, upper) for i in range(n)])
        fitness = evaluate(list(hawks))
        tracker.update(list(hawks), fitness)

        for t in range(max_t):
            snapshot = hawks.copy()
            mean = snapshot.mean(axis=0)
            rabbit = tracker.position.copy()

            moves = [
                _hho_move(
                    _substream(seed, t + 1, i), snapshot[i], snapshot, rabbit, mean,
                    lower, upper, t, max_t, params.levy_beta,
                )
                for i in range(n)
            ]
            for move in moves:
                branch_counts[move.branch] = branch_counts.get(move.branch, 0) + 1

            primary = [move.candidate for move in moves]
            primary_scores = evaluate(primary)
            tracker.update(primary, primary_scores)

            pending = []
            for i, (move, score) in enumerate(zip(moves, primary_scores)):
                if move.dive is None or score > fitness[i]:
                    hawks[i] = move.candidate
                    fitness[i] = score
                else:
                    pending.append(i)

            if pending:
                dives = [moves[i].dive for i in pending]
                dive_scores = evaluate(dives)
                tracker.update(dives, dive_scores)
                for i, dive, score in zip(pending, dives, dive_scores):
                    if score > fitness[i]:
                        hawks[i] = dive
                        fitness[i] = score

            history.append(tracker.fitness)
            trace.append(evaluate.count)
            if (t + 1) % PROGRESS_LOG_EVERY == 0:
                logger.info(f"HHO iteration {t + 1}: best={tracker.fitness:.8g}, evaluations={evaluate.count}")
            else:
                logger.debug(f"HHO iteration {t + 1}: best={tracker.fitness:.8g}")

            reason = _stop_reason(history, evaluate.count, params)
            if reason is not None:
                stop_reason = reason
                break

    result = OptimizationResult(
        optimizer="hho",
        best_position=tracker.position,
        best_fitness=tracker.fitness,
        history=tuple(history),
        evaluation_trace=tuple(trace),
        iterations_run=len(history),
        evaluations=evaluate.count,
        stop_reason=stop_reason,
        branch_counts=branch_counts,
    )
    logger.info(
        f"HHO done: best={result.best_fitness:.8g} after {result.iterations_run} iterations, "
        f"{result.evaluations} evaluations ({stop_reason}); branches={branch_counts}"
    )
    return result


def random_search(problem: SearchProblem, params: OptimizerParams) -> OptimizationResult:
    """
    Uniform random sampling baseline: population_size points per iteration.

    With max_evaluations set, the last batch is truncated so exactly that many
    evaluations are spent (equal-budget comparisons against HHO).

    Raises:
        InvalidBounds: inconsistent problem bounds
    """
    lower, upper = problem.validated_bounds()
    n = params.population_size
    seed = params.seed
    budget = params.max_evaluations
    logger.info(f"Random search start: dim={problem.dimension}, batch={n}, budget={budget}, seed={seed}")

    history: List[float] = []
    trace: List[int] = []
    stop_reason = "max_iterations"
    tracker = _BestTracker(problem.dimension)

    with _BatchEvaluator(problem.objective, params.workers) as evaluate:
        for t in range(params.max_iterations):
            size = n if budget is None else min(n, budget - evaluate.count)
            points = [_uniform_point(_substream(seed, t + 1, i), lower, upper) for i in range(size)]
            scores = evaluate(points)
            tracker.update(points, scores)

            history.append(tracker.fitness)
            trace.append(evaluate.count)
            reason = _stop_reason(history, evaluate.count, params)
            if reason is not None:
                stop_reason = reason
                break

    result = OptimizationResult(
        optimizer="random",
        best_position=tracker.position,
        best_fitness=tracker.fitness,
        history=tuple(history),
        evaluation_trace=tuple(trace),
        iterations_run=len(history),
        evaluations=evaluate.count,
        stop_reason=stop_reason,
    )
    logger.info(
        f"Random search done: best={result.best_fitness:.8g} after {result.iterations_run} iterations, "
        f"{result.evaluations} evaluations ({stop_reason})"
    )
    return result


OPTIMIZERS: Dict[str, Callable[[SearchProblem, OptimizerParams], OptimizationResult]] = {
    "hho": hho_optimize,
    "random": random_search,
}


def get_optimizer(name: str) -> Callable[[SearchProblem, OptimizerParams], OptimizationResult]:
    try:
        return OPTIMIZERS[name]
    except KeyError:
        raise InvalidParameter(f"unknown optimizer '{name}' (choose from {', '.join(sorted(OPTIMIZERS))})")
