"""Global-best particle swarm tuning of ACS parameters on a single instance.

A particle's position is a point of the open box::

    q0 in (0,1), phi in (-1,8), beta in (-1,8), rho in (0,1),
    alpha in (0,1), neighbor_frac in (0,1), num_ants in (0,40)

and its fitness is the best tour found by a few seeded ACS trials run with
the rounded parameters (shorter is better, ties go to the faster run).
"""

from __future__ import annotations

import csv
import io
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import acs
from .acs import AcsParams
from .seeding import derive_rng, name_key
from .tsplib import TspInstance

DIMENSIONS = ("q0", "phi_exp", "beta", "rho", "alpha", "neighbor_frac", "num_ants")
LOW = np.array([0.0, -1.0, -1.0, 0.0, 0.0, 0.0, 0.0])
HIGH = np.array([1.0, 8.0, 8.0, 1.0, 1.0, 1.0, 40.0])
EPS = 1e-9
_INTEGER_DIMS = (1, 2, 6)


@dataclass(frozen=True)
class DomainBounds:
    low: np.ndarray = field(default_factory=LOW.copy)
    high: np.ndarray = field(default_factory=HIGH.copy)

    def __post_init__(self):
        if np.any(np.asarray(self.low) >= np.asarray(self.high)):
            raise ValueError("every dimension needs low < high")

    @property
    def span(self) -> np.ndarray:
        return self.high - self.low

    def clamp(self, x: np.ndarray) -> np.ndarray:
        """Project onto the open box, realised as the closed box shrunk by EPS."""
        return np.clip(x, self.low + EPS, self.high - EPS)


@dataclass
class PsoConfig:
    c1: float = 2.0
    c2: float = 2.0
    chi: float = 0.729
    w0: float = 1.0
    w_decay: float = 0.99
    w_floor: float = 0.1
    swarm_size: int = 20
    pso_iterations: int = 500
    trials_per_eval: int = 5
    acs_iterations_per_trial: int = 1000
    #: "steps" ranks equal-length fitnesses by ant-steps to best (reproducible),
    #: "wall" by measured seconds to best.
    clock: str = "steps"
    workers: int = 1

    def __post_init__(self):
        counts = ("swarm_size", "pso_iterations", "trials_per_eval", "acs_iterations_per_trial",
                  "workers")
        for name in counts:
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        if min(self.c1, self.c2, self.chi, self.w0, self.w_decay, self.w_floor) < 0:
            raise ValueError("PSO coefficients must be non-negative")
        if self.w_floor > self.w0:
            raise ValueError("w_floor must not exceed w0")
        if self.clock not in ("steps", "wall"):
            raise ValueError(f"unknown clock {self.clock!r}")

    def inertia(self, t: int) -> float:
        """Inertia weight used in PSO iteration ``t`` (1-based)."""
        return max(self.w_floor, self.w0 * self.w_decay**t)

    @classmethod
    def quick(cls, **overrides) -> "PsoConfig":
        """Desk-scale profile: swarm 10, 50 iterations, 3 trials of 200 ACS iterations."""
        base = dict(swarm_size=10, pso_iterations=50, trials_per_eval=3,
                    acs_iterations_per_trial=200)
        base.update(overrides)
        return cls(**base)


@dataclass(frozen=True, order=True)
class Fitness:
    length: int
    time: float

    def beats(self, other: "Fitness | None") -> bool:
        return other is None or self < other


@dataclass
class ParticleState:
    position: np.ndarray
    velocity: np.ndarray
    best_position: np.ndarray | None = None
    best_fitness: Fitness | None = None
    best_tour: np.ndarray | None = None

    def record(self, fitness: Fitness, tour: np.ndarray) -> None:
        if fitness.beats(self.best_fitness):
            self.best_fitness = fitness
            self.best_position = self.position.copy()
            self.best_tour = tour


@dataclass
class Evaluation:
    fitness: Fitness
    tour: np.ndarray
    seconds: float
    trials: list


def round_position(x) -> AcsParams:
    """Ceil the integer dimensions (φ, β, na), clamp them to their ACS ranges."""
    x = np.asarray(x, dtype=float)
    v = x.copy()
    for d in _INTEGER_DIMS:
        v[d] = math.ceil(x[d])
    return AcsParams(
        q0=float(np.clip(v[0], 0.0, 1.0)),
        phi_exp=int(np.clip(v[1], 0, acs.MAX_EXPONENT)),
        beta=int(np.clip(v[2], 0, acs.MAX_EXPONENT)),
        rho=float(np.clip(v[3], 0.0, 1.0)),
        alpha=float(np.clip(v[4], 0.0, 1.0)),
        neighbor_frac=float(np.clip(v[5], 0.0, 1.0)),
        num_ants=int(np.clip(v[6], 1, acs.MAX_ANTS)),
    )


def _trial_time(result: acs.TrialResult, clock: str) -> float:
    return float(result.work_to_best) if clock == "steps" else result.time_to_best


def evaluate(x, inst: TspInstance, cfg: PsoConfig, rng: np.random.Generator) -> Evaluation:
    """Best of ``cfg.trials_per_eval`` trials, each seeded from ``rng.spawn``."""
    params = round_position(x)
    t0 = time.perf_counter()
    trials = [acs.run_trial(inst, params, cfg.acs_iterations_per_trial, child)
              for child in rng.spawn(cfg.trials_per_eval)]
    best = min(trials, key=lambda r: (r.best_length, _trial_time(r, cfg.clock)))
    return Evaluation(
        fitness=Fitness(best.best_length, _trial_time(best, cfg.clock)),
        tour=best.best_tour,
        seconds=time.perf_counter() - t0,
        trials=trials,
    )


def update_velocity(p: ParticleState, bg: np.ndarray, cfg: PsoConfig, w: float,
                    rng: np.random.Generator | None = None, r1=None, r2=None,
                    bounds: DomainBounds | None = None) -> np.ndarray:
    """v <- w v + r1 c1 (bl - x) + r2 c2 (bg - x), clamped to +-span per dimension.

    ``r1``/``r2`` may be injected; otherwise they are drawn per dimension.
    """
    x = p.position
    bl = p.best_position if p.best_position is not None else x
    if r1 is None:
        r1 = rng.random(x.shape)
    if r2 is None:
        r2 = rng.random(x.shape)
    v = w * p.velocity + r1 * cfg.c1 * (bl - x) + r2 * cfg.c2 * (np.asarray(bg) - x)
    if bounds is not None:
        v = np.clip(v, -bounds.span, bounds.span)
    return v


def update_position(p: ParticleState, cfg: PsoConfig,
                    bounds: DomainBounds | None = None) -> np.ndarray:
    bounds = bounds or DomainBounds()
    return bounds.clamp(p.position + cfg.chi * p.velocity)


def init_swarm(bounds: DomainBounds, cfg: PsoConfig, rng: np.random.Generator):
    """Half the swarm on a shuffled stratified grid, half uniform at random.

    In the structured half, dimension ``d`` of particle ``k`` is the midpoint
    of stratum ``perm_d[k]``, so every dimension's range is covered evenly.
    """
    size = cfg.swarm_size
    if size < 2 or size % 2:
        raise ValueError(f"swarm_size must be even and >= 2, got {size}")
    half = size // 2
    dims = len(bounds.low)
    strata = np.stack([rng.permutation(half) for _ in range(dims)], axis=1)
    structured = bounds.low + (strata + 0.5) / half * bounds.span
    scattered = rng.uniform(bounds.low, bounds.high, size=(half, dims))
    positions = bounds.clamp(np.vstack([structured, scattered]))
    velocities = rng.uniform(-bounds.span / 2, bounds.span / 2, size=(size, dims))
    return [ParticleState(position=x, velocity=v) for x, v in zip(positions, velocities)]


@dataclass
class TraceRow:
    iteration: int
    min_fitness: int
    mean_fitness: float
    mean_eval_seconds: float
    inertia: float
    best_length: int


@dataclass
class OptimizeResult:
    params: AcsParams
    position: np.ndarray
    fitness: Fitness
    best_tour: np.ndarray
    trace: list[TraceRow]
    swarm: list[ParticleState] = field(repr=False)


def _evaluate_job(args):
    x, inst, cfg, seed, iteration, index = args
    return evaluate(x, inst, cfg, derive_rng(seed, "evaluate", iteration, index, name_key(inst.name)))


def optimize(inst: TspInstance, cfg: PsoConfig, seed: int,
             bounds: DomainBounds | None = None, callback=None) -> OptimizeResult:
    """Tune ACS parameters on ``inst``.

    Each iteration evaluates every particle, refreshes personal and global
    bests (recorded fitnesses, never re-sampled), then moves the swarm.
    ``callback(row)`` is called after each iteration if given.
    """
    bounds = bounds or DomainBounds()
    acs._warmup()
    swarm = init_swarm(bounds, cfg, derive_rng(seed, "swarm-init", name_key(inst.name)))
    g_pos = g_fit = g_tour = None
    trace: list[TraceRow] = []
    pool = ThreadPoolExecutor(cfg.workers) if cfg.workers > 1 else None
    try:
        for t in range(1, cfg.pso_iterations + 1):
            jobs = [(p.position.copy(), inst, cfg, seed, t, i) for i, p in enumerate(swarm)]
            evals = list(pool.map(_evaluate_job, jobs) if pool else map(_evaluate_job, jobs))
            w = cfg.inertia(t)
            for p, ev in zip(swarm, evals):
                p.record(ev.fitness, ev.tour)
                if p.best_fitness.beats(g_fit):
                    g_fit, g_pos, g_tour = p.best_fitness, p.best_position.copy(), p.best_tour
            lengths = [ev.fitness.length for ev in evals]
            row = TraceRow(t, min(lengths), float(np.mean(lengths)),
                           float(np.mean([ev.seconds for ev in evals])), w, g_fit.length)
            trace.append(row)
            if callback:
                callback(row)
            move_rng = derive_rng(seed, "move", t, name_key(inst.name))
            for p in swarm:
                p.velocity = update_velocity(p, g_pos, cfg, w, move_rng, bounds=bounds)
                p.position = update_position(p, cfg, bounds)
    finally:
        if pool:
            pool.shutdown()
    return OptimizeResult(round_position(g_pos), g_pos, g_fit, g_tour, trace, swarm)


TRACE_HEADER = ("iteration", "min_fitness", "mean_fitness", "mean_eval_seconds", "inertia")


def trace_csv(trace) -> str:
    buf = io.StringIO()
    out = csv.writer(buf, lineterminator="\n")
    out.writerow(TRACE_HEADER)
    for r in trace:
        out.writerow([r.iteration, r.min_fitness, f"{r.mean_fitness:.2f}",
                      f"{r.mean_eval_seconds:.3f}", f"{r.inertia:.6f}"])
    return buf.getvalue()
