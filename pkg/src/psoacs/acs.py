"""Ant Colony System with a pheromone exponent and fractional candidate lists.

Transition weight of moving from ``s`` to ``k``::

    p_k = tau[s, k]**phi_exp * eta[s, k]**beta / sum_u (same)   over u in J(s)

where ``J(s)`` is the unvisited part of the candidate list of ``s``. With
probability ``q0`` the ant takes the argmax (exploitation), otherwise it
samples from ``p`` (biased exploration). If every candidate is visited the
ant moves deterministically to the argmax over all unvisited vertices.

Each inserted edge is pulled toward ``tau0`` at rate ``rho`` (local update);
after every iteration the global-best tour's edges are pulled toward
``1 / L_gb`` at rate ``alpha`` (global update). Ants advance in lockstep, so
one ant's local update is visible to the ants moving after it.

The construction loop is compiled with numba. Random numbers are drawn in
chunks from a numpy ``Generator`` and consumed at fixed slots (one pair per
ant per step), which keeps trials bit-reproducible for a given generator.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np
from numba import njit

from .tsplib import TspInstance

MAX_EXPONENT = 8
MAX_ANTS = 40
#: Upper bound on random doubles drawn per chunk of iterations.
_CHUNK_DOUBLES = 1 << 16
#: η uses this as the cost floor so duplicate coordinates (cost 0) stay finite.
_MIN_COST = 0.5


@dataclass(frozen=True)
class AcsParams:
    """One runnable ACS configuration (integer fields already rounded)."""

    q0: float
    phi_exp: int
    beta: int
    rho: float
    alpha: float
    neighbor_frac: float
    num_ants: int

    def __post_init__(self):
        for name in ("q0", "rho", "alpha", "neighbor_frac"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {v}")
        for name, lo, hi in (("phi_exp", 0, MAX_EXPONENT), ("beta", 0, MAX_EXPONENT),
                             ("num_ants", 1, MAX_ANTS)):
            v = getattr(self, name)
            if int(v) != v or not lo <= v <= hi:
                raise ValueError(f"{name} must be an integer in [{lo}, {hi}], got {v}")
            object.__setattr__(self, name, int(v))

    def as_vector(self) -> np.ndarray:
        """Position-vector order used by the tuner: (q0, φ, β, ρ, α, ϕ, na)."""
        return np.array([self.q0, self.phi_exp, self.beta, self.rho, self.alpha,
                         self.neighbor_frac, self.num_ants], dtype=float)


@dataclass
class PheromoneState:
    tau: np.ndarray
    tau0: float


@dataclass
class TrialResult:
    best_tour: np.ndarray
    best_length: int
    time_to_best: float
    total_time: float
    best_iteration: int
    iterations: int
    #: ant-steps performed up to and including the improving iteration
    work_to_best: int
    #: global-best length after each iteration
    history: np.ndarray = field(repr=False)

    @property
    def tour_labels(self) -> list[int]:
        """The best tour in TSPLIB 1-based vertex labels."""
        return [int(v) + 1 for v in self.best_tour]


def heuristic(inst: TspInstance) -> np.ndarray:
    return 1.0 / np.maximum(inst.distance_matrix(), _MIN_COST)


def nearest_neighbor_tour(inst: TspInstance, start: int = 0) -> np.ndarray:
    d = inst.distance_matrix()
    n = inst.dimension
    if not 0 <= start < n:
        raise IndexError(f"start vertex {start} out of range")
    visited = np.zeros(n, dtype=bool)
    tour = [start]
    visited[start] = True
    for _ in range(n - 1):
        row = np.where(visited, np.iinfo(np.int64).max, d[tour[-1]])
        nxt = int(np.argmin(row))  # first minimum = lowest index
        tour.append(nxt)
        visited[nxt] = True
    return np.array(tour)


def nearest_neighbor_length(inst: TspInstance, start: int = 0) -> int:
    return inst.tour_length(nearest_neighbor_tour(inst, start))


def initial_trail(inst: TspInstance) -> float:
    """tau0 = 1 / (|V| * L_nn), with L_nn the greedy tour length from vertex 0."""
    l_nn = max(nearest_neighbor_length(inst, 0), 1)
    return 1.0 / (inst.dimension * l_nn)


def init_pheromone(inst: TspInstance) -> PheromoneState:
    tau0 = initial_trail(inst)
    n = inst.dimension
    return PheromoneState(tau=np.full((n, n), tau0), tau0=tau0)


def candidate_size(n: int, neighbor_frac: float) -> int:
    # round() strips float noise such as 0.3 * 100 = 30.000000000000004
    return max(1, min(n - 1, math.ceil(round(neighbor_frac * n, 9))))


def build_candidates(inst: TspInstance, neighbor_frac: float) -> np.ndarray:
    """Row ``s`` holds the ``candidate_size`` nearest vertices to ``s``, nearest
    first, ties broken by lower index. Shape ``(n, m)``, dtype int64."""
    if not 0.0 <= neighbor_frac <= 1.0:
        raise ValueError(f"neighbor_frac must lie in [0, 1], got {neighbor_frac}")
    n = inst.dimension
    d = inst.distance_matrix().astype(float)
    np.fill_diagonal(d, np.inf)
    m = candidate_size(n, neighbor_frac)
    return np.ascontiguousarray(np.argsort(d, axis=1, kind="stable")[:, :m]).astype(np.int64)


def transition_weights(state: PheromoneState, inst: TspInstance, s: int, candidates,
                       params: AcsParams) -> dict[int, float]:
    cands = [int(c) for c in candidates]
    if not cands:
        raise ValueError("transition weights need at least one candidate")
    eta = heuristic(inst)[s, cands]
    raw = state.tau[s, cands] ** params.phi_exp * eta ** params.beta
    total = raw.sum()
    if total <= 0.0:
        raw, total = np.ones(len(cands)), float(len(cands))
    return {c: float(w) for c, w in zip(cands, raw / total)}


@njit(cache=True, nogil=True)
def _select(visited, cand_row, weights, q, u, q0):
    best = -1
    best_w = -1.0
    total = 0.0
    for c in cand_row:
        if not visited[c]:
            w = weights[c]
            total += w
            if w > best_w or (w == best_w and c < best):
                best_w = w
                best = c
    if best >= 0:
        if q <= q0 or total <= 0.0:
            return best
        r = u * total
        acc = 0.0
        last = best
        for c in cand_row:
            if not visited[c] and weights[c] > 0.0:
                acc += weights[c]
                last = c
                if acc > r:
                    return c
        return last
    # candidate list exhausted: deterministic argmax over every unvisited vertex
    for j in range(visited.shape[0]):
        if not visited[j] and (best < 0 or weights[j] > best_w):
            best_w = weights[j]
            best = j
    return best


@njit(cache=True, nogil=True)
def _local(tau, choice, eta_pow, a, b, rho, tau0, phi):
    t = (1.0 - rho) * tau[a, b] + rho * tau0
    tau[a, b] = t
    tau[b, a] = t
    c = t ** phi * eta_pow[a, b]
    choice[a, b] = c
    choice[b, a] = c


@njit(cache=True, nogil=True)
def _run_chunk(dist, eta_pow, tau, choice, tau0, cand, phi, rho, alpha, q0,
               starts, rand, best_tour, best_len, history):
    n_iter, na = starts.shape
    n = dist.shape[0]
    tours = np.empty((na, n), dtype=np.int64)
    lengths = np.empty(na, dtype=np.int64)
    visited = np.zeros((na, n), dtype=np.bool_)
    last_improve = -1
    for it in range(n_iter):
        visited[:, :] = False
        for k in range(na):
            s = starts[it, k]
            tours[k, 0] = s
            visited[k, s] = True
            lengths[k] = 0
        for step in range(1, n):
            for k in range(na):
                s = tours[k, step - 1]
                j = _select(visited[k], cand[s], choice[s],
                            rand[it, step - 1, k, 0], rand[it, step - 1, k, 1], q0)
                tours[k, step] = j
                visited[k, j] = True
                lengths[k] += dist[s, j]
                _local(tau, choice, eta_pow, s, j, rho, tau0, phi)
        for k in range(na):
            s = tours[k, n - 1]
            j = tours[k, 0]
            lengths[k] += dist[s, j]
            _local(tau, choice, eta_pow, s, j, rho, tau0, phi)
        ib = 0
        for k in range(1, na):
            if lengths[k] < lengths[ib]:
                ib = k
        if lengths[ib] < best_len[0]:
            best_len[0] = lengths[ib]
            best_tour[:] = tours[ib]
            last_improve = it
        deposit = alpha * (1.0 / max(best_len[0], 1))
        for p in range(n):
            a = best_tour[p]
            b = best_tour[(p + 1) % n]
            t = (1.0 - alpha) * tau[a, b] + deposit
            tau[a, b] = t
            tau[b, a] = t
            c = t ** phi * eta_pow[a, b]
            choice[a, b] = c
            choice[b, a] = c
        history[it] = best_len[0]
    return last_improve


def choose_next(state: PheromoneState, inst: TspInstance, visited, current: int,
                params: AcsParams, rng: np.random.Generator, candidates=None) -> int:
    """Pick the next vertex for an ant standing on ``current``.

    ``visited`` is a boolean mask or a collection of visited vertices.
    ``candidates`` defaults to ``build_candidates(inst, params.neighbor_frac)``.
    """
    n = inst.dimension
    mask = np.asarray(visited, dtype=bool) if _is_mask(visited, n) else _as_mask(visited, n)
    if mask.all():
        raise ValueError("no unvisited vertex left")
    if candidates is None:
        candidates = build_candidates(inst, params.neighbor_frac)
    weights = state.tau[current] ** params.phi_exp * heuristic(inst)[current] ** params.beta
    q, u = rng.random(2)
    return int(_select(mask, np.asarray(candidates[current], dtype=np.int64), weights,
                       q, u, params.q0))


def _is_mask(visited, n):
    return isinstance(visited, np.ndarray) and visited.dtype == bool and visited.shape == (n,)


def _as_mask(visited, n):
    mask = np.zeros(n, dtype=bool)
    mask[list(visited)] = True
    return mask


def local_update(state: PheromoneState, edge, params: AcsParams) -> None:
    i, j = edge
    t = (1.0 - params.rho) * state.tau[i, j] + params.rho * state.tau0
    state.tau[i, j] = state.tau[j, i] = t


def global_update(state: PheromoneState, best_tour, best_length: int, params: AcsParams) -> None:
    """Reinforce only the edges of ``best_tour`` (closing edge included)."""
    deposit = params.alpha * (1.0 / max(best_length, 1))
    tour = list(best_tour)
    for a, b in zip(tour, tour[1:] + tour[:1]):
        t = (1.0 - params.alpha) * state.tau[a, b] + deposit
        state.tau[a, b] = state.tau[b, a] = t


_warm = False


def _warmup():
    """Compile the kernels once so the first timed trial measures search, not JIT."""
    global _warm
    if _warm:
        return
    _warm = True
    inst = TspInstance("warmup", np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]))
    AntColony(inst, AcsParams(0.5, 1, 1, 0.1, 0.1, 0.5, 2), np.random.default_rng(0)).run(1)


class AntColony:
    """Mutable search state of one trial; ``run`` may be called repeatedly."""

    def __init__(self, inst: TspInstance, params: AcsParams, rng: np.random.Generator):
        self.inst = inst
        self.params = params
        self.rng = rng
        n = inst.dimension
        self.dist = np.ascontiguousarray(inst.distance_matrix(), dtype=np.int64)
        self.eta_pow = heuristic(inst) ** params.beta
        self.state = init_pheromone(inst)
        self.choice = self.state.tau ** params.phi_exp * self.eta_pow
        self.candidates = build_candidates(inst, params.neighbor_frac)
        self.best_tour = np.arange(n, dtype=np.int64)
        self._best_len = np.array([np.iinfo(np.int64).max], dtype=np.int64)
        self.iteration = 0
        self.history: list[np.ndarray] = []
        self.best_iteration = -1
        self.time_to_best = 0.0
        self.elapsed = 0.0
        na = params.num_ants
        self.chunk = max(1, _CHUNK_DOUBLES // (2 * na * (n - 1)))

    @property
    def best_length(self) -> int:
        return int(self._best_len[0])

    def run(self, iterations: int) -> TrialResult:
        if iterations < 1:
            raise ValueError("iterations must be >= 1")
        if not _warm:
            _warmup()
        p = self.params
        n, na = self.inst.dimension, p.num_ants
        t_begin = time.perf_counter() - self.elapsed
        remaining = iterations
        while remaining:
            k = min(self.chunk, remaining)
            c0 = time.perf_counter()
            starts = self.rng.integers(0, n, size=(k, na))
            rand = self.rng.random((k, n - 1, na, 2))
            hist = np.empty(k, dtype=np.int64)
            idx = _run_chunk(self.dist, self.eta_pow, self.state.tau, self.choice,
                             self.state.tau0, self.candidates, p.phi_exp, p.rho, p.alpha,
                             p.q0, starts, rand, self.best_tour, self._best_len, hist)
            c1 = time.perf_counter()
            if idx >= 0:
                self.best_iteration = self.iteration + idx
                # linear interpolation inside the chunk
                self.time_to_best = (c0 - t_begin) + (idx + 1) / k * (c1 - c0)
            self.history.append(hist)
            self.iteration += k
            remaining -= k
        self.elapsed = time.perf_counter() - t_begin
        return TrialResult(
            best_tour=self.best_tour.copy(),
            best_length=self.best_length,
            time_to_best=self.time_to_best,
            total_time=self.elapsed,
            best_iteration=self.best_iteration,
            iterations=self.iteration,
            work_to_best=(self.best_iteration + 1) * na * n,
            history=np.concatenate(self.history),
        )


def run_trial(inst: TspInstance, params: AcsParams, iterations: int,
              rng: np.random.Generator) -> TrialResult:
    """One ACS trial: ``iterations`` colony iterations, best tour over all of them."""
    return AntColony(inst, params, rng).run(iterations)
