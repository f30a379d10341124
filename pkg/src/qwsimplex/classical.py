"""Classical random-walk baselines.

Exact expected hitting times come from the walk lumped onto the vertex
classes {a, b, c}. Monte Carlo runs the walker on the real graph with a
query schedule: the oracle is asked "is my vertex marked?" at step 0 and
after every k-th step, and the trial ends at the first yes.

Each trial draws from its own PCG64 stream keyed by (seed, trial index),
so aggregates do not depend on execution order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numba
import numpy as np

from .graph import SimplexParams


@dataclass(frozen=True)
class LumpedChain:
    """Class-to-class transition probabilities; a is absorbing."""

    M: int

    @property
    def matrix(self) -> np.ndarray:
        M = self.M
        return np.array(
            [
                [1.0, 0.0, 0.0],
                [1.0 / M, 0.0, (M - 1.0) / M],
                [0.0, 1.0 / M, (M - 1.0) / M],
            ]
        )


def hitting_system(M: int) -> tuple[np.ndarray, np.ndarray]:
    """(A, b) with A @ (h_b, h_c) = b."""
    transient = LumpedChain(M).matrix[1:, 1:]
    return np.eye(2) - transient, np.ones(2)


def exact_hitting_steps(M: int) -> tuple[float, float]:
    """Expected steps to reach a marked vertex from a b and from a c vertex."""
    if int(M) != M or M < 2:
        raise ValueError(f"M must be an integer >= 2, got {M!r}")
    a, b = hitting_system(M)
    h_b, h_c = np.linalg.solve(a, b)
    return float(h_b), float(h_c)


def expected_steps_uniform_unmarked(M: int) -> float:
    h_b, h_c = exact_hitting_steps(M)
    return (h_b + (M - 1) * h_c) / M


@dataclass(frozen=True)
class WalkTrialResult:
    steps_to_hit: int
    queries_used: int
    seed: int
    trial: int


@dataclass(frozen=True)
class MonteCarloSummary:
    M: int
    steps_per_query: int
    trials: int
    seed: int
    mean_queries: float
    stderr_queries: float
    mean_steps: float
    stderr_steps: float


@numba.njit(cache=True)
def _walk(clique, slot, choices, step0, k, marked, M):
    """Advance a walker through ``choices``; returns (clique, slot, steps, hit)."""
    s = step0
    for idx in range(choices.shape[0]):
        d = choices[idx]
        if d == M - 1:
            clique, slot = slot, clique
        else:
            lo = min(clique, slot)
            hi = max(clique, slot)
            new = d
            if new >= lo:
                new += 1
            if new >= hi:
                new += 1
            slot = new
        s += 1
        if s % k == 0 and clique == marked:
            return clique, slot, s, True
    return clique, slot, s, False


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(trial,))))


def random_unmarked_vertex(params: SimplexParams, rng: np.random.Generator) -> tuple[int, int]:
    M = params.M
    idx = int(rng.integers(0, M * M))  # M cliques of M vertices are unmarked
    c, p = divmod(idx, M)
    clique = c if c < params.marked_clique else c + 1
    slot = p if p < clique else p + 1
    return clique, slot


def run_trial(params: SimplexParams, steps_per_query: int, seed: int, trial: int) -> WalkTrialResult:
    M, k = params.M, steps_per_query
    rng = trial_rng(seed, trial)
    clique, slot = random_unmarked_vertex(params, rng)
    steps = 0
    if clique == params.marked_clique:
        return WalkTrialResult(0, 1, seed, trial)
    chunk = max(4096, 2 * M * M)
    while True:
        choices = rng.integers(0, M, size=chunk, dtype=np.int64)
        clique, slot, steps, hit = _walk(clique, slot, choices, steps, k, params.marked_clique, M)
        if hit:
            return WalkTrialResult(steps, steps // k + 1, seed, trial)


def monte_carlo_trials(M: int, steps_per_query: int, trials: int, seed: int,
                       marked_clique: int = 0, trial_ids=None) -> list[WalkTrialResult]:
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if steps_per_query < 1:
        raise ValueError("steps_per_query must be >= 1")
    params = SimplexParams(M, marked_clique)
    ids = range(trials) if trial_ids is None else trial_ids
    return [run_trial(params, steps_per_query, seed, i) for i in ids]


def summarize(results: list[WalkTrialResult], M: int, steps_per_query: int, seed: int) -> MonteCarloSummary:
    q = np.array([r.queries_used for r in results], dtype=float)
    s = np.array([r.steps_to_hit for r in results], dtype=float)
    n = len(results)
    se = (lambda x: float(x.std(ddof=1) / np.sqrt(n))) if n > 1 else (lambda x: float("nan"))
    return MonteCarloSummary(M, steps_per_query, n, seed, float(q.mean()), se(q), float(s.mean()), se(s))


def monte_carlo_queries(M: int, steps_per_query: int, trials: int, seed: int,
                        marked_clique: int = 0) -> MonteCarloSummary:
    results = monte_carlo_trials(M, steps_per_query, trials, seed, marked_clique)
    return summarize(results, M, steps_per_query, seed)


@numba.njit(cache=True)
def _count_transitions(clique, slot, choices, marked, M, counts):
    for idx in range(choices.shape[0]):
        if clique == marked:
            frm = 0
        elif slot == marked:
            frm = 1
        else:
            frm = 2
        d = choices[idx]
        if d == M - 1:
            clique, slot = slot, clique
        else:
            lo = min(clique, slot)
            hi = max(clique, slot)
            new = d
            if new >= lo:
                new += 1
            if new >= hi:
                new += 1
            slot = new
        if clique == marked:
            to = 0
        elif slot == marked:
            to = 1
        else:
            to = 2
        counts[frm, to] += 1
    return clique, slot


def empirical_class_transitions(M: int, steps: int, seed: int, marked_clique: int = 0) -> np.ndarray:
    """3x3 counts of class-to-class moves along one long walk on the graph
    (marked vertices are not absorbing here)."""
    params = SimplexParams(M, marked_clique)
    rng = trial_rng(seed, 0)
    clique, slot = random_unmarked_vertex(params, rng)
    counts = np.zeros((3, 3), dtype=np.int64)
    done = 0
    while done < steps:
        n = min(1 << 20, steps - done)
        choices = rng.integers(0, M, size=n, dtype=np.int64)
        clique, slot = _count_transitions(clique, slot, choices, marked_clique, M, counts)
        done += n
    return counts


def scaling_fit(points) -> tuple[float, float]:
    """Least-squares slope of log(value) on log(M), and its r^2."""
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2 or len(pts) < 3:
        raise ValueError("need at least three (M, value) points")
    if np.any(pts <= 0):
        raise ValueError("M and value must be positive for a log-log fit")
    x, y = np.log(pts[:, 0]), np.log(pts[:, 1])
    slope, intercept = np.polyfit(x, y, 1)
    fitted = slope * x + intercept
    ss_res = float(np.sum((y - fitted) ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return float(slope), r2
