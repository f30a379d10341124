"""Continuous-time search H = -gamma*A - sum_w |w><w| in the (a, b, c) basis."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import HermitianPropagator, check_hermitian
from .records import RunRecord, SpectralPrediction

BASIS3 = ("a", "b", "c")


def _check(M: int, gamma: float | None = None) -> int:
    if int(M) != M or M < 2:
        raise ValueError(f"M must be an integer >= 2, got {M!r}")
    if gamma is not None and not gamma > 0:
        raise ValueError(f"jumping rate gamma must be > 0, got {gamma!r}")
    return int(M)


@dataclass(frozen=True)
class CtqwParams:
    M: int
    gamma: float
    t_max: float
    dt: float

    def __post_init__(self):
        _check(self.M, self.gamma)
        if not self.dt > 0:
            raise ValueError("dt must be > 0")
        if not self.t_max >= 0:
            raise ValueError("t_max must be >= 0")

    @property
    def times(self) -> np.ndarray:
        n = int(np.floor(self.t_max / self.dt + 1e-9))
        return self.dt * np.arange(n + 1)


def build_hamiltonian(M: int, gamma: float) -> np.ndarray:
    M = _check(M, gamma)
    r = np.sqrt(M - 1.0)
    h = -gamma * np.array(
        [
            [M - 1 + 1.0 / gamma, 1.0, 0.0],
            [1.0, 0.0, r],
            [0.0, r, M - 1.0],
        ]
    )
    return check_hermitian(h.astype(complex), name=f"H(M={M}, gamma={gamma})")


def critical_gamma(M: int) -> float:
    M = _check(M)
    return 2.0 / (-M + np.sqrt(M * (M + 4.0)))


def approx_critical_gamma(M: int) -> float:
    """The 1 + 1/M value used for the figure curves."""
    return 1.0 + 1.0 / _check(M)


def initial_state(M: int) -> np.ndarray:
    """|s_v> in the (a, b, c) basis."""
    M = _check(M)
    return np.array([np.sqrt(M), np.sqrt(M), np.sqrt(M * (M - 1.0))], dtype=complex) / np.sqrt(M * (M + 1.0))


def unmarked_state(M: int) -> np.ndarray:
    """|r>, uniform over unmarked vertices, normalised exactly."""
    M = _check(M)
    return np.array([0.0, 1.0 / np.sqrt(M), np.sqrt((M - 1.0) / M)], dtype=complex)


def success_probability(states) -> np.ndarray:
    return np.abs(np.asarray(states)[..., 0]) ** 2


def evolve_ctqw(params: CtqwParams) -> RunRecord:
    prop = HermitianPropagator(build_hamiltonian(params.M, params.gamma))
    times = params.times
    states = prop.trajectory(times, initial_state(params.M))
    # gamma*A has norm gamma*M: that many effective walk transitions per unit time
    walk = np.rint(params.gamma * params.M * times).astype(np.int64)
    return RunRecord(
        times,
        success_probability(states),
        walk,
        times,
        metadata={
            "module": "ctqw",
            "M": params.M,
            "gamma": params.gamma,
            "t_max": params.t_max,
            "dt": params.dt,
        },
    )


def predicted_runtime(M: int) -> float:
    return np.pi * np.sqrt(M) / 2.0


def predicted_gap(M: int) -> float:
    return 2.0 / np.sqrt(M)


# --- degenerate perturbation theory ------------------------------------------

def leading_order_hamiltonian(M: int, gamma: float) -> np.ndarray:
    """H0: keeps only terms of order sqrt(M) and above."""
    M = _check(M, gamma)
    rm = np.sqrt(M)
    return -gamma * np.array(
        [[M + 1.0 / gamma, 0.0, 0.0], [0.0, 0.0, rm], [0.0, rm, float(M)]], dtype=complex
    )


def perturbation(M: int, gamma: float) -> np.ndarray:
    """H1 = H - H0."""
    return build_hamiltonian(M, gamma) - leading_order_hamiltonian(M, gamma)


def leading_order_eigenpairs(M: int, gamma: float) -> list[SpectralPrediction]:
    M = _check(M, gamma)
    root = np.sqrt(M * (M + 4.0))
    lo = (-np.sqrt(M) - np.sqrt(M + 4.0)) / 2.0
    hi = (-np.sqrt(M) + np.sqrt(M + 4.0)) / 2.0
    return [
        SpectralPrediction("H0 |a>", -gamma * (M + 1.0 / gamma), np.array([1, 0, 0], dtype=complex)),
        SpectralPrediction("H0 b-c (upper)", -gamma * (M - root) / 2.0, np.array([0, lo, 1], dtype=complex)),
        SpectralPrediction("H0 b-c (r-like)", -gamma * (M + root) / 2.0, np.array([0, hi, 1], dtype=complex)),
    ]


def large_m_effective_matrix(M: int) -> np.ndarray:
    """The large-N 2x2 coupling of |a> and |r> at the critical rate."""
    off = -1.0 / np.sqrt(M)
    return np.array([[-M - 1.0, off], [off, -M - 1.0]])


def effective_matrix(M: int, gamma: float) -> np.ndarray:
    """<x|H|y> for x, y in {a, r}, from the exact 3x3 H and exact |r>."""
    h = build_hamiltonian(M, gamma)
    basis = np.stack([np.array([1, 0, 0], dtype=complex), unmarked_state(M)], axis=1)
    return basis.conj().T @ h @ basis


def perturbation_predictions(M: int, gamma: float | None = None) -> list[SpectralPrediction]:
    """Leading-order eigenpairs of H0 plus the two (|r> +- |a>)/sqrt 2 states.

    The coupled pair is only meaningful near the critical rate; ``gamma``
    defaults to it.
    """
    M = _check(M)
    if gamma is None:
        gamma = critical_gamma(M)
    a = np.array([1, 0, 0], dtype=complex)
    r = unmarked_state(M)
    rm = np.sqrt(M)
    return leading_order_eigenpairs(M, gamma) + [
        SpectralPrediction("(|r>+|a>)/sqrt2", -M - 1.0 - 1.0 / rm, (r + a) / np.sqrt(2), "large-M", 0.15),
        SpectralPrediction("(|r>-|a>)/sqrt2", -M - 1.0 + 1.0 / rm, (r - a) / np.sqrt(2), "large-M", 0.15),
    ]
