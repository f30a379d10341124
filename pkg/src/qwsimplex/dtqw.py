"""Coined discrete-time search reduced to its 6-dimensional invariant subspace.

Basis order is ``BASIS6``: uniform superpositions over arcs a->a, a->b,
b->a, b->c, c->b and c->c.
"""

from __future__ import annotations

from enum import Enum

import numpy as np

from .linalg import check_unitary
from .records import RunRecord, SpectralPrediction

BASIS6 = ("aa", "ab", "ba", "bc", "cb", "cc")
ORACLE_PHASE = np.diag([-1.0, -1.0, 1.0, 1.0, 1.0, 1.0])


class CoinChoice(str, Enum):
    FLIP = "flip"  # C1 = -C0
    SKW = "skw"  # C1 = -I


def _check_m(M: int) -> int:
    if int(M) != M or M < 2:
        raise ValueError(f"M must be an integer >= 2, got {M!r}")
    return int(M)


def coin_angle(M: int) -> tuple[float, float]:
    """(cos theta, sin theta) with cos theta = 1 - 2/M."""
    M = _check_m(M)
    return 1.0 - 2.0 / M, 2.0 * np.sqrt(M - 1.0) / M


def build_u0(M: int) -> np.ndarray:
    c, s = coin_angle(M)
    u = np.array(
        [
            [c, s, 0, 0, 0, 0],
            [0, 0, -c, s, 0, 0],
            [s, -c, 0, 0, 0, 0],
            [0, 0, 0, 0, -c, s],
            [0, 0, s, c, 0, 0],
            [0, 0, 0, 0, s, c],
        ],
        dtype=complex,
    )
    return check_unitary(u, name=f"U0(M={M})")


def initial_state(M: int) -> np.ndarray:
    M = _check_m(M)
    r = np.sqrt(M - 1.0)
    psi = np.array([r, 1.0, 1.0, r, r, M - 1.0], dtype=complex)
    return psi / np.sqrt(M * (M + 1.0))


def build_search_operator(M: int, coin) -> np.ndarray:
    coin = CoinChoice(coin)
    u = build_u0(M) @ ORACLE_PHASE
    if coin is CoinChoice.SKW:
        # marked vertices get -I instead of -C0: rows fed from a-vertex arcs
        u[0] = [-1, 0, 0, 0, 0, 0]
        u[2] = [0, -1, 0, 0, 0, 0]
    return check_unitary(u, name=f"U[{coin.value}](M={M})")


def success_probability(states) -> np.ndarray:
    """Probability on marked vertices: |<aa|psi>|^2 + |<ab|psi>|^2."""
    states = np.asarray(states)
    return np.abs(states[..., 0]) ** 2 + np.abs(states[..., 1]) ** 2


def trajectory(operator, state, steps: int) -> np.ndarray:
    """States after 0..steps applications, shape (steps+1, dim)."""
    out = np.empty((steps + 1, len(state)), dtype=complex)
    out[0] = state
    for t in range(steps):
        out[t + 1] = operator @ out[t]
    return out


def evolve_dtqw(M: int, coin, steps: int) -> RunRecord:
    if steps < 0:
        raise ValueError("steps must be >= 0")
    coin = CoinChoice(coin)
    states = trajectory(build_search_operator(M, coin), initial_state(M), steps)
    t = np.arange(steps + 1)
    return RunRecord(
        t,
        success_probability(states),
        t,
        t,
        metadata={"module": "dtqw", "M": M, "coin": coin.value, "steps": steps, "steps_per_query": 1},
    )


def skw_predicted_runtime(M: int) -> float:
    """pi*M/(2*sqrt 2) applications of U to reach probability 1/2."""
    return np.pi * M / (2.0 * np.sqrt(2.0))


# --- closed-form spectra ------------------------------------------------------

def flip_phases(M: int) -> tuple[float, float]:
    """phi_+, phi_- with cos phi_pm = +-sqrt(M-1)/M."""
    M = _check_m(M)
    return float(np.arccos(np.sqrt(M - 1.0) / M)), float(np.arccos(-np.sqrt(M - 1.0) / M))


def skw_alpha(M: int) -> float:
    c, _ = coin_angle(M)
    return float(np.sqrt((1.0 + c) * (5.0 - 3.0 * c)))


def skw_phases(M: int) -> tuple[float, float]:
    """phi_+, phi_- with cos phi_pm = (1 + cos theta +- alpha)/4."""
    c, _ = coin_angle(M)
    a = skw_alpha(M)
    return float(np.arccos((1 + c + a) / 4)), float(np.arccos((1 + c - a) / 4))


def skw_sin_phi(M: int) -> tuple[float, float]:
    """sin phi_pm written directly in M."""
    base = M * M + 1.0
    root = (M - 1.0) ** 1.5 * np.sqrt(M + 3.0)
    return (
        float(np.sqrt(base - root) / (np.sqrt(2.0) * M)),
        float(np.sqrt(base + root) / (np.sqrt(2.0) * M)),
    )


def flip_eigenvector(M: int, lam: complex) -> np.ndarray:
    """Unnormalised eigenvector of U0*R_w for eigenvalue lam, first entry 1."""
    c, s = coin_angle(M)
    lam = complex(lam)
    e = (-(lam**3) * c - lam**2 * c**2 - lam * c - 1) / (lam**2 * s**2)
    return np.array(
        [
            1.0,
            (-lam - c) / s,
            (-1 - lam * c) / (lam * s),
            (-(lam**3) - lam**2 * c - lam * c**2 - c) / (lam * s**2),
            e,
            e * s / (lam - c),
        ],
        dtype=complex,
    )


def skw_eigenvector(M: int, lam: complex) -> np.ndarray:
    """Unnormalised eigenvector (0, -lam, 1, ...) of the SKW operator."""
    c, s = coin_angle(M)
    lam = complex(lam)
    return np.array(
        [
            0.0,
            -lam,
            1.0,
            (c - lam**2) / s,
            (1 - c * lam**2) / (lam * s),
            (1 - c * lam**2) / (lam * (lam - c)),
        ],
        dtype=complex,
    )


def spectrum_closed_form(M: int, coin) -> list[SpectralPrediction]:
    coin = CoinChoice(coin)
    M = _check_m(M)
    preds: list[SpectralPrediction] = []
    if coin is CoinChoice.FLIP:
        pp, pm = flip_phases(M)
        for label, lam in (
            ("1", 1.0 + 0j),
            ("-1", -1.0 + 0j),
            ("+phi_+", np.exp(1j * pp)),
            ("-phi_+", np.exp(-1j * pp)),
            ("+phi_-", np.exp(1j * pm)),
            ("-phi_-", np.exp(-1j * pm)),
        ):
            preds.append(SpectralPrediction(f"flip {label}", lam, flip_eigenvector(M, lam)))
        r = np.sqrt(M - 1.0)
        psi1 = np.array([1, -r, -r, -(M - 1), -(M - 1), -((M - 1) ** 1.5)], dtype=complex)
        preds.append(SpectralPrediction("flip psi_1 in M", 1.0 + 0j, psi1))
        preds.append(
            SpectralPrediction(
                "flip psi_1 ~ initial state", 1.0 + 0j, initial_state(M), regime="large-M", tolerance=0.01
            )
        )
    else:
        pp, pm = skw_phases(M)
        e_aa = np.zeros(6, dtype=complex)
        e_aa[0] = 1.0
        preds.append(SpectralPrediction("skw -1 (|aa>)", -1.0 + 0j, e_aa))
        preds.append(SpectralPrediction("skw -1 (second)", -1.0 + 0j, None))
        for label, lam in (
            ("+phi_+", np.exp(1j * pp)),
            ("-phi_+", np.exp(-1j * pp)),
            ("+phi_-", np.exp(1j * pm)),
            ("-phi_-", np.exp(-1j * pm)),
        ):
            preds.append(SpectralPrediction(f"skw {label}", lam, skw_eigenvector(M, lam)))
        combo = 1j * (skw_eigenvector(M, np.exp(1j * pp)) - skw_eigenvector(M, np.exp(-1j * pp))) / (2 * np.sqrt(2))
        preds.append(
            SpectralPrediction(
                "skw initial state ~ i(psi_+ - psi_-)/(2 sqrt 2)", None, combo, regime="large-M", tolerance=0.05
            )
        )
    return preds
