"""Discrete-time search with k walk steps per oracle query: U = U0^k R_w."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dtqw import ORACLE_PHASE, build_u0, coin_angle, initial_state, success_probability, trajectory
from .linalg import matrix_power
from .records import QueryLedger, RunRecord, SpectralPrediction


def _check_m(M: int) -> int:
    if int(M) != M or M < 3:
        raise ValueError(f"multistep search needs integer M >= 3, got {M!r}")
    return int(M)


def u0_phases(M: int) -> tuple[float, float]:
    """phi_+, phi_- of U0: cos phi_pm = (+-1 + cos theta)/2."""
    c, _ = coin_angle(M)
    return float(np.arccos((1.0 + c) / 2.0)), float(np.arccos((-1.0 + c) / 2.0))


def u0_sin_phases(M: int) -> tuple[float, float]:
    c, _ = coin_angle(M)
    return (
        float(np.sqrt((1 - c) * (3 + c)) / 2),
        float(np.sqrt((1 + c) * (3 - c)) / 2),
    )


def choose_k(M: int, n: int = 0) -> int:
    """Nearest integer to (2n+1)*pi/phi_+ using the exact U0 phase."""
    M = _check_m(M)
    if n < 0:
        raise ValueError("n must be >= 0")
    phi, _ = u0_phases(M)
    return max(1, int(np.floor((2 * n + 1) * np.pi / phi + 0.5)))


def predicted_queries(M: int) -> float:
    return np.pi * np.sqrt(M) / 4.0


@dataclass
class MultistepParams:
    M: int
    queries: int
    n: int = 0
    k: int | None = field(default=None)

    def __post_init__(self):
        _check_m(self.M)
        if self.queries < 0:
            raise ValueError("queries must be >= 0")
        if self.k is None:
            self.k = choose_k(self.M, self.n)
        if int(self.k) != self.k or self.k < 1:
            raise ValueError(f"k must be a positive integer, got {self.k!r}")
        self.k = int(self.k)


def multistep_operator(M: int, k: int) -> np.ndarray:
    return matrix_power(build_u0(M), k) @ ORACLE_PHASE


def run_multistep(params: MultistepParams) -> RunRecord:
    M, k, q = params.M, params.k, params.queries
    states = trajectory(multistep_operator(M, k), initial_state(M), q)
    t = np.arange(q + 1)
    return RunRecord(
        t,
        success_probability(states),
        k * t,
        t,
        metadata={"module": "multistep", "M": M, "n": params.n, "k": k, "queries": q},
        ledger=QueryLedger(oracle_queries=q, walk_steps=k * q, steps_per_query=k),
    )


# --- U0 spectrum --------------------------------------------------------------

def u0_eigenvector(M: int, lam: complex) -> np.ndarray:
    """Unnormalised eigenvector of U0 for eigenvalue lam, first entry 1."""
    c, s = coin_angle(M)
    lam = complex(lam)
    e = (lam**3 * c - lam**2 * c**2 - lam * c + 1) / (lam**2 * s**2)
    return np.array(
        [
            1.0,
            (lam - c) / s,
            (1 - lam * c) / (lam * s),
            (lam**3 - lam**2 * c - lam * c**2 + c) / (lam * s**2),
            e,
            e * s / (lam - c),
        ],
        dtype=complex,
    )


def _u0_vectors_in_m(M: int) -> dict[str, np.ndarray]:
    r = np.sqrt(M - 1.0)
    q = np.sqrt(2.0 * M - 1.0)
    p = np.sqrt(M + 1.0)
    w = np.sqrt(M * M - 1.0)
    out = {
        "1": np.array([1, 1 / r, 1 / r, 1, 1, r], dtype=complex),
        "-1": np.array([1, -r, -r, 1, 1, -1 / r], dtype=complex),
    }
    for sign, key in ((1, "+phi_+"), (-1, "-phi_+")):
        out[key] = 0.5 * np.array(
            [2, (1 + sign * 1j * q) / r, (1 - sign * 1j * q) / r,
             (-1 + sign * 1j * q) / (M - 1), (-1 - sign * 1j * q) / (M - 1), -2 / r],
            dtype=complex,
        )
    for sign, key in ((1, "+phi_-"), (-1, "-phi_-")):
        out[key] = 0.5 * np.array(
            [2, -r + sign * 1j * p, -r - sign * 1j * p,
             -(M - 1) - sign * 1j * w, -(M - 1) + sign * 1j * w, 2 * r],
            dtype=complex,
        )
    return out


def _u0_vectors_large_m(M: int) -> dict[str, np.ndarray]:
    rm = np.sqrt(M)
    r2 = np.sqrt(2.0)
    out = {
        "1": np.array([1 / rm, 1 / M, 1 / M, 1 / rm, 1 / rm, 1], dtype=complex),
        "-1": np.array([1 / (r2 * rm), -1 / r2, -1 / r2, 1 / (r2 * rm), 1 / (r2 * rm), -1 / (r2 * M)], dtype=complex),
    }
    for s, key in ((1, "+phi_+"), (-1, "-phi_+")):
        out[key] = np.array(
            [1 / r2, 1 / (2 * r2 * rm) + s * 0.5j, 1 / (2 * r2 * rm) - s * 0.5j,
             -1 / (2 * r2 * M) + s * 0.5j / rm, -1 / (2 * r2 * M) - s * 0.5j / rm, -1 / (r2 * rm)],
            dtype=complex,
        )
    for s, key in ((1, "+phi_-"), (-1, "-phi_-")):
        out[key] = np.array(
            [1 / M, (-1 + s * 1j) / (2 * rm), (-1 - s * 1j) / (2 * rm),
             (-1 - s * 1j) / 2, (-1 + s * 1j) / 2, 1 / rm],
            dtype=complex,
        )
    return out


def _u0_eigenvalues(M: int) -> dict[str, complex]:
    pp, pm = u0_phases(M)
    return {
        "1": 1.0 + 0j,
        "-1": -1.0 + 0j,
        "+phi_+": np.exp(1j * pp),
        "-phi_+": np.exp(-1j * pp),
        "+phi_-": np.exp(1j * pm),
        "-phi_-": np.exp(-1j * pm),
    }


def u0_spectrum_closed_form(M: int) -> list[SpectralPrediction]:
    M = _check_m(M)
    vals = _u0_eigenvalues(M)
    exact = _u0_vectors_in_m(M)
    approx = _u0_vectors_large_m(M)
    preds = [SpectralPrediction(f"U0 {key}", vals[key], exact[key]) for key in vals]
    preds += [SpectralPrediction(f"U0 {key} (large M)", vals[key], approx[key], "large-M", 0.05) for key in vals]
    aa_combo = (approx["+phi_+"] + approx["-phi_+"]) / np.sqrt(2.0)
    preds.append(SpectralPrediction("|aa> ~ (|phi_+> + |-phi_+>)/sqrt2", None, aa_combo, "large-M", 0.01))
    return preds


def u0_diagonalization(M: int) -> tuple[np.ndarray, np.ndarray]:
    """(P, eigenvalues): unitary P with U0 = P diag(eigenvalues) P^dag.

    Columns ordered |1>, |-1>, |phi_+>, |-phi_+>, |phi_->, |-phi_->.
    """
    M = _check_m(M)
    vals = _u0_eigenvalues(M)
    vecs = _u0_vectors_in_m(M)
    keys = list(vals)
    p = np.stack([vecs[k] / np.linalg.norm(vecs[k]) for k in keys], axis=1)
    return p, np.array([vals[k] for k in keys])


def d_power(M: int, k: int, resonant: bool = False) -> np.ndarray:
    """D^k; ``resonant`` substitutes e^{+-ik phi_+} = -1 as in the k choice."""
    _, lam = u0_diagonalization(M)
    d = lam ** k
    if resonant:
        d[2] = d[3] = -1.0
    return np.diag(d)


def first_order_operator(M: int, k: int) -> np.ndarray:
    """U0^k R_w kept to O(1/sqrt M), assuming k*phi_+ = (2n+1)*pi."""
    _, pm = u0_phases(M)
    e = (-1) ** k
    ck, sk = np.cos(k * pm), np.sin(k * pm)
    g = 1.0 / np.sqrt(M)
    return np.array(
        [
            [1, (1 + e) / 2 * g, (-1 - e) / 2 * g, 0, 0, 2 * g],
            [(1 + e) / 2 * g, (1 - e) / 2, (1 + e) / 2, (-1 - e + 2 * sk) / 2 * g, (1 - e + 2 * ck) / 2 * g, 0],
            [(1 + e) / 2 * g, (-1 - e) / 2, (-1 + e) / 2, (1 - e + 2 * ck) / 2 * g, (-1 - e - 2 * sk) / 2 * g, 0],
            [0, (1 + e + 2 * sk) / 2 * g, (1 - e + 2 * ck) / 2 * g, ck, -sk, (1 - ck + sk) * g],
            [0, (-1 + e - 2 * ck) / 2 * g, (-1 - e + 2 * sk) / 2 * g, sk, ck, (1 - ck - sk) * g],
            [-2 * g, 0, 0, (1 - ck - sk) * g, (1 - ck + sk) * g, 1],
        ],
        dtype=complex,
    )


def leading_order_operator(M: int, k: int) -> np.ndarray:
    _, pm = u0_phases(M)
    e = (-1) ** k
    ck, sk = np.cos(k * pm), np.sin(k * pm)
    u = np.zeros((6, 6), dtype=complex)
    u[0, 0] = u[5, 5] = 1
    u[1, 1], u[1, 2] = (1 - e) / 2, (1 + e) / 2
    u[2, 1], u[2, 2] = (-1 - e) / 2, (-1 + e) / 2
    u[3, 3], u[3, 4], u[4, 3], u[4, 4] = ck, -sk, sk, ck
    return u


def _unit(*pairs) -> np.ndarray:
    v = np.zeros(6, dtype=complex)
    for i, a in pairs:
        v[i] = a
    return v / np.linalg.norm(v)


def leading_order_eigenpairs(M: int, k: int) -> list[SpectralPrediction]:
    """Exact eigenpairs of :func:`leading_order_operator` for this parity."""
    _, pm = u0_phases(M)
    rot = [
        SpectralPrediction("(-i|bc>+|cb>)/sqrt2", np.exp(-1j * k * pm), _unit((3, -1j), (4, 1))),
        SpectralPrediction("(i|bc>+|cb>)/sqrt2", np.exp(1j * k * pm), _unit((3, 1j), (4, 1))),
    ]
    common = [
        SpectralPrediction("|aa>", 1.0 + 0j, _unit((0, 1))),
        SpectralPrediction("|cc>", 1.0 + 0j, _unit((5, 1))),
    ]
    if k % 2 == 0:
        ab = [
            SpectralPrediction("(-i|ab>+|ba>)/sqrt2", 1j, _unit((1, -1j), (2, 1))),
            SpectralPrediction("(i|ab>+|ba>)/sqrt2", -1j, _unit((1, 1j), (2, 1))),
        ]
    else:
        ab = [
            SpectralPrediction("|ba>", -1.0 + 0j, _unit((2, 1))),
            SpectralPrediction("|ab>", 1.0 + 0j, _unit((1, 1))),
        ]
    return ab + common + rot


def effective_matrix(M: int, k: int) -> np.ndarray:
    """Degenerate block: 2x2 on (aa, cc) for even k, 3x3 on (aa, ab, cc) for odd k."""
    g = 2.0 / np.sqrt(M)
    if k % 2 == 0:
        return np.array([[1, g], [-g, 1]], dtype=complex)
    return np.array([[1, 0, g], [0, 1, 0], [-g, 0, 1]], dtype=complex)


def numerical_effective_matrix(M: int, k: int) -> np.ndarray:
    """The same block read off the exact operator."""
    idx = [0, 5] if k % 2 == 0 else [0, 1, 5]
    u = multistep_operator(M, k)
    return u[np.ix_(idx, idx)]


def sigma_sine(M: int) -> float:
    return 2.0 / np.sqrt(M)


def predicted_sigma_eigenpairs(M: int, k: int) -> list[SpectralPrediction]:
    """|+-sigma> = (-+i|aa> + |cc>)/sqrt2 with eigenvalues e^{+-i sigma}.

    The relative phase i between |aa> and |cc> is what the 2x2 block
    [[1, g], [-g, 1]] actually produces; for odd k |ab> is added with
    eigenvalue 1.
    """
    M = _check_m(M)
    sigma = float(np.arcsin(min(1.0, sigma_sine(M))))
    preds = [
        SpectralPrediction("+sigma", np.exp(1j * sigma), _unit((0, -1j), (5, 1)), "large-M", 0.25),
        SpectralPrediction("-sigma", np.exp(-1j * sigma), _unit((0, 1j), (5, 1)), "large-M", 0.25),
    ]
    if k % 2 == 1:
        preds.append(SpectralPrediction("|ab>", 1.0 + 0j, _unit((1, 1)), "large-M", 0.25))
    return preds


def real_phase_sigma_vectors() -> tuple[np.ndarray, np.ndarray]:
    """(-|aa> + |cc>)/sqrt2 and (|aa> + |cc>)/sqrt2, without the phase i."""
    return _unit((0, -1), (5, 1)), _unit((0, 1), (5, 1))
