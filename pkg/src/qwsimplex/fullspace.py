"""Brute-force walks on the full arc space C^N (x) C^M and vertex space C^N.

Used as an independent check that the 6D and 3D reductions are exact.
Nothing here forms a dense N*M x N*M (or N x N) operator: coins act per
vertex block, the shift is an index permutation, and the continuous-time
propagator is a Chebyshev expansion over the structural adjacency action.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np
from scipy.special import jv

from . import graph
from .dtqw import CoinChoice
from .graph import SimplexParams

ORACLE_MODES = ("per-step-coin", "rw-phase", "none")
ARC_CLASSES = ("aa", "ab", "ba", "bc", "cb", "cc")


class PropagationError(RuntimeError):
    def __init__(self, message: str, achieved_error: float):
        super().__init__(f"{message} (achieved error estimate {achieved_error:.3e})")
        self.achieved_error = achieved_error


@lru_cache(maxsize=32)
def arc_classes(params: SimplexParams) -> np.ndarray:
    """Per-arc code 0..5 in ARC_CLASSES order (tail class, head class)."""
    vcls = graph.vertex_classes(params)
    tail = np.repeat(vcls, params.M)
    head = vcls[graph.arc_heads(params)]
    table = {(0, 0): 0, (0, 1): 1, (1, 0): 2, (1, 2): 3, (2, 1): 4, (2, 2): 5}
    codes = np.full(params.n_arcs, -1, dtype=np.int8)
    for (t, h), code in table.items():
        codes[(tail == t) & (head == h)] = code
    if np.any(codes < 0):
        raise AssertionError("arc with no class; graph wiring broken")
    codes.setflags(write=False)
    return codes


def uniform_coined_state(params: SimplexParams) -> np.ndarray:
    """|s_v> (x) |s_c>."""
    return np.full(params.n_arcs, 1.0 / np.sqrt(params.n_arcs), dtype=complex)


def uniform_vertex_state(params: SimplexParams) -> np.ndarray:
    return np.full(params.N, 1.0 / np.sqrt(params.N), dtype=complex)


# --- discrete time -------------------------------------------------------------

def _check_mode(coin, oracle_mode: str):
    if oracle_mode not in ORACLE_MODES:
        raise ValueError(f"oracle_mode must be one of {ORACLE_MODES}, got {oracle_mode!r}")
    if oracle_mode == "per-step-coin":
        if coin is None:
            raise ValueError("per-step-coin mode needs a coin (flip or skw)")
        return CoinChoice(coin)
    if coin is not None:
        raise ValueError(f"oracle_mode {oracle_mode!r} takes no marked coin")
    return None


def apply_coin(params, state, out, coin=None, oracle_mode="none", vertices=None):
    """Coin phase for the vertex range ``vertices`` (a slice), written into ``out``.

    Grover diffusion 2|s_c><s_c| - I everywhere; on marked vertices either the
    marked coin (per-step-coin) or a sign flip before diffusion (rw-phase).
    """
    coin = _check_mode(coin, oracle_mode)
    M = params.M
    vs = vertices if vertices is not None else slice(0, params.N)
    blocks = state.reshape(params.N, M)[vs]
    res = 2.0 * blocks.mean(axis=1, keepdims=True) - blocks
    marked = graph.marked_mask(params)[vs]
    if oracle_mode == "per-step-coin":
        if coin is CoinChoice.FLIP:
            res[marked] = -res[marked]
        else:
            res[marked] = -blocks[marked]
    elif oracle_mode == "rw-phase":
        res[marked] = -res[marked]
    out.reshape(params.N, M)[vs] = res
    return out


def apply_shift(params, state, out, arcs=None):
    """Flip-flop shift for destination arcs ``arcs`` (a slice), into ``out``."""
    perm = graph.flip_flop_permutation(params)
    sl = arcs if arcs is not None else slice(0, params.n_arcs)
    out[sl] = state[perm[sl]]
    return out


def step_full_dtqw(params: SimplexParams, state, coin=None, oracle_mode: str = "none") -> np.ndarray:
    """One walk step: coin on every vertex block, then the flip-flop shift.

    ``rw-phase`` applies the oracle sign flip R_w before the pure U0 step,
    i.e. the step U0 R_w that opens each multistep query.
    """
    state = np.asarray(state, dtype=complex)
    if state.shape != (params.n_arcs,):
        raise ValueError(f"state of length {params.n_arcs} expected, got {state.shape}")
    coined = apply_coin(params, state, np.empty_like(state), coin, oracle_mode)
    return apply_shift(params, coined, np.empty_like(state))


def step_full_dtqw_partitioned(params, state, coin=None, oracle_mode="none", parts: int = 4) -> np.ndarray:
    """Same as :func:`step_full_dtqw` but processed in ``parts`` index ranges."""
    coined = np.empty_like(state)
    for chunk in np.array_split(np.arange(params.N), parts):
        if chunk.size:
            apply_coin(params, state, coined, coin, oracle_mode, slice(chunk[0], chunk[-1] + 1))
    # synchronisation point: every coin block is done before any shift reads
    out = np.empty_like(state)
    for chunk in np.array_split(np.arange(params.n_arcs), parts):
        if chunk.size:
            apply_shift(params, coined, out, slice(chunk[0], chunk[-1] + 1))
    return out


def run_full_dtqw(params: SimplexParams, coin, steps: int) -> np.ndarray:
    """Full-space search with a marked coin; returns the projected 6D states,
    shape (steps+1, 6), and the out-of-subspace residual per step."""
    state = uniform_coined_state(params)
    reduced = np.empty((steps + 1, 6), dtype=complex)
    residual = np.empty(steps + 1)
    reduced[0], residual[0] = project_to_subspace(state, params)
    for t in range(steps):
        state = step_full_dtqw(params, state, coin, "per-step-coin")
        reduced[t + 1], residual[t + 1] = project_to_subspace(state, params)
    return reduced, residual


def run_full_multistep(params: SimplexParams, k: int, queries: int):
    """(U0^k R_w)^t on the full space; returns projected states and residuals."""
    state = uniform_coined_state(params)
    reduced = np.empty((queries + 1, 6), dtype=complex)
    residual = np.empty(queries + 1)
    reduced[0], residual[0] = project_to_subspace(state, params)
    for t in range(queries):
        state = step_full_dtqw(params, state, None, "rw-phase")
        for _ in range(k - 1):
            state = step_full_dtqw(params, state, None, "none")
        reduced[t + 1], residual[t + 1] = project_to_subspace(state, params)
    return reduced, residual


# --- projection ----------------------------------------------------------------

def project_to_subspace(state, params: SimplexParams) -> tuple[np.ndarray, float]:
    """Coefficients on the class-uniform basis and the norm of what is left.

    Arc states (length N*M) project onto the six arc classes, vertex states
    (length N) onto the three vertex classes.
    """
    state = np.asarray(state, dtype=complex)
    if state.shape == (params.n_arcs,):
        codes, n = arc_classes(params), 6
    elif state.shape == (params.N,):
        codes, n = graph.vertex_classes(params), 3
    else:
        raise ValueError(f"state length {state.shape} matches neither N nor N*M for M={params.M}")
    sums = np.bincount(codes, weights=state.real, minlength=n) + 1j * np.bincount(
        codes, weights=state.imag, minlength=n
    )
    counts = np.bincount(codes, minlength=n).astype(float)
    reduced = sums / np.sqrt(counts)
    inside = reduced[codes] / np.sqrt(counts)[codes]
    return reduced, float(np.linalg.norm(state - inside))


# --- continuous time -----------------------------------------------------------

def hamiltonian_action(params: SimplexParams, gamma: float, x) -> np.ndarray:
    """H x with H = -gamma*A - sum_w |w><w|."""
    out = -gamma * graph.adjacency_action(params, x)
    out[graph.marked_mask(params)] -= x[graph.marked_mask(params)]
    return out


def _chebyshev_degree(x: float, tol: float, max_degree: int):
    """Coefficients |J_n(x)| and the truncation degree meeting ``tol``."""
    top = int(x + 12.0 * max(x, 1.0) ** (1 / 3) + 40)
    top = min(top, max_degree + 40)
    bessel = jv(np.arange(top + 1), x)
    # error of stopping after degree K is bounded by 2*sum_{n>K} |J_n(x)|
    tail = 2.0 * np.cumsum(np.abs(bessel[::-1]))[::-1]
    tail = np.append(tail[1:], 0.0)
    ok = np.nonzero(tail <= tol)[0]
    if ok.size == 0 or ok[0] > max_degree:
        achieved = float(tail[min(max_degree, top)])
        raise PropagationError(
            f"Chebyshev propagator needs degree > {max_degree} for rt={x:.3g}", achieved
        )
    return bessel, int(ok[0]), float(tail[ok[0]])


def chebyshev_propagate(params: SimplexParams, gamma: float, t: float, state, tol: float = 1e-9,
                        max_degree: int = 200_000):
    """exp(-iHt) state by a Chebyshev expansion; returns (state, error bound)."""
    if tol <= 0:
        raise ValueError("tol must be > 0")
    if t < 0:
        raise ValueError("t must be >= 0")
    state = np.asarray(state, dtype=complex)
    if t == 0:
        return state.copy(), 0.0
    # spectrum of H lies in [-gamma*M - 1, gamma*M]
    centre = -0.5
    radius = gamma * params.M + 0.5
    x = radius * t
    bessel, degree, err = _chebyshev_degree(x, tol, max_degree)

    def scaled(v):
        return (hamiltonian_action(params, gamma, v) - centre * v) / radius

    prev = state
    result = bessel[0] * prev
    if degree >= 1:
        cur = scaled(prev)
        result = result + 2.0 * (-1j) * bessel[1] * cur
        phase = -1j
        for n in range(2, degree + 1):
            prev, cur = cur, 2.0 * scaled(cur) - prev
            phase *= -1j
            result += 2.0 * phase * bessel[n] * cur
    return np.exp(-1j * centre * t) * result, err


def evolve_full_ctqw(M: int, gamma: float, t: float, tol: float = 1e-9, marked_clique: int = 0) -> np.ndarray:
    """exp(-iHt)|s_v> on the full vertex space."""
    params = SimplexParams(M, marked_clique)
    state, _ = chebyshev_propagate(params, gamma, t, uniform_vertex_state(params), tol)
    return state


def run_full_ctqw(params: SimplexParams, gamma: float, times, tol: float = 1e-10):
    """Projected 3D states and residuals at increasing ``times``, propagating
    segment by segment."""
    times = np.asarray(times, dtype=float)
    state = uniform_vertex_state(params)
    reduced = np.empty((len(times), 3), dtype=complex)
    residual = np.empty(len(times))
    now = 0.0
    for i, t in enumerate(times):
        state, _ = chebyshev_propagate(params, gamma, t - now, state, tol)
        now = t
        reduced[i], residual[i] = project_to_subspace(state, params)
    return reduced, residual
