"""Small dense complex linear algebra (dimension <= 8).

Everything the reduced-subspace dynamics need: eigendecomposition,
integer matrix powers and Hermitian time evolution. The eigensolvers are
written out here (cyclic Jacobi for Hermitian input, Hessenberg reduction
plus Wilkinson-shifted complex QR otherwise) so that closed-form spectra
are compared against a solver whose every step is visible.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

MAX_DIM = 8
_EPS = np.finfo(float).eps


class ConvergenceError(RuntimeError):
    """An iterative eigensolver ran out of iterations."""


@dataclass(frozen=True)
class EigenSystem:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray  # columns
    residuals: np.ndarray

    def __iter__(self):
        yield self.eigenvalues
        yield self.eigenvectors

    def pair(self, i: int) -> tuple[complex, np.ndarray]:
        return self.eigenvalues[i], self.eigenvectors[:, i]


def max_abs(a: np.ndarray) -> float:
    return float(np.max(np.abs(a))) if a.size else 0.0


def as_matrix(a, name: str = "matrix") -> np.ndarray:
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise ValueError(f"{name}: expected a non-empty square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name}: contains NaN or infinite entries")
    return a


def hermiticity_error(a: np.ndarray) -> float:
    return max_abs(a - a.conj().T)


def unitarity_error(a: np.ndarray) -> float:
    return max_abs(a.conj().T @ a - np.eye(a.shape[0]))


def is_hermitian(a: np.ndarray, tol: float = 1e-12) -> bool:
    return hermiticity_error(a) <= tol * max(1.0, max_abs(a))


def is_unitary(a: np.ndarray, tol: float = 1e-12) -> bool:
    return unitarity_error(a) <= tol


def check_unitary(a, tol: float = 1e-12, name: str = "matrix") -> np.ndarray:
    a = as_matrix(a, name)
    err = unitarity_error(a)
    if err > tol:
        raise ValueError(f"{name} is not unitary: max|U^dag U - I| = {err:.3e} > {tol:.1e}")
    return a


def check_hermitian(a, tol: float = 1e-12, name: str = "matrix") -> np.ndarray:
    a = as_matrix(a, name)
    err = hermiticity_error(a)
    if err > tol * max(1.0, max_abs(a)):
        raise ValueError(f"{name} is not hermitian: max|A - A^dag| = {err:.3e}")
    return a


# --- Hermitian: cyclic Jacobi -------------------------------------------------

def _jacobi_hermitian(a: np.ndarray, name: str, max_sweeps: int = 60):
    n = a.shape[0]
    a = 0.5 * (a + a.conj().T)
    v = np.eye(n, dtype=complex)
    scale = np.linalg.norm(a)
    if scale == 0.0:
        return np.zeros(n), v
    for _ in range(max_sweeps):
        off = np.linalg.norm(a - np.diag(np.diag(a)))
        if off <= 1e-16 * scale:
            return np.real(np.diag(a)).copy(), v
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                mag = abs(apq)
                if mag <= 1e-300:
                    continue
                phase = apq / mag
                theta = (a[q, q].real - a[p, p].real) / (2.0 * mag)
                t = np.copysign(1.0, theta) / (abs(theta) + np.hypot(theta, 1.0))
                c = 1.0 / np.hypot(t, 1.0)
                s = t * c
                # G = diag(1, conj(phase) at q) @ real rotation
                g = np.array([[c, s], [-s * np.conj(phase), c * np.conj(phase)]])
                idx = [p, q]
                a[:, idx] = a[:, idx] @ g
                a[idx, :] = g.conj().T @ a[idx, :]
                v[:, idx] = v[:, idx] @ g
                a[p, q] = a[q, p] = 0.0
    raise ConvergenceError(f"Jacobi did not converge for {name} after {max_sweeps} sweeps")


# --- General: Hessenberg + shifted complex QR ---------------------------------

def _hessenberg(a: np.ndarray):
    n = a.shape[0]
    h = a.copy()
    q = np.eye(n, dtype=complex)
    for k in range(n - 2):
        x = h[k + 1:, k].copy()
        alpha = np.linalg.norm(x)
        if alpha == 0.0:
            continue
        phase = x[0] / abs(x[0]) if x[0] != 0 else 1.0
        x[0] += phase * alpha
        u = x / np.linalg.norm(x)
        h[k + 1:, :] -= 2.0 * np.outer(u, u.conj() @ h[k + 1:, :])
        h[:, k + 1:] -= 2.0 * np.outer(h[:, k + 1:] @ u, u.conj())
        q[:, k + 1:] -= 2.0 * np.outer(q[:, k + 1:] @ u, u.conj())
        h[k + 2:, k] = 0.0
    return h, q


def _givens(x: complex, y: complex) -> np.ndarray:
    """Unitary G with G @ [x, y] = [r, 0]."""
    ax, ay = abs(x), abs(y)
    if ay == 0.0:
        return np.eye(2, dtype=complex)
    if ax == 0.0:
        return np.array([[0.0, np.conj(y) / ay], [-y / ay, 0.0]], dtype=complex)
    r = np.hypot(ax, ay)
    c = ax / r
    s = (x / ax) * np.conj(y) / r
    return np.array([[c, s], [-np.conj(s), c]], dtype=complex)


def _wilkinson_shift(t: np.ndarray, hi: int) -> complex:
    a, b = t[hi - 1, hi - 1], t[hi - 1, hi]
    c, d = t[hi, hi - 1], t[hi, hi]
    mean = 0.5 * (a + d)
    disc = np.sqrt(0.25 * (a - d) ** 2 + b * c)
    mu1, mu2 = mean + disc, mean - disc
    return mu1 if abs(mu1 - d) <= abs(mu2 - d) else mu2


def _schur(a: np.ndarray, name: str, max_iter_per_eig: int = 60):
    n = a.shape[0]
    t, z = _hessenberg(a)
    hi = n - 1
    its = 0
    while hi > 0:
        # deflation scan
        lo = hi
        while lo > 0:
            tiny = _EPS * (abs(t[lo, lo]) + abs(t[lo - 1, lo - 1]))
            if tiny == 0.0:
                tiny = _EPS * max_abs(t)
            if abs(t[lo, lo - 1]) <= tiny:
                t[lo, lo - 1] = 0.0
                break
            lo -= 1
        if lo == hi:
            hi -= 1
            its = 0
            continue
        its += 1
        if its > max_iter_per_eig:
            raise ConvergenceError(f"shifted QR did not converge for {name} (dim {n})")
        if its % 11 == 0:
            # exceptional shift breaks symmetric stalls
            mu = t[hi, hi] + 0.75 * abs(t[hi, hi - 1])
        else:
            mu = _wilkinson_shift(t, hi)
        for k in range(lo, hi + 1):
            t[k, k] -= mu
        rots = []
        for k in range(lo, hi):
            g = _givens(t[k, k], t[k + 1, k])
            t[k:k + 2, k:] = g @ t[k:k + 2, k:]
            t[k + 1, k] = 0.0
            rots.append(g)
        for k, g in zip(range(lo, hi), rots):
            rows = min(k + 2, hi) + 1
            t[:rows, k:k + 2] = t[:rows, k:k + 2] @ g.conj().T
            z[:, k:k + 2] = z[:, k:k + 2] @ g.conj().T
        for k in range(lo, hi + 1):
            t[k, k] += mu
    return t, z


def _triangular_eigenvectors(t: np.ndarray) -> np.ndarray:
    n = t.shape[0]
    small = _EPS * max(max_abs(t), 1e-300)
    y = np.zeros((n, n), dtype=complex)
    for i in range(n):
        lam = t[i, i]
        y[i, i] = 1.0
        for j in range(i - 1, -1, -1):
            denom = t[j, j] - lam
            if abs(denom) < small:
                denom = small
            y[j, i] = -(t[j, j + 1:i + 1] @ y[j + 1:i + 1, i]) / denom
    return y


def _phase_key(lam: complex) -> float:
    ang = float(np.angle(lam))
    return np.pi if ang <= -np.pi + 1e-9 else ang


def eig(matrix, kind: str | None = None, name: str = "matrix") -> EigenSystem:
    """Eigendecomposition of a small dense matrix.

    ``kind`` is ``"hermitian"``, ``"unitary"``, ``"general"`` or ``None``
    (detect). Hermitian spectra come back sorted by real value, unitary ones
    by phase in (-pi, pi]; general ones lexicographically by (real, imag).
    """
    a = as_matrix(matrix, name)
    n = a.shape[0]
    if n > MAX_DIM:
        raise ValueError(f"{name}: dimension {n} exceeds the small-matrix limit {MAX_DIM}")
    if kind is None:
        if is_hermitian(a):
            kind = "hermitian"
        elif is_unitary(a, tol=1e-9):
            kind = "unitary"
        else:
            kind = "general"
    if kind not in ("hermitian", "unitary", "general"):
        raise ValueError(f"unknown matrix kind {kind!r}")
    if kind == "hermitian":
        check_hermitian(a, name=name)
    elif kind == "unitary":
        check_unitary(a, tol=1e-9, name=name)

    if kind == "hermitian":
        vals, vecs = _jacobi_hermitian(a.copy(), name)
        order = np.argsort(vals, kind="stable")
        vals = vals[order].astype(complex)
        vecs = vecs[:, order]
    else:
        t, z = _schur(a.copy(), name)
        vals = np.diag(t).copy()
        scale2 = max(max_abs(a), 1.0) ** 2
        normal = max_abs(a @ a.conj().T - a.conj().T @ a) <= 1e-10 * scale2
        vecs = z if normal else z @ _triangular_eigenvectors(t)
        vecs = vecs / np.linalg.norm(vecs, axis=0)
        if kind == "unitary":
            order = sorted(range(n), key=lambda i: _phase_key(vals[i]))
        else:
            order = sorted(range(n), key=lambda i: (vals[i].real, vals[i].imag))
        vals = vals[order]
        vecs = vecs[:, order]

    residuals = np.linalg.norm(a @ vecs - vecs * vals, axis=0)
    return EigenSystem(vals, vecs, residuals)


def reconstruct(es: EigenSystem) -> np.ndarray:
    """Sum of lambda_i v_i v_i^dag (exact for normal matrices)."""
    v = es.eigenvectors
    return (v * es.eigenvalues) @ v.conj().T


def matrix_power(matrix, k: int) -> np.ndarray:
    """``matrix**k`` by repeated squaring."""
    a = as_matrix(matrix)
    if a.shape[0] > MAX_DIM:
        raise ValueError(f"dimension {a.shape[0]} exceeds {MAX_DIM}")
    k = int(k)
    if k < 0:
        raise ValueError("k must be non-negative")
    result = np.eye(a.shape[0], dtype=complex)
    base = a.copy()
    while k:
        if k & 1:
            result = result @ base
        k >>= 1
        if k:
            base = base @ base
    return result


class HermitianPropagator:
    """exp(-iHt) for a fixed small Hermitian H, reusable across times."""

    def __init__(self, h, name: str = "H"):
        h = check_hermitian(h, name=name)
        if h.shape[0] > MAX_DIM:
            raise ValueError(f"{name}: dimension {h.shape[0]} exceeds {MAX_DIM}")
        self.h = h
        self.system = eig(h, kind="hermitian", name=name)
        self.energies = self.system.eigenvalues.real

    def __call__(self, t, state) -> np.ndarray:
        state = np.asarray(state, dtype=complex)
        if state.shape != (self.h.shape[0],):
            raise ValueError(f"state of shape {state.shape} does not match H of dim {self.h.shape[0]}")
        v = self.system.eigenvectors
        return v @ (np.exp(-1j * self.energies * t) * (v.conj().T @ state))

    def trajectory(self, times, state) -> np.ndarray:
        """States at each time, shape (len(times), dim)."""
        state = np.asarray(state, dtype=complex)
        v = self.system.eigenvectors
        coeffs = v.conj().T @ state
        phases = np.exp(-1j * np.outer(np.asarray(times, dtype=float), self.energies))
        return (phases * coeffs) @ v.T


def evolve_hermitian(h, t: float, state) -> np.ndarray:
    state = np.asarray(state, dtype=complex)
    norm = np.linalg.norm(state)
    if abs(norm - 1.0) > 1e-9:
        raise ValueError(f"state must be unit norm, got {norm!r}")
    return HermitianPropagator(h)(t, state)
