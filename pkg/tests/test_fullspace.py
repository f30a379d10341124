import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.linalg import expm

from qwsimplex import ctqw, dtqw, fullspace, graph, multistep
from qwsimplex.graph import SimplexParams

small = st.integers(min_value=2, max_value=9)


def class_basis(params):
    """Columns: normalised uniform states on each of the six arc classes."""
    codes = fullspace.arc_classes(params)
    basis = np.zeros((params.n_arcs, 6), dtype=complex)
    for c in range(6):
        basis[codes == c, c] = 1.0
    return basis / np.sqrt(basis.sum(axis=0))


def reduced_operator(params, coin, mode):
    basis = class_basis(params)
    images = np.stack([fullspace.step_full_dtqw(params, basis[:, j], coin, mode) for j in range(6)], axis=1)
    return basis.conj().T @ images, images


@given(small)
def test_arc_class_sizes(M):
    params = SimplexParams(M)
    counts = np.bincount(fullspace.arc_classes(params), minlength=6)
    assert counts.tolist() == [M * (M - 1), M, M, M * (M - 1), M * (M - 1), M * (M - 1) ** 2]


@given(small)
def test_u0_recovered_from_arc_space(M):
    params = SimplexParams(M)
    u, images = reduced_operator(params, None, "none")
    assert np.abs(u - dtqw.build_u0(M)).max() < 1e-13
    # invariance: images stay inside the span
    basis = class_basis(params)
    assert np.abs(images - basis @ u).max() < 1e-13


@given(small, st.sampled_from(["flip", "skw"]))
def test_search_operator_recovered_from_arc_space(M, coin):
    u, _ = reduced_operator(SimplexParams(M), coin, "per-step-coin")
    assert np.abs(u - dtqw.build_search_operator(M, coin)).max() < 1e-13


@given(small)
def test_rw_phase_step_is_u0_times_oracle(M):
    u, _ = reduced_operator(SimplexParams(M), None, "rw-phase")
    assert np.abs(u - dtqw.build_u0(M) @ dtqw.ORACLE_PHASE).max() < 1e-13


@given(small, st.integers(min_value=0, max_value=2**32 - 1), st.integers(min_value=1, max_value=7))
def test_step_is_norm_preserving_and_partition_independent(M, seed, parts):
    params = SimplexParams(M, marked_clique=seed % (M + 1))
    r = np.random.default_rng(seed)
    x = r.normal(size=params.n_arcs) + 1j * r.normal(size=params.n_arcs)
    x /= np.linalg.norm(x)
    a = fullspace.step_full_dtqw(params, x, "skw", "per-step-coin")
    b = fullspace.step_full_dtqw_partitioned(params, x, "skw", "per-step-coin", parts)
    assert np.array_equal(a, b)
    assert abs(np.linalg.norm(a) - 1) < 1e-12


def test_mode_and_coin_must_agree():
    p = SimplexParams(3)
    x = fullspace.uniform_coined_state(p)
    with pytest.raises(ValueError):
        fullspace.step_full_dtqw(p, x, None, "per-step-coin")
    with pytest.raises(ValueError):
        fullspace.step_full_dtqw(p, x, "flip", "none")
    with pytest.raises(ValueError):
        fullspace.step_full_dtqw(p, x, None, "sometimes")
    with pytest.raises(ValueError):
        fullspace.step_full_dtqw(p, x[:-1])


@pytest.mark.parametrize("coin", ["flip", "skw"])
def test_full_dtqw_tracks_subspace(coin):
    M = 6
    reduced, residual = fullspace.run_full_dtqw(SimplexParams(M), coin, 60)
    ref = dtqw.trajectory(dtqw.build_search_operator(M, coin), dtqw.initial_state(M), 60)
    assert np.abs(reduced - ref).max() < 1e-12
    assert residual.max() < 1e-12


def test_full_multistep_tracks_subspace():
    M = 9
    k = multistep.choose_k(M)
    reduced, residual = fullspace.run_full_multistep(SimplexParams(M), k, 6)
    ref = dtqw.trajectory(multistep.multistep_operator(M, k), dtqw.initial_state(M), 6)
    assert np.abs(reduced - ref).max() < 1e-12
    assert residual.max() < 1e-12


@given(st.integers(min_value=2, max_value=7), st.floats(min_value=0.2, max_value=3.0),
       st.floats(min_value=0.0, max_value=15.0))
def test_chebyshev_matches_dense_expm(M, gamma, t):
    params = SimplexParams(M)
    h = -gamma * graph.adjacency_matrix(params).astype(complex)
    h[graph.marked_mask(params), graph.marked_mask(params)] -= 1.0
    psi = fullspace.uniform_vertex_state(params)
    out, err = fullspace.chebyshev_propagate(params, gamma, t, psi, tol=1e-11)
    assert err <= 1e-11
    assert np.linalg.norm(out - expm(-1j * t * h) @ psi) < 1e-9


def test_full_ctqw_tracks_subspace():
    M = 8
    gamma = ctqw.approx_critical_gamma(M)
    times = np.linspace(0, 4 * np.pi * np.sqrt(M), 5)
    reduced, residual = fullspace.run_full_ctqw(SimplexParams(M), gamma, times)
    ref = ctqw.HermitianPropagator(ctqw.build_hamiltonian(M, gamma)).trajectory(times, ctqw.initial_state(M))
    assert np.abs(reduced - ref).max() < 1e-8
    assert residual.max() < 1e-8


def test_propagation_error_reports_achieved_bound():
    params = SimplexParams(5)
    with pytest.raises(fullspace.PropagationError) as info:
        fullspace.chebyshev_propagate(params, 1.0, 50.0, fullspace.uniform_vertex_state(params), max_degree=10)
    assert info.value.achieved_error > 1e-9


def test_projection_rejects_wrong_length():
    with pytest.raises(ValueError):
        fullspace.project_to_subspace(np.zeros(7), SimplexParams(3))
