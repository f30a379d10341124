import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.linalg import expm

from qwsimplex import ctqw
from qwsimplex.linalg import eig, hermiticity_error
from qwsimplex.records import eigenspace_overlap

ms = st.integers(min_value=2, max_value=1000)
gammas = st.floats(min_value=0.05, max_value=5.0)


@given(ms, gammas)
def test_hamiltonian_hermitian_and_states_normalised(M, g):
    assert hermiticity_error(ctqw.build_hamiltonian(M, g)) == 0
    assert abs(np.linalg.norm(ctqw.initial_state(M)) - 1) < 1e-14
    assert abs(np.linalg.norm(ctqw.unmarked_state(M)) - 1) < 1e-14


@given(ms)
def test_initial_state_decomposes_into_marked_and_unmarked(M):
    a = np.array([1, 0, 0], dtype=complex)
    s = ctqw.initial_state(M)
    mix = np.sqrt(1 / (M + 1)) * a + np.sqrt(M / (M + 1)) * ctqw.unmarked_state(M)
    assert np.abs(s - mix).max() < 1e-14


@given(st.integers(min_value=2, max_value=60), gammas, st.floats(min_value=0, max_value=40))
def test_propagation_matches_expm(M, g, t):
    h = ctqw.build_hamiltonian(M, g)
    ref = expm(-1j * t * h) @ ctqw.initial_state(M)
    rec_states = ctqw.HermitianPropagator(h).trajectory(np.array([t]), ctqw.initial_state(M))
    assert np.abs(rec_states[0] - ref).max() < 1e-9


@given(ms)
def test_critical_gamma_closed_form_and_approximation(M):
    g = ctqw.critical_gamma(M)
    # degeneracy of H0: -gamma*M - 1 == -gamma*(M + sqrt(M(M+4)))/2
    assert -g * M - 1 == pytest.approx(-g * (M + np.sqrt(M * (M + 4))) / 2, rel=1e-12)
    assert abs(g - ctqw.approx_critical_gamma(M)) < 2 / M**2


@given(st.integers(min_value=4, max_value=5000), gammas)
def test_leading_order_eigenpairs_exact(M, g):
    h0 = ctqw.leading_order_hamiltonian(M, g)
    scale = max(1.0, np.abs(h0).max())
    for p in ctqw.leading_order_eigenpairs(M, g):
        v = p.normalized_vector()
        assert np.linalg.norm(h0 @ v - p.eigenvalue * v) < 1e-12 * scale


@given(st.integers(min_value=2, max_value=5000), gammas)
def test_perturbation_is_small_terms_only(M, g):
    h1 = ctqw.perturbation(M, g)
    # order one and order 1/sqrt(M) terms only
    assert np.abs(h1).max() <= 2 * g + 1e-12


def test_effective_matrix_matches_large_m_form():
    M = 400
    eff = ctqw.effective_matrix(M, ctqw.critical_gamma(M))
    assert np.abs(eff - ctqw.large_m_effective_matrix(M)).max() < 2 / M


def test_perturbation_predictions_at_m100():
    """gap 2/sqrt(M) and (|r>+-|a>)/sqrt2 eigenvectors."""
    M = 100
    g = ctqw.critical_gamma(M)
    es = eig(ctqw.build_hamiltonian(M, g), kind="hermitian")
    low = es.eigenvalues.real[:2]
    assert low[1] - low[0] == pytest.approx(ctqw.predicted_gap(M), rel=0.15)
    pair = [p for p in ctqw.perturbation_predictions(M) if p.regime == "large-M"]
    for p, lam in zip(pair, low):
        assert eigenspace_overlap(p.eigenvector, es, lam) >= 0.99
        assert abs(p.eigenvalue - lam) < 2 / M


def test_detuned_rate_suppresses_search():
    M = 100
    rec = ctqw.evolve_ctqw(ctqw.CtqwParams(M, 2 * ctqw.critical_gamma(M), 40.0, 0.05))
    assert rec.success_probability.max() < 0.2


@pytest.mark.parametrize("M,predicted", [(100, 15.71), (200, 22.21), (300, 27.21)])
def test_peak_near_predicted_time(M, predicted):
    """success probability near 1 at pi*sqrt(M)/2."""
    assert ctqw.predicted_runtime(M) == pytest.approx(predicted, abs=0.005)
    rec = ctqw.evolve_ctqw(ctqw.CtqwParams(M, ctqw.approx_critical_gamma(M), 2 * predicted, 0.01))
    t, p = rec.peak()
    assert p >= 0.9
    assert abs(t - predicted) <= 0.1 * predicted


def test_params_validation_and_times():
    p = ctqw.CtqwParams(10, 1.1, 1.0, 0.25)
    assert p.times.tolist() == [0, 0.25, 0.5, 0.75, 1.0]
    for bad in [dict(M=1, gamma=1, t_max=1, dt=0.1), dict(M=5, gamma=0, t_max=1, dt=0.1),
                dict(M=5, gamma=1, t_max=1, dt=0), dict(M=5, gamma=1, t_max=-1, dt=0.1)]:
        with pytest.raises(ValueError):
            ctqw.CtqwParams(**bad)
