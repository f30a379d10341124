import numpy as np
import pytest
from hypothesis import given, strategies as st

from qwsimplex import classical


@given(st.integers(min_value=2, max_value=2000))
def test_exact_hitting_closed_form(M):
    h_b, h_c = classical.exact_hitting_steps(M)
    assert h_b == pytest.approx(M * M, rel=1e-9)
    assert h_c == pytest.approx(M * M + M, rel=1e-9)


@given(st.integers(min_value=2, max_value=300))
def test_lumped_chain_is_stochastic(M):
    p = classical.LumpedChain(M).matrix
    assert np.allclose(p.sum(axis=1), 1)
    assert np.all(p >= 0)


@pytest.mark.parametrize("bad", [1, 0, 2.5])
def test_rejects_bad_m(bad):
    with pytest.raises(ValueError):
        classical.exact_hitting_steps(bad)


def test_trials_are_order_independent():
    full = classical.monte_carlo_trials(6, 2, 30, seed=11)
    picked = classical.monte_carlo_trials(6, 2, 3, seed=11, trial_ids=[29, 4, 17])
    assert [full[i] for i in (29, 4, 17)] == picked


@given(st.integers(min_value=2, max_value=8), st.integers(min_value=1, max_value=5),
       st.integers(min_value=0, max_value=2**31))
def test_query_ledger_per_trial(M, k, seed):
    for r in classical.monte_carlo_trials(M, k, 5, seed):
        assert r.steps_to_hit % k == 0
        assert r.queries_used == r.steps_to_hit // k + 1
        assert r.queries_used >= 2  # the walker never starts on a marked vertex


def test_monte_carlo_mean_agrees_with_exact():
    M = 10
    s = classical.monte_carlo_queries(M, 1, 4000, seed=3)
    exact = classical.expected_steps_uniform_unmarked(M)
    assert abs(s.mean_steps - exact) < 3 * s.stderr_steps


def test_class_transitions_follow_lumped_chain():
    M = 6
    counts = classical.empirical_class_transitions(M, 300_000, seed=1)
    assert counts[0, 2] == 0 and counts[2, 0] == 0  # a and c are never adjacent
    freq = counts[2] / counts[2].sum()
    assert freq[1] == pytest.approx(1 / M, abs=0.01)


def test_scaling_fit_recovers_power_law():
    pts = [(m, 3.0 * m**1.5) for m in (10, 20, 40, 80)]
    slope, r2 = classical.scaling_fit(pts)
    assert slope == pytest.approx(1.5, abs=1e-12)
    assert r2 == pytest.approx(1.0)
    with pytest.raises(ValueError):
        classical.scaling_fit(pts[:2])
    with pytest.raises(ValueError):
        classical.scaling_fit([(1, 1), (2, 0), (3, 1)])


def test_argument_validation():
    with pytest.raises(ValueError):
        classical.monte_carlo_trials(5, 0, 10, 0)
    with pytest.raises(ValueError):
        classical.monte_carlo_trials(5, 1, 0, 0)
