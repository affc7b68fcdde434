import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from maxrand import analytic as A
from maxrand.chain import (
    ThetaState,
    chain_values_at,
    closed_form_theta,
    geometric_from_uniform,
    run_chain,
    sample_stationary_theta,
    sample_stationary_thetas,
    series_terms,
    step_erdos,
    step_maxmin,
    step_maxrand,
    theta_infinity_maxmin,
    theta_infinity_partial_sums,
)
from maxrand.env import EnvStream, RenewalTrace, build_trace
from maxrand.stats import EmpiricalCdf, batch_means, frequency, ks_distance, ks_two_sample, mean_se

levels = st.floats(min_value=0.01, max_value=0.99)
thetas = st.floats(min_value=1e-9, max_value=1 - 1e-9)


def test_maxrand_step_rules():
    s = ThetaState.start(0.3)
    assert step_maxrand(ThetaState(0.3, 0.123, 4), 0) == ThetaState(0.3, 0.3, 5)
    assert step_maxrand(s, 1).theta == 0.3 * 0.3


@pytest.mark.parametrize("seed", range(5))
def test_iteration_matches_closed_form(seed):
    u, steps = 0.83, 1000
    stream = EnvStream(seed, 0.9)
    trace = build_trace(stream, steps)
    state = ThetaState.start(u)
    assert state.theta == closed_form_theta(u, trace, 0)
    for t, b in enumerate(stream.bernoulli_row(steps), start=1):
        state = step_maxrand(state, b)
        assert state.theta == closed_form_theta(u, trace, t)


def test_closed_form_cases():
    u = 0.7
    quiet = RenewalTrace(6, ())
    assert closed_form_theta(u, quiet, 4) == A.upow(u, 5)
    trace = RenewalTrace(8, (3, 6))
    assert closed_form_theta(u, trace, 3) == u
    assert closed_form_theta(u, trace, 6) == u
    assert closed_form_theta(u, trace, 5) == A.upow(u, 3)
    with pytest.raises(ValueError):
        closed_form_theta(u, trace, 9)


@given(st.floats(min_value=1e-12, max_value=1 - 1e-12), st.floats(0.01, 0.99))
def test_geometric_inversion_support(v, p):
    assert geometric_from_uniform(v, p) >= 1


def test_geometric_inversion_tail():
    v = np.linspace(1e-9, 1 - 1e-9, 200_001)
    g = geometric_from_uniform(v, 0.6)
    for k in range(1, 8):
        assert abs((g >= k).mean() - 0.6 ** (k - 1)) < 1e-4


def test_stationary_sampler():
    u, p = 0.5, 0.9
    stream = EnvStream(3, p)
    draws = sample_stationary_thetas(u, p, 100_000, stream)
    assert np.all((draws > 0) & (draws <= u))
    f, se = frequency(draws == u)
    assert abs(f - (1 - p)) < 3 * se
    cdf = EmpiricalCdf.from_samples(draws)
    d = ks_distance(cdf, lambda x: A.stationary_theta_cdf(x, u, p),
                    lambda x: A.stationary_theta_cdf_left(x, u, p), A.jump_points(u, 200))
    assert d < 0.01
    assert sample_stationary_theta(u, p, stream, 17) == draws[17]


def test_maxmin_step_rules():
    assert step_maxmin(ThetaState(0.4, 1.0), 0).theta == 1.0
    assert step_maxmin(ThetaState(0.4, 1.0), 1).theta == 0.4


@given(levels, thetas, st.integers(0, 1))
def test_branch_maps_stay_in_unit_interval(u, theta, b):
    for step in (step_maxrand, step_maxmin, step_erdos):
        new = step(ThetaState(u, theta), b).theta
        assert 0.0 < new < 1.0


def test_erdos_fixed_points():
    assert step_erdos(ThetaState(0.6, 1.0), 0).theta == 1.0
    assert step_erdos(ThetaState(0.6, 0.0), 1).theta == 0.0


@pytest.mark.parametrize("u", [0.3, 0.7])
def test_erdos_long_run_mean(u):
    path = run_chain("erdos", u, 0.5, 100_000, EnvStream(21, 0.5))
    m, se = batch_means(path[1:])
    assert abs(m - 0.5) < 3 * se


def test_series_bound_and_monotone():
    u, p = 0.5, 0.5
    sums = theta_infinity_partial_sums(u, p, 1e-12, iter([1, 2, 1, 3] * 20))
    # later terms can drop below the float spacing of the running sum
    assert np.all(np.diff(sums) >= 0)
    assert sums[-1] <= 1.0
    assert len(sums) == series_terms(u, 1e-12) + 1
    assert (1 - u) ** len(sums) < 1e-12 <= (1 - u) ** (len(sums) - 1)


def test_series_first_term_is_maxrand_limit():
    sums = theta_infinity_partial_sums(0.6, 0.5, 1e-6, iter([4] + [1] * 100))
    assert sums[0] == pytest.approx(0.6**4, rel=1e-15)


def test_series_near_one():
    stream = EnvStream(2, 0.5)
    draws = iter([3] + [2] * 50)
    total = theta_infinity_maxmin(0.99, 0.5, 1e-12, draws)
    assert 0 < total - 0.99**3 < 0.01
    assert 0 < theta_infinity_maxmin(0.5, 0.5, stream=stream) <= 1.0


@given(levels, st.lists(st.integers(1, 30), min_size=1, max_size=50))
def test_series_partial_sums_bounded(u, gs):
    sums = theta_infinity_partial_sums(u, 0.5, 1e-3, itertools.cycle(gs))
    assert np.all(sums <= 1.0 + 1e-15) and np.all(sums > 0)


def test_run_chain_maxrand_matches_closed_form():
    u, p = 0.45, 0.8
    stream = EnvStream(8, p)
    path = run_chain("maxrand", u, p, 300, stream)
    trace = build_trace(stream, 300)
    assert len(path) == 301
    assert all(path[t] == closed_form_theta(u, trace, t) for t in range(301))
    powers = set(A.power_table(u, 302)[1:].tolist())
    assert set(path.tolist()) <= powers


def test_run_chain_replay_and_validation():
    stream = EnvStream(8, 0.5)
    assert np.array_equal(run_chain("maxmin", 0.3, 0.5, 50, stream),
                          run_chain("maxmin", 0.3, 0.5, 50, EnvStream(8, 0.5)))
    with pytest.raises(ValueError):
        run_chain("bogus", 0.3, 0.5, 5, stream)


@pytest.mark.parametrize("kind", ["maxrand", "maxmin", "erdos"])
def test_vectorised_replicas_match_single_runs(kind):
    u, p, t, seed = 0.6, 0.7, 40, 13
    values = chain_values_at(kind, u, p, t, seed, 20)
    for r in range(20):
        assert values[r] == run_chain(kind, u, p, t, EnvStream(seed, p, r))[-1]


def test_mean_theta_is_phi_t():
    u, p, t = 0.6, 0.7, 10
    values = chain_values_at("maxrand", u, p, t, 30, 100_000)
    m, se = mean_se(values)
    assert abs(m - A.phi_t(u, p, t)) < 3 * se


def test_theta_law_is_truncated_geometric_power():
    u, p, t, reps = 0.6, 0.7, 10, 100_000
    values = chain_values_at("maxrand", u, p, t, 31, reps)
    rng = np.random.default_rng(31)
    g = np.minimum(rng.geometric(1 - p, reps), t + 1)
    table = A.power_table(u, t + 1)
    assert ks_two_sample(values, table[g]) < 0.01


@given(st.floats(0.05, 0.95), st.floats(0.05, 0.95), st.integers(0, 200))
def test_product_identity(u1, u2, seed):
    trace = build_trace(EnvStream(seed, 0.8), 60)
    for t in (0, 17, 60):
        lhs = closed_form_theta(u1, trace, t) * closed_form_theta(u2, trace, t)
        assert abs(lhs - closed_form_theta(u1 * u2, trace, t)) < 1e-12
