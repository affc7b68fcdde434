"""End-to-end acceptance checks, one or more tests per numbered criterion.

Every Monte Carlo check uses seed 1. Each test also holds its runtime budget.
The per-criterion PASS/FAIL summary is printed by ``conftest.py``.
"""

import csv
import json
import time
from contextlib import contextmanager

import numpy as np
import pytest

from maxrand import analytic as A
from maxrand import chain, env, stats, suites
from maxrand.cli import main
from maxrand.env import EnvStream
from maxrand.field import InitialConfig, couple_ensemble, field_values_at, stationary_fields

SEED = 1
GRID = np.linspace(0.001, 0.999, 999)

# Frozen before the build with 30-digit arithmetic on the summation form.
FIG2_GRID_MAX = 0.183605317818610
FIG2_GRID_ARGMAX = 0.903
FIG2_CONTINUOUS_SUP = 0.18360643036634


@contextmanager
def budget(seconds):
    start = time.perf_counter()
    yield
    elapsed = time.perf_counter() - start
    assert elapsed < seconds, f"took {elapsed:.2f}s, budget {seconds}s"


def within_se(estimate, exact, se, k=3.0):
    return abs(estimate - exact) <= k * se


@pytest.mark.criterion(1)
def test_c01_phi_zero_is_identity():
    with budget(1):
        assert np.max(np.abs(A.phi_t(GRID, 0.9, 0) - GRID)) <= 1e-15


@pytest.mark.criterion(1)
@pytest.mark.parametrize("p", [0.1, 0.5, 0.9])
def test_c01_stationarity_identity(p):
    with budget(1):
        lim = A.phi(GRID, p)
        assert np.max(np.abs(p * GRID * lim + (1 - p) * GRID - lim)) < 1e-12


@pytest.mark.criterion(1)
@pytest.mark.parametrize("p", [0.1, 0.5, 0.9])
def test_c01_covariance_closed_form(p):
    with budget(1):
        g = np.linspace(0.01, 0.99, 50)
        u1, u2 = np.meshgrid(g, g)
        direct = A.phi(u1 * u2, p) - A.phi(u1, p) * A.phi(u2, p)
        assert np.max(np.abs(A.indicator_cov(u1, u2, p) - direct)) <= 1e-12


@pytest.mark.criterion(2)
@pytest.mark.parametrize("p", [0.5, 0.9])
def test_c02_iteration_equals_closed_form(p):
    u, steps, seeds = 0.5, 1000, 100
    with budget(1):
        bits = np.stack([EnvStream(s, p).bernoulli_row(steps) for s in range(seeds)]).astype(bool)
        powers = A.power_table(u, steps + 1)
        times = np.arange(1, steps + 1)
        last = np.maximum.accumulate(np.where(bits, 0, times), axis=1)
        theta = np.full(seeds, u)
        for t in range(1, steps + 1):
            theta = np.where(bits[:, t - 1], u * theta, u)
            assert np.array_equal(theta, powers[t + 1 - last[:, t - 1]])
    # the vectorised replay above agrees with the scalar step and trace API
    stream = EnvStream(0, p)
    trace = env.build_trace(stream, steps)
    state = chain.ThetaState.start(u)
    for t, b in enumerate(stream.bernoulli_row(steps), start=1):
        state = chain.step_maxrand(state, b)
        assert state.theta == chain.closed_form_theta(u, trace, t) == powers[trace.age(t)]


@pytest.mark.criterion(3)
def test_c03_age_law():
    p, t, reps = 0.7, 50, 100_000
    with budget(10):
        ages = env.sample_ages(SEED, p, t, reps)
        err = stats.pmf_compare(stats.counts_of(ages), lambda k: env.pmf_age(k, p, t),
                                support=range(1, t + 2))
    assert err < 0.005


@pytest.fixture(scope="module")
def thm1_fields():
    start = time.perf_counter()
    values = field_values_at("maxrand", InitialConfig.iid_uniform(), 2, 20, SEED, 0.9, 10_000)
    return values, time.perf_counter() - start


@pytest.mark.criterion(4)
def test_c04_marginal_law(thm1_fields):
    values, elapsed = thm1_fields
    with budget(30 - elapsed):
        for u in np.arange(1, 10) / 10:
            f, se = stats.frequency(values[:, 0] <= u)
            assert within_se(f, A.phi_t(u, 0.9, 20), se), u


@pytest.mark.criterion(5)
def test_c05_joint_law(thm1_fields):
    values, _ = thm1_fields
    f, se = stats.frequency((values[:, 0] <= 0.5) & (values[:, 1] <= 0.7))
    exact = A.phi_t(0.35, 0.9, 20)
    assert exact == A.joint_cdf([0.5, 0.7], 0.9, 20)
    assert within_se(f, exact, se)


@pytest.mark.criterion(6)
def test_c06_coupling():
    p, reps = 0.9, 10_000
    with budget(30):
        runs = couple_ensemble(InitialConfig.constant(0.01), InitialConfig.iid_uniform(),
                               5, 40, SEED, p, reps)
    t1 = runs.first_catastrophe
    assert np.all(runs.merged_from_first_catastrophe)
    assert np.all((t1 < 0) | (runs.first_agreement <= t1))
    f, se = stats.frequency((t1 < 0) | (t1 > 10))
    assert abs(0.9**10 - 0.3487) < 5e-5
    assert within_se(f, 0.9**10, se)


@pytest.mark.criterion(7)
def test_c07_stationary_theta_law():
    u, p = 0.5, 0.9
    with budget(5):
        samples = chain.sample_stationary_thetas(u, p, 100_000, EnvStream(SEED, p))
        d = stats.ks_distance(
            stats.EmpiricalCdf.from_samples(samples),
            lambda x: A.stationary_theta_cdf(x, u, p),
            target_left=lambda x: A.stationary_theta_cdf_left(x, u, p),
            extra_points=A.jump_points(u, 200),
        )
    assert d < 0.01


@pytest.mark.criterion(8)
def test_c08_pgf_stationarity():
    with budget(1):
        result = suites.pgf(levels=(0.3, 0.5, 0.9), probs=(0.3, 0.5, 0.9), tol=1e-12, bound=1e-10)
    assert len(result.checks) == 9
    assert result.passed, result.report()


@pytest.mark.criterion(9)
def test_c09_covariance_monte_carlo():
    u1, u2, p = 0.5, 0.7, 0.5
    with budget(60):
        pairs = stationary_fields(2, p, SEED, 100_000)
        est, se = stats.indicator_cov_est(pairs, u1, u2)
    exact = A.indicator_cov(u1, u2, p)
    assert abs(exact - 0.032634) < 5e-7
    assert within_se(est, exact, se)


@pytest.mark.criterion(10)
def test_c10_maxmin_limit():
    u, p, reps = 0.5, 0.5, 10_000
    with budget(60):
        long_run = chain.chain_values_at("maxmin", u, p, 500, SEED, reps)
        series = chain.sample_theta_infinity_maxmin(u, p, reps, EnvStream(SEED, p, reps), 1e-12)
        d = stats.ks_two_sample(long_run, series)
    assert d < 0.02


def read_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    return rows[0], np.array(rows[1:], dtype=float)


@pytest.mark.criterion(11)
def test_c11_fig2(tmp_path):
    with budget(30):
        assert main(["figure", "fig2", "--out-prefix", str(tmp_path / "fig2")]) == 0
    header, data = read_csv(tmp_path / "fig2.csv")
    assert header == ["u", "phi_4", "phi_inf"]
    assert data.shape == (999, 3)
    gap = data[:, 1] - data[:, 2]
    assert np.all(gap >= 0)
    assert abs(gap.max() - FIG2_GRID_MAX) < 1e-12
    assert data[np.argmax(gap), 0] == pytest.approx(FIG2_GRID_ARGMAX)
    assert 0 <= FIG2_CONTINUOUS_SUP - gap.max() < 2e-6


@pytest.mark.criterion(11)
def test_c11_fig1(tmp_path):
    prefix = tmp_path / "fig1"
    with budget(30):
        assert main(["figure", "fig1", "--seed", str(SEED), "--out-prefix", str(prefix)]) == 0
    manifest = json.loads((tmp_path / "fig1_manifest.json").read_text())
    assert manifest["params"]["p"] == 0.9
    assert manifest["params"]["sites"] == 10_000 and manifest["params"]["steps"] == 1000
    a = manifest["age"]
    _, hist = read_csv(tmp_path / "fig1_hist.csv")
    assert hist.shape[0] == 50 and hist[:, 2].sum() == 10_000
    _, field = read_csv(tmp_path / "fig1_field.csv")
    cdf = stats.EmpiricalCdf.from_samples(field[:, 1])
    assert stats.ks_distance(cdf, lambda x: np.asarray(x) ** a) < 0.02
