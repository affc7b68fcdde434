"""Monte Carlo and identity checks run by ``maxrand verify``.

Each suite returns a :class:`SuiteResult` whose checks carry the measured
statistic next to the threshold it was held to.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np

from . import analytic, chain, env, field, stats
from .env import EnvStream
from .field import InitialConfig


@dataclass
class Check:
    label: str
    measured: float
    threshold: float
    passed: bool

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status}  {self.label}: measured={self.measured:.6g} threshold={self.threshold:.6g}"


@dataclass
class SuiteResult:
    name: str
    checks: list[Check] = dc_field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, label, measured, threshold, passed=None):
        if passed is None:
            passed = measured < threshold
        self.checks.append(Check(label, float(measured), float(threshold), bool(passed)))

    def add_within_se(self, label, estimate, expected, se, k=3.0):
        """Record |estimate - expected| against k standard errors."""
        gap = abs(estimate - expected)
        self.add(f"{label} (est={estimate:.6g}, exact={expected:.6g})", gap, k * se, gap <= k * se)

    def report(self) -> str:
        lines = [f"suite {self.name}"] + ["  " + c.line() for c in self.checks]
        lines.append(f"result: {'PASS' if self.passed else 'FAIL'}")
        return "\n".join(lines)


def unit_grid(count: int = 999) -> np.ndarray:
    return np.linspace(0.001, 0.999, count)


def prop1(p=0.7, t=50, reps=100_000, seed=0, tol=0.005) -> SuiteResult:
    res = SuiteResult("prop1")
    ages = env.sample_ages(seed, p, t, reps)
    err = stats.pmf_compare(stats.counts_of(ages), lambda k: env.pmf_age(k, p, t),
                            support=range(1, t + 2))
    res.add(f"max |pmf error| of age at t={t}, p={p}, reps={reps}", err, tol)
    for s in (2, 5, 10):
        f, se = stats.frequency(ages >= s)
        res.add_within_se(f"P(age >= {s})", f, p ** (s - 1), se)
    return res


def thm1(p=0.9, t=20, reps=10_000, seed=0, u1=0.5, u2=0.7) -> SuiteResult:
    res = SuiteResult("thm1")
    values = field.field_values_at("maxrand", InitialConfig.iid_uniform(), 2, t, seed, p, reps)
    for u in np.arange(1, 10) / 10:
        f, se = stats.frequency(values[:, 0] <= u)
        res.add_within_se(f"P(eta_{t}(1) <= {u:.1f})", f, analytic.phi_t(u, p, t), se)
    f, se = stats.frequency((values[:, 0] <= u1) & (values[:, 1] <= u2))
    res.add_within_se(f"P(eta_{t}(1) <= {u1}, eta_{t}(2) <= {u2})", f,
                      analytic.joint_cdf([u1, u2], p, t), se)
    return res


def thm2(p=0.9, reps=10_000, seed=0, t=10, steps=40, n=5) -> SuiteResult:
    res = SuiteResult("thm2")
    runs = field.couple_ensemble(InitialConfig.constant(0.01), InitialConfig.iid_uniform(),
                                 n, steps, seed, p, reps)
    t1 = runs.first_catastrophe
    late_merge = (t1 > 0) & (runs.first_agreement > t1)
    broken = int(np.sum(~runs.merged_from_first_catastrophe | late_merge))
    res.add("coupled runs not identical from T_1 on", broken, 0, broken == 0)
    f, se = stats.frequency((t1 < 0) | (t1 > t))
    res.add_within_se(f"P(T_1 > {t})", f, p**t, se)
    return res


def stationarity(p=0.9, tol=1e-12) -> SuiteResult:
    res = SuiteResult("stationarity")
    u = unit_grid()
    lim = analytic.phi(u, p)
    resid = np.max(np.abs(p * u * lim + (1 - p) * u - lim))
    res.add(f"max |p u phi(u) + (1-p) u - phi(u)| at p={p}", resid, tol)
    return res


def chain_eq(p=0.7, u=0.5, steps=1000, seed=0, reps=1) -> SuiteResult:
    res = SuiteResult("chain-eq")
    base = EnvStream(seed, p)
    mismatches = 0
    for r in range(reps):
        stream = base.with_replica(r)
        trace = env.build_trace(stream, steps)
        state = chain.ThetaState.start(u)
        for t, b in enumerate(stream.bernoulli_row(steps), start=1):
            state = chain.step_maxrand(state, b)
            mismatches += state.theta != chain.closed_form_theta(u, trace, t)
    res.add(f"iterate vs closed form mismatches over {reps}x{steps} steps", mismatches, 0,
            mismatches == 0)
    return res


def pgf(levels=(0.3, 0.5, 0.9), probs=(0.3, 0.5, 0.9), tol=1e-12, bound=1e-10) -> SuiteResult:
    res = SuiteResult("pgf")
    for u in levels:
        for p in probs:
            worst = 0.0
            for s in np.arange(1, 10) / 10:
                lhs = analytic.theta_pgf(s, u, p, tol)
                rhs = (1 - p) * s**u + p * analytic.theta_pgf_shifted(s, u, p, tol)
                worst = max(worst, abs(lhs - rhs))
            res.add(f"pgf stationarity residual u={u} p={p}", worst, bound)
    return res


def maxmin_limit(u=0.5, p=0.5, steps=500, reps=10_000, seed=0, tol=1e-12,
                 bound=0.02) -> SuiteResult:
    res = SuiteResult("maxmin-limit")
    long_run = chain.chain_values_at("maxmin", u, p, steps, seed, reps)
    series = chain.sample_theta_infinity_maxmin(u, p, reps, EnvStream(seed, p, reps), tol)
    d = stats.ks_two_sample(long_run, series)
    res.add(f"KS(chain at t={steps}, series samples), u={u}, p={p}", d, bound)
    return res


def cov(u1=0.5, u2=0.7, p=0.5, reps=100_000, seed=0) -> SuiteResult:
    res = SuiteResult("cov")
    pairs = field.stationary_fields(2, p, seed, reps)
    est, se = stats.indicator_cov_est(pairs, u1, u2)
    res.add_within_se(f"Cov indicators u1={u1} u2={u2} p={p}", est,
                      analytic.indicator_cov(u1, u2, p), se)
    return res


SUITES = {
    "prop1": prop1,
    "thm1": thm1,
    "thm2": thm2,
    "stationarity": stationarity,
    "chain-eq": chain_eq,
    "pgf": pgf,
    "maxmin-limit": maxmin_limit,
    "cov": cov,
}
