"""Closed-form laws of the (max,rand) catastrophe model.

Scalar inputs return floats; ``phi_t``, ``phi``, ``indicator_cov`` and the
staircase CDFs also accept numpy arrays.
"""

from __future__ import annotations

import math

import numpy as np

INFINITY = math.inf
"""Horizon sentinel selecting the limiting (stationary) law."""


def _check_open_unit(name, x):
    arr = np.asarray(x, dtype=float)
    if not np.all((arr > 0.0) & (arr < 1.0)):
        raise ValueError(f"{name} must lie in (0, 1)")


def _scalar_or_array(x):
    return float(x) if np.ndim(x) == 0 else x


def upow(u: float, k: int) -> float:
    """u**k by repeated multiplication.

    Every place that needs an integer power of a level uses this convention,
    so closed forms, chain iterates and staircase jump points agree bit for bit.
    """
    if k < 0:
        raise ValueError("k must be >= 0")
    x = 1.0
    for _ in range(k):
        x *= u
    return x


def power_table(u: float, kmax: int) -> np.ndarray:
    """``table[k] == upow(u, k)`` for k = 0 .. kmax."""
    table = np.empty(kmax + 1)
    x = 1.0
    for k in range(kmax + 1):
        table[k] = x
        x *= u
    return table


def phi_t(u, p: float, t: int):
    """CDF of a single site's fitness at time t from an iid-uniform start."""
    _check_open_unit("u", u)
    _check_open_unit("p", p)
    if t == INFINITY:
        return phi(u, p)
    if t < 0 or int(t) != t:
        raise ValueError(f"t must be a nonnegative integer, got {t}")
    t = int(t)
    u = np.asarray(u, dtype=float)
    up = u * p
    value = u * (1.0 - p) * (1.0 - up**t) / (1.0 - up) + u ** (t + 1) * p**t
    return _scalar_or_array(value)


def phi(u, p: float):
    """Limiting CDF ``u(1-p)/(1-up)``, which is also the stationary one."""
    _check_open_unit("u", u)
    _check_open_unit("p", p)
    u = np.asarray(u, dtype=float)
    return _scalar_or_array(u * (1.0 - p) / (1.0 - u * p))


def joint_cdf(us, p: float, t=INFINITY) -> float:
    """P(eta_t(1) <= u_1, ..., eta_t(n) <= u_n); depends only on the product."""
    us = [float(x) for x in us]
    if not us:
        raise ValueError("joint_cdf needs at least one level")
    _check_open_unit("us", us)
    return float(phi_t(math.prod(us), p, t))


def indicator_cov(u1, u2, p: float):
    """Covariance of 1{eta(1) <= u1} and 1{eta(2) <= u2} under the stationary law."""
    _check_open_unit("u1", u1)
    _check_open_unit("u2", u2)
    _check_open_unit("p", p)
    u1 = np.asarray(u1, dtype=float)
    u2 = np.asarray(u2, dtype=float)
    # grouped so that swapping u1 and u2 is exact
    num = (1.0 - p) * p * (u1 * u2) * ((1.0 - u1) * (1.0 - u2))
    den = (1.0 - (u1 * u2) * p) * ((1.0 - u1 * p) * (1.0 - u2 * p))
    return _scalar_or_array(num / den)


def k_index(x: float, u: float) -> int:
    """The unique k >= 1 with ``u**k <= x < u**(k-1)``, powers per :func:`upow`."""
    _check_open_unit("x", x)
    _check_open_unit("u", u)
    k = max(1, math.ceil(math.log(x) / math.log(u)))
    # log/ceil can be off by one near the jump points
    while upow(u, k) > x:
        k += 1
    while k > 1 and upow(u, k - 1) <= x:
        k -= 1
    return k


def _powers_above(x, u):
    """#{k >= 1 : u**k > x} and #{k >= 1 : u**k >= x} for x in (0, 1)."""
    kmax = k_index(float(np.min(x)), u)
    asc = power_table(u, kmax)[:0:-1]  # u**kmax, ..., u**1
    strict = kmax - np.searchsorted(asc, x, side="right")
    weak = kmax - np.searchsorted(asc, x, side="left")
    return strict, weak


def _ppow(p, ks):
    """``p ** k`` elementwise with Python float powers, matching the scalar path."""
    table = {k: p ** int(k) for k in np.unique(ks)}
    return np.array([table[k] for k in ks.tolist()], dtype=float)


def stationary_theta_cdf(x, u: float, p: float):
    """Right-continuous staircase CDF of u**G, G ~ geometric(1 - p) on {1, 2, ...}.

    Equals ``p**(k_index(x, u) - 1)`` on (0, 1); jumps sit at ``upow(u, j)``.
    """
    _check_open_unit("u", u)
    _check_open_unit("p", p)
    if np.ndim(x) == 0:
        x = float(x)
        if x <= 0.0:
            return 0.0
        if x >= 1.0:
            return 1.0
        return p ** (k_index(x, u) - 1)
    x = np.asarray(x, dtype=float)
    out = np.where(x >= 1.0, 1.0, 0.0)
    inside = (x > 0.0) & (x < 1.0)
    if inside.any():
        strict, _ = _powers_above(x[inside], u)
        out[inside] = _ppow(p, strict)
    return out


def stationary_theta_cdf_left(x, u: float, p: float):
    """Left limit ``F(x-)`` of :func:`stationary_theta_cdf`, i.e. P(u**G < x)."""
    _check_open_unit("u", u)
    _check_open_unit("p", p)
    scalar = np.ndim(x) == 0
    x = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.where(x > 1.0, 1.0, 0.0)
    out[x == 1.0] = 1.0
    inside = (x > 0.0) & (x < 1.0)
    if inside.any():
        _, weak = _powers_above(x[inside], u)
        out[inside] = _ppow(p, weak)
    return float(out[0]) if scalar else out


def jump_points(u: float, count: int) -> np.ndarray:
    """The first ``count`` jump locations u, u**2, ... of the staircase CDF."""
    return power_table(u, count)[1:]


def pgf_terms(p: float, tol: float) -> int:
    """Series length K with geometric tail ``p**K < tol``."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    return max(1, math.ceil(math.log(tol) / math.log(p)))


def _pgf(s, u, p, tol, shift):
    if not 0.0 <= s <= 1.0:
        raise ValueError("s must lie in [0, 1]")
    _check_open_unit("u", u)
    _check_open_unit("p", p)
    K = pgf_terms(p, tol)
    powers = power_table(u, K + shift)[1 + shift :]
    weights = (1.0 - p) * p ** np.arange(K)
    return float(np.sum(weights * np.power(s, powers)))


def theta_pgf(s: float, u: float, p: float, tol: float = 1e-12) -> float:
    """E(s**Theta) for Theta ~ u**G, truncated with absolute error below tol."""
    return _pgf(s, u, p, tol, 0)


def theta_pgf_shifted(s: float, u: float, p: float, tol: float = 1e-12) -> float:
    """E(s**(u*Theta)) for Theta ~ u**G, truncated like :func:`theta_pgf`."""
    return _pgf(s, u, p, tol, 1)
