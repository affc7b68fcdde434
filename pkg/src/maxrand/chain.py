"""Mixing-variable chains Theta_t(u) for the (max,rand), (max,min) and Erdos systems."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterator

import numpy as np

from .analytic import upow
from .env import AUX_GEOMETRIC, AUX_SERIES, Ensemble, EnvStream, RenewalTrace

KINDS = ("maxrand", "maxmin", "erdos")


@dataclass(frozen=True)
class ThetaState:
    u: float
    theta: float
    t: int = 0

    @classmethod
    def start(cls, u: float) -> ThetaState:
        return cls(u, u, 0)


def _maxrand(u, theta, b):
    return u * theta if b else u


def _maxmin(u, theta, b):
    return u * theta if b else u + (1.0 - u) * theta


def _erdos(u, theta, b):
    return u * theta if b else 1.0 - u + u * theta


_MAPS = {"maxrand": _maxrand, "maxmin": _maxmin, "erdos": _erdos}


def step_maxrand(state: ThetaState, b: int) -> ThetaState:
    return ThetaState(state.u, _maxrand(state.u, state.theta, b), state.t + 1)


def step_maxmin(state: ThetaState, b: int) -> ThetaState:
    return ThetaState(state.u, _maxmin(state.u, state.theta, b), state.t + 1)


def step_erdos(state: ThetaState, b: int) -> ThetaState:
    return ThetaState(state.u, _erdos(state.u, state.theta, b), state.t + 1)


def closed_form_theta(u: float, trace: RenewalTrace, t: int) -> float:
    """u raised to the age at time t; matches iterating :func:`step_maxrand` exactly."""
    return upow(u, trace.age(t))


def run_chain(kind: str, u: float, p: float, t_max: int, stream: EnvStream) -> np.ndarray:
    """Trajectory ``theta_0 .. theta_{t_max}`` from ``theta_0 = u``, driven by B_1, B_2, ..."""
    if kind not in _MAPS:
        raise ValueError(f"unknown chain kind {kind!r}; expected one of {KINDS}")
    if stream.p != p:
        raise ValueError("stream was built for a different p")
    f = _MAPS[kind]
    out = np.empty(t_max + 1)
    theta = u
    out[0] = theta
    for t, b in enumerate(stream.bernoulli_row(t_max), start=1):
        theta = f(u, theta, b)
        out[t] = theta
    return out


def chain_values_at(kind: str, u: float, p: float, t: int, seed: int, reps: int) -> np.ndarray:
    """theta_t for ``reps`` independent replicas (replica r uses ``EnvStream(seed, p, r)``).

    Steps all replicas together; each step applies the same float operations
    as :func:`run_chain`, so results match it exactly.
    """
    if kind not in _MAPS:
        raise ValueError(f"unknown chain kind {kind!r}; expected one of {KINDS}")
    bits = Ensemble(seed, p, reps).bernoulli_rows(t).astype(bool)
    theta = np.full(reps, u)
    for s in range(t):
        b = bits[:, s]
        if kind == "maxrand":
            theta = np.where(b, u * theta, u)
        elif kind == "maxmin":
            theta = np.where(b, u * theta, u + (1.0 - u) * theta)
        else:
            theta = np.where(b, u * theta, 1.0 - u + u * theta)
    return theta


def geometric_from_uniform(v, p: float):
    """Inversion sampler: P(G >= k) = p**(k-1) on {1, 2, ...}."""
    g = 1 + np.floor(np.log(v) / math.log(p)).astype(np.int64)
    return int(g) if np.ndim(g) == 0 else g


def geometric_draws(stream: EnvStream, row: int = AUX_SERIES, start: int = 0) -> Iterator[int]:
    """Lazy geometric(1 - p) draws from an auxiliary sub-stream."""
    index = start
    while True:
        chunk = stream.aux_uniforms(row, 64, index)
        index += 64
        for v in chunk:
            yield geometric_from_uniform(v, stream.p)


def sample_stationary_theta(u: float, p: float, stream: EnvStream, index: int = 0) -> float:
    """One draw of u**G; ``index`` selects which auxiliary uniform is used."""
    v = stream.aux_uniforms(AUX_GEOMETRIC, 1, index)[0]
    return upow(u, geometric_from_uniform(v, p))


def sample_stationary_thetas(u: float, p: float, count: int, stream: EnvStream) -> np.ndarray:
    """``count`` draws of u**G; entry i equals ``sample_stationary_theta(..., index=i)``."""
    g = geometric_from_uniform(stream.aux_uniforms(AUX_GEOMETRIC, count), p)
    out = np.empty(count)
    x, k = 1.0, 0
    # walk the powers in increasing G so each u**G is built by repeated multiplication
    order = np.argsort(g, kind="stable")
    for i in order:
        while k < g[i]:
            x *= u
            k += 1
        out[i] = x
    return out


def series_terms(u: float, tol: float) -> int:
    """Smallest K with ``(1 - u)**(K + 1) < tol``."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    K = 0
    while (1.0 - u) ** (K + 1) >= tol:
        K += 1
    return K


def theta_infinity_partial_sums(u: float, p: float, tol: float,
                                draws: Callable[[], int] | Iterator[int]) -> np.ndarray:
    """Partial sums of the (max,min) limit series, k = 0 .. K.

    Term k is ``u**T_k * ((1-u)/u)**k = u**(T_k - k) * (1-u)**k`` with
    ``T_k = G_0 + ... + G_k``; since ``T_k >= k + 1`` each term is at most
    ``u(1-u)**k`` and the tail after K is below ``(1-u)**(K+1) < tol``.
    """
    next_draw = draws if callable(draws) else (lambda: next(draws))
    K = series_terms(u, tol)
    sums = np.empty(K + 1)
    total, T = 0.0, 0
    for k in range(K + 1):
        T += next_draw()
        total += u ** (T - k) * (1.0 - u) ** k
        sums[k] = total
    return sums


def theta_infinity_maxmin(u: float, p: float, tol: float = 1e-12,
                          draws: Callable[[], int] | Iterator[int] | None = None,
                          stream: EnvStream | None = None) -> float:
    """One sample of the (max,min) limit variable, truncated at certified error tol."""
    if draws is None:
        if stream is None:
            raise ValueError("need either a geometric sampler or a stream")
        draws = geometric_draws(stream)
    return float(theta_infinity_partial_sums(u, p, tol, draws)[-1])


def sample_theta_infinity_maxmin(u: float, p: float, count: int, stream: EnvStream,
                                 tol: float = 1e-12) -> np.ndarray:
    """``count`` independent series samples using K + 1 auxiliary uniforms each."""
    K = series_terms(u, tol)
    v = stream.aux_uniforms(AUX_SERIES, count * (K + 1)).reshape(count, K + 1)
    T = np.cumsum(geometric_from_uniform(v, p), axis=1)
    k = np.arange(K + 1)
    return np.sum(u ** (T - k) * (1.0 - u) ** k, axis=1)
