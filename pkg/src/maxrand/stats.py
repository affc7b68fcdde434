"""Empirical CDFs, KS distances, histograms and simple estimators with standard errors."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Mapping

import numpy as np


@dataclass(frozen=True)
class EmpiricalCdf:
    sorted_samples: np.ndarray

    @classmethod
    def from_samples(cls, samples) -> EmpiricalCdf:
        return cls(np.sort(np.asarray(samples, dtype=float)))

    @property
    def size(self) -> int:
        return self.sorted_samples.size

    def __call__(self, x):
        return ecdf_eval(self, x)

    def left(self, x):
        """Left limit, the fraction of samples strictly below x."""
        return np.searchsorted(self.sorted_samples, x, side="left") / self.size


def ecdf_eval(cdf: EmpiricalCdf, x):
    """Fraction of samples <= x."""
    value = np.searchsorted(cdf.sorted_samples, x, side="right") / cdf.size
    return float(value) if np.ndim(value) == 0 else value


def _apply(f, xs):
    try:
        out = np.asarray(f(xs), dtype=float)
        if out.shape == xs.shape:
            return out
    except (TypeError, ValueError):
        pass
    return np.array([f(float(x)) for x in xs])


def ks_distance(cdf: EmpiricalCdf, target: Callable, target_left: Callable | None = None,
                extra_points: Iterable[float] = ()) -> float:
    """One-sample Kolmogorov-Smirnov distance sup |F_emp - target|.

    At each sample point both ``F_emp(x)`` and ``F_emp(x-)`` are compared,
    the latter against ``target_left(x)`` (the target's left limit) when the
    target has jumps; for continuous targets leave it as None. ``extra_points``
    adds further locations, e.g. the target's own jump points.
    """
    xs = np.unique(np.concatenate([cdf.sorted_samples,
                                   np.asarray(list(extra_points), dtype=float)]))
    right = _apply(target, xs)
    left = right if target_left is None else _apply(target_left, xs)
    d_right = np.abs(ecdf_eval(cdf, xs) - right)
    d_left = np.abs(cdf.left(xs) - left)
    return float(max(d_right.max(), d_left.max()))


@dataclass(frozen=True)
class Histogram:
    lo: float
    hi: float
    bins: np.ndarray
    total: int
    overflow: int = 0

    @property
    def edges(self) -> np.ndarray:
        return bin_edges(self.lo, self.hi, self.bins.size)

    @property
    def width(self) -> float:
        return (self.hi - self.lo) / self.bins.size


def bin_edges(lo: float, hi: float, bins: int) -> np.ndarray:
    edges = lo + np.arange(bins + 1) * ((hi - lo) / bins)
    edges[-1] = hi
    return edges


def histogram(samples, lo: float = 0.0, hi: float = 1.0, bins: int = 50) -> Histogram:
    """Counts on half-open bins ``[e_i, e_{i+1})``; the last bin also takes ``hi``.

    Samples outside ``[lo, hi]`` go to ``overflow`` rather than being dropped.
    """
    if not lo < hi:
        raise ValueError("need lo < hi")
    if bins < 1:
        raise ValueError("need at least one bin")
    x = np.asarray(samples, dtype=float).ravel()
    inside = (x >= lo) & (x <= hi)
    idx = np.searchsorted(bin_edges(lo, hi, bins), x[inside], side="right") - 1
    idx = np.minimum(idx, bins - 1)
    counts = np.bincount(idx, minlength=bins).astype(np.int64)
    return Histogram(lo, hi, counts, int(inside.sum()), int(x.size - inside.sum()))


def frequency(hits) -> tuple[float, float]:
    """Sample frequency of a boolean array and its binomial standard error."""
    hits = np.asarray(hits, dtype=bool)
    f = hits.mean()
    return float(f), float(np.sqrt(f * (1.0 - f) / hits.size))


def mean_se(x) -> tuple[float, float]:
    x = np.asarray(x, dtype=float)
    return float(x.mean()), float(x.std(ddof=1) / np.sqrt(x.size))


def batch_means(x, batches: int = 100) -> tuple[float, float]:
    """Mean of a correlated series and its batch-means standard error."""
    x = np.asarray(x, dtype=float)
    size = x.size // batches
    if size < 1:
        raise ValueError("series shorter than the number of batches")
    means = x[: size * batches].reshape(batches, size).mean(axis=1)
    return float(x.mean()), float(means.std(ddof=1) / np.sqrt(batches))


def indicator_cov_est(pairs, u1: float, u2: float) -> tuple[float, float]:
    """Sample covariance (N - 1 denominator) of 1{x1 <= u1} and 1{x2 <= u2}.

    The standard error is the plug-in one from the centred products.
    """
    pairs = np.asarray(pairs, dtype=float)
    if pairs.ndim != 2 or pairs.shape[0] < 2:
        raise ValueError("need at least two pairs")
    a = (pairs[:, 0] <= u1).astype(float)
    b = (pairs[:, 1] <= u2).astype(float)
    n = a.size
    prod = (a - a.mean()) * (b - b.mean())
    estimate = prod.sum() / (n - 1)
    std_err = prod.std(ddof=1) / np.sqrt(n)
    return float(estimate), float(std_err)


def counts_of(values) -> dict[int, int]:
    keys, counts = np.unique(np.asarray(values), return_counts=True)
    return {int(k): int(c) for k, c in zip(keys, counts)}


def pmf_compare(empirical_counts: Mapping[int, int], pmf: Callable[[int], float],
                support: Iterable[int] = ()) -> float:
    """Max |count/total - pmf(k)| over observed k, plus any listed ``support`` points."""
    total = sum(empirical_counts.values())
    if total <= 0:
        raise ValueError("empty count table")
    keys = set(empirical_counts) | set(support)
    return max(abs(empirical_counts.get(k, 0) / total - pmf(k)) for k in keys)


def ks_two_sample(a, b) -> float:
    """Two-sample KS distance sup |F_a - F_b| over the pooled sample points."""
    fa = EmpiricalCdf.from_samples(a)
    fb = EmpiricalCdf.from_samples(b)
    xs = np.concatenate([fa.sorted_samples, fb.sorted_samples])
    return float(np.max(np.abs(ecdf_eval(fa, xs) - ecdf_eval(fb, xs))))
