"""Replayable randomness and catastrophe renewal times.

Every random number is a pure function of ``(seed, replica, tag, row, index)``.
Values come from the Philox4x32-10 counter-based bijection (Salmon et al.,
Random123), evaluated with numpy over whole arrays of counters:

    key     = (seed mod 2**32, seed >> 32)
    counter = (index // 2, row, replica, tag)

Each counter yields four 32-bit words, i.e. two 52-bit uniforms. There is no
generator state, so any value can be recomputed anywhere and in any order,
and many replicas can be drawn in one vectorised call.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass, field

import numpy as np

GENERATOR_NAME = "Philox4x32-10 (Random123), numpy implementation"

_U32 = (1 << 32) - 1
_U64 = (1 << 64) - 1
_MASK = np.uint64(_U32)
_SHIFT = np.uint64(32)
_M0 = np.uint64(0xD2511F53)
_M1 = np.uint64(0xCD9E8D57)
_W0 = 0x9E3779B9
_W1 = 0xBB67AE85

# Sub-stream tags. Distinct tags never share a counter value.
TAG_BERNOULLI = 1
TAG_UNIFORM = 2
TAG_AUX = 3

# Rows inside TAG_AUX used by the samplers in other modules.
AUX_GEOMETRIC = 1
AUX_STATIONARY_FIELD = 2
AUX_SERIES = 3


def philox4x32(c0, c1, c2, c3, key: tuple[int, int]):
    """Philox4x32-10 applied elementwise; counter words broadcast together."""
    c0, c1, c2, c3 = np.broadcast_arrays(*(np.asarray(c, dtype=np.uint64) for c in (c0, c1, c2, c3)))
    k0, k1 = key
    for r in range(10):
        if r:
            k0 = (k0 + _W0) & _U32
            k1 = (k1 + _W1) & _U32
        p0 = _M0 * c0
        p1 = _M1 * c2
        c0, c1, c2, c3 = ((p1 >> _SHIFT) ^ c1 ^ np.uint64(k0), p1 & _MASK,
                          (p0 >> _SHIFT) ^ c3 ^ np.uint64(k1), p0 & _MASK)
    return c0, c1, c2, c3


def bits_to_open_unit(hi, lo):
    """Two 32-bit words to a float strictly inside (0, 1).

    The top 52 of the 64 bits give ``(m + 0.5) / 2**52``; both steps are exact
    in double precision, so 0 and 1 never occur.
    """
    hi = np.asarray(hi, dtype=np.uint64)
    lo = np.asarray(lo, dtype=np.uint64)
    m = ((hi << np.uint64(20)) | (lo >> np.uint64(12))).astype(np.float64)
    return (m + 0.5) * 2.0**-52


def draw_uniforms(seed: int, tag: int, row, index, replica=0) -> np.ndarray:
    """Uniform number ``index`` of sub-stream (tag, row) of a replica; broadcasts."""
    index = np.asarray(index, dtype=np.uint64)
    x0, x1, x2, x3 = philox4x32(index >> np.uint64(1), row, replica, tag,
                                (seed & _U32, (seed >> 32) & _U32))
    odd = (index & np.uint64(1)).astype(bool)
    return bits_to_open_unit(np.where(odd, x2, x0), np.where(odd, x3, x1))


@dataclass(frozen=True)
class Params:
    p: float
    n: int = 1
    t_max: int = 0
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.p < 1.0:
            raise ValueError(f"p must lie in (0, 1), got {self.p}")
        if self.n < 1:
            raise ValueError(f"site count must be >= 1, got {self.n}")
        if self.t_max < 0:
            raise ValueError(f"horizon must be >= 0, got {self.t_max}")
        if not 0 <= self.seed <= _U64:
            raise ValueError("seed must be a 64-bit unsigned integer")


def _check_stream_args(seed, p):
    if not 0.0 < p < 1.0:
        raise ValueError(f"p must lie in (0, 1), got {p}")
    if not 0 <= seed <= _U64:
        raise ValueError("seed must be a 64-bit unsigned integer")


@dataclass(frozen=True)
class EnvStream:
    """Seed-addressable source of the environment bits B_t and uniforms U_t(n).

    ``B_t = 1`` (a normal step) when the t-th Bernoulli-stream uniform falls
    below ``p``. Different ``replica`` values give independent streams under
    the same seed.
    """

    seed: int
    p: float
    replica: int = 0

    def __post_init__(self):
        _check_stream_args(self.seed, self.p)
        if not 0 <= self.replica <= _U32:
            raise ValueError("replica must fit in 32 bits")

    def with_replica(self, replica: int) -> EnvStream:
        return EnvStream(self.seed, self.p, replica)

    def uniforms(self, tag: int, row: int, count: int, start: int = 0) -> np.ndarray:
        index = np.arange(start, start + count, dtype=np.uint64)
        return draw_uniforms(self.seed, tag, row, index, self.replica)

    def bernoulli_at(self, t: int) -> int:
        if t < 1:
            raise ValueError(f"B is indexed from t = 1, got t = {t}")
        return int(self.uniforms(TAG_BERNOULLI, 0, 1, t - 1)[0] < self.p)

    def bernoulli_row(self, t_max: int) -> np.ndarray:
        """``B_1 .. B_{t_max}`` as a uint8 array (index i holds B_{i+1})."""
        if t_max < 0:
            raise ValueError("t_max must be >= 0")
        return (self.uniforms(TAG_BERNOULLI, 0, t_max) < self.p).astype(np.uint8)

    def uniform_at(self, t: int, site: int) -> float:
        if t < 1 or site < 1:
            raise ValueError(f"U_t(site) needs t >= 1 and site >= 1, got ({t}, {site})")
        return float(self.uniforms(TAG_UNIFORM, t, 1, site - 1)[0])

    def uniform_row(self, t: int, n: int) -> np.ndarray:
        """``U_t(1) .. U_t(n)``; row ``t = 0`` is reserved for initial fields."""
        if t < 0:
            raise ValueError("t must be >= 0")
        return self.uniforms(TAG_UNIFORM, t, n)

    def uniform_block(self, t0: int, rows: int, n: int) -> np.ndarray:
        """Rows ``t0 .. t0 + rows - 1`` of :meth:`uniform_row` in one call."""
        if t0 < 0:
            raise ValueError("t must be >= 0")
        t = np.arange(t0, t0 + rows, dtype=np.uint64)[:, None]
        index = np.arange(n, dtype=np.uint64)[None, :]
        return draw_uniforms(self.seed, TAG_UNIFORM, t, index, self.replica)

    def aux_uniforms(self, row: int, count: int, start: int = 0) -> np.ndarray:
        """Auxiliary uniforms for samplers, disjoint from the B and U streams."""
        return self.uniforms(TAG_AUX, row, count, start)


@dataclass(frozen=True)
class Ensemble:
    """Replicas ``0 .. reps-1`` of one seed, drawn together.

    Row r of every array equals what ``EnvStream(seed, p, r)`` returns.
    """

    seed: int
    p: float
    reps: int

    def __post_init__(self):
        _check_stream_args(self.seed, self.p)
        if not 1 <= self.reps <= _U32 + 1:
            raise ValueError("reps must be between 1 and 2**32")

    def stream(self, r: int) -> EnvStream:
        return EnvStream(self.seed, self.p, r)

    def _draw(self, tag, row, count, start=0, replicas=None):
        reps = np.arange(self.reps, dtype=np.uint64) if replicas is None else np.asarray(replicas, dtype=np.uint64)
        index = np.arange(start, start + count, dtype=np.uint64)
        return draw_uniforms(self.seed, tag, row, index[None, :], reps[:, None])

    def bernoulli_rows(self, t_max: int) -> np.ndarray:
        return (self._draw(TAG_BERNOULLI, 0, t_max) < self.p).astype(np.uint8)

    def uniform_rows(self, t: int, n: int, replicas=None) -> np.ndarray:
        return self._draw(TAG_UNIFORM, t, n, replicas=replicas)

    def aux_uniforms(self, row: int, count: int, start: int = 0, replicas=None) -> np.ndarray:
        return self._draw(TAG_AUX, row, count, start, replicas)


@dataclass(frozen=True)
class RenewalTrace:
    """Catastrophe times ``T_1 < T_2 < ...`` up to ``horizon`` (T_0 = 0 implicit)."""

    horizon: int
    times: tuple[int, ...] = field(default_factory=tuple)

    def __post_init__(self):
        times = tuple(int(s) for s in self.times)
        object.__setattr__(self, "times", times)
        if self.horizon < 0:
            raise ValueError("horizon must be >= 0")
        if any(s < 1 or s > self.horizon for s in times):
            raise ValueError("catastrophe times must lie in [1, horizon]")
        if any(a >= b for a, b in zip(times, times[1:])):
            raise ValueError("catastrophe times must be strictly increasing")

    @classmethod
    def from_bits(cls, bits) -> RenewalTrace:
        """Trace from ``B_1 .. B_h``; catastrophes are the positions where B = 0."""
        bits = np.asarray(bits)
        times = tuple(int(s) for s in np.flatnonzero(bits == 0) + 1)
        return cls(len(bits), times)

    def count(self, t: int) -> int:
        """N(t), the number of catastrophes in [1, t]."""
        self._check(t)
        return bisect.bisect_right(self.times, t)

    def last_time(self, t: int) -> int:
        """T_{N(t)}, the most recent catastrophe time at or before t (0 if none)."""
        k = self.count(t)
        return self.times[k - 1] if k else 0

    def age(self, t: int) -> int:
        return t + 1 - self.last_time(t)

    def _check(self, t: int):
        if not 0 <= t <= self.horizon:
            raise ValueError(f"t = {t} outside [0, {self.horizon}]")


def build_trace(stream: EnvStream, t_max: int) -> RenewalTrace:
    return RenewalTrace.from_bits(stream.bernoulli_row(t_max))


def age(trace: RenewalTrace, t: int) -> int:
    """``t + 1 - T_{N(t)}``, always in ``{1, ..., t + 1}``."""
    return trace.age(t)


def pmf_age(k: int, p: float, t: int) -> float:
    """Law of the age at time t: geometric(1 - p) on {1..t} with the rest at t + 1."""
    if not 1 <= k <= t + 1:
        raise ValueError(f"k = {k} outside [1, {t + 1}]")
    if k == t + 1:
        return p**t
    return (1.0 - p) * p ** (k - 1)


def ages_from_bits(bits: np.ndarray) -> np.ndarray:
    """Age at the final time for each row of a ``(reps, t)`` bit matrix."""
    reps, t = bits.shape
    positions = np.where(bits == 0, np.arange(1, t + 1), 0)
    last = positions.max(axis=1) if t else np.zeros(reps, dtype=np.int64)
    return t + 1 - last


def sample_ages(seed: int, p: float, t: int, reps: int) -> np.ndarray:
    """Age at time t for ``reps`` independent traces (replicas 0 .. reps-1)."""
    return ages_from_bits(Ensemble(seed, p, reps).bernoulli_rows(t))


def sample_counts(seed: int, p: float, times, reps: int) -> np.ndarray:
    """N(s) for each s in ``times``, one row per independent trace."""
    times = list(times)
    bits = Ensemble(seed, p, reps).bernoulli_rows(max(times))
    catastrophes = np.concatenate([np.zeros((reps, 1), dtype=np.int64),
                                   np.cumsum(bits == 0, axis=1)], axis=1)
    return catastrophes[:, times]
