"""Site-field simulators: (max,rand), (max,min), coupled runs and a Bak-Sneppen ring.

The infinite row of sites is truncated to ``n`` sites. Site ``k`` (1-based)
at step ``t`` always reads ``stream.uniform_at(t, k)``, so fields of
different sizes built on one stream agree on their common sites.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .chain import geometric_from_uniform
from .env import AUX_STATIONARY_FIELD, Ensemble, EnvStream, RenewalTrace

MODELS = ("maxrand", "maxmin", "baksneppen")


@dataclass(frozen=True)
class FitnessField:
    values: np.ndarray
    t: int = 0

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        if values.ndim != 1 or values.size == 0:
            raise ValueError("a field is a nonempty 1-d vector")
        if not np.all((values > 0.0) & (values < 1.0)):
            raise ValueError("fitness values must lie in (0, 1)")

    @property
    def n(self) -> int:
        return self.values.size


@dataclass(frozen=True)
class InitialConfig:
    kind: str
    value: float | tuple[float, ...] | None = None

    def __post_init__(self):
        if self.kind == "iid_uniform":
            return
        if self.kind == "constant":
            if not 0.0 < float(self.value) < 1.0:
                raise ValueError("constant start must lie in (0, 1)")
        elif self.kind == "explicit":
            vec = tuple(float(x) for x in self.value)
            if not all(0.0 < x < 1.0 for x in vec):
                raise ValueError("explicit start entries must lie in (0, 1)")
            object.__setattr__(self, "value", vec)
        else:
            raise ValueError(f"unknown initial configuration {self.kind!r}")

    @classmethod
    def iid_uniform(cls) -> InitialConfig:
        return cls("iid_uniform")

    @classmethod
    def constant(cls, c: float) -> InitialConfig:
        return cls("constant", float(c))

    @classmethod
    def explicit(cls, values) -> InitialConfig:
        return cls("explicit", tuple(values))

    @classmethod
    def parse(cls, text: str) -> InitialConfig:
        """``iid``, ``const:C`` or ``explicit:a,b,c``."""
        name, _, arg = text.partition(":")
        if name in ("iid", "iid_uniform"):
            return cls.iid_uniform()
        if name in ("const", "constant"):
            return cls.constant(float(arg))
        if name == "explicit":
            return cls.explicit(float(x) for x in arg.split(","))
        raise ValueError(f"cannot parse initial configuration {text!r}")

    def __str__(self):
        if self.kind == "iid_uniform":
            return "iid"
        if self.kind == "constant":
            return f"const:{self.value!r}"
        return "explicit:" + ",".join(repr(x) for x in self.value)


def init_field(cfg: InitialConfig, n: int, stream: EnvStream) -> FitnessField:
    if n < 1:
        raise ValueError("n must be >= 1")
    if cfg.kind == "iid_uniform":
        return FitnessField(stream.uniform_row(0, n), 0)
    if cfg.kind == "constant":
        return FitnessField(np.full(n, cfg.value), 0)
    if len(cfg.value) != n:
        raise ValueError(f"explicit start has {len(cfg.value)} entries, expected {n}")
    return FitnessField(np.array(cfg.value), 0)


def _update(model: str, values: np.ndarray, b: int, fresh: np.ndarray) -> np.ndarray:
    if b:
        return np.maximum(values, fresh)
    if model == "maxrand":
        return fresh
    return np.minimum(values, fresh)


def step_maxrand_field(field: FitnessField, stream: EnvStream) -> FitnessField:
    t = field.t + 1
    fresh = stream.uniform_row(t, field.n)
    return FitnessField(_update("maxrand", field.values, stream.bernoulli_at(t), fresh), t)


def step_maxmin_field(field: FitnessField, stream: EnvStream) -> FitnessField:
    t = field.t + 1
    fresh = stream.uniform_row(t, field.n)
    return FitnessField(_update("maxmin", field.values, stream.bernoulli_at(t), fresh), t)


def bak_sneppen_step(field: FitnessField, stream: EnvStream) -> FitnessField:
    """Refresh the least-fit site (lowest index on ties) and its two ring neighbours."""
    n = field.n
    if n < 3:
        raise ValueError("a Bak-Sneppen ring needs at least 3 sites")
    t = field.t + 1
    values = field.values.copy()
    _bak_sneppen_update(values, stream.uniform_row(t, n))
    return FitnessField(values, t)


def _bak_sneppen_update(values: np.ndarray, fresh: np.ndarray) -> None:
    n = values.size
    i = int(np.argmin(values))
    idx = [(i - 1) % n, i, (i + 1) % n]
    values[idx] = fresh[idx]


_BLOCK = 1 << 18


def _uniform_rows(stream: EnvStream, t_max: int, n: int):
    """Yield ``(t, U_t)`` for t = 1 .. t_max, drawing many rows per call."""
    step = max(1, _BLOCK // n)
    for t0 in range(1, t_max + 1, step):
        block = stream.uniform_block(t0, min(step, t_max + 1 - t0), n)
        yield from enumerate(block, start=t0)


@dataclass(frozen=True)
class SimulationResult:
    final: FitnessField
    trace: RenewalTrace | None
    trajectory: np.ndarray | None = None


def simulate(model: str, cfg: InitialConfig, n: int, t_max: int, stream: EnvStream,
             record: bool = False) -> SimulationResult:
    """Run one replica for ``t_max`` steps.

    Produces the same fields as repeated ``step_*`` calls but reads the
    environment bits once. With ``record`` the full ``(t_max + 1, n)``
    trajectory is kept.
    """
    if model not in MODELS:
        raise ValueError(f"unknown model {model!r}; expected one of {MODELS}")
    values = init_field(cfg, n, stream).values.copy()
    traj = np.empty((t_max + 1, n)) if record else None
    if record:
        traj[0] = values
    trace = None
    if model == "baksneppen":
        if n < 3:
            raise ValueError("a Bak-Sneppen ring needs at least 3 sites")
    else:
        bits = stream.bernoulli_row(t_max)
        trace = RenewalTrace.from_bits(bits)
    for t, fresh in _uniform_rows(stream, t_max, n):
        if model == "baksneppen":
            _bak_sneppen_update(values, fresh)
        else:
            values = _update(model, values, bits[t - 1], fresh)
        if record:
            traj[t] = values
    return SimulationResult(FitnessField(values, t_max), trace, traj)


def _init_ensemble(cfg: InitialConfig, n: int, ens: Ensemble) -> np.ndarray:
    if cfg.kind == "iid_uniform":
        return ens.uniform_rows(0, n)
    return np.tile(init_field(cfg, n, ens.stream(0)).values, (ens.reps, 1))


def _update_ensemble(model: str, values: np.ndarray, b: np.ndarray, fresh: np.ndarray) -> np.ndarray:
    normal = b.astype(bool)[:, None]
    reset = fresh if model == "maxrand" else np.minimum(values, fresh)
    return np.where(normal, np.maximum(values, fresh), reset)


def field_values_at(model: str, cfg: InitialConfig, n: int, t: int, seed: int, p: float,
                    reps: int) -> np.ndarray:
    """Fields at time t for ``reps`` independent replicas, shape ``(reps, n)``.

    Row r equals ``simulate(model, cfg, n, t, EnvStream(seed, p, r)).final.values``;
    all replicas advance together.
    """
    if model not in ("maxrand", "maxmin"):
        raise ValueError("ensembles support the maxrand and maxmin models")
    ens = Ensemble(seed, p, reps)
    values = _init_ensemble(cfg, n, ens)
    bits = ens.bernoulli_rows(t)
    for s in range(1, t + 1):
        values = _update_ensemble(model, values, bits[:, s - 1], ens.uniform_rows(s, n))
    return values


@dataclass(frozen=True)
class CoupledRun:
    trajectory_a: np.ndarray
    trajectory_b: np.ndarray
    trace: RenewalTrace
    first_agreement_time: int | None

    @property
    def first_catastrophe(self) -> int | None:
        return self.trace.times[0] if self.trace.times else None

    def agree_from(self, t: int) -> bool:
        """True when the two fields coincide exactly at every time >= t."""
        return bool(np.array_equal(self.trajectory_a[t:], self.trajectory_b[t:]))


def couple_run(cfg_a: InitialConfig, cfg_b: InitialConfig, n: int, t_max: int,
               stream: EnvStream) -> CoupledRun:
    """Two (max,rand) fields driven by the identical B and U values."""
    bits = stream.bernoulli_row(t_max)
    traj_a = np.empty((t_max + 1, n))
    traj_b = np.empty((t_max + 1, n))
    traj_a[0] = init_field(cfg_a, n, stream).values
    traj_b[0] = init_field(cfg_b, n, stream).values
    for t in range(1, t_max + 1):
        fresh = stream.uniform_row(t, n)
        traj_a[t] = _update("maxrand", traj_a[t - 1], bits[t - 1], fresh)
        traj_b[t] = _update("maxrand", traj_b[t - 1], bits[t - 1], fresh)
    hits = np.flatnonzero(np.all(traj_a == traj_b, axis=1))
    first = int(hits[0]) if hits.size else None
    return CoupledRun(traj_a, traj_b, RenewalTrace.from_bits(bits), first)


def stationary_field(n: int, p: float, stream: EnvStream) -> FitnessField:
    """Draw a field from the limiting law.

    One geometric age A is shared by all sites, and each site is the max of
    A fresh uniforms: sites are conditionally iid given A, not independent.
    """
    age = geometric_from_uniform(stream.aux_uniforms(AUX_STATIONARY_FIELD, 1)[0], p)
    u = stream.aux_uniforms(AUX_STATIONARY_FIELD, n * age, 1).reshape(n, age)
    return FitnessField(u.max(axis=1), 0)


def stationary_fields(n: int, p: float, seed: int, reps: int) -> np.ndarray:
    """Row r equals ``stationary_field(n, p, EnvStream(seed, p, r)).values``."""
    ens = Ensemble(seed, p, reps)
    ages = geometric_from_uniform(ens.aux_uniforms(AUX_STATIONARY_FIELD, 1)[:, 0], p)
    out = np.empty((reps, n))
    for a in np.unique(ages):
        rows = np.flatnonzero(ages == a)
        u = ens.aux_uniforms(AUX_STATIONARY_FIELD, n * int(a), 1, replicas=rows)
        out[rows] = u.reshape(rows.size, n, int(a)).max(axis=2)
    return out


@dataclass(frozen=True)
class CouplingSummary:
    """Per-replica outcome of coupled runs; -1 marks "never" in the time arrays."""

    first_catastrophe: np.ndarray
    first_agreement: np.ndarray
    merged_from_first_catastrophe: np.ndarray


def couple_ensemble(cfg_a: InitialConfig, cfg_b: InitialConfig, n: int, t_max: int,
                    seed: int, p: float, reps: int) -> CouplingSummary:
    """Vectorised :func:`couple_run` over replicas ``0 .. reps-1``."""
    ens = Ensemble(seed, p, reps)
    a = _init_ensemble(cfg_a, n, ens)
    b = _init_ensemble(cfg_b, n, ens)
    bits = ens.bernoulli_rows(t_max)
    zeros = bits == 0
    t1 = np.where(zeros.any(axis=1), zeros.argmax(axis=1) + 1, -1)
    first = np.where(np.all(a == b, axis=1), 0, -1)
    merged = np.ones(reps, dtype=bool)
    for t in range(1, t_max + 1):
        fresh = ens.uniform_rows(t, n)
        a = _update_ensemble("maxrand", a, bits[:, t - 1], fresh)
        b = _update_ensemble("maxrand", b, bits[:, t - 1], fresh)
        equal = np.all(a == b, axis=1)
        first = np.where((first < 0) & equal, t, first)
        merged &= equal | (t1 < 0) | (t < t1)
    return CouplingSummary(t1, first, merged)
