"""Simulation and closed-form laws for the (max,rand) catastrophe fitness model."""

from .analytic import (
    INFINITY,
    indicator_cov,
    joint_cdf,
    k_index,
    phi,
    phi_t,
    stationary_theta_cdf,
    theta_pgf,
)
from .env import EnvStream, Params, RenewalTrace, build_trace, pmf_age
from .field import FitnessField, InitialConfig, couple_run, init_field, simulate

__version__ = "0.1.0"

__all__ = [
    "INFINITY",
    "EnvStream",
    "FitnessField",
    "InitialConfig",
    "Params",
    "RenewalTrace",
    "build_trace",
    "couple_run",
    "indicator_cov",
    "init_field",
    "joint_cdf",
    "k_index",
    "phi",
    "phi_t",
    "pmf_age",
    "simulate",
    "stationary_theta_cdf",
    "theta_pgf",
]
