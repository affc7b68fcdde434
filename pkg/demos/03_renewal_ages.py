"""
Catastrophe times as a renewal process
======================================

Catastrophes arrive independently with probability ``1 - p`` per step.
The age ``t + 1 - T_N(t)`` is a geometric variable capped at ``t + 1``.
"""

import numpy as np

from maxrand import EnvStream, build_trace, pmf_age
from maxrand.env import sample_ages
from maxrand.stats import counts_of

p, t = 0.7, 50
trace = build_trace(EnvStream(3, p), t)
print("first catastrophes:", trace.times[:8])
print("N(t) at t=10, 25, 50:", [trace.count(s) for s in (10, 25, 50)])

ages = sample_ages(0, p, t, 100_000)
counts = counts_of(ages)
print(" k  empirical  exact")
for k in range(1, 8):
    print(f"{k:2d}  {counts.get(k, 0) / ages.size:.4f}     {pmf_age(k, p, t):.4f}")
print("mean age", ages.mean(), "vs", sum(k * pmf_age(k, p, t) for k in range(1, t + 2)))
