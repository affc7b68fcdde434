"""
A snapshot of the (max,rand) field
==================================

Ten thousand sites, a thousand steps, catastrophes with probability 0.1.
Between catastrophes every site keeps the max of its fresh uniforms, so
given the age ``a`` since the last catastrophe a site is distributed as
the max of ``a`` uniforms, with CDF ``u**a``.
"""

import numpy as np

from maxrand import EnvStream, InitialConfig, simulate
from maxrand.stats import EmpiricalCdf, histogram, ks_distance

p, sites, steps = 0.9, 10_000, 1000
result = simulate("maxrand", InitialConfig.iid_uniform(), sites, steps, EnvStream(1, p))

# the renewal trace records when the catastrophes happened
trace = result.trace
a = trace.age(steps)
print(f"{len(trace.times)} catastrophes, last at t={trace.last_time(steps)}, age {a}")

# a coarse text histogram next to the counts expected from u**a
hist = histogram(result.final.values, 0.0, 1.0, 10)
expected = sites * np.diff(hist.edges ** a)
for lo, count, exp in zip(hist.edges[:-1], hist.bins, expected):
    print(f"[{lo:.1f}, {lo + 0.1:.1f})  {count:5d}  expected {exp:8.1f}  " + "#" * int(count // 100))

cdf = EmpiricalCdf.from_samples(result.final.values)
print("KS distance to u**a:", round(ks_distance(cdf, lambda x: np.asarray(x) ** a), 4))
