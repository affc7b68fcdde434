"""
The mixing variable and its relatives
=====================================

For a fixed level u the fraction of sites below u is a random variable
Theta_t(u). It follows ``theta -> u theta`` on normal steps and resets to
u on catastrophes, so in equilibrium it is ``u**G`` with a staircase CDF.
Changing the reset rule gives the (max,min) chain and an Erdos-type
iterated function system.
"""

import numpy as np

from maxrand import EnvStream, stationary_theta_cdf, theta_pgf
from maxrand.chain import (
    chain_values_at,
    run_chain,
    sample_stationary_thetas,
    sample_theta_infinity_maxmin,
)
from maxrand.stats import batch_means, ks_two_sample

u, p = 0.5, 0.9
print("Theta path:", np.round(run_chain("maxrand", u, p, 12, EnvStream(0, p)), 5))

# the staircase: flat between consecutive powers of u, jumping at each
for x in (0.1, 0.124, 0.126, 0.249, 0.25, 0.26, 0.5):
    print(f"F({x}) = {stationary_theta_cdf(x, u, p):.5f}")

samples = sample_stationary_thetas(u, p, 50_000, EnvStream(0, p))
print("mean of u**G:", samples.mean(), " generating function at s=0.5:", theta_pgf(0.5, u, p))

# (max,min): the long-run chain against its series representation
pm = 0.5
long_run = chain_values_at("maxmin", u, pm, 500, 0, 10_000)
series = sample_theta_infinity_maxmin(u, pm, 10_000, EnvStream(0, pm, 10_000))
print("(max,min) KS between long run and series:", round(ks_two_sample(long_run, series), 4))

# Erdos-type system: a time average along one long path; the mean m solves
# m = p u m + (1 - p)(1 - u + u m), which is 1/2 at u = p = 1/2
path = run_chain("erdos", u, pm, 200_000, EnvStream(5, pm))
mean, se = batch_means(path[1000:])
print(f"Erdos path mean {mean:.4f} +/- {se:.4f}")
