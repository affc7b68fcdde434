"""
How fast the single-site law settles
====================================

``phi_t`` is the CDF of one site at time t from an iid-uniform start and
``phi`` its limit. The gap closes geometrically in t, and the limit is
pinned down by the one-step balance ``p u phi(u) + (1 - p) u = phi(u)``.
"""

import numpy as np

from maxrand import InitialConfig, phi, phi_t
from maxrand.field import field_values_at

p = 0.9
u = np.linspace(0.001, 0.999, 999)
for t in (0, 1, 4, 10, 40, 100):
    gap = phi_t(u, p, t) - phi(u, p)
    i = int(np.argmax(gap))
    print(f"t={t:3d}  max gap {gap[i]:.3e} at u={u[i]:.3f}")

lim = phi(u, p)
print("balance residual:", np.max(np.abs(p * u * lim + (1 - p) * u - lim)))

# a Monte Carlo cross-check at t = 4, all replicas stepped together
values = field_values_at("maxrand", InitialConfig.iid_uniform(), 1, 4, 0, p, 20_000)[:, 0]
for level in (0.3, 0.6, 0.9):
    print(f"P(eta_4 <= {level}) simulated {np.mean(values <= level):.4f}  exact {phi_t(level, p, 4):.4f}")
