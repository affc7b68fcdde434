"""
A contrast: the Bak-Sneppen ring
================================

In Bak-Sneppen only the least-fit site and its neighbours are refreshed.
Low fitness values are driven out and the field piles up above a
threshold near 0.667. The (max,rand) field has no such threshold: every
catastrophe brings back uniform values.
"""

import numpy as np

from maxrand import EnvStream, InitialConfig, simulate

n, steps = 200, 50_000
for model in ("baksneppen", "maxrand"):
    values = simulate(model, InitialConfig.iid_uniform(), n, steps, EnvStream(7, 0.9)).final.values
    q = np.quantile(values, [0.05, 0.25, 0.5])
    print(f"{model:10s} min {values.min():.3f}  quantiles 5/25/50%: {np.round(q, 3)}")
