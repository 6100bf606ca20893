"""
Wald versus state-wise t-tests in a two-method design
=====================================================

Method 1 beats method 2 in state 1 by ``delta1``. In state 2 the roles are
reversed with a smaller margin ``v |delta1|``. The script prints one
rejection-rate table and the analytic rejection region of the Wald test.
"""

import numpy as np

from cmcs.cpa import TwoStateDesign, closed_form_wald
from cmcs.simlab import REJECTION_PRESETS, TABLE_COV, rejection_region_grid, rejection_study, table_layout

# a lighter version of the first preset: 2000 replications instead of 10000
preset = dict(REJECTION_PRESETS["table1"])
print(preset)
res = rejection_study(
    [(d, 0.0, 0.5) for d in (-0.1, -0.2, -0.3, -0.4, -0.5, -0.6)],
    n=500, alpha=0.05, reps=2000, noise_sd=preset["noise_sd"], cov=TABLE_COV, seed=11,
)
print(table_layout(res, 1))
print("Monte Carlo standard error of a 0.5 rate:", np.sqrt(0.25 / 2000).round(4))

# Wald statistic with the population covariance, evaluated on a grid of means
design = TwoStateDesign(delta1=-0.3, v=0.5, state_prob=0.5, sigma2=4.0)
print("T at the design means:", round(closed_form_wald(design.delta1, design.delta2, 500, design), 2))

grid = rejection_region_grid(design, n=500, alpha=0.05, resolution=9)
codes = grid.codes()
# bit 1: first t-test rejects, bit 2: second t-test rejects, bit 4: Wald rejects
for row in codes[::-1]:
    print(" ".join(f"{c:d}" for c in row))
