"""
Stress windows, state labels and aggregated expected shortfall
==============================================================

A volatility-like factor picks the stressed year; everything outside it is
calm. Expected-shortfall forecasts are scored with the joint VaR/ES loss and
compared state by state.
"""

import numpy as np

from cmcs import BootstrapPlan, LossPanel, McsConfig, RandomStream, cmcs_run
from cmcs.losses import HorizonEsSet, es_bcbs, find_stress_window, fz_loss, states_from_windows

rng = np.random.default_rng(5)
n = 1500
vol = np.full(n, 1.0)
vol[700:952] = 2.5
returns = vol * rng.standard_normal(n)

window = find_stress_window(vol, win_len=252, how="mean")
print("stress window:", window.start, window.stop)
states = states_from_windows({"stress": window}, n, baseline_label="calm")

# two forecasters at the 2.5% level: one tracks volatility, one does not
z_var, z_es = -1.959964, -2.337803
tracking = fz_loss(vol * z_var, vol * z_es, returns)
static = fz_loss(np.full(n, z_var), np.full(n, z_es), returns)
panel = LossPanel(np.column_stack([tracking, static]), ("tracking", "static"))
print("average loss:", dict(zip(panel.method_ids, panel.losses.mean(axis=0).round(3).tolist())))

cfg = McsConfig(0.10, BootstrapPlan(1000, stream=RandomStream(5)))
for state, res in cmcs_run(panel, states, cfg).items():
    print(f"{state:>7}: {res.surviving}")

# one ES per liquidity horizon, aggregated to a single capital figure
h = HorizonEsSet.basel([-2.3, -3.1, -4.2, -5.0, -7.4])
print("aggregated ES:", round(es_bcbs(h), 4))
