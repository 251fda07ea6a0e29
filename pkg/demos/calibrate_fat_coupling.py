"""
Calibrating the fat/tumour coupling
===================================

The fat growth boost ``c1`` and the fat loss ``c2`` have no published numeric
values. ``c2`` is bounded by requiring fat to keep growing while the untreated
tumour approaches its carrying capacity; ``c1`` is then fitted so that the
chemo-only optimal cost at alpha = 0.9, gamma1 = 0.1 matches its reference
value. Each anchor solve takes under a minute, brentq needs about ten.
"""

import warnings

import numpy as np

from fraccancer import C1_DEFAULT, C2_DEFAULT, DEFAULT_X0, ControlSchedule, Grid, ModelParams, solve_state
from fraccancer.reproduction import ANCHOR, REFERENCE_COSTS, anchor_cost, calibrate_fat_coupling

warnings.simplefilter("ignore")

# Untreated, the fat boost lifts the tumour plateau well above 1/p. Fat keeps
# growing only while its net rate d - c2*T stays positive (both raised to
# alpha), which caps c2. The largest order has the highest plateau.
grid = Grid.from_step(120.0, 0.25)
for alpha in (0.8, 0.9, 0.95):
    p = ModelParams(alpha=alpha, c1=C1_DEFAULT, c2=C2_DEFAULT)
    T_end = solve_state(p, ControlSchedule.constant(grid, 0, 0), DEFAULT_X0, grid).T[-1]
    c2_max = (p.rates.d / T_end) ** (1 / alpha)
    print(f"alpha = {alpha}: untreated T(120) = {T_end:.3e}, so c2 < {c2_max:.1e}")
print(f"we use c2 = {C2_DEFAULT:g}")

# The anchor cost is monotone in c1 across the bracket.
for c1 in (0.2, 0.25, 0.3, 0.35):
    print(f"c1 = {c1:.2f}: J = {anchor_cost(c1):.4f}")

c1 = calibrate_fat_coupling()
print(f"fitted c1 = {c1:.7f} reproduces J = {anchor_cost(c1):.4f} (target {REFERENCE_COSTS[ANCHOR]})")
print("rounded default:", np.round(c1, 7))
