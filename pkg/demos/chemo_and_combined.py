"""
Optimal chemotherapy and combined therapy
=========================================

The forward-backward sweep alternates a forward state solve, a backward
adjoint solve and a projected control update. Here we solve one cell of the
reference table for both scenarios and look at the dose schedules.
"""

import warnings

import numpy as np

from fraccancer import (
    C1_DEFAULT,
    C2_DEFAULT,
    DEFAULT_X0,
    Grid,
    ModelParams,
    default_initial_controls,
    forward_backward_sweep,
    stationarity_gap,
)

warnings.simplefilter("ignore")

grid = Grid.from_step(120.0, 0.25)
params = ModelParams(alpha=0.9, gamma1=0.1, c1=C1_DEFAULT, c2=C2_DEFAULT)

solutions = {}
for scenario in ("chemo", "combined"):
    sol = forward_backward_sweep(
        params, DEFAULT_X0, default_initial_controls(grid, scenario), grid, scenario=scenario
    )
    solutions[scenario] = sol
    gap = stationarity_gap(sol.controls, sol.adjoints, params, scenario)
    print(f"{scenario:>8}: J = {sol.cost:.4f} after {sol.sweeps_used} sweeps, stationarity gap {gap:.1e}")

# The chemo dose starts at its upper bound and tapers off once the tumour
# is under control.
u = solutions["chemo"].controls.values
for t0 in (0, 10, 20, 40, 60, 80, 100, 119):
    k = np.searchsorted(grid.times, t0)
    print(f"t = {t0:3d}: u1 = {u[k, 0]:.4f}  T = {solutions['chemo'].states.T[k]:.4e}")

# With g and h of order 1e7 the immune boost beta*D2/(g + D2) is tiny, so the
# optimal immunotherapy dose is essentially zero and both costs coincide.
u2 = solutions["combined"].controls.values[:, 1]
print("max immunotherapy dose:", u2.max())
print("J_chemo - J_combined:", solutions["chemo"].cost - solutions["combined"].cost)
