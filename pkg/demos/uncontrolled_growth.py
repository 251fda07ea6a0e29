"""
Untreated dynamics
==================

Without treatment the tumour grows monotonically toward its carrying
capacity while the immune population levels off. Larger fractional orders
carry less memory and approach the integer-order behaviour.
"""

import numpy as np

from fraccancer import C1_DEFAULT, C2_DEFAULT, DEFAULT_X0, ControlSchedule, Grid, ModelParams, solve_state

grid = Grid.from_step(120.0, 0.25)
off = ControlSchedule.constant(grid, 0.0, 0.0)

for alpha in (0.8, 0.9, 0.95):
    params = ModelParams(alpha=alpha, c1=C1_DEFAULT, c2=C2_DEFAULT)
    traj = solve_state(params, off, DEFAULT_X0, grid)
    rows = np.searchsorted(grid.times, [0, 20, 40, 60, 80, 100, 120])
    print(f"\nalpha = {alpha}")
    print("    t            T          I          F")
    for k in rows:
        print(f"{grid.times[k]:5.0f} {traj.T[k]:12.4e} {traj.I[k]:10.5f} {traj.F[k]:10.5f}")
    print("T monotone:", bool(np.all(np.diff(traj.T) >= 0)))
