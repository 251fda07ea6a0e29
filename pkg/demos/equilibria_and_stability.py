"""
Equilibria and fractional stability
===================================

The tumour-free equilibrium has closed-form coordinates and eigenvalues.
Coexisting equilibria come from the positive roots of a quartic in I, whose
sign pattern (Descartes's rule) bounds how many there can be. Stability
follows the Matignon condition |arg(lambda)| > alpha*pi/2.
"""

import warnings

import numpy as np

from fraccancer import C1_DEFAULT, C2_DEFAULT, ControlSchedule, Grid, ModelParams, solve_state
from fraccancer.batch import equilibrium_report
from fraccancer.equilibria import tumor_free_equilibrium, tumor_free_stability

warnings.simplefilter("ignore")

# Reference parameters under a moderate constant dose.
params = ModelParams(alpha=0.9, c1=C1_DEFAULT, c2=C2_DEFAULT)
print(equilibrium_report(params, 0.5, 0.5))

# A synthetic parameter set with a stable tumour-free point. A perturbed
# solve contracts toward it, as the Matignon margin predicts.
stable = ModelParams(
    alpha=0.9, r=0.5, p=0.1, xi1=0.5, xi2=0.1, c1=0.05, c2=0.05, q1=0.5, q2=0.1,
    q3=0.1, s=1.0, rho=0.2, h=1.0, mu=0.3, beta=0.2, g=1.0, d=0.4, eps=0.2,
    gamma1=0.5, gamma2=0.8,
)
rep = tumor_free_stability(stable, 0.5, 0.2)
print(f"synthetic set: margin {rep.matignon_margin:.4f}, verdict {rep.verdict}")

grid = Grid.from_step(60.0, 0.1)
eq = np.asarray(tumor_free_equilibrium(stable, 0.5, 0.2).point)
kick = np.array([0.05, -0.05, 0.05, 0.02, -0.02])
traj = solve_state(stable, ControlSchedule.constant(grid, 0.5, 0.2), eq + kick, grid)
dist = np.linalg.norm(traj.values - eq, axis=1)
for t0 in (0, 5, 10, 20, 40, 60):
    k = np.searchsorted(grid.times, t0)
    print(f"t = {t0:2d}: distance {dist[k]:.3e}")
