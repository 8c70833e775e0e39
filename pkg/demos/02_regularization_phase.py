"""The regularization phase theta, built numerically and checked two ways.

theta is fixed by a continuity relation: the gradient of theta, weighted by
the density, balances how the density shifts when the control parameter
moves.  For the box modes the construction collapses to the closed form
theta = (m/2 hbar) x^2 / L for every level n, and for the oscillator ground
state the gradient is x/R.  The continuity residual is the pointwise check
that the numeric pipeline actually satisfies the defining relation.
"""

import numpy as np

from ffqd.core import Grid
from ffqd.fastforward import continuity_residual, dtheta_dx_numeric, theta_numeric
from ffqd.spectra import HarmonicModel

L = 1.0
grid = Grid(0.0, L, 2048)

print("box modes: theta vs (1/2) x^2/L (natural units)")
for n in range(1, 6):
    amp = lambda l, n=n: np.sqrt(2.0 / l) * np.sin(n * np.pi * grid.points / l)
    theta = theta_numeric(amp, L, grid)
    err = np.max(np.abs(theta - 0.5 * grid.points**2 / L))
    resid = np.max(np.abs(continuity_residual(amp, L, grid)))
    print(f"  n={n}: max|theta - closed form| = {err:.2e}   continuity residual = {resid:.2e}")

print("\noscillator ground state: d_x theta vs x/R")
model = HarmonicModel()
R = 1.0
gridh = Grid(-8.0, 8.0, 2048)
amp_h = lambda l: model.amplitudes(0, l, gridh)[0]
dtheta = dtheta_dx_numeric(amp_h, R, gridh)
bulk = np.abs(gridh.points) <= 2.5
print(f"  max|d_x theta - x/R| over |x|<2.5: {np.max(np.abs(dtheta[bulk] - gridh.points[bulk]/R)):.2e}")
rho = amp_h(R) ** 2
resid = continuity_residual(amp_h, R, gridh)
print(f"  density-weighted residual integral: {np.trapezoid(np.abs(resid)*rho, dx=gridh.dx):.2e}")

try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(5.5, 3.5))
    amp3 = lambda l: np.sqrt(2.0 / l) * np.sin(3 * np.pi * grid.points / l)
    ax.plot(grid.points, theta_numeric(amp3, L, grid), label="numeric (n=3)")
    ax.plot(grid.points, 0.5 * grid.points**2 / L, "--", label="closed form")
    ax.set_xlabel("x")
    ax.set_ylabel("theta")
    ax.legend()
    fig.tight_layout()
    fig.savefig("demo_02_theta.png", dpi=120)
    print("\nwrote demo_02_theta.png")
except ImportError:
    pass
