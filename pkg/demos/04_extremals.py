"""
Extremal controls, the Hamiltonian and the free-time spiral
===========================================================

Boundary points are reached by controls that maximise a Hamiltonian at every
instant. Integrating that optimal feedback reproduces the closed-form
boundary curve, and the Hamiltonian stays constant along the way.

    python demos/04_extremals.py
"""
import numpy as np

from loewner_range import (
    ExtremalInit, ProblemParams, free_time_modulus, integrate_extremal, integrate_free_time,
    sigma_forward, solve_radius_forward,
)

z0, T = 0.65, 1.2
p = ProblemParams(z0, T)

# %%
# Closed form against the optimal-control ODE for a few labels.
for x0 in (-1.0, -0.5, 0.0, 0.5, 1.0):
    tr = integrate_extremal(z0, ExtremalInit.from_x0(x0), T)
    exact = solve_radius_forward(p, x0) * np.exp(1j * sigma_forward(p, x0))
    h = tr.aux["hamiltonian"]
    print(f"x0={x0:+.1f}: |ode - closed form| = {abs(tr.endpoint - exact):.1e}, "
          f"Re H drift = {np.ptp(h):.1e} over {tr.times.size} steps")

# %%
# Dropping the time constraint altogether, the preimages of z0 fill the disc
# outside two hyperbolic spirals. The extremal with zero Hamiltonian runs
# along one of them, with an explicit modulus.
tr = integrate_free_time(0.4, 2.0)
for k in np.linspace(0, tr.times.size - 1, 5).astype(int):
    t, w = tr.times[k], tr.points[k]
    print(f"t={t:.3f}: |w|={abs(w):.10f} formula={free_time_modulus(0.4, t):.10f} "
          f"arg={np.angle(w):.4f}")
