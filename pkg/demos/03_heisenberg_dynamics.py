"""
Heisenberg dynamics and transported contexts
============================================

Observables evolve as A(t) = exp(iHt) A exp(-iHt). A physical state
prepared at t = 0 is evaluated on A(t), and its context moves with
U -> exp(-iHt) U.
"""

# %%
import numpy as np

from qalg import SIGMA_X, SIGMA_Y, SIGMA_Z, Context, PhysicalState, context_of
from qalg.dynamics import evolve_context, evolve_physical_state_value, heisenberg_evolve

omega = 1.0
h = omega / 2 * SIGMA_Z

# %% Spin precession
for t in np.linspace(0, np.pi, 5):
    at = heisenberg_evolve(SIGMA_X, h, t)
    closed = np.cos(omega * t) * SIGMA_X - np.sin(omega * t) * SIGMA_Y
    print(f"t={t:.3f}  max|A(t) - closed form| = {np.max(np.abs(at - closed)):.1e}")

# %% A state prepared in the context of sigma_x(t) gives definite values at t
t = 0.6
c = context_of(heisenberg_evolve(SIGMA_X, h, t))
print([evolve_physical_state_value(PhysicalState(c, k), SIGMA_X, h, t) for k in range(2)])

# %% Rotating the canonical context by a quarter turn about y gives the sigma_x context
moved = evolve_context(Context.canonical(2), SIGMA_Y, np.pi / 4)
print("same algebra as context of sigma_x:", moved.same_algebra(context_of(SIGMA_X)))
