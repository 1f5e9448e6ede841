"""
Quantum states as ensembles of physical states
==============================================

Sampling physical states with Born weights and averaging their values
reproduces the linear quantum average Tr(rho A), even though each sample
is dispersion free.
"""

# %%
import numpy as np

from qalg import QuantumState, context_of, make_rng, monte_carlo_average, quantum_average
from qalg.ensemble import born_probabilities, check_cbs
from qalg.rng import random_density, random_hermitian

rng = make_rng(1, "demo-ensemble")
psi = QuantumState.from_density(random_density(4, rng))
a = random_hermitian(4, rng)
b = random_hermitian(4, rng)

# %% Born weights in the context of A
print("Born weights:", np.round(born_probabilities(psi, context_of(a)), 4))

# %% Convergence of the sample mean
exact = quantum_average(psi, a).real
for n in (10, 1000, 100_000):
    rep = monte_carlo_average(psi, a, n, rng)
    print(f"n={n:>7}: {rep.estimate:+.5f} +- {rep.stderr:.5f}   (Tr rho A = {exact:+.5f})")

# %% The average is linear even for noncommuting A and B
lhs = quantum_average(psi, a + b)
rhs = quantum_average(psi, a) + quantum_average(psi, b)
print("additivity error:", abs(lhs - rhs))

# %% Cauchy-Bunyakovsky-Schwarz
print(check_cbs(psi, a + 1j * b, b))
