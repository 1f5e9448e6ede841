"""
Physical states as contextual valuations
========================================

A physical state picks one joint eigenvector of a maximal commuting set
and reads off eigenvalues. It is additive and multiplicative on commuting
observables, but it is simply undefined on an observable outside its
context.
"""

# %%
import numpy as np

from qalg import SIGMA_X, SIGMA_Z, Context, PhysicalState, context_of, evaluate, tensor
from qalg.errors import IrrelevantStateError
from qalg.valuation import check_postulates

# %% A state in the sigma_z context
phi = PhysicalState(Context.canonical(2), 1)
print("phi(sigma_z)    =", evaluate(phi, SIGMA_Z))
print("phi(sigma_z^2)  =", evaluate(phi, SIGMA_Z @ SIGMA_Z))
print("phi(3 I)        =", evaluate(phi, 3 * np.eye(2)))
print(check_postulates(phi, SIGMA_Z, SIGMA_Z @ SIGMA_Z))

# %% sigma_x is not measurable in this state
try:
    evaluate(phi, SIGMA_X)
except IrrelevantStateError as exc:
    print("sigma_x:", exc)

# %% The sum sigma_z + sigma_x lives in yet another context
for obs, name in [(SIGMA_Z, "z"), (SIGMA_X, "x"), (SIGMA_Z + SIGMA_X, "z+x")]:
    c = context_of(obs)
    values = [evaluate(PhysicalState(c, k), obs) for k in range(2)]
    print(f"values of {name:>3} in its own context: {np.round(values, 6)}")
# +-1 + +-1 is never +-sqrt(2): no single valuation is linear across contexts

# %% Two spins: a product context
zz = PhysicalState(Context.canonical(4), 2)  # |10>
print("A_z (x) I:", evaluate(zz, tensor(SIGMA_Z, np.eye(2))), " I (x) B_z:", evaluate(zz, tensor(np.eye(2), SIGMA_Z)))
