"""Heisenberg-picture dynamics with hbar = 1.

Observables obey ``dA/dt = i [H, A]``, i.e. ``A(t) = e^{iHt} A e^{-iHt}``.
A physical state prepared at t = 0 is carried along by evaluating it on the
evolved observable, and contexts are transported by ``U -> e^{-iHt} U``.
"""

import numpy as np

from . import algebra
from .context import Context
from .errors import DimensionError
from .valuation import evaluate


def as_hamiltonian(h):
    return algebra.as_observable(h)


def propagator(h, t):
    """``e^{-iHt}`` from the spectral decomposition of ``h``."""
    w, v = algebra.spectral(as_hamiltonian(h))
    return (v * np.exp(-1j * w * t)) @ v.conj().T


def heisenberg_evolve(a, h, t):
    """``A(t) = e^{iHt} A e^{-iHt}``."""
    a = algebra.as_observable(a)
    h = as_hamiltonian(h)
    if a.shape != h.shape:
        raise DimensionError(f"observable dim {a.shape[0]} != hamiltonian dim {h.shape[0]}")
    u = propagator(h, t)
    at = u.conj().T @ a @ u
    return (at + at.conj().T) / 2


def schrodinger_evolve(rho, h, t):
    """``e^{-iHt} rho e^{iHt}`` for a density matrix (array or state)."""
    rho = np.asarray(getattr(rho, "rho", rho), dtype=complex)
    u = propagator(h, t)
    return u @ rho @ u.conj().T


def evolve_physical_state_value(phi0, a, h, t):
    """``phi_t(A) = phi_0(A(t))``; raises if ``phi0`` is not relevant for ``A(t)``."""
    return evaluate(phi0, heisenberg_evolve(a, h, t))


def evolve_context(c, h, t):
    """Transport a context: basis ``e^{-iHt} U``, phases re-canonicalised.

    ``A(t)`` is diagonal in ``c`` exactly when ``A`` is diagonal in the
    transported context.
    """
    if c.dim != np.shape(h)[0]:
        raise DimensionError(f"context dim {c.dim} != hamiltonian dim {np.shape(h)[0]}")
    return Context.from_basis(propagator(h, t) @ c.basis)
