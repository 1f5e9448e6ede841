"""Maximal commuting sets, stored as orthonormal bases.

In M_d(C) a maximal abelian *-subalgebra is the algebra of matrices that
are diagonal in some orthonormal basis, so a :class:`Context` is just that
basis (the columns of a unitary matrix).
"""

from dataclasses import dataclass, field

import numpy as np

from . import algebra
from .errors import ContextualityError, DimensionError, NumericalError

RELEVANCE_TOL = 1e-10
UNITARITY_TOL = 1e-10
SIMDIAG_SEED = 0x5EED
SIMDIAG_ATTEMPTS = 8


@dataclass(frozen=True, eq=False)
class Context:
    """An orthonormal basis whose diagonal algebra is a maximal commuting set.

    Use :meth:`from_basis` to build one from arbitrary unitary columns; it
    applies the phase convention and validates unitarity.
    """

    basis: np.ndarray = field(repr=False)

    def __post_init__(self):
        u = np.array(self.basis, dtype=complex)
        if u.ndim != 2 or u.shape[0] != u.shape[1]:
            raise DimensionError(f"context basis must be square, got {u.shape}")
        dev = float(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))))
        if dev > UNITARITY_TOL:
            raise NumericalError(f"context basis is not unitary (deviation {dev:.2e})")
        u.setflags(write=False)
        object.__setattr__(self, "basis", u)

    @classmethod
    def from_basis(cls, u):
        return cls(algebra.fix_phases(np.asarray(u, dtype=complex)))

    @classmethod
    def canonical(cls, d):
        return cls(np.eye(d, dtype=complex))

    @property
    def dim(self):
        return self.basis.shape[0]

    def vector(self, k):
        return self.basis[:, k].copy()

    def rotate(self, a):
        """``U* a U``: the element expressed in this basis."""
        a = algebra.as_element(a)
        if a.shape[0] != self.dim:
            raise DimensionError(f"element dim {a.shape[0]} != context dim {self.dim}")
        u = self.basis
        return u.conj().T @ a @ u

    def projector(self, k):
        u = self.basis[:, k]
        return np.outer(u, u.conj())

    def same_algebra(self, other, tol=1e-9):
        """True iff both bases span the same diagonal algebra.

        That holds exactly when the overlap matrix ``|U1* U2|`` is a
        permutation matrix, i.e. the columns agree up to order and phase.
        """
        if self.dim != other.dim:
            return False
        overlap = np.abs(self.basis.conj().T @ other.basis)
        perm = np.argmax(overlap, axis=1)
        if len(set(perm.tolist())) != self.dim:
            return False
        target = np.zeros_like(overlap)
        target[np.arange(self.dim), perm] = 1.0
        return float(np.max(np.abs(overlap - target))) <= tol

    def __eq__(self, other):
        if not isinstance(other, Context):
            return NotImplemented
        return self.basis.shape == other.basis.shape and np.array_equal(self.basis, other.basis)

    def __hash__(self):
        return hash((self.basis.shape, self.basis.tobytes()))


def off_diagonal_max(a, c):
    m = c.rotate(a)
    return float(np.max(np.abs(m - np.diag(np.diag(m))))) if m.shape[0] > 1 else 0.0


def is_diagonal_in(a, c, tol=RELEVANCE_TOL):
    """True iff every off-diagonal entry of ``U* a U`` is at most ``tol``."""
    return off_diagonal_max(a, c) <= tol


def context_of(a):
    """The context of eigenvectors of ``a`` (degenerate spaces completed canonically)."""
    _, v = algebra.spectral(a)
    return Context(v)


def _canonical_order(obs):
    # sort by raw bytes so the result does not depend on input order
    return sorted(obs, key=lambda m: m.tobytes())


def common_context(observables):
    """A context diagonalising every observable in the list.

    A generic real combination of the inputs is diagonalised, then each
    input is checked for diagonality. The coefficients come from a fixed
    seed, and the inputs are put in a canonical order first, so the result
    is reproducible and independent of the input order.

    Raises
    ------
    ContextualityError
        If some pair of inputs does not commute.
    NumericalError
        If no combination separates the joint eigenspaces after
        ``SIMDIAG_ATTEMPTS`` tries.
    """
    obs = [algebra.as_observable(a) for a in observables]
    if not obs:
        raise ValueError("common_context needs at least one observable")
    d = obs[0].shape[0]
    for a in obs:
        if a.shape[0] != d:
            raise DimensionError("observables of different dimensions")
    for i in range(len(obs)):
        for j in range(i + 1, len(obs)):
            if not algebra.commutes(obs[i], obs[j]):
                raise ContextualityError(
                    f"observables {i} and {j} do not commute; no common context exists"
                )
    obs = _canonical_order(obs)
    if len(obs) == 1:
        return context_of(obs[0])
    scale = max(algebra.operator_norm(a) for a in obs) or 1.0
    rng = np.random.default_rng(SIMDIAG_SEED)
    for _ in range(SIMDIAG_ATTEMPTS):
        coeffs = rng.uniform(0.5, 1.5, size=len(obs)) * rng.choice([-1.0, 1.0], size=len(obs))
        combo = sum(c * a for c, a in zip(coeffs, obs)) / scale
        combo = (combo + combo.conj().T) / 2
        ctx = context_of(combo)
        if all(is_diagonal_in(a, ctx) for a in obs):
            return ctx
    raise NumericalError("simultaneous diagonalisation failed")
