"""Quantum states as ensembles of physical states.

A :class:`QuantumState` holds a density operator. It gives the linear
quantum average ``Tr(rho A)`` directly, and it is also a sampling measure
over physical states: in a context with basis ``u_k`` the state with index
``k`` is drawn with Born weight ``<u_k|rho|u_k>``. Averaging sampled
valuations converges to the linear average.
"""

from dataclasses import dataclass, field

import numpy as np

from . import algebra
from .context import context_of
from .errors import DimensionError, NotPositiveError
from .rng import Moments, pairwise_merge, run_partitioned
from .valuation import PhysicalState, PhysicalStateBatch, evaluate_batch

STATE_TOL = 1e-10
CBS_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class QuantumState:
    """Density operator: hermitian, unit trace, positive semidefinite."""

    rho: np.ndarray = field(repr=False)

    def __post_init__(self):
        rho = algebra.as_observable(self.rho, tol=STATE_TOL).copy()
        tr = np.trace(rho)
        if abs(tr - 1) > STATE_TOL:
            raise ValueError(f"density operator must have unit trace, got {tr:.12g}")
        w = np.linalg.eigvalsh(rho)
        if w[0] < -STATE_TOL:
            raise NotPositiveError(f"density operator has negative eigenvalue {w[0]:.3e}")
        rho.setflags(write=False)
        object.__setattr__(self, "rho", rho)

    @classmethod
    def pure(cls, vector):
        v = np.asarray(vector, dtype=complex).ravel()
        v = v / np.linalg.norm(v)
        return cls(np.outer(v, v.conj()))

    @classmethod
    def maximally_mixed(cls, d):
        return cls(np.eye(d, dtype=complex) / d)

    @classmethod
    def from_density(cls, rho):
        """Normalise trace and symmetrise before validating."""
        rho = np.asarray(rho, dtype=complex)
        rho = (rho + rho.conj().T) / 2
        return cls(rho / np.trace(rho).real)

    @property
    def dim(self):
        return self.rho.shape[0]

    @property
    def rank(self):
        return int(np.sum(np.linalg.eigvalsh(self.rho) > STATE_TOL))


@dataclass(frozen=True)
class SampleReport:
    estimate: float
    n: int
    stderr: float

    @classmethod
    def from_moments(cls, m):
        return cls(m.mean, m.n, m.stderr)

    def within(self, exact, k=4.0):
        """True iff ``|estimate - exact| <= k * stderr`` (exact match if stderr is 0)."""
        return abs(self.estimate - exact) <= k * self.stderr + 1e-12


def _check_dims(psi, d):
    if psi.dim != d:
        raise DimensionError(f"state dim {psi.dim} != {d}")


def born_probabilities(psi, c):
    """Born weights ``<u_k|rho|u_k>`` over the basis of context ``c``."""
    _check_dims(psi, c.dim)
    u = c.basis
    p = np.einsum("ik,ij,jk->k", u.conj(), psi.rho, u).real
    p = np.clip(p, 0.0, None)
    return p / p.sum()


def _inverse_cdf(p, uniforms):
    cdf = np.cumsum(p)
    last = int(np.flatnonzero(p > 0)[-1])
    cdf[last:] = 1.0
    return np.searchsorted(cdf, uniforms, side="right")


def sample_outcomes(psi, c, n, rng):
    """``n`` outcome indices drawn from the Born weights."""
    return _inverse_cdf(born_probabilities(psi, c), rng.random(n))


def sample_physical_states(psi, c, n, rng):
    """A batch of ``n`` fresh physical states in context ``c``."""
    return PhysicalStateBatch(c, sample_outcomes(psi, c, n, rng))


def sample_physical_state(psi, c, rng):
    """One fresh physical state in context ``c`` drawn from ``psi``."""
    k = int(sample_outcomes(psi, c, 1, rng)[0])
    return PhysicalState(c, k)


def monte_carlo_average(psi, a, n, rng, partitions=1, audit=None):
    """Average of ``a`` over ``n`` physical states sampled in ``context_of(a)``.

    Each partition uses its own derived stream, so the result depends only
    on the generator and ``partitions``.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    a = algebra.as_observable(a)
    c = context_of(a)
    _check_dims(psi, c.dim)

    def chunk(count, sub):
        batch = sample_physical_states(psi, c, count, sub)
        return Moments.of(evaluate_batch(batch, a, audit=audit))

    return SampleReport.from_moments(pairwise_merge(run_partitioned(chunk, n, rng, partitions)))


def quantum_average(psi, a):
    """The linear functional ``Tr(rho a)``, complex for non-hermitian ``a``."""
    a = algebra.as_element(a)
    _check_dims(psi, a.shape[0])
    return complex(np.einsum("ij,ji->", psi.rho, a))


@dataclass
class CbsReport:
    lhs: float
    rhs: float
    tol: float = CBS_TOL

    @property
    def ok(self):
        return self.lhs <= self.rhs + self.tol

    @property
    def slack(self):
        return self.rhs - self.lhs


def check_cbs(psi, r, s):
    """Cauchy-Bunyakovsky-Schwarz: ``|Psi(r*s)|^2 <= Psi(r*r) Psi(s*s)``."""
    r, s = algebra.as_element(r), algebra.as_element(s)
    rh = r.conj().T
    lhs = abs(quantum_average(psi, rh @ s)) ** 2
    rhs = quantum_average(psi, rh @ r).real * quantum_average(psi, s.conj().T @ s).real
    return CbsReport(lhs, rhs)


def norm_from_states(r, states):
    """``sup Psi(r* r)`` over the given states, square-rooted."""
    r = algebra.as_element(r)
    rr = r.conj().T @ r
    return float(np.sqrt(max(quantum_average(psi, rr).real for psi in states)))


def eigenstates(a):
    """Pure states along the eigenvectors of observable ``a`` (ascending order)."""
    _, v = algebra.spectral(a)
    return [QuantumState.pure(v[:, k]) for k in range(v.shape[1])]


def state_of_context(c, k):
    """The pure state of basis vector ``k`` of context ``c``."""
    return QuantumState.pure(c.basis[:, k])

