"""GNS representation of M_d(C) built from a state.

The algebra is given the (semi-)inner product ``<R, S> = Psi(R* S)``. In
the matrix-unit basis ``E_jk`` this is a d^2 x d^2 Gram matrix ``G``. The
eigenvectors of ``G`` with non-negligible eigenvalues give an orthonormal
basis of the quotient by the null space, left multiplication descends to
the quotient, and the class of the unit is the cyclic vector.
"""

from dataclasses import dataclass, field

import numpy as np

from . import algebra
from .ensemble import QuantumState, quantum_average
from .errors import GnsCheckError, NumericalError
from .rng import random_element

NULL_TOL = 1e-10
INDEFINITE_TOL = 1e-9
CHECK_TOL = 1e-8


def matrix_units(d):
    """The d^2 matrix units ``E_jk`` in row-major order."""
    units = np.zeros((d * d, d, d), dtype=complex)
    for j in range(d):
        for k in range(d):
            units[j * d + k, j, k] = 1.0
    return units


def gram_matrix(psi, basis=None):
    """``G[r, s] = Psi(B_r* B_s)`` over a list of algebra elements."""
    if basis is None:
        basis = matrix_units(psi.dim)
    n = len(basis)
    g = np.empty((n, n), dtype=complex)
    for r in range(n):
        br = basis[r].conj().T
        for s in range(n):
            g[r, s] = quantum_average(psi, br @ basis[s])
    return g


@dataclass(frozen=True, eq=False)
class GnsRepresentation:
    """A cyclic representation ``(pi, H, Omega)`` of M_d(C).

    Vectors of H are coordinates in an orthonormal basis of the quotient
    space; ``basis_map[i]`` is an algebra element whose class is the i-th
    basis vector. ``unit_images[r]`` is ``pi(E_r)`` for the r-th matrix unit.
    """

    source_dim: int
    rep_dim: int
    basis_map: np.ndarray = field(repr=False)
    unit_images: np.ndarray = field(repr=False)
    cyclic_vector: np.ndarray = field(repr=False)
    _coords: np.ndarray = field(repr=False)

    def vector(self, r):
        """Coordinates of the class ``[r]`` of an algebra element."""
        r = algebra.as_element(r)
        return self._coords @ r.reshape(-1)

    def pi(self, r):
        """The operator ``pi(r)`` on the representation space."""
        r = algebra.as_element(r)
        return np.tensordot(r.reshape(-1), self.unit_images, axes=1)

    def expectation(self, r):
        """``<Omega, pi(r) Omega>``."""
        om = self.cyclic_vector
        return complex(np.vdot(om, self.pi(r) @ om))


def gns_construct(psi):
    """Build the GNS representation of ``psi``.

    Raises
    ------
    NumericalError
        If the Gram matrix has an eigenvalue below ``-INDEFINITE_TOL``.
    """
    if not isinstance(psi, QuantumState):
        psi = QuantumState(psi)
    d = psi.dim
    units = matrix_units(d)
    g = gram_matrix(psi, units)
    g = (g + g.conj().T) / 2
    w, v = np.linalg.eigh(g)
    if w[0] < -INDEFINITE_TOL:
        raise NumericalError(f"Gram matrix is indefinite (eigenvalue {w[0]:.3e})")
    keep = w > NULL_TOL
    w, v = w[keep], v[:, keep]
    m = w.size
    # element r (row-major vector) -> quotient coordinates
    coords = np.sqrt(w)[:, None] * v.conj().T
    lift = v / np.sqrt(w)[None, :]
    basis_map = np.stack([lift[:, i].reshape(d, d) for i in range(m)]) if m else np.zeros((0, d, d))
    images = np.empty((d * d, m, m), dtype=complex)
    for r, e in enumerate(units):
        # left multiplication by e on row-major vectors is kron(e, I)
        images[r] = coords @ np.kron(e, np.eye(d)) @ lift
    omega = coords @ np.eye(d, dtype=complex).reshape(-1)
    return GnsRepresentation(d, m, basis_map, images, omega, coords)


@dataclass
class GnsReport:
    trials: int
    homomorphism: float = 0.0
    star: float = 0.0
    state: float = 0.0
    cyclic_rank: int = 0
    rep_dim: int = 0
    norm: float = 0.0
    normalization: float = 0.0
    tol: float = CHECK_TOL

    def failures(self):
        bad = [
            name
            for name in ("homomorphism", "star", "state", "normalization")
            if getattr(self, name) > self.tol
        ]
        if self.cyclic_rank != self.rep_dim:
            bad.append("cyclicity")
        return bad

    @property
    def ok(self):
        return not self.failures()


def verify_gns(rep, psi, trials, rng, strict=True):
    """Check a representation against the state it was built from.

    Over ``trials`` random pairs ``(R, S)`` records the worst deviation of
    ``pi(RS) = pi(R) pi(S)``, ``pi(R*) = pi(R)^dagger`` and
    ``<Omega, pi(R) Omega> = Psi(R)``; also checks ``<Omega, Omega> = 1`` and
    that ``{pi(E_r) Omega}`` spans the space. With ``strict`` a failing check
    raises :class:`GnsCheckError` naming it.

    ``report.norm`` is the largest ``| ||pi(R)|| - ||R|| |``, which is only
    expected to vanish for faithful (full-rank) states.
    """
    d = rep.source_dim
    rep_report = GnsReport(trials=trials, rep_dim=rep.rep_dim)
    om = rep.cyclic_vector
    rep_report.normalization = float(abs(np.vdot(om, om).real - 1.0))
    for _ in range(trials):
        r, s = random_element(d, rng), random_element(d, rng)
        pr, ps = rep.pi(r), rep.pi(s)
        rep_report.homomorphism = max(rep_report.homomorphism, _maxabs(rep.pi(r @ s) - pr @ ps))
        rep_report.star = max(rep_report.star, _maxabs(rep.pi(r.conj().T) - pr.conj().T))
        rep_report.state = max(rep_report.state, abs(rep.expectation(r) - quantum_average(psi, r)))
        if rep.rep_dim:
            gap = float(abs(np.linalg.norm(pr, 2) - algebra.operator_norm(r)))
            rep_report.norm = max(rep_report.norm, gap)
    span = np.column_stack([img @ om for img in rep.unit_images]) if rep.rep_dim else np.zeros((0, 1))
    rep_report.cyclic_rank = int(np.linalg.matrix_rank(span, tol=1e-8)) if rep.rep_dim else 0
    if strict:
        for name in rep_report.failures():
            err = float(rep_report.cyclic_rank) if name == "cyclicity" else getattr(rep_report, name)
            raise GnsCheckError(name, err, rep_report.tol)
    return rep_report


def _maxabs(x):
    return float(np.max(np.abs(x))) if np.size(x) else 0.0
