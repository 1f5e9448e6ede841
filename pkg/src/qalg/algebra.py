"""The matrix *-algebra M_d(C).

Elements are plain complex ``numpy`` arrays of shape ``(d, d)``. Functions
validate their inputs, never modify them, and return new arrays.
Observables are the hermitian elements.
"""

from typing import NamedTuple

import numpy as np

from .errors import DimensionError, NotHermitianError, NotPositiveError, NumericalError

DIM_CAP = 64
HERMITIAN_TOL = 1e-10
DEGENERACY_GAP = 1e-8
PHASE_TOL = 1e-8
PSD_TOL = 1e-10

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
for _m in (SIGMA_X, SIGMA_Y, SIGMA_Z):
    _m.setflags(write=False)


def identity(d):
    return np.eye(d, dtype=complex)


def as_element(a, cap=None):
    """Validate ``a`` as a square, finite complex matrix within the dimension cap."""
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError(f"algebra elements are square matrices, got shape {a.shape}")
    cap = DIM_CAP if cap is None else cap
    if not 1 <= a.shape[0] <= cap:
        raise DimensionError(f"dimension {a.shape[0]} outside [1, {cap}]")
    if not np.all(np.isfinite(a)):
        raise ValueError("algebra element has non-finite entries")
    return a


def is_hermitian(a, tol=HERMITIAN_TOL):
    a = as_element(a)
    return float(np.max(np.abs(a - a.conj().T))) <= tol


def as_observable(a, tol=HERMITIAN_TOL):
    """Validate ``a`` as an observable (hermitian within ``tol``, max-entry)."""
    a = as_element(a)
    dev = float(np.max(np.abs(a - a.conj().T)))
    if dev > tol:
        raise NotHermitianError(f"element is not hermitian (max deviation {dev:.2e})")
    return a


def _same_dim(a, b):
    if a.shape != b.shape:
        raise DimensionError(f"dimension mismatch: {a.shape[0]} vs {b.shape[0]}")


def add(a, b):
    a, b = as_element(a), as_element(b)
    _same_dim(a, b)
    return a + b


def mul(a, b):
    a, b = as_element(a), as_element(b)
    _same_dim(a, b)
    return a @ b


def adjoint(a):
    return as_element(a).conj().T.copy()


def commutator(a, b):
    a, b = as_element(a), as_element(b)
    _same_dim(a, b)
    return a @ b - b @ a


def commutes(a, b, tol=HERMITIAN_TOL):
    """True iff the max-entry of ``[a, b]`` is at most ``tol``."""
    return float(np.max(np.abs(commutator(a, b)))) <= tol


def tensor(a, b):
    """Kronecker product ``a (x) b``."""
    a, b = as_element(a), as_element(b)
    d = a.shape[0] * b.shape[0]
    if d > DIM_CAP:
        raise DimensionError(f"tensor product dimension {d} exceeds cap {DIM_CAP}")
    return np.kron(a, b)


def operator_norm(r):
    """Largest singular value of ``r``."""
    r = as_element(r)
    return float(np.linalg.svd(r, compute_uv=False)[0])


class SpectralDecomposition(NamedTuple):
    """Ascending eigenvalues and matching orthonormal eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self):
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def degenerate_groups(values, gap=DEGENERACY_GAP):
    """Split sorted ``values`` into runs whose consecutive gaps are below ``gap``."""
    groups, start = [], 0
    for i in range(1, len(values)):
        if values[i] - values[i - 1] >= gap:
            groups.append(slice(start, i))
            start = i
    groups.append(slice(start, len(values)))
    return groups


def fix_phases(vectors, tol=PHASE_TOL):
    """Rotate each column so its first entry of magnitude > ``tol`` is real positive."""
    out = np.array(vectors, dtype=complex)
    for k in range(out.shape[1]):
        col = out[:, k]
        idx = np.flatnonzero(np.abs(col) > tol)
        if idx.size:
            z = col[idx[0]]
            out[:, k] = col * (abs(z) / z)
    return out


def _canonical_subspace_basis(block):
    """Deterministic orthonormal basis of span(block) from projected unit vectors."""
    d, m = block.shape
    proj = block @ block.conj().T
    chosen = []
    for j in range(d):
        v = proj[:, j].copy()
        # two Gram-Schmidt passes keep the basis orthonormal to machine precision
        for _ in range(2):
            for u in chosen:
                v -= u * np.vdot(u, v)
        nv = np.linalg.norm(v)
        if nv > PHASE_TOL:
            chosen.append(v / nv)
            if len(chosen) == m:
                break
    if len(chosen) != m:
        raise NumericalError("could not complete a basis of a degenerate eigenspace")
    return np.column_stack(chosen)


def canonical_eigh(a):
    """Hermitian eigensolver with the deterministic basis convention.

    Degenerate eigenspaces (gap < ``DEGENERACY_GAP``) are re-spanned by the
    orthonormalised projections of the canonical basis vectors, in index
    order; every eigenvector then gets the phase convention of
    :func:`fix_phases`.
    """
    try:
        w, v = np.linalg.eigh(a)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigensolver failed: {exc}") from exc
    for g in degenerate_groups(w):
        if g.stop - g.start > 1:
            v[:, g] = _canonical_subspace_basis(v[:, g])
    return w, fix_phases(v)


def spectral(a):
    """Spectral decomposition of an observable with a reproducible basis."""
    a = as_observable(a)
    w, v = canonical_eigh((a + a.conj().T) / 2)
    return SpectralDecomposition(w, v)


def positive_sqrt(p):
    """The positive square root of a positive semidefinite observable.

    Eigenvalues down to ``-1e-10`` are treated as zero; anything more
    negative raises :class:`NotPositiveError`.
    """
    w, v = spectral(p)
    if w.size and w[0] < -PSD_TOL:
        raise NotPositiveError(f"element has negative eigenvalue {w[0]:.3e}")
    root = np.sqrt(np.clip(w, 0.0, None))
    s = (v * root) @ v.conj().T
    return (s + s.conj().T) / 2


def hermitian_modulus(r):
    """The hermitian element A with ``r* r = A**2`` (first algebra postulate)."""
    r = as_element(r)
    return positive_sqrt(r.conj().T @ r)


def pauli(k):
    """Pauli matrix by index 0..3 or name 'i', 'x', 'y', 'z'."""
    table = {0: np.eye(2, dtype=complex), 1: SIGMA_X, 2: SIGMA_Y, 3: SIGMA_Z}
    names = {"i": 0, "x": 1, "y": 2, "z": 3}
    k = names.get(k, k) if isinstance(k, str) else k
    return np.array(table[k])
