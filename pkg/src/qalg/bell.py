"""EPR-Bohm pair, correlation functions and the CHSH quantity.

Three models of the correlation ``E(a, b)`` for a spin singlet:

* ``exact``: the quantum average of ``A_a (x) B_b`` in the singlet.
* ``contextual``: every run draws a fresh physical state in the common
  context of ``A_a (x) I`` and ``I (x) B_b``; each state serves exactly one
  setting pair.
* ``lhv``: a local hidden-variable model with one uniform direction
  ``lam`` on the sphere per run, ``A_a = sign(a.lam)`` and
  ``B_b = -sign(b.lam)``. All four CHSH terms are averaged over the same
  ``lam`` sample, which is what bounds the CHSH value by 2.
"""

from dataclasses import dataclass, field

import numpy as np

from . import algebra
from .context import common_context
from .ensemble import QuantumState, quantum_average, sample_physical_states
from .errors import ModelInvariantError
from .rng import Moments, pairwise_merge, run_partitioned
from .valuation import UsageAudit, evaluate_batch

UNIT_TOL = 1e-12
SPIN_TOL = 1e-9
MODELS = ("exact", "contextual", "lhv")


@dataclass(frozen=True)
class Direction:
    """A unit vector in R^3."""

    vector: tuple

    def __post_init__(self):
        v = np.asarray(self.vector, dtype=float).ravel()
        if v.shape != (3,):
            raise ValueError(f"direction needs three components, got {v.shape}")
        if abs(np.linalg.norm(v) - 1.0) > UNIT_TOL:
            raise ValueError(f"direction is not a unit vector (norm {np.linalg.norm(v):.15g})")
        object.__setattr__(self, "vector", tuple(float(x) for x in v))

    @classmethod
    def normalized(cls, v):
        v = np.asarray(v, dtype=float)
        return cls(v / np.linalg.norm(v))

    @classmethod
    def from_angles(cls, theta, phi=0.0):
        """Polar angle ``theta`` from +z and azimuth ``phi`` (radians)."""
        st = np.sin(theta)
        v = np.array([st * np.cos(phi), st * np.sin(phi), np.cos(theta)])
        v[np.abs(v) < 1e-15] = 0.0  # cos(pi/2) and friends
        return cls.normalized(v)

    @classmethod
    def planar(cls, degrees):
        """Direction in the x-z plane at ``degrees`` from +z toward +x."""
        return cls.from_angles(np.deg2rad(degrees), 0.0)

    @property
    def array(self):
        return np.array(self.vector)

    def angle(self, other):
        c = float(np.clip(np.dot(self.array, other.array), -1.0, 1.0))
        return float(np.arccos(c))


AXES = {"x": Direction((1.0, 0.0, 0.0)), "y": Direction((0.0, 1.0, 0.0)), "z": Direction((0.0, 0.0, 1.0))}


def _direction(a):
    return a if isinstance(a, Direction) else Direction(a)


def spin_observable(a):
    """``a . sigma``: twice the spin projection on ``a``, eigenvalues +-1."""
    x, y, z = _direction(a).vector
    return x * algebra.SIGMA_X + y * algebra.SIGMA_Y + z * algebra.SIGMA_Z


def singlet_vector():
    return np.array([0, 1, -1, 0], dtype=complex) / np.sqrt(2)


def singlet():
    """The two-spin singlet ``(|01> - |10>)/sqrt(2)``."""
    return QuantumState.pure(singlet_vector())


def local_pair(a, b):
    """``(A_a (x) I, I (x) B_b)``, the two local observables of one setting."""
    i2 = np.eye(2, dtype=complex)
    return algebra.tensor(spin_observable(a), i2), algebra.tensor(i2, spin_observable(b))


def correlation_exact(a, b):
    """``E(a, b) = <A_a (x) B_b>`` in the singlet, which is ``-a.b``."""
    return _clip_unit(quantum_average(singlet(), algebra.tensor(spin_observable(a), spin_observable(b))).real)


def _clip_unit(x):
    return float(min(1.0, max(-1.0, x)))


def lhv_correlation_exact(a, b):
    """Closed form of the sphere model: ``-1 + 2 theta / pi``."""
    return -1.0 + 2.0 * _direction(a).angle(_direction(b)) / np.pi


def _as_spin(values):
    # spin observables have spectrum exactly {-1, +1}; snap readouts onto it
    if np.any(np.abs(np.abs(values) - 1.0) > SPIN_TOL):
        raise ModelInvariantError("spin readout is not +-1")
    return np.where(values > 0, 1.0, -1.0)


@dataclass
class CorrelationRecord:
    a: Direction
    b: Direction
    estimate: float
    exact: float
    n: int
    stderr: float
    model: str = "contextual"


def correlation_contextual(a, b, n, rng, partitions=1, audit=None, psi=None):
    """Estimate ``E(a, b)`` from ``n`` fresh physical states.

    The states live in the common context of ``A_a (x) I`` and
    ``I (x) B_b``; their identities are recorded in ``audit`` under the
    setting label ``(a, b)``.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    a, b = _direction(a), _direction(b)
    psi = singlet() if psi is None else psi
    left, right = local_pair(a, b)
    ctx = common_context([left, right])
    label = (a.vector, b.vector)

    def chunk(count, sub):
        batch = sample_physical_states(psi, ctx, count, sub)
        va = _as_spin(evaluate_batch(batch, left, audit, label))
        vb = _as_spin(evaluate_batch(batch, right, audit, label))
        return Moments.of(va * vb)

    m = pairwise_merge(run_partitioned(chunk, n, rng, partitions))
    exact = _clip_unit(quantum_average(psi, algebra.tensor(spin_observable(a), spin_observable(b))).real)
    return CorrelationRecord(a, b, m.mean, exact, m.n, m.stderr, "contextual")


@dataclass(frozen=True)
class LhvSample:
    lam: np.ndarray = field(repr=False)
    A: float
    B: float


def sphere_points(n, rng):
    v = rng.standard_normal((n, 3))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def _sign(x):
    return np.where(x >= 0, 1.0, -1.0)


def lhv_values(lam, a, b):
    """``A_a(lam) = sign(a.lam)``, ``B_b(lam) = -sign(b.lam)``, sign(0) = +1."""
    return _sign(lam @ _direction(a).array), -_sign(lam @ _direction(b).array)


def lhv_sample(a, b, rng):
    lam = sphere_points(1, rng)[0]
    va, vb = lhv_values(lam, a, b)
    return LhvSample(lam, float(va), float(vb))


def correlation_lhv(a, b, n, rng, partitions=1):
    a, b = _direction(a), _direction(b)

    def chunk(count, sub):
        va, vb = lhv_values(sphere_points(count, sub), a, b)
        return Moments.of(va * vb)

    m = pairwise_merge(run_partitioned(chunk, n, rng, partitions))
    return CorrelationRecord(a, b, m.mean, lhv_correlation_exact(a, b), m.n, m.stderr, "lhv")


def correlation(a, b, model, n=1, rng=None, partitions=1, audit=None):
    if model == "exact":
        e = correlation_exact(a, b)
        return CorrelationRecord(_direction(a), _direction(b), e, e, 0, 0.0, "exact")
    if model == "contextual":
        return correlation_contextual(a, b, n, rng, partitions, audit)
    if model == "lhv":
        return correlation_lhv(a, b, n, rng, partitions)
    raise ValueError(f"unknown model {model!r}; choose from {MODELS}")


@dataclass
class ChshResult:
    """``S = |E(a,b) - E(a,b')| + |E(a',b) + E(a',b')|`` with its terms."""

    value: float
    stderr: float
    model: str
    n: int
    records: list = field(repr=False, default_factory=list)

    def __float__(self):
        return self.value


def chsh_value(e_ab, e_abp, e_apb, e_apbp):
    return abs(e_ab - e_abp) + abs(e_apb + e_apbp)


def chsh(a, ap, b, bp, model="exact", n=1, rng=None, partitions=1, audit=None):
    """CHSH quantity for settings ``a, a'`` (left) and ``b, b'`` (right).

    ``contextual`` draws an independent batch of physical states for each of
    the four setting pairs and checks with a :class:`UsageAudit` that no
    identity is shared between pairs. ``lhv`` uses one shared sample of
    hidden parameters for all four terms; its standard error comes from the
    per-sample combination ``s1 (AB - AB') + s2 (A'B + A'B')``.
    """
    a, ap, b, bp = (_direction(x) for x in (a, ap, b, bp))
    pairs = [(a, b), (a, bp), (ap, b), (ap, bp)]
    if model == "exact":
        es = [correlation_exact(x, y) for x, y in pairs]
        return ChshResult(chsh_value(*es), 0.0, model, 0, [correlation(x, y, "exact") for x, y in pairs])
    if n < 1:
        raise ValueError("n must be at least 1")
    if model == "contextual":
        audit = UsageAudit() if audit is None else audit
        subs = rng.spawn(4)
        recs = [correlation_contextual(x, y, n, r, partitions, audit) for (x, y), r in zip(pairs, subs)]
        audit.check()
        es = [r.estimate for r in recs]
        err = float(np.sqrt(sum(r.stderr**2 for r in recs)))
        return ChshResult(chsh_value(*es), err, model, n, recs)
    if model == "lhv":
        return _chsh_lhv(pairs, n, rng, partitions)
    raise ValueError(f"unknown model {model!r}; choose from {MODELS}")


def _chsh_lhv(pairs, n, rng, partitions):
    def chunk(count, sub):
        lam = sphere_points(count, sub)
        prods = []
        for x, y in pairs:
            va, vb = lhv_values(lam, x, y)
            prods.append(va * vb)
        return [Moments.of(p) for p in prods], prods

    parts = run_partitioned(chunk, n, rng, partitions)
    terms = [pairwise_merge([p[0][i] for p in parts]) for i in range(4)]
    es = [t.mean for t in terms]
    s1 = 1.0 if es[0] - es[1] >= 0 else -1.0
    s2 = 1.0 if es[2] + es[3] >= 0 else -1.0
    combined = pairwise_merge(
        [Moments.of(s1 * (p[1][0] - p[1][1]) + s2 * (p[1][2] + p[1][3])) for p in parts]
    )
    recs = [
        CorrelationRecord(x, y, t.mean, lhv_correlation_exact(x, y), t.n, t.stderr, "lhv")
        for (x, y), t in zip(pairs, terms)
    ]
    return ChshResult(chsh_value(*es), combined.stderr, "lhv", n, recs)


@dataclass
class EprReport:
    axis: Direction
    n: int
    anticorrelated: int

    @property
    def violations(self):
        return self.n - self.anticorrelated

    @property
    def ok(self):
        return self.violations == 0


def epr_anticorrelation(axis, n, rng, strict=True, partitions=1, audit=None):
    """Measure both spins along ``axis`` in ``n`` fresh physical states.

    Every run must give ``A = -B`` exactly; with ``strict`` any violation
    raises :class:`ModelInvariantError`.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    axis = AXES.get(axis, axis) if isinstance(axis, str) else _direction(axis)
    left, right = local_pair(axis, axis)
    ctx = common_context([left, right])
    psi = singlet()
    label = ("epr", axis.vector)

    def chunk(count, sub):
        batch = sample_physical_states(psi, ctx, count, sub)
        va = _as_spin(evaluate_batch(batch, left, audit, label))
        vb = _as_spin(evaluate_batch(batch, right, audit, label))
        return int(np.sum(va == -vb))

    good = sum(run_partitioned(chunk, n, rng, partitions))
    report = EprReport(axis, n, good)
    if strict and not report.ok:
        raise ModelInvariantError(f"{report.violations} of {n} EPR runs were not anticorrelated")
    return report
