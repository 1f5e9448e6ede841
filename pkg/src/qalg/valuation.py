"""Physical states: contextual, dispersion-free valuations.

A :class:`PhysicalState` is a context, one index into its basis, and a
process-unique identity tag. Evaluating it on an observable that is
diagonal in the context reads off the selected diagonal entry, which is an
eigenvalue. Evaluating it on anything else raises
:class:`~qalg.errors.IrrelevantStateError`: the state is simply not a
relevant state for that observable.
"""

import itertools
import threading
from dataclasses import dataclass, field

import numpy as np

from . import algebra
from .context import Context, is_diagonal_in, off_diagonal_max, RELEVANCE_TOL
from .errors import ContextualityError, DimensionError, IrrelevantStateError, ModelInvariantError

POSTULATE_TOL = 1e-9
REAL_TOL = 1e-9

_identity_lock = threading.Lock()
_identity_counter = itertools.count(1)


def reserve_identities(n):
    """Atomically reserve ``n`` consecutive identity tags; returns the first."""
    global _identity_counter
    if n < 1:
        raise ValueError("must reserve at least one identity")
    with _identity_lock:
        first = next(_identity_counter)
        _identity_counter = itertools.count(first + n)
    return first


@dataclass(frozen=True)
class PhysicalState:
    context: Context = field(repr=False)
    outcome_index: int
    identity: int = field(default_factory=lambda: reserve_identities(1))

    def __post_init__(self):
        if not 0 <= self.outcome_index < self.context.dim:
            raise ValueError(f"outcome index {self.outcome_index} outside [0, {self.context.dim})")

    @property
    def dim(self):
        return self.context.dim


@dataclass(frozen=True, eq=False)
class PhysicalStateBatch:
    """Many physical states sharing one context, with a contiguous tag block.

    Indexing yields individual :class:`PhysicalState` objects carrying the
    same identities, so batch and scalar code agree.
    """

    context: Context = field(repr=False)
    outcomes: np.ndarray = field(repr=False)
    first_identity: int = 0

    def __post_init__(self):
        k = np.array(self.outcomes, dtype=np.int64)
        if k.ndim != 1 or k.size == 0:
            raise ValueError("a batch holds a non-empty 1-d array of outcome indices")
        if k.min() < 0 or k.max() >= self.context.dim:
            raise ValueError("outcome index outside the context dimension")
        k.setflags(write=False)
        object.__setattr__(self, "outcomes", k)
        if self.first_identity == 0:
            object.__setattr__(self, "first_identity", reserve_identities(k.size))

    def __len__(self):
        return self.outcomes.size

    def __getitem__(self, i):
        i = range(len(self))[i]
        return PhysicalState(self.context, int(self.outcomes[i]), self.first_identity + i)

    def __iter__(self):
        return (self[i] for i in range(len(self)))

    @property
    def identities(self):
        return np.arange(self.first_identity, self.first_identity + len(self), dtype=np.int64)

    @property
    def identity_range(self):
        return (self.first_identity, self.first_identity + len(self))


def is_relevant(phi, a):
    """True iff ``a`` is diagonal in the context of ``phi``."""
    a = algebra.as_element(a)
    if a.shape[0] != phi.context.dim:
        raise DimensionError(f"observable dim {a.shape[0]} != state dim {phi.context.dim}")
    return is_diagonal_in(a, phi.context)


def _relevant_diagonal(context, a):
    a = algebra.as_observable(a)
    if a.shape[0] != context.dim:
        raise DimensionError(f"observable dim {a.shape[0]} != state dim {context.dim}")
    m = context.rotate(a)
    off = float(np.max(np.abs(m - np.diag(np.diag(m))))) if m.shape[0] > 1 else 0.0
    if off > RELEVANCE_TOL:
        raise IrrelevantStateError(
            f"observable is not diagonal in the state's context (off-diagonal {off:.2e}); "
            "the state is not relevant for it"
        )
    diag = np.diag(m)
    if float(np.max(np.abs(diag.imag))) > REAL_TOL:
        raise IrrelevantStateError("diagonal entries are not real")
    return diag.real.copy()


def evaluate(phi, a, audit=None, label=None):
    """The value of observable ``a`` in physical state ``phi``.

    Raises :class:`IrrelevantStateError` unless ``a`` is diagonal in the
    context of ``phi``. If ``audit`` is given the evaluation is recorded.
    """
    value = float(_relevant_diagonal(phi.context, a)[phi.outcome_index])
    if audit is not None:
        audit.record((phi.identity, phi.identity + 1), a, label)
    return value


def evaluate_batch(batch, a, audit=None, label=None):
    """Values of ``a`` for every state in ``batch`` (vectorised :func:`evaluate`).

    If ``audit`` is given the evaluation is recorded in it.
    """
    values = _relevant_diagonal(batch.context, a)[batch.outcomes]
    if audit is not None:
        audit.record(batch.identity_range, a, label)
    return values


@dataclass
class PostulateReport:
    """Outcome of :func:`check_postulates`; each field is an absolute deviation."""

    unit: float
    additivity: float
    multiplicativity: float
    dispersion: float
    positivity: float
    tol: float = POSTULATE_TOL

    @property
    def ok(self):
        return all(
            x <= self.tol
            for x in (self.unit, self.additivity, self.multiplicativity, self.dispersion, self.positivity)
        )

    def failures(self):
        names = ("unit", "additivity", "multiplicativity", "dispersion", "positivity")
        return [n for n in names if getattr(self, n) > self.tol]


def check_postulates(phi, a, b, lam=None):
    """Check the valuation postulates for ``phi`` on a commuting pair.

    Checks ``phi(lam I) = lam``, additivity and multiplicativity on
    ``(a, b)``, ``phi(a^2) = phi(a)^2`` and ``phi(a^2) >= 0``.
    ``lam`` defaults to ``phi(a)``.

    Raises
    ------
    IrrelevantStateError
        If ``a`` or ``b`` is not relevant for ``phi``.
    """
    a, b = algebra.as_observable(a), algebra.as_observable(b)
    fa, fb = evaluate(phi, a), evaluate(phi, b)
    lam = fa if lam is None else float(lam)
    d = phi.context.dim
    a2 = a @ a
    f_a2 = evaluate(phi, a2)
    sym_ab = (a @ b + b @ a) / 2  # equals ab for a commuting pair
    return PostulateReport(
        unit=abs(evaluate(phi, lam * np.eye(d)) - lam),
        additivity=abs(evaluate(phi, a + b) - (fa + fb)),
        multiplicativity=abs(evaluate(phi, sym_ab) - fa * fb),
        dispersion=abs(f_a2 - fa * fa),
        positivity=max(0.0, -f_a2),
    )


class UsageAudit:
    """Records which observables were evaluated on which identity ranges.

    :meth:`check` raises if any identity was evaluated on two observables
    that do not commute, or (when labels are used) under two different
    labels, e.g. two CHSH setting pairs.
    """

    def __init__(self):
        self._entries = []  # (start, stop, label, observable)
        self._lock = threading.Lock()

    def record(self, identity_range, a, label=None):
        start, stop = identity_range
        with self._lock:
            self._entries.append((int(start), int(stop), label, np.array(a, dtype=complex)))

    def __len__(self):
        return len(self._entries)

    @property
    def identities_seen(self):
        return sum(stop - start for start, stop, *_ in self._merged_ranges())

    def _merged_ranges(self):
        spans = sorted((s, e) for s, e, *_ in self._entries)
        out = []
        for s, e in spans:
            if out and s <= out[-1][1]:
                out[-1] = (out[-1][0], max(out[-1][1], e))
            else:
                out.append((s, e))
        return out

    def overlapping_pairs(self):
        """Yield pairs of entries whose identity ranges intersect."""
        entries = sorted(self._entries, key=lambda x: x[0])
        active = []
        for cur in entries:
            active = [x for x in active if x[1] > cur[0]]
            for prev in active:
                yield prev, cur
            active.append(cur)

    def check(self, tol=RELEVANCE_TOL):
        for (s1, e1, l1, a1), (s2, e2, l2, a2) in self.overlapping_pairs():
            lo, hi = max(s1, s2), min(e1, e2)
            if l1 is not None and l2 is not None and l1 != l2:
                raise ModelInvariantError(
                    f"identities {lo}..{hi - 1} used under two settings {l1!r} and {l2!r}"
                )
            if a1.shape != a2.shape or not algebra.commutes(a1, a2, tol):
                raise ContextualityError(
                    f"identities {lo}..{hi - 1} evaluated on non-commuting observables"
                )
        return True


def irrelevance_witness(phi, observables):
    """Observables among ``observables`` for which ``phi`` is not relevant."""
    return [i for i, a in enumerate(observables) if off_diagonal_max(a, phi.context) > RELEVANCE_TOL]
