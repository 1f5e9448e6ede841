"""Seeded random streams, partitioned execution and random test matrices.

Every stochastic routine takes an explicit :class:`numpy.random.Generator`.
Generators built here are Philox (counter based) instances keyed by
``(seed, label, replica)`` so independent runs never share a stream.
"""

import os
import zlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

THREADS_ENV = "QALG_THREADS"


def make_rng(seed=0, label="", replica=0):
    """Return a Philox generator for the sub-stream ``(seed, label, replica)``.

    The label is hashed with CRC-32, which is stable across processes and
    Python versions (unlike ``hash``).
    """
    seed = int(seed)
    if not 0 <= seed < 2**64:
        raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed}")
    key = (zlib.crc32(label.encode("utf-8")), int(replica))
    ss = np.random.SeedSequence(entropy=seed, spawn_key=key)
    return np.random.Generator(np.random.Philox(ss))


def worker_count():
    """Number of worker threads allowed by ``QALG_THREADS`` (0 or unset = auto)."""
    raw = os.environ.get(THREADS_ENV, "0").strip() or "0"
    try:
        n = int(raw)
    except ValueError:
        n = 0
    if n <= 0:
        n = os.cpu_count() or 1
    return n


@dataclass(frozen=True)
class Moments:
    """Count, mean and sum of squared deviations of a sample."""

    n: int
    mean: float
    m2: float

    @classmethod
    def of(cls, values):
        values = np.asarray(values, dtype=float)
        n = values.size
        if n == 0:
            return cls(0, 0.0, 0.0)
        mean = float(np.mean(values))
        m2 = float(np.sum((values - mean) ** 2))
        return cls(n, mean, m2)

    def merge(self, other):
        # Chan et al. parallel update
        if self.n == 0:
            return other
        if other.n == 0:
            return self
        n = self.n + other.n
        delta = other.mean - self.mean
        if delta == 0.0:
            mean = self.mean
        else:
            mean = self.mean + delta * other.n / n
        m2 = self.m2 + other.m2 + delta * delta * self.n * other.n / n
        return Moments(n, mean, m2)

    @property
    def stderr(self):
        if self.n < 2:
            return 0.0
        return float(np.sqrt(self.m2 / (self.n - 1) / self.n))


def pairwise_merge(moments):
    """Merge a list of :class:`Moments` by fixed-order pairwise reduction."""
    items = list(moments)
    if not items:
        return Moments(0, 0.0, 0.0)
    while len(items) > 1:
        merged = [items[i].merge(items[i + 1]) for i in range(0, len(items) - 1, 2)]
        if len(items) % 2:
            merged.append(items[-1])
        items = merged
    return items[0]


def split_counts(n, partitions):
    """Split ``n`` into ``partitions`` near-equal non-negative counts."""
    partitions = max(1, min(int(partitions), int(n))) if n > 0 else 1
    base, extra = divmod(int(n), partitions)
    return [base + (1 if i < extra else 0) for i in range(partitions)]


def run_partitioned(fn, n, rng, partitions=1):
    """Evaluate ``fn(count, sub_rng)`` over a partition of ``n`` draws.

    With one partition ``rng`` is used directly. Otherwise one child stream
    is spawned per partition; results are returned in partition order, so
    the outcome depends on ``(rng state, partitions)`` and not on how many
    threads did the work.
    """
    counts = split_counts(n, partitions)
    if len(counts) == 1:
        return [fn(counts[0], rng)]
    streams = rng.spawn(len(counts))
    workers = min(worker_count(), len(counts))
    if workers <= 1:
        return [fn(c, r) for c, r in zip(counts, streams)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, counts, streams))


# random matrices used by harnesses and tests


def random_element(d, rng, scale=1.0):
    """Complex Gaussian d x d matrix."""
    return scale * (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)


def random_hermitian(d, rng, scale=1.0):
    r = random_element(d, rng, scale)
    return (r + r.conj().T) / 2


def random_unitary(d, rng):
    """Haar-random unitary (QR with the diagonal phase correction)."""
    q, r = np.linalg.qr(random_element(d, rng))
    ph = np.diag(r) / np.abs(np.diag(r))
    return q * ph


def random_pure_vector(d, rng):
    v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return v / np.linalg.norm(v)


def random_density(d, rng, rank=None):
    """Random density matrix of the given rank (full rank by default)."""
    rank = d if rank is None else rank
    g = rng.standard_normal((d, rank)) + 1j * rng.standard_normal((d, rank))
    rho = g @ g.conj().T
    rho = (rho + rho.conj().T) / 2
    return rho / np.trace(rho).real


def random_direction(rng):
    v = rng.standard_normal(3)
    return v / np.linalg.norm(v)
