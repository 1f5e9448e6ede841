import numpy as np
import pytest

from qalg import algebra
from qalg.algebra import SIGMA_X, SIGMA_Z
from qalg.bell import singlet
from qalg.context import Context, context_of
from qalg.ensemble import (
    QuantumState,
    born_probabilities,
    check_cbs,
    eigenstates,
    monte_carlo_average,
    norm_from_states,
    quantum_average,
    sample_physical_state,
    sample_physical_states,
)
from qalg.errors import NotPositiveError
from qalg.rng import make_rng, random_density, random_element, random_hermitian, random_pure_vector

PLUS_X = QuantumState.pure([1, 1])
ZERO = QuantumState.pure([1, 0])
MIXED2 = QuantumState.maximally_mixed(2)


def brute_trace(rho, a):
    d = rho.shape[0]
    return sum(rho[i, j] * a[j, i] for i in range(d) for j in range(d))


def test_state_validation():
    with pytest.raises(ValueError):
        QuantumState(np.eye(2))
    with pytest.raises(NotPositiveError):
        QuantumState(np.diag([1.5, -0.5]))
    assert QuantumState.from_density(np.eye(3)).rank == 3
    assert PLUS_X.rank == 1


def test_born_probabilities_examples():
    np.testing.assert_allclose(born_probabilities(PLUS_X, Context.canonical(2)), [0.5, 0.5])
    np.testing.assert_array_equal(born_probabilities(ZERO, Context.canonical(2)), [1, 0])
    # singlet amplitudes in |00>,|01>,|10>,|11> are 0, 1/sqrt2, -1/sqrt2, 0
    amps = np.array([0, 1, -1, 0]) / np.sqrt(2)
    np.testing.assert_allclose(amps**2, [0, 0.5, 0.5, 0])
    np.testing.assert_allclose(born_probabilities(singlet(), Context.canonical(4)), amps**2, atol=1e-15)


def test_born_probabilities_sum_to_one(rng):
    for d in (2, 3, 7):
        psi = QuantumState.from_density(random_density(d, rng))
        p = born_probabilities(psi, context_of(random_hermitian(d, rng)))
        assert np.all(p >= 0) and abs(p.sum() - 1) <= 1e-12


def test_sample_eigenstate_is_deterministic(rng):
    batch = sample_physical_states(ZERO, Context.canonical(2), 1000, rng)
    assert np.all(batch.outcomes == 0)
    assert sample_physical_state(ZERO, Context.canonical(2), rng).outcome_index == 0


def test_sample_frequency_plus_x():
    rng = make_rng(11, "freq")
    batch = sample_physical_states(PLUS_X, Context.canonical(2), 10**6, rng)
    freq = np.mean(batch.outcomes == 0)
    assert abs(freq - 0.5) <= 3 * 0.5 / 10**3


def test_consecutive_draws_have_distinct_tags(rng):
    a = sample_physical_state(PLUS_X, Context.canonical(2), rng)
    b = sample_physical_state(PLUS_X, Context.canonical(2), rng)
    assert a.identity != b.identity


def test_monte_carlo_examples():
    rep = monte_carlo_average(ZERO, SIGMA_Z, 1000, make_rng(1, "mc"))
    assert rep.estimate == 1.0 and rep.stderr == 0.0 and rep.n == 1000

    rep = monte_carlo_average(PLUS_X, SIGMA_Z, 10**6, make_rng(2, "mc"))
    assert abs(rep.estimate) <= 3e-3

    a = SIGMA_Z + 2 * np.eye(2)
    exact = brute_trace(MIXED2.rho, a)
    assert exact == pytest.approx(2.0)
    rep = monte_carlo_average(MIXED2, a, 10**5, make_rng(3, "mc"))
    assert abs(rep.estimate - exact) <= 3 * rep.stderr


def test_monte_carlo_partitions_are_reproducible(monkeypatch):
    psi = QuantumState.from_density(random_density(3, make_rng(0, "p")))
    a = random_hermitian(3, make_rng(1, "p"))
    runs = []
    for threads in ("1", "3"):
        monkeypatch.setenv("QALG_THREADS", threads)
        runs.append(monte_carlo_average(psi, a, 10**4, make_rng(9, "part"), partitions=4))
    assert runs[0] == runs[1]
    single = monte_carlo_average(psi, a, 10**4, make_rng(9, "part"), partitions=1)
    assert single.n == runs[0].n


def test_quantum_average_examples(rng):
    for psi in (PLUS_X, ZERO, MIXED2, QuantumState.from_density(random_density(2, rng))):
        assert quantum_average(psi, np.eye(2)) == pytest.approx(1.0, abs=1e-15)
    assert quantum_average(ZERO, SIGMA_X) == 0
    zz = algebra.tensor(SIGMA_Z, SIGMA_Z)
    assert brute_trace(singlet().rho, zz) == pytest.approx(-1.0)
    assert quantum_average(singlet(), zz) == pytest.approx(-1.0, abs=1e-15)


def test_quantum_average_of_complex_element(rng):
    psi = QuantumState.from_density(random_density(3, rng))
    a, b = random_hermitian(3, rng), random_hermitian(3, rng)
    r = a + 1j * b
    assert quantum_average(psi, r) == pytest.approx(
        quantum_average(psi, a) + 1j * quantum_average(psi, b), abs=1e-14
    )
    assert quantum_average(psi, r) == pytest.approx(brute_trace(psi.rho, r), abs=1e-14)


def test_linearity_on_noncommuting_pairs(rng):
    for _ in range(50):
        d = int(rng.integers(2, 9))
        psi = QuantumState.from_density(random_density(d, rng))
        a, b = random_hermitian(d, rng), random_hermitian(d, rng)
        assert not algebra.commutes(a, b)
        lhs = quantum_average(psi, a + b)
        assert abs(lhs - quantum_average(psi, a) - quantum_average(psi, b)) <= 1e-12


def test_positivity(rng):
    for _ in range(100):
        d = int(rng.integers(1, 9))
        psi = QuantumState.from_density(random_density(d, rng, rank=int(rng.integers(1, d + 1))))
        a = random_hermitian(d, rng)
        assert quantum_average(psi, a @ a).real >= -1e-12


def test_cbs_examples(rng):
    psi = QuantumState.from_density(random_density(3, rng))
    r = random_element(3, rng)
    rep = check_cbs(psi, r, r)
    assert rep.ok and abs(rep.lhs - rep.rhs) <= 1e-12 * max(1.0, rep.rhs)

    assert quantum_average(MIXED2, SIGMA_X @ SIGMA_Z) == 0
    assert quantum_average(MIXED2, SIGMA_X @ SIGMA_X) == pytest.approx(1)
    rep = check_cbs(MIXED2, SIGMA_X, SIGMA_Z)
    assert rep.lhs == pytest.approx(0.0) and rep.rhs == pytest.approx(1.0) and rep.ok


def test_cbs_random_triples():
    rng = make_rng(3, "cbs")
    for i in range(500):
        d = 1 + i % 8
        psi = QuantumState.from_density(random_density(d, rng, rank=int(rng.integers(1, d + 1))))
        r, s = random_element(d, rng), random_element(d, rng)
        # oracle: explicit sums over matrix entries
        rs = brute_trace(psi.rho, r.conj().T @ s)
        rr = brute_trace(psi.rho, r.conj().T @ r).real
        ss = brute_trace(psi.rho, s.conj().T @ s).real
        assert abs(rs) ** 2 <= rr * ss + 1e-9
        assert check_cbs(psi, r, s).ok


def test_norm_from_pure_states(rng):
    d = 4
    r = random_element(d, rng)
    states = [QuantumState.pure(random_pure_vector(d, rng)) for _ in range(10**4)]
    sampled = norm_from_states(r, states)
    exact = algebra.operator_norm(r)
    assert sampled <= exact + 1e-12
    assert sampled >= 0.9 * exact
    attained = norm_from_states(r, eigenstates(r.conj().T @ r))
    assert attained == pytest.approx(exact, abs=1e-9)


def test_convergence_property():
    rng = make_rng(17, "convergence")
    hits = 0
    for _ in range(100):
        d = int(rng.integers(2, 9))
        psi = QuantumState.from_density(random_density(d, rng))
        a = random_hermitian(d, rng)
        rep = monte_carlo_average(psi, a, 10**5, rng)
        hits += rep.within(quantum_average(psi, a).real, 4.0)
    assert hits >= 99
