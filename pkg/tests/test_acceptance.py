"""Exit criteria. Each test records one PASS/FAIL line (shown in the summary)."""

import time

import numpy as np
import pytest
from scipy.integrate import solve_ivp

from qalg import algebra, bell
from qalg.algebra import SIGMA_X, SIGMA_Y, SIGMA_Z
from qalg.bell import Direction
from qalg.cli import postulate_cases
from qalg.context import Context, common_context, context_of
from qalg.dynamics import heisenberg_evolve
from qalg.ensemble import QuantumState, monte_carlo_average, quantum_average, sample_physical_states
from qalg.errors import IrrelevantStateError, ModelInvariantError
from qalg.gns import gns_construct, verify_gns
from qalg.rng import make_rng, random_density, random_direction, random_hermitian, random_pure_vector
from qalg.valuation import PhysicalState, UsageAudit, check_postulates, evaluate, evaluate_batch

pytestmark = pytest.mark.acceptance

SEED = 2024
OPTIMAL = [Direction.planar(x) for x in (0, 90, 45, 135)]


def test_c1_correlation_law(criterion):
    rng = make_rng(SEED, "c1")
    start = time.perf_counter()
    worst = 0.0
    ok = True
    a = Direction.planar(0)
    for deg in range(0, 181, 15):
        rec = bell.correlation_contextual(a, Direction.planar(deg), 10**5, rng)
        target = -np.cos(np.deg2rad(deg))
        dev = abs(rec.estimate - target)
        ok &= dev <= 4 * rec.stderr + 1e-12
        if rec.stderr:
            worst = max(worst, dev / rec.stderr)
    elapsed = time.perf_counter() - start
    ok &= elapsed < 60
    criterion(1, "E(theta) = -cos(theta), 13 angles, n=1e5", ok,
              f"max |dev|/stderr = {worst:.2f} (<= 4), {elapsed:.1f}s (< 60s)")
    assert ok


def test_c2_bell_bound_lhv(criterion):
    rng = make_rng(SEED, "c2")
    worst = -np.inf
    ok = True
    for _ in range(20):
        dirs = [Direction(random_direction(rng)) for _ in range(4)]
        res = bell.chsh(*dirs, model="lhv", n=10**6, rng=rng)
        ok &= res.value <= 2 + 4 * res.stderr
        worst = max(worst, res.value - 2 - 4 * res.stderr)
    opt = bell.chsh(*OPTIMAL, model="lhv", n=10**6, rng=rng)
    ok &= abs(opt.value - 2.0) <= 0.01
    criterion(2, "LHV CHSH <= 2 + 4 stderr (20 quadruples, n=1e6); optimal angles = 2.00 +- 0.01", ok,
              f"max S - 2 - 4se = {worst:.4f}; S(optimal) = {opt.value:.4f}")
    assert ok


def test_c3_bell_violation_contextual(criterion):
    res = bell.chsh(*OPTIMAL, model="contextual", n=10**6, rng=make_rng(SEED, "c3"))
    exact = bell.chsh(*OPTIMAL, model="exact")
    ok = 2.79 <= res.value <= 2.87 and abs(exact.value - 2 * np.sqrt(2)) <= 1e-9
    criterion(3, "contextual CHSH in [2.79, 2.87] at (0,90,45,135), n=1e6; exact = 2 sqrt 2", ok,
              f"S = {res.value:.4f} +- {res.stderr:.4f}; exact = {exact.value:.12f}")
    assert ok


def test_c4_perfect_anticorrelation(criterion):
    rng = make_rng(SEED, "c4")
    total = violations = 0
    for _ in range(5):
        axis = Direction(random_direction(rng))
        try:
            rep = bell.epr_anticorrelation(axis, 10**4, rng)
        except ModelInvariantError:
            violations += 1
            continue
        total += rep.anticorrelated
        violations += rep.violations
    ok = violations == 0 and total == 5 * 10**4
    criterion(4, "EPR anticorrelation, 5 random axes x 1e4 runs", ok, f"{total}/50000 anticorrelated")
    assert ok


def test_c5_valuation_postulates(criterion):
    rng = make_rng(SEED, "c5")
    failures = 0
    worst = 0.0
    cases = 0
    for d in (2, 4, 8):
        n = 334 if d != 8 else 332
        for phi, a, b in postulate_cases(d, n, rng):
            rep = check_postulates(phi, a, b, lam=float(rng.standard_normal()))
            errs = [rep.unit, rep.additivity, rep.multiplicativity, rep.dispersion, rep.positivity]
            worst = max(worst, max(errs))
            failures += max(errs) > 1e-9
            cases += 1
    ok = failures == 0 and cases == 1000
    criterion(5, "valuation postulates on 1000 cases, d in {2,4,8}, tol 1e-9", ok,
              f"failures = {failures}, max error = {worst:.2e}")
    assert ok


def test_c6_ensemble_convergence_and_linearity(criterion):
    rng = make_rng(SEED, "c6")
    hits = 0
    worst_lin = 0.0
    for _ in range(100):
        d = int(rng.choice([2, 3, 4, 6, 8]))
        psi = QuantumState.from_density(random_density(d, rng, rank=int(rng.integers(1, d + 1))))
        a, b = random_hermitian(d, rng), random_hermitian(d, rng)
        rep = monte_carlo_average(psi, a, 10**5, rng)
        hits += rep.within(quantum_average(psi, a).real, 4.0)
        lin = abs(quantum_average(psi, a + b) - quantum_average(psi, a) - quantum_average(psi, b))
        worst_lin = max(worst_lin, lin)
        assert not algebra.commutes(a, b)
    ok = hits >= 99 and worst_lin <= 1e-12
    criterion(6, "MC mean within 4 stderr of Tr(rho A) in >= 99/100; additivity <= 1e-12", ok,
              f"{hits}/100 within 4 stderr; max additivity error = {worst_lin:.1e}")
    assert ok


def test_c7_gns_reconstruction(criterion):
    rng = make_rng(SEED, "c7")
    ok = True
    worst = 0.0
    dims = []
    for d in (2, 3, 4):
        for kind in ("pure", "full"):
            if kind == "pure":
                psi = QuantumState.pure(random_pure_vector(d, rng))
            else:
                psi = QuantumState.from_density(random_density(d, rng))
            rep = gns_construct(psi)
            report = verify_gns(rep, psi, 200, rng, strict=False)
            expected = d if kind == "pure" else d * d
            ok &= report.ok and rep.rep_dim == expected
            if kind == "full":
                ok &= report.norm <= 1e-8
            worst = max(worst, report.homomorphism, report.star, report.state)
            dims.append(f"{d}{kind[0]}:{rep.rep_dim}")
    criterion(7, "GNS: homomorphism, *, state, cyclicity (1e-8); rep_dim d / d^2", ok,
              f"max error = {worst:.1e}; rep dims {' '.join(dims)}")
    assert ok


def test_c8_dynamics(criterion):
    omega = 1.3
    h = omega / 2 * SIGMA_Z
    times = np.linspace(0, 10, 50)

    def rhs(_, y):
        a = y.view(complex).reshape(2, 2)
        return (1j * (h @ a - a @ h)).reshape(-1).view(float)

    sol = solve_ivp(rhs, (0, times[-1]), SIGMA_X.reshape(-1).view(float).copy(), t_eval=times,
                    rtol=1e-12, atol=1e-13, method="DOP853")
    ode_dev = 0.0
    for i, t in enumerate(times):
        oracle = sol.y[:, i].copy().view(complex).reshape(2, 2)
        ode_dev = max(ode_dev, float(np.max(np.abs(heisenberg_evolve(SIGMA_X, h, t) - oracle))))

    rng = make_rng(SEED, "c8")
    spectral_dev = comp_dev = 0.0
    for _ in range(50):
        d = int(rng.integers(2, 9))
        a, hh = random_hermitian(d, rng), random_hermitian(d, rng)
        t1, t2 = rng.uniform(-5, 5, size=2)
        at = heisenberg_evolve(a, hh, t1)
        spectral_dev = max(spectral_dev, float(np.max(np.abs(
            algebra.spectral(at).eigenvalues - algebra.spectral(a).eigenvalues))))
        comp_dev = max(comp_dev, float(np.max(np.abs(
            heisenberg_evolve(at, hh, t2) - heisenberg_evolve(a, hh, t1 + t2)))))
    ok = ode_dev <= 1e-6 and spectral_dev <= 1e-9 and comp_dev <= 1e-9
    criterion(8, "precession vs ODE oracle (50 points, 1e-6); spectrum and composition (1e-9)", ok,
              f"ODE dev {ode_dev:.1e}, spectrum dev {spectral_dev:.1e}, composition dev {comp_dev:.1e}")
    assert ok


def test_c9_contextuality_structure(criterion):
    rng = make_rng(SEED, "c9")
    audit = UsageAudit()
    # every state generated by the harnesses goes through one audit
    bell.chsh(*OPTIMAL, model="contextual", n=10**4, rng=rng, audit=audit)
    for deg in range(0, 181, 15):
        bell.correlation_contextual(Direction.planar(0), Direction.planar(deg), 2000, rng, audit=audit)
    for axis in ("x", "y", "z"):
        bell.epr_anticorrelation(axis, 2000, rng, audit=audit)
    for d in (2, 4, 8):
        psi = QuantumState.from_density(random_density(d, rng))
        monte_carlo_average(psi, random_hermitian(d, rng), 2000, rng, audit=audit)
    clean = audit.check() is True
    seen = audit.identities_seen

    # negative control: re-using states under a second setting pair must be caught
    left, right = bell.local_pair(OPTIMAL[0], OPTIMAL[2])
    batch = sample_physical_states(bell.singlet(), common_context([left, right]), 10, rng)
    probe = UsageAudit()
    evaluate_batch(batch, left, probe, label="ab")
    other = bell.local_pair(OPTIMAL[0], OPTIMAL[3])[1]
    try:
        evaluate_batch(batch, other, probe, label="ab'")
        caught_reuse = False
    except IrrelevantStateError:
        caught_reuse = True  # the state is not even relevant for I (x) B_b'
    evaluate_batch(batch, left, probe, label="ab'")
    try:
        probe.check()
        caught_reuse = False
    except ModelInvariantError:
        pass

    try:
        evaluate(PhysicalState(context_of(SIGMA_Z), 0), SIGMA_X)
        raised = False
    except IrrelevantStateError:
        raised = True

    ok = clean and raised and caught_reuse and seen > 0
    criterion(9, "no identity evaluated on noncommuting observables; sigma_x on sigma_z state raises", ok,
              f"{seen} identities audited, {len(audit)} evaluations, irrelevant-state error raised: {raised}")
    assert ok
