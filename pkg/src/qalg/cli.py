"""Command-line driver: ``qalg <subcommand> [options]``.

Every subcommand writes a table of rows (CSV or JSON) to ``--out`` or
stdout. Each row carries the seed, sample count and model tag. Exit codes:
0 success, 1 usage error, 2 numerical failure, 3 model-invariant violation.
"""

import argparse
import csv
import io
import json
import sys

import numpy as np

from . import algebra, bell, dynamics, ensemble, gns, valuation
from .context import Context
from .errors import ModelInvariantError, NumericalError, QalgError
from .rng import make_rng, random_density, random_hermitian, random_pure_vector, random_unitary

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC, EXIT_MODEL = 0, 1, 2, 3
DEFAULT_SAMPLES = 100_000
DEFAULT_PARTITIONS = 4
CORRELATION_HEADER = ["theta_deg", "E_estimate", "E_exact", "stderr", "n", "seed"]


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _fmt(x):
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return f"{float(x):.9g}"
    return str(x)


def _jsonable(x):
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        return float(f"{float(x):.9g}")
    return x


def render(rows, fmt, header=None):
    if header is None:
        header = list(rows[0].keys()) if rows else []
    if fmt == "json":
        return json.dumps([{k: _jsonable(r[k]) for k in header} for r in rows], indent=2) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_fmt(r[k]) for k in header])
    return buf.getvalue()


def _seed(text):
    v = int(text, 0)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def _positive(text):
    v = int(float(text))
    if v < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return v


def _floats(text):
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _direction(text):
    text = text.strip().lower()
    if text in bell.AXES:
        return bell.AXES[text]
    vals = _floats(text)
    if len(vals) == 1:
        return bell.Direction.planar(vals[0])
    if len(vals) != 3:
        raise argparse.ArgumentTypeError(f"expected x|y|z, an angle in degrees or a triple, got {text!r}")
    return bell.Direction.normalized(vals)


def _directions(text):
    return [_direction(part) for part in text.split(";")]


def _fmt_dir(d):
    return " ".join(_fmt(x) for x in d.vector)


def cmd_chsh(args):
    if args.directions:
        dirs = _directions(args.directions)
    else:
        dirs = [bell.Direction.planar(x) for x in _floats(args.angles)]
    if len(dirs) != 4:
        raise UsageError("chsh needs exactly four settings a, a', b, b'")
    rng = make_rng(args.seed, "chsh")
    res = bell.chsh(*dirs, model=args.model, n=args.samples, rng=rng, partitions=args.partitions)
    row = {
        "model": args.model,
        "a": _fmt_dir(dirs[0]),
        "a_prime": _fmt_dir(dirs[1]),
        "b": _fmt_dir(dirs[2]),
        "b_prime": _fmt_dir(dirs[3]),
        "S": res.value,
        "stderr": res.stderr,
        "n": res.n,
        "seed": args.seed,
    }
    return [row], None, EXIT_OK


def cmd_epr(args):
    axis = _direction(args.axis)
    rng = make_rng(args.seed, "epr")
    rep = bell.epr_anticorrelation(axis, args.samples, rng, strict=False, partitions=args.partitions)
    row = {
        "model": "contextual",
        "axis": _fmt_dir(axis),
        "n": rep.n,
        "anticorrelated": rep.anticorrelated,
        "violations": rep.violations,
        "estimate": rep.anticorrelated / rep.n,
        "stderr": 0.0,
        "seed": args.seed,
    }
    return [row], None, EXIT_OK if rep.ok else EXIT_MODEL


def cmd_correlation(args):
    if args.step <= 0:
        raise UsageError("--step must be positive")
    thetas = np.arange(0.0, args.max_angle + 1e-9, args.step)
    base = make_rng(args.seed, "correlation")
    streams = base.spawn(len(thetas))
    a = bell.Direction.planar(0.0)
    rows = []
    for theta, sub in zip(thetas, streams):
        b = bell.Direction.planar(theta)
        rec = bell.correlation(a, b, args.model, args.samples, sub, args.partitions)
        rows.append(
            {
                "theta_deg": float(theta),
                "E_estimate": rec.estimate,
                "E_exact": -np.cos(np.deg2rad(theta)) if args.model != "lhv" else rec.exact,
                "stderr": rec.stderr,
                "n": rec.n,
                "seed": args.seed,
            }
        )
    return rows, CORRELATION_HEADER, EXIT_OK


def cmd_evolve(args):
    # spin precession: <sigma_x(t)> in |+x> under H = (omega/2) sigma_z
    h = 0.5 * args.omega * algebra.SIGMA_Z
    psi = ensemble.QuantumState.pure([1, 1])
    base = make_rng(args.seed, "evolve")
    times = np.linspace(0.0, args.tmax, args.points)
    rows = []
    for t, sub in zip(times, base.spawn(len(times))):
        at = dynamics.heisenberg_evolve(algebra.SIGMA_X, h, t)
        rep = ensemble.monte_carlo_average(psi, at, args.samples, sub, args.partitions)
        rows.append(
            {
                "t": float(t),
                "model": "contextual",
                "estimate": rep.estimate,
                "exact": float(np.cos(args.omega * t)),
                "stderr": rep.stderr,
                "n": rep.n,
                "seed": args.seed,
            }
        )
    return rows, None, EXIT_OK


def cmd_gns(args):
    rng = make_rng(args.seed, "gns")
    rows = []
    code = EXIT_OK
    kinds = ["pure", "mixed"] if args.state == "both" else [args.state]
    for kind in kinds:
        if kind == "pure":
            psi = ensemble.QuantumState.pure(random_pure_vector(args.dim, rng))
        else:
            psi = ensemble.QuantumState.from_density(random_density(args.dim, rng))
        rep = gns.gns_construct(psi)
        report = gns.verify_gns(rep, psi, args.trials, rng, strict=False)
        if not report.ok:
            code = EXIT_MODEL
        rows.append(
            {
                "model": f"gns-{kind}",
                "dim": args.dim,
                "rep_dim": rep.rep_dim,
                "homomorphism_err": report.homomorphism,
                "star_err": report.star,
                "state_err": report.state,
                "cyclic_rank": report.cyclic_rank,
                "passed": report.ok,
                "n": args.trials,
                "seed": args.seed,
            }
        )
    return rows, None, code


def postulate_cases(d, cases, rng):
    """Random (context, index, commuting pair) cases for the valuation harness."""
    for _ in range(cases):
        u = random_unitary(d, rng)
        c = Context.from_basis(u)
        k = int(rng.integers(d))
        # small integer spectra make degeneracies common
        da = rng.integers(-3, 4, size=d).astype(float)
        db = rng.standard_normal(d)
        a = c.basis @ np.diag(da) @ c.basis.conj().T
        b = c.basis @ np.diag(db) @ c.basis.conj().T
        yield valuation.PhysicalState(c, k), (a + a.conj().T) / 2, (b + b.conj().T) / 2


def cmd_postulates(args):
    rng = make_rng(args.seed, "postulates")
    dims = [int(x) for x in _floats(args.dims)]
    rows = []
    code = EXIT_OK
    for d in dims:
        worst = dict(unit=0.0, additivity=0.0, multiplicativity=0.0, dispersion=0.0, positivity=0.0)
        failures = 0
        for phi, a, b in postulate_cases(d, args.cases, rng):
            rep = valuation.check_postulates(phi, a, b, lam=float(rng.standard_normal()))
            failures += not rep.ok
            for key in worst:
                worst[key] = max(worst[key], getattr(rep, key))
        if failures:
            code = EXIT_MODEL
        rows.append({"model": "valuation", "check": "postulates", "dim": d, "failures": failures,
                     "max_error": max(worst.values()), "n": args.cases, "seed": args.seed})
        # ensemble side: Monte-Carlo mean vs linear average, additivity on noncommuting pairs
        psi = ensemble.QuantumState.from_density(random_density(d, rng))
        a, b = random_hermitian(d, rng), random_hermitian(d, rng)
        mc = ensemble.monte_carlo_average(psi, a, args.samples, rng, args.partitions)
        exact = ensemble.quantum_average(psi, a).real
        lin = abs(ensemble.quantum_average(psi, a + b) - ensemble.quantum_average(psi, a)
                  - ensemble.quantum_average(psi, b))
        ok = mc.within(exact, 4.0)
        if not ok or lin > 1e-12:
            code = EXIT_MODEL
        rows.append({"model": "ensemble", "check": "convergence", "dim": d, "failures": int(not ok),
                     "max_error": abs(mc.estimate - exact), "n": mc.n, "seed": args.seed})
        rows.append({"model": "ensemble", "check": "linearity", "dim": d, "failures": int(lin > 1e-12),
                     "max_error": lin, "n": 1, "seed": args.seed})
    return rows, None, code


def build_parser():
    p = _Parser(prog="qalg", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, samples=True):
        sp.add_argument("--seed", type=_seed, default=0)
        if samples:
            sp.add_argument("--samples", type=_positive, default=DEFAULT_SAMPLES)
        sp.add_argument("--partitions", type=_positive, default=DEFAULT_PARTITIONS,
                        help="sampling partitions (results depend on this, not on thread count)")
        sp.add_argument("--format", choices=("csv", "json"), default="csv")
        sp.add_argument("--out", default=None, help="output path (default stdout)")

    sp = sub.add_parser("chsh", help="CHSH value for four settings")
    sp.add_argument("--model", choices=bell.MODELS, default="contextual")
    sp.add_argument("--angles", default="0,90,45,135",
                    help="planar angles a,a',b,b' in degrees (x-z plane, from +z)")
    sp.add_argument("--directions", default=None, help="four settings 'x,y,z;x,y,z;...' (overrides --angles)")
    common(sp)
    sp.set_defaults(func=cmd_chsh)

    sp = sub.add_parser("epr", help="perfect anticorrelation along one axis")
    sp.add_argument("--axis", default="z")
    common(sp)
    sp.set_defaults(func=cmd_epr)

    sp = sub.add_parser("correlation", help="E(theta) sweep against -cos(theta)")
    sp.add_argument("--model", choices=bell.MODELS, default="contextual")
    sp.add_argument("--step", type=float, default=15.0)
    sp.add_argument("--max-angle", type=float, default=180.0)
    common(sp)
    sp.set_defaults(func=cmd_correlation)

    sp = sub.add_parser("evolve", help="spin precession table")
    sp.add_argument("--omega", type=float, default=1.0)
    sp.add_argument("--tmax", type=float, default=2 * np.pi)
    sp.add_argument("--points", type=_positive, default=25)
    common(sp)
    sp.set_defaults(func=cmd_evolve)

    sp = sub.add_parser("gns", help="GNS construction checks")
    sp.add_argument("--dim", type=_positive, default=2)
    sp.add_argument("--trials", type=_positive, default=200)
    sp.add_argument("--state", choices=("pure", "mixed", "both"), default="both")
    common(sp, samples=False)
    sp.set_defaults(func=cmd_gns)

    sp = sub.add_parser("postulates", help="valuation and ensemble property harness")
    sp.add_argument("--dims", default="2,4,8")
    sp.add_argument("--cases", type=_positive, default=1000)
    common(sp)
    sp.set_defaults(func=cmd_postulates)
    return p


def run(argv=None, stdout=None, stderr=None):
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    try:
        args = build_parser().parse_args(argv)
        rows, header, code = args.func(args)
    except (UsageError, argparse.ArgumentTypeError) as exc:
        print(f"qalg: usage error: {exc}", file=stderr)
        return EXIT_USAGE
    except (NumericalError, np.linalg.LinAlgError, FloatingPointError) as exc:
        print(f"qalg: numerical failure: {exc}", file=stderr)
        return EXIT_NUMERIC
    except ModelInvariantError as exc:
        print(f"qalg: model invariant violated: {exc}", file=stderr)
        return EXIT_MODEL
    except (QalgError, ValueError) as exc:
        print(f"qalg: usage error: {exc}", file=stderr)
        return EXIT_USAGE
    text = render(rows, args.format, header)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        stdout.write(text)
    return code


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
