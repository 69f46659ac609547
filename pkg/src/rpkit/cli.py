"""Command-line front end.

Exit codes: 0 success, 1 verification failure, 2 input or validation error.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import sys
import time
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from .core_model import Constant, DimensionalParams, PowerLaw, RpeParams, State, nondimensionalize, rhs
from .errors import DomainError, UnsupportedForcing

EXIT_OK, EXIT_VERIFY, EXIT_INPUT = 0, 1, 2

DEFAULT_PARAMS = RpeParams(re_inv=Fraction(1, 10), we=Fraction(1, 2), th=1, p_n=1, k=1, forcing=Constant(1))

CASE_DEFAULTS = {
    "1.2": RpeParams(th=1, p_n=1, k=1, forcing=PowerLaw(1, 1, 1, Fraction(-6, 5))),
    "2": RpeParams(re_inv=Fraction(1, 10), th=1, p_n=1, k=Fraction(2, 3), forcing=PowerLaw(1, 1, 1, -1)),
    "3": RpeParams(we=Fraction(1, 2), th=1, p_n=2, k=Fraction(1, 3), forcing=PowerLaw(1, 1, 1, Fraction(-2, 3))),
}
SYMMETRY_CASES = {
    "1": (DEFAULT_PARAMS, 1),
    "1.2": (CASE_DEFAULTS["1.2"], 1),
    "2": (CASE_DEFAULTS["2"], 1),
    "3": (CASE_DEFAULTS["3"], 1),
    "generic": (RpeParams(re_inv=Fraction(1, 10), we=Fraction(1, 2), th=1, p_n=1, k=Fraction(7, 5),
                          forcing=PowerLaw(1, 1, 1, -1)), 2),
}


class UsageError(ValueError):
    pass


def _jsonable(x):
    if isinstance(x, Fraction):
        return str(x) if x.denominator != 1 else int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    if isinstance(x, (np.floating,)):
        return float(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return x


def _load_json(path: str) -> dict:
    text = sys.stdin.read() if path == "-" else Path(path).read_text()
    return json.loads(text)


def _params(args, default: RpeParams = DEFAULT_PARAMS) -> RpeParams:
    if args.params:
        return RpeParams.from_json(_load_json(args.params))
    return default


class Run:
    """Collects outputs of one command and writes the manifest."""

    def __init__(self, args):
        self.args = args
        self.t0 = time.perf_counter()
        self.outputs = []
        self.params = None
        self.out_dir = Path(args.out_dir) if args.out_dir else None
        if self.out_dir:
            self.out_dir.mkdir(parents=True, exist_ok=True)

    def path(self, name: str) -> Path | None:
        return self.out_dir / name if self.out_dir else None

    def write_text(self, path: Path, text: str):
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
        self.outputs.append(str(path))

    def emit(self, payload: dict, name: str):
        """JSON to stdout, and to the output directory when one is given."""
        text = json.dumps(_jsonable(payload), indent=2)
        print(text)
        if self.out_dir:
            self.write_text(self.out_dir / name, text + "\n")

    def finish(self):
        if not self.outputs:
            return
        where = self.out_dir or Path(self.outputs[0]).parent
        manifest = {
            "command": self.args.command,
            "params": self.params.to_json() if isinstance(self.params, RpeParams) else self.params,
            "argv": sys.argv[1:],
            "version": __version__,
            "seed": self.args.seed,
            "outputs": list(self.outputs),
            "wall_time_s": time.perf_counter() - self.t0,
        }
        name = "manifest.json" if self.out_dir else f"{Path(self.outputs[0]).stem}.manifest.json"
        (where / name).write_text(json.dumps(_jsonable(manifest), indent=2) + "\n")


# ---------------------------------------------------------------------------
# commands

def cmd_nondim(args, run: Run) -> int:
    src = args.input or args.params
    if not src:
        raise UsageError("nondim needs a dimensional JSON via --input or --params")
    d = DimensionalParams.from_json(_load_json(src))
    p = nondimensionalize(d)
    run.params = p
    run.emit(p.to_json(), "nondim.json")
    return EXIT_OK


def cmd_painleve(args, run: Run) -> int:
    from .painleve import P1_STANDARD, dominant_balance, painleve_report, power_terms_from_expr
    from .symbolic import parse

    integers = "any" if args.any_integer else "positive"
    if args.ode == "p1" or args.expr is not None:
        text = P1_STANDARD if args.ode == "p1" else args.expr
        if not text or not text.strip():
            raise UsageError("empty term list")
        terms = power_terms_from_expr(parse(text))
        if len(terms) < 2:
            raise UsageError("dominant balance needs at least two terms")
        report = dominant_balance(terms, integers)
        run.params = {"expr": text}
    else:
        p = _params(args)
        run.params = p
        report = painleve_report(p, integers)
    run.emit(report.to_json(), "painleve.json")
    return EXIT_OK


def _parse_scan(text: str, step: str):
    """'LO..HI', optionally followed by ' STEP' or ':STEP'."""
    parts = text.replace(":", " ").split()
    if len(parts) == 2:
        text, step = parts
    lo, sep, hi = text.partition("..")
    if not sep:
        raise UsageError("--scan-exponent expects LO..HI")
    return Fraction(lo), Fraction(hi), Fraction(step)


def cmd_symmetries(args, run: Run) -> int:
    from .lie import exponent_grid, scan_exponents, selected_exponents, solve_symmetries, verify_symmetry

    if args.case:
        p, degree = SYMMETRY_CASES[args.case]
        p = _params(args, p)
        degree = args.degree if args.degree is not None else degree
    else:
        p = _params(args)
        degree = args.degree if args.degree is not None else 1
    run.params = p
    if args.scan_exponent:
        lo, hi, step = _parse_scan(args.scan_exponent, args.step)
        grid = exponent_grid(lo, hi, step)
        entries = scan_exponents(p, grid, degree)
        payload = {
            "degree": degree,
            "scan": [e.to_json() for e in entries],
            "selected": [str(e) for e in selected_exponents(entries)],
        }
        run.emit(payload, "symmetry_scan.json")
        return EXIT_OK
    basis = solve_symmetries(p, degree, forcing=args.forcing)
    residuals = [verify_symmetry(p, vf, args.n_samples, args.seed) for vf in basis]
    payload = {
        "basis": [vf.to_json() for vf in basis],
        "max_residual": max(residuals) if residuals else 0.0,
        "degree": degree,
    }
    run.emit(payload, "symmetries.json")
    return EXIT_OK


def cmd_reduce(args, run: Run) -> int:
    from .lie import reduce_time_translation
    from .symbolic import render

    p = _params(args)
    run.params = p
    red = reduce_time_translation(p)
    run.emit({"A": render(red.A), "B": render(red.B), "equation": render(red.equation) + " = 0",
              "variables": {"x": "R", "y": "Rdot", "dydx": "dy/dx"}}, "reduce.json")
    return EXIT_OK


def cmd_equilibrium(args, run: Run) -> int:
    from .solutions import equilibrium_cardano, equilibrium_radius

    p = _params(args)
    run.params = p
    r = equilibrium_radius(p, args.p0)
    payload = {"R_eq": r, "acceleration_at_rest": rhs(p if args.p0 is None else p.with_forcing(Constant(args.p0)), State(0.0, r, 0.0))}
    if Fraction(p.k) == 1:
        thp0 = float(p.th) * (args.p0 if args.p0 is not None else float(p.forcing.p0))
        payload["cardano"] = equilibrium_cardano(thp0, float(p.we), float(p.p_n))
    run.emit(payload, "equilibrium.json")
    return EXIT_OK


def cmd_rdot2(args, run: Run) -> int:
    from .solutions import rdot_squared_inviscid

    p = _params(args, RpeParams(th=1, p_n=1, k=Fraction(4, 3)))
    run.params = p
    rs = args.R if args.R else list(np.linspace(args.r_min, 1.0, args.n))
    vals = [rdot_squared_inviscid(p, args.p0, r) for r in rs]
    if run.out_dir:
        buf = io.StringIO()
        buf.write("R,Rdot2\n")
        for r, v in zip(rs, vals):
            buf.write(f"{float(r)!r},{v!r}\n")
        run.write_text(run.out_dir / "rdot2.csv", buf.getvalue())
    run.emit({"R": [float(r) for r in rs], "rdot2": vals}, "rdot2.json")
    return EXIT_OK


def cmd_collapse_time(args, run: Run) -> int:
    from .solutions import collapse_time

    p = _params(args, RpeParams(th=1, p_n=0))
    run.params = p
    res = collapse_time(p, args.p0, args.r_end, full_output=True)
    run.emit({"collapse_time": res.t, "diagnostics": res.to_json()}, "collapse_time.json")
    return EXIT_OK


def _curve_csv(cf, times) -> str:
    buf = io.StringIO()
    buf.write("t,R,Rdot,Rddot,residual\n")
    for t in times:
        r, v, a = cf(float(t))
        res = a - rhs(cf.params, State(float(t), float(r), float(v)))
        buf.write(",".join(repr(float(x)) for x in (t, r, v, a, res)) + "\n")
    return buf.getvalue()


def cmd_invariant(args, run: Run) -> int:
    from .solutions import invariant_case_1_2, invariant_case_2, invariant_case_3

    p = _params(args, CASE_DEFAULTS[args.case])
    run.params = p
    if args.case == "1.2":
        cf = invariant_case_1_2(p)
    elif args.case == "2":
        cf = invariant_case_2(p)
    else:
        cf = invariant_case_3(p, Fraction(args.e) if args.e is not None else None)
    times = np.linspace(0.0, args.t_end, args.n)
    text = _curve_csv(cf, times)
    target = run.path(f"invariant_case_{args.case}.csv")
    if target:
        run.write_text(target, text)
    if args.json or not target:
        if args.json:
            worst = max(abs(float(line.split(",")[-1])) for line in text.splitlines()[1:])
            print(json.dumps(_jsonable({**cf.to_json(), "max_residual": worst})))
        else:
            sys.stdout.write(text)
    return EXIT_OK


def cmd_simulate(args, run: Run) -> int:
    from .integrate import IntegratorConfig, integrate_rpe

    p = _params(args)
    run.params = p
    cfg = IntegratorConfig(rel_tol=args.rel_tol, abs_tol=args.abs_tol, r_floor=args.r_floor,
                           h_max=args.h_max if args.h_max else math.inf)
    tr = integrate_rpe(p, State(args.t0, args.r0, args.rdot0), args.t_end, cfg, backend=args.backend)
    stats = tr.stats()
    csv_path = Path(args.out_csv) if args.out_csv else run.path("trajectory.csv")
    if csv_path:
        csv_path.parent.mkdir(parents=True, exist_ok=True)
        tr.to_csv(csv_path)
        run.outputs.append(str(csv_path))
        run.write_text(csv_path.with_suffix(".json"), json.dumps(_jsonable(stats), indent=2) + "\n")
    if args.json or csv_path:
        print(json.dumps(_jsonable(stats), indent=2))
    else:
        sys.stdout.write("t,R,Rdot\n")
        for row in zip(tr.ts, tr.rs, tr.rdots):
            sys.stdout.write(",".join(repr(float(x)) for x in row) + "\n")
        print(json.dumps(_jsonable(stats)), file=sys.stderr)
    return EXIT_OK


def cmd_energy_audit(args, run: Run) -> int:
    from .integrate import Trajectory, energy_audit

    p = _params(args)
    run.params = p
    tr = Trajectory.from_csv(args.trajectory)
    audit = energy_audit(tr, p)
    run.emit(audit.to_json(), "energy_audit.json")
    return EXIT_OK


def verification_suite(perturb: float = 0.0, n_samples: int = 200, seed: int = 0,
                       closed_tol: float = 1e-10, sym_tol: float = 1e-9) -> dict:
    """Residual checks of every closed form and every reproduced symmetry."""
    from .lie import solve_symmetries, verify_symmetry
    from .solutions import equilibrium_form, invariant_case_1_2, invariant_case_2, invariant_case_3, verify_closed_form

    times = np.linspace(0.0, 10.0, 20)
    forms = {
        "case_1_2": invariant_case_1_2(CASE_DEFAULTS["1.2"]),
        "case_2": invariant_case_2(CASE_DEFAULTS["2"]),
        "case_3": invariant_case_3(CASE_DEFAULTS["3"]),
        "equilibrium": equilibrium_form(RpeParams(we=1, th=2, p_n=5, k=1)),
    }
    checks = []
    for name, cf in forms.items():
        if perturb:
            cf = cf.scaled(1.0 + perturb)
        r = verify_closed_form(cf, times)
        checks.append({"check": f"closed_form:{name}", "max_residual": r, "tolerance": closed_tol, "ok": r < closed_tol})
    expected = {"1": 1, "1.2": 1, "2": 1, "3": 1, "generic": 0}
    for name, (p, degree) in SYMMETRY_CASES.items():
        basis = solve_symmetries(p, degree)
        worst = max((verify_symmetry(p, vf, n_samples, seed) for vf in basis), default=0.0)
        ok = len(basis) == expected[name] and worst < sym_tol
        checks.append({"check": f"symmetry:{name}", "dimension": len(basis), "expected_dimension": expected[name],
                       "max_residual": worst, "tolerance": sym_tol, "ok": ok})
    return {"checks": checks, "ok": all(c["ok"] for c in checks)}


def cmd_verify(args, run: Run) -> int:
    if not args.all:
        raise UsageError("verify currently runs the full suite only; pass --all")
    result = verification_suite(args.perturb, args.n_samples, args.seed)
    run.params = {"perturb": args.perturb, "n_samples": args.n_samples}
    run.emit(result, "verify.json")
    return EXIT_OK if result["ok"] else EXIT_VERIFY


# ---------------------------------------------------------------------------

def _globals(parser, defaults: bool, with_out: bool = True):
    kw = {} if defaults else {"default": argparse.SUPPRESS}
    parser.add_argument("--params", help="dimensionless parameter JSON file ('-' for stdin)", **({"default": None} if defaults else kw))
    if with_out:
        parser.add_argument("--out", dest="out_dir", help="directory for outputs and the run manifest",
                            **({"default": None} if defaults else kw))
    parser.add_argument("--seed", type=int, help="seed for randomized checks", **({"default": 0} if defaults else kw))
    parser.add_argument("--json", action="store_true", help="force JSON on stdout", **({} if defaults else kw))


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="rpkit", description="Rayleigh-Plesset integrability toolkit")
    _globals(ap, defaults=True)
    ap.add_argument("--version", action="version", version=f"rpkit {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    _globals(common, defaults=False)
    common_no_out = argparse.ArgumentParser(add_help=False)
    _globals(common_no_out, defaults=False, with_out=False)
    sub = ap.add_subparsers(dest="command", required=True)
    _add = sub.add_parser

    def add(name, **kw):
        return _add(name, parents=[common_no_out if name == "simulate" else common], **kw)

    sub.add_parser = add

    s = sub.add_parser("nondim", help="dimensional -> dimensionless coefficients")
    s.add_argument("--input", help="dimensional parameter JSON (defaults to --params)")
    s.set_defaults(func=cmd_nondim)

    s = sub.add_parser("painleve", help="leading-order Painleve test")
    s.add_argument("--ode", choices=["rpe", "p1"], default="rpe")
    s.add_argument("--expr", help="custom equation F = 0 as an expression")
    s.add_argument("--any-integer", action="store_true", help="accept negative integer leading powers")
    s.set_defaults(func=cmd_painleve)

    s = sub.add_parser("symmetries", help="Lie point symmetries within a polynomial ansatz")
    s.add_argument("--degree", type=int)
    s.add_argument("--case", choices=sorted(SYMMETRY_CASES), help="use a built-in fixture")
    s.add_argument("--forcing", choices=["explicit", "opaque"], default="explicit")
    s.add_argument("--scan-exponent", metavar="LO..HI", help="scan c (t+1)^e over e (write --scan-exponent=-3..0)")
    s.add_argument("--step", default="1/3", help="scan step (rational)")
    s.add_argument("--n-samples", type=int, default=200)
    s.set_defaults(func=cmd_symmetries)

    s = sub.add_parser("reduce", help="first-order reduction by time translation")
    s.set_defaults(func=cmd_reduce)

    s = sub.add_parser("equilibrium", help="equilibrium radius under constant forcing")
    s.add_argument("--p0", type=float)
    s.set_defaults(func=cmd_equilibrium)

    s = sub.add_parser("rdot2", help="inviscid first integral Rdot^2(R)")
    s.add_argument("--R", type=float, nargs="+")
    s.add_argument("--r-min", type=float, default=0.3)
    s.add_argument("--n", type=int, default=71)
    s.add_argument("--p0", type=float)
    s.set_defaults(func=cmd_rdot2)

    s = sub.add_parser("collapse-time", help="collapse time by quadrature")
    s.add_argument("--r-end", type=float, default=0.0)
    s.add_argument("--p0", type=float)
    s.set_defaults(func=cmd_collapse_time)

    s = sub.add_parser("invariant", help="invariant solution curve as CSV")
    s.add_argument("--case", choices=["1.2", "2", "3"], required=True)
    s.add_argument("--e", help="forcing exponent for case 3 (rational)")
    s.add_argument("--t-end", type=float, default=10.0)
    s.add_argument("--n", type=int, default=101)
    s.set_defaults(func=cmd_invariant)

    s = sub.add_parser("simulate", help="integrate the full equation")
    s.add_argument("--r0", type=float, default=1.0)
    s.add_argument("--rdot0", type=float, default=0.0)
    s.add_argument("--t0", type=float, default=0.0)
    s.add_argument("--t-end", type=float, default=10.0)
    s.add_argument("--rel-tol", type=float, default=1e-10)
    s.add_argument("--abs-tol", type=float, default=1e-12)
    s.add_argument("--r-floor", type=float, default=1e-6)
    s.add_argument("--h-max", type=float)
    s.add_argument("--backend", choices=["cython", "python"])
    s.add_argument("--out", dest="out_csv", help="trajectory CSV path (sidecar JSON written next to it)")
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("energy-audit", help="energy channels of a trajectory CSV")
    s.add_argument("trajectory")
    s.set_defaults(func=cmd_energy_audit)

    s = sub.add_parser("verify", help="residual checks of closed forms and symmetries")
    s.add_argument("--all", action="store_true")
    s.add_argument("--perturb", type=float, default=0.0, help="scale closed forms by 1 + PERTURB")
    s.add_argument("--n-samples", type=int, default=200)
    s.set_defaults(func=cmd_verify)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    run = Run(args)
    try:
        code = args.func(args, run)
    except (UsageError, DomainError, UnsupportedForcing, ValueError, TypeError, KeyError,
            FileNotFoundError, json.JSONDecodeError, ZeroDivisionError) as exc:
        print(f"rpkit {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    run.finish()
    return code


if __name__ == "__main__":
    sys.exit(main())
