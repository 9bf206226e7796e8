"""Command-line interface.

    coverspec spectrum table --k 2/3 --lmax 6 --format json
    coverspec angular sample --k 3 --l 2 --m 3 --ntheta 5 --nphi 3
    coverspec radial solve --l 0 --count 3 --npoints 16000 --dump u.csv
    coverspec kg residual --background schwarzschild --M 1 --k 2/3 --l 3 --m 2 --omega 0.3 --mp 0.1
    coverspec paper-check

Exit status: 0 success, 1 check failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from importlib import resources

import numpy as np

from . import angular, kg, radial, spectrum
from .errors import CoverSpecError, GridTooCoarse, Inadmissible, NoBoundState
from .rational import CoveringParameter, parse_k

__all__ = ["main", "build_parser", "run_paper_check", "load_fixtures", "parse_k"]

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

CHECK_KS = ("1", "3", "2/3", "5/2")
CHECK_LMAX = 12


class UsageError(Exception):
    pass


def load_fixtures(path=None) -> dict[str, dict[int, list[int]]]:
    """Reference m-lists keyed by k string then l."""
    if path is None:
        text = resources.files("coverspec").joinpath("data/paper_tables.json").read_text()
    else:
        with open(path) as fh:
            text = fh.read()
    raw = json.loads(text)
    return {k: {int(l): list(ms) for l, ms in rows.items()} for k, rows in raw.items()}


# --- paper-check suites ----------------------------------------------------


def _check_tables(fixtures) -> dict:
    failures = []
    for k_text, rows in fixtures.items():
        k = parse_k(k_text)
        table = spectrum.build_table(k, max(rows))
        got = {row.l: list(row.m) for row in table.rows}
        for l, expected in sorted(rows.items()):
            if got.get(l) != expected:
                failures.append({"k": str(k), "l": l, "expected": expected, "got": got.get(l)})
            elif table.rows[l].count != len(expected):
                failures.append({"k": str(k), "l": l, "detail": "count does not match list length"})
    return {"name": "tables", "passed": not failures, "failures": failures}


def _check_radial(energy_tol: float, n_max: int = 3) -> dict:
    failures = []
    results = []
    for n in range(1, n_max + 1):
        grid = radial.RadialGrid.default(n)
        for l in range(n):
            expected = spectrum.hydrogen_energy(n)
            try:
                states = radial.solve_radial_schrodinger(l, grid, n - l, energy_tol=energy_tol)
            except GridTooCoarse as exc:
                failures.append(
                    {
                        "n": n,
                        "l": l,
                        "error": "GridTooCoarse",
                        "detail": str(exc),
                        "remediation": "raise the grid resolution (--npoints) or loosen --energy-tol",
                    }
                )
                continue
            except NoBoundState as exc:
                failures.append({"n": n, "l": l, "error": "NoBoundState", "detail": str(exc)})
                continue
            state = states[-1]
            err = abs(state.energy - expected)
            results.append({"n": n, "l": l, "energy": state.energy, "expected": expected, "error": err})
            if err > energy_tol or state.nodes != n - l - 1:
                failures.append({"n": n, "l": l, "energy": state.energy, "expected": expected, "nodes": state.nodes})
    return {"name": "radial", "passed": not failures, "failures": failures, "results": results}


def _angular_case(args):
    k, l, m, residual_tol = args
    Y = angular.make_harmonic(l, m, k)
    thetas = angular.interior_thetas(100)
    scaled = float(np.max(np.abs(angular.theta_residual(Y, thetas)) / angular.theta_residual_scale(Y, thetas)))
    phis = np.linspace(0.0, 2 * math.pi, 100, endpoint=False)
    phi_res = float(np.max(angular.phi_residual(m, phis)))
    ok = scaled < residual_tol and phi_res < 1e-12
    return {"k": str(k), "l": l, "m": m, "theta_residual": scaled, "phi_residual": phi_res, "passed": ok}


def _check_angular(residual_tol: float, threads: int = 1) -> dict:
    cases = []
    for k_text in CHECK_KS:
        k = parse_k(k_text)
        for l in range(CHECK_LMAX + 1):
            for m in spectrum.admissible_m(l, k):
                cases.append((k, l, m, residual_tol))
    if threads > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(_angular_case, cases))
    else:
        results = [_angular_case(c) for c in cases]
    failures = [r for r in results if not r["passed"]]
    worst = max(r["theta_residual"] for r in results)
    return {"name": "angular", "passed": not failures, "failures": failures, "cases": len(results), "max_theta_residual": worst}


def run_paper_check(fixtures_path=None, energy_tol=1e-4, residual_tol=1e-8, threads=1) -> tuple[int, dict]:
    fixtures = load_fixtures(fixtures_path)
    suites = [
        _check_tables(fixtures),
        _check_radial(energy_tol),
        _check_angular(residual_tol, threads),
    ]
    passed = all(s["passed"] for s in suites)
    report = {
        "passed": passed,
        "energy_tol": energy_tol,
        "residual_tol": residual_tol,
        "suites": suites,
    }
    return (EXIT_OK if passed else EXIT_FAIL), report


# --- commands --------------------------------------------------------------


def _emit(args, text: str) -> None:
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([repr(v) if isinstance(v, float) else v for v in row])
    return buf.getvalue()


def _cmd_table(args) -> int:
    table = spectrum.build_table(args.k, args.lmax)
    _emit(args, table.to_json(indent=2) + "\n" if args.format == "json" else table.to_csv())
    return EXIT_OK


def _cmd_sample(args) -> int:
    Y = angular.make_harmonic(args.l, args.m, args.k)
    thetas = angular.interior_thetas(args.ntheta)
    phis = np.linspace(0.0, 2 * math.pi, args.nphi, endpoint=False)
    rows = angular.sample_harmonic(Y, thetas, phis)
    if args.format == "json":
        _emit(args, json.dumps(rows, indent=2) + "\n")
    else:
        buf = io.StringIO()
        angular.write_samples_csv(rows, buf)
        _emit(args, buf.getvalue())
    return EXIT_OK


def _cmd_radial(args) -> int:
    n_target = args.l + args.count
    r_max = args.rmax if args.rmax is not None else radial.DEFAULT_RMAX_FACTOR * n_target**2
    grid = radial.RadialGrid.from_origin(r_max, args.npoints)
    states = radial.solve_radial_schrodinger(args.l, grid, args.count, energy_tol=args.energy_tol)
    rows = [(s.nodes + args.l + 1, args.l, s.nodes, s.energy) for s in states]
    if args.format == "json":
        payload = [{"n": n, "l": l, "nodes": nodes, "energy": e} for n, l, nodes, e in rows]
        _emit(args, json.dumps(payload, indent=2) + "\n")
    else:
        _emit(args, _csv_text(("n", "l", "nodes", "energy"), rows))
    if args.dump:
        _, vectors = radial.radial_eigenpairs(radial.RadialProblem.hydrogen(args.l), grid, args.count)
        header = ["r", "u"] if args.count == 1 else ["r"] + [f"u{i}" for i in range(args.count)]
        body = [[float(r)] + [float(v) for v in vec] for r, vec in zip(grid.points, vectors)]
        with open(args.dump, "w", newline="") as fh:
            fh.write(_csv_text(header, body))
    return EXIT_OK


def _cmd_kg(args) -> int:
    if args.background == "schwarzschild":
        bg = kg.Background.schwarzschild(args.M, args.k)
    elif args.background == "cosmic-string":
        bg = kg.Background.cosmic_string(args.b, args.k)
    else:
        bg = kg.Background.euclidean(args.k)
    mode = kg.build_mode(args.l, args.m, args.k, args.mp, args.omega, oscillatory=not args.growing)
    report = kg.residual_report(bg, mode, samples=args.samples, seed=args.seed, n_steps=args.steps, threads=args.threads)
    report = {key: (float(v) if isinstance(v, np.floating) else v) for key, v in report.items()}
    report["passed"] = report["max_residual"] < args.kg_tol
    _emit(args, json.dumps(report, indent=2) + "\n")
    return EXIT_OK if report["passed"] else EXIT_FAIL


def _cmd_paper_check(args) -> int:
    status, report = run_paper_check(args.fixtures, args.energy_tol, args.residual_tol, args.threads)
    _emit(args, json.dumps(report, indent=2) + "\n")
    return status


# --- parser ----------------------------------------------------------------


def _k_arg(text: str) -> CoveringParameter:
    try:
        return parse_k(text)
    except CoverSpecError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _positive_float(text: str) -> float:
    value = float(text)
    if not value > 0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text}")
    return value


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise UsageError(message)


def _common() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--k", type=_k_arg, default=parse_k("1"), help="covering parameter p/q (default 1)")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--out", default=None, help="output file (default stdout)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--threads", type=int, default=1)
    common.add_argument("--residual-tol", type=_positive_float, default=1e-8)
    common.add_argument("--energy-tol", type=_positive_float, default=1e-4)
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = _Parser(prog="coverspec", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="group", required=True, parser_class=_Parser)

    p_spec = sub.add_parser("spectrum", help="degeneracy tables")
    spec_sub = p_spec.add_subparsers(dest="command", required=True, parser_class=_Parser)
    p = spec_sub.add_parser("table", parents=[common])
    p.add_argument("--lmax", type=int, required=True)
    p.set_defaults(func=_cmd_table)

    p_ang = sub.add_parser("angular", help="modified harmonic samples")
    ang_sub = p_ang.add_subparsers(dest="command", required=True, parser_class=_Parser)
    p = ang_sub.add_parser("sample", parents=[common])
    p.add_argument("--l", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--ntheta", type=int, default=9)
    p.add_argument("--nphi", type=int, default=4)
    p.set_defaults(func=_cmd_sample)

    p_rad = sub.add_parser("radial", help="finite-difference hydrogen levels")
    rad_sub = p_rad.add_subparsers(dest="command", required=True, parser_class=_Parser)
    p = rad_sub.add_parser("solve", parents=[common])
    p.add_argument("--l", type=int, required=True)
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--rmax", type=_positive_float, default=None, help="default 60 (l + count)^2")
    p.add_argument("--npoints", type=int, default=radial.DEFAULT_NPOINTS)
    p.add_argument("--dump", default=None, help="write eigenfunction samples (r, u) as CSV")
    p.set_defaults(func=_cmd_radial)

    p_kg = sub.add_parser("kg", help="Klein-Gordon residual checks")
    kg_sub = p_kg.add_subparsers(dest="command", required=True, parser_class=_Parser)
    p = kg_sub.add_parser("residual", parents=[common])
    p.add_argument("--background", choices=[b.value for b in kg.BackgroundKind], default="schwarzschild")
    p.add_argument("--M", type=_positive_float, default=1.0)
    p.add_argument("--b", type=_positive_float, default=1.0)
    p.add_argument("--l", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--omega", type=float, default=0.3)
    p.add_argument("--mp", type=float, default=0.1)
    p.add_argument("--samples", type=int, default=20)
    p.add_argument("--steps", type=int, default=27000, help="RK4 steps across the radial window")
    p.add_argument("--growing", action="store_true", help="use T = exp(omega t) instead of exp(i omega t)")
    p.add_argument("--kg-tol", type=_positive_float, default=1e-6)
    p.set_defaults(func=_cmd_kg)

    p = sub.add_parser("paper-check", parents=[common], help="reproduce the reference tables and run all oracles")
    p.add_argument("--fixtures", default=None, help="alternate reference-table JSON")
    p.set_defaults(func=_cmd_paper_check)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError:
        return EXIT_USAGE
    try:
        return args.func(args)
    except (Inadmissible, ValueError) as exc:
        sys.stderr.write(f"coverspec: error: {exc}\n")
        return EXIT_USAGE
    except CoverSpecError as exc:
        sys.stderr.write(f"coverspec: check failed: {exc}\n")
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
