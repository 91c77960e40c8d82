"""Command-line front end.

    cylfourier [--grid nt,nx,X] [--json] [--csv-dir DIR] [--seed S] COMMAND ...

Commands: analyze, solve, transform, diagnose, demo.

Exit codes: 0 success (analyze: SGH), 10 operator is not SGH (analyze
verdict, or solve refusal), 2 any error (bad input, parse failure, kind
mismatch, failed oracle cross-check).  Errors are printed to stderr as a
one-line JSON object.  Output files are written atomically.
"""

from __future__ import annotations

import argparse
import json
import sys
import warnings
from pathlib import Path
from typing import Optional

import numpy as np

from . import fileio
from .core import (BUILTINS, CylinderGrid, GridError, Kind, OperatorError,
                   SampledField, sample_builtin)
from .diagnostics import (certificate_table, is_increasing, refinement_divergence_probe,
                          seminorm_pN)
from .parser import NormalizeError, ParseError, RationalizeWarning, parse_operator
from .solver import NotSGHError, TruncationWarning, apply_operator, solve
from .symbols import DecisionError, InconsistencyError, decide_sgh, oracle_check
from .transforms import (fourier_line, fourier_torus, inv_fourier_line,
                         inv_fourier_torus, inv_mixed, mixed_transform)

EXIT_OK, EXIT_ERROR, EXIT_NOT_SGH = 0, 2, 10
DEFAULT_GRID = "32,512,16"


class CliError(Exception):
    def __init__(self, kind: str, message: str, **extra):
        super().__init__(message)
        self.payload = {"error": kind, "message": message, **extra}


# ----------------------------------------------------------------------
# helpers
# ----------------------------------------------------------------------

def parse_grid(text: str) -> CylinderGrid:
    try:
        nt, nx, X = text.split(",")
        return CylinderGrid(int(nt), int(nx), float(X))
    except (ValueError, GridError) as exc:
        raise argparse.ArgumentTypeError(f"bad grid {text!r}: {exc}") from None


def _params(pairs) -> dict:
    out = {}
    for item in pairs or ():
        name, sep, value = item.partition("=")
        if not sep:
            raise CliError("usage", f"--param expects name=value, got {item!r}")
        v = float(value)
        out[name] = int(v) if name == "k0" and v.is_integer() else v
    return out


def _operator(args):
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", RationalizeWarning)
        try:
            op = parse_operator(args.spec, rationalize=args.rationalize)
        except (ParseError, NormalizeError) as exc:
            raise CliError(**_err_fields(exc)) from None
    for w in caught:
        print(json.dumps({"warning": "rationalize", "message": str(w.message)}), file=sys.stderr)
    return op


def _err_fields(exc) -> dict:
    d = exc.to_json()
    return {"kind": d.pop("error"), **d}


def _random_field(grid: CylinderGrid, seed: Optional[int]) -> SampledField:
    rng = np.random.default_rng(seed)
    return SampledField(grid, rng.standard_normal(grid.shape) + 1j * rng.standard_normal(grid.shape))


def _source_field(args, grid: CylinderGrid) -> tuple[SampledField, str]:
    if getattr(args, "input", None):
        obj = _read(args.input)
        if obj.kind is not Kind.FIELD:
            raise CliError("kind_mismatch", f"{args.input} holds a {obj.kind.name.lower()} "
                           "spectrum, a sampled field is required")
        return obj, str(args.input)
    if getattr(args, "random", False):
        return _random_field(grid, args.seed), f"random(seed={args.seed})"
    name = getattr(args, "builtin", None)
    if name:
        try:
            return sample_builtin(name, grid, **_params(args.param)), name
        except ValueError as exc:
            raise CliError("builtin", str(exc)) from None
    raise CliError("usage", "give an input file, --builtin NAME or --random")


def _read(path):
    try:
        return fileio.read_array(path)
    except (OSError, fileio.FormatError, GridError) as exc:
        raise CliError("file", f"cannot read {path}: {exc}") from None


def _emit(args, payload: dict, lines: list[str]) -> None:
    if args.json:
        print(json.dumps(payload, indent=2))
    else:
        print("\n".join(lines))


def _write_csv(args, name: str, header: list[str], rows) -> Optional[str]:
    if not args.csv_dir:
        return None
    d = Path(args.csv_dir)
    d.mkdir(parents=True, exist_ok=True)
    text = ",".join(header) + "\n" + "".join(",".join(str(v) for v in r) + "\n" for r in rows)
    fileio.atomic_write(d / name, text.encode())
    return str(d / name)


def _fraction_text(frac: Optional[dict]) -> str:
    if frac is None:
        return "-"
    return str(frac["num"]) if frac["den"] == 1 else f"{frac['num']}/{frac['den']}"


# ----------------------------------------------------------------------
# commands
# ----------------------------------------------------------------------

def cmd_analyze(args) -> int:
    op = _operator(args)
    try:
        report = decide_sgh(op)
    except DecisionError as exc:
        raise CliError("decision", str(exc)) from None
    payload = report.to_json()
    if args.oracle:
        K, Xi, n = args.box
        check = oracle_check(op, report, int(K), float(Xi), int(n), sgh_floor=0.0)
        payload["oracle"] = check
        if not check["agrees"]:
            raise CliError("inconsistency", "brute-force scan disagrees with the exact verdict",
                           oracle=check)
    lines = [f"operator: {report.operator}", f"verdict:  {report.verdict.value}",
             f"method:   {report.method.value}"]
    if report.witness is not None:
        w = report.witness
        lines.append(f"witness:  k={w.k}, xi in [{w.xi_lo}, {w.xi_hi}]")
    else:
        lines.append(f"gap:      {_fraction_text(payload['gap'])}"
                     f" ({'certified' if report.gap_certified else 'estimate'})")
    if report.normal_form is not None:
        lines.append(f"normal form: {report.normal_form.to_text()}")
    if args.oracle:
        lines.append(f"oracle:   scan min {payload['oracle']['scan_min']:.6g} (agrees)")
    _emit(args, payload, lines)
    return EXIT_OK if report.is_sgh else EXIT_NOT_SGH


def cmd_solve(args) -> int:
    op = _operator(args)
    grid = args.grid
    u_true = None
    if args.manufacture:
        try:
            u_true = sample_builtin(args.manufacture, grid, **_params(args.param))
        except ValueError as exc:
            raise CliError("builtin", str(exc)) from None
        f, source = apply_operator(op, u_true), f"manufactured from {args.manufacture}"
    else:
        f, source = _source_field(args, grid)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", TruncationWarning)
            result = solve(op, f)
    except NotSGHError as exc:
        payload = {"operator": op.to_json(), "grid": f.grid.to_json(),
                   "sgh_report": exc.report.to_json(), "refused": True}
        print(json.dumps(payload, indent=2))
        return EXIT_NOT_SGH
    except InconsistencyError as exc:
        raise CliError("inconsistency", str(exc)) from None
    payload = result.to_json(op)
    payload["source"] = source
    payload["output"] = str(args.out) if args.out else None
    if u_true is not None:
        payload["recovery_error"] = float(np.max(np.abs(result.u.values - u_true.values)))
    if args.out:
        fileio.write_array(args.out, result.u)
    if args.csv_dir:
        d = Path(args.csv_dir)
        d.mkdir(parents=True, exist_ok=True)
        fileio.write_csv(d / "solution.csv", result.u)
    if args.report:
        fileio.write_json(args.report, payload)
    lines = [f"operator: {op.to_text()}", f"verdict:  SGH ({result.report.method.value})",
             f"residual: {result.residual_inf:.3e}"]
    if "recovery_error" in payload:
        lines.append(f"recovery: {payload['recovery_error']:.3e}")
    lines += [f"warning:  {w}" for w in result.warnings]
    _emit(args, payload, lines)
    return EXIT_OK


_FORWARD = {"torus": (fourier_torus, Kind.TORUS), "line": (fourier_line, Kind.LINE),
            "mixed": (mixed_transform, Kind.MIXED)}
_INVERSE = {"torus": inv_fourier_torus, "line": inv_fourier_line, "mixed": inv_mixed}


def cmd_transform(args) -> int:
    if args.input:
        obj = _read(args.input)
    else:
        obj, _ = _source_field(args, args.grid)
    expected_in = Kind.FIELD if args.direction in ("forward", "roundtrip") else _FORWARD[args.which][1]
    if obj.kind is not expected_in:
        raise CliError("kind_mismatch",
                       f"{args.direction} {args.which} transform needs a "
                       f"{expected_in.name.lower()} input, got {obj.kind.name.lower()}",
                       expected=[expected_in.name.lower()], found=obj.kind.name.lower())
    fwd, _ = _FORWARD[args.which]
    inv = _INVERSE[args.which]
    payload = {"which": args.which, "direction": args.direction,
               "kind_in": obj.kind.name.lower(), "grid": obj.grid.to_json()}
    if args.direction == "forward":
        out = fwd(obj)
    elif args.direction == "inverse":
        out = inv(obj)
    else:
        out = inv(fwd(obj))
        payload["max_abs_diff"] = float(np.max(np.abs(out.values - obj.values)))
    payload["kind_out"] = out.kind.name.lower()
    a = np.abs(out.values)
    r, c = np.unravel_index(int(np.argmax(a)), a.shape)
    payload["peak"] = {"row": int(r), "col": int(c), "abs": float(a[r, c])}
    payload["output"] = str(args.out) if args.out else None
    if args.out:
        fileio.write_array(args.out, out)
    if args.csv_dir:
        d = Path(args.csv_dir)
        d.mkdir(parents=True, exist_ok=True)
        fileio.write_csv(d / f"{args.which}_{args.direction}.csv", out)
    lines = [f"{args.direction} {args.which}: {payload['kind_in']} -> {payload['kind_out']}",
             f"peak |value| {payload['peak']['abs']:.6g} at row {r}, col {c}"]
    if "max_abs_diff" in payload:
        lines.append(f"round-trip max abs diff: {payload['max_abs_diff']:.3e}")
    _emit(args, payload, lines)
    return EXIT_OK


def _ladder(grid: CylinderGrid, rungs: int = 3) -> list[CylinderGrid]:
    return [CylinderGrid(grid.n_t, grid.n_x * 2 ** i, grid.X * 2 ** i) for i in range(rungs)]


def cmd_diagnose(args) -> int:
    f, source = _source_field(args, args.grid)
    Ns = range(args.n_min, args.n_max + 1)
    betas = range(args.beta_min, args.beta_max + 1)
    if args.n_min < 0 or args.beta_min < 0 or args.n_max < args.n_min or args.beta_max < args.beta_min:
        raise CliError("usage", "N and beta ranges must be nonempty and nonnegative")
    certs = certificate_table(f, Ns, betas)
    seminorms = [{"N": N, "p_N": seminorm_pN(f, N)} for N in range(args.n_max + 1)]
    payload = {"source": source, "grid": f.grid.to_json(),
               "certificates": [c.to_json() for c in certs], "seminorms": seminorms}
    lines = [f"source: {source}", "certificates (type N beta C):"]
    lines += [f"  {c.kind:6s} {c.N:2d} {c.beta:2d} {c.C:.6g}" for c in certs]
    lines += [f"p_{s['N']} = {s['p_N']:.6g}" for s in seminorms]
    if args.refine:
        if args.input or args.random:
            raise CliError("usage", "--refine needs a builtin, which is resampled on every grid")
        grids = _ladder(f.grid)
        tables = [certificate_table(sample_builtin(args.builtin, g, **_params(args.param)), Ns, betas)
                  for g in grids]
        variation = 0.0
        for row in zip(*tables):
            Cs = [c.C for c in row]
            if max(Cs) > 0:
                variation = max(variation, (max(Cs) - min(Cs)) / max(Cs))
        payload["refinement"] = {"grids": [g.to_json() for g in grids],
                                 "max_variation": variation, "stable": variation <= 0.1}
        lines.append(f"refinement ladder: max relative variation {variation:.3g}"
                     f" ({'stable' if variation <= 0.1 else 'UNSTABLE'})")
    if args.builtin and not args.input:
        nts = [16, 64, 256]
        grids = [CylinderGrid(n, f.grid.n_x, f.grid.X) for n in nts]
        p0 = refinement_divergence_probe(args.builtin, grids, **_params(args.param))
        divergent = is_increasing(p0) and p0[-1] >= 2 * p0[0] and p0[-1] > 10
        payload["divergence_probe"] = {"n_t": nts, "p0": p0, "divergent": divergent}
        lines.append("p_0 over n_t " + ", ".join(f"{n}: {v:.4g}" for n, v in zip(nts, p0))
                     + ("  -> DIVERGENT" if divergent else ""))
    _write_csv(args, "certificates.csv", ["type", "N", "beta", "C", "argmax_k", "argmax_xi_index"],
               [(c.kind, c.N, c.beta, repr(c.C), c.argmax[0], c.argmax[1]) for c in certs])
    _write_csv(args, "seminorms.csv", ["N", "p_N"], [(s["N"], repr(s["p_N"])) for s in seminorms])
    if args.out:
        fileio.write_json(args.out, payload)
    _emit(args, payload, lines)
    return EXIT_OK


# operator text, expected verdict
GALLERY = [
    ("Dt + Dx", "NotSGH"),
    ("Dt + 1i Dx + 1/2i", "SGH"),             # b != 0, a Re q / b + Im q = 1/2
    ("Dt + (1+1i) Dx + 1", "NotSGH"),         # b != 0, a Re q / b + Im q = 1
    ("Dt + (1+1i) Dx + (1+1/2i)", "SGH"),     # ... = 3/2
    ("Dt + (1+2i) Dx + 2", "NotSGH"),         # b = 2 divides Re q = 2
    ("Dt + 3 Dx + 1/2", "SGH"),               # b = 0, Re q != 0
    ("Dt + 3 Dx + 1i", "NotSGH"),             # b = Re q = 0, a != 0
    ("Dt + 1/2i", "SGH"),                     # a = b = Re q = 0, Im q not an integer
    ("Dt + 2i", "NotSGH"),
    ("(1+2i) Dt + Dx + 1", "SGH"),            # b = 2 does not divide Re q = 1
    ("(3+2i) Dt + Dx + (2+5i)", "NotSGH"),    # b = 2 divides Re q = 2
    ("2 Dt + Dx + 1", "SGH"),                 # b = 0, Re q != 0
    ("5 Dt + Dx + 7i", "NotSGH"),             # b = 0, Re q = 0
    ("Dt + (sin(t)+1) Dx + 1", "SGH"),
    ("Dt + (sin(t)+1) Dx + (1+1i)", "SGH"),
    ("Dt + (2*sin(t)+2) Dx + 1i", "NotSGH"),  # Re q = 0, a != 0
    ("Dt + sin(t) Dx + 3i", "NotSGH"),        # a = Re q = 0, Im q an integer
    ("Dt + sin(t) Dx + 3/2i", "SGH"),
    ("p(Dx)=Dx^2; q(Dt)=Dt^2+1/2", "SGH"),
    ("p(Dx)=Dx^2+1; q(Dt)=-Dt^2", "NotSGH"),
]


def cmd_demo(args) -> int:
    cases = []
    for text, expected in GALLERY:
        report = decide_sgh(parse_operator(text))
        cases.append({"operator": text, "expected": expected, "verdict": report.verdict.value,
                      "agrees": report.verdict.value == expected})
    ok = all(c["agrees"] for c in cases)
    payload = {"cases": cases, "all_agree": ok}
    width = max(len(t) for t, _ in GALLERY)
    lines = [f"{c['operator']:{width}s}  {c['verdict']:6s}  {'ok' if c['agrees'] else 'MISMATCH'}"
             for c in cases]
    lines.append(f"{sum(c['agrees'] for c in cases)}/{len(cases)} verdicts agree")
    _write_csv(args, "gallery.csv", ["operator", "expected", "verdict"],
               [(json.dumps(c["operator"]), c["expected"], c["verdict"]) for c in cases])
    _emit(args, payload, lines)
    return EXIT_OK if ok else EXIT_ERROR


# ----------------------------------------------------------------------
# argument parsing
# ----------------------------------------------------------------------

def _add_source(p, file_ok: bool = True):
    if file_ok:
        p.add_argument("input", nargs="?", help="CYLF field file")
    p.add_argument("--builtin", choices=BUILTINS)
    p.add_argument("--param", action="append", metavar="NAME=VALUE",
                   help="builtin parameter (k0, xi0); repeatable")
    p.add_argument("--random", action="store_true", help="random complex field (see --seed)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="cylfourier", description=__doc__.split("\n\n")[0])
    ap.add_argument("--grid", type=parse_grid, default=parse_grid(DEFAULT_GRID),
                    help=f"n_t,n_x,X (default {DEFAULT_GRID})")
    ap.add_argument("--json", action="store_true", help="print JSON instead of text")
    ap.add_argument("--csv-dir", help="also write plot-ready CSV files here")
    ap.add_argument("--seed", type=int, default=0, help="seed for --random fields")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="decide Schwartz global hypoellipticity")
    p.add_argument("spec")
    p.add_argument("--rationalize", type=float, metavar="TOL",
                   help="accept decimal literals, rationalized within TOL")
    p.add_argument("--oracle", action="store_true", help="cross-check with a brute-force scan")
    p.add_argument("--box", nargs=3, type=float, default=(50, 50.0, 100001),
                   metavar=("K", "XI", "N"), help="scan box for --oracle")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("solve", help="solve L u = f by symbol division")
    p.add_argument("spec")
    _add_source(p, file_ok=False)
    p.add_argument("--input", help="CYLF field file holding f")
    p.add_argument("--manufacture", choices=BUILTINS, help="use f = L u for this builtin u")
    p.add_argument("--rationalize", type=float, metavar="TOL")
    p.add_argument("--out", help="write u here (CYLF)")
    p.add_argument("--report", help="write the JSON solve report here")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("transform", help="partial and mixed Fourier transforms")
    _add_source(p)
    p.add_argument("--which", choices=("torus", "line", "mixed"), default="mixed")
    p.add_argument("--direction", choices=("forward", "inverse", "roundtrip"), default="forward")
    p.add_argument("--out")
    p.set_defaults(func=cmd_transform)

    p = sub.add_parser("diagnose", help="decay certificates and seminorms")
    _add_source(p)
    p.add_argument("--n-min", type=int, default=0)
    p.add_argument("--n-max", type=int, default=4)
    p.add_argument("--beta-min", type=int, default=0)
    p.add_argument("--beta-max", type=int, default=2)
    p.add_argument("--refine", action="store_true",
                   help="repeat on (2n_x, 2X) and (4n_x, 4X) and report the variation")
    p.add_argument("--out", help="write the JSON report here")
    p.set_defaults(func=cmd_diagnose)

    p = sub.add_parser("demo", help="verdict gallery")
    p.set_defaults(func=cmd_demo)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_ERROR
    try:
        return args.func(args)
    except CliError as exc:
        print(json.dumps(exc.payload), file=sys.stderr)
    except (OperatorError, GridError, ValueError, OSError, InconsistencyError) as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
    return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
