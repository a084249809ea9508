"""``holorep`` command-line front end.

Exit codes: 0 ok, 1 property failure, 2 usage error, 3 numeric failure.
Artifacts (kernels, series, matrices, block families) are JSON; report
tables go to the terminal and optionally to ``--json-out`` / ``--csv``.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
import time
from pathlib import Path

import numpy as np

from . import circled as cc
from . import kernelop as ko
from . import multiindex as mi
from .domains import Contour, ReinhardtDomain, domain_from_json
from .quadrature import QuadratureError, QuadratureSpec
from .report import RunReport, digest
from .rng import SplitMix64
from .series import PowerSeries, random_polynomial, series_from_json, sup_norm
from .verify import SUITES, run_suite

EXIT_OK, EXIT_PROPERTY, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3


class UsageError(Exception):
    pass


# --- helpers ---------------------------------------------------------------

def _load_json(path: str):
    try:
        return json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise UsageError(f"no such file: {path}") from None
    except json.JSONDecodeError as e:
        raise UsageError(f"{path}: invalid JSON ({e})") from None


def _ints(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split(","))
    except ValueError:
        raise UsageError(f"expected comma-separated integers, got {text!r}") from None


def _floats(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(x) for x in text.split(","))
    except ValueError:
        raise UsageError(f"expected comma-separated numbers, got {text!r}") from None


def _spec(args) -> QuadratureSpec:
    try:
        return QuadratureSpec(args.nodes, args.tol, args.max_doublings)
    except ValueError as e:
        raise UsageError(str(e)) from None


def _domain(args, n: int, prefix: str = "") -> ReinhardtDomain:
    path = getattr(args, f"{prefix}domain_json")
    if path:
        dom = _parse(domain_from_json, path, "domain")
        if not isinstance(dom, ReinhardtDomain):
            raise UsageError("need a Reinhardt domain (polydisc, ball or pellipsoid)")
    else:
        kind = getattr(args, f"{prefix}domain")
        radii = _floats(getattr(args, f"{prefix}radii")) if getattr(args, f"{prefix}radii") else (1.0,)
        if len(radii) == 1:
            radii = radii * n
        try:
            if kind == "polydisc":
                dom = ReinhardtDomain.polydisc(radii)
            elif kind == "ball":
                dom = ReinhardtDomain.ball(radii[0], n)
            else:
                p = getattr(args, f"{prefix}p")
                if not p:
                    raise UsageError("pellipsoid needs --p")
                p = _floats(p)
                dom = ReinhardtDomain.pellipsoid(radii, p * n if len(p) == 1 else p)
        except ValueError as e:
            raise UsageError(str(e)) from None
    if dom.dim != n:
        raise UsageError(f"domain has dimension {dom.dim}, expected {n}")
    return dom


def _scales(r: float, s: float):
    if not 0 < r < s < 1:
        raise UsageError("need 0 < r < s < 1")


def _emit(obj: dict, out: str | None, report: RunReport):
    text = json.dumps(obj, indent=1)
    if out:
        Path(out).write_text(text + "\n")
        report.notes.append(f"wrote {out}")
    else:
        print(text)


def _parse(loader, path: str, what: str):
    try:
        return loader(_load_json(path))
    except (KeyError, ValueError, TypeError, IndexError) as e:
        raise UsageError(f"{path}: malformed {what} ({e!r})") from None


def _series(path: str) -> PowerSeries:
    f = _parse(series_from_json, path, "series")
    if not isinstance(f, PowerSeries):
        raise UsageError(f"{path}: expected a power series")
    return f


def _coeff_diff(f, g) -> float:
    keys = set(f.coeffs) | set(g.coeffs)
    return max((abs(f[m] - g[m]) for m in keys), default=0.0)


# --- closed-form kernels ---------------------------------------------------

def _closed_form(op: ko.NamedOperator, n: int):
    """``a(zeta, z)`` in closed form for the operators that have one."""
    def cauchy(zeta, z):
        return 1.0 / np.prod(z - zeta, axis=1)

    if op.kind == "identity":
        return cauchy
    if op.kind == "partial":
        j = op.param - 1
        return lambda zeta, z: -cauchy(zeta, z) / (z[:, j] - zeta[:, j])
    if op.kind == "euler":
        return lambda zeta, z: -cauchy(zeta, z) * np.sum(z / (z - zeta), axis=1)
    if op.kind == "dilation":
        return lambda zeta, z: cauchy(zeta, op.param * z)
    if op.kind == "hadamard" and isinstance(op.param, str):
        # geometric multipliers c^|a| are dilations
        if op.param == "pow2":
            return lambda zeta, z: cauchy(zeta, 0.5 * z)
        if op.param.startswith("geom="):
            c = float(op.param[5:])
            return lambda zeta, z: cauchy(zeta, c * z)
    if op.kind == "multiplier":
        g = np.asarray(op.param)
        return lambda zeta, z: np.prod(z ** g, axis=1) * cauchy(zeta, z)
    return None


def _kernel_check(op: ko.NamedOperator, n: int, D: int, a: ko.KernelCoefficients, report: RunReport):
    closed = _closed_form(op, n)
    extra = {1: 40, 2: 30, 3: 20}.get(n)
    if closed is None or extra is None:
        report.notes.append("no closed form check for this operator")
        return
    phases = np.exp(2j * np.pi * np.arange(5) / 5 + 0.3j)
    zeta, z = [], []
    for i in range(5):
        for sz in (0.5, 0.3, 0.0):
            zeta.append([2.0 * phases[(i + j) % 5] for j in range(n)])
            z.append([sz * phases[(2 * i + 3 * j) % 5] for j in range(n)])
    zeta, z = np.asarray(zeta), np.asarray(z)
    residual = float(np.max(np.abs(ko.kernel_eval(a, zeta, z) - closed(zeta, z))))
    # tail: terms of the longer expansion beyond degree D at |zeta| = 2, |z| <= 0.5
    big = ko.phi_forward(ko.matrix_of(op, n, D + extra))
    tail = math.fsum(abs(v) * 2.0 ** -(sum(al) + n) * 0.5 ** sum(b)
                     for (al, b), v in big.entries.items() if sum(al) > D)
    report.add("closed form residual vs truncation tail", residual, tail,
               residual <= tail + 1e-12 * max(1.0, tail))


# --- commands --------------------------------------------------------------

def cmd_kernel(args, report: RunReport):
    try:
        op = ko.parse_operator(args.op)
        A = ko.matrix_of(op, args.n, args.D)
    except ValueError as e:
        raise UsageError(str(e)) from None
    a = ko.phi_forward(A)
    report.add("matrix_from_kernel(phi_forward(A)) = A", 0 if ko.matrix_from_kernel(a) == A else 1, 0,
               ko.matrix_from_kernel(a) == A)
    _kernel_check(op, args.n, args.D, a, report)
    _emit(a.to_json(), args.out, report)


def cmd_apply(args, report: RunReport):
    a = _parse(ko.KernelCoefficients.from_json, args.kernel, "kernel")
    f = _series(args.series)
    q = _spec(args)
    if f.dim != a.dim_zeta:
        raise UsageError(f"kernel acts on dimension {a.dim_zeta}, series has {f.dim}")
    C = Contour.centered([args.radius] * f.dim)
    try:
        g = ko.phi_inverse(a, f, C, q)
    except ValueError as e:
        raise UsageError(str(e)) from None
    dev = _coeff_diff(g, ko.matrix_from_kernel(a).apply(f))
    report.add("max |quadrature - matrix oracle| coefficient", dev, 1e-9, dev <= 1e-9)
    if args.chop > 0 and not g.is_zero():
        cut = args.chop * max(abs(c) for c in g.coeffs.values())
        g = PowerSeries(g.dim, g.trunc, {m: c for m, c in g.coeffs.items() if abs(c) > cut})
    _emit(g.to_json(), args.out, report)


def cmd_project(args, report: RunReport):
    f = _series(args.series)
    _scales(args.r, args.s)
    k = _ints(args.k)
    if len(k) != f.dim or not mi.is_primitive(k):
        raise UsageError(f"k = {k} is not a primitive index of length {f.dim}")
    G = _domain(args, f.dim)
    pk = cc.project(f, k)
    chk = cc.projection_bound_check(f, k, G, args.r, args.s)
    report.add(f"projection bound k={list(k)}", chk.lhs, chk.rhs, chk.ok)
    try:
        twin = cc.project_quadrature(f, k, G, args.s, _spec(args))
        dev = _coeff_diff(twin, pk)
        report.add("project_quadrature = project", dev, 1e-8, dev <= 1e-8)
    except ValueError as e:
        report.notes.append(str(e))
    _emit(pk.to_json(), args.out, report)


def cmd_decompose(args, report: RunReport):
    f = _series(args.series)
    _scales(args.r, args.s)
    if args.N < 1:
        raise UsageError("need N >= 1")
    G = _domain(args, f.dim)
    dec = cc.decompose(f, G, args.N, args.r, args.s)
    res = sup_norm(dec.residual, G, args.r)[0]
    report.add("residual at scale r", res, dec.residual_bound, res <= dec.residual_bound + 1e-9)
    theta = args.r / args.s
    if theta**args.N <= 0.5:
        chk = cc.identity_decomposition_check(f, G, args.r, args.s, args.N)
        report.add("identity decomposition remainder", chk.error_norm, chk.tail_bound, chk.ok)
    else:
        report.notes.append("(r/s)^N > 1/2: identity decomposition check skipped")
    if dec.parts:
        fit = cc.growth_criterion(dec.parts, G, args.r)
        report.add("growth criterion theta", fit.theta, 1.0, fit.ok)
    if args.parts_csv:
        lines = ["k,degree,norm_upper"]
        for k, part in dec.parts.items():
            lines.append(f"\"{','.join(map(str, k))}\",{sum(k)},{sup_norm(part, G, args.r)[1]!r}")
        Path(args.parts_csv).write_text("\n".join(lines) + "\n")
    report.notes.append(f"tail bound {dec.residual_bound:.6e}")
    out = {
        "p0": {"re": dec.p0.real, "im": dec.p0.imag},
        "parts": [{"k": list(k), "series": p.to_json()} for k, p in dec.parts.items() if not p.is_zero()],
        "residual": dec.residual.to_json(),
        "residual_bound": dec.residual_bound,
    }
    _emit(out, args.out, report)


def _matrix_input(args) -> ko.OperatorMatrix:
    if args.op:
        try:
            return ko.matrix_of(args.op, args.n, args.D)
        except ValueError as e:
            raise UsageError(str(e)) from None
    if not args.matrix:
        raise UsageError("give a matrix JSON path or --op")
    return _parse(ko.OperatorMatrix.from_json, args.matrix, "matrix")


def cmd_extract(args, report: RunReport):
    A = _matrix_input(args)
    _scales(args.r, args.s)
    G1 = _domain(args, A.dim_in)
    G2 = _domain(args, A.dim_out, "out_") if (args.out_domain or args.out_domain_json) else (
        G1 if A.dim_out == A.dim_in else ReinhardtDomain.polydisc([1.0] * A.dim_out))
    fam = cc.extract_blocks(A, G1, G2, args.N, args.r, args.s, args.t, args.eps,
                            probes=args.probes, rng=args.seed)
    for k in fam.blocks:
        ws = [w for w in fam.witnesses if w.k == k]
        worst = max(ws, key=lambda w: w.lhs - w.rhs) if ws else None
        if worst is not None:
            report.add(f"block witness k={list(k)}", worst.lhs, worst.rhs, all(w.ok for w in ws))
    report.notes.append(f"eps = {fam.eps:.6g}, C = {fam.C:.6g}")
    _emit(fam.to_json(), args.out, report)


def cmd_assemble(args, report: RunReport):
    fam = _parse(cc.BlockFamily.from_json, args.blocks, "blocks")
    if args.constant == "zero":
        const = None
    elif args.constant == "unit":
        const = PowerSeries.constant(fam.dim_out)
    elif args.constant == "blocks":
        const = fam.constant
    else:
        const = _series(args.constant)
    try:
        A = cc.assemble(fam, const)
    except ValueError as e:
        raise UsageError(str(e)) from None
    if args.compare:
        B = _parse(ko.OperatorMatrix.from_json, args.compare, "matrix")
        keys = set(A.entries) | set(B.entries)
        diff = max((abs(A.entries.get(e, 0) - B.entries.get(e, 0)) for e in keys), default=0.0)
        report.add("max |assembled - reference| entry", diff, 0.0, diff == 0.0)
    else:
        report.add("assembled entries", len(A.entries), math.inf, True)
    _emit(A.to_json(), args.out, report)


def cmd_dual(args, report: RunReport):
    try:
        moments = ko.parse_moments(args.moments)
    except ValueError as e:
        raise UsageError(str(e)) from None
    ut = ko.dual_kernel_from_functional(moments, args.n, args.D)
    if args.series:
        f = _series(args.series)
        if f.dim != args.n:
            raise UsageError("series dimension does not match -n")
        if f.max_degree() > args.D:
            raise UsageError("series degree exceeds -D")
    else:
        f = random_polynomial(args.n, args.D, SplitMix64(args.seed))
    C = Contour.centered([args.radius] * args.n)
    val = ko.dual_pair(ut, f, C, _spec(args))
    exact = ko.dual_pair_exact(ut, f)
    report.add("quadrature pairing vs coefficient sum", abs(val - exact), 1e-8, abs(val - exact) <= 1e-8)
    report.notes.append(f"u(f) = {exact.real:.12g}{exact.imag:+.12g}i")
    if args.growth:
        rep = ko.dual_growth_demo(args.n, max(args.D, 200), (2, 4, 8, 16))
        for N, r in zip(rep.Ns, rep.ratios):
            report.add(f"growth ratio N={N}", r, math.inf, True)
        report.add("ratios strictly increase", rep.ratios[-1], rep.ratios[0], rep.increasing)
    _emit(ut.to_json(), args.out, report)


def cmd_verify(args, report: RunReport):
    if args.suite != "all" and args.suite not in SUITES:
        raise UsageError(f"unknown suite {args.suite!r}; choose from {', '.join([*SUITES, 'all'])}")
    report.extend(run_suite(args.suite, args.seed, _spec(args)))


def cmd_report(args, report: RunReport):
    saved = _parse(RunReport.from_json, args.report, "report")
    report.command = saved.command
    report.inputs = saved.inputs
    report.extend(saved.rows)
    report.notes.extend(saved.notes)


# --- parser ----------------------------------------------------------------

def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("global options")
    g.add_argument("--nodes", type=int, default=argparse.SUPPRESS, help="trapezoid nodes per circle (power of two)")
    g.add_argument("--tol", type=float, default=argparse.SUPPRESS, help="quadrature tolerance")
    g.add_argument("--max-doublings", type=int, default=argparse.SUPPRESS)
    g.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="SplitMix64 seed for random probes")
    g.add_argument("--json-out", default=argparse.SUPPRESS, help="write the run report as JSON")
    g.add_argument("--csv", default=argparse.SUPPRESS, help="write the run report table as CSV")
    return p


def _domain_flags(p: argparse.ArgumentParser, prefix: str = ""):
    dash = prefix.replace("_", "-")
    p.add_argument(f"--{dash}domain", choices=["polydisc", "ball", "pellipsoid"],
                   default="polydisc" if not prefix else None)
    p.add_argument(f"--{dash}radii", help="comma-separated radii (one value is broadcast)")
    p.add_argument(f"--{dash}p", help="p-ellipsoid exponents")
    p.add_argument(f"--{dash}domain-json", help="domain JSON file")


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="holorep", parents=[common],
                                     description="Kernels, dual pairings and circled projections of operators on holomorphic functions.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("kernel", parents=[common], help="kernel coefficients of a named operator")
    p.add_argument("op", help="identity, euler, partial:j, hadamard:pow2|factorial|shift|geom=c, dilation:c, multiplier:g1,g2")
    p.add_argument("-n", type=int, default=1)
    p.add_argument("-D", type=int, default=8)
    p.add_argument("-o", "--out")
    p.set_defaults(func=cmd_kernel)

    p = sub.add_parser("apply", parents=[common], help="apply a kernel to a series by quadrature")
    p.add_argument("kernel")
    p.add_argument("series")
    p.add_argument("--radius", type=float, default=1.0)
    p.add_argument("--chop", type=float, default=1e-13,
                   help="drop output coefficients below this fraction of the largest (0 keeps all)")
    p.add_argument("-o", "--out")
    p.set_defaults(func=cmd_apply)

    p = sub.add_parser("project", parents=[common], help="P_k f with its bound check")
    p.add_argument("series")
    p.add_argument("-k", required=True, help="primitive index, e.g. 1,2")
    p.add_argument("-r", type=float, default=0.5)
    p.add_argument("-s", type=float, default=0.8)
    _domain_flags(p)
    p.add_argument("-o", "--out")
    p.set_defaults(func=cmd_project)

    p = sub.add_parser("decompose", parents=[common], help="f = P_0 f + sum P_k f + residual")
    p.add_argument("series")
    p.add_argument("-N", type=int, default=4)
    p.add_argument("-r", type=float, default=0.3)
    p.add_argument("-s", type=float, default=0.6)
    _domain_flags(p)
    p.add_argument("--parts-csv", help="CSV of per-k norms")
    p.add_argument("-o", "--out")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("extract", parents=[common], help="split an operator into blocks A o P_k")
    p.add_argument("matrix", nargs="?")
    p.add_argument("--op", help="use a named operator instead of a matrix file")
    p.add_argument("-n", type=int, default=2)
    p.add_argument("-D", type=int, default=6)
    p.add_argument("-N", type=int, default=None, help="largest |k| (default: input truncation)")
    p.add_argument("-r", type=float, default=0.5)
    p.add_argument("-s", type=float, default=0.8)
    p.add_argument("-t", type=float, default=0.5)
    p.add_argument("--eps", type=float, default=None)
    p.add_argument("--probes", type=int, default=3)
    _domain_flags(p)
    _domain_flags(p, "out_")
    p.add_argument("-o", "--out")
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("assemble", parents=[common], help="assemble a block family into one matrix")
    p.add_argument("blocks")
    p.add_argument("--constant", default="zero", help="zero, unit, blocks (stored A(1)) or a series JSON path")
    p.add_argument("--compare", help="matrix JSON to compare against")
    p.add_argument("-o", "--out")
    p.set_defaults(func=cmd_assemble)

    p = sub.add_parser("dual", parents=[common], help="dual kernel of a moment sequence and its pairing")
    p.add_argument("--moments", default="eval0", help="eval0, ones, degree, growth or coeff:g1,g2")
    p.add_argument("-n", type=int, default=1)
    p.add_argument("-D", type=int, default=8)
    p.add_argument("--series")
    p.add_argument("--radius", type=float, default=1.0)
    p.add_argument("--growth", action="store_true", help="also run the unbounded-growth demo")
    p.add_argument("-o", "--out")
    p.set_defaults(func=cmd_dual)

    p = sub.add_parser("verify", parents=[common], help="run a property suite")
    p.add_argument("suite", help=f"one of {', '.join([*SUITES, 'all'])}")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("report", parents=[common], help="render a saved run report")
    p.add_argument("report")
    p.set_defaults(func=cmd_report)
    return parser


DEFAULTS = {"nodes": 16, "tol": 1e-13, "max_doublings": 6, "seed": 0, "json_out": None, "csv": None}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    for key, val in DEFAULTS.items():
        if not hasattr(args, key):
            setattr(args, key, val)

    payload = {k: v for k, v in vars(args).items() if k not in ("func", "json_out", "csv", "out", "parts_csv")}
    files = {}
    for key in ("kernel", "series", "matrix", "blocks", "report", "compare", "domain_json"):
        path = getattr(args, key, None)
        if path and Path(path).is_file():
            files[key] = Path(path).read_text()
    report = RunReport(args.command, digest({"args": payload, "files": files}))
    start = time.perf_counter()
    try:
        args.func(args, report)
    except UsageError as e:
        print(f"holorep: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except QuadratureError as e:
        print(f"holorep: numeric failure: {e}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ArithmeticError, np.linalg.LinAlgError) as e:
        print(f"holorep: numeric failure: {e}", file=sys.stderr)
        return EXIT_NUMERIC
    report.timing = time.perf_counter() - start

    stream = sys.stderr if getattr(args, "out", "unset") is None and args.command not in ("verify", "report") else sys.stdout
    print(report.render(), file=stream)
    if args.json_out:
        Path(args.json_out).write_text(json.dumps(report.to_json(), indent=1) + "\n")
    if args.csv:
        Path(args.csv).write_text(report.to_csv())
    return EXIT_OK if report.ok else EXIT_PROPERTY


if __name__ == "__main__":
    sys.exit(main())
