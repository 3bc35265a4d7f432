"""Command-line entry point.

Exit status is 0 on success, 1 on a domain error (a JSON object on stderr)
and 2 on a usage error. Every output is a deterministic function of the
inputs and ``--seed``.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from fractions import Fraction
from pathlib import Path

from . import __version__
from .circuit import expand_to_poly, parse_circuit, poly_to_circuit, serialize_circuit
from .corpus import random_circuit
from .errors import AlgenError, CapExceeded, ParseError, PreconditionError
from .field import parse_rational
from .generator import build_gen, compose
from .parallel import default_jobs
from .pipelines import bootstrap_pipeline, derand_params, derand_pipeline, tau_pipeline
from .pit import (
    HittingSet,
    annihilator_polys,
    enum_cap,
    load_points_jsonl,
    pit_deterministic,
    pit_random,
    trivial_grid_hitting_set,
)
from .poly import parse_poly, serialize_poly
from .reconstruction import run_reconstruction, size_ledger_report
from .transforms import (
    coefficient_circuits,
    derivative_circuit,
    partial_homogenize,
    strassen_homogenize,
)


class UsageError(Exception):
    pass


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True)


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _write(path: str | None, text: str, out) -> None:
    if path is None or path == "-":
        out.write(text)
    else:
        Path(path).write_text(text)


def _positive(text: str) -> int:
    v = int(text)
    if v <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def _nonneg(text: str) -> int:
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError("must be non-negative")
    return v


def _rational(text: str) -> Fraction:
    try:
        return parse_rational(text)
    except ParseError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _cap(args) -> int:
    return args.enum_cap if args.enum_cap is not None else enum_cap()


# ---------------------------------------------------------------------------
# subcommands


def cmd_gen(args, out):
    P = parse_poly(_read(args.P))
    G = build_gen(P, args.n)
    meta = {"k": G.k, "n": G.n, "d": G.d}
    comps = "".join(f"# Delta_{i}\n" + serialize_poly(c) for i, c in enumerate(G.components))
    if args.out:
        d = Path(args.out)
        d.mkdir(parents=True, exist_ok=True)
        (d / "components.poly").write_text(comps)
        (d / "meta.json").write_text(_dump(meta) + "\n")
        out.write(_dump(dict(meta, files=["components.poly", "meta.json"])) + "\n")
    else:
        out.write(_dump(dict(meta, components=[serialize_poly(c) for c in G.components])) + "\n")


def _load_set(args, nvars: int) -> HittingSet:
    if args.points:
        pts = load_points_jsonl(_read(args.points))
        for p in pts:
            if len(p) != nvars:
                raise PreconditionError(f"point of length {len(p)} for a {nvars}-input circuit")
        return HittingSet.from_points(pts, "file")
    side = args.side
    if side is None:
        ideg = args.individual_degree
        if ideg is None:
            ideg = max(p.individual_degree() for p in expand_to_poly(args.circuit))
            ideg = max(ideg, 0)
        side = ideg + 1
    return trivial_grid_hitting_set(nvars, side - 1)


def cmd_pit(args, out):
    C = parse_circuit(_read(args.C))
    args.circuit = C
    if args.mode == "random":
        v = pit_random(C, args.degree, args.trials, args.seed, args.modulus)
    else:
        H = _load_set(args, C.nvars)
        cap = _cap(args)
        if H.size > cap:
            raise CapExceeded("enumeration", cap, H.size)
        v = pit_deterministic(C, H, args.jobs)
    out.write(_dump(v.to_json()) + "\n")


def _build_hitset(args) -> HittingSet:
    if args.kind == "grid":
        if args.nvars is None or args.individual_degree is None:
            raise UsageError("grid hitting sets need --nvars and --individual-degree")
        return trivial_grid_hitting_set(args.nvars, args.individual_degree)
    if args.P is None:
        raise UsageError(f"{args.kind} hitting sets need -P")
    P = parse_poly(_read(args.P))
    res = derand_pipeline(P, args.s, args.t, args.n, b=args.base, grid_side=args.side,
                          name="gen-grid" if args.kind == "gen" else "derand")
    return res.hitting_set


def cmd_hitset(args, out):
    H = _build_hitset(args)
    if args.size_only:
        out.write(_dump({"provenance": H.provenance, "params": H.params, "size": H.size}) + "\n")
        return
    text = H.to_jsonl(_cap(args))
    _write(args.out, text, out)
    if args.out:
        out.write(_dump({"provenance": H.provenance, "params": H.params, "size": H.size}) + "\n")


def cmd_annihilate(args, out):
    P = parse_poly(_read(args.P))
    G = build_gen(P, args.n)
    basis = annihilator_polys(G, args.D)
    rec = {"k": G.k, "n": G.n, "d": G.d, "D": args.D, "kernel_dim": len(basis), "found": bool(basis)}
    if basis:
        C = poly_to_circuit(basis[0])
        if not compose(C, G).is_zero():
            raise AlgenError("kernel vector does not annihilate the generator")
        text = serialize_circuit(C)
        rec["poly"] = str(basis[0])
        rec["size"] = C.size()
        if args.out:
            Path(args.out).write_text(text)
        else:
            rec["circuit"] = text
    out.write(_dump(rec) + "\n")


def cmd_reconstruct(args, out):
    C = parse_circuit(_read(args.C))
    P = parse_poly(_read(args.P))
    G = build_gen(P, args.n)
    res = run_reconstruction(C, G, args.D, blind=args.blind, jobs=args.jobs)
    trace = res.trace()
    if args.ledger:
        ledger = size_ledger_report(G.k, res.pre.n, G.d, res.pre.Cp.size())
        trace.append({"stage": "ledger", **ledger})
    if args.trace:
        Path(args.trace).write_text("".join(_dump(r) + "\n" for r in trace))
    _write(args.out, serialize_poly(res.poly), out)
    if args.out and not args.trace:
        out.write("".join(_dump(r) + "\n" for r in trace))


def _report(res, args, out):
    rep = dict(res.report)
    H = res.hitting_set
    if args.points:
        Path(args.points).write_text(H.to_jsonl(_cap(args)))
    out.write(_dump(rep) + "\n")


def cmd_tau(args, out):
    res = tau_pipeline(args.d, args.s, args.t, args.n, measure_cap=_cap(args))
    _report(res, args, out)


def cmd_bootstrap(args, out):
    pts = load_points_jsonl(_read(args.H))
    if not pts and args.k is None:
        raise UsageError("empty point file: pass -k")
    k = args.k if args.k is not None else len(pts[0])
    H = HittingSet.from_points(pts, "file")
    res = bootstrap_pipeline(H, k, args.s, args.t, args.n)
    res.report["hard_poly"] = serialize_poly(res.source)
    if args.corpus:
        cap = _cap(args)
        pts_out = res.hitting_set.materialize(cap)
        rng = random.Random(args.seed)
        hits = 0
        nvars = res.generator.n + 1
        for _ in range(args.corpus):
            while True:
                C = random_circuit(rng, nvars, max_size=8, max_deg=args.s)
                if any(not p.is_zero() for p in expand_to_poly(C)):
                    break
            v = pit_deterministic(C, HittingSet.from_points(pts_out), args.jobs)
            hits += v.verdict == "nonzero"
        res.report["corpus_size"] = args.corpus
        res.report["corpus_hits"] = hits
    _report(res, args, out)


def cmd_params(args, out):
    p = derand_params(args.s, args.delta, args.k)
    out.write(_dump(p.to_json()) + "\n")


def cmd_transform(args, out):
    C = parse_circuit(_read(args.C))
    if args.pass_name == "coefficients":
        res, led = coefficient_circuits(C, args.var, _need(args.D, "-D"))
    elif args.pass_name == "derivative":
        res, led = derivative_circuit(C, args.var, args.order, _need(args.D, "-D"))
    elif args.pass_name == "strassen":
        res, led = strassen_homogenize(C, _need(args.degree, "--degree"))
    else:
        if args.B is None or args.degrees is None:
            raise UsageError("partial homogenization needs --B and --degrees")
        B = parse_circuit(_read(args.B))
        degs = [int(x) for x in args.degrees.split(",")]
        res, led = partial_homogenize(B, C, _need(args.degree, "--degree"), degs)
    text = serialize_circuit(res)
    line = _dump(led.to_json()) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        out.write(text)
    if args.ledger:
        Path(args.ledger).write_text(line)
    elif args.out:
        out.write(line)
    else:
        # keeps stdout a valid circuit file
        out.write("# ledger " + line)


def _need(value, flag):
    if value is None:
        raise UsageError(f"{flag} is required for this pass")
    return value


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="algen", description="Exact hitting-set generator toolkit.")
    ap.add_argument("--version", action="version", version=__version__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--jobs", type=_positive, default=None)
    common.add_argument("--enum-cap", type=_positive, default=None,
                        help="materialization cap (default: ALGEN_ENUM_CAP or 10^6)")
    sub = ap.add_subparsers(dest="cmd", required=True, metavar="COMMAND")

    p = sub.add_parser("gen", parents=[common], help="generator components of P")
    p.add_argument("-P", required=True)
    p.add_argument("-n", type=_nonneg, required=True)
    p.add_argument("-o", "--out")
    p.set_defaults(fn=cmd_gen)

    p = sub.add_parser("pit", parents=[common], help="identity test a circuit")
    p.add_argument("-C", required=True)
    p.add_argument("--mode", choices=["random", "grid", "points"], default="random")
    p.add_argument("--trials", type=_positive, default=20)
    p.add_argument("--degree", type=_nonneg, default=None, help="degree bound (default: syntactic)")
    p.add_argument("--modulus", type=_positive, default=None,
                   help="evaluate modulo this prime (speed mode; no guarantee over Q)")
    p.add_argument("--side", type=_positive, default=None)
    p.add_argument("--individual-degree", type=_nonneg, default=None)
    p.add_argument("--points", default=None, help="JSON-lines point file (mode points)")
    p.set_defaults(fn=cmd_pit)

    p = sub.add_parser("hitset", parents=[common], help="enumerate a hitting set")
    p.add_argument("--kind", choices=["grid", "gen", "derand"], default="grid")
    p.add_argument("--nvars", type=_positive)
    p.add_argument("--individual-degree", type=_nonneg)
    p.add_argument("-P")
    p.add_argument("-n", type=_nonneg, default=2)
    p.add_argument("-s", type=_positive, default=1)
    p.add_argument("-t", type=_positive, default=1)
    p.add_argument("--base", type=_positive, default=None)
    p.add_argument("--side", type=_positive, default=None)
    p.add_argument("--size-only", action="store_true")
    p.add_argument("-o", "--out")
    p.set_defaults(fn=cmd_hitset)

    p = sub.add_parser("annihilate", parents=[common], help="annihilator of Gen_P by nullspace")
    p.add_argument("-P", required=True)
    p.add_argument("-n", type=_nonneg, required=True)
    p.add_argument("-D", type=_positive, required=True)
    p.add_argument("-o", "--out")
    p.set_defaults(fn=cmd_annihilate)

    p = sub.add_parser("reconstruct", parents=[common], help="recover P from an annihilator")
    p.add_argument("-C", required=True)
    p.add_argument("-P", required=True, help="source of advice and of the final check")
    p.add_argument("-n", type=_nonneg, required=True)
    p.add_argument("-D", type=_positive, default=None)
    p.add_argument("--blind", action="store_true", help="skip every ground-truth comparison")
    p.add_argument("--trace")
    p.add_argument("--ledger", action="store_true", help="append the size ledger to the trace")
    p.add_argument("-o", "--out")
    p.set_defaults(fn=cmd_reconstruct)

    p = sub.add_parser("tau-demo", parents=[common], help="pipeline for (x-1)...(x-d)")
    p.add_argument("-d", type=_positive, required=True)
    p.add_argument("-s", type=_positive, default=2)
    p.add_argument("-t", type=_positive, default=1)
    p.add_argument("-n", type=_nonneg, default=None)
    p.add_argument("--points")
    p.set_defaults(fn=cmd_tau)

    p = sub.add_parser("bootstrap-demo", parents=[common], help="hard polynomial from a small set")
    p.add_argument("-H", required=True, help="JSON-lines point file")
    p.add_argument("-s", type=_positive, required=True)
    p.add_argument("-k", type=_positive, default=None)
    p.add_argument("-t", type=_positive, default=1)
    p.add_argument("-n", type=_nonneg, default=None)
    p.add_argument("--corpus", type=_nonneg, default=0, help="scan this many random nonzero circuits")
    p.add_argument("--points")
    p.set_defaults(fn=cmd_bootstrap)

    p = sub.add_parser("params", parents=[common], help="derandomization parameters")
    p.add_argument("-s", type=int, required=True)
    p.add_argument("--delta", type=_rational, required=True)
    p.add_argument("-k", type=_positive, required=True)
    p.set_defaults(fn=cmd_params)

    p = sub.add_parser("transform", parents=[common], help="circuit pass with size ledger")
    p.add_argument("--pass", dest="pass_name", required=True,
                   choices=["coefficients", "derivative", "strassen", "partial"])
    p.add_argument("-C", required=True)
    p.add_argument("--var", type=_nonneg, default=0)
    p.add_argument("--order", type=_nonneg, default=1)
    p.add_argument("-D", type=_nonneg, default=None)
    p.add_argument("--degree", type=_nonneg, default=None)
    p.add_argument("--B")
    p.add_argument("--degrees", help="comma-separated degrees of B's outputs")
    p.add_argument("--ledger")
    p.add_argument("-o", "--out")
    p.set_defaults(fn=cmd_transform)
    return ap


def main(argv=None, stdout=None, stderr=None) -> int:
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.jobs is None:
        args.jobs = default_jobs()
    try:
        args.fn(args, stdout)
    except UsageError as exc:
        stderr.write(f"algen {args.cmd}: error: {exc}\n")
        return 2
    except AlgenError as exc:
        stderr.write(_dump(exc.to_json()) + "\n")
        return 1
    except RecursionError:
        stderr.write(_dump({"error": "recursion", "message": "input too deep"}) + "\n")
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
