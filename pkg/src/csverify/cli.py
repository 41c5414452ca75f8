"""``csv-verify``: batch front-end for the verifiers.

Exit codes: 0 all checks pass, 1 some check failed, 2 usage error, 3 timeout.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor

from . import catalog, jobs
from .ideals import ComputationTimeout
from .report import Report

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_TIMEOUT = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _weights(text: str | None):
    if text is None:
        return None
    try:
        w = tuple(int(x) for x in text.replace(" ", "").split(","))
    except ValueError:
        raise UsageError(f"--weights expects s,d1,d2,d3 integers, got {text!r}") from None
    if len(w) != 4:
        raise UsageError("--weights expects exactly four integers s,d1,d2,d3")
    return w


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--emit", choices=("json", "text"), default="text")
    common.add_argument("--timeout", type=float, default=None, help="seconds for Groebner computations")
    common.add_argument("--seed", type=int, default=jobs.DEFAULT_SEED)
    common.add_argument("--jobs", type=int, default=1, help="run independent jobs in N processes")
    common.add_argument("--verbose", action="store_true", help="add timings to the reports")

    p = argparse.ArgumentParser(prog="csv-verify", description="Verify conical symplectic hypersurface computations.")
    sub = p.add_subparsers(dest="command", required=True)

    x = sub.add_parser("xn", parents=[common], help="verify the slices X_n")
    x.add_argument("--n", type=int, action="append", help="repeatable; default 2..10")
    x.add_argument("--s", type=int, default=2)
    x.add_argument("--t", type=int, default=0)

    s = sub.add_parser("surface", parents=[common], help="verify the surface families")
    s.add_argument("--family", action="append", help="smooth, An, Dn, E6, E7, E8; repeatable; default all")
    s.add_argument("--weights", help="s,d1,d2,d3 (only with a single --family)")

    d = sub.add_parser("degree-tuples", parents=[common], help="enumerate the degree-tuple cases")
    d.add_argument("--s", type=int, default=1)
    d.add_argument("--a-max", type=int, default=10)

    e = sub.add_parser("eliminate-exceptional", parents=[common], help="27-parameter Jacobi system")
    e.add_argument("--order", choices=("grevlex", "lex"), default="grevlex")

    w = sub.add_parser("whomog", parents=[common], help="w-homogenization round trip")
    w.add_argument("--count", type=int, default=50)
    w.add_argument("--n", type=int, action="append", help="repeatable; default 2 and 3")

    c = sub.add_parser("closure", parents=[common], help="monomial subalgebra closure")
    c.add_argument("--n", type=int, default=4, help="largest n for the lifted algebras")

    o = sub.add_parser("orbifold", parents=[common], help="orbifold tuple and bundle atlas")
    o.add_argument("--max-index", type=int, default=30)

    a = sub.add_parser("all", parents=[common], help="full suite")
    a.add_argument("--order", choices=("grevlex", "lex"), default="grevlex")
    return p


def plan(args) -> list[tuple[str, tuple]]:
    """Job list ``(kind, params)`` for the parsed arguments."""
    cmd = args.command
    if cmd == "xn":
        ns = args.n or list(range(2, 11))
        for n in ns:
            catalog.xn_degrees(n, args.s, args.t)
        return [("xn", (n, args.s, args.t)) for n in ns]
    if cmd == "surface":
        w = _weights(args.weights)
        if w is not None and (not args.family or len(args.family) != 1):
            raise UsageError("--weights needs exactly one --family")
        if args.family:
            fams = [jobs.parse_family(f, w) for f in args.family]
        else:
            fams = catalog.surface_rows()
        for f in fams:
            f.check_weights()
        return [("surface", (f.kind, f.n, f.weights, args.timeout)) for f in fams]
    if cmd == "degree-tuples":
        if args.s < 1 or args.a_max < 1:
            raise UsageError("--s and --a-max must be positive")
        return [("degree-tuples", (args.s, args.a_max))]
    if cmd == "eliminate-exceptional":
        return [("eliminate", (args.order, args.timeout))]
    if cmd == "whomog":
        return [("whomog", (args.seed, args.count, tuple(args.n or (2, 3))))]
    if cmd == "closure":
        return [("closure", (args.n,))]
    if cmd == "orbifold":
        if args.max_index < 2:
            raise UsageError("--max-index must be at least 2")
        return [("orbifold", (args.max_index,))]
    out = [("xn", (n, 2, 0)) for n in range(2, 11)]
    out += [("xn", (n, 4, 1)) for n in range(2, 11)]
    out += [("surface", (f.kind, f.n, f.weights, args.timeout)) for f in catalog.surface_rows()]
    out += [("degree-tuples", (1, 10)), ("eliminate", (args.order, args.timeout))]
    out += [("whomog", (args.seed, 50, (2, 3))), ("closure", (4,)), ("orbifold", (30,))]
    return out


def run_job(kind: str, params: tuple, verbose: bool = False) -> Report:
    start = time.perf_counter()
    if kind == "xn":
        rep = jobs.xn_job(*params)
    elif kind == "surface":
        k, n, w, timeout = params
        rep = jobs.surface_job(catalog.SurfaceFamily(k, n, w), timeout)
    elif kind == "degree-tuples":
        rep = jobs.degree_tuples_job(*params)
    elif kind == "eliminate":
        rep = jobs.eliminate_job(*params)
    elif kind == "whomog":
        seed, count, ns = params
        rep = jobs.whomog_job(seed, count, ns)
    elif kind == "closure":
        rep = jobs.closure_job(*params)
    elif kind == "orbifold":
        rep = jobs.orbifold_job(*params)
    else:
        raise ValueError(kind)
    if verbose:
        rep.data["elapsed_s"] = round(time.perf_counter() - start, 3)
    return rep


def _run_safe(item):
    kind, params, verbose = item
    try:
        return run_job(kind, params, verbose)
    except ComputationTimeout as exc:
        return exc


def render_text(reports: list[Report]) -> str:
    lines = []
    for rep in reports:
        lines.append(f"== {rep.job}: {'PASS' if rep.passed else 'FAIL'}")
        width = max((len(c.name) for c in rep.checks), default=0)
        for c in rep.checks:
            row = f"  {c.name.ljust(width)}  {c.status}"
            if c.witness:
                row += f"  {c.witness}"
            lines.append(row)
        for key, value in rep.data.items():
            if isinstance(value, list) and value and isinstance(value[0], (dict, list)):
                lines.append(f"  {key}: {len(value)} rows (use --emit json)")
            else:
                lines.append(f"  {key}: {json.dumps(value) if not isinstance(value, str) else value}")
    return "\n".join(lines) + "\n"


def render_json(reports: list[Report]) -> str:
    if len(reports) == 1:
        payload = reports[0].to_dict()
    else:
        payload = {"passed": all(r.passed for r in reports), "reports": [r.to_dict() for r in reports]}
    return json.dumps(payload, indent=2) + "\n"


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        todo = plan(args)
    except (UsageError, ValueError) as exc:
        print(f"csv-verify: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    items = [(k, p, args.verbose) for k, p in todo]
    if args.jobs > 1 and len(items) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_run_safe, items))
    else:
        results = [_run_safe(it) for it in items]
    for r in results:
        if isinstance(r, ComputationTimeout):
            print(f"csv-verify: timeout: {r}", file=sys.stderr)
            return EXIT_TIMEOUT
    reports = sorted(results, key=lambda r: r.job) if args.command == "all" else results
    out = render_json(reports) if args.emit == "json" else render_text(reports)
    sys.stdout.write(out)
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
