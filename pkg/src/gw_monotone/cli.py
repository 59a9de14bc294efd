"""Command-line front end.

One binary, subcommand per operation.  Exact values are always printed
as 'p/q' (or integer) strings; decimal fields appear only for Monte
Carlo estimates.  Exit codes: 0 success, 1 failed --assert-* or failed
reproduction check, 2 usage or computation error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction

from . import sampling
from .coupling import bound_scan, check_p1, check_pa, check_pb, threshold_scan
from .model import (
    OffspringModel,
    ZeroMassError,
    binomial,
    conditioned_dist,
    custom,
    epsilon,
    expected_profile,
    format_rational,
    geometric_half,
    limit_profile,
    parse_rational,
    poisson_one,
)
from .reproduce import reproduce_paper
from .sampling import RngSpec, SpineConfig, sample_spine, sample_uniform_plane
from .trees import enumerate_trees


class UsageError(ValueError):
    pass


def parse_family(spec: str) -> OffspringModel:
    """Parse --family values: ge | po | binomial:d | eps:p/q | custom:<json path>."""
    if spec == "ge":
        return geometric_half()
    if spec == "po":
        return poisson_one()
    if spec.startswith("binomial:"):
        try:
            return binomial(int(spec.split(":", 1)[1]))
        except ValueError as exc:
            raise UsageError(f"--family {spec}: {exc}") from exc
    if spec.startswith("eps:"):
        try:
            return epsilon(parse_rational(spec.split(":", 1)[1]))
        except (ValueError, ZeroDivisionError) as exc:
            raise UsageError(f"--family {spec}: {exc}") from exc
    if spec.startswith("custom:"):
        path = spec.split(":", 1)[1]
        try:
            data = json.loads(open(path).read())
            return custom(data["weights"], data.get("sigma2"))
        except (OSError, KeyError, ValueError) as exc:
            raise UsageError(f"--family {spec}: {exc}") from exc
    raise UsageError(f"--family: unknown family {spec!r}")


def _emit(rows: list, columns: list, fmt: str) -> None:
    """Render rows (list of dicts) as json, csv, or an aligned table."""
    if fmt == "json":
        print(json.dumps(rows, indent=2))
        return
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({c: row.get(c, "") for c in columns})
        print(buf.getvalue(), end="")
        return
    widths = {c: max(len(c), *(len(str(r.get(c, ""))) for r in rows)) if rows else len(c)
              for c in columns}
    print("  ".join(c.ljust(widths[c]) for c in columns))
    for row in rows:
        print("  ".join(str(row.get(c, "")).ljust(widths[c]) for c in columns))


def _assert_exit(args, holds: bool) -> int:
    if getattr(args, "assert_holds", False):
        return 0 if holds else 1
    if getattr(args, "assert_fails", False):
        return 0 if not holds else 1
    return 0


def _cmd_enumerate(args) -> int:
    trees = enumerate_trees(args.n, args.dmax)
    rows = [{"index": i, "code": json.dumps(t.to_json(), separators=(",", ":"))}
            for i, t in enumerate(trees)]
    _emit(rows, ["index", "code"], args.format)
    return 0


def _cmd_dist(args) -> int:
    dist = conditioned_dist(parse_family(args.family), args.n)
    rows = [{"code": json.dumps(t.to_json(), separators=(",", ":")),
             "prob": format_rational(p)} for t, p in dist.probs.items()]
    _emit(rows, ["code", "prob"], args.format)
    return 0


def _cmd_profile(args) -> int:
    model = parse_family(args.family)
    vec = expected_profile(model, args.n, args.k)
    rows = [{"k": k, "expected": format_rational(v)} for k, v in enumerate(vec)]
    if model.sigma2 is not None:
        for row in rows:
            row["limit"] = format_rational(limit_profile(model, row["k"]))
        _emit(rows, ["k", "expected", "limit"], args.format)
    else:
        _emit(rows, ["k", "expected"], args.format)
    return 0


def _cmd_check(args) -> int:
    model = parse_family(args.family)
    if args.property == "p1":
        res = check_p1(model, args.n)
        payload = res.to_json(model)
        if args.format == "json":
            print(json.dumps(payload, indent=2))
        else:
            brief = {k: v for k, v in payload.items() if k != "coupling"}
            print(json.dumps(brief, separators=(",", ":")))
        return _assert_exit(args, res.feasible)
    if args.k is None:
        raise UsageError("--k is required for pa/pb checks")
    res = (check_pa if args.property == "pa" else check_pb)(model, args.n, args.k)
    payload = res.to_json(args.property.upper(), model, args.n, args.k)
    print(json.dumps(payload, indent=2 if args.format == "json" else None))
    return _assert_exit(args, res.holds)


def _cmd_scan(args) -> int:
    points = [parse_rational(p) for p in args.grid.split(",")]
    rows = threshold_scan(args.property, args.n, args.k, points)
    out = [{"eps": format_rational(r["eps"]), "gap": format_rational(r["gap"]),
            "status": r["status"]} for r in rows]
    _emit(out, ["eps", "gap", "status"], args.format)
    return 0


def _cmd_bound(args) -> int:
    best, (k, n) = bound_scan(parse_family(args.family), args.kmax, args.nmax)
    print(json.dumps({"max_ratio": format_rational(best), "k": k, "n": n}))
    return 0


def _cmd_spine(args) -> int:
    model = parse_family(args.family)
    config = SpineConfig(model, args.depth, args.reps,
                         RngSpec(args.seed), streams=args.streams)
    est = sample_spine(config)
    targets = None
    if model.sigma2 is not None:
        targets = {k: limit_profile(model, k) for k in range(args.depth)}
    print(json.dumps(est.to_json(targets), indent=2))
    return 0


def _cmd_sample(args) -> int:
    rng = RngSpec(args.seed).make()
    rows = []
    for i in range(args.count):
        if args.method == "uniform":
            t = sample_uniform_plane(args.n, rng)
        else:
            t = sampling.sample_conditioned(parse_family(args.family), args.n,
                                            rng, method=args.method)
            if t is sampling.EXHAUSTED:
                print("rejection budget exhausted", file=sys.stderr)
                return 2
        rows.append({"index": i, "code": json.dumps(t.to_json(), separators=(",", ":"))})
    _emit(rows, ["index", "code"], args.format)
    return 0


def _cmd_reproduce(args) -> int:
    code = reproduce_paper(args.out)
    print(f"report written to {args.out} (exit {code})")
    return code


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gw-monotone",
        description="Exact analysis of conditioned Galton-Watson trees: "
                    "conditioned laws, coupling feasibility, profile bounds, "
                    "and Monte Carlo cross-checks.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, family=True, n=True):
        if family:
            p.add_argument("--family", required=True,
                           help="ge | po | binomial:d | eps:p/q | custom:<json path>")
        if n:
            p.add_argument("--n", type=int, required=True)
        p.add_argument("--format", choices=["json", "csv", "table"], default="table")

    p = sub.add_parser("enumerate", help="list plane trees of a given size")
    common(p, family=False)
    p.add_argument("--dmax", type=int, default=None)
    p.set_defaults(func=_cmd_enumerate)

    p = sub.add_parser("dist", help="exact conditioned distribution")
    common(p)
    p.set_defaults(func=_cmd_dist)

    p = sub.add_parser("profile", help="exact expected profile E W_k(T_n)")
    common(p)
    p.add_argument("--k", type=int, default=None, help="largest level (default n-1)")
    p.set_defaults(func=_cmd_profile)

    p = sub.add_parser("check", help="decide p1 / pa / pb with exact certificates")
    p.add_argument("property", choices=["p1", "pa", "pb"])
    common(p)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--assert-holds", action="store_true",
                   help="exit 1 unless the verdict is holds/feasible")
    p.add_argument("--assert-fails", action="store_true",
                   help="exit 1 unless the verdict is fails/infeasible")
    p.set_defaults(func=_cmd_check)

    p = sub.add_parser("scan", help="sign of the pa/pb gap over the eps family")
    p.add_argument("property", choices=["pa", "pb"])
    common(p, family=False)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--grid", required=True, help="comma-separated rationals")
    p.set_defaults(func=_cmd_scan)

    p = sub.add_parser("bound", help="max E W_k(T_n)/k over a (k, n) grid")
    p.add_argument("--family", required=True)
    p.add_argument("--kmax", type=int, required=True)
    p.add_argument("--nmax", type=int, required=True)
    p.add_argument("--format", choices=["json", "csv", "table"], default="json")
    p.set_defaults(func=_cmd_bound)

    p = sub.add_parser("spine", help="simulate the size-biased infinite tree")
    p.add_argument("--family", required=True)
    p.add_argument("--depth", type=int, required=True)
    p.add_argument("--reps", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--streams", type=int, default=1)
    p.set_defaults(func=_cmd_spine)

    p = sub.add_parser("sample", help="draw conditioned or uniform plane trees")
    p.add_argument("--family", default="ge")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--method", choices=["exact_table", "rejection", "uniform"],
                   default="exact_table")
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=["json", "csv", "table"], default="table")
    p.set_defaults(func=_cmd_sample)

    p = sub.add_parser("reproduce-paper", help="run the full exact report bundle")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_reproduce)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if exc.code is not None else 2
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ZeroMassError, ValueError) as exc:
        print(f"computation error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
