"""Command-line front end.

Exit status: 0 on success, 1 on invalid input, 2 when a budget is exceeded
or root finding fails. Results go to ``--output`` (stdout by default),
diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import asdict

from .errors import BudgetExceededError, GraphParseError, RootFindingError
from .experiments import (
    convergence_sweep,
    expectation_identity_check,
    records_to_csv,
    records_to_json,
    run_zero_experiment,
)
from .graph import Graph, parse_edge_list, random_gnp
from .pipeline import ApproxConfig, approximate, exact_result, extract_subset
from .zerofree import rho_for, solve_params


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def parse_generator(spec: str) -> Graph:
    """``gnp:n:p:seed``, ``complete:n`` or ``empty:n``."""
    parts = spec.split(":")
    try:
        if parts[0] == "gnp" and len(parts) == 4:
            return random_gnp(int(parts[1]), float(parts[2]), int(parts[3]))
        if parts[0] in ("complete", "empty") and len(parts) == 2:
            n = int(parts[1])
            return Graph.complete(n) if parts[0] == "complete" else Graph.empty(n)
    except ValueError as exc:
        raise UsageError(f"bad generator spec {spec!r}: {exc}") from None
    raise UsageError(f"bad generator spec {spec!r}; expected gnp:n:p:seed, complete:n or empty:n")


def load_graph(args) -> Graph:
    if (args.graph is None) == (args.gen is None):
        raise UsageError("give exactly one of --graph and --gen")
    if args.gen is not None:
        return parse_generator(args.gen)
    try:
        with open(args.graph, encoding="utf-8") as fh:
            return parse_edge_list(fh)
    except OSError as exc:
        raise UsageError(f"cannot read graph file {args.graph!r}: {exc.strerror}") from None


def _graph_opts(p):
    p.add_argument("--graph", help="edge-list file (1-based 'n m' header, then 'u v' lines)")
    p.add_argument("--gen", help="generator spec, e.g. gnp:10:0.5:7")


def _out_opts(p, default_format="json"):
    p.add_argument("--output", "-o", help="output file (default: stdout)")
    p.add_argument("--format", choices=("json", "csv"), default=default_format)
    p.add_argument("--threads", type=int, default=1)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="densepart", description="Density partition functions of graphs.")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("approx", help="estimate ln den_m(G; gamma)")
    _graph_opts(p)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--gamma", type=float)
    p.add_argument("--alpha", type=float)
    p.add_argument("--mode", choices=("direct", "rigorous"), default="direct")
    p.add_argument("--order", type=int, default=3)
    p.add_argument("--eps", type=float)
    p.add_argument("--budget", type=int)
    p.add_argument("--no-strict", action="store_true", help="rigorous mode: run below the n >= omega*m threshold")
    p.add_argument("--rho", type=float, help="rigorous mode: override the strip half-width (uncertified)")
    _out_opts(p)

    p = sub.add_parser("exact", help="brute-force ln den_m(G; gamma)")
    _graph_opts(p)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--gamma", type=float, required=True)
    _out_opts(p)

    p = sub.add_parser("extract", help="find a dense m-subset by successive conditioning")
    _graph_opts(p)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--gamma", type=float, required=True)
    p.add_argument("--engine", choices=("exact", "approximate"), default="exact")
    _out_opts(p)

    p = sub.add_parser("params", help="zero-free region parameters")
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--gamma", type=float, help="also derive the strip half-width rho")
    _out_opts(p)

    p = sub.add_parser("zeros", help="root locations of random +-1 partition polynomials")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--r", type=float, required=True, dest="r_param")
    p.add_argument("--tau", type=float, required=True)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--summary", help="also write the summary JSON here (csv format)")
    _out_opts(p, default_format="csv")

    p = sub.add_parser("check-identity", help="exact second-moment identity for random sign matrices")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--radius", type=float, required=True)
    p.add_argument("--theta", type=float, default=0.0)
    _out_opts(p)

    p = sub.add_parser("sweep", help="direct-estimate error versus brute force")
    p.add_argument("--config", help="JSON grid: graphs, m, alpha, orders")
    p.add_argument("--n", type=int, default=10)
    p.add_argument("--p", type=float, default=0.5)
    p.add_argument("--seeds", default="0:10", help="start:stop range of G(n,p) seeds")
    p.add_argument("--m", default="4", help="comma-separated subset sizes")
    p.add_argument("--alpha", default="0.2", help="comma-separated alphas")
    p.add_argument("--orders", default="1,2,3")
    _out_opts(p, default_format="csv")
    return parser


def _floats(text: str) -> list:
    return [float(x) for x in text.split(",") if x]


def _ints(text: str) -> list:
    return [int(x) for x in text.split(",") if x]


def _dump_json(obj) -> str:
    return json.dumps(obj, indent=2, allow_nan=False) + "\n"


def _row_csv(row: dict) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(list(row))
    writer.writerow(["" if v is None else (repr(v) if isinstance(v, float) else v) for v in row.values()])
    return buf.getvalue()


def _emit_row(row: dict, fmt: str) -> str:
    if fmt == "json":
        return _dump_json(row)
    flat = {k: (" ".join(map(str, v)) if isinstance(v, list) else v) for k, v in row.items()}
    return _row_csv(flat)


def _short_int(digits: str) -> str:
    return digits if len(digits) <= 12 else f"~{digits[0]}.{digits[1:3]}e{len(digits) - 1}"


def cmd_approx(args) -> str:
    g = load_graph(args)
    kw = {}
    if args.budget is not None:
        kw["budget"] = args.budget
    cfg = ApproxConfig(
        m=args.m,
        gamma=args.gamma,
        alpha=args.alpha,
        mode=args.mode,
        order=args.order,
        eps=args.eps,
        strict=not args.no_strict,
        rho=args.rho,
        **kw,
    )
    res = approximate(g, cfg)
    if res.budget_limited:
        print(
            f"warning: order capped at {res.order_used}; the requested eps needs r={_short_int(res.details['r_needed'])}",
            file=sys.stderr,
        )
    return _emit_row(res.to_json_dict(), args.format)


def cmd_exact(args) -> str:
    g = load_graph(args)
    return _emit_row(exact_result(g, args.m, args.gamma).to_json_dict(), args.format)


def cmd_extract(args) -> str:
    g = load_graph(args)
    found = extract_subset(g, args.m, args.gamma, engine=args.engine)
    try:
        res = exact_result(g, args.m, args.gamma)
    except BudgetExceededError:
        res = approximate(g, ApproxConfig(m=args.m, gamma=args.gamma))
    res.subset = list(found.subset)
    print(f"subset density {found.sigma} = {found.value:.6f}", file=sys.stderr)
    return _emit_row(res.to_json_dict(), args.format)


def cmd_params(args) -> str:
    params = solve_params(args.delta, args.m)
    row = {k: v for k, v in asdict(params).items()}
    if args.gamma is not None:
        row["rho"] = rho_for(params, args.gamma, args.m)
    row["min_n"] = params.min_n()
    return _emit_row(row, args.format)


def cmd_zeros(args) -> str:
    records, summary = run_zero_experiment(
        args.n, args.m, args.r_param, args.tau, args.trials, args.seed, threads=args.threads
    )
    print(
        f"in-disc frequency {summary.frequency:.4f} ({summary.in_disc}/{summary.trials - summary.failures}), "
        f"bound {summary.bound:.4f}, failures {summary.failures}, above threshold: {summary.above_threshold}",
        file=sys.stderr,
    )
    if args.format == "json":
        return records_to_json(records, summary) + "\n"
    if args.summary:
        with open(args.summary, "w", encoding="utf-8") as fh:
            fh.write(_dump_json(asdict(summary)))
    return records_to_csv(records)


def cmd_check_identity(args) -> str:
    lhs, rhs = expectation_identity_check(args.n, args.m, args.radius, args.theta)
    row = {"n": args.n, "m": args.m, "radius": args.radius, "theta": args.theta}
    row.update(lhs=lhs, rhs=rhs, abs_diff=abs(lhs - rhs))
    return _emit_row(row, args.format)


def cmd_sweep(args) -> str:
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                grid = json.load(fh)
        except OSError as exc:
            raise UsageError(f"cannot read config {args.config!r}: {exc.strerror}") from None
        except json.JSONDecodeError as exc:
            raise UsageError(f"config {args.config!r} is not valid JSON: {exc}") from None
    else:
        start, _, stop = args.seeds.partition(":")
        grid = {
            "graphs": [{"kind": "gnp", "n": args.n, "p": args.p, "seeds": list(range(int(start), int(stop)))}],
            "m": _ints(args.m),
            "alpha": _floats(args.alpha),
            "orders": _ints(args.orders),
        }
    records = convergence_sweep(grid)
    if args.format == "json":
        return records_to_json(records) + "\n"
    return records_to_csv(records, exclude=())


COMMANDS = {
    "approx": cmd_approx,
    "exact": cmd_exact,
    "extract": cmd_extract,
    "params": cmd_params,
    "zeros": cmd_zeros,
    "check-identity": cmd_check_identity,
    "sweep": cmd_sweep,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError("missing subcommand; choose one of " + ", ".join(COMMANDS))
        if getattr(args, "threads", 1) < 1:
            raise UsageError("--threads must be at least 1")
        text = COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (GraphParseError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (BudgetExceededError, RootFindingError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if args.output:
        try:
            with open(args.output, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        except OSError as exc:
            print(f"error: cannot write {args.output!r}: {exc.strerror}", file=sys.stderr)
            return 1
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
