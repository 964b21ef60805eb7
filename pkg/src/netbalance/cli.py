"""Command-line front end: network summaries, balance reports, chain verdicts."""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional

import numpy as np

from . import balance as bal
from . import equilibrium as eq
from . import markov as mk
from . import mixedgraph as mg
from . import network as nw
from .numeric import Tolerance

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_NOT_CONVERGED = 2
EXIT_INCONSISTENT = 3

CHECK = "✓"
CROSS = "✗"


def _add_common_flags(p: argparse.ArgumentParser, formats=("text", "json")):
    p.add_argument("--tol-rel", type=float, default=Tolerance().rel)
    p.add_argument("--tol-abs", type=float, default=Tolerance().abs)
    p.add_argument("--cycle-cap", type=int, default=mg.DEFAULT_CYCLE_CAP)
    p.add_argument("--format", choices=formats, default="text")
    p.add_argument("--out", default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="netbalance",
        description="Balance analysis for reversible reaction networks and "
        "continuous-time Markov chains.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_sum = sub.add_parser("summary", help="structural counts of a network file")
    p_sum.add_argument("network")
    _add_common_flags(p_sum)

    p_bal = sub.add_parser("balance", help="balance report at a state")
    p_bal.add_argument("network")
    group = p_bal.add_mutually_exclusive_group(required=True)
    group.add_argument("--state", help="comma-separated concentrations")
    group.add_argument("--solve", action="store_true",
                       help="analyze a numerically located equilibrium")
    group.add_argument("--rates-table",
                       help="JSON rate table for table-mode networks")
    p_bal.add_argument("--solve-tol", type=float, default=1e-12)
    p_bal.add_argument("--max-iter", type=int, default=200)
    p_bal.add_argument("--assume-general-kinetics", action="store_true")
    _add_common_flags(p_bal, formats=("text", "json", "dot"))

    p_mc = sub.add_parser("mc", help="stationarity/reversibility of a chain")
    p_mc.add_argument("chain")
    p_mc.add_argument("measure")
    _add_common_flags(p_mc, formats=("text", "json", "dot"))
    return parser


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _tol(args) -> Tolerance:
    return Tolerance(rel=args.tol_rel, abs=args.tol_abs)


def _render_summary(summary: nw.NetworkSummary) -> str:
    d = summary.to_json_dict()
    return (
        f"m (complexes):            {d['m']}\n"
        f"l (linkage classes):      {d['l']}\n"
        f"s (stoichiometric rank):  {d['s']}\n"
        f"r (reversible reactions): {d['r']}\n"
        f"delta = m - l - s = {d['delta']}\n"
        f"gamma = r - m + l = {d['gamma']}\n"
    )


def cmd_summary(args) -> int:
    net = nw.parse_network(_read(args.network))
    summary = nw.network_summary(net)
    if args.format == "json":
        _emit(json.dumps(summary.to_json_dict(), indent=2) + "\n", args.out)
    else:
        _emit(_render_summary(summary), args.out)
    return EXIT_OK


def _mark(flag: bool) -> str:
    return CHECK if flag else CROSS


def _render_balance(rep: bal.BalanceReport, labels, header: str) -> str:
    lines = [header]
    names = [
        ("DB", "db"), ("CB", "cb"), ("wCB", "wcb"),
        ("FB", "fb"), ("sCycB", "scycb"), ("CycB", "cycb"),
    ]
    preds = rep.predicates()
    for disp, key in names:
        wit = rep.witnesses.get(key)
        extra = ""
        if wit is not None and not preds[key]:
            if isinstance(wit, mg.Cycle):
                extra = f"  (witness {wit.format(labels)})"
            elif key == "fb":
                cyc, fwd, bwd = wit
                arrow = "→".join(str(labels[v]) for v in cyc)
                extra = f"  (witness {arrow}: products {fwd:g} vs {bwd:g})"
            elif isinstance(wit, tuple):
                extra = f"  (witness {labels[wit[0]]} <-> {labels[wit[1]]})"
            else:
                extra = f"  (witness {labels[wit]})"
        lines.append(f"{disp:6s}{_mark(preds[key])}{extra}")
    if rep.truncated:
        lines.append("warning: cycle enumeration truncated at cap")
    return "\n".join(lines) + "\n"


def _load_rate_table(net: nw.ReactionNetwork, path: str) -> dict:
    data = json.loads(_read(path))
    index = {lab: i for i, lab in enumerate(net.complex_labels)}
    table = {}
    for entry in data:
        try:
            i = index[entry["from"]]
            j = index[entry["to"]]
        except KeyError as exc:
            raise bal.BalanceError(f"unknown complex label {exc}") from exc
        table[(i, j)] = entry["rate"]
    return table


def cmd_balance(args) -> int:
    net = nw.parse_network(_read(args.network))
    tol = _tol(args)
    header = ""
    if args.rates_table:
        table = _load_rate_table(net, args.rates_table)
        rep = bal.balance_report(
            net, table=table, tol=tol, cap=args.cycle_cap,
            assume_general_kinetics=args.assume_general_kinetics,
        )
        header = "rates: explicit table"
    else:
        if args.solve:
            result = eq.find_equilibrium(
                net, tol=args.solve_tol, max_iter=args.max_iter
            )
            if not result.converged:
                sys.stderr.write(
                    f"equilibrium search did not converge "
                    f"(residual {result.residual:g})\n"
                )
                return EXIT_NOT_CONVERGED
            x = result.x
            header = (
                "equilibrium x = ["
                + ", ".join(f"{v:.12g}" for v in x)
                + f"], residual {result.residual:.3g}"
            )
        else:
            x = np.array([float(v) for v in args.state.split(",")])
            header = "state x = [" + ", ".join(f"{v:g}" for v in x) + "]"
        rep = bal.balance_report(net, x=x, tol=tol, cap=args.cycle_cap)
    labels = net.complex_labels
    if args.format == "json":
        _emit(json.dumps(rep.to_json_dict(labels), indent=2) + "\n", args.out)
    elif args.format == "dot":
        _emit(mg.to_dot(rep.induced, labels=labels), args.out)
    else:
        _emit(_render_balance(rep, labels, header), args.out)
    return EXIT_OK


def cmd_mc(args) -> int:
    mc = mk.chain_from_json_dict(json.loads(_read(args.chain)))
    mu = mk.measure_from_json_dict(json.loads(_read(args.measure)))
    tol = _tol(args)
    stationary, stat_wit = mk.is_stationary(
        mc, mu, tol, interior_only=bool(mc.boundary)
    )
    reversible, rev_wit = mk.is_reversible(mc, mu, tol)
    kolmogorov, kol_wit, kol_trunc = mk.kolmogorov_cycle_check(
        mc, cap=args.cycle_cap, tol=tol
    )
    graph = mk.mc_induced_graph(mc, mu, tol)
    if not stationary:
        sys.stderr.write(f"measure is not stationary (witness state {stat_wit})\n")
        return EXIT_INPUT
    verdict = mk.reversibility_verdict(mc, mu, tol)
    if args.format == "dot":
        _emit(mg.to_dot(graph), args.out)
        return EXIT_OK
    payload = {
        "stationary": stationary,
        "reversible": reversible,
        "kolmogorov": kolmogorov,
        "kolmogorov_truncated": kol_trunc,
        "verdict": verdict.to_json_dict(),
    }
    if args.format == "json":
        _emit(json.dumps(payload, indent=2) + "\n", args.out)
        return EXIT_OK if verdict.kind != mk.INCONSISTENT else EXIT_INCONSISTENT
    lines = [
        f"stationary   {_mark(stationary)}"
        + ("" if not mc.boundary else "  (interior states)"),
        f"reversible   {_mark(reversible)}"
        + (f"  (witness transition {rev_wit})" if rev_wit else ""),
        f"kolmogorov   {_mark(kolmogorov)}"
        + (
            f"  (cycle {'→'.join(map(str, kol_wit[0]))}: "
            f"{kol_wit[1]:g} vs {kol_wit[2]:g})"
            if kol_wit
            else ""
        ),
    ]
    if verdict.kind == mk.REVERSIBLE:
        lines.append("verdict: reversible")
    elif verdict.kind == mk.DIRECTED_CYCLE:
        lines.append(f"verdict: directed cycle {verdict.cycle.format()}")
    elif verdict.kind == mk.BOUNDARY_PATH:
        arrow = "→".join(str(v) for v in verdict.path)
        lines.append(f"verdict: boundary path {arrow}")
        lines.append(f"note: {verdict.note}")
    else:
        lines.append("verdict: INCONSISTENT (theorem violation)")
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK if verdict.kind != mk.INCONSISTENT else EXIT_INCONSISTENT


def _read(path: str) -> str:
    with open(path) as fh:
        return fh.read()


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "summary":
            return cmd_summary(args)
        if args.command == "balance":
            return cmd_balance(args)
        if args.command == "mc":
            return cmd_mc(args)
        parser.error("unknown command")
    except bal.InternalInconsistencyError as exc:
        sys.stderr.write(f"internal inconsistency: {exc}\n")
        return EXIT_INCONSISTENT
    except (nw.NetworkError, bal.BalanceError, mk.MarkovChainError,
            mg.GraphError, OSError, json.JSONDecodeError, ValueError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INPUT
    return EXIT_INPUT


if __name__ == "__main__":
    raise SystemExit(main())
