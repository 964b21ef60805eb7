"""State-dependent balance analysis: rate evaluation, induced graph, and the
detailed / complex / formal / cycle balance predicates with witnesses."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

import numpy as np

from .mixedgraph import (
    DEFAULT_CYCLE_CAP,
    Cycle,
    MixedGraph,
    find_directed_cycle,
    find_weakly_directed_cycle,
    is_vertex_balanced,
    make_mixed_graph,
)
from .network import ReactionNetwork
from .numeric import DEFAULT_TOLERANCE, Tolerance


class BalanceError(ValueError):
    pass


class ModeMismatchError(BalanceError):
    pass


class NonFiniteRateError(BalanceError):
    pass


class MissingEdgeError(BalanceError):
    pass


class NegativeRateError(BalanceError):
    pass


class InternalInconsistencyError(RuntimeError):
    """A tolerance-classification conflict with a proven implication."""


# A rate vector maps every directed edge (i, j) of the reaction graph to
# a finite nonnegative rate.
RateVector = Mapping


def as_state(net: ReactionNetwork, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape != (net.n_species,):
        raise BalanceError(
            f"state must have {net.n_species} entries, got shape {x.shape}"
        )
    if np.any(x < 0):
        raise BalanceError("state must be componentwise nonnegative")
    return x


def _monomial(x: np.ndarray, y: np.ndarray) -> float:
    # 0^0 := 1 so the zero complex and boundary states evaluate correctly
    out = 1.0
    for xi, yi in zip(x, y):
        if yi == 0.0:
            continue
        out *= xi ** yi
    return out


def evaluate_rates(net: ReactionNetwork, x) -> dict:
    """Mass-action rates r_ij = k_ij * prod_s x_s^(y(i)_s) on every edge."""
    if not net.mass_action:
        raise ModeMismatchError("network is in table mode; use evaluate_rates_table")
    x = as_state(net, x)
    monomials = [_monomial(x, net.complex_vector(i)) for i in range(net.n_complexes)]
    rates = {}
    for rx in net.reactions:
        rates[(rx.i, rx.j)] = rx.kf * monomials[rx.i]
        rates[(rx.j, rx.i)] = rx.kr * monomials[rx.j]
    for edge, val in rates.items():
        if not math.isfinite(val):
            raise NonFiniteRateError(f"rate on edge {edge} is not finite")
    return rates


def evaluate_rates_table(net: ReactionNetwork, table: Mapping) -> dict:
    """Validated passthrough of an explicit per-edge rate table."""
    rates = {}
    for edge in net.directed_edges():
        if edge not in table:
            raise MissingEdgeError(f"table is missing edge {edge}")
        val = float(table[edge])
        if val < 0:
            raise NegativeRateError(f"negative rate {val} on edge {edge}")
        if not math.isfinite(val):
            raise NonFiniteRateError(f"rate on edge {edge} is not finite")
        rates[edge] = val
    return rates


def induced_graph(
    net: ReactionNetwork, rates: RateVector, tol: Tolerance = DEFAULT_TOLERANCE
) -> MixedGraph:
    """Mixed graph on the complex vertices: undirected where forward and
    backward rates agree within tolerance, else directed toward the larger."""
    undirected = []
    directed = []
    for rx in net.reactions:
        cmp = tol.compare(rates[(rx.i, rx.j)], rates[(rx.j, rx.i)])
        if cmp == 0:
            undirected.append((rx.i, rx.j))
        elif cmp > 0:
            directed.append((rx.i, rx.j))
        else:
            directed.append((rx.j, rx.i))
    return make_mixed_graph(range(net.n_complexes), undirected, directed)


def check_detailed_balance(
    net: ReactionNetwork, rates: RateVector, tol: Tolerance = DEFAULT_TOLERANCE
):
    """True iff forward and backward rates agree on every reversible pair."""
    worst = None
    worst_gap = -1.0
    for rx in net.reactions:
        fwd, bwd = rates[(rx.i, rx.j)], rates[(rx.j, rx.i)]
        if tol.compare(fwd, bwd) != 0:
            gap = abs(fwd - bwd)
            if gap > worst_gap:
                worst_gap = gap
                worst = (rx.i, rx.j)
    return worst is None, worst


def check_complex_balance(
    net: ReactionNetwork, rates: RateVector, tol: Tolerance = DEFAULT_TOLERANCE
):
    """True iff at every vertex the incoming and outgoing rate sums agree."""
    out_sum = [0.0] * net.n_complexes
    in_sum = [0.0] * net.n_complexes
    for (i, j), val in rates.items():
        out_sum[i] += val
        in_sum[j] += val
    worst = None
    worst_gap = -1.0
    for v in range(net.n_complexes):
        if tol.compare(out_sum[v], in_sum[v]) != 0:
            gap = abs(out_sum[v] - in_sum[v])
            if gap > worst_gap:
                worst_gap = gap
                worst = v
    return worst is None, worst


def check_weak_complex_balance(induced: MixedGraph):
    """True iff the induced graph is vertex-balanced."""
    return is_vertex_balanced(induced)


@dataclass(frozen=True)
class CycleCheckResult:
    ok: bool
    witness: Optional[tuple]  # (cycle vertices, forward product, backward product)
    truncated: bool


def _undirected_reaction_cycles(net: ReactionNetwork, cap: int):
    """Elementary cycles (>= 3 vertices) of the symmetric reaction graph, one
    orientation each; yields None as a final sentinel if the cap was hit.

    Each undirected cycle stands for the two mirror-image directed cycles; the
    product and sign conditions below are symmetric under mirroring, so one
    orientation decides both.
    """
    g = make_mixed_graph(
        range(net.n_complexes), directed_pairs=[(rx.i, rx.j) for rx in net.reactions]
    )
    # treat the one-direction-per-pair digraph as a skeleton: enumerate its
    # cycles with edges traversable both ways
    from .mixedgraph import _skeleton_cycles

    for nodes in _skeleton_cycles(g, cap):
        if nodes is None:
            yield None
            return
        if len(nodes) >= 3:
            yield list(nodes) + [nodes[0]]


def check_formal_balance(
    net: ReactionNetwork,
    rates: RateVector,
    tol: Tolerance = DEFAULT_TOLERANCE,
    cap: int = DEFAULT_CYCLE_CAP,
) -> CycleCheckResult:
    """True iff on every directed cycle (>= 3 vertices) of the reaction graph
    the forward and backward rate products agree; 2-cycles hold trivially."""
    # pure relative comparison: an absolute term would equate products that
    # are tiny only because the cycle is long
    prod_tol = Tolerance(rel=tol.rel, abs=0.0)
    truncated = False
    for closed in _undirected_reaction_cycles(net, cap):
        if closed is None:
            truncated = True
            break
        fwd = bwd = 1.0
        for a, b in zip(closed[:-1], closed[1:]):
            fwd *= rates[(a, b)]
            bwd *= rates[(b, a)]
        if prod_tol.compare(fwd, bwd) != 0:
            return CycleCheckResult(False, (tuple(closed), fwd, bwd), truncated)
    return CycleCheckResult(True, None, truncated)


def check_strong_cycle_balance(induced: MixedGraph, cap: int = DEFAULT_CYCLE_CAP):
    """True iff the induced graph has no weakly directed cycle."""
    cycle = find_weakly_directed_cycle(induced, cap=cap)
    return cycle is None, cycle


def check_cycle_balance(induced: MixedGraph):
    """True iff the induced graph has no directed cycle."""
    cycle = find_directed_cycle(induced)
    return cycle is None, cycle


@dataclass(frozen=True)
class WegscheiderEntry:
    cycle: tuple
    forward_product: float
    backward_product: float
    satisfied: bool


@dataclass(frozen=True)
class WegscheiderResult:
    entries: tuple
    all_satisfied: bool
    truncated: bool


def wegscheider_conditions(
    net: ReactionNetwork,
    tol: Tolerance = DEFAULT_TOLERANCE,
    cap: int = DEFAULT_CYCLE_CAP,
) -> WegscheiderResult:
    """Rate-constant product condition per elementary cycle (>= 3 vertices).

    For positive states under mass action this coincides with formal balance.
    """
    if not net.mass_action:
        raise ModeMismatchError("Wegscheider conditions require mass-action mode")
    prod_tol = Tolerance(rel=tol.rel, abs=0.0)
    entries = []
    truncated = False
    for closed in _undirected_reaction_cycles(net, cap):
        if closed is None:
            truncated = True
            break
        fwd = bwd = 1.0
        for a, b in zip(closed[:-1], closed[1:]):
            fwd *= net.rate_constant(a, b)
            bwd *= net.rate_constant(b, a)
        entries.append(
            WegscheiderEntry(tuple(closed), fwd, bwd, prod_tol.compare(fwd, bwd) == 0)
        )
    return WegscheiderResult(
        entries=tuple(entries),
        all_satisfied=all(e.satisfied for e in entries),
        truncated=truncated,
    )


@dataclass(frozen=True)
class BalanceReport:
    db: bool
    cb: bool
    wcb: bool
    fb: bool
    scycb: bool
    cycb: bool
    witnesses: dict = field(default_factory=dict)
    induced: Optional[MixedGraph] = None
    tol: Tolerance = DEFAULT_TOLERANCE
    truncated: bool = False

    def predicates(self) -> dict:
        return {
            "db": self.db,
            "cb": self.cb,
            "wcb": self.wcb,
            "fb": self.fb,
            "scycb": self.scycb,
            "cycb": self.cycb,
        }

    def to_json_dict(self, labels: Optional[Sequence[str]] = None) -> dict:
        def lab(v):
            return labels[v] if labels is not None else v

        wit = {}
        for name, w in self.witnesses.items():
            if w is None:
                continue
            if isinstance(w, Cycle):
                wit[name] = [lab(v) for v in w.vertices]
            elif name == "fb":
                cyc, fwd, bwd = w
                wit[name] = {
                    "cycle": [lab(v) for v in cyc],
                    "forward_product": fwd,
                    "backward_product": bwd,
                }
            elif isinstance(w, tuple):
                wit[name] = [lab(v) for v in w]
            else:
                wit[name] = lab(w)
        return {
            "predicates": self.predicates(),
            "witnesses": wit,
            "tolerance": {"rel": self.tol.rel, "abs": self.tol.abs},
            "truncated": self.truncated,
        }

    def to_json(self, labels=None) -> str:
        return json.dumps(self.to_json_dict(labels), indent=2)


def _check_report_consistency(rep: BalanceReport, strict_star: bool) -> None:
    checks = [
        ("DB implies CB", not rep.db or rep.cb),
        ("CB implies wCB", not rep.cb or rep.wcb),
        ("DB implies FB", not rep.db or rep.fb),
        ("DB implies sCycB", not rep.db or rep.scycb),
        ("FB implies CycB", not rep.fb or rep.cycb),
        ("sCycB implies CycB", not rep.scycb or rep.cycb),
        ("CB and CycB imply DB", not (rep.cb and rep.cycb) or rep.db),
        ("wCB and CycB imply DB", not (rep.wcb and rep.cycb) or rep.db),
    ]
    if strict_star:
        checks.append(("FB implies sCycB", not rep.fb or rep.scycb))
    if rep.cb:
        vals = {rep.db, rep.fb, rep.scycb, rep.cycb}
        checks.append(("given CB: DB, FB, sCycB, CycB agree", len(vals) == 1))
    for name, ok in checks:
        if not ok:
            raise InternalInconsistencyError(
                f"predicate implication violated: {name} ({rep.predicates()})"
            )


def balance_report(
    net: ReactionNetwork,
    x=None,
    table: Optional[Mapping] = None,
    tol: Tolerance = DEFAULT_TOLERANCE,
    cap: int = DEFAULT_CYCLE_CAP,
    assume_general_kinetics: bool = False,
) -> BalanceReport:
    """Evaluate all balance predicates at a state (mass action) or rate table.

    Raises InternalInconsistencyError if the computed truth values contradict
    a proven implication; such a conflict signals a tolerance-classification
    problem and is never ignored.
    """
    if (x is None) == (table is None):
        raise BalanceError("provide exactly one of a state x or a rate table")
    if x is not None:
        rates = evaluate_rates(net, x)
    else:
        rates = evaluate_rates_table(net, table)
    graph = induced_graph(net, rates, tol)
    db, db_wit = check_detailed_balance(net, rates, tol)
    cb, cb_wit = check_complex_balance(net, rates, tol)
    wcb, wcb_wit = check_weak_complex_balance(graph)
    fb_res = check_formal_balance(net, rates, tol, cap)
    scycb, scycb_wit = check_strong_cycle_balance(graph, cap)
    cycb, cycb_wit = check_cycle_balance(graph)
    rep = BalanceReport(
        db=db,
        cb=cb,
        wcb=wcb,
        fb=fb_res.ok,
        scycb=scycb,
        cycb=cycb,
        witnesses={
            "db": db_wit,
            "cb": cb_wit,
            "wcb": wcb_wit,
            "fb": fb_res.witness,
            "scycb": scycb_wit,
            "cycb": cycb_wit,
        },
        induced=graph,
        tol=tol,
        truncated=fb_res.truncated,
    )
    all_positive = all(v > 0 for v in rates.values())
    strict_star = all_positive or net.mass_action or assume_general_kinetics
    _check_report_consistency(rep, strict_star)
    return rep
