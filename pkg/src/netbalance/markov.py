"""Continuous-time Markov chains on finite (or truncated) state spaces:
stationarity, reversibility, the induced graph of a measure, Kolmogorov
cycle conditions, and the reversibility verdict."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Optional

from .mixedgraph import (
    DEFAULT_CYCLE_CAP,
    Cycle,
    MixedGraph,
    find_directed_cycle,
    is_edge_balanced,
    make_mixed_graph,
)
from .numeric import DEFAULT_TOLERANCE, Tolerance


class MarkovChainError(ValueError):
    pass


class ParameterOutOfRangeError(MarkovChainError):
    pass


class NotStationaryError(MarkovChainError):
    pass


@dataclass(frozen=True)
class MarkovChainModel:
    """Finite chain with strictly positive rates on a symmetric transition set.

    ``boundary`` flags states where a countable chain was truncated; it is
    empty when the state space is exact.
    """

    states: tuple
    rates: Mapping  # (x, y) -> q(x, y) > 0
    boundary: frozenset = frozenset()

    def transitions(self) -> list:
        return list(self.rates)

    def neighbors(self, x) -> list:
        return [y for (a, y) in self.rates if a == x]


def make_markov_chain(
    states: Iterable, rates: Mapping, boundary: Iterable = ()
) -> MarkovChainModel:
    states = tuple(dict.fromkeys(states))
    state_set = set(states)
    clean = {}
    for (x, y), q in rates.items():
        if x == y:
            raise MarkovChainError(f"self-transition at {x}")
        if x not in state_set or y not in state_set:
            raise MarkovChainError(f"transition ({x}, {y}) leaves the state space")
        q = float(q)
        if not (q > 0 and math.isfinite(q)):
            raise MarkovChainError(f"rate on ({x}, {y}) must be positive and finite")
        clean[(x, y)] = q
    for x, y in clean:
        if (y, x) not in clean:
            raise MarkovChainError(
                f"transition set is not symmetric: ({x}, {y}) lacks ({y}, {x})"
            )
    boundary = frozenset(boundary)
    if not boundary <= state_set:
        raise MarkovChainError("boundary states must belong to the state space")
    return MarkovChainModel(states, clean, boundary)


@dataclass(frozen=True)
class Measure:
    """Nonnegative finite value per state; unnormalized unless flagged."""

    values: Mapping
    normalized: bool = False

    def __call__(self, x) -> float:
        return self.values[x]

    def normalize(self) -> "Measure":
        total = sum(self.values.values())
        if not (total > 0 and math.isfinite(total)):
            raise MarkovChainError("measure cannot be normalized")
        return Measure({x: v / total for x, v in self.values.items()}, True)


def make_measure(values: Mapping, normalized: bool = False) -> Measure:
    clean = {}
    for x, v in values.items():
        v = float(v)
        if v < 0 or not math.isfinite(v):
            raise MarkovChainError(f"measure value at {x} must be finite and >= 0")
        clean[x] = v
    return Measure(clean, normalized)


def _require_total(mc: MarkovChainModel, mu: Measure) -> None:
    missing = [x for x in mc.states if x not in mu.values]
    if missing:
        raise MarkovChainError(f"measure undefined on states {missing[:5]}")


def net_flow(mc: MarkovChainModel, mu: Measure, x, y) -> float:
    """mu(x) q(x,y) - mu(y) q(y,x) on a transition pair."""
    return mu(x) * mc.rates[(x, y)] - mu(y) * mc.rates[(y, x)]


def mc_induced_graph(
    mc: MarkovChainModel, mu: Measure, tol: Tolerance = DEFAULT_TOLERANCE
) -> MixedGraph:
    """Undirected edge where the probability flows balance, else directed
    toward the larger flow."""
    _require_total(mc, mu)
    undirected = []
    directed = []
    seen = set()
    for x, y in mc.rates:
        key = frozenset((x, y))
        if key in seen:
            continue
        seen.add(key)
        cmp = tol.compare(mu(x) * mc.rates[(x, y)], mu(y) * mc.rates[(y, x)])
        if cmp == 0:
            undirected.append((x, y))
        elif cmp > 0:
            directed.append((x, y))
        else:
            directed.append((y, x))
    return make_mixed_graph(mc.states, undirected, directed)


def is_stationary(
    mc: MarkovChainModel,
    mu: Measure,
    tol: Tolerance = DEFAULT_TOLERANCE,
    interior_only: bool = False,
):
    """Per-state balance of total incoming and outgoing probability flow."""
    _require_total(mc, mu)
    out_sum = {x: 0.0 for x in mc.states}
    in_sum = {x: 0.0 for x in mc.states}
    for (x, y), q in mc.rates.items():
        flow = mu(x) * q
        out_sum[x] += flow
        in_sum[y] += flow
    for x in mc.states:
        if interior_only and x in mc.boundary:
            continue
        if tol.compare(out_sum[x], in_sum[x]) != 0:
            return False, x
    return True, None


def is_reversible(
    mc: MarkovChainModel, mu: Measure, tol: Tolerance = DEFAULT_TOLERANCE
):
    """Per-transition balance: mu(x) q(x,y) = mu(y) q(y,x) everywhere."""
    _require_total(mc, mu)
    worst = None
    worst_gap = -1.0
    for x, y in mc.rates:
        fwd = mu(x) * mc.rates[(x, y)]
        bwd = mu(y) * mc.rates[(y, x)]
        if tol.compare(fwd, bwd) != 0:
            gap = abs(fwd - bwd)
            if gap > worst_gap:
                worst_gap = gap
                worst = (x, y)
    return worst is None, worst


REVERSIBLE = "reversible"
DIRECTED_CYCLE = "directed_cycle"
BOUNDARY_PATH = "boundary_path"
INCONSISTENT = "inconsistent"

BOUNDARY_PATH_NOTE = (
    "heuristic evidence for a bi-infinite directed path "
    "(finite truncation of a countable chain)"
)


@dataclass(frozen=True)
class ReversibilityVerdict:
    kind: str  # REVERSIBLE | DIRECTED_CYCLE | BOUNDARY_PATH | INCONSISTENT
    cycle: Optional[Cycle] = None
    path: Optional[tuple] = None
    note: str = ""

    def to_json_dict(self) -> dict:
        out = {"kind": self.kind}
        if self.cycle is not None:
            out["cycle"] = [list(v) if isinstance(v, tuple) else v
                            for v in self.cycle.vertices]
        if self.path is not None:
            out["path"] = [list(v) if isinstance(v, tuple) else v for v in self.path]
        if self.note:
            out["note"] = self.note
        return out


def _longest_boundary_path(g: MixedGraph, boundary) -> Optional[tuple]:
    """Longest directed path between two boundary states of an acyclic D,
    by dynamic programming over a topological order."""
    adj = {v: [] for v in g.vertices}
    indeg = {v: 0 for v in g.vertices}
    for a, b in g.directed:
        adj[a].append(b)
        indeg[b] += 1
    order = [v for v in g.vertices if indeg[v] == 0]
    queue = list(order)
    while queue:
        v = queue.pop()
        for w in adj[v]:
            indeg[w] -= 1
            if indeg[w] == 0:
                order.append(w)
                queue.append(w)
    # best[v]: longest directed path ending at v that started on the boundary
    best = {v: 0 if v in boundary else None for v in g.vertices}
    pred = {}
    for v in order:
        if best[v] is None:
            continue
        for w in adj[v]:
            cand = best[v] + 1
            if best[w] is None or cand > best[w]:
                best[w] = cand
                pred[w] = v
    end = None
    for v in boundary:
        if best[v] is not None and best[v] >= 1:
            if end is None or best[v] > best[end]:
                end = v
    if end is None:
        return None
    path = [end]
    while path[-1] in pred:
        path.append(pred[path[-1]])
    path.reverse()
    return tuple(path)


def reversibility_verdict(
    mc: MarkovChainModel, mu: Measure, tol: Tolerance = DEFAULT_TOLERANCE
) -> ReversibilityVerdict:
    """Classify a stationary measure by the structure of its induced graph.

    Reversible iff the induced graph is edge-balanced; otherwise a directed
    cycle, or a boundary-to-boundary directed path as heuristic evidence for a
    bi-infinite path.  INCONSISTENT flags a theorem violation.
    """
    stat, witness = is_stationary(
        mc, mu, tol, interior_only=bool(mc.boundary)
    )
    if not stat:
        raise NotStationaryError(f"measure is not stationary at state {witness}")
    g = mc_induced_graph(mc, mu, tol)
    balanced, _ = is_edge_balanced(g)
    if balanced:
        return ReversibilityVerdict(REVERSIBLE)
    cycle = find_directed_cycle(g)
    if cycle is not None:
        return ReversibilityVerdict(DIRECTED_CYCLE, cycle=cycle)
    path = _longest_boundary_path(g, mc.boundary)
    if path is not None:
        return ReversibilityVerdict(BOUNDARY_PATH, path=path, note=BOUNDARY_PATH_NOTE)
    return ReversibilityVerdict(INCONSISTENT)


def kolmogorov_cycle_check(
    mc: MarkovChainModel,
    cap: int = DEFAULT_CYCLE_CAP,
    tol: Tolerance = DEFAULT_TOLERANCE,
):
    """Product of forward rates equals product of backward rates on every
    elementary cycle with >= 3 states (up to cap)."""
    g = make_mixed_graph(
        mc.states,
        directed_pairs={(x, y) for x, y in mc.rates if (y, x) not in mc.rates or repr(x) < repr(y)},
    )
    from .mixedgraph import _skeleton_cycles

    prod_tol = Tolerance(rel=tol.rel, abs=0.0)
    truncated = False
    for nodes in _skeleton_cycles(g, cap):
        if nodes is None:
            truncated = True
            break
        closed = list(nodes) + [nodes[0]]
        fwd = bwd = 1.0
        for a, b in zip(closed[:-1], closed[1:]):
            fwd *= mc.rates[(a, b)]
            bwd *= mc.rates[(b, a)]
        if prod_tol.compare(fwd, bwd) != 0:
            return False, (tuple(closed), fwd, bwd), truncated
    return True, None, truncated


def build_cyclic_mc(N: int) -> MarkovChainModel:
    """Stochastic mass-action chain of the cyclic three-species network on the
    conserved simplex a + b + c = N (exact state space, no truncation)."""
    if N < 0:
        raise ParameterOutOfRangeError("N must be >= 0")
    states = [
        (a, b, N - a - b) for a in range(N, -1, -1) for b in range(N - a, -1, -1)
    ]
    # per-jump constants of the cyclic network: forward (A->B->C->A) constant 2,
    # backward constant 1, scaled by the count of the consumed species
    moves = [
        ((-1, 1, 0), lambda a, b, c: 2 * a),   # A -> B
        ((1, -1, 0), lambda a, b, c: b),       # B -> A
        ((0, -1, 1), lambda a, b, c: 2 * b),   # B -> C
        ((0, 1, -1), lambda a, b, c: c),       # C -> B
        ((1, 0, -1), lambda a, b, c: 2 * c),   # C -> A
        ((-1, 0, 1), lambda a, b, c: a),       # A -> C
    ]
    state_set = set(states)
    rates = {}
    for s in states:
        for delta, rate_fn in moves:
            t = tuple(x + d for x, d in zip(s, delta))
            if t in state_set:
                q = rate_fn(*s)
                if q > 0:
                    rates[(s, t)] = float(q)
    return make_markov_chain(states, rates)


def product_form_measure(states: Iterable, normalized: bool = False) -> Measure:
    """Product-form Poisson measure 1/(a! b! ...) over integer-vector states.

    Uses log-space factorials once counts exceed 20, for overflow safety.
    """
    values = {}
    for s in states:
        if max(s) <= 20:
            denom = 1
            for c in s:
                denom *= math.factorial(c)
            values[s] = 1.0 / denom
        else:
            values[s] = math.exp(-sum(math.lgamma(c + 1) for c in s))
    mu = make_measure(values)
    return mu.normalize() if normalized else mu


def build_birth_death(q_param: float, M: int) -> MarkovChainModel:
    """Birth-death chain on {-M, ..., M} with q(x, x+1) = 2 q^-|x| and
    q(x, x-1) = q^-|x|; the two end states are the truncation boundary."""
    if not 0 < q_param < 1:
        raise ParameterOutOfRangeError("q_param must lie in (0, 1)")
    if M < 1:
        raise ParameterOutOfRangeError("M must be >= 1")
    states = list(range(-M, M + 1))
    rates = {}
    for x in states:
        scale = q_param ** (-abs(x))
        if x + 1 <= M:
            rates[(x, x + 1)] = 2 * scale
        if x - 1 >= -M:
            rates[(x, x - 1)] = scale
    return make_markov_chain(states, rates, boundary={-M, M})


def birth_death_stationary(mc: MarkovChainModel, q_param: float) -> Measure:
    """The non-reversible stationary measure q^|x| (unnormalized)."""
    return make_measure({x: q_param ** abs(x) for x in mc.states})


def birth_death_reversible(mc: MarkovChainModel, q_param: float) -> Measure:
    """The reversible measure: (2q)^x for x >= 0, (q/2)^-x for x < 0."""
    values = {}
    for x in mc.states:
        if x >= 0:
            values[x] = (2 * q_param) ** x
        else:
            values[x] = (q_param / 2) ** (-x)
    return make_measure(values)


def _state_key(x):
    return list(x) if isinstance(x, tuple) else x


def _state_from_json(x):
    return tuple(x) if isinstance(x, list) else x


def chain_to_json_dict(mc: MarkovChainModel) -> dict:
    return {
        "states": [_state_key(x) for x in mc.states],
        "transitions": [
            [_state_key(x), _state_key(y), q] for (x, y), q in mc.rates.items()
        ],
        "boundary": [_state_key(x) for x in sorted(mc.boundary, key=repr)],
    }


def chain_from_json_dict(data: Mapping) -> MarkovChainModel:
    states = [_state_from_json(x) for x in data["states"]]
    rates = {
        (_state_from_json(x), _state_from_json(y)): q
        for x, y, q in data["transitions"]
    }
    boundary = [_state_from_json(x) for x in data.get("boundary", [])]
    return make_markov_chain(states, rates, boundary)


def measure_to_json_dict(mu: Measure) -> dict:
    return {
        "normalized": mu.normalized,
        "values": [[_state_key(x), v] for x, v in mu.values.items()],
    }


def measure_from_json_dict(data: Mapping) -> Measure:
    return make_measure(
        {_state_from_json(x): v for x, v in data["values"]},
        normalized=data.get("normalized", False),
    )
