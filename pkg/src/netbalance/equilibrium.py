"""Equilibrium location for mass-action networks and a definition-level
oracle that re-derives every balance predicate without the induced graph."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional

import numpy as np

from .balance import (
    BalanceError,
    BalanceReport,
    ModeMismatchError,
    RateVector,
    _check_report_consistency,
    as_state,
    evaluate_rates,
    evaluate_rates_table,
)
from .mixedgraph import DEFAULT_CYCLE_CAP
from .network import ReactionNetwork, stoichiometric_matrix
from .numeric import DEFAULT_TOLERANCE, Tolerance


class NotConvergedError(RuntimeError):
    pass


@dataclass(frozen=True)
class EquilibriumResult:
    x: np.ndarray
    residual: float
    iterations: int
    converged: bool

    def to_json_dict(self) -> dict:
        return {
            "x": [float(v) for v in self.x],
            "residual": self.residual,
            "iterations": self.iterations,
            "converged": self.converged,
        }


def formation_rate(net: ReactionNetwork, rates: RateVector) -> np.ndarray:
    """Net species-formation vector: sum over edges of (y(j) - y(i)) * r_ij."""
    out = np.zeros(net.n_species)
    for (i, j), val in rates.items():
        out += (net.complex_vector(j) - net.complex_vector(i)) * val
    return out


def _rate_jacobian(net: ReactionNetwork, x: np.ndarray) -> np.ndarray:
    """Jacobian of the formation rate for mass action at a positive state."""
    n = net.n_species
    jac = np.zeros((n, n))
    rates = evaluate_rates(net, x)
    for (i, j), val in rates.items():
        yi = net.complex_vector(i)
        direction = net.complex_vector(j) - yi
        grad = val * yi / x  # d(k x^y)/dx_s = r * y_s / x_s for x > 0
        jac += np.outer(direction, grad)
    return jac


def _stoich_basis(net: ReactionNetwork) -> np.ndarray:
    mat = stoichiometric_matrix(net)
    if mat.shape[1] == 0:
        return np.zeros((net.n_species, 0))
    u, sv, _ = np.linalg.svd(mat, full_matrices=False)
    rank = int(np.sum(sv > 1e-12 * sv[0])) if sv.size and sv[0] > 0 else 0
    return u[:, :rank]


def find_equilibrium(
    net: ReactionNetwork,
    x0=None,
    tol: float = 1e-12,
    max_iter: int = 200,
) -> EquilibriumResult:
    """Damped Newton on the formation rate within the stoichiometric class of x0.

    Steps are confined to the stoichiometric subspace and halved until they
    keep the iterate positive and reduce the residual; a singular projected
    Jacobian falls back to a projected gradient step.  Never raises on
    non-convergence: the best iterate is returned with converged=False.
    """
    if not net.mass_action:
        raise ModeMismatchError("equilibrium search requires mass-action mode")
    if x0 is None:
        x0 = np.ones(net.n_species)
    x = as_state(net, x0).copy()
    if np.any(x <= 0):
        raise BalanceError("initial state must be componentwise positive")
    basis = _stoich_basis(net)
    if basis.shape[1] == 0:
        res = float(np.max(np.abs(formation_rate(net, evaluate_rates(net, x)))))
        return EquilibriumResult(x, res, 0, res <= tol)

    def residual_of(z):
        return float(np.max(np.abs(formation_rate(net, evaluate_rates(net, z)))))

    res = residual_of(x)
    best_x, best_res = x.copy(), res
    iterations = 0
    for iterations in range(1, max_iter + 1):
        if res <= tol:
            break
        f = formation_rate(net, evaluate_rates(net, x))
        jac = _rate_jacobian(net, x)
        g = basis.T @ f
        jr = basis.T @ jac @ basis
        try:
            du = np.linalg.solve(jr, -g)
            if not np.all(np.isfinite(du)):
                raise np.linalg.LinAlgError
        except np.linalg.LinAlgError:
            du = -g  # projected gradient fallback
        dx = basis @ du
        lam = 1.0
        accepted = False
        for _ in range(50):
            trial = x + lam * dx
            if np.all(trial > 0):
                trial_res = residual_of(trial)
                if trial_res < res:
                    x, res = trial, trial_res
                    accepted = True
                    break
            lam *= 0.5
        if not accepted:
            # retry along the projected gradient before giving up
            dx = -(basis @ (basis.T @ f))
            lam = 1.0
            for _ in range(50):
                trial = x + lam * dx
                if np.all(trial > 0):
                    trial_res = residual_of(trial)
                    if trial_res < res:
                        x, res = trial, trial_res
                        accepted = True
                        break
                lam *= 0.5
        if res < best_res:
            best_x, best_res = x.copy(), res
        if not accepted:
            break
    if res < best_res:
        best_x, best_res = x.copy(), res
    return EquilibriumResult(best_x, best_res, iterations, best_res <= tol)


def _brute_force_cycles(m: int, pairs) -> list:
    """All elementary cycles (>= 3 vertices, one orientation each) by DFS.

    Independent of the library cycle machinery on purpose: recursive path
    extension over the symmetric adjacency, deduplicated by requiring the root
    to be the smallest vertex and the second vertex smaller than the last.
    """
    adj = {v: set() for v in range(m)}
    for i, j in pairs:
        adj[i].add(j)
        adj[j].add(i)
    cycles = []

    def extend(root, path, visited):
        v = path[-1]
        for w in sorted(adj[v]):
            if w == root and len(path) >= 3:
                if path[1] < path[-1]:
                    cycles.append(path + [root])
            elif w > root and w not in visited:
                extend(root, path + [w], visited | {w})

    for root in range(m):
        extend(root, [root], {root})
    return cycles


def classify_state_oracle(
    net: ReactionNetwork,
    x=None,
    table: Optional[Mapping] = None,
    tol: Tolerance = DEFAULT_TOLERANCE,
    cap: int = DEFAULT_CYCLE_CAP,
) -> BalanceReport:
    """Recompute all six predicates straight from their definitions.

    Works purely on per-edge rate comparisons and explicit cycle products,
    never via the induced mixed graph; cross-validates balance_report.
    """
    if (x is None) == (table is None):
        raise BalanceError("provide exactly one of a state x or a rate table")
    if x is not None:
        rates = evaluate_rates(net, x)
    else:
        rates = evaluate_rates_table(net, table)

    pairs = [(rx.i, rx.j) for rx in net.reactions]
    sign = {}
    for i, j in pairs:
        s = tol.compare(rates[(i, j)], rates[(j, i)])
        sign[(i, j)] = s
        sign[(j, i)] = -s

    db = all(s == 0 for s in sign.values())

    out_sum = [0.0] * net.n_complexes
    in_sum = [0.0] * net.n_complexes
    for (i, j), val in rates.items():
        out_sum[i] += val
        in_sum[j] += val
    cb = all(
        tol.compare(out_sum[v], in_sum[v]) == 0 for v in range(net.n_complexes)
    )

    # wCB: a vertex with some strictly-in edge needs a strictly-out edge too
    wcb = True
    for v in range(net.n_complexes):
        incident = [sign[(v, w)] for (a, w) in sign if a == v]
        has_out = any(s > 0 for s in incident)
        has_in = any(s < 0 for s in incident)
        if has_out != has_in:
            wcb = False
            break

    fb = True
    scycb = True
    cycb = True
    truncated = False
    prod_tol = Tolerance(rel=tol.rel, abs=0.0)
    cycles = _brute_force_cycles(net.n_complexes, pairs)
    if len(cycles) > cap:
        cycles = cycles[:cap]
        truncated = True
    for closed in cycles:
        edges = list(zip(closed[:-1], closed[1:]))
        fwd = bwd = 1.0
        for a, b in edges:
            fwd *= rates[(a, b)]
            bwd *= rates[(b, a)]
        if prod_tol.compare(fwd, bwd) != 0:
            fb = False
        signs = [sign[(a, b)] for a, b in edges]
        all_equal = all(s == 0 for s in signs)
        has_plus = any(s > 0 for s in signs)
        has_minus = any(s < 0 for s in signs)
        if not (all_equal or (has_plus and has_minus)):
            scycb = False
        if (has_plus and not has_minus and all(s != 0 for s in signs)) or (
            has_minus and not has_plus and all(s != 0 for s in signs)
        ):
            cycb = False

    rep = BalanceReport(
        db=db,
        cb=cb,
        wcb=wcb,
        fb=fb,
        scycb=scycb,
        cycb=cycb,
        witnesses={},
        induced=None,
        tol=tol,
        truncated=truncated,
    )
    all_positive = all(v > 0 for v in rates.values())
    _check_report_consistency(rep, all_positive or net.mass_action)
    return rep
