"""End-to-end acceptance checks.

Each test covers one numbered criterion, prints a single PASS/FAIL line,
and enforces the stated tolerance and time budget.
"""

import math
import random
import time
from contextlib import contextmanager

import pytest

from netbalance.balance import (
    balance_report,
    check_detailed_balance,
    evaluate_rates,
    induced_graph,
)
from netbalance.equilibrium import classify_state_oracle, find_equilibrium
from netbalance.markov import (
    BOUNDARY_PATH,
    DIRECTED_CYCLE,
    build_birth_death,
    build_cyclic_mc,
    birth_death_reversible,
    birth_death_stationary,
    is_reversible,
    is_stationary,
    kolmogorov_cycle_check,
    mc_induced_graph,
    net_flow,
    product_form_measure,
    reversibility_verdict,
)
from netbalance.mixedgraph import (
    find_directed_cycle,
    find_weakly_directed_cycle,
    is_edge_balanced,
    is_vertex_balanced,
)
from netbalance.network import network_summary, parse_network
from netbalance.numeric import Tolerance

from conftest import random_mixed_graph, random_network, random_state

STRICT = Tolerance(rel=1e-12, abs=0.0)

TRIANGLE = """A <-> B ; kf=2, kr=1
B <-> C ; kf=2, kr=1
C <-> A ; kf=2, kr=1
"""

FULL = """A <-> B ; kf=1, kr=1
B <-> C ; kf=1, kr=1
C <-> A ; kf=1, kr=1
A <-> 0 ; kf=1, kr=1
0 <-> C ; kf=1, kr=1
"""


@contextmanager
def criterion(capsys, number, label, budget):
    start = time.perf_counter()
    try:
        yield
        elapsed = time.perf_counter() - start
        assert elapsed < budget, f"criterion {number} took {elapsed:.1f}s"
    except Exception:
        with capsys.disabled():
            print(f"criterion {number} ({label}): FAIL")
        raise
    with capsys.disabled():
        print(f"criterion {number} ({label}): PASS  [{elapsed:.2f}s]")


def triangle_with_exchange(rng):
    """Five-reaction network: A-B-C triangle satisfying the cycle condition
    plus A <-> 0 <-> C exchange with generic constants."""
    kAB, kBA, kBC, kCB, kAC = (rng.uniform(0.5, 2.0) for _ in range(5))
    kCA = kAC * kCB * kBA / (kAB * kBC)
    k0 = [rng.uniform(0.5, 2.0) for _ in range(4)]
    return parse_network(
        f"A <-> B ; kf={kAB}, kr={kBA}\n"
        f"B <-> C ; kf={kBC}, kr={kCB}\n"
        f"C <-> A ; kf={kCA}, kr={kAC}\n"
        f"A <-> 0 ; kf={k0[0]}, kr={k0[1]}\n"
        f"0 <-> C ; kf={k0[2]}, kr={k0[3]}"
    )


def test_criterion_1_structural_counts(capsys):
    with criterion(capsys, 1, "structural counts", 1.0):
        tri = network_summary(parse_network(TRIANGLE))
        assert (tri.complexes, tri.linkage_classes, tri.stoich_rank) == (3, 1, 2)
        assert tri.deficiency == 0 and tri.cycle_rank == 1
        full = network_summary(parse_network(FULL))
        assert (full.complexes, full.linkage_classes, full.stoich_rank) == (4, 1, 3)
        assert full.deficiency == 0 and full.cycle_rank == 2


def test_criterion_2_cyclic_network_deterministic(capsys):
    with criterion(capsys, 2, "cyclic network at (1,1,1)", 1.0):
        net = parse_network(TRIANGLE)
        rates = evaluate_rates(net, [1.0, 1.0, 1.0])
        for i in range(3):
            inflow = sum(v for (a, b), v in rates.items() if b == i)
            outflow = sum(v for (a, b), v in rates.items() if a == i)
            assert abs(inflow - outflow) <= 1e-12
        rep = balance_report(net, x=[1.0, 1.0, 1.0])
        assert rep.cb and not rep.db and not rep.fb
        assert not rep.scycb and not rep.cycb
        _, fwd, bwd = rep.witnesses["fb"]
        assert sorted((fwd, bwd)) == [1.0, 8.0]
        assert rep.induced.directed == {(0, 1), (1, 2), (2, 0)}
        assert rep.induced.undirected == frozenset()


def test_criterion_3_equilibrium_end_to_end(capsys):
    with criterion(capsys, 3, "1000 solved triangle+exchange networks", 60.0):
        rng = random.Random(2026)
        for _ in range(1000):
            net = triangle_with_exchange(rng)
            res = find_equilibrium(net)
            assert res.converged and res.residual <= 1e-10
            rep = balance_report(net, x=res.x)
            assert rep.cb and not rep.db
            labels = net.complex_labels
            abc = [i for i, lab in enumerate(labels) if lab in ("A", "B", "C")]
            zero = labels.index("0")
            sub = rep.induced.restrict(abc)
            assert find_weakly_directed_cycle(sub) is None
            cyc = find_directed_cycle(rep.induced)
            assert cyc is not None and zero in cyc.vertices


def test_criterion_4_simplex_chain(capsys):
    with criterion(capsys, 4, "simplex chain, product-form measure", 5.0):
        for N in range(1, 9):
            mc = build_cyclic_mc(N)
            pi = product_form_measure(mc.states)
            assert is_stationary(mc, pi, STRICT) == (True, None)
            assert not is_reversible(mc, pi)[0]
            verdict = reversibility_verdict(mc, pi)
            assert verdict.kind == DIRECTED_CYCLE and len(verdict.cycle) == 3
            # every local 3-cycle carries one uniform net flow
            for a in range(N):
                for b in range(N - a):
                    c = N - 1 - a - b
                    loop = [
                        (a + 1, b, c),
                        (a, b + 1, c),
                        (a, b, c + 1),
                        (a + 1, b, c),
                    ]
                    flows = [
                        net_flow(mc, pi, x, y)
                        for x, y in zip(loop[:-1], loop[1:])
                    ]
                    ref = flows[0]
                    assert ref > 0
                    for f in flows[1:]:
                        assert abs(f - ref) <= 1e-12 * abs(ref)


def test_criterion_5_birth_death_chain(capsys):
    with criterion(capsys, 5, "birth-death chain q=0.3, M=50", 2.0):
        q, M = 0.3, 50
        mc = build_birth_death(q, M)
        pi = birth_death_stationary(mc, q)
        assert is_stationary(mc, pi, STRICT, interior_only=True) == (True, None)
        assert not is_reversible(mc, pi)[0]
        g = mc_induced_graph(mc, pi)
        assert g.undirected == frozenset()
        assert g.directed == {(x, x + 1) for x in range(-M, M)}
        verdict = reversibility_verdict(mc, pi)
        assert verdict.kind == BOUNDARY_PATH
        assert verdict.path[0] == -M and verdict.path[-1] == M
        rho = birth_death_reversible(mc, q)
        assert is_reversible(mc, rho, STRICT) == (True, None)
        assert kolmogorov_cycle_check(mc)[0]


def test_criterion_6_acyclic_vertex_balance_property(capsys):
    with criterion(capsys, 6, "10000 random mixed graphs", 10.0):
        rng = random.Random(77)
        for _ in range(10_000):
            g = random_mixed_graph(rng)
            if is_vertex_balanced(g)[0] and find_directed_cycle(g) is None:
                assert is_edge_balanced(g)[0]


@pytest.fixture(scope="module")
def corpus():
    rng = random.Random(404)
    entries = []
    for _ in range(1000):
        net, _ = random_network(rng)
        x = random_state(rng, net.n_species, boundary=rng.random() < 0.4)
        entries.append((net, x, balance_report(net, x=x)))
    return entries


def test_criterion_7_implication_chain(capsys, corpus):
    with criterion(capsys, 7, "implication chain on 1000 random networks", 30.0):
        for net, x, rep in corpus:
            if rep.db:
                assert rep.fb and rep.scycb and rep.cb
            if rep.fb:
                assert rep.cycb
                assert rep.scycb  # mass-action mode: holds at boundary too
            if rep.scycb:
                assert rep.cycb
            if rep.cb and rep.cycb:
                assert rep.db
            if rep.wcb and rep.cycb:
                assert rep.db


def test_criterion_8_oracle_agreement(capsys, corpus):
    with criterion(capsys, 8, "definition-level oracle agreement", 30.0):
        for net, x, rep in corpus:
            assert classify_state_oracle(net, x=x).predicates() == rep.predicates()


def test_criterion_9_graph_equivalences(capsys, corpus):
    with criterion(capsys, 9, "graph-level equivalences", 30.0):
        for net, x, rep in corpus:
            rates = evaluate_rates(net, x)
            g = induced_graph(net, rates)
            assert rep.db == check_detailed_balance(net, rates)[0]
            assert rep.db == is_edge_balanced(g)[0]
            assert rep.scycb == (find_weakly_directed_cycle(g) is None)
            assert rep.cycb == (find_directed_cycle(g) is None)
