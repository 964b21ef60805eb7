import random

import numpy as np
import pytest

from netbalance.balance import (
    balance_report,
    check_complex_balance,
    evaluate_rates,
    evaluate_rates_table,
)
from netbalance.equilibrium import (
    classify_state_oracle,
    find_equilibrium,
    formation_rate,
)
from netbalance.network import network_summary, parse_network

from conftest import random_network, random_state

CYCLIC = """
A <-> B ; kf=2, kr=1
B <-> C ; kf=2, kr=1
C <-> A ; kf=2, kr=1
"""


def example1_network(rng=None):
    if rng is None:
        kAB, kBA, kBC, kCB, kAC = 1.3, 0.7, 0.9, 1.1, 0.9
        k0 = (1.0, 0.8, 1.2, 0.6)
    else:
        kAB, kBA, kBC, kCB, kAC = (rng.uniform(0.5, 2.0) for _ in range(5))
        k0 = tuple(rng.uniform(0.5, 2.0) for _ in range(4))
    kCA = kAC * kCB * kBA / (kAB * kBC)  # triangle cycle condition
    return parse_network(
        f"A <-> B ; kf={kAB}, kr={kBA}\n"
        f"B <-> C ; kf={kBC}, kr={kCB}\n"
        f"C <-> A ; kf={kCA}, kr={kAC}\n"
        f"A <-> 0 ; kf={k0[0]}, kr={k0[1]}\n"
        f"0 <-> C ; kf={k0[2]}, kr={k0[3]}"
    )


def test_formation_rate_cyclic_equilibrium():
    net = parse_network(CYCLIC)
    f = formation_rate(net, evaluate_rates(net, [1, 1, 1]))
    assert np.allclose(f, 0.0, atol=1e-14)


def test_formation_rate_single_pair():
    net = parse_network("A <-> B ; kf=1, kr=1")
    f = formation_rate(net, evaluate_rates(net, [2.0, 1.0]))
    assert np.allclose(f, [-1.0, 1.0])


def test_formation_rate_zero_rates():
    net = parse_network("A <-> B ; kf=0, kr=0")
    f = formation_rate(net, evaluate_rates(net, [2.0, 1.0]))
    assert np.array_equal(f, [0.0, 0.0])


def test_formation_rate_linear_in_rates():
    net = parse_network("A <-> B\nB <-> C")
    rng = random.Random(5)
    edges = net.directed_edges()
    r1 = evaluate_rates_table(net, {e: rng.uniform(0, 3) for e in edges})
    r2 = evaluate_rates_table(net, {e: rng.uniform(0, 3) for e in edges})
    combo = {e: 2.0 * r1[e] + 0.5 * r2[e] for e in edges}
    assert np.allclose(
        formation_rate(net, combo),
        2.0 * formation_rate(net, r1) + 0.5 * formation_rate(net, r2),
    )


def test_find_equilibrium_already_there():
    net = parse_network(CYCLIC)
    res = find_equilibrium(net, x0=[1, 1, 1])
    assert res.converged and res.residual <= 1e-12
    assert np.allclose(res.x, [1, 1, 1])


def test_find_equilibrium_two_species():
    net = parse_network("A <-> B ; kf=1, kr=2")
    res = find_equilibrium(net, x0=[1.0, 1.0])
    assert res.converged and res.residual <= 1e-12
    assert np.allclose(res.x, [4 / 3, 2 / 3], atol=1e-10)
    assert res.x.sum() == pytest.approx(2.0)  # stays in the stoichiometric class


def test_find_equilibrium_example1():
    net = example1_network()
    res = find_equilibrium(net)
    assert res.converged
    rep = balance_report(net, x=res.x)
    assert rep.cb and not rep.db


def test_converged_deficiency_zero_is_complex_balanced():
    rng = random.Random(21)
    for _ in range(25):
        net = example1_network(rng)
        assert network_summary(net).deficiency == 0
        res = find_equilibrium(net)
        assert res.converged
        cb, _ = check_complex_balance(net, evaluate_rates(net, res.x))
        assert cb


def test_nonconvergence_reports_best_iterate():
    net = parse_network("A <-> B ; kf=1, kr=2")
    res = find_equilibrium(net, x0=[1.0, 1.0], max_iter=0)
    assert not res.converged
    assert res.residual > 0
    assert np.array_equal(res.x, [1.0, 1.0])


def test_oracle_matches_report_on_examples():
    net = parse_network(CYCLIC)
    assert (
        classify_state_oracle(net, x=[1, 1, 1]).predicates()
        == balance_report(net, x=[1, 1, 1]).predicates()
    )
    table_net = parse_network("A <-> B\nB <-> C")
    table = {e: 1.0 for e in table_net.directed_edges()}
    rep = classify_state_oracle(table_net, table=table)
    assert all(rep.predicates().values())


def test_oracle_matches_report_random():
    rng = random.Random(31)
    for _ in range(150):
        net, _ = random_network(rng)
        x = random_state(rng, net.n_species, boundary=rng.random() < 0.4)
        assert (
            classify_state_oracle(net, x=x).predicates()
            == balance_report(net, x=x).predicates()
        )
