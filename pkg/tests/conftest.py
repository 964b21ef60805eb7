"""Shared random generators for graph and network test corpora."""

import math
import random
from itertools import combinations

from netbalance.mixedgraph import make_mixed_graph
from netbalance.network import make_network


def random_mixed_graph(rng: random.Random, max_vertices: int = 10):
    nv = rng.randint(1, max_vertices)
    undirected = []
    directed = []
    for i, j in combinations(range(nv), 2):
        roll = rng.random()
        if roll < 0.15:
            undirected.append((i, j))
        elif roll < 0.30:
            directed.append((i, j) if rng.random() < 0.5 else (j, i))
    return make_mixed_graph(range(nv), undirected, directed)


def random_network(rng: random.Random):
    """Random reversible mass-action network (<= 6 species, <= 8 pairs).

    The rate-constant mode is mixed so that both sides of every implication
    get exercised: generic constants, symmetric constants (detailed balance
    at x = 1), and cycle-condition-satisfying constants (formal balance).
    """
    n = rng.randint(2, 6)
    target_m = rng.randint(2, 6)
    vecs = set()
    for _ in range(60):
        if len(vecs) >= target_m:
            break
        vecs.add(tuple(rng.choice((0, 0, 0, 1, 1, 2)) for _ in range(n)))
    vecs = sorted(vecs)
    m = len(vecs)
    if m < 2:
        vecs.append(tuple(2 for _ in range(n)))
        m += 1
    all_pairs = list(combinations(range(m), 2))
    r = rng.randint(1, min(8, len(all_pairs)))
    pairs = rng.sample(all_pairs, r)
    mode = rng.choice(("generic", "generic", "symmetric", "wegscheider"))
    reactions = []
    if mode == "symmetric":
        for i, j in pairs:
            k = rng.uniform(0.5, 2.0)
            reactions.append((i, j, k, k))
    elif mode == "wegscheider":
        theta = [rng.uniform(-1.0, 1.0) for _ in range(m)]
        for i, j in pairs:
            c = rng.uniform(0.5, 2.0)
            reactions.append((i, j, c * math.exp(theta[i]), c * math.exp(theta[j])))
    else:
        for i, j in pairs:
            reactions.append((i, j, rng.uniform(0.5, 2.0), rng.uniform(0.5, 2.0)))
    species = [f"S{k}" for k in range(n)]
    return make_network(species, vecs, reactions), mode


def random_state(rng: random.Random, n: int, boundary: bool):
    x = [rng.uniform(0.5, 2.0) for _ in range(n)]
    if boundary:
        for k in range(n):
            if rng.random() < 0.4:
                x[k] = 0.0
    return x
