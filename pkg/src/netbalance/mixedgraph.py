"""Simple mixed graphs: balance predicates and cycle detection.

A mixed graph carries disjoint sets of undirected and directed edges, with no
loops and at most one edge per vertex pair.  All balance notions in this
package (for reaction networks and Markov chains alike) reduce to predicates
on such a graph.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Hashable, Iterable, Optional, Sequence

import networkx as nx

Vertex = Hashable

DEFAULT_CYCLE_CAP = 100_000

UNDIRECTED = "undirected"
DIRECTED = "directed"


class GraphError(ValueError):
    pass


class LoopEdgeError(GraphError):
    pass


class DuplicateEdgeError(GraphError):
    pass


class UnknownVertexError(GraphError):
    pass


@dataclass(frozen=True)
class MixedGraph:
    """Immutable simple mixed graph (vertices, undirected edges, directed edges)."""

    vertices: tuple
    undirected: frozenset  # of frozenset({u, v})
    directed: frozenset    # of (u, v)

    def has_vertex(self, v: Vertex) -> bool:
        return v in self._vertex_set

    @property
    def _vertex_set(self):
        return set(self.vertices)

    def undirected_neighbors(self, v: Vertex) -> list:
        out = []
        for e in self.undirected:
            if v in e:
                (w,) = set(e) - {v}
                out.append(w)
        return out

    def out_neighbors(self, v: Vertex) -> list:
        return [b for (a, b) in self.directed if a == v]

    def in_neighbors(self, v: Vertex) -> list:
        return [a for (a, b) in self.directed if b == v]

    def edge_kind(self, a: Vertex, b: Vertex) -> Optional[str]:
        """UNDIRECTED, DIRECTED (a to b), or None. Direction b->a reports None."""
        if frozenset((a, b)) in self.undirected:
            return UNDIRECTED
        if (a, b) in self.directed:
            return DIRECTED
        return None

    def restrict(self, keep: Iterable[Vertex]) -> "MixedGraph":
        """Induced subgraph on the given vertices (order preserved)."""
        keep_set = set(keep)
        return MixedGraph(
            vertices=tuple(v for v in self.vertices if v in keep_set),
            undirected=frozenset(e for e in self.undirected if e <= keep_set),
            directed=frozenset(
                (a, b) for (a, b) in self.directed if a in keep_set and b in keep_set
            ),
        )


@dataclass(frozen=True)
class Cycle:
    """Closed walk through distinct vertices (first == last, >= 3 distinct).

    ``orientations[k]`` tags the edge from ``vertices[k]`` to ``vertices[k+1]``
    as DIRECTED (forward along the traversal) or UNDIRECTED.
    """

    vertices: tuple
    orientations: tuple = field(default=())

    def __post_init__(self):
        if len(self.vertices) < 4 or self.vertices[0] != self.vertices[-1]:
            raise GraphError("cycle must be closed with >= 3 distinct vertices")
        interior = self.vertices[:-1]
        if len(set(interior)) != len(interior):
            raise GraphError("cycle vertices must be distinct")
        if self.orientations and len(self.orientations) != len(self.vertices) - 1:
            raise GraphError("one orientation tag per edge required")

    def __len__(self) -> int:
        return len(self.vertices) - 1

    @property
    def is_directed(self) -> bool:
        return bool(self.orientations) and all(
            t == DIRECTED for t in self.orientations
        )

    @property
    def is_weakly_directed(self) -> bool:
        return bool(self.orientations) and any(
            t == DIRECTED for t in self.orientations
        )

    def edges(self) -> list:
        return list(zip(self.vertices[:-1], self.vertices[1:]))

    def canonical(self) -> tuple:
        """Rotation-invariant key (directed cycles only keep their orientation)."""
        interior = self.vertices[:-1]
        n = len(interior)
        rotations = [tuple(interior[i:] + interior[:i]) for i in range(n)]
        return min(rotations, key=repr)

    def format(self, labels=None) -> str:
        def lab(v):
            return str(labels[v]) if labels is not None else str(v)

        parts = [lab(self.vertices[0])]
        for tag, v in zip(
            self.orientations or (DIRECTED,) * len(self), self.vertices[1:]
        ):
            parts.append("→" if tag == DIRECTED else "—")
            parts.append(lab(v))
        return "".join(parts)


def make_mixed_graph(
    vertices: Iterable[Vertex],
    undirected_pairs: Iterable = (),
    directed_pairs: Iterable = (),
) -> MixedGraph:
    """Build a simple mixed graph, enforcing simplicity and no loops."""
    verts = tuple(dict.fromkeys(vertices))
    vert_set = set(verts)
    seen_pairs = set()
    undirected = set()
    for pair in undirected_pairs:
        a, b = tuple(pair)
        _check_endpoints(a, b, vert_set)
        key = frozenset((a, b))
        if key in seen_pairs:
            raise DuplicateEdgeError(f"edge {{{a}, {b}}} given twice")
        seen_pairs.add(key)
        undirected.add(key)
    directed = set()
    for a, b in directed_pairs:
        _check_endpoints(a, b, vert_set)
        key = frozenset((a, b))
        if key in seen_pairs:
            raise DuplicateEdgeError(f"pair {{{a}, {b}}} carries more than one edge")
        seen_pairs.add(key)
        directed.add((a, b))
    return MixedGraph(verts, frozenset(undirected), frozenset(directed))


def _check_endpoints(a, b, vert_set):
    if a == b:
        raise LoopEdgeError(f"loop edge at {a}")
    for v in (a, b):
        if v not in vert_set:
            raise UnknownVertexError(f"unknown vertex {v}")


def is_edge_balanced(g: MixedGraph):
    """True iff the graph has no directed edge; otherwise a directed witness."""
    for edge in sorted(g.directed, key=repr):
        return False, edge
    return True, None


def is_vertex_balanced(g: MixedGraph):
    """True iff every vertex with an incident directed edge has one in and one out."""
    has_out = {v: False for v in g.vertices}
    has_in = {v: False for v in g.vertices}
    for a, b in g.directed:
        has_out[a] = True
        has_in[b] = True
    for v in g.vertices:
        if has_out[v] != has_in[v]:
            return False, v
    return True, None


def _has_directed_cycle(g: MixedGraph) -> bool:
    """Cycle detection on (V, D) by iterative DFS with tricolor marking."""
    adj = {v: [] for v in g.vertices}
    for a, b in g.directed:
        adj[a].append(b)
    WHITE, GRAY, BLACK = 0, 1, 2
    color = {v: WHITE for v in g.vertices}
    for root in g.vertices:
        if color[root] != WHITE:
            continue
        stack = [(root, iter(adj[root]))]
        color[root] = GRAY
        while stack:
            v, it = stack[-1]
            advanced = False
            for w in it:
                if color[w] == WHITE:
                    color[w] = GRAY
                    stack.append((w, iter(adj[w])))
                    advanced = True
                    break
                if color[w] == GRAY:
                    return True
            if not advanced:
                color[v] = BLACK
                stack.pop()
    return False


def find_directed_cycle(g: MixedGraph) -> Optional[Cycle]:
    """A shortest directed cycle of (V, D), or None if that subgraph is acyclic.

    DFS settles existence; the witness is then minimized by BFS from each
    vertex (simplicity guarantees length >= 3, so a 3-cycle is optimal).
    """
    if not _has_directed_cycle(g):
        return None
    adj = {v: [] for v in g.vertices}
    for a, b in g.directed:
        adj[a].append(b)
    best = None
    for root in g.vertices:
        # shortest directed path back to root
        parent = {root: None}
        frontier = [root]
        found = None
        while frontier and found is None:
            nxt = []
            for v in frontier:
                for w in adj[v]:
                    if w == root and v != root:
                        found = v
                        break
                    if w not in parent:
                        parent[w] = v
                        nxt.append(w)
                if found is not None:
                    break
            frontier = nxt
        if found is None:
            continue
        path = [found]
        while parent[path[-1]] is not None:
            path.append(parent[path[-1]])
        path.reverse()
        verts = tuple(path) + (path[0],)
        if len(verts) >= 4 and (best is None or len(verts) < len(best)):
            best = verts
            if len(best) == 4:
                break
    if best is None:
        return None
    return Cycle(best, (DIRECTED,) * (len(best) - 1))


def _skeleton_cycles(g: MixedGraph, cap: int):
    """Elementary cycles of the graph with every edge treated as undirected."""
    sk = nx.Graph()
    sk.add_nodes_from(g.vertices)
    for e in g.undirected:
        a, b = tuple(e)
        sk.add_edge(a, b)
    for a, b in g.directed:
        sk.add_edge(a, b)
    count = 0
    for nodes in nx.simple_cycles(sk):
        if count >= cap:
            yield None  # sentinel: truncated
            return
        count += 1
        yield nodes


def _orient_cycle(g: MixedGraph, nodes: Sequence[Vertex]) -> Optional[Cycle]:
    """Tag a skeleton cycle; None if its directed edges are inconsistent both ways."""
    for candidate in (list(nodes), list(reversed(nodes))):
        closed = candidate + [candidate[0]]
        tags = []
        ok = True
        for a, b in zip(closed[:-1], closed[1:]):
            kind = g.edge_kind(a, b)
            if kind == UNDIRECTED:
                tags.append(UNDIRECTED)
            elif kind == DIRECTED:
                tags.append(DIRECTED)
            else:
                ok = False  # edge runs b -> a: backward
                break
        if ok:
            return Cycle(tuple(closed), tuple(tags))
    return None


def find_weakly_directed_cycle(
    g: MixedGraph, cap: int = DEFAULT_CYCLE_CAP
) -> Optional[Cycle]:
    """A cycle with >= 1 directed edge and all directed edges aligned, if any.

    Enumerates elementary cycles of the undirected skeleton and filters by the
    orientation condition; every witness is re-verified against the host graph.
    """
    for nodes in _skeleton_cycles(g, cap):
        if nodes is None:
            break
        cycle = _orient_cycle(g, nodes)
        if cycle is not None and cycle.is_weakly_directed:
            verify_cycle(g, cycle)
            return cycle
    return None


@dataclass(frozen=True)
class CycleEnumeration:
    cycles: tuple
    truncated: bool


def enumerate_directed_cycles(
    g: MixedGraph, min_len: int = 3, cap: int = DEFAULT_CYCLE_CAP
) -> CycleEnumeration:
    """All elementary directed cycles of (V, D) with >= min_len vertices.

    Uses Johnson's algorithm (networkx) with a hard cap; hitting the cap sets
    the ``truncated`` flag rather than raising.
    """
    if cap <= 0:
        raise ValueError("cap must be positive")
    dg = nx.DiGraph()
    dg.add_nodes_from(g.vertices)
    dg.add_edges_from(g.directed)
    cycles = []
    truncated = False
    for nodes in nx.simple_cycles(dg):
        if len(nodes) < min_len:
            continue
        if len(cycles) >= cap:
            truncated = True
            break
        closed = tuple(nodes) + (nodes[0],)
        cycles.append(Cycle(closed, (DIRECTED,) * len(nodes)))
    cycles.sort(key=lambda c: (len(c), repr(c.canonical())))
    return CycleEnumeration(tuple(cycles), truncated)


def verify_cycle(g: MixedGraph, cycle: Cycle) -> None:
    """Check a cycle edge by edge against the host graph; raise on mismatch."""
    tags = cycle.orientations or (DIRECTED,) * len(cycle)
    for (a, b), tag in zip(cycle.edges(), tags):
        kind = g.edge_kind(a, b)
        if kind != tag:
            raise GraphError(f"cycle edge ({a}, {b}) tagged {tag} but graph has {kind}")


def to_dot(g: MixedGraph, labels=None, name: str = "G") -> str:
    """DOT rendering: one digraph, undirected edges emitted with dir=none."""

    def lab(v):
        return str(labels[v]) if labels is not None else str(v)

    lines = [f"digraph {name} {{"]
    for v in g.vertices:
        lines.append(f'  "{lab(v)}";')
    for e in sorted(g.undirected, key=repr):
        a, b = sorted(e, key=repr)
        lines.append(f'  "{lab(a)}" -> "{lab(b)}" [dir=none];')
    for a, b in sorted(g.directed, key=repr):
        lines.append(f'  "{lab(a)}" -> "{lab(b)}";')
    lines.append("}")
    return "\n".join(lines) + "\n"
