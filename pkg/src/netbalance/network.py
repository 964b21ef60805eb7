"""Reversible reaction network model, text parser, and structural summary."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

import numpy as np


class NetworkError(ValueError):
    pass


class NetworkSyntaxError(NetworkError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class NegativeStoichiometryError(NetworkError):
    pass


class IrreversibleReactionError(NetworkError):
    pass


class DuplicateReactionError(NetworkError):
    pass


@dataclass(frozen=True)
class Reaction:
    """Reversible pair between complex vertices i and j.

    kf is the rate constant of i -> j, kr of j -> i; both are None in table
    mode (rates supplied externally per directed edge).
    """

    i: int
    j: int
    kf: Optional[float] = None
    kr: Optional[float] = None


@dataclass(frozen=True)
class ReactionNetwork:
    species: tuple
    complexes: tuple          # vertex -> tuple of Fractions, one per species
    complex_labels: tuple
    reactions: tuple          # of Reaction
    mass_action: bool

    @property
    def n_species(self) -> int:
        return len(self.species)

    @property
    def n_complexes(self) -> int:
        return len(self.complexes)

    def directed_edges(self) -> list:
        """Both directions of every reversible pair, canonical order."""
        edges = []
        for rx in self.reactions:
            edges.append((rx.i, rx.j))
            edges.append((rx.j, rx.i))
        return edges

    def rate_constant(self, i: int, j: int) -> float:
        for rx in self.reactions:
            if (rx.i, rx.j) == (i, j):
                return rx.kf
            if (rx.j, rx.i) == (i, j):
                return rx.kr
        raise NetworkError(f"no reaction between vertices {i} and {j}")

    def complex_vector(self, i: int) -> np.ndarray:
        return np.array([float(c) for c in self.complexes[i]])


@dataclass(frozen=True)
class NetworkSummary:
    """Structural counts: m complexes, l linkage classes, s stoichiometric rank,
    r reversible reactions, deficiency = m - l - s, cycle rank = r - m + l."""

    complexes: int
    linkage_classes: int
    stoich_rank: int
    reversible_reactions: int
    deficiency: int
    cycle_rank: int

    def to_json_dict(self) -> dict:
        return {
            "m": self.complexes,
            "l": self.linkage_classes,
            "s": self.stoich_rank,
            "r": self.reversible_reactions,
            "delta": self.deficiency,
            "gamma": self.cycle_rank,
        }


def make_network(
    species: Sequence[str],
    complexes: Sequence[Sequence],
    reactions: Sequence,
    mass_action: bool = True,
    allow_coincident_complexes: bool = False,
    complex_labels: Optional[Sequence[str]] = None,
) -> ReactionNetwork:
    """Validating constructor; reactions as (i, j) or (i, j, kf, kr) tuples."""
    species = tuple(species)
    vecs = []
    for vec in complexes:
        frac = tuple(Fraction(c) for c in vec)
        if len(frac) != len(species):
            raise NetworkError("complex vector length does not match species count")
        if any(c < 0 for c in frac):
            raise NegativeStoichiometryError(f"negative stoichiometry in {vec}")
        vecs.append(frac)
    if not allow_coincident_complexes and len(set(vecs)) != len(vecs):
        raise NetworkError(
            "distinct vertices carry identical complex vectors "
            "(pass allow_coincident_complexes=True to permit)"
        )
    rxs = []
    seen = set()
    for item in reactions:
        if isinstance(item, Reaction):
            rx = item
        elif len(item) == 2:
            rx = Reaction(item[0], item[1])
        else:
            rx = Reaction(*item)
        if rx.i == rx.j:
            raise NetworkError(f"loop reaction at vertex {rx.i}")
        for v in (rx.i, rx.j):
            if not 0 <= v < len(vecs):
                raise NetworkError(f"unknown complex vertex {v}")
        key = frozenset((rx.i, rx.j))
        if key in seen:
            raise DuplicateReactionError(f"repeated reaction between {rx.i} and {rx.j}")
        seen.add(key)
        if mass_action:
            if rx.kf is None or rx.kr is None:
                raise NetworkError("mass-action mode requires kf and kr")
            if rx.kf < 0 or rx.kr < 0:
                raise NetworkError("rate constants must be nonnegative")
        rxs.append(rx)
    if complex_labels is None:
        complex_labels = tuple(_format_complex(v, species) for v in vecs)
    return ReactionNetwork(
        species=species,
        complexes=tuple(vecs),
        complex_labels=tuple(complex_labels),
        reactions=tuple(rxs),
        mass_action=mass_action,
    )


_TERM_RE = re.compile(r"\s*(?:(\d+(?:\.\d+)?)\s*)?([A-Za-z_][A-Za-z0-9_']*)\s*")
_NUM_RE = re.compile(r"[-+]?\d+(?:\.\d+)?(?:[eE][-+]?\d+)?")


def _parse_complex(text: str, lineno: int, col0: int):
    """Parse a complex into {species: Fraction}; empty dict is the zero complex."""
    stripped = text.strip()
    if stripped == "0":
        return {}
    terms = {}
    pos = 0
    expect_term = True
    while pos < len(text):
        if text[pos].isspace():
            pos += 1
            continue
        if not expect_term:
            if text[pos] == "+":
                pos += 1
                expect_term = True
                continue
            raise NetworkSyntaxError(
                f"expected '+' before {text[pos:].strip()!r}", lineno, col0 + pos + 1
            )
        m = _TERM_RE.match(text, pos)
        if not m or m.end() == pos:
            raise NetworkSyntaxError(
                f"expected species term at {text[pos:].strip()!r}",
                lineno,
                col0 + pos + 1,
            )
        coeff_str, name = m.groups()
        coeff = Fraction(coeff_str) if coeff_str is not None else Fraction(1)
        terms[name] = terms.get(name, Fraction(0)) + coeff
        pos = m.end()
        expect_term = False
    if expect_term:
        raise NetworkSyntaxError("empty complex", lineno, col0 + 1)
    return terms


def _parse_params(text: str, lineno: int, col0: int):
    m = re.fullmatch(
        r"\s*kf\s*=\s*(" + _NUM_RE.pattern + r")\s*,\s*kr\s*=\s*("
        + _NUM_RE.pattern + r")\s*",
        text,
    )
    if not m:
        raise NetworkSyntaxError(
            "expected 'kf=<number>, kr=<number>'", lineno, col0 + 1
        )
    kf, kr = float(m.group(1)), float(m.group(2))
    if kf < 0 or kr < 0:
        raise NetworkSyntaxError("rate constants must be nonnegative", lineno, col0 + 1)
    return kf, kr


def parse_network(text: str) -> ReactionNetwork:
    """Parse the line-oriented network format.

    line := complex "<->" complex [";" "kf=" num "," "kr=" num]
    The zero complex is written 0.  Rate parameters must be present on every
    line (mass-action mode) or absent on every line (table mode).
    """
    species: list = []
    complex_index: dict = {}
    complex_terms: list = []
    reactions = []
    seen_pairs = set()
    has_params = None

    def vertex_of(terms, lineno):
        for name in terms:
            if name not in species:
                species.append(name)
        key = frozenset((k, v) for k, v in terms.items() if v != 0)
        if key not in complex_index:
            complex_index[key] = len(complex_terms)
            complex_terms.append(terms)
        return complex_index[key]

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        if ";" in line:
            reaction_part, params_part = line.split(";", 1)
        else:
            reaction_part, params_part = line, None
        if "<->" not in reaction_part:
            if "->" in reaction_part or "<-" in reaction_part:
                raise IrreversibleReactionError(
                    f"line {lineno}: only reversible reactions ('<->') are accepted"
                )
            raise NetworkSyntaxError("missing '<->'", lineno, 1)
        lhs, rhs = reaction_part.split("<->", 1)
        left = _parse_complex(lhs, lineno, 0)
        right = _parse_complex(rhs, lineno, len(lhs) + 3)
        i = vertex_of(left, lineno)
        j = vertex_of(right, lineno)
        if i == j:
            raise NetworkError(f"line {lineno}: loop reaction (both sides equal)")
        key = frozenset((i, j))
        if key in seen_pairs:
            raise DuplicateReactionError(f"line {lineno}: duplicate reaction")
        seen_pairs.add(key)
        if params_part is not None:
            if has_params is False:
                raise NetworkSyntaxError(
                    "mixing parameterized and table-mode lines", lineno, 1
                )
            has_params = True
            kf, kr = _parse_params(params_part, lineno, len(reaction_part) + 1)
            reactions.append((i, j, kf, kr))
        else:
            if has_params is True:
                raise NetworkSyntaxError(
                    "mixing parameterized and table-mode lines", lineno, 1
                )
            has_params = False
            reactions.append((i, j))
    vectors = [
        tuple(terms.get(name, Fraction(0)) for name in species)
        for terms in complex_terms
    ]
    return make_network(
        species=species,
        complexes=vectors,
        reactions=reactions,
        mass_action=bool(has_params),
    )


def _format_coeff(c: Fraction) -> str:
    if c.denominator == 1:
        return str(c.numerator)
    return repr(float(c))


def _format_complex(vec: Sequence[Fraction], species: Sequence[str]) -> str:
    parts = []
    for coeff, name in zip(vec, species):
        if coeff == 0:
            continue
        if coeff == 1:
            parts.append(name)
        else:
            parts.append(f"{_format_coeff(coeff)} {name}")
    return " + ".join(parts) if parts else "0"


def serialize_network(net: ReactionNetwork) -> str:
    """Canonical text form; parse(serialize(net)) reproduces a parsed network."""
    lines = []
    for rx in net.reactions:
        lhs = _format_complex(net.complexes[rx.i], net.species)
        rhs = _format_complex(net.complexes[rx.j], net.species)
        if net.mass_action:
            lines.append(f"{lhs} <-> {rhs} ; kf={rx.kf!r}, kr={rx.kr!r}")
        else:
            lines.append(f"{lhs} <-> {rhs}")
    return "\n".join(lines) + "\n"


def stoichiometric_matrix(net: ReactionNetwork) -> np.ndarray:
    """n x r matrix of reaction vectors y(j) - y(i), one column per pair."""
    cols = []
    for rx in net.reactions:
        yi = net.complex_vector(rx.i)
        yj = net.complex_vector(rx.j)
        cols.append(yj - yi)
    if not cols:
        return np.zeros((net.n_species, 0))
    return np.column_stack(cols)


def _exact_rank(columns) -> int:
    """Rank by fraction-based Gaussian elimination (columns of Fractions)."""
    rows = [list(col) for col in columns]  # eliminate over reaction vectors
    rank = 0
    ncols = len(rows[0]) if rows else 0
    pivot_col = 0
    while rank < len(rows) and pivot_col < ncols:
        pivot = None
        for r in range(rank, len(rows)):
            if rows[r][pivot_col] != 0:
                pivot = r
                break
        if pivot is None:
            pivot_col += 1
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        pv = rows[rank][pivot_col]
        for r in range(rank + 1, len(rows)):
            factor = rows[r][pivot_col] / pv
            if factor != 0:
                rows[r] = [a - factor * b for a, b in zip(rows[r], rows[rank])]
        rank += 1
        pivot_col += 1
    return rank


def stoich_rank_exact(net: ReactionNetwork) -> int:
    cols = []
    for rx in net.reactions:
        yi = net.complexes[rx.i]
        yj = net.complexes[rx.j]
        cols.append(tuple(a - b for a, b in zip(yj, yi)))
    return _exact_rank(cols)


def stoich_rank_float(net: ReactionNetwork, threshold: float = 1e-9) -> int:
    mat = stoichiometric_matrix(net)
    if mat.size == 0:
        return 0
    sv = np.linalg.svd(mat, compute_uv=False)
    if sv.size == 0 or sv[0] == 0:
        return 0
    return int(np.sum(sv > threshold * sv[0]))


def network_summary(net: ReactionNetwork) -> NetworkSummary:
    m = net.n_complexes
    r = len(net.reactions)
    # linkage classes: components of the symmetrized reaction graph
    parent = list(range(m))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for rx in net.reactions:
        ra, rb = find(rx.i), find(rx.j)
        if ra != rb:
            parent[ra] = rb
    linkage = len({find(v) for v in range(m)})
    s = stoich_rank_exact(net)
    return NetworkSummary(
        complexes=m,
        linkage_classes=linkage,
        stoich_rank=s,
        reversible_reactions=r,
        deficiency=m - linkage - s,
        cycle_rank=r - m + linkage,
    )


def network_to_json_dict(net: ReactionNetwork) -> dict:
    return {
        "species": list(net.species),
        "complexes": [
            {"label": lab, "vector": [float(c) for c in vec]}
            for lab, vec in zip(net.complex_labels, net.complexes)
        ],
        "reactions": [
            {"from": rx.i, "to": rx.j, "kf": rx.kf, "kr": rx.kr}
            for rx in net.reactions
        ],
        "mass_action": net.mass_action,
    }


def network_to_json(net: ReactionNetwork) -> str:
    return json.dumps(network_to_json_dict(net), indent=2)
