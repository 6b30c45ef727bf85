"""Honeycomb torus and periodic ladder graphs with typed edges and plaquettes.

Plaquette centres of the honeycomb torus sit on a triangular lattice with
integer coordinates ``(i, j)`` along two basis vectors at 60 degrees; they are
identified modulo ``(L1, L2)``.  Every unit cell ``(i, j)`` holds one plaquette
and two vertices: ``A(i, j)`` at the corner shared with plaquettes ``(i+1, j)``
and ``(i, j+1)``, and ``B(i, j)`` at the corner shared with ``(i+1, j)``,
``(i, j+1)`` and ``(i+1, j+1)``.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .pauli import PauliOperator

LATTICE_FORMAT = "floquetlab.lattice"
LATTICE_VERSION = 1


class ColoringError(ValueError):
    """The requested torus cannot carry a consistent 3-coloring of plaquettes."""


@dataclass(frozen=True)
class Edge:
    index: int
    u: int
    v: int
    letter: str  # "x", "y" or "z"
    label: int  # round type 0, 1, 2 (ladder: 0 rung, 1 xx-leg, 3 yy-leg)
    crossing: tuple[int, int] = (0, 0)  # times the edge wraps each periodic direction

    @property
    def qubits(self) -> tuple[int, int]:
        return (self.u, self.v)

    def other(self, q: int) -> int:
        return self.v if q == self.u else self.u


@dataclass(frozen=True)
class Plaquette:
    index: int
    label: int
    edges: tuple[int, ...]  # cyclic order
    vertices: tuple[int, ...]  # cyclic order
    cell: tuple[int, int] = (0, 0)


@dataclass
class _Graph:
    n_qubits: int
    edges: list[Edge]
    plaquettes: list[Plaquette]
    kind: str = field(default="graph", init=False)

    def check(self, e: int | Edge) -> PauliOperator:
        edge = self.edges[e] if isinstance(e, int) else e
        c = edge.letter.upper()
        return PauliOperator.on(self.n_qubits, {edge.u: c, edge.v: c})

    @cached_property
    def checks(self) -> list[PauliOperator]:
        return [self.check(e) for e in self.edges]

    @cached_property
    def incident(self) -> list[list[int]]:
        inc: list[list[int]] = [[] for _ in range(self.n_qubits)]
        for e in self.edges:
            inc[e.u].append(e.index)
            inc[e.v].append(e.index)
        return inc

    def edges_with_label(self, label: int) -> list[int]:
        return [e.index for e in self.edges if e.label == label]

    def plaquettes_with_label(self, label: int) -> list[int]:
        return [p.index for p in self.plaquettes if p.label == label]

    def chain_operator(self, edges) -> PauliOperator:
        """Product of the checks on the listed edges, in the given order."""
        out = PauliOperator(self.n_qubits)
        for e in edges:
            out = out * self.checks[e]
        return out

    def plaquette_operator(self, p: int) -> PauliOperator:
        return self.chain_operator(self.plaquettes[p].edges)

    def boundary(self, edges) -> set[int]:
        odd: set[int] = set()
        for e in edges:
            odd ^= {self.edges[e].u}
            odd ^= {self.edges[e].v}
        return odd

    def homology_class(self, edges) -> tuple[int, int]:
        """Z2 winding numbers of a 1-cycle."""
        if self.boundary(edges):
            raise ValueError("chain is not a cycle")
        w1 = w2 = 0
        for e in edges:
            c = self.edges[e].crossing
            w1 ^= c[0] & 1
            w2 ^= c[1] & 1
        return (w1, w2)

    def to_json(self) -> str:
        doc = {
            "format": LATTICE_FORMAT,
            "version": LATTICE_VERSION,
            "kind": self.kind,
            "size": self.size_dict(),
            "vertices": list(range(self.n_qubits)),
            "edges": [
                {"id": e.index, "u": e.u, "v": e.v, "letter": e.letter, "label": e.label}
                for e in self.edges
            ],
            "plaquettes": [
                {"id": p.index, "label": p.label, "edges": list(p.edges), "vertices": list(p.vertices)}
                for p in self.plaquettes
            ],
        }
        return json.dumps(doc, indent=1, sort_keys=True)

    def size_dict(self) -> dict:
        return {}


# neighbour offsets in counter-clockwise order and the colour shift (i - j) they cause
_NEIGHBOURS = ((1, 0), (0, 1), (-1, 1), (-1, 0), (0, -1), (1, -1))


@dataclass
class HoneycombTorus(_Graph):
    L1: int = 3
    L2: int = 3
    colors: dict[tuple[int, int], int] = field(default_factory=dict)

    def __post_init__(self):
        self.kind = "honeycomb_torus"

    @property
    def n_p(self) -> int:
        return self.L1 * self.L2

    def size_dict(self) -> dict:
        return {"L1": self.L1, "L2": self.L2}

    def cell_index(self, i: int, j: int) -> int:
        return (j % self.L2) * self.L1 + (i % self.L1)

    def vertex_a(self, i: int, j: int) -> int:
        return 2 * self.cell_index(i, j)

    def vertex_b(self, i: int, j: int) -> int:
        return 2 * self.cell_index(i, j) + 1

    def plaquette_at(self, i: int, j: int) -> int:
        return self.cell_index(i, j)

    def vertex_position(self, q: int) -> np.ndarray:
        """Position in lattice coordinates (units of the plaquette basis)."""
        cell, b = divmod(q, 2)
        j, i = divmod(cell, self.L1)
        off = 2.0 / 3.0 if b else 1.0 / 3.0
        return np.array([i + off, j + off])

    def edge_between(self, p: int, q: int) -> int:
        return self._pair_edge[frozenset((p, q))]

    @cached_property
    def plaquette_neighbours(self) -> list[list[int]]:
        out = []
        for p in self.plaquettes:
            i, j = p.cell
            out.append([self.plaquette_at(i + di, j + dj) for di, dj in _NEIGHBOURS])
        return out

    @cached_property
    def label_edges(self) -> dict[int, list[int]]:
        return {a: self.edges_with_label(a) for a in range(3)}

    def qubit_letter(self, q: int, label: int) -> str:
        """Letter of the check of the given label acting on qubit ``q``."""
        for e in self.incident[q]:
            if self.edges[e].label == label:
                return self.edges[e].letter
        raise KeyError((q, label))

    def edge_of(self, q: int, label: int) -> int:
        for e in self.incident[q]:
            if self.edges[e].label == label:
                return e
        raise KeyError((q, label))


def _three_coloring(L1: int, L2: int) -> dict[tuple[int, int], int]:
    """Propagate the colour rule over the torus; fail on any inconsistency."""
    shift = {(1, 0): 1, (0, 1): 2, (-1, 1): 1, (-1, 0): 2, (0, -1): 1, (1, -1): 2}
    colors = {(0, 0): 0}
    queue = deque([(0, 0)])
    while queue:
        i, j = queue.popleft()
        for (di, dj), s in shift.items():
            nb = ((i + di) % L1, (j + dj) % L2)
            c = (colors[(i, j)] + s) % 3
            if nb in colors:
                if colors[nb] != c:
                    raise ColoringError(f"torus ({L1},{L2}) admits no consistent 3-coloring")
            else:
                colors[nb] = c
                queue.append(nb)
    for (i, j), c in colors.items():
        for di, dj in _NEIGHBOURS:
            if colors[((i + di) % L1, (j + dj) % L2)] == c:
                raise ColoringError(f"torus ({L1},{L2}) has equal neighbouring labels")
    return colors


def build_honeycomb(L1: int, L2: int) -> HoneycombTorus:
    if L1 < 2 or L2 < 2:
        raise ValueError("torus periods must be at least 2")
    colors = _three_coloring(L1, L2)
    lat = HoneycombTorus(n_qubits=2 * L1 * L2, edges=[], plaquettes=[], L1=L1, L2=L2, colors=colors)

    def wrap(a, L):
        return -1 if a < 0 else (1 if a >= L else 0)

    edges: list[Edge] = []
    pair_edge: dict[frozenset, int] = {}
    for j in range(L2):
        for i in range(L1):
            a = lat.vertex_a(i, j)
            # (B cell, plaquette pair, letter)
            spec = (
                ((i, j - 1), ((i, j), (i + 1, j)), "z"),
                ((i - 1, j), ((i, j), (i, j + 1)), "x"),
                ((i, j), ((i + 1, j), (i, j + 1)), "y"),
            )
            for (bi, bj), (p1, p2), letter in spec:
                b = lat.vertex_b(bi, bj)
                c1 = colors[(p1[0] % L1, p1[1] % L2)]
                c2 = colors[(p2[0] % L1, p2[1] % L2)]
                label = (-c1 - c2) % 3
                crossing = (wrap(bi, L1), wrap(bj, L2))
                idx = len(edges)
                edges.append(Edge(idx, a, b, letter, label, crossing))
                key = frozenset((lat.plaquette_at(*p1), lat.plaquette_at(*p2)))
                if key in pair_edge:
                    raise ColoringError(f"torus ({L1},{L2}) is too small: plaquettes share two edges")
                pair_edge[key] = idx
    lat.edges = edges
    lat._pair_edge = pair_edge

    plaquettes = []
    for j in range(L2):
        for i in range(L1):
            p = lat.plaquette_at(i, j)
            nbrs = [lat.plaquette_at(i + di, j + dj) for di, dj in _NEIGHBOURS]
            pe = tuple(pair_edge[frozenset((p, q))] for q in nbrs)
            verts = []
            for k in range(6):
                e1, e2 = edges[pe[k]], edges[pe[(k + 1) % 6]]
                common = {e1.u, e1.v} & {e2.u, e2.v}
                verts.append(common.pop())
            plaquettes.append(Plaquette(p, colors[(i, j)], pe, tuple(verts), (i, j)))
    lat.plaquettes = plaquettes
    return lat


def nontrivial_cycles(lat: _Graph) -> list[list[int]]:
    """Shortest cycles through vertex 0 in the two Z2 homology classes (1,0) and (0,1)."""
    out = []
    for target in ((1, 0), (0, 1)):
        start = (0, 0, 0)
        prev: dict[tuple[int, int, int], tuple[tuple[int, int, int], int]] = {start: (start, -1)}
        queue = deque([start])
        goal = (0,) + target
        while queue and goal not in prev:
            v, w1, w2 = state = queue.popleft()
            for e in lat.incident[v]:
                edge = lat.edges[e]
                nxt = (edge.other(v), w1 ^ (edge.crossing[0] & 1), w2 ^ (edge.crossing[1] & 1))
                if nxt not in prev:
                    prev[nxt] = (state, e)
                    queue.append(nxt)
        if goal not in prev:
            raise ValueError(f"no cycle in class {target}")
        path = []
        s = goal
        while s != start:
            s, e = prev[s]
            path.append(e)
        out.append(path[::-1])
    return out


def chain_to_cycle_order(lat: _Graph, edges: list[int], start: int) -> list[int]:
    """Order the edges of a simple cycle as a walk from ``start``."""
    remaining = set(edges)
    order, v = [], start
    while remaining:
        e = next(e for e in lat.incident[v] if e in remaining)
        remaining.discard(e)
        order.append(e)
        v = lat.edges[e].other(v)
    return order


@dataclass
class CycleBasis:
    plaquette_cycles: list[list[int]]
    nontrivial: list[list[int]]


def cycle_basis(lat: _Graph) -> CycleBasis:
    return CycleBasis([list(p.edges) for p in lat.plaquettes], nontrivial_cycles(lat))


# -- ladder -----------------------------------------------------------------

LADDER_RUNG, LADDER_XX, LADDER_YY = 0, 1, 3


@dataclass
class LadderGraph(_Graph):
    L: int = 4

    def __post_init__(self):
        self.kind = "ladder"

    def size_dict(self) -> dict:
        return {"L": self.L}

    def top(self, k: int) -> int:
        return k % self.L

    def bottom(self, k: int) -> int:
        return self.L + k % self.L

    def rung(self, k: int) -> int:
        return self._rungs[k % self.L]

    def leg(self, k: int, side: str) -> int:
        """Leg edge between rungs ``k`` and ``k+1`` on side ``"top"`` or ``"bottom"``."""
        return self._legs[(side, k % self.L)]

    def link_letter(self, k: int) -> str:
        return "x" if k % 2 == 0 else "y"


def build_ladder(L: int) -> LadderGraph:
    if L % 2:
        raise ValueError("the ladder needs an even number of rungs")
    if L < 4:
        raise ValueError("the ladder needs at least 4 rungs")
    lat = LadderGraph(n_qubits=2 * L, edges=[], plaquettes=[], L=L)
    edges: list[Edge] = []
    rungs, legs = {}, {}
    for k in range(L):
        rungs[k] = len(edges)
        edges.append(Edge(len(edges), k, L + k, "z", LADDER_RUNG))
    for side, base in (("top", 0), ("bottom", L)):
        for k in range(L):
            letter = "x" if k % 2 == 0 else "y"
            label = LADDER_XX if letter == "x" else LADDER_YY
            crossing = (1, 0) if k == L - 1 else (0, 0)
            legs[(side, k)] = len(edges)
            edges.append(Edge(len(edges), base + k, base + (k + 1) % L, letter, label, crossing))
    lat.edges = edges
    lat._rungs, lat._legs = rungs, legs
    plaqs = []
    for k in range(L):
        pe = (rungs[k], legs[("top", k)], rungs[(k + 1) % L], legs[("bottom", k)])
        verts = (L + k, k, (k + 1) % L, L + (k + 1) % L)
        label = LADDER_XX if k % 2 == 0 else LADDER_YY
        plaqs.append(Plaquette(k, label, pe, verts, (k, 0)))
    lat.plaquettes = plaqs
    return lat
