"""Dimer dynamics of check measurements on an annulus.

The annulus is a brick-wall drawing of the honeycomb lattice, periodic in
``x`` with even period ``Lx`` and open in ``y`` with rows ``0 .. H-1``.
Vertical edges join ``(x, y)`` and ``(x, y+1)``; horizontal edges join
``(x, y)`` and ``(x+1, y)`` when ``x + y`` is even.  On the two boundary rows
the remaining degree-two vertices are joined pairwise by extra horizontal
edges, so every vertex is trivalent and boundary hexagons become squares.

Hexagon ``H(x, y)`` (``x + y`` even) spans columns ``x, x+1`` and rows
``y .. y+2`` and has colour ``y mod 3``; hexagons hanging over a boundary
are continued by the same formula.  An edge carries the colour of neither
face beside it.

A dimer configuration pairs up all vertices; each dimer carries a Z2 chain
(a set of edges) joining its endpoints.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numpy as np


@dataclass
class Annulus:
    Lx: int
    H: int
    edges: list[tuple[int, int]] = field(default_factory=list)
    labels: list[int] = field(default_factory=list)
    boundary_side: list[str | None] = field(default_factory=list)  # "bottom", "top" or None

    def vid(self, x: int, y: int) -> int:
        return y * self.Lx + (x % self.Lx)

    def coords(self, v: int) -> tuple[int, int]:
        y, x = divmod(v, self.Lx)
        return x, y

    @property
    def n(self) -> int:
        return self.Lx * self.H

    def edge_index(self, a: int, b: int) -> int:
        return self._index[frozenset((a, b))]

    @property
    def incident(self) -> list[list[int]]:
        return self._inc

    def edges_with_label(self, label: int, side: str | None = "any") -> list[int]:
        return [
            i for i, lab in enumerate(self.labels) if lab == label and (side == "any" or self.boundary_side[i] == side)
        ]

    def crossing(self, e: int) -> int:
        """1 if edge ``e`` wraps between column ``Lx-1`` and column ``0``."""
        (x1, _), (x2, _) = self.coords(self.edges[e][0]), self.coords(self.edges[e][1])
        return int(abs(x1 - x2) > 1)

    def cut(self, x0: int = 0) -> set[int]:
        """Horizontal edges between columns ``x0`` and ``x0+1``: a transversal line."""
        out = set()
        for i, (a, b) in enumerate(self.edges):
            (xa, ya), (xb, yb) = self.coords(a), self.coords(b)
            if ya == yb and {xa, xb} == {x0 % self.Lx, (x0 + 1) % self.Lx}:
                out.add(i)
        return out


def build_annulus(Lx: int, H: int) -> Annulus:
    if Lx % 2 or Lx < 4:
        raise ValueError("Lx must be even and at least 4")
    if H < 4:
        raise ValueError("H must be at least 4")
    ann = Annulus(Lx, H)
    edges, sides = [], []
    for y in range(H - 1):
        for x in range(Lx):
            edges.append((ann.vid(x, y), ann.vid(x, y + 1)))
            sides.append(None)
    for y in range(H):
        for x in range(Lx):
            if (x + y) % 2 == 0:
                edges.append((ann.vid(x, y), ann.vid(x + 1, y)))
                sides.append(None)
            elif y == 0 or y == H - 1:
                edges.append((ann.vid(x, y), ann.vid(x + 1, y)))
                sides.append("bottom" if y == 0 else "top")
    ann.edges = edges
    ann.boundary_side = sides
    ann._index = {frozenset(e): i for i, e in enumerate(edges)}
    inc: list[list[int]] = [[] for _ in range(ann.n)]
    for i, (a, b) in enumerate(edges):
        inc[a].append(i)
        inc[b].append(i)
    ann._inc = inc
    if any(len(v) != 3 for v in inc):
        raise ValueError("annulus is not trivalent")
    # labels from face colours; boundary edges take the label missing at their endpoints
    labels = [-1] * len(edges)
    for i, (a, b) in enumerate(edges):
        if sides[i] is not None:
            continue
        (xa, ya), (xb, yb) = ann.coords(a), ann.coords(b)
        if xa == xb:  # vertical edge between rows y and y+1
            y = min(ya, yb)
            left = next(y0 for y0 in (y - 1, y) if (xa - 1 + y0) % 2 == 0)
            right = next(y0 for y0 in (y - 1, y) if (xa + y0) % 2 == 0)
            c1, c2 = left % 3, right % 3
        else:  # horizontal edge on row y between faces H(x, y) and H(x, y-2)
            c1, c2 = ya % 3, (ya - 2) % 3
        labels[i] = (-c1 - c2) % 3
    for i in range(len(edges)):
        if sides[i] is None:
            continue
        a, b = edges[i]
        miss = [({0, 1, 2} - {labels[e] for e in inc[v] if e != i}) for v in (a, b)]
        if len(miss[0]) != 1 or miss[0] != miss[1]:
            raise ValueError(f"annulus ({Lx},{H}) admits no consistent edge labels")
        labels[i] = miss[0].pop()
    ann.labels = labels
    for lab in range(3):
        seen = [v for e in ann.edges_with_label(lab) for v in edges[e]]
        if sorted(seen) != list(range(ann.n)):
            raise ValueError(f"label {lab} edges are not a perfect matching")
    return ann


# ---------------------------------------------------------------------------
# dimers


@dataclass
class DimerConfig:
    partner: list[int]
    paths: dict[frozenset, frozenset]  # dimer -> Z2 chain of edges

    def copy(self) -> "DimerConfig":
        return DimerConfig(list(self.partner), dict(self.paths))

    def dimers(self) -> list[tuple[int, int]]:
        return sorted({tuple(sorted(d)) for d in self.paths})

    def path_sum(self) -> frozenset:
        acc: set[int] = set()
        for p in self.paths.values():
            acc ^= p
        return frozenset(acc)

    def is_valid(self, ann: Annulus) -> bool:
        for d, path in self.paths.items():
            odd: set[int] = set()
            for e in path:
                odd ^= set(ann.edges[e])
            if odd != set(d):
                return False
        return all(self.partner[self.partner[v]] == v != self.partner[v] for v in range(len(self.partner)))


def dimers_from_label(ann: Annulus, label: int) -> DimerConfig:
    """Nearest-neighbour dimers on the label edges, each with its edge as path."""
    partner = [-1] * ann.n
    paths = {}
    for e in ann.edges_with_label(label):
        a, b = ann.edges[e]
        partner[a], partner[b] = b, a
        paths[frozenset((a, b))] = frozenset({e})
    return DimerConfig(partner, paths)


def dimer_measure(cfg: DimerConfig, ann: Annulus, edge: int, path: frozenset | None = None) -> DimerConfig:
    """Measure the check on ``edge = (k, l)``.

    Dimers ``{i, k}`` and ``{j, l}`` become ``{i, j}`` with path
    ``P_ik + P_jl + P_kl`` and ``{k, l}`` with path ``P_kl`` (the edge unless
    given).  If ``{k, l}`` is already a dimer nothing changes.
    """
    return measure_and_reveal(cfg, ann, edge, path)[0]


def measure_and_reveal(cfg: DimerConfig, ann: Annulus, edge: int, path=None, reset: bool = False):
    """Like :func:`dimer_measure`, also returning the loop the measurement reveals.

    When ``{k, l}`` is already a dimer the outcome is fixed by the ISG up to the
    gauge-field loop ``P_d + P_kl``; that loop is returned (empty otherwise).
    With ``reset=True`` the dimer's path is then replaced by ``P_kl``.
    """
    k, l = ann.edges[edge]
    p_kl = frozenset({edge}) if path is None else frozenset(path)
    if cfg.partner[k] == l:
        loop = cfg.paths[frozenset((k, l))] ^ p_kl
        if reset and loop:
            cfg = cfg.copy()
            cfg.paths[frozenset((k, l))] = p_kl
        return cfg, loop
    i, j = cfg.partner[k], cfg.partner[l]
    out = cfg.copy()
    p_ik = out.paths.pop(frozenset((i, k)))
    p_jl = out.paths.pop(frozenset((j, l)))
    out.paths[frozenset((i, j))] = p_ik ^ p_jl ^ p_kl
    out.paths[frozenset((k, l))] = p_kl
    out.partner[i], out.partner[j] = j, i
    out.partner[k], out.partner[l] = l, k
    return out, frozenset()


def winding(cfg: DimerConfig, cut: set[int]) -> int:
    """Z2 intersection of the summed dimer paths with a transversal cut."""
    return len(cfg.path_sum() & cut) % 2


def signed_winding(cfg: DimerConfig, ann: Annulus, x0: int = 0) -> int:
    """Integer refinement: each path crossing the cut counted with the A-to-B orientation.

    Sublattice A holds the vertices with ``x + y`` even.  A crossing of the cut
    between columns ``x0`` and ``x0+1`` counts +1 when the path, walked from
    its A endpoint to its B endpoint, moves in the +x direction.
    """
    cut = ann.cut(x0)
    total = 0
    for d, path in cfg.paths.items():
        a, b = sorted(d, key=lambda v: sum(ann.coords(v)) % 2)
        walk = _walk(ann, path, a, b)
        for u, v, e in walk:
            if e in cut:
                xu = ann.coords(u)[0]
                total += 1 if xu == x0 % ann.Lx else -1
    return total


def _walk(ann: Annulus, path: frozenset, a: int, b: int):
    """Steps ``(u, v, edge)`` along the simple path from ``a`` to ``b`` inside ``path``; loops are ignored."""
    adj: dict[int, list[tuple[int, int]]] = {}
    for e in path:
        u, v = ann.edges[e]
        adj.setdefault(u, []).append((v, e))
        adj.setdefault(v, []).append((u, e))
    prev = {a: None}
    q = deque([a])
    while q:
        u = q.popleft()
        for v, e in adj.get(u, []):
            if v not in prev:
                prev[v] = (u, e)
                q.append(v)
    steps = []
    v = b
    while prev.get(v):
        u, e = prev[v]
        steps.append((u, v, e))
        v = u
    return steps[::-1]


def shortest_path(ann: Annulus, a: int, b: int) -> frozenset:
    """Edges of a BFS shortest path (lowest-index neighbours first)."""
    prev = {a: None}
    q = deque([a])
    while q and b not in prev:
        u = q.popleft()
        for e in sorted(ann.incident[u]):
            v = ann.edges[e][0] if ann.edges[e][1] == u else ann.edges[e][1]
            if v not in prev:
                prev[v] = (u, e)
                q.append(v)
    out, v = set(), b
    while prev[v]:
        u, e = prev[v]
        out.add(e)
        v = u
    return frozenset(out)


@dataclass
class DimerCycle:
    dimer: tuple[int, int]
    edges: frozenset  # path + reference path: a Z2 cycle
    winding: int
    mean_y: float


def dimer_cycles(cfg: DimerConfig, ann: Annulus, cut: set[int], reference: DimerConfig | None = None) -> list[DimerCycle]:
    """Per-dimer cycles ``P_d + R_d`` against reference paths, with their windings.

    ``R_d`` is the dimer's path in ``reference`` when it has that dimer, else a
    BFS shortest path.  The sum of all windings equals the change of the
    total winding, so the per-dimer split localises where paths wound around.
    """
    out = []
    for d, path in cfg.paths.items():
        a, b = sorted(d)
        ref = reference.paths.get(d) if reference is not None else None
        if ref is None:
            ref = shortest_path(ann, a, b)
        cyc = path ^ ref
        ys = [ann.coords(a)[1], ann.coords(b)[1]]
        out.append(DimerCycle((a, b), cyc, len(cyc & cut) % 2, float(np.mean(ys))))
    return out


# ---------------------------------------------------------------------------
# the obstruction


def top_region(ann: Annulus, depth: int = 2) -> set[int]:
    """Edges with both endpoints in the top ``depth + 1`` rows."""
    return {e for e, (u, v) in enumerate(ann.edges) if min(ann.coords(u)[1], ann.coords(v)[1]) >= ann.H - 1 - depth}


@dataclass
class Reveal:
    edge: int
    loop: frozenset
    winding: int


def run_period(ann: Annulus, cfg: DimerConfig, top_sequence=None, depth: int = 2, cut_x: int = 0, trace=None):
    """One bulk period: measure labels 1, 2, 0 (paths reset on revealing measurements).

    With ``top_sequence`` (edge indices) the top region skips the bulk rounds
    and instead runs that sequence followed by every label-0 edge, which
    restores the nearest-neighbour label-0 pairing.  Returns the final
    configuration and the list of revealed loops.
    """
    cut = ann.cut(cut_x)
    skip = top_region(ann, depth) if top_sequence is not None else set()
    steps = [(lab, e) for lab in (1, 2, 0) for e in ann.edges_with_label(lab) if e not in skip]
    if top_sequence is not None:
        steps += [("top", e) for e in top_sequence] + [("close", e) for e in ann.edges_with_label(0)]
    reveals = []
    for tag, e in steps:
        cfg, loop = measure_and_reveal(cfg, ann, e, reset=True)
        if loop:
            reveals.append(Reveal(e, loop, len(loop & cut) % 2))
        if trace is not None:
            trace.append((tag, e, cfg, loop))
    return cfg, reveals


@dataclass
class ObstructionReport:
    bottom_parity: int
    top_parity: int
    bulk_parity: int
    total_winding_change: int
    pairing_restored: bool
    periods: int = 1

    @property
    def forced(self) -> bool:
        """The conservation law: revealed windings cancel between the two boundaries."""
        return (self.bottom_parity + self.top_parity + self.bulk_parity + self.total_winding_change) % 2 == 0


def obstruction_demo(ann: Annulus, top_sequence=None, cut_x: int = 0, periods: int = 1, depth: int = 2) -> ObstructionReport:
    """Run bulk periods from nearest-neighbour label-0 dimers and split revealed windings by region.

    Reveals on edges whose mean row is below ``H / 2`` count for the bottom
    boundary, the rest for the top; loops revealed inside the middle band
    (more than ``depth`` rows from either boundary) are also tallied as bulk.
    """
    cut = ann.cut(cut_x)
    start = dimers_from_label(ann, 0)
    cfg, reveals = start, []
    for _ in range(periods):
        cfg, rv = run_period(ann, cfg, top_sequence, depth, cut_x)
        reveals += rv
    half = (ann.H - 1) / 2
    bottom = top = bulk = 0
    for r in reveals:
        y = np.mean([ann.coords(v)[1] for v in ann.edges[r.edge]])
        if depth < y < ann.H - 1 - depth:
            bulk ^= r.winding
        elif y < half:
            bottom ^= r.winding
        else:
            top ^= r.winding
    change = (winding(cfg, cut) + winding(start, cut)) % 2
    return ObstructionReport(bottom, top, bulk, change, cfg.dimers() == start.dimers(), periods)


def random_top_sequence(ann: Annulus, rng: np.random.Generator, depth: int = 2, length: int = 40) -> list[int]:
    """Random pairwise checks on edges within ``depth`` rows of the top boundary."""
    near = sorted(top_region(ann, depth))
    return [near[int(i)] for i in rng.integers(0, len(near), size=length)]


# ---------------------------------------------------------------------------
# small graphs and traces


@dataclass
class CycleGraph:
    """A single plaquette: sites ``0 .. n-1`` joined in a ring."""

    n: int

    @property
    def edges(self) -> list[tuple[int, int]]:
        return [(i, (i + 1) % self.n) for i in range(self.n)]

    def edge_index(self, a: int, b: int) -> int:
        return next(i for i, e in enumerate(self.edges) if set(e) == {a, b})


def hexagon_example() -> list[list[tuple[int, int]]]:
    """Pairings (1-based sites) while measuring edges (2,3) then (4,5) from {1,2},{3,4},{5,6}."""
    g = CycleGraph(6)
    partner = [1, 0, 3, 2, 5, 4]
    cfg = DimerConfig(partner, {frozenset((2 * i, 2 * i + 1)): frozenset({g.edge_index(2 * i, 2 * i + 1)}) for i in range(3)})
    out = [[(a + 1, b + 1) for a, b in cfg.dimers()]]
    for a, b in ((1, 2), (3, 4)):
        cfg = dimer_measure(cfg, g, g.edge_index(a, b))
        out.append([(u + 1, v + 1) for u, v in cfg.dimers()])
    return out


def dimer_trace(ann: Annulus, top_sequence=None, periods: int = 1, cut_x: int = 0, depth: int = 2):
    """Yield one JSON-ready record per measurement of the obstruction run."""
    cut = ann.cut(cut_x)
    cfg = dimers_from_label(ann, 0)
    step = 0
    for period in range(periods):
        trace: list = []
        cfg, _ = run_period(ann, cfg, top_sequence, depth, cut_x, trace=trace)
        for tag, e, c, loop in trace:
            yield {
                "step": step,
                "period": period,
                "round": tag,
                "edge": list(ann.edges[e]),
                "dimers": [list(d) for d in c.dimers()],
                "winding": winding(c, cut),
                "revealed_winding": len(loop & cut) % 2 if loop else None,
            }
            step += 1
