"""Detection events, the decoding graph and exact minimum-weight perfect matching."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

import networkx as nx
import numpy as np
from scipy import sparse
from scipy.sparse.csgraph import dijkstra

from .circuit import MeasurementCircuit

SQ3_2 = math.sqrt(3) / 2


# ---------------------------------------------------------------------------
# spacetime geometry


@dataclass(frozen=True)
class SyndromeLattice:
    """Spacetime embedding of syndrome sites ``(plaquette, round)``.

    Plaquette ``(i, j)`` sits at ``i * (0, 1) + j * (sqrt3/2, 1/2)`` so that
    nearest plaquettes are at distance 1 and moving by ``(0, 1)`` raises the
    label by one; the third coordinate is the round.
    """

    L1: int
    L2: int

    @staticmethod
    def vec(name: str) -> np.ndarray:
        return _BASIS[name].copy()

    def position(self, cell: tuple[int, int], r: int) -> np.ndarray:
        i, j = cell
        return np.array([j * SQ3_2, i + j / 2.0, float(r)])

    def displacement(self, a: tuple[tuple[int, int], int], b: tuple[tuple[int, int], int]) -> np.ndarray:
        """Minimum-image displacement from site ``a`` to site ``b`` (cell, round)."""
        (i1, j1), r1 = a
        (i2, j2), r2 = b
        di = (i2 - i1 + self.L1 // 2) % self.L1 - self.L1 // 2
        dj = (j2 - j1 + self.L2 // 2) % self.L2 - self.L2 // 2
        return np.array([dj * SQ3_2, di + dj / 2.0, float(r2 - r1)])

    @staticmethod
    def sublattice(r: int) -> int:
        """0 for the even copy of the decoding graph, 1 for the odd copy."""
        return r % 2


def _unit(angle_frac: Fraction) -> tuple[float, float]:
    a = math.pi * float(angle_frac)
    return (math.cos(a), math.sin(a))


_BASIS = {
    "t1": np.array([2 * SQ3_2, 0.0, 0.0]),
    "t2": np.array([SQ3_2, 1.5, 0.0]),
    "t3": np.array([0.0, 1.0, 1.0]),
    "s1": np.array([*_unit(Fraction(1, 2)), 1.0]),
    "s2": np.array([*_unit(Fraction(1, 2) + Fraction(2, 3)), 1.0]),
    "s3": np.array([*_unit(Fraction(1, 2) - Fraction(2, 3)), 1.0]),
}


def bulk_displacements() -> list[np.ndarray]:
    """The three pairwise sums ``s1+s2``, ``s2+s3``, ``s3+s1``."""
    s = [_BASIS[k] for k in ("s1", "s2", "s3")]
    return [s[0] + s[1], s[1] + s[2], s[2] + s[0]]


def in_displacement_set(d: np.ndarray, tol: float = 1e-9) -> bool:
    """True if ``d`` or ``-d`` is one of the bulk displacements."""
    return any(np.allclose(d, v, atol=tol) or np.allclose(-d, v, atol=tol) for v in bulk_displacements())


# ---------------------------------------------------------------------------
# syndrome extraction


@dataclass
class SyndromeRecord:
    bits: dict[int, list[tuple[int, int]]]  # plaquette -> [(round, bit)]
    events: list[int]  # indices of detectors that fired
    sites: list[tuple]


def extract_syndrome(circ: MeasurementCircuit, outcome_bits: np.ndarray, virtual_bits=None) -> SyndromeRecord:
    """Plaquette bit streams and detection events from one shot's outcome record."""
    bits: dict[int, list[tuple[int, int]]] = {}
    for p, seq in circ.meta.get("inferences", {}).items():
        bits[p] = [(inf.round, int(np.bitwise_xor.reduce(outcome_bits[list(inf.outcomes)]))) for inf in seq]
    det, _ = circ.evaluate(outcome_bits, virtual_bits)
    ev = np.flatnonzero(det[0]).tolist()
    return SyndromeRecord(bits, ev, [circ.detectors[i].site for i in ev])


# ---------------------------------------------------------------------------
# decoding graph


@dataclass
class DecodingGraph:
    num_detectors: int
    edges: dict[tuple[int, int], dict]  # (a, b) with a < b; b == boundary for boundary edges
    num_observables: int
    fault_edge: list[tuple[int, int] | None] = field(default_factory=list)
    conflicts: int = 0  # parallel faults with different observable masks
    decomposed: dict[int, list[tuple[int, int]]] = field(default_factory=dict)  # hyperedge faults

    @property
    def boundary(self) -> int:
        return self.num_detectors

    def neighbours(self, a: int) -> list[int]:
        return self._adj.get(a, [])

    def finalize(self) -> "DecodingGraph":
        adj: dict[int, list[int]] = {}
        for a, b in self.edges:
            adj.setdefault(a, []).append(b)
            adj.setdefault(b, []).append(a)
        self._adj = adj
        return self

    def edge_list(self) -> str:
        """Plain text: ``a b weight obs_mask`` per line, boundary written as ``B``."""
        lines = []
        for (a, b), d in sorted(self.edges.items()):
            bb = "B" if b == self.boundary else str(b)
            lines.append(f"{a} {bb} {d['weight']:.6g} {d['obs']}")
        return "\n".join(lines) + "\n"


def _mask(row) -> int:
    return sum(int(v) << k for k, v in enumerate(row))


def build_decoding_graph(
    det_sig: np.ndarray, obs_sig: np.ndarray, probs=None, weights: str = "unit", strict: bool = True
) -> DecodingGraph:
    """Graph whose edges are the single faults, from their detector signatures.

    Faults with one event connect to the single virtual boundary node; faults
    with no event are dropped (they must not flip an observable).  Faults with
    more than two events must split into existing edges; with ``strict`` the
    split must also reproduce the fault's observable mask.
    """
    nd = det_sig.shape[1]
    g = DecodingGraph(nd, {}, obs_sig.shape[1])
    hyper: list[int] = []
    for f, row in enumerate(det_sig):
        hit = np.flatnonzero(row)
        om = _mask(obs_sig[f])
        if len(hit) == 0:
            if om:
                raise ValueError(f"fault {f} flips an observable without any detection event")
            g.fault_edge.append(None)
            continue
        if len(hit) > 2:
            hyper.append(f)
            g.fault_edge.append(None)
            continue
        key = (int(hit[0]), int(hit[1])) if len(hit) == 2 else (int(hit[0]), nd)
        p = None if probs is None else float(probs[f])
        if key in g.edges:
            d = g.edges[key]
            if d["obs"] != om:
                g.conflicts += 1
            if p is not None:
                d["p"] = d["p"] * (1 - p) + p * (1 - d["p"])
            d["faults"].append(f)
        else:
            g.edges[key] = {"obs": om, "p": p, "faults": [f]}
        g.fault_edge.append(key)
    for f in hyper:
        parts = _decompose(g, [int(h) for h in np.flatnonzero(det_sig[f])], _mask(obs_sig[f]) if strict else None)
        if parts is None:
            raise ValueError(f"fault {f} fires {int(det_sig[f].sum())} detectors and is not a sum of graph edges")
        g.decomposed[f] = parts
    for d in g.edges.values():
        if weights == "unit" or d["p"] is None:
            d["weight"] = 1.0
        elif weights == "log":
            p = min(max(d["p"], 1e-12), 0.5 - 1e-12)
            d["weight"] = math.log((1 - p) / p)
        else:
            raise ValueError(f"unknown weighting {weights!r}")
    return g.finalize()


def _decompose(g: DecodingGraph, events: list[int], obs: int):
    """Split an event set into existing edges whose observable masks XOR to ``obs``."""
    if not events:
        return [] if not obs else None
    a, rest = events[0], events[1:]
    options = [(a, g.boundary, rest)] + [(a, b, rest[:k] + rest[k + 1 :]) for k, b in enumerate(rest)]
    for x, y, tail in options:
        d = g.edges.get((x, y))
        if d is None:
            continue
        sub = _decompose(g, tail, None if obs is None else obs ^ d["obs"])
        if sub is not None:
            return [(x, y)] + sub
    return None


# ---------------------------------------------------------------------------
# matching


class Matcher:
    """Exact MWPM over the shortest-path metric of a decoding graph."""

    def __init__(self, graph: DecodingGraph):
        self.graph = graph
        N = graph.num_detectors + 1
        rows, cols, w = [], [], []
        for (a, b), d in graph.edges.items():
            rows += [a, b]
            cols += [b, a]
            w += [d["weight"], d["weight"]]
        mat = sparse.csr_matrix((w, (rows, cols)), shape=(N, N))
        self.dist, pred = dijkstra(mat, directed=False, return_predecessors=True)
        # observable parity along each shortest-path tree
        par = np.zeros((N, N), dtype=np.int64)
        for s in range(N):
            order = np.argsort(self.dist[s], kind="stable")
            for v in order:
                u = pred[s, v]
                if u >= 0:
                    a, b = (u, v) if u < v else (v, u)
                    par[s, v] = par[s, u] ^ graph.edges[(a, b)]["obs"]
        self.parity = par

    def match(self, events) -> list[tuple[int, int]]:
        """Pairs ``(a, b)`` of detectors, ``b == boundary`` for boundary matches."""
        events = sorted(int(e) for e in events)
        B = self.graph.boundary
        D = self.dist
        if not events:
            return []
        # events closer to each other than to the boundary via both can interact
        comp = nx.Graph()
        comp.add_nodes_from(events)
        for a, b in itertools.combinations(events, 2):
            if D[a, b] < D[a, B] + D[b, B] and np.isfinite(D[a, b]):
                comp.add_edge(a, b)
        pairs = []
        for cc in sorted((sorted(c) for c in nx.connected_components(comp)), key=lambda c: c[0]):
            pairs.extend(self._match_component(cc))
        return sorted(pairs)

    def _match_component(self, ev: list[int]) -> list[tuple[int, int]]:
        B = self.graph.boundary
        D = self.dist
        if len(ev) == 1:
            if not np.isfinite(D[ev[0], B]):
                raise ValueError("odd parity without a reachable boundary")
            return [(ev[0], B)]
        G = nx.Graph()
        big = 1.0 + sum(float(D[a, B]) if np.isfinite(D[a, B]) else 0.0 for a in ev) + sum(
            float(D[a, b]) for a, b in itertools.combinations(ev, 2) if np.isfinite(D[a, b])
        )
        for a, b in itertools.combinations(ev, 2):
            if np.isfinite(D[a, b]):
                G.add_edge(("e", a), ("e", b), weight=big - D[a, b])
        for a in ev:
            if np.isfinite(D[a, B]):
                G.add_edge(("e", a), ("b", a), weight=big - D[a, B])
        for a, b in itertools.combinations(ev, 2):
            if np.isfinite(D[a, B]) and np.isfinite(D[b, B]):
                G.add_edge(("b", a), ("b", b), weight=big)
        M = nx.max_weight_matching(G, maxcardinality=True)
        out = []
        for u, v in M:
            if u[0] == "b" and v[0] == "b":
                continue
            if u[0] == "b":
                u, v = v, u
            out.append((u[1], B) if v[0] == "b" else tuple(sorted((u[1], v[1]))))
        matched = {x for p in out for x in p if x != B}
        if matched != set(ev):
            raise ValueError("no perfect matching exists for these events")
        return out

    def weight(self, pairs) -> float:
        return float(sum(self.dist[a, b] for a, b in pairs))

    def correction(self, pairs) -> int:
        """Observable mask flipped by the correction chain of a matching."""
        m = 0
        for a, b in pairs:
            m ^= int(self.parity[a, b])
        return m

    def decode(self, events) -> int:
        return self.correction(self.match(events))


def brute_force_match(dist: np.ndarray, events, boundary: int) -> float:
    """Minimum total weight over all pairings (each event may also go to the boundary)."""
    events = sorted(events)

    def best(rest: tuple) -> float:
        if not rest:
            return 0.0
        a, tail = rest[0], rest[1:]
        out = dist[a, boundary] + best(tail)
        for k, b in enumerate(tail):
            out = min(out, dist[a, b] + best(tail[:k] + tail[k + 1 :]))
        return out

    return best(tuple(events))


def classify_residual(error_mask: int, correction_mask: int, names=None):
    """Logical verdict of error + correction: the observables the residual flips."""
    res = error_mask ^ correction_mask
    names = names or [f"obs{k}" for k in range(max(res.bit_length(), 1))]
    flipped = [names[k] for k in range(len(names)) if (res >> k) & 1]
    return {"trivial": res == 0, "flipped": flipped, "mask": res}


def residual_chain_mask(graph: DecodingGraph, chain) -> int:
    """Observable mask of a 1-chain of graph edges; raises unless it is a cycle mod boundary."""
    deg: dict[int, int] = {}
    m = 0
    for a, b in chain:
        key = (min(a, b), max(a, b))
        if key not in graph.edges:
            raise ValueError(f"{key} is not an edge of the decoding graph")
        m ^= graph.edges[key]["obs"]
        for x in key:
            deg[x] = deg.get(x, 0) ^ 1
    if any(v for x, v in deg.items() if x != graph.boundary):
        raise ValueError("chain is not closed")
    return m
