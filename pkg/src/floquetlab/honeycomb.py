"""The honeycomb code: schedule, ISG structure, logical operators and their dynamics."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numpy as np

from . import gf2
from .lattice import HoneycombTorus, _NEIGHBOURS, nontrivial_cycles
from .pauli import PauliOperator, cnot_images, commutes, conjugate, cy_images, multiply
from .stabilizer import StabilizerGroup

# ---------------------------------------------------------------------------
# schedule


def round_label(r: int) -> int:
    return r % 3


def round_edges(lat: HoneycombTorus, r: int, schedule: str = "label") -> list[int]:
    """Edges measured in round ``r``.

    ``schedule="label"`` is the honeycomb code.  ``schedule="letter"`` measures
    all x, then all y, then all z edges; it serves as a negative control.
    """
    if schedule == "label":
        return lat.label_edges[r % 3]
    if schedule == "letter":
        letter = "xyz"[r % 3]
        return [e.index for e in lat.edges if e.letter == letter]
    raise ValueError(f"unknown schedule {schedule!r}")


@dataclass
class ScheduleRun:
    groups: list[StabilizerGroup]  # ISG after each round
    outcomes: list[dict[int, int]]  # round -> {edge: +-1}


def run_schedule(lat: HoneycombTorus, rounds: int, rng: np.random.Generator, schedule: str = "label") -> ScheduleRun:
    """Measure ``rounds`` rounds starting from the maximally mixed state."""
    if rounds < 0:
        raise ValueError("rounds must be non-negative")
    g = StabilizerGroup(lat.n_qubits)
    groups, outcomes = [], []
    for r in range(rounds):
        rec = {}
        for e in round_edges(lat, r, schedule):
            rec[e] = g.measure(lat.checks[e], rng).value
        outcomes.append(rec)
        groups.append(g.copy())
    return ScheduleRun(groups, outcomes)


def span_group(n: int, ops) -> StabilizerGroup:
    """Group generated by commuting ``ops`` (signs dropped, dependent ops skipped)."""
    ech = gf2.Echelon()
    keep = []
    for p in ops:
        if ech.add(p.symplectic(), 0):
            keep.append(p.unsigned())
    g = StabilizerGroup(n)
    g.generators = keep
    return g


def expected_isg(lat: HoneycombTorus, r: int) -> StabilizerGroup:
    """Unsigned ISG after round ``r`` of the honeycomb schedule from a mixed start.

    Round-``r`` checks plus the plaquettes inferred so far: the plaquettes of
    label ``k + 1`` become known after round ``k`` for ``k >= 1``.
    """
    ops = [lat.checks[e] for e in lat.label_edges[r % 3]]
    labels = {(k + 1) % 3 for k in range(1, min(r, 3) + 1)}
    ops += [lat.plaquette_operator(p.index) for p in lat.plaquettes if p.label in labels]
    return span_group(lat.n_qubits, ops)


def subsystem_counts(lat) -> tuple[int, int, int, int]:
    """(gauge rank, stabilizer rank, gauge qubits, logical qubits) of the check group."""
    checks = lat.checks
    gauge_rank = gf2.rank([c.symplectic() for c in checks])
    # commutation matrix rows; a combination is central iff its pattern vanishes
    comm = [sum(commutes(a, b) << j for j, b in enumerate(checks)) for a in checks]
    central = gf2.nullspace(comm)
    vecs = [c.symplectic() for c in checks]
    central_ops = []
    for mask in central:
        v = 0
        for i in gf2.bits(mask):
            v ^= vecs[i]
        central_ops.append(v)
    stab_rank = gf2.rank(central_ops)
    gauge_qubits = (gauge_rank - stab_rank) // 2
    logical = lat.n_qubits - gauge_qubits - stab_rank
    return gauge_rank, stab_rank, gauge_qubits, logical


def inner_logicals(lat: HoneycombTorus) -> list[PauliOperator]:
    return [lat.chain_operator(c) for c in nontrivial_cycles(lat)]


def no_long_loops(isg: StabilizerGroup, lat: HoneycombTorus) -> int:
    """1 iff no homologically nontrivial check-product loop lies in ``isg`` (any sign)."""
    a, b = inner_logicals(lat)
    return int(not any(isg.contains_up_to_sign(q) for q in (a, b, a * b)))


# ---------------------------------------------------------------------------
# disentangling onto the superlattice toric code


@dataclass
class Disentangled:
    group: StabilizerGroup  # conjugated ISG
    fixed: dict[int, PauliOperator]  # edge -> single-qubit image of its check
    effective: dict[int, int]  # edge -> qubit that carries the toric-code qubit
    reduced: list[PauliOperator]  # generators of the conjugated ISG with fixed qubits stripped
    weights: list[int]


def disentangling_images(lat: HoneycombTorus, r: int) -> list[dict]:
    """One two-qubit gate per round-``r`` edge: CNOT for x/z edges, controlled-Y for y edges."""
    out = []
    n = lat.n_qubits
    for e in lat.label_edges[r % 3]:
        edge = lat.edges[e]
        c, t = sorted((edge.u, edge.v))
        out.append(cy_images(n, c, t) if edge.letter == "y" else cnot_images(n, c, t))
    return out


def disentangle(isg: StabilizerGroup, lat: HoneycombTorus, r: int) -> Disentangled:
    if r < 3:
        raise ValueError("the ISG has its toric-code form only from round 3 on")
    g = isg
    for images in disentangling_images(lat, r):
        g = g.conjugate(images)
    fixed, effective = {}, {}
    for e in lat.label_edges[r % 3]:
        img = conjugate_all(lat.checks[e], lat, r)
        if img.weight() != 1:
            raise RuntimeError("check image is not single-qubit")
        fixed[e] = img
        q = img.qubits()[0]
        edge = lat.edges[e]
        effective[e] = edge.v if q == edge.u else edge.u
    reduced = [_strip(conjugate_all(op, lat, r), fixed) for op in isg_generators(lat, r)]
    weights = sorted({op.weight() for op in reduced})
    return Disentangled(g, fixed, effective, reduced, weights)


def _strip(op: PauliOperator, fixed: dict[int, PauliOperator]) -> PauliOperator:
    """Remove factors on fixed qubits using the single-qubit check images."""
    for img in fixed.values():
        q = img.qubits()[0]
        if op.letter(q) != "I" and not op.unsigned() == img.unsigned():
            op = multiply(op, img)
            if op.letter(q) != "I":
                raise RuntimeError("generator acts on a fixed qubit with a foreign letter")
    return op


def conjugate_all(p: PauliOperator, lat: HoneycombTorus, r: int) -> PauliOperator:
    for images in disentangling_images(lat, r):
        p = conjugate(p, images)
    return p


def superlattice_toric_code(lat: HoneycombTorus, r: int, dis: Disentangled) -> StabilizerGroup:
    """Toric code on the label-``r`` superlattice built from geometry alone.

    Superlattice sites are the label-``r`` plaquettes; its edges are the
    label-``r`` lattice edges.  Site terms act on the six edges leaving a
    label-``r`` plaquette, face terms on the three label-``r`` edges on the
    boundary of each other plaquette.  The single-qubit letter used on each
    edge qubit is taken from the per-qubit local frame of the disentangled
    group (``site_letter`` / ``face_letter``), which must be consistent.
    """
    a = r % 3
    n = lat.n_qubits
    site_terms, face_terms = [], []
    for p in lat.plaquettes:
        if p.label == a:
            edges = sorted({e for v in p.vertices for e in lat.incident[v] if lat.edges[e].label == a})
            site_terms.append((p.index, edges))
        else:
            face_terms.append((p.index, [e for e in p.edges if lat.edges[e].label == a]))
    site_letter, face_letter = _frame_letters(lat, dis, site_terms, face_terms)
    ops = list(dis.fixed.values())
    for _, edges in site_terms:
        ops.append(PauliOperator.on(n, {dis.effective[e]: site_letter[e] for e in edges}))
    for _, edges in face_terms:
        ops.append(PauliOperator.on(n, {dis.effective[e]: face_letter[e] for e in edges}))
    return span_group(n, ops)


def _frame_letters(lat, dis, site_terms, face_terms):
    """Read the letter of each effective qubit in weight-6 and weight-3 reduced terms."""
    site_letter: dict[int, str] = {}
    face_letter: dict[int, str] = {}
    by_qubit = {q: e for e, q in dis.effective.items()}
    for op in dis.reduced:
        w = op.weight()
        if w == 1 and any(op.unsigned() == f.unsigned() for f in dis.fixed.values()):
            continue
        table = site_letter if w == 6 else face_letter if w == 3 else None
        if table is None:
            continue
        for q in op.qubits():
            e = by_qubit[q]
            c = op.letter(q)
            if table.setdefault(e, c) != c:
                raise RuntimeError(f"inconsistent letters on edge {e}")
    for e in dis.effective:
        if e in site_letter and e in face_letter and site_letter[e] == face_letter[e]:
            raise RuntimeError("site and face letters coincide")
    return site_letter, face_letter


# ---------------------------------------------------------------------------
# logical operators


def letters_at(lat: HoneycombTorus, label: int) -> list[str]:
    return [lat.qubit_letter(q, label).upper() for q in range(lat.n_qubits)]


def dual_path(lat: HoneycombTorus, label: int, start: int, target: tuple[int, int] | None = None, goal: int | None = None):
    """Shortest walk on the superlattice whose edges are the label-``label`` edges.

    Nodes are the plaquettes of the two other labels.  With ``target`` the
    walk closes at ``start`` with that Z2 winding; with ``goal`` it is an open
    path to plaquette ``goal``.  Returns the list of crossed edges.
    """
    if lat.plaquettes[start].label == label:
        raise ValueError("start plaquette must not carry the superlattice label")
    s0 = (start, 0, 0)
    prev = {s0: (s0, -1)}
    queue = deque([s0])
    want = (start,) + tuple(target) if target is not None else None
    while queue:
        state = queue.popleft()
        p, w1, w2 = state
        if (want is not None and state == want) or (goal is not None and p == goal and want is None):
            break
        i, j = lat.plaquettes[p].cell
        for di, dj in _NEIGHBOURS:
            ii, jj = i + di, j + dj
            q = lat.plaquette_at(ii, jj)
            e = lat.edge_between(p, q)
            if lat.edges[e].label != label:
                continue
            nxt = (q, w1 ^ ((ii // lat.L1) & 1), w2 ^ ((jj // lat.L2) & 1))
            if nxt not in prev:
                prev[nxt] = (state, e)
                queue.append(nxt)
    else:
        raise ValueError("no such dual path")
    path, s = [], state
    while s != s0:
        s, e = prev[s]
        path.append(e)
    return path[::-1]


def electric_operator(lat: HoneycombTorus, label: int, edges) -> PauliOperator:
    """Product over the given label-``label`` edges of the check letter on the lower endpoint."""
    n = lat.n_qubits
    out = PauliOperator(n)
    for e in edges:
        edge = lat.edges[e]
        if edge.label != label:
            raise ValueError("edge label mismatch")
        q = min(edge.u, edge.v)
        out = out * PauliOperator.single(n, q, edge.letter.upper())
    return out


def magnetic_operator(lat: HoneycombTorus, label: int, edges) -> PauliOperator:
    """Product over label-``label`` edges of the next-label letters on both endpoints.

    On an edge ``(u, v)`` this is how a neighbouring plaquette of label
    ``label + 1`` acts; it commutes with the edge's check.
    """
    n = lat.n_qubits
    b = (label + 1) % 3
    out = PauliOperator(n)
    for e in edges:
        edge = lat.edges[e]
        out = out * PauliOperator.on(n, {edge.u: lat.qubit_letter(edge.u, b), edge.v: lat.qubit_letter(edge.v, b)})
    return out


def isg_generators(lat: HoneycombTorus, r: int) -> list[PauliOperator]:
    """Unsigned generators of the steady-state ISG after round ``r`` (r >= 3)."""
    return [lat.checks[e] for e in lat.label_edges[r % 3]] + [
        lat.plaquette_operator(p.index) for p in lat.plaquettes
    ]


def classify(lat: HoneycombTorus, q: PauliOperator, r: int) -> str:
    """``"electric"``, ``"magnetic"`` or ``"neither"`` relative to the round-``r`` superlattice."""
    a = r % 3
    base = [g.symplectic() for g in isg_generators(lat, r)]
    n = lat.n_qubits
    elec = base + [PauliOperator.single(n, v, lat.qubit_letter(v, a)).symplectic() for v in range(n)]
    if gf2.solve(elec, q.symplectic()) is not None:
        return "electric"
    mag = base + [magnetic_operator(lat, a, [e]).symplectic() for e in lat.label_edges[a]]
    if gf2.solve(mag, q.symplectic()) is not None:
        return "magnetic"
    return "neither"


def in_span(ops, q: PauliOperator) -> bool:
    return gf2.solve([o.symplectic() for o in ops], q.symplectic()) is not None


@dataclass
class LogicalOperatorSet:
    round: int
    inner: list[PauliOperator]
    outer: list[PauliOperator]
    membranes: list[list[tuple[int, int]]] = field(default_factory=lambda: [[], []])  # (round, edge)


def build_logicals(lat: HoneycombTorus, r: int) -> LogicalOperatorSet:
    """Inner logicals and electric outer logicals valid against the round-``r`` ISG.

    ``outer[k]`` is paired with ``inner[k]``: they anticommute, and each
    commutes with the other pair's inner operator.
    """
    if r < 3:
        raise ValueError("logical operators are defined against the steady-state ISG (r >= 3)")
    a = r % 3
    inner = inner_logicals(lat)
    start = next(p.index for p in lat.plaquettes if p.label != a)
    outs = [electric_operator(lat, a, dual_path(lat, a, start, t)) for t in ((0, 1), (1, 0))]
    # pair each outer with the inner operator it anticommutes with
    outer = [None, None]
    for o in outs:
        hits = [k for k in range(2) if commutes(o, inner[k])]
        if len(hits) != 1:
            raise RuntimeError("outer operator does not pair with a unique inner operator")
        outer[hits[0]] = o
    return LogicalOperatorSet(r, inner, outer)


def truncated_outer(lat: HoneycombTorus, r: int, length: int) -> PauliOperator:
    """Electric string along an open superlattice path of the given number of edges."""
    a = r % 3
    start = next(p.index for p in lat.plaquettes if p.label != a)
    full = dual_path(lat, a, start, (1, 0))
    return electric_operator(lat, a, full[:length])


def evolve_outer(lat: HoneycombTorus, q: PauliOperator, r: int, schedule: str = "label"):
    """Return ``(Q', edges)`` with ``Q' = Q * prod(round-r checks on edges)``.

    ``Q'`` commutes with every round-``r+1`` check; the listed edges are the
    round-``r`` outcomes that enter the sign of the new representative.
    """
    cur = round_edges(lat, r, schedule)
    nxt = round_edges(lat, r + 1, schedule)
    nxt_ops = [lat.checks[e] for e in nxt]

    def pattern(p):
        return sum(commutes(p, c) << j for j, c in enumerate(nxt_ops))

    rows = [pattern(lat.checks[e]) for e in cur]
    mask = gf2.solve(rows, pattern(q))
    if mask is None:
        raise RuntimeError("outer operator cannot be pushed through the next round")
    used = [cur[i] for i in gf2.bits(mask)]
    out = q
    for e in used:
        out = out * lat.checks[e]
    return out, used


def fermion_exchange_phase(lat, paths: tuple[list[int], list[int], list[int]], origin: int = 0) -> int:
    """Scalar ``(O_c^† O_b)(O_a^† O_c)(O_b^† O_a)`` for check-product strings from ``origin``.

    Each path is a list of edges forming a walk that starts at ``origin``.
    """
    ops = []
    for path in paths:
        v = origin
        for e in path:
            edge = lat.edges[e]
            if v not in (edge.u, edge.v):
                raise ValueError("path is not a walk from the origin")
            v = edge.other(v)
        ops.append(lat.chain_operator(path))
    oa, ob, oc = ops
    total = oc.adjoint() * ob * (oa.adjoint() * oc) * (ob.adjoint() * oa)
    if not total.is_identity:
        raise ValueError("paths do not share their endpoints pairwise")
    return total.sign


def random_star_paths(lat, rng: np.random.Generator, origin: int = 0, max_len: int = 6):
    """Three vertex-disjoint random walks leaving ``origin`` along distinct edges."""
    while True:
        used = {origin}
        paths = []
        ok = True
        for e0 in lat.incident[origin]:
            v = lat.edges[e0].other(origin)
            if v in used:
                ok = False
                break
            used.add(v)
            path = [e0]
            for _ in range(int(rng.integers(0, max_len))):
                choices = [e for e in lat.incident[v] if lat.edges[e].other(v) not in used]
                if not choices:
                    break
                e = choices[int(rng.integers(len(choices)))]
                v = lat.edges[e].other(v)
                used.add(v)
                path.append(e)
            paths.append(path)
        if ok:
            order = rng.permutation(3)
            return tuple(paths[i] for i in order)
