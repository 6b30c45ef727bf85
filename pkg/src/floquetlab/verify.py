"""Invariant suites run by ``floquetlab verify`` (and reused by other subcommands).

Each suite returns a list of :class:`Check` records; a suite passes when every
check passes.  All randomness comes from the ``seed`` argument.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from . import dimer, experiments
from .decoder import Matcher, SyndromeLattice, brute_force_match, build_decoding_graph, in_displacement_set, residual_chain_mask
from .honeycomb import (
    build_logicals,
    classify,
    disentangle,
    evolve_outer,
    expected_isg,
    fermion_exchange_phase,
    in_span,
    isg_generators,
    no_long_loops,
    random_star_paths,
    run_schedule,
    span_group,
    subsystem_counts,
    superlattice_toric_code,
    truncated_outer,
)
from .lattice import build_honeycomb
from .memory import letter_at, memory_circuit, memory_noise
from .noise import FaultLocation, canonicalize_fault, fault_signatures, restricted_locations


@dataclass
class Check:
    suite: str
    name: str
    passed: bool
    detail: str = ""

    def to_dict(self) -> dict:
        return {"suite": self.suite, "check": self.name, "passed": bool(self.passed), "detail": self.detail}


def subsystem(seed: int = 0) -> list[Check]:
    lat = build_honeycomb(3, 3)
    got = subsystem_counts(lat)
    return [Check("subsystem", "counts (3,3)", got == (26, 10, 8, 0), f"gauge,stabilizer,gauge_qubits,logical={got}")]


def isg(seed: int = 0, sizes=((3, 3), (3, 6)), rounds: int = 13) -> list[Check]:
    rng = np.random.default_rng(seed)
    out = []
    for size in sizes:
        lat = build_honeycomb(*size)
        run = run_schedule(lat, rounds, rng)
        eq = all(g.equals(expected_isg(lat, r)) for r, g in enumerate(run.groups))
        n_p = len(lat.plaquettes)
        ranks = [g.rank for g in run.groups]
        out.append(Check("isg", f"group equality {size}", eq, f"rounds 0..{rounds - 1}"))
        out.append(Check("isg", f"rank 2n_p-2 from round 3 {size}", all(k == 2 * n_p - 2 for k in ranks[3:]), str(ranks)))
        out.append(Check("isg", f"no long loops {size}", all(no_long_loops(g, lat) == 1 for g in run.groups)))
        bad = run_schedule(lat, rounds, rng, "letter")
        out.append(Check("isg", f"letter schedule captures a long loop {size}", any(no_long_loops(g, lat) == 0 for g in bad.groups)))
    return out


def toric(seed: int = 0) -> list[Check]:
    rng = np.random.default_rng(seed)
    lat = build_honeycomb(3, 3)
    g = run_schedule(lat, 4, rng).groups[3]
    dis = disentangle(g, lat, 3)
    tc = superlattice_toric_code(lat, 3, dis)
    return [
        Check("toric", "disentangled ISG equals superlattice toric code", tc.equals(span_group(lat.n_qubits, dis.group.generators))),
        Check("toric", "effective-operator weights", sorted(set(dis.weights)) == [1, 3, 6], str(sorted(set(dis.weights)))),
    ]


def logicals(seed: int = 0, triples: int = 50) -> list[Check]:
    rng = np.random.default_rng(seed)
    lat = build_honeycomb(3, 3)
    L = build_logicals(lat, 3)
    q = L.outer[0]
    reps, kinds = [q], []
    for r in range(3, 15):
        q, _ = evolve_outer(lat, q, r)
        reps.append(q)
        kinds.append(classify(lat, q, r + 1))
    toggles = all(a != b and {a, b} <= {"electric", "magnetic"} for a, b in zip(kinds, kinds[1:]))
    period3 = all(
        in_span(isg_generators(lat, k + 6) + [L.inner[1]], reps[k + 3] * reps[k])
        and not in_span(isg_generators(lat, k + 6), reps[k + 3] * reps[k])
        for k in range(0, 6)
    )
    period6 = all(in_span(isg_generators(lat, k + 9), reps[k + 6] * reps[k]) for k in range(0, 6))
    phases = [fermion_exchange_phase(lat, random_star_paths(lat, rng)) for _ in range(triples)]
    t = truncated_outer(lat, 3, 3)
    ends = sum(not t.commutes_with(lat.plaquette_operator(p)) for p in range(len(lat.plaquettes)))
    return [
        Check("logicals", "electric/magnetic toggle every round", toggles, " ".join(k[0] for k in kinds)),
        Check("logicals", "inner multiplication every period", period3),
        Check("logicals", "period-6 recurrence", period6),
        Check("logicals", f"exchange phase -1 for {triples} triples", all(ph == -1 for ph in phases)),
        Check("logicals", "truncated outer anticommutes with 2 plaquettes", ends == 2, str(ends)),
    ]


def _site_pos(lat, circ, SL, det):
    p, r = circ.detectors[det].site
    return lat.plaquettes[p].cell, r


def syndrome(seed: int = 0, slots=range(3, 12)) -> list[Check]:
    """Restricted faults on every qubit of (3,3) in nine bulk rounds (6 qubits x 3 round phases per unit cell).

    Each must fire exactly two detectors separated by a bulk displacement, and
    every raw single-qubit Pauli must have the signature of its restricted rewrite.
    """
    lat = build_honeycomb(3, 3)
    circ = memory_circuit(lat, 19)
    SL = SyndromeLattice(3, 3)
    locs = restricted_locations(letter_at(lat), lat.n_qubits, slots, 0.0)
    det, obs = fault_signatures(circ, locs)
    wrong_count = wrong_disp = 0
    for row in det:
        hit = np.flatnonzero(row)
        if len(hit) != 2:
            wrong_count += 1
            continue
        d = SL.displacement(_site_pos(lat, circ, SL, hit[0]), _site_pos(lat, circ, SL, hit[1]))
        wrong_disp += not in_displacement_set(d)
    raw = [FaultLocation(q, s, c) for s in slots for q in range(lat.n_qubits) for c in "XYZ"]
    rdet, robs = fault_signatures(circ, raw)
    index = {(loc.qubit, loc.round, loc.pauli_type): i for i, loc in enumerate(locs)}
    mism = 0
    for loc, dr, orow in zip(raw, rdet, robs):
        parts = canonicalize_fault(letter_at(lat), loc.qubit, loc.round, loc.pauli_type)
        if any(p not in index for p in parts):
            continue  # rewrite leaves the swept window
        want_d = np.bitwise_xor.reduce([det[index[p]] for p in parts], axis=0)
        want_o = np.bitwise_xor.reduce([obs[index[p]] for p in parts], axis=0)
        mism += not (np.array_equal(want_d, dr) and np.array_equal(want_o, orow))
    return [
        Check("syndrome", f"{len(locs)} restricted faults fire exactly 2 detectors", wrong_count == 0, f"{wrong_count} exceptions"),
        Check("syndrome", "displacements in {s1+s2, s2+s3, s3+s1}", wrong_disp == 0, f"{wrong_disp} exceptions"),
        Check("syndrome", "raw Paulis equal their restricted rewrite", mism == 0, f"{mism} mismatches"),
    ]


def decoder(seed: int = 0, instances: int = 100, max_events: int = 8) -> list[Check]:
    rng = np.random.default_rng(seed)
    lat = build_honeycomb(3, 3)
    circ = memory_circuit(lat, 13)
    locs = memory_noise(lat, circ, 0.01)
    det, obs = fault_signatures(circ, locs)
    g = build_decoding_graph(det, obs)
    M = Matcher(g)
    exact = True
    done = 0
    while done < instances:
        k = int(rng.integers(1, max_events // 2 + 1))
        faults = rng.choice(len(locs), size=k, replace=False)
        ev = np.flatnonzero(det[faults].sum(axis=0) % 2).tolist()
        if not ev or len(ev) > max_events:
            continue
        done += 1
        exact &= abs(M.weight(M.match(ev)) - brute_force_match(M.dist, ev, g.boundary)) < 1e-9
    SL = SyndromeLattice(3, 3)
    squares = [
        sq for sq in elementary_squares(g)
        if np.allclose(sum(SL.displacement(_site_pos(lat, circ, SL, a), _site_pos(lat, circ, SL, b)) for a, b in sq), 0)
    ]
    bad = [sq for sq in squares if residual_chain_mask(g, sq)]
    return [
        Check("decoder", f"matching weight equals brute force on {instances} instances", exact),
        Check("decoder", f"{len(squares)} elementary square residuals trivial", len(squares) > 0 and not bad, f"{len(bad)} nontrivial"),
    ]


def elementary_squares(g) -> list[list[tuple[int, int]]]:
    """All 4-cycles of the decoding graph avoiding the boundary node.

    On small tori some of these wrap around; callers filter by net displacement.
    """
    nb = {a: set(g.neighbours(a)) - {g.boundary} for a in range(g.num_detectors)}
    out = []
    for a in range(g.num_detectors):
        for b, d in itertools.combinations(sorted(x for x in nb[a] if x > a), 2):
            for c in sorted((nb[b] & nb[d]) - {a}):
                if c > a and b < d:
                    out.append([(a, b), (b, c), (c, d), (d, a)])
    return out


def ladder(seed: int = 0) -> list[Check]:
    from .ladder import fault_events, inject_check_error, inject_measurement_error, ladder_circuit
    from .pauli import PauliOperator

    exp = ladder_circuit(8, 22)
    lat = exp.lat
    ok_check = ok_flip = True
    for k in range(lat.L):
        for slot in range(1, 20, 2):
            if lat.link_letter(k) != ("y" if slot % 4 == 1 else "x"):
                continue
            sites, _ = inject_check_error(exp, k, slot)
            ok_check &= len(sites) == 2 and sites[0][1] == sites[1][1]
        for r in range(2, 21, 2):
            sites, _ = inject_measurement_error(exp, k, r)
            ok_flip &= len(sites) == 2 and abs(sites[0][1] - sites[1][1]) == 1
    harmful = 0
    n = lat.n_qubits
    for q in range(n):
        for slot in range(-1, 21):
            for c in "XYZ":
                sites, flips = fault_events(exp, [FaultLocation(None, slot, "op", 0.0, operator=PauliOperator.single(n, q, c))])
                harmful += not sites and bool(flips.any())
    return [
        Check("ladder", "check error: 2 events in one slice", ok_check),
        Check("ladder", "measurement flip: 2 time-adjacent events", ok_flip),
        Check("ladder", "no undetected single-qubit Pauli flips a logical", harmful == 0, f"{harmful} harmful"),
    ]


def dimer_suite(seed: int = 0, clever: int = 50) -> list[Check]:
    rng = np.random.default_rng(seed)
    hexa = dimer.hexagon_example()
    ok_hex = hexa == [[(1, 2), (3, 4), (5, 6)], [(1, 4), (2, 3), (5, 6)], [(1, 6), (2, 3), (4, 5)]]
    conserved = True
    for Lx, H in ((4, 4), (6, 4), (4, 6), (6, 6), (6, 10), (10, 6)):
        ann = dimer.build_annulus(Lx, H)
        if ann.n > 60:
            continue
        conserved &= exhaustive_conservation(ann, rng)
    ann = dimer.build_annulus(12, 10)
    naive = dimer.obstruction_demo(ann)
    twice = dimer.obstruction_demo(ann, periods=2)
    forced = True
    for _ in range(clever):
        rep = dimer.obstruction_demo(ann, dimer.random_top_sequence(ann, rng))
        forced &= rep.pairing_restored and rep.top_parity == rep.bottom_parity == 1 and rep.bulk_parity == 0
    return [
        Check("dimer", "hexagon example", ok_hex, str(hexa)),
        Check("dimer", "winding conserved by every move (annuli <= 60 vertices)", conserved),
        Check("dimer", "naive bottom boundary winds once per period", naive.bottom_parity == 1 and naive.bulk_parity == 0),
        Check("dimer", "naive top boundary winds too", naive.top_parity == 1),
        Check("dimer", "two periods restore the parity", twice.bottom_parity == 0 and twice.top_parity == 0),
        Check("dimer", f"{clever} random top sequences forced to equal parity", forced),
    ]


def exhaustive_conservation(ann, rng, states: int = 20) -> bool:
    """From several reachable configurations, every single-edge measurement keeps the winding at every cut."""
    cuts = [ann.cut(x) for x in range(ann.Lx)]
    cfg = dimer.dimers_from_label(ann, 0)
    for _ in range(states):
        w = [dimer.winding(cfg, c) for c in cuts]
        if len(set(w)) != 1:
            return False
        for e in range(len(ann.edges)):
            nxt = dimer.dimer_measure(cfg, ann, e)
            if not nxt.is_valid(ann) or [dimer.winding(nxt, c) for c in cuts] != w:
                return False
        for e in rng.integers(0, len(ann.edges), size=7):
            cfg = dimer.dimer_measure(cfg, ann, int(e))
    return True


def toy(seed: int = 0, quick: bool = True) -> list[Check]:
    rng = np.random.default_rng(seed)
    out = []
    sig = []
    for K in range(0, 11):
        st = experiments.commute_statistics(12, K, 4000 if quick else 40000, rng)
        sig.append(st.commute_sigma(2.0**-K))
    out.append(Check("toy", "commute probability within 5 sigma of 2^-K (K<=10)", max(sig) < 5, f"max {max(sig):.2f} sigma"))
    Ns = range(4, 9) if quick else range(4, 11)
    means, factor = experiments.growth_factors(Ns, 60 if quick else 300, rng)
    out.append(Check("toy", "purification growth factor in [1.7, 2.3]", 1.7 <= factor <= 2.3, f"{factor:.3f}"))
    pval = experiments.indistinguishability(10 if not quick else 8, 10**5 if not quick else 10**4, rng)
    out.append(Check("toy", "disturbance indistinguishable (chi-square p > 0.01)", pval > 0.01, f"p={pval:.3f}"))
    return out


def memory(seed: int = 0) -> list[Check]:
    mism = experiments.frame_engine_agreement(3, 3, 9, 100, 0.05, seed)
    cfg = experiments.ExperimentConfig(sizes=[[3, 3]], p=[0.0], shots=50, seed=seed)
    zero = list(experiments.memory_experiment(cfg))[0].logical_failures
    return [
        Check("memory", "frame and engine agree shot by shot (100 shots)", mism == 0, f"{mism} mismatches"),
        Check("memory", "p=0 gives no failures", zero == 0),
    ]


SUITES = {
    "subsystem": subsystem,
    "isg": isg,
    "toric": toric,
    "logicals": logicals,
    "syndrome": syndrome,
    "decoder": decoder,
    "ladder": ladder,
    "dimer": dimer_suite,
    "toy": toy,
    "memory": memory,
}


def run_suites(names, seed: int = 0) -> list[Check]:
    out = []
    for n in names:
        if n not in SUITES:
            raise KeyError(f"unknown suite {n!r}; choose from {sorted(SUITES)}")
        out.extend(SUITES[n](seed))
    return out
