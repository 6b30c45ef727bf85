"""The periodic ladder code with a four-round schedule ZZ, XX, ZZ, YY.

After every round the squares whose legs were just measured, or measured in
the round before, are inferred from those leg outcomes and the adjacent rung
outcomes.  Every square is thus recorded twice per period.  The squares are
in the ISG with a fixed sign, so each recorded bit is itself a detector.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import gf2
from .circuit import Detector, MeasurementCircuit, Observable, calibrate
from .decoder import Matcher, build_decoding_graph
from .lattice import LADDER_RUNG, LADDER_XX, LADDER_YY, LadderGraph, build_ladder
from .noise import FaultLocation, fault_signatures, sample_many, sampled_events
from .pauli import PauliOperator, commutes
from .stabilizer import StabilizerGroup

SCHEDULE_4 = (LADDER_RUNG, LADDER_XX, LADDER_RUNG, LADDER_YY)
SCHEDULE_3 = (LADDER_RUNG, LADDER_XX, LADDER_YY)  # negative control


def ladder_round_edges(lat: LadderGraph, r: int, schedule=SCHEDULE_4) -> list[int]:
    lab = schedule[r % len(schedule)]
    return [e.index for e in lat.edges if e.label == lab]


def run_ladder(L: int, rounds: int, rng: np.random.Generator, schedule=SCHEDULE_4):
    """Measure from the maximally mixed state; returns (ISG after each round, outcomes)."""
    lat = build_ladder(L)
    g = StabilizerGroup(lat.n_qubits)
    groups, outcomes = [], []
    for r in range(rounds):
        rec = {e: g.measure(lat.checks[e], rng).value for e in ladder_round_edges(lat, r, schedule)}
        outcomes.append(rec)
        groups.append(g.copy())
    return groups, outcomes


def ladder_inner(lat: LadderGraph, side: str = "bottom") -> PauliOperator:
    """Product of all checks along one leg; commutes with every check."""
    return lat.chain_operator([lat.leg(k, side) for k in range(lat.L)])


def ladder_outer(lat: LadderGraph, k: int = 0, letter: str = "Y") -> PauliOperator:
    return PauliOperator.on(lat.n_qubits, {lat.top(k): letter, lat.bottom(k): letter})


def _evolve(lat, q, cur, nxt):
    ops = [lat.checks[e] for e in nxt]

    def pat(p):
        return sum(commutes(p, c) << j for j, c in enumerate(ops))

    mask = gf2.solve([pat(lat.checks[e]) for e in cur], pat(q))
    if mask is None:
        raise RuntimeError("outer operator cannot be pushed through the next round")
    used = [cur[i] for i in gf2.bits(mask)]
    for e in used:
        q = q * lat.checks[e]
    return q, used


@dataclass
class LadderExperiment:
    lat: LadderGraph
    circ: MeasurementCircuit
    slices: list[int]  # detector -> round after which the bit is known (rounds for readout bits)


def ladder_circuit(L: int, rounds: int, rng: np.random.Generator | None = None) -> LadderExperiment:
    """Memory circuit: ``rounds`` rounds then an X readout of every qubit.

    The last round must be an XX round (``rounds = 2 mod 4``).  The L
    observables are the outer logical read on each rung.
    """
    if rounds % 4 != 2 or rounds < 6:
        raise ValueError("rounds must be 2 mod 4 and at least 6")
    lat = build_ladder(L)
    n = lat.n_qubits
    sq = [lat.plaquette_operator(k) for k in range(L)]
    yy = [e.index for e in lat.edges if e.label == LADDER_YY]
    init = list(sq) + [ladder_outer(lat, 0, "Y")] + [lat.checks[e] for e in yy]
    sched = [ladder_round_edges(lat, r) for r in range(rounds)]
    pos = [{e: k for k, e in enumerate(es)} for es in sched]
    readout = [PauliOperator.single(n, q, "X") for q in range(n)]
    circ = MeasurementCircuit(n, init, [[lat.checks[e] for e in es] for es in sched], readout)
    idx = lambda r, e: circ.outcome_index(r, pos[r][e])  # noqa: E731
    init_yy = {e: L + 1 + i for i, e in enumerate(yy)}

    dets, slices = [], []
    legs_of = {k: [e for e in lat.plaquettes[k].edges if lat.edges[e].label != LADDER_RUNG] for k in range(L)}
    # a syndrome bit after each round r: a square whose legs were measured in
    # round r or r-1, from those leg outcomes and the rung outcomes next to them
    for r in range(rounds):
        lab = SCHEDULE_4[r % 4]
        if lab == LADDER_RUNG:
            leg_round, rung_round = r - 1, r
            sq_lab = SCHEDULE_4[(r - 1) % 4]
        else:
            leg_round, rung_round = r, r - 1
            sq_lab = lab
        for k in range(L):
            if lat.plaquettes[k].label != sq_lab:
                continue
            if leg_round < 0:
                legs = [init_yy[e] for e in legs_of[k]]
            else:
                legs = [idx(leg_round, e) for e in legs_of[k]]
            rungs = [idx(rung_round, lat.rung(k)), idx(rung_round, lat.rung(k + 1))] if rung_round >= 0 else None
            if rungs is None:
                continue
            dets.append(Detector(tuple(sorted(legs + rungs)), 0, (k, r)))
            slices.append(r)
    # readout: YY squares are products of X on their corners; last XX legs against the readout
    for k in range(L):
        p = lat.plaquettes[k]
        if p.label == LADDER_YY:
            dets.append(Detector(tuple(sorted(circ.readout_index(q) for q in p.vertices)), 0, (k, rounds)))
            slices.append(rounds)
    for e in sched[rounds - 1]:
        u, v = lat.edges[e].u, lat.edges[e].v
        k = next(j for j in range(L) if e in legs_of[j])
        dets.append(Detector(tuple(sorted([idx(rounds - 1, e), circ.readout_index(u), circ.readout_index(v)])), 0, (k, rounds)))
        slices.append(rounds)
    circ.detectors = dets

    # one outer representative per rung: Y_t Y_b after YY rounds, X_t X_b after
    # XX rounds; crossing a ZZ round into a leg round multiplies in that rung's check
    init_rows = [p.symplectic() for p in init]
    obs = []
    for k in range(L):
        mask = gf2.solve(init_rows, ladder_outer(lat, k, "Y").symplectic())
        if mask is None:
            raise RuntimeError("rung representative is not fixed by the initial state")
        o = set(gf2.bits(mask))
        for r in range(0, rounds - 1, 2):
            o ^= {idx(r, lat.rung(k))}
        o ^= {circ.readout_index(lat.top(k)), circ.readout_index(lat.bottom(k))}
        obs.append(Observable(f"rung_{k}", tuple(sorted(o))))
    circ.observables = obs
    circ.meta = {"code": "ladder", "L": L, "rounds": rounds}
    calibrate(circ, rng if rng is not None else np.random.default_rng(0))
    return LadderExperiment(lat, circ, slices)


# ---------------------------------------------------------------------------
# faults


def check_error(exp: LadderExperiment, k: int, slot: int, side: str = "bottom", p: float = 0.0) -> FaultLocation:
    """The check operator on leg ``k`` applied as a unitary after round ``slot``."""
    e = exp.lat.leg(k, side)
    return FaultLocation(None, slot, "check", p, operator=exp.lat.checks[e])


def measurement_error(exp: LadderExperiment, k: int, r: int, p: float = 0.0) -> FaultLocation:
    """Flip of the recorded ZZ outcome of rung ``k`` in round ``r`` (a ZZ round)."""
    lat = exp.lat
    es = ladder_round_edges(lat, r)
    if lat.rung(k) not in es:
        raise ValueError(f"round {r} does not measure rungs")
    return FaultLocation(None, r, "flip", p, outcome=exp.circ.outcome_index(r, es.index(lat.rung(k))))


def inject_check_error(exp: LadderExperiment, k: int, slot: int, side: str = "bottom"):
    return fault_events(exp, [check_error(exp, k, slot, side)])


def inject_measurement_error(exp: LadderExperiment, k: int, r: int):
    return fault_events(exp, [measurement_error(exp, k, r)])


def fault_events(exp: LadderExperiment, faults) -> tuple[list[tuple], np.ndarray]:
    """Fired detector sites ``(square, slice)`` and observable flips of a fault set (frame mode)."""
    det, obs = fault_signatures(exp.circ, faults)
    tot = det.sum(axis=0) % 2
    flips = obs.sum(axis=0) % 2
    return [exp.circ.detectors[j].site for j in np.flatnonzero(tot)], flips


def ladder_noise(exp: LadderExperiment, p: float, full: bool = False) -> list[FaultLocation]:
    """Bottom-leg check errors and ZZ outcome flips at rate ``p``.

    XX check errors sit after YY rounds and YY check errors after XX rounds,
    the slots where a check error is not absorbed by the next leg round.  With
    ``full=True`` the top leg gets check errors too.
    """
    if not 0 <= p <= 1:
        raise ValueError("p outside [0, 1]")
    lat, R = exp.lat, exp.circ.num_rounds
    sides = ("bottom", "top") if full else ("bottom",)
    locs = []
    for r in range(R - 1):
        if r % 4 in (1, 3):
            want = "y" if r % 4 == 1 else "x"
            for side in sides:
                for k in range(lat.L):
                    if lat.link_letter(k) == want:
                        locs.append(check_error(exp, k, r, side, p))
        else:
            for k in range(lat.L):
                locs.append(measurement_error(exp, k, r, p))
    return locs


# ---------------------------------------------------------------------------
# decoding


@dataclass
class LadderDecoder:
    exp: LadderExperiment
    locations: list[FaultLocation]

    def __post_init__(self):
        self.det_sig, self.obs_sig = fault_signatures(self.exp.circ, self.locations)
        self.graph = build_decoding_graph(self.det_sig, self.obs_sig)
        self.matcher = Matcher(self.graph)

    def decode(self, events, obs_flips) -> dict:
        """Correct, then majority-vote the L rung observables (ties count as failure)."""
        corr = self.matcher.decode(np.flatnonzero(events))
        L = len(self.exp.circ.observables)
        resid = np.array([(int(obs_flips[k]) ^ (corr >> k)) & 1 for k in range(L)])
        wrong = int(resid.sum())
        return {"correction": corr, "residual": resid, "logical_error": wrong * 2 >= L, "homology_error": bool(resid.any())}


def decode_ladder(dec: LadderDecoder, events, obs_flips) -> dict:
    if int(np.sum(events)) % 2 and not dec.graph.edges:
        raise ValueError("odd number of change events without a boundary")
    return dec.decode(events, obs_flips)


def ladder_failure_rate(L: int, p: float, shots: int, rng: np.random.Generator, rounds: int | None = None, full: bool = False):
    rounds = rounds or (4 * L + 2)
    exp = ladder_circuit(L, rounds)
    dec = LadderDecoder(exp, ladder_noise(exp, p, full))
    act = sample_many(dec.locations, rng, shots)
    D, O = sampled_events(dec.det_sig, dec.obs_sig, act)
    fails = sum(dec.decode(d, o)["logical_error"] for d, o in zip(D, O))
    return fails
