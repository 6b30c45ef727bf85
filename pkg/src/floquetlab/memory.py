"""Honeycomb memory experiment as a :class:`MeasurementCircuit`.

Every qubit starts in the +1 eigenstate of the letter of its label-0 check,
so the label-0 checks, the label-0 plaquettes and both label-0 electric outer
operators are fixed from the start.  After the last round every qubit is
measured in the letter of the check it just took part in.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import gf2
from .circuit import Detector, MeasurementCircuit, Observable, calibrate
from .honeycomb import dual_path, electric_operator, evolve_outer, round_edges
from .lattice import HoneycombTorus
from .noise import FaultLocation, restricted_locations
from .pauli import PauliOperator


@dataclass(frozen=True)
class Inference:
    plaquette: int
    round: int  # round after which the value is known
    outcomes: tuple[int, ...]


def infer_plaquettes(lat: HoneycombTorus, circ_index, rounds: int) -> dict[int, list[Inference]]:
    """All plaquette inferences available from rounds ``0 .. rounds-1``.

    After round ``r >= 1`` the plaquettes of label ``r + 1`` are the product of
    their boundary checks measured in rounds ``r - 1`` and ``r``.
    """
    out: dict[int, list[Inference]] = {p.index: [] for p in lat.plaquettes}
    for r in range(1, rounds):
        a = (r + 1) % 3
        for p in lat.plaquettes:
            if p.label != a:
                continue
            idx = []
            for e in p.edges:
                lab = lat.edges[e].label
                rr = r - 1 if lab == (r - 1) % 3 else r
                idx.append(circ_index(rr, e))
            out[p.index].append(Inference(p.index, r, tuple(sorted(idx))))
    return out


def _xor(*groups) -> tuple[int, ...]:
    s: set[int] = set()
    for g in groups:
        s ^= set(g)
    return tuple(sorted(s))


def letter_at(lat: HoneycombTorus):
    return lambda q, r: lat.qubit_letter(q, r % 3).upper()


def memory_circuit(lat: HoneycombTorus, rounds: int, rng: np.random.Generator | None = None) -> MeasurementCircuit:
    """Build and calibrate the memory circuit with ``rounds`` rounds of checks.

    Two observables track the label-0 electric outer operators along the two
    homology directions; their signs follow the check outcomes they absorb
    while being pushed through the schedule.
    """
    if rounds < 4:
        raise ValueError("need at least 4 rounds")
    n = lat.n_qubits
    init = [PauliOperator.single(n, v, lat.qubit_letter(v, 0)) for v in range(n)]
    sched = [round_edges(lat, r) for r in range(rounds)]
    pos = [{e: k for k, e in enumerate(es)} for es in sched]
    ops = [[lat.checks[e] for e in es] for es in sched]
    c_end = (rounds - 1) % 3
    readout = [PauliOperator.single(n, v, lat.qubit_letter(v, c_end)) for v in range(n)]
    circ = MeasurementCircuit(n, init, ops, readout)
    idx = lambda r, e: circ.outcome_index(r, pos[r][e])  # noqa: E731

    inf = infer_plaquettes(lat, idx, rounds)
    dets: list[Detector] = []
    for p in lat.plaquettes:
        seq = inf[p.index]
        if p.label == 0 and seq:
            dets.append(Detector(_xor(seq[0].outcomes, p.vertices), 0, (p.index, seq[0].round - 3)))
        for a, b in zip(seq, seq[1:]):
            dets.append(Detector(_xor(a.outcomes, b.outcomes), 0, (p.index, a.round)))
        if p.label == c_end and seq:
            ro = [circ.readout_index(v) for v in p.vertices]
            dets.append(Detector(_xor(seq[-1].outcomes, ro), 0, (p.index, seq[-1].round)))
    circ.detectors = dets

    # outer operators: electric strings on the label-0 superlattice
    start = next(p.index for p in lat.plaquettes if p.label != 0)
    other = [p.index for p in lat.plaquettes if p.label != c_end]
    rows = [r.symplectic() for r in readout] + [lat.plaquette_operator(p).symplectic() for p in other]
    obs = []
    for name, target in (("outer_1", (1, 0)), ("outer_2", (0, 1))):
        q = electric_operator(lat, 0, dual_path(lat, 0, start, target))
        rec = set(q.qubits())  # init loads sit at outcome indices 0..n-1
        for r in range(rounds - 1):
            q, used = evolve_outer(lat, q, r)
            rec ^= {idx(r, e) for e in used}
        mask = gf2.solve(rows, q.symplectic())
        if mask is None:
            raise ValueError(f"outer operator cannot be read out after {rounds} rounds; use rounds = 1 mod 6")
        for i in gf2.bits(mask):
            if i < n:
                rec ^= {circ.readout_index(i)}
            else:
                rec ^= set(inf[other[i - n]][-1].outcomes)
        obs.append(Observable(name, tuple(sorted(rec))))
    circ.observables = obs
    circ.meta = {"code": "honeycomb", "L1": lat.L1, "L2": lat.L2, "rounds": rounds, "inferences": inf}
    calibrate(circ, rng if rng is not None else np.random.default_rng(0))
    return circ


def memory_noise(lat: HoneycombTorus, circ: MeasurementCircuit, p: float, scenario: str = "noisy-readout", noisy_rounds: int | None = None) -> list[FaultLocation]:
    """Restricted single-qubit faults in the gaps after rounds.

    ``noisy-readout``: faults after every round before the final one (the
    readout itself is perfect).  ``noise-then-quiet``: faults only after the
    first ``noisy_rounds`` rounds; later rounds are perfect.
    """
    R = circ.num_rounds
    if scenario == "noisy-readout":
        slots = range(0, R - 1)
    elif scenario == "noise-then-quiet":
        if noisy_rounds is None or noisy_rounds > R - 1:
            raise ValueError("noise-then-quiet needs noisy_rounds <= rounds - 1")
        slots = range(0, noisy_rounds)
    else:
        raise ValueError(f"unknown scenario {scenario!r}")
    return restricted_locations(letter_at(lat), lat.n_qubits, slots, p)


def rounds_for(noisy_rounds: int, scenario: str) -> int:
    """Smallest round count ``R`` with ``R = 1 mod 6`` covering the noisy rounds."""
    need = noisy_rounds + (1 if scenario == "noisy-readout" else 4)
    R = max(7, need)
    while (R - 1) % 6:
        R += 1
    return R
