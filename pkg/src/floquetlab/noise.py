"""Independent elementary faults and their effect on a measurement circuit.

A :class:`FaultLocation` is either a Pauli error in a slot (single-qubit, or a
multi-qubit operator such as a check error) or a classical flip of one
recorded outcome.  Faults are linear: the detection events of a sample are the
XOR of the signatures of its active locations.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .circuit import MeasurementCircuit, frame_events, propagate_frames, run_engine
from .pauli import PauliOperator


@dataclass(frozen=True)
class FaultLocation:
    qubit: int | None
    round: int  # slot: the fault acts right after this round
    pauli_type: str  # "X"/"Y"/"Z" for single-qubit faults, "check" or "flip"
    p: float = 0.0
    operator: PauliOperator | None = None
    outcome: int | None = None  # flipped outcome index for pauli_type == "flip"

    def pauli(self, n: int) -> PauliOperator:
        if self.operator is not None:
            return self.operator
        return PauliOperator.single(n, self.qubit, self.pauli_type)

    @property
    def key(self) -> tuple:
        if self.pauli_type == "flip":
            return ("flip", self.outcome)
        if self.operator is not None:
            return ("op", self.round, str(self.operator))
        return (self.qubit, self.round, self.pauli_type)


@dataclass
class FaultSample:
    locations: list[FaultLocation]
    active: np.ndarray  # indices into locations, or a boolean mask over them

    def __post_init__(self):
        a = np.asarray(self.active)
        if a.dtype == bool:
            if a.shape != (len(self.locations),):
                raise ValueError("boolean mask length differs from the number of locations")
            a = np.flatnonzero(a)
        self.active = a.astype(np.int64)

    @property
    def activated(self) -> list[FaultLocation]:
        return [self.locations[i] for i in self.active]


def _validate_p(p: float) -> None:
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"probability {p} outside [0, 1]")


# -- restricted single-qubit model ------------------------------------------


def canonicalize_fault(
    letter_at: Callable[[int, int], str],
    qubit: int,
    slot: int,
    raw: str,
) -> list[tuple[int, int, str]]:
    """Rewrite a raw fault as restricted-model locations ``(qubit, slot, letter)``.

    ``letter_at(q, r)`` is the letter of the round-``r`` check on qubit ``q``.
    ``raw`` is a single-qubit Pauli letter acting after round ``slot``, or
    ``"flip"`` for a flipped outcome of the round-``slot`` check on ``qubit``.
    A restricted location ``(q, s, L)`` always has ``L == letter_at(q, s)``.
    Equal locations produced twice cancel.
    """
    if raw == "flip":
        # a flip equals the same anticommuting Pauli just before and just after the check
        e = letter_at(qubit, slot - 1)
        return _xor_merge(canonicalize_fault(letter_at, qubit, slot - 1, e) + canonicalize_fault(letter_at, qubit, slot, e))
    raw = raw.upper()
    if raw == "I":
        return []
    p1 = letter_at(qubit, slot).upper()
    p2 = letter_at(qubit, slot + 1).upper()
    if p1 == p2:
        raise ValueError("consecutive checks on a qubit must differ")
    out = []
    if raw == p1:
        out.append((qubit, slot, p1))
    elif raw == p2:
        # commutes with the next check, so it slides to the following slot
        out.append((qubit, slot + 1, p2))
    else:
        out.extend([(qubit, slot, p1), (qubit, slot + 1, p2)])
    return out


def _xor_merge(items):
    seen: dict = {}
    for it in items:
        seen[it] = seen.get(it, 0) ^ 1
    return [it for it in items if seen.pop(it, 0)]


def restricted_locations(
    letter_at: Callable[[int, int], str],
    n: int,
    slots: Sequence[int],
    p: float,
) -> list[FaultLocation]:
    """One location per qubit and slot with the letter of the check just measured."""
    _validate_p(p)
    return [FaultLocation(q, s, letter_at(q, s).upper(), p) for s in slots for q in range(n)]


# -- sampling and application --------------------------------------------------


def sample(locations: Sequence[FaultLocation], rng: np.random.Generator) -> FaultSample:
    """Independent Bernoulli draw per location."""
    probs = np.array([loc.p for loc in locations], dtype=float)
    if probs.size and (probs.min() < 0 or probs.max() > 1):
        raise ValueError("probability outside [0, 1]")
    hits = rng.random(len(locations)) < probs
    return FaultSample(list(locations), np.flatnonzero(hits))


def sample_many(locations: Sequence[FaultLocation], rng: np.random.Generator, shots: int) -> np.ndarray:
    """``(shots, len(locations))`` boolean activation matrix."""
    probs = np.array([loc.p for loc in locations], dtype=float)
    if probs.size and (probs.min() < 0 or probs.max() > 1):
        raise ValueError("probability outside [0, 1]")
    return rng.random((shots, len(locations))) < probs


def _split(locations, n):
    errors: dict[int, list[PauliOperator]] = {}
    flips = []
    for loc in locations:
        if loc.pauli_type == "flip":
            flips.append(loc.outcome)
        else:
            errors.setdefault(loc.round, []).append(loc.pauli(n))
    return errors, flips


def apply(
    fs: FaultSample,
    circ: MeasurementCircuit,
    mode: str = "frame",
    rng: np.random.Generator | None = None,
):
    """Detection events and observable flips caused by ``fs``.

    Frame mode XOR-propagates the faults; engine mode runs the stabilizer
    engine with the Pauli faults applied between rounds and compares the
    detector parities with their calibrated expected values.
    """
    active = fs.activated
    if mode == "engine":
        if rng is None:
            raise ValueError("engine mode needs an rng")
        errors, flips = _split(active, circ.n)
        run = run_engine(circ, rng, errors, flips)
        det, obs = circ.evaluate(run.outcomes, run.virtual)
        return det[0], obs[0]
    if mode != "frame":
        raise ValueError(f"unknown mode {mode!r}")
    inj: dict[int, tuple[np.ndarray, np.ndarray]] = {}
    flip_row = np.zeros((1, circ.num_outcomes), dtype=np.uint8)
    for loc in active:
        if loc.pauli_type == "flip":
            flip_row[0, loc.outcome] ^= 1
            continue
        p = loc.pauli(circ.n)
        fx, fz = inj.setdefault(loc.round, (np.zeros((1, circ.n), np.float32), np.zeros((1, circ.n), np.float32)))
        for q in p.qubits():
            c = p.letter(q)
            fx[0, q] = (fx[0, q] + (c in "XY")) % 2
            fz[0, q] = (fz[0, q] + (c in "ZY")) % 2
    out, virt = propagate_frames(circ, inj, 1, flip_row)
    det, obs = frame_events(circ, out, virt)
    return det[0], obs[0]


def fault_signatures(circ: MeasurementCircuit, locations: Sequence[FaultLocation]):
    """Detector and observable flip patterns of every single location.

    Returns two uint8 arrays of shapes ``(M, num_detectors)`` and
    ``(M, num_observables)``, computed with one frame per location.
    """
    M = len(locations)
    inj: dict[int, tuple[np.ndarray, np.ndarray]] = {}
    flips = np.zeros((M, circ.num_outcomes), dtype=np.uint8)
    for i, loc in enumerate(locations):
        if loc.pauli_type == "flip":
            flips[i, loc.outcome] = 1
            continue
        p = loc.pauli(circ.n)
        fx, fz = inj.setdefault(loc.round, (np.zeros((M, circ.n), np.float32), np.zeros((M, circ.n), np.float32)))
        for q in p.qubits():
            c = p.letter(q)
            fx[i, q] = c in "XY"
            fz[i, q] = c in "ZY"
    out, virt = propagate_frames(circ, inj, M, flips)
    return frame_events(circ, out, virt)


def sampled_events(det_sig: np.ndarray, obs_sig: np.ndarray, active: np.ndarray):
    """Events of many shots from an activation matrix via the linear signatures."""
    a = active.astype(np.float32)
    det = (a @ det_sig.astype(np.float32)) % 2
    obs = (a @ obs_sig.astype(np.float32)) % 2
    return det.astype(np.uint8), obs.astype(np.uint8)
