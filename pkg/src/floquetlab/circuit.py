"""Measurement circuits: initial loads, rounds of Pauli checks, a final readout.

Outcome indices are global: first the init loads (recorded as outcome bit 0),
then every round's checks in order, then the readout measurements.  A
"slot" ``s`` is the gap right after round ``s``; slot ``-1`` follows the init
loads.  Errors live in slots.

Two simulators share this description:

* ``run_engine`` drives a :class:`StabilizerGroup` and is the oracle;
* ``propagate_frames`` pushes Pauli frames through the rounds for many shots at
  once and reports which outcomes are flipped relative to a noiseless run.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import sparse

from .pauli import PauliOperator
from .stabilizer import Membership, StabilizerGroup


@dataclass
class Detector:
    outcomes: tuple[int, ...]
    expected: int = 0
    site: tuple = ()  # free-form coordinates, e.g. (plaquette, round)


@dataclass
class Observable:
    name: str
    outcomes: tuple[int, ...]
    virtual: PauliOperator | None = None  # evaluated on the state just before readout
    expected: int = 0


def _xz_matrix(ops: list[PauliOperator], n: int) -> tuple[np.ndarray, np.ndarray]:
    x = np.zeros((len(ops), n), dtype=np.float32)
    z = np.zeros((len(ops), n), dtype=np.float32)
    for i, p in enumerate(ops):
        for q in p.qubits():
            c = p.letter(q)
            x[i, q] = c in "XY"
            z[i, q] = c in "ZY"
    return x, z


@dataclass
class MeasurementCircuit:
    n: int
    init: list[PauliOperator]
    rounds: list[list[PauliOperator]]
    readout: list[PauliOperator] = field(default_factory=list)
    detectors: list[Detector] = field(default_factory=list)
    observables: list[Observable] = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self._offsets = [len(self.init)]
        for ops in self.rounds:
            self._offsets.append(self._offsets[-1] + len(ops))

    @property
    def num_rounds(self) -> int:
        return len(self.rounds)

    @property
    def num_outcomes(self) -> int:
        return self._offsets[-1] + len(self.readout)

    def outcome_index(self, r: int, k: int) -> int:
        """Index of the ``k``-th measurement of round ``r`` (``r == num_rounds`` is the readout)."""
        return self._offsets[r] + k

    def readout_index(self, k: int) -> int:
        return self._offsets[-1] + k

    def round_of(self, idx: int) -> int:
        """Round that produced outcome ``idx`` (-1 for init loads)."""
        if idx < len(self.init):
            return -1
        return int(np.searchsorted(self._offsets, idx, side="right")) - 1

    # -- matrices ------------------------------------------------------------

    def detector_matrix(self) -> sparse.csr_matrix:
        rows, cols = [], []
        for j, d in enumerate(self.detectors):
            for i in d.outcomes:
                rows.append(i)
                cols.append(j)
        data = np.ones(len(rows), dtype=np.float32)
        return sparse.csr_matrix((data, (rows, cols)), shape=(self.num_outcomes, len(self.detectors)))

    def observable_matrix(self) -> sparse.csr_matrix:
        rows, cols = [], []
        for j, o in enumerate(self.observables):
            for i in o.outcomes:
                rows.append(i)
                cols.append(j)
        data = np.ones(len(rows), dtype=np.float32)
        return sparse.csr_matrix((data, (rows, cols)), shape=(self.num_outcomes, len(self.observables)))

    def _round_xz(self):
        if not hasattr(self, "_xz_cache"):
            self._xz_cache = [_xz_matrix(ops, self.n) for ops in self.rounds]
            self._readout_xz = _xz_matrix(self.readout, self.n)
            self._virtual_xz = _xz_matrix(
                [o.virtual if o.virtual is not None else PauliOperator(self.n) for o in self.observables],
                self.n,
            )
        return self._xz_cache

    # -- evaluation ------------------------------------------------------------

    def evaluate(self, outcome_bits: np.ndarray, virtual_bits: np.ndarray | None = None):
        """Detector and observable parities (relative to their expected values)."""
        bits = np.atleast_2d(outcome_bits).astype(np.float32)
        det = (np.asarray(bits @ self.detector_matrix()) % 2).astype(np.uint8)
        obs = (np.asarray(bits @ self.observable_matrix()) % 2).astype(np.uint8)
        if virtual_bits is not None:
            obs ^= np.atleast_2d(virtual_bits).astype(np.uint8)
        det ^= np.array([d.expected for d in self.detectors], dtype=np.uint8)
        obs ^= np.array([o.expected for o in self.observables], dtype=np.uint8)
        return det, obs


# ---------------------------------------------------------------------------
# engine mode


@dataclass
class EngineRun:
    outcomes: np.ndarray  # bits, one per outcome index
    virtual: np.ndarray  # one bit per observable (0 when no virtual part)
    groups: list[StabilizerGroup] | None = None  # snapshot after each round when requested


def run_engine(
    circ: MeasurementCircuit,
    rng: np.random.Generator,
    errors: dict[int, list[PauliOperator]] | None = None,
    flips=(),
    snapshots: bool = False,
) -> EngineRun:
    """Simulate ``circ`` exactly; ``errors[slot]`` are applied after round ``slot``.

    ``flips`` lists outcome indices whose recorded bit is inverted (classical
    measurement errors; the state is unaffected).
    """
    errors = errors or {}
    group = StabilizerGroup(circ.n)
    bits = np.zeros(circ.num_outcomes, dtype=np.uint8)
    idx = 0
    for p in circ.init:
        out = group.measure(p, rng, forced=1)
        if out.value != 1:
            raise ValueError(f"init load {p} conflicts with earlier loads")
        idx += 1
    for e in errors.get(-1, ()):
        group.apply_pauli(e)
    snaps = []
    for r, ops in enumerate(circ.rounds):
        for p in ops:
            bits[idx] = group.measure(p, rng).bit
            idx += 1
        for e in errors.get(r, ()):
            group.apply_pauli(e)
        if snapshots:
            snaps.append(group.copy())
    virtual = np.zeros(len(circ.observables), dtype=np.uint8)
    for j, o in enumerate(circ.observables):
        if o.virtual is None:
            continue
        m = group.contains(o.virtual)
        if m is Membership.PLUS:
            virtual[j] = 0
        elif m is Membership.MINUS:
            virtual[j] = 1
        else:
            raise RuntimeError(f"virtual observable {o.name} is not determined by the state")
    for p in circ.readout:
        bits[idx] = group.measure(p, rng).bit
        idx += 1
    for i in flips:
        bits[i] ^= 1
    return EngineRun(bits, virtual, snaps if snapshots else None)


def calibrate(circ: MeasurementCircuit, rng: np.random.Generator, trials: int = 2) -> None:
    """Fix expected detector/observable parities from noiseless engine runs.

    Raises if any detector or observable is not deterministic across trials.
    """
    ref = None
    for _ in range(trials):
        run = run_engine(circ, rng)
        for d in circ.detectors:
            d.expected = 0
        for o in circ.observables:
            o.expected = 0
        det, obs = circ.evaluate(run.outcomes, run.virtual)
        cur = (det[0].copy(), obs[0].copy())
        if ref is None:
            ref = cur
        elif not (np.array_equal(ref[0], cur[0]) and np.array_equal(ref[1], cur[1])):
            bad = np.flatnonzero(ref[0] != cur[0])
            raise RuntimeError(f"non-deterministic detectors {bad[:5].tolist()} or observables")
    for d, v in zip(circ.detectors, ref[0]):
        d.expected = int(v)
    for o, v in zip(circ.observables, ref[1]):
        o.expected = int(v)


# ---------------------------------------------------------------------------
# frame mode


def propagate_frames(
    circ: MeasurementCircuit,
    injections: dict[int, tuple[np.ndarray, np.ndarray]],
    shots: int,
    flips: np.ndarray | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Outcome flips and virtual-observable flips for ``shots`` Pauli frames.

    ``injections[slot] = (fx, fz)``, each a ``(shots, n)`` 0/1 array XORed into
    the frame after round ``slot``.  ``flips`` is an optional ``(shots,
    num_outcomes)`` array of classical measurement flips.
    """
    xz = circ._round_xz()
    n = circ.n
    fx = np.zeros((shots, n), dtype=np.float32)
    fz = np.zeros((shots, n), dtype=np.float32)
    out = np.zeros((shots, circ.num_outcomes), dtype=np.uint8)

    def inject(slot):
        if slot in injections:
            ix, iz = injections[slot]
            fx[:] = (fx + ix) % 2
            fz[:] = (fz + iz) % 2

    inject(-1)
    for r, (cx, cz) in enumerate(xz):
        if cx.shape[0]:
            a, b = circ.outcome_index(r, 0), circ.outcome_index(r, cx.shape[0])
            out[:, a:b] = ((fx @ cz.T + fz @ cx.T) % 2).astype(np.uint8)
        inject(r)
    vx, vz = circ._virtual_xz
    virtual = ((fx @ vz.T + fz @ vx.T) % 2).astype(np.uint8) if len(circ.observables) else np.zeros((shots, 0), np.uint8)
    for j, o in enumerate(circ.observables):
        if o.virtual is None:
            virtual[:, j] = 0
    rx, rz = circ._readout_xz
    if rx.shape[0]:
        a = circ.readout_index(0)
        out[:, a:] = ((fx @ rz.T + fz @ rx.T) % 2).astype(np.uint8)
    if flips is not None:
        out ^= flips.astype(np.uint8)
    return out, virtual


def frame_events(circ: MeasurementCircuit, outcome_flips: np.ndarray, virtual_flips: np.ndarray):
    """Detection events and observable flips from outcome flips (no expected offsets)."""
    f = outcome_flips.astype(np.float32)
    det = (np.asarray(f @ circ.detector_matrix()) % 2).astype(np.uint8)
    obs = (np.asarray(f @ circ.observable_matrix()) % 2).astype(np.uint8) ^ virtual_flips
    return det, obs
