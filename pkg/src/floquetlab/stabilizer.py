"""Instantaneous stabilizer groups under Pauli measurements.

The state is always the maximally mixed state on the subspace fixed by the
group, so a group of rank ``k`` on ``n`` qubits describes a ``2**(n-k)``
dimensional code space.  Only the group is tracked; there are no destabilizers.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import gf2
from .pauli import DimensionError, PauliOperator, commutes, multiply, symplectic_to_pauli


class Membership(enum.Enum):
    PLUS = "plus"
    MINUS = "minus"
    # bit pattern is in the group but the query differs from the element by +-i;
    # only possible for non-Hermitian queries
    PHASE_MISMATCH = "up-to-sign-absent"
    ABSENT = "absent"


@dataclass(frozen=True)
class MeasurementOutcome:
    value: int
    deterministic: bool
    case: str  # "a", "b" or "c"

    @property
    def bit(self) -> int:
        return 0 if self.value == 1 else 1


class StabilizerGroup:
    def __init__(self, n: int, generators: Iterable[PauliOperator] = ()):
        self.n = n
        self.generators: list[PauliOperator] = []
        self._echelon: gf2.Echelon | None = None
        for g in generators:
            if g.n != n:
                raise DimensionError("generator has wrong qubit count")
            if not g.is_hermitian:
                raise ValueError("generators must be Hermitian")
            if any(commutes(g, h) for h in self.generators):
                raise ValueError("generators must commute")
            if self.contains(g) is not Membership.ABSENT:
                raise ValueError("generators must be independent")
            self.generators.append(g)
            self._echelon = None

    def copy(self) -> "StabilizerGroup":
        out = StabilizerGroup(self.n)
        out.generators = list(self.generators)
        out._echelon = self._echelon
        return out

    def __len__(self) -> int:
        return len(self.generators)

    @property
    def rank(self) -> int:
        return len(self.generators)

    # -- membership ---------------------------------------------------------

    def _ech(self) -> gf2.Echelon:
        if self._echelon is None:
            ech = gf2.Echelon()
            for i, g in enumerate(self.generators):
                ech.add(g.symplectic(), 1 << i)
            self._echelon = ech
        return self._echelon

    def decompose(self, p: PauliOperator) -> list[int] | None:
        """Indices of generators whose product equals ``p`` up to phase, or None."""
        if p.n != self.n:
            raise DimensionError("qubit counts differ")
        res, combo = self._ech().reduce(p.symplectic())
        return None if res else gf2.bits(combo)

    def element(self, indices: Sequence[int]) -> PauliOperator:
        out = PauliOperator(self.n)
        for i in indices:
            out = multiply(out, self.generators[i])
        return out

    def contains(self, p: PauliOperator) -> Membership:
        idx = self.decompose(p)
        if idx is None:
            return Membership.ABSENT
        diff = (self.element(idx).phase - p.phase) % 4
        return {0: Membership.PLUS, 2: Membership.MINUS}.get(diff, Membership.PHASE_MISMATCH)

    def contains_up_to_sign(self, p: PauliOperator) -> bool:
        return self.decompose(p) is not None

    def is_subgroup_of(self, other: "StabilizerGroup", signed: bool = False) -> bool:
        for g in self.generators:
            m = other.contains(g)
            if m is Membership.ABSENT or (signed and m is not Membership.PLUS):
                return False
        return True

    def equals(self, other: "StabilizerGroup", signed: bool = False) -> bool:
        return (
            self.rank == other.rank
            and self.is_subgroup_of(other, signed)
            and other.is_subgroup_of(self, signed)
        )

    # -- dynamics -----------------------------------------------------------

    def measure(
        self,
        p: PauliOperator,
        rng: np.random.Generator | None = None,
        forced: int | None = None,
    ) -> MeasurementOutcome:
        """Measure Hermitian ``p`` in place.

        Random outcomes come from ``rng``; ``forced=+1/-1`` postselects instead
        (ignored when the outcome is deterministic).
        """
        if p.n != self.n:
            raise DimensionError("qubit counts differ")
        if not p.is_hermitian:
            raise ValueError("can only measure Hermitian operators")
        anti = [i for i, g in enumerate(self.generators) if commutes(g, p)]
        if not anti:
            m = self.contains(p)
            if m is Membership.PLUS:
                return MeasurementOutcome(1, True, "a")
            if m is Membership.MINUS:
                return MeasurementOutcome(-1, True, "a")
            value = self._draw(rng, forced)
            self.generators.append(p if value == 1 else -p)
            self._echelon = None
            return MeasurementOutcome(value, False, "b")
        value = self._draw(rng, forced)
        pivot = anti[0]
        q = self.generators[pivot]
        for i in anti[1:]:
            self.generators[i] = multiply(self.generators[i], q)
        self.generators[pivot] = p if value == 1 else -p
        self._echelon = None
        return MeasurementOutcome(value, False, "c")

    @staticmethod
    def _draw(rng, forced) -> int:
        if forced is not None:
            if forced not in (1, -1):
                raise ValueError("forced outcome must be +1 or -1")
            return forced
        if rng is None:
            raise ValueError("random outcome requires an rng")
        return 1 if rng.integers(2) == 0 else -1

    def apply_pauli(self, e: PauliOperator) -> None:
        """Conjugate the state by a Pauli error: anticommuting generators flip sign."""
        # the echelon cache is sign-free and stays valid
        for i, g in enumerate(self.generators):
            if commutes(g, e):
                self.generators[i] = -g

    def conjugate(self, images) -> "StabilizerGroup":
        from .pauli import conjugate

        out = StabilizerGroup(self.n)
        out.generators = [conjugate(g, images) for g in self.generators]
        return out

    # -- structure ----------------------------------------------------------

    def is_valid(self) -> bool:
        gens = self.generators
        for i, g in enumerate(gens):
            if not g.is_hermitian:
                return False
            for h in gens[:i]:
                if commutes(g, h):
                    return False
        if gf2.rank([g.symplectic() for g in gens]) != len(gens):
            return False
        return self.contains(-PauliOperator(self.n)) is not Membership.PLUS

    def dump(self) -> str:
        return "\n".join(str(g) for g in self.generators) + ("\n" if self.generators else "")

    @classmethod
    def load_text(cls, text: str) -> "StabilizerGroup":
        lines = [ln for ln in text.splitlines() if ln.strip()]
        if not lines:
            raise ValueError("empty dump; qubit count unknown")
        ops = [PauliOperator.from_label(ln) for ln in lines]
        return cls(ops[0].n, ops)

    def centralizer(self) -> list[PauliOperator]:
        """Basis of all Paulis commuting with the group (unsigned)."""
        n = self.n
        rows = []
        for j in range(2 * n):
            unit = symplectic_to_pauli(1 << j, n)
            pattern = 0
            for i, g in enumerate(self.generators):
                if commutes(unit, g):
                    pattern |= 1 << i
            rows.append(pattern)
        # a nullspace mask selects unit vectors, so it is the symplectic vector itself
        return [symplectic_to_pauli(m, n) for m in gf2.nullspace(rows)]


def measure(group: StabilizerGroup, p: PauliOperator, rng=None, forced=None):
    """Functional form: returns ``(outcome, new_group)`` leaving ``group`` untouched."""
    g = group.copy()
    out = g.measure(p, rng, forced)
    return out, g


def contains(group: StabilizerGroup, p: PauliOperator) -> Membership:
    return group.contains(p)


def rank(group: StabilizerGroup) -> int:
    return group.rank


def symplectic_form(a: int, b: int, n: int) -> int:
    mask = (1 << n) - 1
    return bin(((a & mask) & (b >> n)) ^ ((a >> n) & (b & mask))).count("1") & 1


def logical_operator_basis(group: StabilizerGroup) -> list[tuple[PauliOperator, PauliOperator]]:
    """Symplectic pairs spanning the centralizer modulo the group."""
    n = group.n
    ech = gf2.Echelon()
    for g in group.generators:
        ech.add(g.symplectic(), 0)
    reps = []
    for c in group.centralizer():
        v = c.symplectic()
        res, _ = ech.reduce(v)
        if res and ech.add(v, 0):
            reps.append(v)
    pairs = []
    while reps:
        a = reps.pop(0)
        j = next((k for k, b in enumerate(reps) if symplectic_form(a, b, n)), None)
        if j is None:
            raise RuntimeError("centralizer quotient is degenerate")
        b = reps.pop(j)
        new = []
        for c in reps:
            if symplectic_form(c, b, n):
                c ^= a
            if symplectic_form(c, a, n):
                c ^= b
            new.append(c)
        reps = new
        pairs.append((symplectic_to_pauli(a, n), symplectic_to_pauli(b, n)))
    return pairs
