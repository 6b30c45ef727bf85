"""Signed multi-qubit Pauli operators in the binary symplectic representation.

An operator is ``i**phase`` times a tensor product of single-qubit Paulis,
where qubit ``j`` carries X if only bit ``j`` of ``x`` is set, Z if only bit
``j`` of ``z`` is set and Y if both are set.  Bit vectors are Python integers,
so every operation is word-parallel.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

_LETTERS = "IXZY"  # indexed by x + 2*z


class DimensionError(ValueError):
    """Raised when operators on different numbers of qubits are combined."""


def _popcount(v: int) -> int:
    return bin(v).count("1")


@dataclass(frozen=True)
class PauliOperator:
    n: int
    x: int = 0
    z: int = 0
    phase: int = 0

    def __post_init__(self):
        mask = (1 << self.n) - 1
        if self.x & ~mask or self.z & ~mask:
            raise ValueError("bit vector exceeds qubit count")
        object.__setattr__(self, "phase", self.phase % 4)

    # -- constructors -------------------------------------------------------

    @classmethod
    def identity(cls, n: int) -> "PauliOperator":
        return cls(n)

    @classmethod
    def from_label(cls, label: str) -> "PauliOperator":
        """Parse text such as ``"+XIZY"``, ``"-ZZ"`` or ``"+iXY"``."""
        phase = 0
        s = label.strip()
        if s.startswith("-"):
            phase, s = 2, s[1:]
        elif s.startswith("+"):
            s = s[1:]
        if s.startswith("i"):
            phase, s = phase + 1, s[1:]
        x = z = 0
        for j, c in enumerate(s):
            if c not in "IXYZ":
                raise ValueError(f"bad Pauli letter {c!r}")
            if c in "XY":
                x |= 1 << j
            if c in "ZY":
                z |= 1 << j
        return cls(len(s), x, z, phase)

    @classmethod
    def single(cls, n: int, qubit: int, letter: str) -> "PauliOperator":
        return cls.on(n, {qubit: letter})

    @classmethod
    def on(cls, n: int, letters: dict[int, str] | Iterable[tuple[int, str]]) -> "PauliOperator":
        """Hermitian operator with the given letter on each listed qubit."""
        items = letters.items() if isinstance(letters, dict) else letters
        x = z = 0
        for q, c in items:
            c = c.upper()
            if c in "XY":
                x ^= 1 << q
            if c in "ZY":
                z ^= 1 << q
        return cls(n, x, z, 0)

    # -- queries ------------------------------------------------------------

    @property
    def sign(self) -> int:
        """+1 or -1 for Hermitian operators."""
        if self.phase % 2:
            raise ValueError("operator is not Hermitian")
        return 1 if self.phase == 0 else -1

    @property
    def is_hermitian(self) -> bool:
        return self.phase % 2 == 0

    @property
    def is_identity(self) -> bool:
        return self.x == 0 and self.z == 0

    @property
    def support(self) -> int:
        return self.x | self.z

    def weight(self) -> int:
        return _popcount(self.x | self.z)

    def letter(self, qubit: int) -> str:
        return _LETTERS[((self.x >> qubit) & 1) + 2 * ((self.z >> qubit) & 1)]

    def qubits(self) -> list[int]:
        s, out, j = self.x | self.z, [], 0
        while s:
            if s & 1:
                out.append(j)
            s >>= 1
            j += 1
        return out

    def unsigned(self) -> "PauliOperator":
        return PauliOperator(self.n, self.x, self.z, 0)

    def symplectic(self) -> int:
        """Packed ``x | z << n`` vector used for linear algebra."""
        return self.x | (self.z << self.n)

    def __str__(self) -> str:
        head = {0: "+", 1: "+i", 2: "-", 3: "-i"}[self.phase]
        return head + "".join(self.letter(j) for j in range(self.n))

    def __repr__(self) -> str:
        return f"PauliOperator({str(self)!r})"

    # -- algebra ------------------------------------------------------------

    def __mul__(self, other: "PauliOperator") -> "PauliOperator":
        return multiply(self, other)

    def __neg__(self) -> "PauliOperator":
        return PauliOperator(self.n, self.x, self.z, self.phase + 2)

    def adjoint(self) -> "PauliOperator":
        return PauliOperator(self.n, self.x, self.z, -self.phase)

    def commutes_with(self, other: "PauliOperator") -> bool:
        return commutes(self, other) == 0


def _check(a: PauliOperator, b: PauliOperator) -> None:
    if a.n != b.n:
        raise DimensionError(f"qubit counts differ: {a.n} vs {b.n}")


def multiply(a: PauliOperator, b: PauliOperator) -> PauliOperator:
    """Group product ``a * b`` with exact phase."""
    _check(a, b)
    ax, az, bx, bz = a.x, a.z, b.x, b.z
    a_x, a_y, a_z = ax & ~az, ax & az, az & ~ax
    b_x, b_y, b_z = bx & ~bz, bx & bz, bz & ~bx
    # XY = iZ, YZ = iX, ZX = iY and the reversed orders give -i
    plus = (a_x & b_y) | (a_y & b_z) | (a_z & b_x)
    minus = (a_y & b_x) | (a_z & b_y) | (a_x & b_z)
    phase = a.phase + b.phase + _popcount(plus) - _popcount(minus)
    return PauliOperator(a.n, ax ^ bx, az ^ bz, phase)


def commutes(a: PauliOperator, b: PauliOperator) -> int:
    """Symplectic form: 0 when ``a`` and ``b`` commute, 1 otherwise."""
    _check(a, b)
    return _popcount((a.x & b.z) ^ (a.z & b.x)) & 1


def weight(a: PauliOperator) -> int:
    return a.weight()


def product(ops: Sequence[PauliOperator], n: int | None = None) -> PauliOperator:
    """Ordered product ``ops[0] * ops[1] * ...``."""
    if not ops:
        if n is None:
            raise ValueError("empty product needs n")
        return PauliOperator(n)
    out = ops[0]
    for p in ops[1:]:
        out = multiply(out, p)
    return out


def symplectic_to_pauli(v: int, n: int) -> PauliOperator:
    mask = (1 << n) - 1
    return PauliOperator(n, v & mask, (v >> n) & mask, 0)


def conjugate(p: PauliOperator, images: dict[tuple[int, str], PauliOperator]) -> PauliOperator:
    """Conjugate ``p`` by a Clifford given through the images of single-qubit X and Z.

    ``images`` maps ``(qubit, "X")`` and ``(qubit, "Z")`` to their images; qubits
    without an entry are left untouched.
    """
    touched = {q for q, _ in images}
    out = PauliOperator(p.n, 0, 0, p.phase)
    for q in p.qubits():
        c = p.letter(q)
        if q not in touched:
            factor = PauliOperator.single(p.n, q, c)
        elif c == "X":
            factor = images[(q, "X")]
        elif c == "Z":
            factor = images[(q, "Z")]
        else:  # Y = i X Z
            xz = multiply(images[(q, "X")], images[(q, "Z")])
            factor = PauliOperator(xz.n, xz.x, xz.z, xz.phase + 1)
        out = multiply(out, factor)
    return out


def cnot_images(n: int, control: int, target: int) -> dict[tuple[int, str], PauliOperator]:
    return {
        (control, "X"): PauliOperator.on(n, {control: "X", target: "X"}),
        (control, "Z"): PauliOperator.single(n, control, "Z"),
        (target, "X"): PauliOperator.single(n, target, "X"),
        (target, "Z"): PauliOperator.on(n, {control: "Z", target: "Z"}),
    }


def cy_images(n: int, control: int, target: int) -> dict[tuple[int, str], PauliOperator]:
    return {
        (control, "X"): PauliOperator.on(n, {control: "X", target: "Y"}),
        (control, "Z"): PauliOperator.single(n, control, "Z"),
        (target, "X"): PauliOperator.on(n, {control: "Z", target: "X"}),
        (target, "Z"): PauliOperator.on(n, {control: "Z", target: "Z"}),
    }
