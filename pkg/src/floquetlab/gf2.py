"""Linear algebra over GF(2) with rows stored as Python integers."""

from __future__ import annotations

from typing import Sequence


class Echelon:
    """Incremental row-echelon form that remembers which input rows built each pivot row."""

    def __init__(self):
        self.pivots: dict[int, tuple[int, int]] = {}  # pivot bit -> (row, combination mask)

    def reduce(self, v: int) -> tuple[int, int]:
        """Return ``(residual, combination)`` with ``v == residual ^ XOR(rows in combination)``."""
        combo = 0
        while v:
            top = v.bit_length() - 1
            hit = self.pivots.get(top)
            if hit is None:
                break
            v ^= hit[0]
            combo ^= hit[1]
        # finish reducing lower bits so the residual is canonical
        res, rest = 0, v
        while rest:
            top = rest.bit_length() - 1
            hit = self.pivots.get(top)
            if hit is None:
                res |= 1 << top
                rest ^= 1 << top
            else:
                rest ^= hit[0]
                combo ^= hit[1]
        return res, combo

    def add(self, v: int, label: int) -> bool:
        """Insert row ``v`` tagged by combination mask ``label``; False if dependent."""
        combo = label
        while v:
            top = v.bit_length() - 1
            hit = self.pivots.get(top)
            if hit is None:
                self.pivots[top] = (v, combo)
                return True
            v ^= hit[0]
            combo ^= hit[1]
        return False

    def __len__(self) -> int:
        return len(self.pivots)


def rank(rows: Sequence[int]) -> int:
    ech = Echelon()
    return sum(ech.add(r, 0) for r in rows)


def solve(rows: Sequence[int], target: int) -> int | None:
    """Mask ``m`` with XOR of ``rows[i]`` for set bits ``i`` equal to ``target``, or None."""
    ech = Echelon()
    for i, r in enumerate(rows):
        ech.add(r, 1 << i)
    res, combo = ech.reduce(target)
    return None if res else combo


def nullspace(rows: Sequence[int]) -> list[int]:
    """Basis of masks ``m`` whose selected rows XOR to zero."""
    ech = Echelon()
    out = []
    for i, r in enumerate(rows):
        res, combo = ech.reduce(r)
        if res == 0:
            out.append(combo ^ (1 << i))
        else:
            ech.add(r, 1 << i)
    return out


def bits(mask: int) -> list[int]:
    out, j = [], 0
    while mask:
        if mask & 1:
            out.append(j)
        mask >>= 1
        j += 1
    return out
