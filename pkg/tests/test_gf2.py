import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from floquetlab import gf2

rows_st = st.lists(st.integers(0, 2**10 - 1), min_size=0, max_size=12)


def dense_rank(rows, width=10):
    """Oracle: Gaussian elimination on a numpy 0/1 matrix."""
    if not rows:
        return 0
    m = np.array([[(r >> j) & 1 for j in range(width)] for r in rows], dtype=np.uint8)
    rank = 0
    for col in range(width):
        piv = next((i for i in range(rank, len(m)) if m[i, col]), None)
        if piv is None:
            continue
        m[[rank, piv]] = m[[piv, rank]]
        for i in range(len(m)):
            if i != rank and m[i, col]:
                m[i] ^= m[rank]
        rank += 1
    return rank


@settings(max_examples=200, deadline=None)
@given(rows_st)
def test_rank_matches_dense(rows):
    assert gf2.rank(rows) == dense_rank(rows)


@settings(max_examples=200, deadline=None)
@given(rows_st, st.integers(0, 2**10 - 1))
def test_solve(rows, target):
    m = gf2.solve(rows, target)
    in_span = dense_rank(rows + [target]) == dense_rank(rows)
    assert (m is not None) == in_span
    if m is not None:
        acc = 0
        for i in gf2.bits(m):
            acc ^= rows[i]
        assert acc == target


@settings(max_examples=200, deadline=None)
@given(rows_st)
def test_nullspace(rows):
    basis = gf2.nullspace(rows)
    assert len(basis) == len(rows) - dense_rank(rows)
    for m in basis:
        acc = 0
        for i in gf2.bits(m):
            acc ^= rows[i]
        assert acc == 0
    assert gf2.rank(basis) == len(basis)


def test_bits():
    assert gf2.bits(0b101001) == [0, 3, 5]
    assert gf2.bits(0) == []
