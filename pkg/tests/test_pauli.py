import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from floquetlab.pauli import (
    DimensionError,
    PauliOperator,
    cnot_images,
    commutes,
    conjugate,
    cy_images,
    multiply,
    product,
    symplectic_to_pauli,
)

I2 = np.eye(2, dtype=complex)
MATS = {
    "I": I2,
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def dense(p: PauliOperator) -> np.ndarray:
    """Oracle: explicit 2^n x 2^n matrix, qubit 0 as the leftmost tensor factor."""
    m = np.array([[1]], dtype=complex)
    for q in range(p.n):
        m = np.kron(m, MATS[p.letter(q)])
    return (1j) ** p.phase * m


def paulis(n):
    return st.builds(
        lambda x, z, ph: PauliOperator(n, x, z, ph),
        st.integers(0, 2**n - 1),
        st.integers(0, 2**n - 1),
        st.integers(0, 3),
    )


@pytest.mark.parametrize(
    "label,x,z,phase",
    [("+XIZY", 0b1001, 0b1100, 0), ("-ZZ", 0, 0b11, 2), ("+iXY", 0b11, 0b10, 1), ("I", 0, 0, 0)],
)
def test_from_label(label, x, z, phase):
    p = PauliOperator.from_label(label)
    assert (p.x, p.z, p.phase) == (x, z, phase)


def test_bad_label():
    with pytest.raises(ValueError):
        PauliOperator.from_label("XQ")


def test_single_letter_products():
    X, Y, Z = (PauliOperator.from_label(c) for c in "XYZ")
    assert multiply(X, Y) == PauliOperator(1, 0, 1, 1)  # iZ
    assert multiply(Y, X) == PauliOperator(1, 0, 1, 3)  # -iZ
    assert multiply(Y, Z).phase == 1 and multiply(Z, X).phase == 1


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 3).flatmap(lambda n: st.tuples(paulis(n), paulis(n))))
def test_multiply_matches_matrices(pair):
    a, b = pair
    assert np.allclose(dense(multiply(a, b)), dense(a) @ dense(b))


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 3).flatmap(lambda n: st.tuples(paulis(n), paulis(n))))
def test_commutation_matches_matrices(pair):
    a, b = pair
    A, B = dense(a), dense(b)
    assert commutes(a, b) == (0 if np.allclose(A @ B, B @ A) else 1)
    assert a.commutes_with(b) == (commutes(a, b) == 0)


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 4).flatmap(lambda n: st.tuples(paulis(n), paulis(n), paulis(n))))
def test_associative(t):
    a, b, c = t
    assert multiply(multiply(a, b), c) == multiply(a, multiply(b, c))


def test_dimension_mismatch():
    with pytest.raises(DimensionError):
        multiply(PauliOperator(2), PauliOperator(3))


def test_hermitian_and_weight():
    p = PauliOperator.on(4, {0: "X", 2: "Y"})
    assert p.is_hermitian and p.weight() == 2 and p.qubits() == [0, 2]
    assert not PauliOperator(1, 1, 0, 1).is_hermitian
    assert symplectic_to_pauli(p.symplectic(), 4) == p


def test_product_of_empty_needs_n():
    assert product([], 3).is_identity
    with pytest.raises(ValueError):
        product([])


def _cnot_matrix(n, c, t):
    dim = 2**n
    U = np.zeros((dim, dim))
    for i in range(dim):
        bits = [(i >> (n - 1 - q)) & 1 for q in range(n)]
        if bits[c]:
            bits[t] ^= 1
        j = sum(b << (n - 1 - q) for q, b in enumerate(bits))
        U[j, i] = 1
    return U


def _cy_matrix(n, c, t):
    P0 = np.diag([1, 0]).astype(complex)
    P1 = np.diag([0, 1]).astype(complex)
    a = [I2] * n
    b = [I2] * n
    a[c] = P0
    b[c] = P1
    b[t] = MATS["Y"]

    def kron(ms):
        m = np.array([[1]], dtype=complex)
        for x in ms:
            m = np.kron(m, x)
        return m

    return kron(a) + kron(b)


@settings(max_examples=100, deadline=None)
@given(paulis(3), st.sampled_from([(0, 1), (1, 0), (2, 0), (1, 2)]))
def test_cnot_and_cy_conjugation(p, ct):
    c, t = ct
    U = _cnot_matrix(3, c, t)
    assert np.allclose(dense(conjugate(p, cnot_images(3, c, t))), U @ dense(p) @ U.conj().T)
    V = _cy_matrix(3, c, t)
    assert np.allclose(dense(conjugate(p, cy_images(3, c, t))), V @ dense(p) @ V.conj().T)
