import numpy as np
import pytest

from floquetlab.pauli import PauliOperator

MATS = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def dense(p: PauliOperator) -> np.ndarray:
    m = np.array([[1]], dtype=complex)
    for q in range(p.n):
        m = np.kron(m, MATS[p.letter(q)])
    return (1j) ** p.phase * m


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
