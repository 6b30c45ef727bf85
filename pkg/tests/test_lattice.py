import itertools
from collections import Counter

import networkx as nx
import pytest

from floquetlab.lattice import (
    LADDER_RUNG,
    LADDER_XX,
    LADDER_YY,
    ColoringError,
    build_honeycomb,
    build_ladder,
    chain_to_cycle_order,
    cycle_basis,
    nontrivial_cycles,
)
from floquetlab.pauli import commutes

SIZES = [(3, 3), (3, 6), (6, 3), (6, 6)]


@pytest.mark.parametrize("size", SIZES)
def test_trivalent_with_one_letter_and_label_each(size):
    lat = build_honeycomb(*size)
    assert lat.n_qubits == 2 * size[0] * size[1]
    assert len(lat.edges) == 3 * size[0] * size[1]
    for q in range(lat.n_qubits):
        inc = [lat.edges[e] for e in lat.incident[q]]
        assert len(inc) == 3
        assert sorted(e.letter for e in inc) == ["x", "y", "z"]
        assert sorted(e.label for e in inc) == [0, 1, 2]


@pytest.mark.parametrize("size", SIZES)
def test_plaquette_coloring(size):
    lat = build_honeycomb(*size)
    # every edge borders exactly two plaquettes whose labels differ from each other and from the edge
    owners = {e: [] for e in range(len(lat.edges))}
    for p in lat.plaquettes:
        assert len(p.edges) == 6 and len(set(p.vertices)) == 6
        for e in p.edges:
            owners[e].append(p.label)
    for e, labels in owners.items():
        assert len(labels) == 2
        assert len({lat.edges[e].label, *labels}) == 3
    assert Counter(p.label for p in lat.plaquettes) == {a: len(lat.plaquettes) // 3 for a in range(3)}


@pytest.mark.parametrize("size", [(2, 2), (4, 4), (3, 4), (2, 3), (5, 5)])
def test_uncolorable_tori_rejected(size):
    with pytest.raises(ColoringError):
        build_honeycomb(*size)


def test_too_small_periods_rejected():
    with pytest.raises(ValueError):
        build_honeycomb(1, 3)


@pytest.mark.parametrize("size", [(3, 3), (3, 6)])
def test_plaquettes_commute_with_all_checks(size):
    lat = build_honeycomb(*size)
    checks = lat.checks
    for p in range(len(lat.plaquettes)):
        P = lat.plaquette_operator(p)
        assert P.weight() == 6 and P.is_hermitian
        assert all(commutes(P, c) == 0 for c in checks)


def test_checks_anticommute_only_when_sharing_one_qubit():
    lat = build_honeycomb(3, 3)
    for a, b in itertools.combinations(range(len(lat.edges)), 2):
        shared = set(lat.edges[a].qubits) & set(lat.edges[b].qubits)
        assert commutes(lat.checks[a], lat.checks[b]) == (1 if len(shared) == 1 else 0)


@pytest.mark.parametrize("size,lengths", [((3, 3), [6, 6]), ((3, 6), [6, 12]), ((6, 6), [12, 12])])
def test_nontrivial_cycles(size, lengths):
    lat = build_honeycomb(*size)
    cycles = nontrivial_cycles(lat)
    assert [len(c) for c in cycles] == lengths
    for cyc, h in zip(cycles, [(1, 0), (0, 1)]):
        assert lat.boundary(cyc) == set()
        assert lat.homology_class(cyc) == h
        order = chain_to_cycle_order(lat, cyc, 0)
        assert sorted(order) == sorted(cyc)


def test_cycle_basis_spans_cycle_space():
    lat = build_honeycomb(3, 3)
    G = nx.MultiGraph()
    for e in lat.edges:
        G.add_edge(e.u, e.v)
    # cycle space dimension of a connected graph: E - V + 1
    dim = len(lat.edges) - lat.n_qubits + 1
    basis = cycle_basis(lat)
    vecs = [sum(1 << e for e in c) for c in basis.plaquette_cycles + basis.nontrivial]
    from floquetlab.gf2 import rank

    assert rank(vecs) == dim
    assert all(lat.homology_class(c) == (0, 0) for c in basis.plaquette_cycles)


def test_json_round_trip_fields():
    import json

    lat = build_honeycomb(3, 3)
    doc = json.loads(lat.to_json())
    assert doc["kind"] == "honeycomb_torus"
    assert len(doc["edges"]) == 27


@pytest.mark.parametrize("L", [4, 6, 8])
def test_ladder_structure(L):
    lad = build_ladder(L)
    assert lad.n_qubits == 2 * L
    labels = Counter(e.label for e in lad.edges)
    assert labels == {LADDER_RUNG: L, LADDER_XX: L, LADDER_YY: L}
    for q in range(lad.n_qubits):
        assert sorted(lad.edges[e].letter for e in lad.incident[q]) == ["x", "y", "z"]
    for k in range(L):
        assert {lad.top(k), lad.bottom(k)} == set(lad.edges[lad.rung(k)].qubits)
        for side in ("top", "bottom"):
            assert lad.edges[lad.leg(k, side)].letter == lad.link_letter(k)
    for p in range(L):
        P = lad.plaquette_operator(p)
        assert P.weight() == 4
        assert all(commutes(P, c) == 0 for c in lad.checks)


@pytest.mark.parametrize("L", [2, 3, 5])
def test_ladder_rejects_bad_L(L):
    with pytest.raises(ValueError):
        build_ladder(L)


@pytest.mark.parametrize("size", [(3, 3), (6, 6)])
def test_nontrivial_cycles_are_not_plaquette_sums(size):
    from floquetlab.gf2 import solve

    lat = build_honeycomb(*size)
    plaq = [sum(1 << e for e in p.edges) for p in lat.plaquettes]
    a, b = (sum(1 << e for e in c) for c in nontrivial_cycles(lat))
    for v in (a, b, a ^ b):
        assert solve(plaq, v) is None
