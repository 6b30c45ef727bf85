import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from floquetlab.dimer import (
    CycleGraph,
    DimerConfig,
    build_annulus,
    dimer_cycles,
    dimer_measure,
    dimer_trace,
    dimers_from_label,
    hexagon_example,
    measure_and_reveal,
    obstruction_demo,
    random_top_sequence,
    shortest_path,
    signed_winding,
    top_region,
    winding,
)


@pytest.mark.parametrize("Lx,H", [(4, 4), (6, 5), (12, 10), (8, 7)])
def test_annulus_three_edge_coloring(Lx, H):
    ann = build_annulus(Lx, H)
    assert ann.n == Lx * H
    for v in range(ann.n):
        assert sorted(ann.labels[e] for e in ann.incident[v]) == [0, 1, 2]
    sides = {s for s in ann.boundary_side if s}
    assert sides == {"bottom", "top"}
    assert all(ann.labels[e] == 0 for e in ann.edges_with_label(0, "bottom"))
    assert len(ann.edges_with_label(0, "bottom")) == Lx // 2


@pytest.mark.parametrize("Lx,H", [(3, 6), (2, 6), (6, 3)])
def test_annulus_rejects_bad_sizes(Lx, H):
    with pytest.raises(ValueError):
        build_annulus(Lx, H)


def test_cut_is_transversal():
    ann = build_annulus(8, 6)
    for x in range(8):
        cut = ann.cut(x)
        # one horizontal edge per row of matching parity plus boundary edges
        assert all(ann.coords(ann.edges[e][0])[1] == ann.coords(ann.edges[e][1])[1] for e in cut)
        assert len({ann.coords(ann.edges[e][0])[1] for e in cut}) == len(cut)
    assert sum(ann.crossing(e) for e in range(len(ann.edges))) == len(ann.cut(7))


def test_hexagon_example():
    assert hexagon_example() == [[(1, 2), (3, 4), (5, 6)], [(1, 4), (2, 3), (5, 6)], [(1, 6), (2, 3), (4, 5)]]


def test_measure_rule_paths():
    g = CycleGraph(4)
    cfg = DimerConfig([1, 0, 3, 2], {frozenset((0, 1)): frozenset({0}), frozenset((2, 3)): frozenset({2})})
    out = dimer_measure(cfg, g, g.edge_index(1, 2))
    assert out.dimers() == [(0, 3), (1, 2)]
    assert out.paths[frozenset((0, 3))] == frozenset({0, 1, 2})
    # measuring an existing dimer: nothing changes, the loop is revealed
    again, loop = measure_and_reveal(out, g, g.edge_index(0, 3), path=frozenset({3}))
    assert again.dimers() == out.dimers()
    assert loop == frozenset({0, 1, 2, 3})


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(0, 10**6), max_size=60), st.sampled_from([(4, 4), (6, 6), (8, 5)]))
def test_random_moves_keep_validity_and_winding(moves, size):
    ann = build_annulus(*size)
    cuts = [ann.cut(x) for x in range(ann.Lx)]
    cfg = dimers_from_label(ann, 0)
    w0 = [winding(cfg, c) for c in cuts]
    for m in moves:
        cfg = dimer_measure(cfg, ann, m % len(ann.edges))
        assert cfg.is_valid(ann)
        assert [winding(cfg, c) for c in cuts] == w0
        assert signed_winding(cfg, ann) % 2 == winding(cfg, cuts[0])


def test_shortest_path_and_cycles():
    ann = build_annulus(6, 6)
    a, b = ann.vid(0, 0), ann.vid(3, 2)
    p = shortest_path(ann, a, b)
    odd = set()
    for e in p:
        odd ^= set(ann.edges[e])
    assert odd == {a, b}
    cfg = dimers_from_label(ann, 0)
    cyc = dimer_cycles(cfg, ann, ann.cut(0), reference=cfg)
    assert all(c.edges == frozenset() and c.winding == 0 for c in cyc)


def test_naive_period():
    ann = build_annulus(12, 10)
    rep = obstruction_demo(ann)
    assert (rep.bottom_parity, rep.top_parity, rep.bulk_parity) == (1, 1, 0)
    assert rep.pairing_restored
    assert rep.forced
    two = obstruction_demo(ann, periods=2)
    assert (two.bottom_parity, two.top_parity) == (0, 0)


@pytest.mark.parametrize("cut_x", [0, 3, 7])
def test_result_independent_of_cut(cut_x):
    ann = build_annulus(12, 10)
    rep = obstruction_demo(ann, cut_x=cut_x)
    assert (rep.bottom_parity, rep.top_parity, rep.bulk_parity) == (1, 1, 0)


@pytest.mark.parametrize("seed", range(8))
def test_top_boundary_cannot_avoid_winding(seed):
    ann = build_annulus(12, 10)
    rng = np.random.default_rng(seed)
    seq = random_top_sequence(ann, rng, length=int(rng.integers(5, 80)))
    assert set(seq) <= top_region(ann)
    rep = obstruction_demo(ann, seq)
    assert rep.pairing_restored
    assert rep.bottom_parity == 1 and rep.top_parity == 1 and rep.bulk_parity == 0


def test_trace_records():
    ann = build_annulus(6, 6)
    recs = list(dimer_trace(ann, periods=1))
    assert [r["step"] for r in recs] == list(range(len(recs)))
    assert {r["round"] for r in recs} == {0, 1, 2}
    assert all(len(r["dimers"]) == ann.n // 2 for r in recs)
    assert any(r["revealed_winding"] == 1 for r in recs)
