import numpy as np
import pytest

from floquetlab.honeycomb import (
    build_logicals,
    classify,
    disentangle,
    evolve_outer,
    expected_isg,
    fermion_exchange_phase,
    in_span,
    inner_logicals,
    isg_generators,
    no_long_loops,
    random_star_paths,
    round_edges,
    run_schedule,
    subsystem_counts,
    truncated_outer,
)
from floquetlab.lattice import build_honeycomb
from floquetlab.pauli import commutes


@pytest.fixture(scope="module")
def lat33():
    return build_honeycomb(3, 3)


def test_subsystem_counts(lat33):
    assert subsystem_counts(lat33) == (26, 10, 8, 0)


def test_round_edges_cover_each_label_once(lat33):
    seen = []
    for r in range(3):
        es = round_edges(lat33, r)
        assert all(lat33.edges[e].label == r for e in es)
        seen += es
    assert sorted(seen) == list(range(len(lat33.edges)))
    with pytest.raises(ValueError):
        round_edges(lat33, 0, "bogus")


@pytest.mark.parametrize("size", [(3, 3), (3, 6)])
@pytest.mark.parametrize("seed", [0, 1])
def test_isg_matches_expected(size, seed):
    lat = build_honeycomb(*size)
    run = run_schedule(lat, 10, np.random.default_rng(seed))
    n_p = len(lat.plaquettes)
    for r, g in enumerate(run.groups):
        assert g.is_valid()
        assert g.equals(expected_isg(lat, r))
        if r >= 3:
            assert g.rank == 2 * n_p - 2
        assert no_long_loops(g, lat) == 1


def test_letter_schedule_leaks_inner_logical(lat33):
    run = run_schedule(lat33, 6, np.random.default_rng(3), "letter")
    assert any(no_long_loops(g, lat33) == 0 for g in run.groups)


def test_plaquette_values_are_stable(lat33):
    """Plaquette eigenvalue inferred from the outcomes is the same in every period."""
    run = run_schedule(lat33, 15, np.random.default_rng(7))

    def inferred(p, r0):
        # checks of the two labels on the plaquette's boundary, measured in rounds r0, r0+1
        val = 1
        for r in (r0, r0 + 1):
            for e in lat33.plaquettes[p].edges:
                if e in run.outcomes[r]:
                    val *= run.outcomes[r][e]
        return val

    for p in lat33.plaquettes:
        a = p.label
        r0s = [r for r in range(1, 14) if {r % 3, (r + 1) % 3} == {(a + 1) % 3, (a + 2) % 3}]
        vals = {inferred(p.index, r0) for r0 in r0s}
        assert len(vals) == 1


def test_disentangle_weights(lat33):
    g = run_schedule(lat33, 4, np.random.default_rng(0)).groups[3]
    dis = disentangle(g, lat33, 3)
    assert sorted(set(dis.weights)) == [1, 3, 6]
    with pytest.raises(ValueError):
        disentangle(g, lat33, 2)


@pytest.mark.parametrize("r", [3, 4, 5])
def test_logicals_pair_and_commute_with_isg(lat33, r):
    L = build_logicals(lat33, r)
    gens = isg_generators(lat33, r)
    for k in range(2):
        assert commutes(L.outer[k], L.inner[k]) == 1
        assert commutes(L.outer[k], L.inner[1 - k]) == 0
        assert all(commutes(L.outer[k], s) == 0 for s in gens)
        assert not in_span(gens, L.outer[k])
    for q in inner_logicals(lat33):
        assert all(commutes(q, c) == 0 for c in lat33.checks)


def test_outer_evolution(lat33):
    q = build_logicals(lat33, 3).outer[0]
    kinds = []
    for r in range(3, 12):
        q2, used = evolve_outer(lat33, q, r)
        assert all(commutes(q2, lat33.checks[e]) == 0 for e in round_edges(lat33, r + 1))
        assert all(lat33.edges[e].label == r % 3 for e in used)
        kinds.append(classify(lat33, q2, r + 1))
        q = q2
    assert set(kinds) == {"electric", "magnetic"}
    assert all(a != b for a, b in zip(kinds, kinds[1:]))


def test_period_six_recurrence(lat33):
    q = build_logicals(lat33, 3).outer[0]
    reps = [q]
    for r in range(3, 9):
        q, _ = evolve_outer(lat33, q, r)
        reps.append(q)
    assert in_span(isg_generators(lat33, 9), reps[6] * reps[0])
    # after one period the representative differs by the inner logical
    assert not in_span(isg_generators(lat33, 6), reps[3] * reps[0])


def test_truncated_outer_has_two_endpoints(lat33):
    t = truncated_outer(lat33, 3, 3)
    hits = [p for p in range(len(lat33.plaquettes)) if not t.commutes_with(lat33.plaquette_operator(p))]
    assert len(hits) == 2


def test_fermion_exchange_phase(lat33):
    rng = np.random.default_rng(11)
    for _ in range(20):
        assert fermion_exchange_phase(lat33, random_star_paths(lat33, rng)) == -1
