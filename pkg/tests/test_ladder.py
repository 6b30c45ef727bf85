import numpy as np
import pytest

from floquetlab.ladder import (
    SCHEDULE_3,
    SCHEDULE_4,
    LadderDecoder,
    check_error,
    decode_ladder,
    fault_events,
    inject_check_error,
    inject_measurement_error,
    ladder_circuit,
    ladder_failure_rate,
    ladder_inner,
    ladder_noise,
    ladder_outer,
    measurement_error,
    run_ladder,
)
from floquetlab.lattice import build_ladder
from floquetlab.noise import FaultLocation, FaultSample, apply, sample_many, sampled_events
from floquetlab.pauli import PauliOperator, commutes


@pytest.fixture(scope="module")
def exp8():
    return ladder_circuit(8, 22)


@pytest.mark.parametrize("L", [4, 6])
def test_four_round_schedule_keeps_a_logical_qubit(L):
    lat = build_ladder(L)
    groups, _ = run_ladder(L, 4 * L, np.random.default_rng(L))
    assert [g.rank for g in groups[3:]] == [2 * L - 1] * (len(groups) - 3)
    inner = ladder_inner(lat)
    assert not any(g.contains_up_to_sign(inner) for g in groups)
    for g in groups[3:]:
        assert all(g.contains_up_to_sign(lat.plaquette_operator(p)) for p in range(L))


def test_three_round_schedule_measures_the_inner_logical():
    lat = build_ladder(6)
    groups, _ = run_ladder(6, 12, np.random.default_rng(0), SCHEDULE_3)
    assert groups[-1].contains_up_to_sign(ladder_inner(lat))
    assert groups[-1].rank == 12


def test_logical_pair():
    lat = build_ladder(6)
    inner = ladder_inner(lat)
    assert all(commutes(inner, c) == 0 for c in lat.checks)
    for k in range(lat.L):
        out = ladder_outer(lat, k)
        assert commutes(out, inner) == 1
        # the YY outer on a rung commutes with the rung check
        assert commutes(out, lat.checks[lat.rung(k)]) == 0


def test_circuit_shape(exp8):
    assert len(exp8.circ.observables) == 8
    assert len(exp8.circ.detectors) == 100
    assert len(exp8.slices) == 100
    assert max(exp8.slices) == 22


@pytest.mark.parametrize("R", [20, 21, 23, 2])
def test_circuit_rejects_bad_round_counts(R):
    with pytest.raises(ValueError):
        ladder_circuit(8, R)


def test_check_error_gives_two_events_in_one_slice(exp8):
    lat = exp8.lat
    for k in range(lat.L):
        slot = 1 if lat.link_letter(k) == "y" else 3
        sites, flips = inject_check_error(exp8, k, slot + 8)
        assert len(sites) == 2
        assert sites[0][1] == sites[1][1]
        # the leg touches rungs k and k+1 only
        assert set(np.flatnonzero(flips).tolist()) <= {k, (k + 1) % lat.L}


def test_measurement_flip_gives_time_adjacent_events(exp8):
    for k in range(8):
        for r in (4, 10, 18):
            sites, _ = inject_measurement_error(exp8, k, r)
            assert len(sites) == 2
            assert {s[0] for s in sites} <= {(k - 1) % 8, k}
            assert abs(sites[0][1] - sites[1][1]) == 1
    with pytest.raises(ValueError):
        measurement_error(exp8, 0, 1)


def test_no_undetected_harmful_single_qubit_faults(exp8):
    n = exp8.lat.n_qubits
    locs = [FaultLocation(None, s, "op", operator=PauliOperator.single(n, q, c)) for s in range(-1, 21) for q in range(n) for c in "XYZ"]
    for loc in locs:
        sites, flips = fault_events(exp8, [loc])
        assert sites or not flips.any()


def test_frame_matches_engine(exp8, rng):
    locs = ladder_noise(exp8, 0.1, full=True)
    for _ in range(15):
        act = rng.random(len(locs)) < 0.05
        fs = FaultSample(locs, act)
        d1, o1 = apply(fs, exp8.circ, "frame")
        d2, o2 = apply(fs, exp8.circ, "engine", rng)
        assert np.array_equal(d1, d2) and np.array_equal(o1, o2)


def test_noise_model(exp8):
    locs = ladder_noise(exp8, 0.02)
    kinds = {l.pauli_type for l in locs}
    assert kinds == {"check", "flip"}
    assert all(l.p == 0.02 for l in locs)
    assert len(ladder_noise(exp8, 0.02, full=True)) > len(locs)
    with pytest.raises(ValueError):
        ladder_noise(exp8, 1.5)


def test_decoder_corrects_single_faults(exp8):
    dec = LadderDecoder(exp8, ladder_noise(exp8, 0.01))
    for row, o in zip(dec.det_sig, dec.obs_sig):
        res = decode_ladder(dec, row, o)
        assert not res["homology_error"]
        assert not res["logical_error"]


def test_majority_vote_tolerates_minority_errors(exp8):
    dec = LadderDecoder(exp8, ladder_noise(exp8, 0.01))
    events = np.zeros(len(exp8.circ.detectors), dtype=np.uint8)
    flips = np.zeros(8, dtype=np.uint8)
    flips[:3] = 1
    res = dec.decode(events, flips)
    assert res["homology_error"] and not res["logical_error"]
    flips[:4] = 1  # a tie counts as failure
    assert dec.decode(events, flips)["logical_error"]


def test_failure_rate_zero_noise(rng):
    assert ladder_failure_rate(4, 0.0, 50, rng) == 0


def test_failure_rate_grows_with_p():
    a = ladder_failure_rate(4, 0.01, 400, np.random.default_rng(0))
    b = ladder_failure_rate(4, 0.1, 400, np.random.default_rng(0))
    assert a < b
