import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from floquetlab.honeycomb import inner_logicals
from floquetlab.lattice import build_honeycomb
from floquetlab.memory import letter_at, memory_circuit, memory_noise, rounds_for
from floquetlab.noise import (
    FaultLocation,
    FaultSample,
    apply,
    canonicalize_fault,
    fault_signatures,
    restricted_locations,
    sample,
    sample_many,
    sampled_events,
)


@pytest.fixture(scope="module")
def setup():
    lat = build_honeycomb(3, 3)
    circ = memory_circuit(lat, 7)
    return lat, circ


def test_fault_location_keys():
    a = FaultLocation(2, 3, "X", 0.1)
    assert a.key == (2, 3, "X")
    assert a.pauli(4).letter(2) == "X" and a.pauli(4).weight() == 1
    f = FaultLocation(None, 0, "flip", outcome=5)
    assert f.key == ("flip", 5)


def test_fault_sample_mask_and_indices():
    locs = [FaultLocation(q, 0, "X") for q in range(4)]
    fs = FaultSample(locs, np.array([True, False, True, False]))
    assert fs.active.tolist() == [0, 2]
    assert [l.qubit for l in fs.activated] == [0, 2]
    assert FaultSample(locs, [3]).active.tolist() == [3]
    with pytest.raises(ValueError):
        FaultSample(locs, np.array([True, False]))


@pytest.mark.parametrize("p", [-0.1, 1.5])
def test_probability_validation(p):
    lat = build_honeycomb(3, 3)
    with pytest.raises(ValueError):
        restricted_locations(letter_at(lat), lat.n_qubits, [0], p)


def test_canonicalize_rules():
    # letters cycle X, Y, Z, X, ... on a single qubit
    la = lambda q, r: "XYZ"[r % 3]  # noqa: E731
    assert canonicalize_fault(la, 0, 0, "X") == [(0, 0, "X")]
    assert canonicalize_fault(la, 0, 0, "Y") == [(0, 1, "Y")]
    assert canonicalize_fault(la, 0, 0, "Z") == [(0, 0, "X"), (0, 1, "Y")]
    assert canonicalize_fault(la, 0, 0, "I") == []
    # a flipped round-1 outcome: the Pauli X before and after the Y check, rewritten
    assert sorted(canonicalize_fault(la, 0, 1, "flip")) == sorted([(0, 0, "X"), (0, 1, "Y"), (0, 2, "Z")])


def test_sample_rates(rng):
    locs = [FaultLocation(q, 0, "X", 0.2) for q in range(50)]
    act = sample_many(locs, rng, 4000)
    assert act.shape == (4000, 50)
    # binomial oracle: 200000 draws at p=0.2, std ~ 179
    assert abs(act.sum() - 40000) < 5 * np.sqrt(200000 * 0.2 * 0.8)
    fs = sample(locs, rng)
    assert all(0 <= i < 50 for i in fs.active)
    assert len(sample([FaultLocation(0, 0, "X", 0.0)] * 10, rng).active) == 0
    assert len(sample([FaultLocation(0, 0, "X", 1.0)] * 10, rng).active) == 10


def test_memory_noise_scenarios(setup):
    lat, circ = setup
    assert {l.round for l in memory_noise(lat, circ, 0.1)} == set(range(6))
    quiet = memory_noise(lat, circ, 0.1, "noise-then-quiet", 2)
    assert {l.round for l in quiet} == {0, 1}
    assert all(l.pauli_type == letter_at(lat)(l.qubit, l.round) for l in quiet)
    with pytest.raises(ValueError):
        memory_noise(lat, circ, 0.1, "noise-then-quiet", 9)
    with pytest.raises(ValueError):
        memory_noise(lat, circ, 0.1, "bogus")


@pytest.mark.parametrize("noisy,scenario,R", [(9, "noisy-readout", 13), (9, "noise-then-quiet", 13), (1, "noisy-readout", 7), (12, "noisy-readout", 13)])
def test_rounds_for(noisy, scenario, R):
    assert rounds_for(noisy, scenario) == R
    assert (R - 1) % 6 == 0


def test_noiseless_engine_has_no_events(setup, rng):
    _, circ = setup
    for _ in range(3):
        det, obs = apply(FaultSample([], []), circ, "engine", rng)
        assert not det.any() and not obs.any()


@settings(max_examples=25, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 17), st.integers(-1, 5), st.sampled_from("XYZ")), max_size=5), st.integers(0, 2**31))
def test_frame_matches_engine(faults, seed):
    """Frame propagation agrees with the exact stabilizer simulation for any Pauli faults."""
    lat = build_honeycomb(3, 3)
    circ = _circ7()
    locs = [FaultLocation(q, s, c) for q, s, c in faults]
    fs = FaultSample(locs, list(range(len(locs))))
    d1, o1 = apply(fs, circ, "frame")
    d2, o2 = apply(fs, circ, "engine", np.random.default_rng(seed))
    assert np.array_equal(d1, d2) and np.array_equal(o1, o2)


_CACHE = {}


def _circ7():
    if "c" not in _CACHE:
        _CACHE["c"] = memory_circuit(build_honeycomb(3, 3), 7)
    return _CACHE["c"]


def test_flips_match_engine(setup, rng):
    _, circ = setup
    for k in rng.choice(circ.num_outcomes, size=10, replace=False):
        fs = FaultSample([FaultLocation(None, 0, "flip", outcome=int(k))], [0])
        d1, o1 = apply(fs, circ, "frame")
        d2, o2 = apply(fs, circ, "engine", rng)
        assert np.array_equal(d1, d2) and np.array_equal(o1, o2)


def test_inner_logical_error_is_undetected_and_flips_one_observable(setup):
    lat, circ = setup
    flipped = []
    for q in inner_logicals(lat):
        loc = FaultLocation(None, 3, "check", operator=q.unsigned())
        det, obs = apply(FaultSample([loc], [0]), circ)
        assert not det.any()
        assert obs.sum() == 1
        flipped.append(int(np.argmax(obs)))
    assert sorted(flipped) == [0, 1]


def test_signatures_are_linear(setup, rng):
    lat, circ = setup
    locs = memory_noise(lat, circ, 0.05)
    det_sig, obs_sig = fault_signatures(circ, locs)
    act = sample_many(locs, rng, 20)
    det, obs = sampled_events(det_sig, obs_sig, act)
    for s in range(20):
        d, o = apply(FaultSample(locs, act[s]), circ)
        assert np.array_equal(d, det[s]) and np.array_equal(o, obs[s])


def test_unknown_mode(setup):
    _, circ = setup
    with pytest.raises(ValueError):
        apply(FaultSample([], []), circ, "bogus")
    with pytest.raises(ValueError):
        apply(FaultSample([], []), circ, "engine")
