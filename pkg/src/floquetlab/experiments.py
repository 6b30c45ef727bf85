"""Monte Carlo harness: memory experiments, curve aggregation and the toy model.

Randomness is derived from one master seed.  Shot ``s`` of sweep point ``i``
uses ``numpy.random.default_rng([seed, i, s])``, so any single shot can be
replayed and results do not depend on how shots are batched.
"""

from __future__ import annotations

import csv
import io
import json
import math
import time
from dataclasses import asdict, dataclass, field
from typing import Iterable, Iterator

import numpy as np
from scipy import stats

from .decoder import Matcher, build_decoding_graph
from .lattice import build_honeycomb
from .memory import memory_circuit, memory_noise, rounds_for
from .noise import FaultSample, apply, fault_signatures, sampled_events
from .pauli import PauliOperator
from .stabilizer import StabilizerGroup

CONFIG_VERSION = 1


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    code: str = "honeycomb"
    sizes: list = field(default_factory=lambda: [[3, 3], [6, 6]])
    p: list = field(default_factory=lambda: [0.01])
    rounds: int | None = None  # noisy rounds; None picks a size-dependent default
    shots: int = 1000
    seed: int = 0
    mode: str = "frame"
    scenario: str = "noisy-readout"
    observable: str = "any"
    version: int = CONFIG_VERSION

    def validate(self) -> "ExperimentConfig":
        if self.version != CONFIG_VERSION:
            raise ConfigError(f"unsupported config version {self.version}")
        if self.code not in ("honeycomb", "ladder"):
            raise ConfigError(f"unknown code {self.code!r}")
        if self.mode not in ("frame", "engine"):
            raise ConfigError(f"unknown mode {self.mode!r}")
        if self.scenario not in ("noisy-readout", "noise-then-quiet"):
            raise ConfigError(f"unknown scenario {self.scenario!r}")
        if not isinstance(self.shots, int) or self.shots < 1:
            raise ConfigError("shots must be a positive integer")
        if not self.sizes:
            raise ConfigError("no sizes given")
        for p in self.p:
            if not 0 <= p <= 1:
                raise ConfigError(f"p={p} outside [0, 1]")
        if self.rounds is not None and self.rounds < 1:
            raise ConfigError("rounds must be positive")
        for s in self.sizes:
            self.size_tuple(s)
        return self

    def size_tuple(self, s) -> tuple[int, ...]:
        if self.code == "ladder":
            if not isinstance(s, int):
                raise ConfigError(f"ladder size must be an integer, got {s!r}")
            return (s,)
        if isinstance(s, int):
            return (s, s)
        if len(s) != 2:
            raise ConfigError(f"honeycomb size must be [L1, L2], got {s!r}")
        return (int(s[0]), int(s[1]))

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        unknown = set(d) - set(cls.__dataclass_fields__)
        if unknown:
            raise ConfigError(f"unknown config keys {sorted(unknown)}")
        return cls(**d).validate()


def load_config(path) -> dict:
    """Read the versioned JSON config document."""
    with open(path) as fh:
        doc = json.load(fh)
    if doc.get("version") != CONFIG_VERSION:
        raise ConfigError(f"config {path} must have version {CONFIG_VERSION}")
    return doc


@dataclass
class ResultRow:
    code: str
    size: str
    p: float
    rounds: int
    shots: int
    logical_failures: int
    failure_rate: float
    stderr: float
    seed: int
    point: int
    wall_time: float | None = None

    def to_dict(self, timing: bool = False) -> dict:
        d = asdict(self)
        if not timing:
            d.pop("wall_time")
        return d


def shot_rng(seed: int, point: int, shot: int) -> np.random.Generator:
    return np.random.default_rng([seed, point, shot])


def _activations(n_loc: int, p: float, seed: int, point: int, shots: int) -> np.ndarray:
    act = np.zeros((shots, n_loc), dtype=np.uint8)
    for s in range(shots):
        act[s] = shot_rng(seed, point, s).random(n_loc) < p
    return act


class _HoneycombPoint:
    def __init__(self, size, noisy_rounds, scenario):
        self.lat = build_honeycomb(*size)
        L = max(size)
        noisy = noisy_rounds if noisy_rounds is not None else 3 * L
        self.rounds = rounds_for(noisy, scenario)
        self.circ = memory_circuit(self.lat, self.rounds)
        self.locs = memory_noise(self.lat, self.circ, 0.0, scenario, noisy if scenario == "noise-then-quiet" else None)
        self.det_sig, self.obs_sig = fault_signatures(self.circ, self.locs)
        self.matcher = Matcher(build_decoding_graph(self.det_sig, self.obs_sig))
        self.names = [o.name for o in self.circ.observables]

    def residuals(self, det: np.ndarray, obs: np.ndarray) -> np.ndarray:
        out = np.zeros_like(obs)
        for i in range(len(det)):
            corr = self.matcher.decode(np.flatnonzero(det[i]))
            out[i] = obs[i] ^ np.array([(corr >> k) & 1 for k in range(obs.shape[1])], dtype=obs.dtype)
        return out


def _failures(resid: np.ndarray, names: list[str], observable: str) -> int:
    if observable == "any":
        return int(resid.any(axis=1).sum())
    if observable not in names:
        raise ConfigError(f"unknown observable {observable!r}; have {names}")
    return int(resid[:, names.index(observable)].sum())


def memory_experiment(cfg: ExperimentConfig, timing: bool = False) -> Iterator[ResultRow]:
    """Stream one :class:`ResultRow` per (size, p) point."""
    from .ladder import LadderDecoder, ladder_circuit, ladder_noise

    cfg.validate()
    point = 0
    for s in cfg.sizes:
        size = cfg.size_tuple(s)
        if cfg.code == "honeycomb":
            hp = _HoneycombPoint(size, cfg.rounds, cfg.scenario)
            rounds = hp.rounds
        else:
            L = size[0]
            rounds = cfg.rounds if cfg.rounds is not None else 4 * L + 2
            exp = ladder_circuit(L, rounds)
            dec = LadderDecoder(exp, ladder_noise(exp, 0.0))
        for p in cfg.p:
            t0 = time.perf_counter()
            if cfg.code == "honeycomb":
                if cfg.mode == "frame":
                    act = _activations(len(hp.locs), p, cfg.seed, point, cfg.shots)
                    det, obs = sampled_events(hp.det_sig, hp.obs_sig, act)
                else:
                    det, obs = _engine_events(hp.circ, hp.locs, p, cfg.seed, point, cfg.shots)
                fails = _failures(hp.residuals(det, obs), hp.names, cfg.observable)
            else:
                if cfg.mode == "engine":
                    det, obs = _engine_events(exp.circ, dec.locations, p, cfg.seed, point, cfg.shots)
                else:
                    act = _activations(len(dec.locations), p, cfg.seed, point, cfg.shots)
                    det, obs = sampled_events(dec.det_sig, dec.obs_sig, act)
                fails = sum(dec.decode(d, o)["logical_error"] for d, o in zip(det, obs))
            rate = fails / cfg.shots
            se = math.sqrt(rate * (1 - rate) / cfg.shots)
            label = "x".join(map(str, size))
            yield ResultRow(cfg.code, label, p, rounds, cfg.shots, int(fails), rate, se, cfg.seed, point,
                            time.perf_counter() - t0 if timing else None)
            point += 1


def _engine_events(circ, locs, p, seed, point, shots):
    dets, obss = [], []
    for s in range(shots):
        rng = shot_rng(seed, point, s)
        active = rng.random(len(locs)) < p
        d, o = apply(FaultSample(list(locs), active), circ, mode="engine", rng=rng)
        dets.append(d)
        obss.append(o)
    return np.array(dets, dtype=np.uint8), np.array(obss, dtype=np.uint8)


def frame_engine_agreement(L1: int = 3, L2: int = 3, noisy_rounds: int = 9, shots: int = 100, p: float = 0.05, seed: int = 0):
    """Shot-by-shot comparison of frame and engine mode on the same fault samples."""
    hp = _HoneycombPoint((L1, L2), noisy_rounds, "noise-then-quiet")
    mismatches = 0
    for s in range(shots):
        rng = shot_rng(seed, 0, s)
        active = rng.random(len(hp.locs)) < p
        fs = FaultSample(list(hp.locs), active)
        d1, o1 = apply(fs, hp.circ, mode="frame")
        d2, o2 = apply(fs, hp.circ, mode="engine", rng=rng)
        mismatches += int(not (np.array_equal(d1, d2) and np.array_equal(o1, o2)))
    return mismatches


# ---------------------------------------------------------------------------
# output


ROW_FIELDS = ["code", "size", "p", "rounds", "shots", "logical_failures", "failure_rate", "stderr", "seed", "point"]


def write_rows(rows: Iterable[ResultRow], fh, fmt: str = "csv", timing: bool = False) -> int:
    fields = ROW_FIELDS + (["wall_time"] if timing else [])
    n = 0
    if fmt == "csv":
        w = csv.DictWriter(fh, fieldnames=fields, lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow(r.to_dict(timing))
            fh.flush()
            n += 1
    elif fmt == "json":
        for r in rows:
            fh.write(json.dumps(r.to_dict(timing), sort_keys=True) + "\n")
            fh.flush()
            n += 1
    else:
        raise ValueError(f"unknown format {fmt!r}")
    return n


def read_rows(text: str, fmt: str = "csv") -> list[ResultRow]:
    rows = []
    if fmt == "csv":
        for d in csv.DictReader(io.StringIO(text)):
            rows.append(_row_from(d))
    else:
        for line in text.splitlines():
            if line.strip():
                rows.append(_row_from(json.loads(line)))
    return rows


def _row_from(d: dict) -> ResultRow:
    wt = d.get("wall_time")
    return ResultRow(
        str(d["code"]), str(d["size"]), float(d["p"]), int(d["rounds"]), int(d["shots"]), int(d["logical_failures"]),
        float(d["failure_rate"]), float(d["stderr"]), int(d["seed"]), int(d["point"]),
        float(wt) if wt not in (None, "") else None,
    )


def wilson_interval(k: int, n: int, z: float = 1.959963984540054) -> tuple[float, float]:
    if n == 0:
        return 0.0, 1.0
    ph = k / n
    den = 1 + z * z / n
    mid = (ph + z * z / (2 * n)) / den
    half = z * math.sqrt(ph * (1 - ph) / n + z * z / (4 * n * n)) / den
    return max(0.0, mid - half), min(1.0, mid + half)


@dataclass
class CurvePoint:
    p: float
    shots: int
    failures: int
    rate: float
    lo: float
    hi: float


def emit_curves(rows: Iterable[ResultRow]) -> dict[str, list[CurvePoint]]:
    """Per-(code, size) series of failure rate against p, duplicates merged."""
    acc: dict[tuple, list[int]] = {}
    for r in rows:
        key = (r.code, r.size, r.p)
        k = acc.setdefault(key, [0, 0])
        k[0] += r.shots
        k[1] += r.logical_failures
    curves: dict[str, list[CurvePoint]] = {}
    for (code, size, p), (n, f) in sorted(acc.items()):
        lo, hi = wilson_interval(f, n)
        curves.setdefault(f"{code}:{size}", []).append(CurvePoint(p, n, f, f / n, lo, hi))
    return curves


def curves_to_json(curves: dict[str, list[CurvePoint]]) -> str:
    return json.dumps({k: [asdict(c) for c in v] for k, v in curves.items()}, sort_keys=True, indent=1) if curves else ""


def curves_from_json(text: str) -> dict[str, list[CurvePoint]]:
    if not text.strip():
        return {}
    return {k: [CurvePoint(**c) for c in v] for k, v in json.loads(text).items()}


def crossing_estimate(curves: dict[str, list[CurvePoint]], small: str, large: str) -> float | None:
    """Artifact measurement: p where the two curves cross, by linear interpolation in log p."""
    a = {c.p: c.rate for c in curves.get(small, [])}
    b = {c.p: c.rate for c in curves.get(large, [])}
    ps = sorted(set(a) & set(b) - {0.0})
    diff = [(p, b[p] - a[p]) for p in ps]
    for (p0, d0), (p1, d1) in zip(diff, diff[1:]):
        if d0 < 0 <= d1:
            t = d0 / (d0 - d1)
            return float(math.exp(math.log(p0) + t * (math.log(p1) - math.log(p0))))
    return None


# ---------------------------------------------------------------------------
# toy model: measuring random Pauli products


def random_pauli(N: int, rng: np.random.Generator) -> PauliOperator:
    v = int(rng.integers(1, 4**N))
    return PauliOperator(N, v & ((1 << N) - 1), v >> N)


def commute_fraction(N: int, K: int) -> float:
    """Exact fraction of nonidentity Paulis commuting with a rank-``K`` group."""
    return (4**N / 2**K - 1) / (4**N - 1)


def _check_N(N: int) -> None:
    if not 2 <= N <= 14:
        raise ValueError("N must be between 2 and 14")


def purification_time(N: int, rng: np.random.Generator) -> int:
    """Steps until random measurements purify the maximally mixed state."""
    _check_N(N)
    g = StabilizerGroup(N)
    steps = 0
    while g.rank < N:
        g.measure(random_pauli(N, rng), rng)
        steps += 1
    return steps


def grow_to_rank(N: int, K: int, rng: np.random.Generator) -> StabilizerGroup:
    g = StabilizerGroup(N)
    while g.rank < K:
        g.measure(random_pauli(N, rng), rng)
    return g


@dataclass
class CommuteStats:
    N: int
    K: int
    draws: int
    commuting: int
    in_group: int

    @property
    def commute_rate(self) -> float:
        return self.commuting / self.draws

    def commute_sigma(self, p: float) -> float:
        var = p * (1 - p) / self.draws
        diff = abs(self.commute_rate - p)
        if var == 0:
            return 0.0 if diff == 0 else math.inf
        return diff / math.sqrt(var)

    @property
    def in_group_rate(self) -> float:
        return self.in_group / self.commuting if self.commuting else float("nan")


def commute_statistics(N: int, K: int, draws: int, rng: np.random.Generator) -> CommuteStats:
    """Draw random Paulis against a rank-``K`` group without measuring them."""
    _check_N(N)
    g = grow_to_rank(N, K, rng)
    gens = [s.symplectic() for s in g.generators]
    mask = (1 << N) - 1
    com = ing = 0
    for _ in range(draws):
        p = random_pauli(N, rng)
        v = p.symplectic()
        if all(bin(((v & mask) & (s >> N)) ^ ((v >> N) & (s & mask))).count("1") % 2 == 0 for s in gens):
            com += 1
            ing += g.contains_up_to_sign(p)
    return CommuteStats(N, K, draws, com, ing)


@dataclass
class ToyResult:
    N: int
    times: list[int]
    commute: list[CommuteStats]

    @property
    def mean_time(self) -> float:
        return float(np.mean(self.times))


def toy_model(N: int, trials: int, rng: np.random.Generator, draws: int = 0) -> ToyResult:
    """Purification times over ``trials`` runs, plus commute statistics for ``K < N`` if ``draws``."""
    _check_N(N)
    times = [purification_time(N, rng) for _ in range(trials)]
    com = [commute_statistics(N, K, draws, rng) for K in range(N)] if draws else []
    return ToyResult(N, times, com)


def growth_factors(Ns: Iterable[int], trials: int, rng: np.random.Generator) -> tuple[dict[int, float], float]:
    """Mean purification times and the fitted per-qubit growth factor ``2**slope``."""
    means = {N: toy_model(N, trials, rng).mean_time for N in Ns}
    xs = np.array(list(means))
    slope = np.polyfit(xs, np.log2([means[N] for N in xs]), 1)[0]
    return means, float(2**slope)


def outcome_histogram(N: int, steps: int, rng: np.random.Generator, disturb: float = 0.0) -> np.ndarray:
    """Counts of (deterministic?, outcome) over ``steps`` measurements on a purified state.

    With ``disturb > 0`` a random nonidentity Pauli is applied before each
    step with that probability.
    """
    _check_N(N)
    g = grow_to_rank(N, N, rng)
    hist = np.zeros((2, 2), dtype=np.int64)
    for _ in range(steps):
        if disturb and rng.random() < disturb:
            g.apply_pauli(random_pauli(N, rng))
        out = g.measure(random_pauli(N, rng), rng)
        hist[int(out.deterministic), out.bit] += 1
    return hist


def indistinguishability(N: int, steps: int, rng: np.random.Generator, disturb: float = 0.05) -> float:
    """Chi-square p-value comparing outcome statistics with and without disturbance."""
    a = outcome_histogram(N, steps, rng, 0.0).ravel()
    b = outcome_histogram(N, steps, rng, disturb).ravel()
    table = np.array([a, b])
    table = table[:, table.sum(axis=0) > 0]
    return float(stats.chi2_contingency(table)[1])
