"""Command-line interface: ``floquetlab <subcommand> [options]``.

Global options go before the subcommand.  ``--config`` names a JSON document
``{"version": 1, "<subcommand>": {option: value, ...}}`` whose section
supplies defaults; explicit flags win.  Output goes to stdout, or to
``<out>/<subcommand>.<format>`` with ``--out``.  The exit status is 0 only if
every invariant check the subcommand runs passes.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from contextlib import contextmanager

import numpy as np

from . import dimer, experiments, verify
from .experiments import ConfigError, ExperimentConfig

EXIT_OK, EXIT_INVARIANT, EXIT_USAGE = 0, 1, 2


# ---------------------------------------------------------------------------
# output helpers


class Writer:
    """Row sink for csv or json-lines output."""

    def __init__(self, fh, fmt: str):
        self.fh, self.fmt = fh, fmt
        self._csv = None

    def row(self, d: dict) -> None:
        if self.fmt == "json":
            self.fh.write(json.dumps(d, sort_keys=True) + "\n")
            return
        flat = {k: (json.dumps(v) if isinstance(v, (list, dict)) else v) for k, v in d.items()}
        if self._csv is None:
            self._csv = csv.DictWriter(self.fh, fieldnames=list(flat), lineterminator="\n")
            self._csv.writeheader()
        self._csv.writerow(flat)


@contextmanager
def _sink(args, name: str, fmt: str | None = None):
    fmt = fmt or args.format
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        with open(os.path.join(args.out, f"{name}.{'csv' if fmt == 'csv' else 'jsonl'}"), "w", newline="") as fh:
            yield Writer(fh, fmt)
    else:
        yield Writer(sys.stdout, fmt)
        sys.stdout.flush()


def _write_file(args, filename: str, text: str) -> None:
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        with open(os.path.join(args.out, filename), "w") as fh:
            fh.write(text)


def _report(checks, args) -> int:
    with _sink(args, f"{args.command}-checks") as w:
        for c in checks:
            w.row(c.to_dict())
    for c in checks:
        print(f"{'PASS' if c.passed else 'FAIL'} [{c.suite}] {c.name}" + (f" ({c.detail})" if c.detail else ""), file=sys.stderr)
    return EXIT_OK if all(c.passed for c in checks) else EXIT_INVARIANT


# ---------------------------------------------------------------------------
# subcommands


def cmd_verify(args) -> int:
    names = args.suite or [s for s in verify.SUITES if s not in ("toy",)]
    return _report(verify.run_suites(names, args.seed), args)


def _experiment_config(args, **extra) -> ExperimentConfig:
    size = args.size
    if args.code == "honeycomb":
        sizes = [[size[0], size[-1]]] if size else [[3, 3]]
    else:
        sizes = [size[0]] if size else [8]
    return ExperimentConfig(
        code=args.code, sizes=sizes, p=[args.p] if not isinstance(args.p, list) else args.p, rounds=args.rounds,
        shots=args.shots, seed=args.seed, mode=args.mode, scenario=args.scenario, **extra,
    ).validate()


def _build(cfg: ExperimentConfig):
    """Circuit, fault locations, signatures and a decode function for the first configured size."""
    from .ladder import LadderDecoder, ladder_circuit, ladder_noise

    size = cfg.size_tuple(cfg.sizes[0])
    if cfg.code == "honeycomb":
        hp = experiments._HoneycombPoint(size, cfg.rounds, cfg.scenario)

        def decode(events):
            pairs = hp.matcher.match(events)
            return pairs, hp.matcher.correction(pairs)

        return hp.circ, hp.locs, hp.det_sig, hp.obs_sig, decode, hp.rounds
    rounds = cfg.rounds if cfg.rounds is not None else 4 * size[0] + 2
    exp = ladder_circuit(size[0], rounds)
    dec = LadderDecoder(exp, ladder_noise(exp, 0.0))

    def decode(events):
        pairs = dec.matcher.match(events)
        return pairs, dec.matcher.correction(pairs)

    return exp.circ, dec.locations, dec.det_sig, dec.obs_sig, decode, rounds


def _sample_shots(cfg, circ, locs, det_sig, obs_sig):
    p = cfg.p[0]
    for s in range(cfg.shots):
        rng = experiments.shot_rng(cfg.seed, 0, s)
        active = rng.random(len(locs)) < p
        if cfg.mode == "engine":
            from .noise import FaultSample, apply

            d, o = apply(FaultSample(list(locs), active), circ, mode="engine", rng=rng)
        else:
            d = det_sig[active].sum(axis=0) % 2 if active.any() else np.zeros(det_sig.shape[1], dtype=np.uint8)
            o = obs_sig[active].sum(axis=0) % 2 if active.any() else np.zeros(obs_sig.shape[1], dtype=np.uint8)
        yield s, active, np.asarray(d, dtype=np.uint8), np.asarray(o, dtype=np.uint8)


def cmd_sample(args) -> int:
    cfg = _experiment_config(args)
    circ, locs, det_sig, obs_sig, _, rounds = _build(cfg)
    names = [o.name for o in circ.observables]
    mismatches = 0
    with _sink(args, "sample") as w:
        for s, active, d, o in _sample_shots(cfg, circ, locs, det_sig, obs_sig):
            if cfg.mode == "frame" and s < args.cross_check:
                from .noise import FaultSample, apply

                d2, o2 = apply(FaultSample(list(locs), active), circ, mode="engine", rng=experiments.shot_rng(cfg.seed, 1, s))
                mismatches += not (np.array_equal(d, d2) and np.array_equal(o, o2))
            w.row({
                "code": cfg.code, "size": "x".join(map(str, cfg.size_tuple(cfg.sizes[0]))), "rounds": rounds,
                "scenario": cfg.scenario, "p": cfg.p[0], "seed": cfg.seed, "shot": s,
                "events": np.flatnonzero(d).tolist(), "observables": {n: int(v) for n, v in zip(names, o)},
            })
    ok = mismatches == 0
    print(f"{'PASS' if ok else 'FAIL'} [sample] frame/engine cross-check on {min(args.cross_check, cfg.shots)} shots", file=sys.stderr)
    return EXIT_OK if ok else EXIT_INVARIANT


def _read_samples(path: str) -> list[dict]:
    with open(path) as fh:
        text = fh.read()
    if text.lstrip().startswith("{"):
        return [json.loads(line) for line in text.splitlines() if line.strip()]
    rows = list(csv.DictReader(text.splitlines()))
    for r in rows:
        r["events"] = json.loads(r["events"])
        r["observables"] = json.loads(r["observables"])
        r["shot"] = int(r["shot"])
    return rows


def cmd_decode(args) -> int:
    cfg = _experiment_config(args)
    circ, locs, det_sig, obs_sig, decode, _ = _build(cfg)
    names = [o.name for o in circ.observables]
    if args.input:
        records = [(r["shot"], r["events"], [int(r["observables"][n]) for n in names]) for r in _read_samples(args.input)]
    else:
        records = [(s, np.flatnonzero(d).tolist(), o.tolist()) for s, _, d, o in _sample_shots(cfg, circ, locs, det_sig, obs_sig)]
    consistent = True
    failures = 0
    B = det_sig.shape[1]
    with _sink(args, "decode") as w:
        for s, events, obs in records:
            pairs, corr = decode(events)
            covered = sorted(x for pr in pairs for x in pr if x != B)
            consistent &= covered == sorted(events)
            resid = [int(o) ^ ((corr >> k) & 1) for k, o in enumerate(obs)]
            if cfg.code == "ladder":
                failed = 2 * sum(resid) >= len(resid)
            else:
                failed = any(resid)
            failures += failed
            w.row({"shot": s, "events": len(events), "pairs": [list(map(int, pr)) for pr in pairs],
                   "residual": dict(zip(names, resid)), "logical_failure": bool(failed)})
    print(f"{'PASS' if consistent else 'FAIL'} [decode] every matching covers exactly the detection events", file=sys.stderr)
    print(f"logical failures: {failures}/{len(records)}", file=sys.stderr)
    return EXIT_OK if consistent else EXIT_INVARIANT


def cmd_threshold(args) -> int:
    sizes = args.sizes or ([[3, 3], [6, 6]] if args.code == "honeycomb" else [4, 8])
    cfg = ExperimentConfig(code=args.code, sizes=sizes, p=args.p, rounds=args.rounds, shots=args.shots,
                           seed=args.seed, mode=args.mode, scenario=args.scenario, observable=args.observable).validate()
    rows = []
    with _sink(args, "threshold") as w:
        for row in experiments.memory_experiment(cfg):
            rows.append(row)
            w.row(row.to_dict())
    curves = experiments.emit_curves(rows)
    _write_file(args, "curves.json", experiments.curves_to_json(curves))
    checks = [verify.Check("threshold", "p=0 points have no failures", all(r.logical_failures == 0 for r in rows if r.p == 0))]
    keys = sorted(curves, key=lambda k: [int(x) for x in k.split(":")[1].split("x")])
    if len(keys) >= 2:
        cross = experiments.crossing_estimate(curves, keys[0], keys[1])
        note = {"small": keys[0], "large": keys[1], "crossing_p": cross, "source": "artifact measurement"}
        _write_file(args, "crossing.json", json.dumps(note, sort_keys=True, indent=1) + "\n")
        print(f"crossing estimate ({keys[0]} vs {keys[1]}): {cross}", file=sys.stderr)
        if args.require_decrease is not None:
            a = next(c for c in curves[keys[0]] if c.p == args.require_decrease)
            b = next(c for c in curves[keys[1]] if c.p == args.require_decrease)
            se = (a.rate * (1 - a.rate) / a.shots + b.rate * (1 - b.rate) / b.shots) ** 0.5
            z = (a.rate - b.rate) / se if se else 0.0
            checks.append(verify.Check("threshold", f"failure rate decreases with size at p={args.require_decrease} (>= 3 sigma)", z >= 3, f"z={z:.2f}"))
    for c in checks:
        print(f"{'PASS' if c.passed else 'FAIL'} [{c.suite}] {c.name}" + (f" ({c.detail})" if c.detail else ""), file=sys.stderr)
    return EXIT_OK if all(c.passed for c in checks) else EXIT_INVARIANT


def cmd_ladder(args) -> int:
    checks = verify.ladder(args.seed)
    cfg = ExperimentConfig(code="ladder", sizes=[args.L], p=args.p, rounds=args.rounds, shots=args.shots,
                           seed=args.seed, mode=args.mode).validate()
    rows = []
    with _sink(args, "ladder") as w:
        for row in experiments.memory_experiment(cfg):
            rows.append(row)
            w.row(row.to_dict())
    rates = [r.failure_rate for r in sorted(rows, key=lambda r: r.p)]
    checks.append(verify.Check("ladder", "failure rate nondecreasing in p", all(a <= b for a, b in zip(rates, rates[1:])), str(rates)))
    for c in checks:
        print(f"{'PASS' if c.passed else 'FAIL'} [{c.suite}] {c.name}" + (f" ({c.detail})" if c.detail else ""), file=sys.stderr)
    return EXIT_OK if all(c.passed for c in checks) else EXIT_INVARIANT


def cmd_dimer(args) -> int:
    ann = dimer.build_annulus(args.width, args.height)
    rng = np.random.default_rng(args.seed)
    top = dimer.random_top_sequence(ann, rng, length=args.top_length) if args.top == "random" else None
    with _sink(args, "dimer") as w:
        for rec in dimer.dimer_trace(ann, top, args.periods):
            w.row(rec)
    rep = dimer.obstruction_demo(ann, top, periods=args.periods)
    _write_file(args, "dimer-report.json", json.dumps(rep.__dict__, sort_keys=True, indent=1) + "\n")
    odd = args.periods % 2
    checks = [
        verify.Check("dimer", "pairing restored after the bulk periods", rep.pairing_restored),
        verify.Check("dimer", "top parity equals bottom parity", rep.top_parity == rep.bottom_parity, f"{rep.bottom_parity}/{rep.top_parity}"),
        verify.Check("dimer", "naive bottom winds once per period", rep.bottom_parity == odd),
        verify.Check("dimer", "no bulk winding", rep.bulk_parity == 0),
    ]
    for c in checks:
        print(f"{'PASS' if c.passed else 'FAIL'} [{c.suite}] {c.name}" + (f" ({c.detail})" if c.detail else ""), file=sys.stderr)
    return EXIT_OK if all(c.passed for c in checks) else EXIT_INVARIANT


def cmd_toy(args) -> int:
    rng = np.random.default_rng(args.seed)
    checks = []
    with _sink(args, "toy-model") as w:
        means = {}
        for N in range(args.n_min, args.n_max + 1):
            res = experiments.toy_model(N, args.trials, rng)
            means[N] = res.mean_time
            w.row({"kind": "purification", "N": N, "trials": args.trials, "mean_steps": res.mean_time,
                   "median_steps": float(np.median(res.times))})
        xs = np.array(sorted(means))
        factor = float(2 ** np.polyfit(xs, np.log2([means[N] for N in xs]), 1)[0]) if len(xs) > 1 else float("nan")
        w.row({"kind": "growth", "N": int(xs[-1]), "trials": args.trials, "mean_steps": factor, "median_steps": None})
        checks.append(verify.Check("toy", "purification growth factor in [1.7, 2.3]", 1.7 <= factor <= 2.3, f"{factor:.3f}"))
        worst = 0.0
        for K in range(0, args.k_max + 1):
            st = experiments.commute_statistics(args.commute_n, K, args.draws, rng)
            sig = st.commute_sigma(2.0**-K)
            worst = max(worst, sig)
            w.row({"kind": "commute", "N": args.commute_n, "trials": args.draws, "mean_steps": st.commute_rate,
                   "median_steps": 2.0**-K})
        checks.append(verify.Check("toy", f"commute probability within 5 sigma of 2^-K (K<={args.k_max})", worst < 5, f"max {worst:.2f} sigma"))
        pval = experiments.indistinguishability(args.chi_n, args.steps, rng)
        w.row({"kind": "chi2", "N": args.chi_n, "trials": args.steps, "mean_steps": pval, "median_steps": None})
        checks.append(verify.Check("toy", "disturbance indistinguishable (chi-square p > 0.01)", pval > 0.01, f"p={pval:.3f}"))
    for c in checks:
        print(f"{'PASS' if c.passed else 'FAIL'} [{c.suite}] {c.name}" + (f" ({c.detail})" if c.detail else ""), file=sys.stderr)
    return EXIT_OK if all(c.passed for c in checks) else EXIT_INVARIANT


# ---------------------------------------------------------------------------
# parser


def _memory_options(sp, shots: int = 100, p: float = 0.01) -> None:
    sp.add_argument("--code", choices=["honeycomb", "ladder"], default="honeycomb")
    sp.add_argument("--size", type=int, nargs="+", help="L1 L2 for the honeycomb torus, L for the ladder")
    sp.add_argument("--p", type=float, default=p)
    sp.add_argument("--rounds", type=int, help="noisy rounds (honeycomb) or total rounds (ladder)")
    sp.add_argument("--shots", type=int, default=shots)
    sp.add_argument("--mode", choices=["frame", "engine"], default="frame")
    sp.add_argument("--scenario", choices=["noisy-readout", "noise-then-quiet"], default="noisy-readout")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="floquetlab", description="Simulate and decode honeycomb and ladder Floquet codes.")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--config", help="versioned JSON config document")
    ap.add_argument("--out", help="directory for output files (default: stdout)")
    ap.add_argument("--format", choices=["csv", "json"], default="csv")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("verify", help="run invariant suites")
    sp.add_argument("--suite", action="append", choices=sorted(verify.SUITES), help="repeatable; default: all but toy")
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("sample", help="sample detection events and observable flips")
    _memory_options(sp)
    sp.add_argument("--cross-check", type=int, default=10, help="shots re-run in engine mode for comparison")
    sp.set_defaults(func=cmd_sample)

    sp = sub.add_parser("decode", help="decode sampled (or freshly sampled) detection events")
    _memory_options(sp)
    sp.add_argument("--input", help="output file of the sample subcommand")
    sp.set_defaults(func=cmd_decode)

    sp = sub.add_parser("threshold", help="failure-rate sweep over sizes and p")
    sp.add_argument("--code", choices=["honeycomb", "ladder"], default="honeycomb")
    sp.add_argument("--sizes", type=json.loads, help='JSON list, e.g. "[[3,3],[6,6]]" or "[4,8]"')
    sp.add_argument("--p", type=float, nargs="+", default=[0.005, 0.01, 0.02])
    sp.add_argument("--rounds", type=int)
    sp.add_argument("--shots", type=int, default=1000)
    sp.add_argument("--mode", choices=["frame", "engine"], default="frame")
    sp.add_argument("--scenario", choices=["noisy-readout", "noise-then-quiet"], default="noisy-readout")
    sp.add_argument("--observable", default="any")
    sp.add_argument("--require-decrease", type=float, metavar="P", help="fail unless the larger size wins by 3 sigma at P")
    sp.set_defaults(func=cmd_threshold)

    sp = sub.add_parser("ladder", help="ladder invariants and majority-vote failure rates")
    sp.add_argument("--L", type=int, default=8)
    sp.add_argument("--p", type=float, nargs="+", default=[0.01, 0.03])
    sp.add_argument("--rounds", type=int)
    sp.add_argument("--shots", type=int, default=1000)
    sp.add_argument("--mode", choices=["frame", "engine"], default="frame")
    sp.set_defaults(func=cmd_ladder)

    sp = sub.add_parser("dimer", help="dimer trace and boundary winding report on an annulus")
    sp.add_argument("--width", type=int, default=12)
    sp.add_argument("--height", type=int, default=10)
    sp.add_argument("--periods", type=int, default=1)
    sp.add_argument("--top", choices=["naive", "random"], default="naive")
    sp.add_argument("--top-length", type=int, default=40)
    sp.set_defaults(func=cmd_dimer)

    sp = sub.add_parser("toy-model", help="random Pauli measurement toy model")
    sp.add_argument("--n-min", type=int, default=4)
    sp.add_argument("--n-max", type=int, default=10)
    sp.add_argument("--trials", type=int, default=200)
    sp.add_argument("--commute-n", type=int, default=12)
    sp.add_argument("--k-max", type=int, default=10)
    sp.add_argument("--draws", type=int, default=20000)
    sp.add_argument("--chi-n", type=int, default=10)
    sp.add_argument("--steps", type=int, default=100000)
    sp.set_defaults(func=cmd_toy)
    return ap


def _apply_config(ap: argparse.ArgumentParser, argv) -> argparse.Namespace:
    args = ap.parse_args(argv)
    if not args.config:
        return args
    doc = experiments.load_config(args.config)
    section = doc.get(args.command, {})
    glob = {k: doc[k] for k in ("seed", "format", "out") if k in doc}
    sub = next(a for a in ap._subparsers._group_actions if isinstance(a, argparse._SubParsersAction)).choices[args.command]
    known = {a.dest for a in sub._actions}
    bad = set(section) - known
    if bad:
        raise ConfigError(f"unknown options for {args.command}: {sorted(bad)}")
    sub.set_defaults(**section)
    ap.set_defaults(**glob)
    return ap.parse_args(argv)


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = _apply_config(ap, argv)
        return args.func(args)
    except (ConfigError, ValueError, OSError) as e:
        print(f"floquetlab: error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
