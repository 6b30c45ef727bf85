import csv
import io
import json
import subprocess
import sys

import pytest

from floquetlab.cli import EXIT_INVARIANT, EXIT_OK, EXIT_USAGE, main


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_verify_single_suite(capsys):
    code, out, err = run(["verify", "--suite", "subsystem"], capsys)
    assert code == EXIT_OK
    rows = list(csv.DictReader(io.StringIO(out)))
    assert rows[0]["suite"] == "subsystem" and rows[0]["passed"] == "True"
    assert "PASS [subsystem]" in err


def test_sample_json_and_cross_check(capsys):
    code, out, err = run(["--format", "json", "--seed", "4", "sample", "--p", "0.05", "--shots", "12", "--cross-check", "12"], capsys)
    assert code == EXIT_OK
    recs = [json.loads(line) for line in out.splitlines()]
    assert [r["shot"] for r in recs] == list(range(12))
    assert set(recs[0]["observables"]) == {"outer_1", "outer_2"}
    assert "PASS [sample]" in err


def test_sample_then_decode(tmp_path, capsys):
    assert main(["--out", str(tmp_path), "sample", "--p", "0.02", "--shots", "30"]) == EXIT_OK
    path = tmp_path / "sample.csv"
    assert path.exists()
    code, out, err = run(["--out", str(tmp_path), "decode", "--input", str(path), "--p", "0.02"], capsys)
    assert code == EXIT_OK
    rows = list(csv.DictReader(open(tmp_path / "decode.csv")))
    assert len(rows) == 30
    assert "logical failures:" in err


def test_decode_ladder_fresh(capsys):
    code, out, err = run(["--format", "json", "decode", "--code", "ladder", "--size", "4", "--p", "0.02", "--shots", "20"], capsys)
    assert code == EXIT_OK
    assert len(out.splitlines()) == 20


def test_threshold_writes_curves(tmp_path, capsys):
    code, _, err = run(["--out", str(tmp_path), "threshold", "--sizes", "[[3,3]]", "--p", "0", "0.02", "--shots", "50"], capsys)
    assert code == EXIT_OK
    curves = json.loads((tmp_path / "curves.json").read_text())
    assert list(curves) == ["honeycomb:3x3"]
    assert curves["honeycomb:3x3"][0]["failures"] == 0


def test_threshold_require_decrease_can_fail(tmp_path, capsys):
    # at p=0.4 neither size protects the logical, so a 3-sigma improvement is absent
    code, _, err = run(["--out", str(tmp_path), "threshold", "--sizes", "[[3,3],[3,6]]", "--p", "0.4", "--shots", "60",
                        "--require-decrease", "0.4"], capsys)
    assert code == EXIT_INVARIANT
    assert "FAIL [threshold]" in err
    assert json.loads((tmp_path / "crossing.json").read_text())["source"] == "artifact measurement"


def test_dimer(tmp_path, capsys):
    code, _, err = run(["--out", str(tmp_path), "--format", "json", "dimer", "--width", "8", "--height", "6"], capsys)
    assert code == EXIT_OK
    rep = json.loads((tmp_path / "dimer-report.json").read_text())
    assert rep["bottom_parity"] == rep["top_parity"] == 1
    assert (tmp_path / "dimer.jsonl").exists()


def test_toy_quick(capsys):
    code, out, err = run(["toy-model", "--n-min", "3", "--n-max", "7", "--trials", "100", "--commute-n", "8", "--k-max", "4",
                          "--draws", "2000", "--chi-n", "5", "--steps", "2000"], capsys)
    assert code == EXIT_OK
    kinds = [r["kind"] for r in csv.DictReader(io.StringIO(out))]
    assert kinds.count("purification") == 5 and "growth" in kinds and "chi2" in kinds


def test_config_document(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"version": 1, "seed": 9, "format": "json", "sample": {"shots": 3, "p": 0.1}}))
    code, out, _ = run(["--config", str(cfg), "sample"], capsys)
    assert code == EXIT_OK
    recs = [json.loads(line) for line in out.splitlines()]
    assert len(recs) == 3 and recs[0]["seed"] == 9 and recs[0]["p"] == 0.1
    # explicit flags win over the document
    code, out, _ = run(["--config", str(cfg), "sample", "--shots", "5"], capsys)
    assert len(out.splitlines()) == 5


@pytest.mark.parametrize(
    "doc",
    [{"version": 1, "sample": {"bogus": 1}}, {"version": 7}, {"sample": {"shots": 3}}],
)
def test_bad_config_is_a_usage_error(tmp_path, capsys, doc):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps(doc))
    code, _, err = run(["--config", str(cfg), "sample"], capsys)
    assert code == EXIT_USAGE
    assert "error" in err


def test_invalid_values_are_usage_errors(capsys):
    assert main(["sample", "--p", "1.5"]) == EXIT_USAGE
    assert main(["dimer", "--width", "5"]) == EXIT_USAGE
    with pytest.raises(SystemExit):
        main(["nonsense"])


def test_same_seed_same_bytes(tmp_path):
    outs = []
    for k in range(2):
        d = tmp_path / f"run{k}"
        assert main(["--seed", "3", "--out", str(d), "threshold", "--sizes", "[[3,3]]", "--p", "0.02", "--shots", "40"]) == 0
        outs.append(((d / "threshold.csv").read_bytes(), (d / "curves.json").read_bytes()))
    assert outs[0] == outs[1]


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "floquetlab", "verify", "--suite", "subsystem"], capture_output=True, text=True)
    assert res.returncode == 0
    assert "PASS" in res.stderr
