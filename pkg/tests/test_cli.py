import csv
import io
import json

import pytest

from lff.cli import run_command


def run(capsys, *argv):
    code = run_command(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_check_haar_tight(capsys):
    code, out, _ = run(capsys, "check", "--suite", "haar-tight", "--q", "2")
    assert code == 0
    doc = json.loads(out)
    assert doc["passed"] and doc["check_count"] == 4


def test_check_failure_record(capsys):
    # the shifted-Haar witness of the invariance suite does not separate (see README)
    code, out, _ = run(capsys, "check", "--suite", "invariance", "--q", "2")
    assert code == 1
    doc = json.loads(out)
    assert doc["passed"] is False and doc["failure_count"] == len(doc["checks"]) > 0


def test_coaffine_decay(capsys):
    code, out, _ = run(capsys, "coaffine-decay", "--q", "2", "--m-max", "4")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert list(rows[0]) == ["m", "avg_time_side", "avg_fourier_side", "predicted"]
    for r, want in zip(rows, [1, 0.5, 0.25, 0.125]):
        for key in ("avg_time_side", "avg_fourier_side", "predicted"):
            assert abs(float(r[key]) - want) < 1e-9


def test_bounds_q5(capsys):
    code, out, _ = run(capsys, "bounds", "--system", "affine", "--generators", "haar", "--q", "5", "--support", "1", "--resolution", "2")
    assert code == 0
    doc = json.loads(out)
    assert abs(doc["lambda_min"] - 1) < 1e-9 and abs(doc["lambda_max"] - 1) < 1e-9
    assert doc["system"] == "affine" and doc["q"] == 5


def test_prime_power_needs_p_and_c(capsys):
    code, _, err = run(capsys, "bounds", "--q", "4")
    assert code == 2 and "usage" in err
    code, out, _ = run(capsys, "bounds", "--p", "2", "--c", "2", "--support", "1", "--resolution", "1")
    assert code == 0 and json.loads(out)["q"] == 4


def test_reducible_modulus_usage_error(capsys):
    code, _, err = run(capsys, "bounds", "--p", "2", "--c", "2", "--modulus", "1,0,1")
    assert code == 2 and "reducible" in err


@pytest.mark.parametrize("argv", [["frobnicate"], ["bounds", "--nope"], ["check"], ["check", "--suite", "nope"]])
def test_usage_errors(capsys, argv):
    with pytest.raises(SystemExit) as exc:
        run_command(argv)
    assert exc.value.code == 2


def test_determinism(capsys, tmp_path):
    outs = []
    for name in ("a.json", "b.json"):
        path = tmp_path / name
        assert run_command(["compare", "--q", "3", "--samples", "2", "--seed", "9", "--out", str(path)]) == 0
        doc = json.loads(path.read_text())
        for key in ("affine", "quasiAffine"):
            doc[key].pop("elapsed_ms")
        outs.append(json.dumps(doc))
    assert outs[0] == outs[1]
    assert [p.name for p in tmp_path.iterdir()] and not list(tmp_path.glob("*.tmp"))


def test_gen_and_reload(capsys, tmp_path):
    path = tmp_path / "h.lfgen.json"
    assert run_command(["gen", "--family", "haar", "--q", "3", "--out", str(path)]) == 0
    code, out, _ = run(capsys, "bounds", "--generators", str(path), "--system", "quasiAffine", "--support", "1", "--resolution", "1")
    assert code == 0
    doc = json.loads(out)
    assert doc["q"] == 3 and abs(doc["lambda_min"] - 1) < 1e-9


def test_bad_generator_file(capsys, tmp_path):
    path = tmp_path / "bad.lfgen.json"
    path.write_text(json.dumps({"field": {"p": 2, "c": 1}, "generators": [{"M": 0, "N": 1, "values": [1, 0, -1]}]}))
    code, _, err = run(capsys, "bounds", "--generators", str(path))
    assert code == 2 and "generators[0].values" in err


def test_non_mean_zero_generator_rejected(capsys, tmp_path):
    path = tmp_path / "ones.lfgen.json"
    path.write_text(json.dumps({"field": {"p": 2, "c": 1}, "generators": [{"M": 0, "N": 1, "values": [1, 1]}]}))
    code, _, err = run(capsys, "bounds", "--generators", str(path))
    assert code == 2 and "mean-zero" in err


def test_weights(capsys, tmp_path):
    code, out, _ = run(capsys, "coaffine-decay", "--q", "2", "--m-max", "2", "--weights", "const:2")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert abs(float(rows[0]["avg_time_side"]) - 4) < 1e-9 and abs(float(rows[0]["predicted"]) - 4) < 1e-9
    wfile = tmp_path / "w.json"
    wfile.write_text(json.dumps({"default": 1.0, "table": [[1, 0, 3.0, 0.0]]}))
    code, out, _ = run(capsys, "coaffine-decay", "--q", "2", "--m-max", "1", "--weights", str(wfile))
    assert code == 0 and abs(float(next(csv.DictReader(io.StringIO(out)))["avg_time_side"]) - 9) < 1e-9
    code, _, _ = run(capsys, "coaffine-decay", "--q", "2", "--weights", "const:abc")
    assert code == 2


def test_threads_env(capsys, monkeypatch):
    monkeypatch.setenv("LFF_THREADS", "0")
    code, _, err = run(capsys, "bounds", "--q", "2")
    assert code == 2 and "LFF_THREADS" in err
    monkeypatch.setenv("LFF_THREADS", "3")
    code, out, _ = run(capsys, "bounds", "--q", "3", "--support", "2", "--resolution", "2")
    assert code == 0 and abs(json.loads(out)["lambda_max"] - 1) < 1e-9
