import csv
import io
import json
import os
import subprocess
import sys

import pytest

from qecclab.cli import _floats, main, resolve_seed
from qecclab.harness import DEFAULT_SEED, SCHEMA_LINE


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def table(text):
    lines = text.splitlines()
    assert lines[0] == SCHEMA_LINE
    return list(csv.DictReader(io.StringIO("\n".join(lines[1:]))))


def test_floats_and_seed(monkeypatch):
    assert _floats("0.1,0.2") == [0.1, 0.2]
    assert _floats("0:1:3") == [0.0, 0.5, 1.0]
    monkeypatch.delenv("QECCLAB_SEED", raising=False)
    assert resolve_seed(None) == DEFAULT_SEED
    monkeypatch.setenv("QECCLAB_SEED", "77")
    assert resolve_seed(None) == 77
    assert resolve_seed(5) == 5


def test_capacity_noise_limit(capsys):
    code, out, err = run(capsys, "capacity", "--kind", "ad", "--rq", "0.1111", "--grid", "0.1,0.2")
    assert code == 0
    rows = table(out)
    assert len(rows) == 2 and set(rows[0]) == {"gamma", "capacity"}
    assert "gamma*_AD" in err and "0.431" in err


def test_noise_limit_json(capsys):
    code, out, _ = run(capsys, "noise-limit", "--rq", "0.1111", "--format", "json")
    rows = json.loads(out)
    assert [r["kind"] for r in rows] == ["AD", "ADPTA", "ADCTA", "depolarizing"]


def test_outage_static_step(capsys):
    code, out, _ = run(capsys, "outage", "--rq", "0.1111", "--cv", "0", "--gamma", "0.1,0.2,0.4")
    assert [float(r["p_out"]) for r in table(out)] == [0.0, 0.0, 0.0]


def test_outage_with_oracle(capsys):
    _, out, _ = run(capsys, "outage", "--rq", "0.1111", "--cv", "0.25", "--gamma", "0.3", "--oracle-draws", "200000")
    row = table(out)[0]
    assert abs(float(row["p_out"]) - float(row["p_out_mc"])) < 0.003


def test_diamond_modes(capsys):
    _, out, _ = run(capsys, "diamond", "--gamma1", "0.1", "--gamma2", "0.2")
    rows = {r["kind"]: float(r["distance"]) for r in table(out)}
    assert rows["AD"] == pytest.approx(0.2)
    assert rows["ADPTA"] == pytest.approx(rows["ADPTA-closed"], abs=1e-12)
    _, out, _ = run(capsys, "diamond", "--gamma1", "0.1", "--rounds", "200", "--preset", "QA_C5", "--format", "json")
    row = json.loads(out)[0]
    assert row["rounds"] == 200 and row["Q1"] <= row["median"] <= row["Q3"]


def test_domain_error_exit_code(capsys):
    code, _, err = run(capsys, "diamond", "--gamma1", "0.1")
    assert code == 1 and "gamma2" in err
    code, _, err = run(capsys, "outage", "--rq", "0.1111", "--cv", "0.1", "--gamma", "0.9")
    assert code == 1 and "gamma" in err


def test_bad_flag_exit_code():
    with pytest.raises(SystemExit) as info:
        main(["capacity", "--bogus"])
    assert info.value.code == 2


def test_interleaver_welch_costas(capsys, tmp_path):
    perm = tmp_path / "wc.txt"
    _, out, err = run(capsys, "interleaver", "--kind", "welch-costas", "--n", "3000", "--alpha", "2987",
                      "--metrics", "--emit", str(perm))
    row = table(out)[0]
    assert row["spread"] == "1" and float(row["dispersion"]) == 1.0
    _, out, _ = run(capsys, "interleaver", "--load", str(perm), "--metrics")
    assert table(out)[0]["kind"] == "file"
    code, _, _ = run(capsys, "interleaver", "--kind", "welch-costas", "--n", "3000", "--alpha", "2")
    assert code == 1


def test_wer_commands(capsys, tmp_path):
    out_path = tmp_path / "t.csv"
    code, out, _ = run(capsys, "toric-wer", "--d", "3", "--p", "0.08", "--min-errors", "20", "--out", str(out_path))
    assert code == 0 and "toric d=3" in out
    rows = table(out_path.read_text())
    assert int(rows[0]["word_errors"]) >= 20
    _, out, _ = run(capsys, "fivequbit-wer", "--decoder", "dqmld", "--alpha", "10", "--p", "0.1", "--min-errors", "50")
    assert table(out)[0]["kind"] == "pauli"
    _, out, _ = run(capsys, "toric-wer", "--d", "3", "--p", "0.05", "--preset", "QA_C5", "--min-errors", "20")
    assert table(out)[0]["kind"] == "tv-cta"


def test_mismatch_and_estimate(capsys, tmp_path):
    curve = tmp_path / "curve.csv"
    _, out, err = run(capsys, "mismatch", "--out", str(curve))
    assert "lowest WER" in out
    _, out, _ = run(capsys, "estimate", "--mode", "averaged-wer", "--curve", str(curve), "--p", "0.1", "--n-list", "10,1000")
    assert len(table(out)) == 2
    _, out, _ = run(capsys, "estimate", "--mode", "fisher", "--p", "0.25", "--format", "json")
    assert [r["fisher"] for r in json.loads(out)] == [pytest.approx(1.8), pytest.approx(3.0)]
    _, out, _ = run(capsys, "estimate", "--mode", "online", "--blocks", "2000")
    row = table(out)[0]
    assert abs(float(row["mean_p_hat"]) - float(row["oracle_mean"])) < 4 * float(row["std_error"])
    _, out, _ = run(capsys, "estimate", "--mode", "online", "--channel-kind", "pauli", "--alpha", "10",
                    "--p", "0.1", "--blocks", "2000", "--window", "1000")
    assert len(table(out)) == 2


def test_stochastic_and_presets(capsys, tmp_path):
    _, out, _ = run(capsys, "stochastic", "--preset", "QA_C5", "--draws", "10000")
    assert abs(float(table(out)[0]["mean"]) - 44.49) < 1.0
    _, out, _ = run(capsys, "stochastic", "--preset", "QA_C5", "--fs", "0.01", "--n", "1000")
    assert table(out)[0]["n"] == "1000"
    _, out, _ = run(capsys, "presets", "--format", "json")
    assert [p["name"] for p in json.loads(out)] == ["QA_C5", "QB_C5", "QA_C6", "QB_C6"]


def test_csv_json_same_values(capsys):
    _, c, _ = run(capsys, "capacity", "--kind", "adcta", "--grid", "0.05:0.45:5")
    _, j, _ = run(capsys, "capacity", "--kind", "adcta", "--grid", "0.05:0.45:5", "--format", "json")
    assert [float(r["capacity"]) for r in table(c)] == [r["capacity"] for r in json.loads(j)]


def test_seed_env_and_flag():
    args = ["-m", "qecclab.cli", "interleaver", "--kind", "random", "--n", "50", "--metrics"]
    env_run = lambda env: subprocess.run([sys.executable, *args], capture_output=True, text=True,
                                         env=env, check=True).stdout
    base = dict(os.environ)
    base.pop("QECCLAB_SEED", None)
    a = env_run(base)
    b = env_run({**base, "QECCLAB_SEED": "9"})
    c = subprocess.run([sys.executable, *args, "--seed", str(DEFAULT_SEED)], capture_output=True, text=True,
                       env={**base, "QECCLAB_SEED": "9"}, check=True).stdout
    assert a == c and a != b
