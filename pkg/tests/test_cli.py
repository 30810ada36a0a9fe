import json
import subprocess
import sys

import numpy as np
import pytest

from nsfts.cli import main
from nsfts.drift import KINDS

MANIFEST = """\
version: 1
seed: 3
output: out
defaults: {k: 20, W: 60, R: 10, split: 0.7}
datasets:
  - {kind: sudden-mean, length: 300, noise_ar: 0.5}
  - {kind: stationary, length: 300, name: flat}
  - {name: real, path: data.csv, column: close, header: true}
methods: [nsfts, time-variant, {name: incremental-ensemble, params: {M: 3}}]
"""


@pytest.fixture
def bench_dir(tmp_path):
    rows = "\n".join(f"{i},{10 + np.sin(i / 5):.6f}" for i in range(250))
    (tmp_path / "data.csv").write_text("t,close\n" + rows + "\n")
    (tmp_path / "m.yaml").write_text(MANIFEST)
    return tmp_path


def test_bench_outputs(bench_dir):
    assert main(["bench", "--manifest", str(bench_dir / "m.yaml"), "--workers", "1"]) == 0
    out = bench_dir / "out"
    lines = (out / "report.csv").read_text().splitlines()
    assert lines[0].startswith("dataset,rmse:nsfts,rmse:time-variant,rmse:incremental-ensemble,mape_pct:nsfts")
    assert [ln.split(",")[0] for ln in lines[1:]] == ["sudden-mean", "flat", "real"]
    doc = json.loads((out / "report.json").read_text())
    assert len(doc["cells"]) == 9 and not doc["errors"]
    assert all(np.isfinite(c["u2"]) for c in doc["cells"])
    trace = (out / "trace" / "sudden-mean_nsfts.csv").read_text().splitlines()
    assert trace[0] == "t,y,yhat,eps,fallback,warmup,delta_min,delta_max,rho_max"
    assert len(trace) == 1 + 90 and trace[1].startswith("210,")
    tv = (out / "trace" / "flat_time-variant.csv").read_text().splitlines()[1]
    assert tv.endswith(",,,")


def test_bench_is_deterministic_across_worker_counts(bench_dir):
    a, b = bench_dir / "a", bench_dir / "b"
    assert main(["bench", "--manifest", str(bench_dir / "m.yaml"), "--out", str(a), "--workers", "1"]) == 0
    assert main(["bench", "--manifest", str(bench_dir / "m.yaml"), "--out", str(b), "--workers", "2"]) == 0
    for name in ("report.csv", "cells.csv", "report.json", "trace/real_nsfts.csv"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_bench_flags_change_options(bench_dir):
    out = bench_dir / "o"
    assert main(["bench", "--manifest", str(bench_dir / "m.yaml"), "--out", str(out), "--workers", "1",
                 "--seed", "9", "--no-normalize", "--sigma-squared", "--exclude-fallback"]) == 0
    doc = json.loads((out / "report.json").read_text())
    assert doc["seed"] == 9 and doc["datasets"][0]["synthetic"]["seed"] == 9
    assert doc["options"]["normalize"] is False and doc["options"]["sigma_squared"] is True


def test_missing_csv_fails_validation(bench_dir, capsys):
    (bench_dir / "data.csv").unlink()
    assert main(["bench", "--manifest", str(bench_dir / "m.yaml")]) == 1
    assert "file not found" in capsys.readouterr().err
    assert not (bench_dir / "out").exists()


@pytest.mark.parametrize("edit,msg", [
    (lambda s: s.replace("seed: 3\n", ""), "seed"),
    (lambda s: s.replace("version: 1", "version: 2"), "version"),
    (lambda s: s.replace("time-variant,", "arima,"), "unknown method"),
    (lambda s: s.replace("sudden-mean,", "bogus,"), "unknown drift kind"),
    (lambda s: s.replace("{k: 20,", "{kk: 20,"), "unknown key"),
])
def test_manifest_validation(bench_dir, capsys, edit, msg):
    (bench_dir / "m.yaml").write_text(edit(MANIFEST))
    assert main(["bench", "--manifest", str(bench_dir / "m.yaml")]) == 1
    assert msg in capsys.readouterr().err


def test_failing_cell_is_isolated(bench_dir, capsys):
    # W larger than the series makes the meta-model cells fail at run time
    (bench_dir / "m.yaml").write_text(MANIFEST.replace("W: 60", "W: 400"))
    assert main(["bench", "--manifest", str(bench_dir / "m.yaml"), "--workers", "1"]) == 2
    err = capsys.readouterr().err
    assert "time-variant failed" in err
    doc = json.loads((bench_dir / "out" / "report.json").read_text())
    assert {c["method"] for c in doc["cells"]} == {"nsfts"} and len(doc["errors"]) == 6
    assert (bench_dir / "out" / "trace" / "real_nsfts.csv").exists()


def test_generate(tmp_path, capsys):
    assert main(["generate", "--kind", "sudden-mean", "--seed", "7", "--length", "1000",
                 "--out", str(tmp_path / "a.csv")]) == 0
    assert main(["generate", "--kind", "sudden-mean", "--seed", "7", "--length", "1000",
                 "--out", str(tmp_path / "b.csv")]) == 0
    a = (tmp_path / "a.csv").read_bytes()
    assert a == (tmp_path / "b.csv").read_bytes() and len(a.splitlines()) == 1000
    assert main(["generate", "--kind", "stationary", "--seed", "1", "--length", "100", "--header"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[0] == "value" and len(out) == 101


def test_generate_bad_kind_lists_kinds(capsys):
    with pytest.raises(SystemExit) as e:
        main(["generate", "--kind", "bogus", "--seed", "1"])
    assert e.value.code == 1
    err = capsys.readouterr().err
    assert all(k in err for k in KINDS)


def test_generate_invalid_spec(capsys):
    assert main(["generate", "--kind", "stationary", "--seed", "1", "--length", "10"]) == 1
    assert "length" in capsys.readouterr().err


def _series(tmp_path):
    assert main(["generate", "--kind", "incremental-mean", "--seed", "2", "--length", "1400",
                 "--out", str(tmp_path / "all.csv")]) == 0
    lines = (tmp_path / "all.csv").read_text().splitlines(keepends=True)
    (tmp_path / "train.csv").write_text("".join(lines[:400]))
    (tmp_path / "b.csv").write_text("".join(lines[400:]))
    (tmp_path / "b1.csv").write_text("".join(lines[400:900]))
    (tmp_path / "b2.csv").write_text("".join(lines[900:]))
    return lines


def test_forecast_rows_and_checkpoint_resume(tmp_path, capsys):
    _series(tmp_path)
    capsys.readouterr()
    assert main(["forecast", "--train", str(tmp_path / "train.csv"), "--input", str(tmp_path / "b.csv")]) == 0
    whole = capsys.readouterr().out.splitlines()
    assert whole[0] == "t,y,forecast,fallback" and len(whole) == 1 + 1000

    assert main(["forecast", "--train", str(tmp_path / "train.csv"), "--input", str(tmp_path / "b1.csv"),
                 "--checkpoint", str(tmp_path / "ck.json")]) == 0
    first = capsys.readouterr().out.splitlines()
    assert main(["forecast", "--model", str(tmp_path / "ck.json"), "--input", str(tmp_path / "b2.csv")]) == 0
    second = capsys.readouterr().out.splitlines()
    rows = [r.split(",", 1)[1] for r in first[1:] + second[1:]]
    assert rows == [r.split(",", 1)[1] for r in whole[1:]]


def test_forecast_empty_input(tmp_path, capsys):
    _series(tmp_path)
    (tmp_path / "empty.csv").write_text("")
    capsys.readouterr()
    assert main(["forecast", "--train", str(tmp_path / "train.csv"), "--input", str(tmp_path / "empty.csv")]) == 0
    assert capsys.readouterr().out.splitlines() == ["t,y,forecast,fallback"]


def test_forecast_rejects_version_mismatch(tmp_path, capsys):
    _series(tmp_path)
    main(["forecast", "--train", str(tmp_path / "train.csv"), "--input", str(tmp_path / "b1.csv"),
          "--checkpoint", str(tmp_path / "ck.json")])
    doc = json.loads((tmp_path / "ck.json").read_text())
    doc["version"] = 99
    (tmp_path / "ck.json").write_text(json.dumps(doc))
    capsys.readouterr()
    assert main(["forecast", "--model", str(tmp_path / "ck.json"), "--input", str(tmp_path / "b2.csv")]) == 1
    assert "version 99" in capsys.readouterr().err


def test_forecast_missing_file(tmp_path, capsys):
    assert main(["forecast", "--train", str(tmp_path / "nope.csv"), "--input", str(tmp_path / "x.csv")]) == 1
    assert "no such file" in capsys.readouterr().err


def test_console_entry_point(tmp_path):
    r = subprocess.run([sys.executable, "-m", "nsfts", "generate", "--kind", "stationary", "--seed", "1",
                        "--length", "100"], capture_output=True, text=True, check=True)
    assert len(r.stdout.splitlines()) == 100
