import json

import pytest
import yaml

from ergodiclab import cli, presets

CONSTANT = {
    "name": "constant-step",
    "lab": "cocycle",
    "driving": {"kind": "iid", "seed": 3, "params": {"dist": "constant", "value": 1.0}},
    "space": {"model": "euclidean", "dim": 1},
    "cocycle": {"n": 100, "trials": 2, "expected_alpha": 1.0},
}

GAUSS = {
    "name": "gauss-plane",
    "lab": "cocycle",
    "seeds": [4, 5, 6],
    "driving": {"kind": "iid", "seed": 4, "params": {"dist": "normal", "mean": 0.5, "dim": 2}},
    "space": {"model": "euclidean", "dim": 2},
    "cocycle": {"n": 2000, "trials": 4},
}

# every in-scope result, one tag each
EXPECTED_TAGS = [
    "aaronson", "aaronson-weiss", "birkhoff", "birkhoff-boundary", "convergence", "drift", "fk",
    "gauge-metrics", "harmonic-functions", "horofunction", "kingman", "liouville-character",
    "log-integrable", "mz", "oseledets", "ray-cat0", "ray-hyperbolic", "record-times", "skew-product",
    "stationary-measure", "subexponential",
]


def write_cfg(tmp_path, cfg, name="cfg.yaml"):
    f = tmp_path / name
    f.write_text(yaml.safe_dump(cfg))
    return f


def snapshot(out):
    files = {}
    for f in sorted(out.iterdir()):
        if f.name == "report.json":
            rep = json.loads(f.read_text())
            del rep["provenance"]["timestamp"]
            files[f.name] = json.dumps(rep, sort_keys=True).encode()
        else:
            files[f.name] = f.read_bytes()
    return files


@pytest.fixture(autouse=True)
def no_env_out(monkeypatch):
    monkeypatch.delenv(cli.OUT_ENV, raising=False)


def test_constant_translation_reports_alpha_one(tmp_path, capsys):
    out = tmp_path / "out"
    rc = cli.main(["run", "--config", str(write_cfg(tmp_path, CONSTANT)), "--out", str(out)])
    assert rc == 0
    rep = json.loads((out / "report.json").read_text())
    assert rep["estimates"]["3"]["alpha"] == 1.0
    assert rep["summary"]["fail"] == 0
    assert all(v["verdict"] == "pass" and v["tag"] for v in rep["verdicts"])
    assert set(rep["provenance"]) >= {"config_hash", "seeds", "version", "timestamp"}
    assert (out / "drift_s3.csv").exists() and (out / "drift_s3.dat").exists()
    assert "3 pass, 0 fail" in capsys.readouterr().out


def test_missing_space_is_a_schema_error(tmp_path, capsys):
    cfg = {k: v for k, v in CONSTANT.items() if k != "space"}
    rc = cli.main(["run", "--config", str(write_cfg(tmp_path, cfg)), "--out", str(tmp_path / "o")])
    assert rc == 2
    assert "'space'" in capsys.readouterr().err
    assert not (tmp_path / "o").exists()


def test_bad_field_path_reported(tmp_path, capsys):
    cfg = json.loads(json.dumps(CONSTANT))
    cfg["cocycle"]["n"] = "many"
    assert cli.main(["validate-config", "--config", str(write_cfg(tmp_path, cfg))]) == 2
    assert "cocycle" in capsys.readouterr().err


def test_validate_config(tmp_path, capsys):
    assert cli.main(["validate-config", "--config", str(write_cfg(tmp_path, CONSTANT))]) == 0
    assert "valid cocycle config" in capsys.readouterr().out
    assert cli.main(["validate-config", "--preset", "fk-free-group"]) == 0


def test_every_preset_validates():
    for name, _, _ in presets.list_presets():
        assert cli.main(["validate-config", "--preset", name]) == 0


def test_preset_catalog_covers_tags(capsys):
    assert presets.covered_tags() == sorted(EXPECTED_TAGS)
    assert sorted(presets.TAGS) == sorted(EXPECTED_TAGS)
    assert cli.main(["list-presets"]) == 0
    listing = capsys.readouterr().out
    for tag in EXPECTED_TAGS:
        assert f"[{tag}]" in listing
    # the out-of-scope final section has no preset
    assert "§" not in listing and "section" not in listing.lower()


def test_reproducible_outputs(tmp_path):
    f = write_cfg(tmp_path, GAUSS)
    a, b, c = tmp_path / "a", tmp_path / "b", tmp_path / "c"
    assert cli.main(["run", "--config", str(f), "--out", str(a)]) == 0
    assert cli.main(["run", "--config", str(f), "--out", str(b)]) == 0
    assert cli.main(["run", "--config", str(f), "--out", str(c), "--jobs", "3"]) == 0
    snap = snapshot(a)
    assert len(snap) > 3
    assert snap == snapshot(b) == snapshot(c)


def test_seed_offset_changes_seeds(tmp_path):
    f = write_cfg(tmp_path, GAUSS)
    assert cli.main(["run", "--config", str(f), "--out", str(tmp_path / "a"), "--seed-offset", "10"]) == 0
    rep = json.loads((tmp_path / "a" / "report.json").read_text())
    assert rep["provenance"]["seeds"] == [14, 15, 16]
    assert sorted(rep["estimates"]) == ["14", "15", "16"]


def test_output_directory_precedence(tmp_path, monkeypatch):
    cfg = dict(CONSTANT, out=str(tmp_path / "from_config"))
    f = write_cfg(tmp_path, cfg)
    monkeypatch.chdir(tmp_path)
    assert cli.main(["run", "--config", str(f)]) == 0
    assert (tmp_path / "from_config" / "report.json").exists()
    monkeypatch.setenv(cli.OUT_ENV, str(tmp_path / "from_env"))
    assert cli.main(["run", "--config", str(f)]) == 0
    assert (tmp_path / "from_env" / "report.json").exists()
    assert cli.main(["run", "--config", str(f), "--out", str(tmp_path / "from_flag")]) == 0
    assert (tmp_path / "from_flag" / "report.json").exists()
    monkeypatch.delenv(cli.OUT_ENV)
    f2 = write_cfg(tmp_path, CONSTANT, "plain.yaml")
    assert cli.main(["run", "--config", str(f2)]) == 0
    assert (tmp_path / "results" / "constant-step" / "report.json").exists()


def test_jobs_must_be_positive(tmp_path, capsys):
    assert cli.main(["run", "--config", str(write_cfg(tmp_path, CONSTANT)), "--jobs", "0"]) == 2
    assert "--jobs" in capsys.readouterr().err


def test_failing_check_exit_status(tmp_path):
    cfg = json.loads(json.dumps(CONSTANT))
    cfg["cocycle"]["expected_alpha"] = 2.0
    assert cli.main(["run", "--config", str(write_cfg(tmp_path, cfg)), "--out", str(tmp_path / "o")]) == 1
    rep = json.loads((tmp_path / "o" / "report.json").read_text())
    assert [v["check"] for v in rep["verdicts"] if v["verdict"] == "fail"] == ["drift_value"]


def test_unknown_preset(capsys):
    assert cli.main(["validate-config", "--preset", "no-such-preset"]) == 3
    assert "list-presets" in capsys.readouterr().err


def test_free_group_walk_config(tmp_path):
    cfg = {
        "name": "srw-f2",
        "lab": "walk",
        "seeds": [1],
        "space": {"group": "free_group", "rank": 2},
        "walk": {"n": 100000, "trials": 10, "nu": {"kind": "simple"}, "expected_drift": 0.5,
                 "fk": {"depth": 4, "samples": 10000}},
    }
    out = tmp_path / "o"
    assert cli.main(["run", "--config", str(write_cfg(tmp_path, cfg)), "--out", str(out)]) == 0
    rep = json.loads((out / "report.json").read_text())
    assert abs(rep["estimates"]["1"]["drift"] - 0.5) <= 0.01
    fk = [v for v in rep["verdicts"] if v["check"] == "furstenberg_khasminskii"]
    assert fk and fk[0]["verdict"] == "pass" and fk[0]["tag"] == "fk"
