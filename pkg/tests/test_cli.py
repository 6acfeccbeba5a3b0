import csv
import json

import pytest

from neckforge import cli
from neckforge.errors import ConfigError


def run(args, tmp_path, name="out"):
    out = tmp_path / name
    code = cli.main(["run", "--out", str(out)] + args)
    return code, out


def test_no_command_is_usage_error(capsys):
    assert cli.main([]) == 2


def test_constants_json(tmp_path):
    code, out = run(["--suite", "constants"], tmp_path)
    assert code == 0
    doc = json.loads((out / "constants.json").read_text())
    assert doc["suite"] == "constants"
    assert doc["resolved_config"]["sigma_exp"] == -150.0
    assert doc["checks"]
    for c in doc["checks"]:
        assert set(c) == {"name", "value", "bound", "ratio", "pass", "paper_anchor"}
        assert c["pass"] is True


def test_byte_identical_reruns(tmp_path):
    _, out = run(["--suite", "glue"], tmp_path)
    first = {p.name: p.read_bytes() for p in out.iterdir()}
    _, out = run(["--suite", "glue"], tmp_path)
    assert first == {p.name: p.read_bytes() for p in out.iterdir()}


def test_csv_format(tmp_path):
    code, out = run(["--suite", "potentials", "--format", "csv"], tmp_path)
    assert code == 0
    with open(out / "potentials_checks.csv", newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert rows and all(r["pass"] == "true" for r in rows)
    cfg = dict(csv.reader(open(out / "potentials_config.csv", newline="")))
    assert cfg["format"] == "csv"
    assert b"\r\n" not in (out / "potentials_checks.csv").read_bytes()


def test_config_file_and_override(tmp_path):
    conf = tmp_path / "run.cfg"
    conf.write_text("# comment\nsuite = constants\nseed = 7\nsigma-exp = -120\n")
    code, out = run(["--config", str(conf), "--seed", "3"], tmp_path)
    assert code == 0
    doc = json.loads((out / "constants.json").read_text())
    assert doc["resolved_config"]["seed"] == 3
    assert doc["resolved_config"]["sigma_exp"] == -120.0


@pytest.mark.parametrize("text", ["bogus = 1\n", "seed 3\n", "seed = x\n"])
def test_bad_config_exits_2(tmp_path, text, capsys):
    conf = tmp_path / "bad.cfg"
    conf.write_text(text)
    assert cli.main(["run", "--config", str(conf), "--out", str(tmp_path / "o")]) == 2
    assert "configuration error" in capsys.readouterr().err


@pytest.mark.parametrize("args", [["--suite", "nope"], ["--format", "xml"], ["--n", "1"],
                                  ["--sigma-exp", "-10"], ["--alpha", "0.3"], ["--b", "1e-6"],
                                  ["--grid-nodes", "5"], ["--tol", "0"], ["--delta0", "-1"]])
def test_invalid_values_exit_2(tmp_path, args):
    assert run(args, tmp_path)[0] == 2


def test_missing_config_file(tmp_path):
    with pytest.raises(ConfigError):
        cli.parse_config_file(tmp_path / "missing.cfg")


def test_threads_env(tmp_path, monkeypatch):
    monkeypatch.setenv("NECKFORGE_THREADS", "0")
    assert run(["--suite", "constants"], tmp_path)[0] == 2
    monkeypatch.setenv("NECKFORGE_THREADS", "2")
    code, out = run(["--suite", "constants"], tmp_path, "par")
    assert code == 0


def test_failure_exit_1(tmp_path, monkeypatch):
    from neckforge import suites

    def broken(cfg, r):
        r.add("always_fails", 1.0, 0.0, False, "none")
    monkeypatch.setitem(suites.RUNNERS, "constants", broken)
    assert run(["--suite", "constants"], tmp_path)[0] == 1


def test_suite_error_is_reported(tmp_path, monkeypatch, capsys):
    from neckforge import suites

    def crash(cfg, r):
        raise RuntimeError("boom")
    monkeypatch.setitem(suites.RUNNERS, "constants", crash)
    code, out = run(["--suite", "constants"], tmp_path)
    assert code == 1
    assert json.loads((out / "constants.json").read_text())["error"] == "RuntimeError: boom"
    assert "ERROR constants" in capsys.readouterr().out


def test_figures_opt_in(tmp_path):
    _, out = run(["--suite", "toy"], tmp_path)
    assert not (out / "figures").exists()
    code, out = run(["--suite", "toy", "--figures"], tmp_path, "fig")
    assert code == 0
    assert (out / "figures" / "toy_toy_sweep.png").stat().st_size > 0
