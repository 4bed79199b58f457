import json
import subprocess
import sys

import pytest

from exmix.cli import build_parser, main


@pytest.fixture
def c6_file(tmp_path):
    path = tmp_path / "c6.txt"
    assert main(["gen", "--family", "cycle", "--n", "6", "--out", str(path)]) == 0
    return path


def _run(args, capsys):
    code = main(args)
    return code, capsys.readouterr()


def test_every_subcommand_has_help():
    p = build_parser()
    for cmd in ("gen", "spectral", "simulate", "chameleon", "exact", "diag", "suite"):
        with pytest.raises(SystemExit) as e:
            p.parse_args([cmd, "--help"])
        assert e.value.code == 0


def test_gen_and_spectral(c6_file, capsys):
    code, out = _run(["spectral", "--graph", str(c6_file), "--eps", "0.25"], capsys)
    assert code == 0
    payload = json.loads(out.out)
    assert payload["graph"] == "c6"  # the edge-list format names graphs after the file
    assert payload["functionals"]


def test_exact_to_file(c6_file, tmp_path, capsys):
    dest = tmp_path / "ex.json"
    code, _ = _run(["exact", "--graph", str(c6_file), "--k", "2", "--json", str(dest)], capsys)
    assert code == 0
    payload = json.loads(dest.read_text())
    assert payload["states"] == 15 and payload["gap"] > 0


def test_simulate(c6_file, capsys):
    code, out = _run(["simulate", "--graph", str(c6_file), "--process", "ip", "--k", "2", "--t", "1.0", "--trials", "2000"], capsys)
    assert code == 0
    payload = json.loads(out.out)
    assert payload["max_abs_error"] < 0.1
    assert len(payload["particle_marginals"]) == 2


def test_chameleon(c6_file, capsys):
    args = ["chameleon", "--graph", str(c6_file), "--t-round", "5", "--burn-in", "10", "--trials", "500", "--goodness-trials", "300"]
    code, out = _run(args, capsys)
    assert code == 0
    assert json.loads(out.out)["summary"]["trials"] == 500


@pytest.mark.parametrize("suite", ["nice", "chernoff", "na", "white", "blackld"])
def test_diag(c6_file, capsys, suite):
    code, out = _run(["diag", "--suite", suite, "--graph", str(c6_file), "--k", "2", "--trials", "2000"], capsys)
    assert code == 0
    assert "verdict" in json.loads(out.out) or suite == "white"


def test_suite_from_config(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"graph": {"family": "complete", "params": {"n": 4}}, "suites": ["spectral"]}))
    out_path = tmp_path / "report.json"
    code, out = _run(["suite", "--config", str(cfg), "--out", str(out_path)], capsys)
    assert code == 0 and "pass=" in out.out
    assert json.loads(out_path.read_text())["summary"]["fail"] == 0


def test_user_error_exit_code(tmp_path, capsys):
    code, out = _run(["gen", "--family", "hypercube", "--dim", "0", "--out", str(tmp_path / "x.txt")], capsys)
    assert code == 2 and "exmix: error" in out.err


def test_console_script_entry():
    res = subprocess.run([sys.executable, "-m", "exmix.cli", "--help"], capture_output=True, text=True)
    assert res.returncode == 0 and "gen" in res.stdout
