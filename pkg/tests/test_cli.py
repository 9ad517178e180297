import json
import subprocess
import sys
from pathlib import Path

import pytest

from polar_po.cli import build_parser, main

GOLDEN = Path(__file__).parent / "golden"
COMMANDS = ["evolve", "check-po", "enumerate", "verify", "construct", "simulate", "convmap"]


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.mark.parametrize("cmd", COMMANDS)
def test_help_for_every_subcommand(cmd, capsys):
    code, out, _ = run(capsys, cmd, "--help")
    assert code == 0 and "--out-dir" in out and "--threads" in out


def test_every_option_has_help_text():
    parser = build_parser()
    sub = next(a for a in parser._actions if a.dest == "command")
    for name, p in sub.choices.items():
        for a in p._actions:
            if a.option_strings and a.dest not in ("help",):
                assert a.help or a.choices or a.default is not None or a.required, (name, a.dest)


@pytest.mark.parametrize("golden,argv", [
    ("evolve_punc14.json", ["evolve", "--spec", "punc:1/4", "--path", "100", "101", "110", "111"]),
    ("convmap_5.json", ["convmap", "--K", "5"]),
    ("construct_pw16.json", ["construct", "--method", "pw", "--spec", "punc:1/4", "--N", "16", "--K", "6"]),
    ("check_po.json", ["check-po", "--spec", "punc:1/4", "--a", "0111", "--b", "1000"]),
])
def test_golden_outputs(golden, argv, capsys):
    code, out, _ = run(capsys, *argv)
    assert code == 0
    assert json.loads(out) == json.loads((GOLDEN / golden).read_text())


def test_evolve_value(capsys):
    code, out, _ = run(capsys, "evolve", "--spec", "punc:1/4", "--path", "01", "--x", "0.5")
    rec = json.loads(out)["paths"][0]
    assert code == 0 and rec["value"] == pytest.approx(0.75) and "polynomial" not in rec


def test_out_dir_and_manifest(tmp_path, capsys):
    code, out, err = run(capsys, "construct", "--method", "ga", "--spec", "short:1/4", "--N", "32", "--K", "16",
                         "--config", "--out-dir", str(tmp_path))
    assert code == 0 and err == ""
    names = {p.name for p in tmp_path.iterdir()}
    assert names == {"construct.json", "scores.csv", "code.json", "manifest.json"}
    man = json.loads((tmp_path / "manifest.json").read_text())
    assert man["command"] == "construct" and set(man["outputs"]) == names - {"manifest.json"}
    assert len((tmp_path / "scores.csv").read_text().splitlines()) == 33


def test_construct_then_simulate(tmp_path, capsys):
    assert run(capsys, "construct", "--method", "pw", "--spec", "punc:1/4", "--N", "64", "--K", "32",
               "--config", "--out-dir", str(tmp_path))[0] == 0
    csv = tmp_path / "fer.csv"
    code, out, err = run(capsys, "simulate", "--config", str(tmp_path / "code.json"), "--snr", "1:1:2",
                         "--list", "1,2", "--max-trials", "200", "--target-errors", "5", "--out", str(csv))
    assert code == 0
    res = json.loads(out)
    assert [(p["snr_db"], p["L"]) for p in res["points"]] == [(1.0, 1), (1.0, 2), (2.0, 1), (2.0, 2)]
    assert len(csv.read_text().splitlines()) == 5
    assert json.loads(err)["seed"] == 0


def test_construct_improved_with_pairs_file(tmp_path, capsys):
    assert run(capsys, "enumerate", "--spec", "punc:1/4", "--N", "32", "--pairs", "combined",
               "--out-dir", str(tmp_path))[0] == 0
    code, out, _ = run(capsys, "construct", "--method", "improved", "--spec", "punc:1/4", "--N", "32", "--K", "12",
                       "--pairs", str(tmp_path / "pairs.json"))
    res = json.loads(out)
    assert code == 0 and len(res["info_set"]) == 12 and res["pairs_used"] > 0


def test_enumerate_and_verify(capsys):
    code, out, _ = run(capsys, "enumerate", "--spec", "punc:1/4", "--N", "16", "--hook", "classic")
    res = json.loads(out)
    assert code == 0 and res["candidates"] == 66 and res["config"]["mother_po_hook"] == "classic"
    code, out, _ = run(capsys, "verify", "--suite", "appendixB", "--N-max", "8", "--draws", "50")
    assert code == 0 and json.loads(out)["passed"]
    code, out, _ = run(capsys, "verify", "--suite", "convmap", "--K-max", "64")
    assert code == 0 and json.loads(out)["convmap"]["failures"] == []


def test_check_po_bmsc(capsys):
    code, out, _ = run(capsys, "check-po", "--spec", "punc:1/4", "--a", "01", "--b", "10", "--sense", "bmsc")
    assert code == 0 and json.loads(out)["sense"] == "BMSC"


@pytest.mark.parametrize("argv", [
    ["evolve", "--spec", "punc:2/4", "--path", "01"],
    ["evolve", "--spec", "punc:1/4", "--path", "0"],
    ["convmap", "--K", "0"],
    ["simulate", "--config", "/nonexistent/code.json", "--snr", "1"],
    ["simulate", "--config", "x", "--snr", "a:b"],
    ["construct", "--method", "pw", "--spec", "none", "--N", "12", "--K", "3"],
    ["bogus"],
    ["enumerate", "--spec", "punc:1/4"],
])
def test_usage_errors_exit_2(argv, capsys):
    code, _, err = run(capsys, *argv)
    assert code == 2 and err


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "polar_po", "--version"], capture_output=True, text=True)
    assert r.returncode == 0 and r.stdout.startswith("polar-po ")
