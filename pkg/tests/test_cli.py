import csv
import io
import json
import subprocess
import sys

import pytest

from chartax import report
from chartax.cli import main

FAST_COMMANDS = {
    "characters": ["characters", "--D", "12"],
    "distance": ["distance", "--D", "5", "--x", "2e4", "--g", "moebius"],
    "halasz": ["distance", "--kind", "halasz", "--x", "2e4", "--Y", "100", "--T", "5", "--g", "random", "--seed", "3"],
    "dichotomy": ["dichotomy", "--D", "5,7", "--x", "1e4", "--support", "all", "random:0.5", "--r", "2"],
    "taxonomy": ["taxonomy", "--D", "5", "--x", "1e4", "--g", "liouville", "--refine-real"],
    "largesieve": ["largesieve", "--D", "13", "--J", "3", "--H", "50", "--N", "400", "--Q", "30", "--instances", "3"],
    "smooth": ["smooth", "--x", "1e4", "--D", "6,7", "--c", "0.5", "--chain"],
    "verify": ["verify", "--only", "1,6"],
}


def _run(argv, capsys):
    code = main(argv)
    return code, capsys.readouterr().out


@pytest.mark.parametrize("name", sorted(FAST_COMMANDS))
def test_report_matches_schema(name, capsys):
    code, out = _run(FAST_COMMANDS[name], capsys)
    rep = json.loads(out)
    report.validate(rep)
    assert rep["subcommand"] == FAST_COMMANDS[name][0]
    assert rep["schema_version"] == report.SCHEMA_VERSION
    assert code == (0 if rep["result"]["ok"] else 1)


@pytest.mark.parametrize("name", ["taxonomy", "largesieve", "dichotomy"])
def test_output_is_byte_identical(name, capsys):
    first = _run(FAST_COMMANDS[name], capsys)[1]
    second = _run(FAST_COMMANDS[name], capsys)[1]
    assert first == second


def test_seed_changes_random_output(capsys):
    base = ["largesieve", "--D", "13", "--J", "3", "--H", "50", "--N", "400"]
    a = _run(base + ["--seed", "1"], capsys)[1]
    b = _run(base + ["--seed", "2"], capsys)[1]
    assert a != b


def test_taxonomy_example(capsys):
    code, out = _run(["taxonomy", "--D", "4", "--x", "1e4", "--g", "moebius"], capsys)
    res = json.loads(out)["result"]
    assert code == 0
    assert res["beta"] == pytest.approx(1.0) and res["r"] == 2
    assert res["omega"] == pytest.approx(1 / 128)


def test_smooth_example(capsys):
    code, out = _run(["smooth", "--x", "100", "--D", "4", "--c", "1", "--a", "1", "--k", "1"], capsys)
    assert code == 0
    assert json.loads(out)["result"]["cells"][0]["count"] == 1


def test_big_int_forms(capsys):
    a = json.loads(_run(["smooth", "--x", "1e4", "--D", "6"], capsys)[1])
    b = json.loads(_run(["smooth", "--x", "10**4", "--D", "6"], capsys)[1])
    assert a["result"] == b["result"]


def test_csv_output(capsys):
    code, out = _run(["characters", "--D", "8", "--format", "csv"], capsys)
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and len(rows) == 4
    assert {"index", "order", "real"} <= set(rows[0])


def test_out_file(tmp_path, capsys):
    path = tmp_path / "r.json"
    code, out = _run(["characters", "--D", "7", "--out", str(path)], capsys)
    assert code == 0 and out == ""
    report.validate(json.loads(path.read_text()))


@pytest.mark.parametrize(
    "argv",
    [
        ["taxonomy", "--D", "5", "--x", "1e4", "--eps", "0.5"],
        ["taxonomy", "--D", "6", "--x", "1e4", "--a", "3"],
        ["taxonomy", "--D", "5000", "--x", "1e4"],
        ["distance", "--D", "5", "--x", "1"],
        ["largesieve", "--D", "7", "--J", "9", "--H", "10"],
        ["dichotomy", "--D", "7", "--x", "1e4", "--support", "bogus"],
        ["dichotomy", "--D", "8", "--x", "1e4", "--extremal", "2"],
        ["smooth", "--x", "1.5", "--D", "2"],
        ["characters", "--D", "7", "--threads", "0"],
        ["verify", "--only", "14"],
    ],
)
def test_precondition_violations_exit_2(argv, capsys):
    with pytest.raises(SystemExit) as exc:
        main(argv)
    assert exc.value.code == 2
    assert capsys.readouterr().out == ""


def test_failed_check_exits_1(monkeypatch, capsys):
    from chartax import cli

    monkeypatch.setattr(cli, "cmd_characters", lambda args: ({"ok": False, "modulus": 3, "phi": 2,
                                                              "exponent": 2, "components": [], "characters": []}, []))
    parser = cli.build_parser
    monkeypatch.setattr(cli, "build_parser", lambda: _patched(parser(), cli.cmd_characters))
    assert cli.main(["characters", "--D", "3"]) == 1


def _patched(parser, func):
    for action in parser._subparsers._group_actions:
        action.choices["characters"].set_defaults(func=func)
    return parser


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "chartax", "characters", "--D", "5"], capture_output=True, text=True)
    assert proc.returncode == 0
    report.validate(json.loads(proc.stdout))
