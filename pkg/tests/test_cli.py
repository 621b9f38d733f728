"""
tests/test_cli.py

Goal:
- Exercise services.cli end to end: every subcommand, the exit codes and the
  byte-stable JSON lines of `verify`.
- The __main__ path is covered through runpy with a sanitized sys.argv.
"""

import json
import runpy
import sys
from pathlib import Path

import pandas as pd
import pytest

from engine.report import IdentityReport
from services.cli import main

GOLDEN = Path(__file__).parent / "golden"


@pytest.fixture
def cfg_file(clean_env):
    path = clean_env / "config.yaml"
    path.write_text("series:\n  order: 10\n  z_range: 2\n", encoding="utf-8")
    return str(path)


def test_char_fib_text(cfg_file, capsys):
    assert main(["--config", cfg_file, "char", "fib", "--n", "3", "--l", "1"]) == 0
    assert capsys.readouterr().out.strip() == "1 + z(1+q+q^2) + z^2 q^2"


def test_char_fib_brute_json(cfg_file, capsys):
    assert main(["--config", cfg_file, "char", "fib", "--n", "2", "--l", "1", "--method", "brute", "--json"]) == 0
    assert json.loads(capsys.readouterr().out) == [[0, 0, "1"], [1, 0, "1"], [1, 1, "1"]]


def test_char_inf_table(cfg_file, capsys):
    assert main(["--config", cfg_file, "char", "inf", "--theta", "1", "--l", "1", "--order", "4", "--zmin", "-1", "--zmax", "1"]) == 0
    out = capsys.readouterr().out
    assert "1+q+2q^2+3q^3+5q^4" in out


def test_char_inf_brute_matches_closed(cfg_file, capsys):
    base = ["--config", cfg_file, "char", "inf", "--theta", "0", "--l", "1", "--order", "6", "--zmin", "-3", "--zmax", "3", "--json"]
    assert main(base) == 0
    closed = json.loads(capsys.readouterr().out)
    assert main(base + ["--method", "brute"]) == 0
    brute = json.loads(capsys.readouterr().out)
    assert closed == brute
    assert closed["z_window"] == [-3, 3]


def test_char_voa_offset(cfg_file, capsys):
    assert main(["--config", cfg_file, "char", "voa", "--i", "1", "--N", "2", "--json"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["q_offset"] == "-1/4"
    assert doc["order"] == 10


def test_verify_single_identity(cfg_file, capsys):
    assert main(["--config", cfg_file, "verify", "durfee-l0", "--s", "1", "--no-timing"]) == 0
    report = IdentityReport.from_json(capsys.readouterr().out.strip())
    assert report.match
    assert report.params == {"s": 1}
    assert report.elapsed_ms == 0


def test_verify_mismatch_exit_code(cfg_file, capsys):
    code = main(["--config", cfg_file, "verify", "durfee", "--l", "1", "--n", "0", "--m", "0", "--perturb", "1:1"])
    assert code == 1
    report = IdentityReport.from_json(capsys.readouterr().out.strip())
    assert not report.match


def test_verify_literal_final_theta_zero(cfg_file):
    assert main(["--config", cfg_file, "verify", "final-theta-zero", "--l", "2", "--literal"]) == 1
    assert main(["--config", cfg_file, "verify", "final-theta-zero", "--l", "2"]) == 0


def test_verify_all_is_byte_stable(clean_env, capsys):
    cfg = clean_env / "small.yaml"
    cfg.write_text(
        "series:\n  order: 8\nsuite:\n  checks: [jacobi, durfee-l0, rogers-ramanujan]\n  slice_range: 1\n",
        encoding="utf-8",
    )
    first, second = clean_env / "a.jsonl", clean_env / "b.jsonl"
    summary = clean_env / "summary.csv"
    args = ["--config", str(cfg), "verify", "all", "--no-timing"]
    assert main(args + ["--out", str(first), "--summary", str(summary)]) == 0
    assert main(args + ["--out", str(second)]) == 0
    assert first.read_bytes() == second.read_bytes()
    lines = first.read_text(encoding="utf-8").splitlines()
    assert len(lines) == 6
    assert [json.loads(line)["identity_id"] for line in lines][:2] == ["jacobi", "durfee-l0"]
    frame = pd.read_csv(summary)
    assert frame["match"].all()
    assert "[cli] wrote summary" in capsys.readouterr().err


def test_verify_all_empty_checks(clean_env, capsys):
    cfg = clean_env / "none.yaml"
    cfg.write_text("suite:\n  checks: []\n", encoding="utf-8")
    assert main(["--config", str(cfg), "verify", "all"]) == 0
    assert capsys.readouterr().out == ""


def test_durfee_classify(cfg_file, capsys):
    assert main(["--config", cfg_file, "durfee", "classify", "--parts", "4,3,1", "--l", "1"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[0] == "Rect k=1 i=1"
    assert out[1:] == ["  contains 1x2: yes", "  contains 2x4: no", "  contains 2x3: yes"]


def test_durfee_census(cfg_file, capsys):
    assert main(["--config", cfg_file, "durfee", "census", "--max-n", "4", "--l", "1", "--n", "1", "--m", "1"]) == 0
    out = capsys.readouterr().out
    assert "norect" in out
    assert "count" in out.splitlines()[0]


def test_render_writes_file(cfg_file, clean_env):
    out = clean_env / "fig.svg"
    assert main(["--config", cfg_file, "render", "durfee", "--parts", "4,3,1", "--l", "1", "--out", str(out)]) == 0
    assert "Rect k=1 i=1" in out.read_text(encoding="utf-8")


@pytest.mark.parametrize(
    "argv",
    [
        ["durfee", "classify", "--parts", "1,2"],
        ["char", "inf", "--theta", "3", "--l", "1"],
        ["char", "voa", "--i", "2", "--N", "2"],
        ["verify", "zslice", "--theta", "0", "--l", "1", "--s", "0", "--form", "nope"],
        ["verify", "jacobi", "--s", "1"],
        ["verify", "p-limit", "--l", "1", "--perturb", "5:1"],
    ],
)
def test_invalid_input_exits_2(cfg_file, capsys, argv):
    assert main(["--config", cfg_file, *argv]) == 2
    assert "[cli] error:" in capsys.readouterr().err


@pytest.mark.parametrize(
    "argv",
    [
        ["char", "inf", "--theta", "0", "--l", "1", "--order", "-1"],
        ["char", "inf", "--theta", "0", "--l", "1", "--zmin", "2", "--zmax", "1"],
        ["char", "fib", "--n", "3"],
        ["verify", "nope"],
        ["verify", "all", "--perturb", "0:1"],
        ["verify", "jacobi", "--perturb", "x"],
        ["durfee", "census"],
        ["render", "family", "--out", "x.svg"],
    ],
)
def test_bad_flags_exit_2(cfg_file, argv):
    with pytest.raises(SystemExit) as exc:
        main(["--config", cfg_file, *argv])
    assert exc.value.code == 2


def test_module_entry_point(cfg_file, monkeypatch, capsys):
    monkeypatch.setattr(sys, "argv", ["fibcfg", "--config", cfg_file, "char", "fib", "--n", "1", "--l", "0"])
    with pytest.raises(SystemExit) as exc:
        runpy.run_module("services.cli", run_name="__main__")
    assert exc.value.code == 0
    assert capsys.readouterr().out.strip() == "1 + z"


@pytest.mark.parametrize(
    "extra,golden,code",
    [
        ([], "verify_durfee_l1.jsonl", 0),
        (["--perturb", "1:1"], "verify_durfee_l1_perturbed.jsonl", 1),
    ],
)
def test_verify_report_matches_golden(cfg_file, clean_env, extra, golden, code):
    out = clean_env / "report.jsonl"
    argv = ["--config", cfg_file, "verify", "durfee", "--l", "1", "--n", "0", "--m", "0", "--order", "10"]
    assert main(argv + extra + ["--no-timing", "--out", str(out)]) == code
    assert out.read_bytes() == (GOLDEN / golden).read_bytes()


def test_render_matches_golden(cfg_file, clean_env):
    out = clean_env / "fig.svg"
    assert main(["--config", cfg_file, "render", "durfee", "--parts", "4,3,1", "--l", "1", "--out", str(out)]) == 0
    assert out.read_bytes() == (GOLDEN / "durfee_4_3_1_l1.svg").read_bytes()
