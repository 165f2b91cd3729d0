"""End-to-end tests of the command-line entry point."""

from __future__ import annotations

import json

import pytest

from brauersdc.config import get_settings
from brauersdc.errors import EXIT_GUARD, EXIT_OK, EXIT_USAGE, EXIT_VERIFICATION
from brauersdc.main import main


@pytest.fixture(autouse=True)
def _fresh_settings(monkeypatch):
    monkeypatch.delenv("BRAUERSDC_GAUGE", raising=False)
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


# --- enum ---


def test_enum_order_three(capsys):
    assert main(["enum", "--f", "3", "--shape", "[1]"]) == EXIT_OK
    out = capsys.readouterr().out.splitlines()
    assert out == ["(1,-1,1)", "(1,1,-1)", "(1,2,-2)", "count=3 dimension=3"]


def test_enum_empty_shape(capsys):
    assert main(["enum", "--f", "2", "--shape", "[]"]) == EXIT_OK
    assert capsys.readouterr().out.splitlines()[0] == "(1,-1)"


def test_enum_parity_violation_is_empty(capsys):
    assert main(["enum", "--f", "3", "--shape", "[2]"]) == EXIT_OK
    assert capsys.readouterr().out.strip() == "count=0 dimension=0"


def test_enum_bad_shape_is_usage_error():
    assert main(["enum", "--f", "3", "--shape", "[1,2]"]) == EXIT_USAGE


# --- rep ---


def test_rep_check_forced_values(tmp_path, capsys):
    code = main(["rep", "--f", "2", "--shape", "[]", "--x", "5", "--check", "--out", str(tmp_path)])
    assert code == EXIT_OK
    dump = json.loads((tmp_path / "rep_f2_e__x5.json").read_text())
    assert dump["g"]["1"] == [[1.0]]
    assert dump["e"]["1"] == [[5.0]]
    relations = json.loads((tmp_path / "rep_f2_e__x5.relations.json").read_text())
    assert relations["passed"] is True
    assert all(c["passed"] for c in relations["relations"])
    assert relations["calibration"]["literal_g"] == "4/5"
    assert "calibration" in capsys.readouterr().out


def test_rep_relation_sweep_passes(tmp_path):
    assert main(["rep", "--f", "4", "--shape", "[2]", "--x", "7/2", "--check", "--out", str(tmp_path)]) == EXIT_OK


def test_rep_check_at_cancelled_ibar_diagonal(tmp_path):
    args = ["rep", "--f", "4", "--shape", "[1,1]", "--x", "5", "--check", "--out", str(tmp_path)]
    assert main(args) == EXIT_OK


def test_rep_literal_convention_fails_check(tmp_path):
    args = ["rep", "--f", "2", "--shape", "[]", "--x", "5", "--check", "--convention", "literal"]
    assert main(args + ["--out", str(tmp_path)]) == EXIT_VERIFICATION


def test_rep_guard(tmp_path):
    assert main(["rep", "--f", "4", "--shape", "[2]", "--x", "2", "--out", str(tmp_path)]) == EXIT_GUARD
    args = ["rep", "--f", "4", "--shape", "[2]", "--x", "2", "--allow-nonsemisimple", "--out", str(tmp_path)]
    assert main(args) in (EXIT_OK, EXIT_VERIFICATION)


def test_rep_requires_x():
    with pytest.raises(SystemExit) as exc:
        main(["rep", "--f", "2"])
    assert exc.value.code == 2


# --- graph ---


def test_graph_summary_and_files(tmp_path, capsys):
    args = ["graph", "--f", "3", "--shape", "[1]", "--f1", "2", "--shape1", "[]", "--shape2", "[1]"]
    assert main(args + ["--dot", "--layer", "1", "--out", str(tmp_path)]) == EXIT_OK
    out = capsys.readouterr().out
    assert "3 nodes, 0 edges" in out
    assert "i=1: crossing=0 hbridge=0 vbridge=2 singlet=1" in out
    assert (tmp_path / "f3_1__2_1__e__1.grid.json").exists()
    assert (tmp_path / "f3_1__2_1__e__1.layer1.dot").read_text().startswith("graph ")


def test_graph_single_node(tmp_path, capsys):
    args = ["graph", "--f", "2", "--shape", "[2]", "--f1", "1", "--shape1", "[1]", "--shape2", "[1]"]
    assert main(args + ["--out", str(tmp_path)]) == EXIT_OK
    assert "1 nodes, 0 edges" in capsys.readouterr().out


def test_graph_split_mismatch():
    args = ["graph", "--f", "3", "--shape", "[1]", "--f1", "2", "--f2", "2", "--shape1", "[]", "--shape2", "[1]"]
    assert main(args) == EXIT_USAGE


def test_graph_shape_outside_label_set(tmp_path):
    args = ["graph", "--f", "3", "--shape", "[1]", "--f1", "2", "--shape1", "[1]", "--shape2", "[1]"]
    assert main(args + ["--out", str(tmp_path)]) == EXIT_USAGE


# --- solve ---


SOLVE_ARGS = ["solve", "--f", "3", "--shape", "[1]", "--f1", "2", "--shape1", "[]", "--shape2", "[1]", "--x", "7/2"]


def test_solve_writes_table(tmp_path):
    assert main(SOLVE_ARGS + ["--csv", "--out", str(tmp_path)]) == EXIT_OK
    stem = "f3_1__2_1__e__1__x7_2"
    table = json.loads((tmp_path / f"{stem}.table.json").read_text())
    assert table["multiplicity"] == 1
    assert table["coefficients"]["<(1,-1,1);(1,-1),(1)>"][0] == pytest.approx(1.0)
    verification = json.loads((tmp_path / f"{stem}.verification.json").read_text())
    assert verification["passed"] is True
    lines = (tmp_path / f"{stem}.csv").read_text().splitlines()
    assert lines[0] == "w,w1,w2,eta,value"
    assert lines[1].startswith('"(1,-1,1)","(1,-1)",(1),1,')


def test_solve_stable_case(tmp_path):
    args = ["solve", "--f", "3", "--shape", "[2,1]", "--f1", "2", "--shape1", "[2]", "--shape2", "[1]", "--x", "5"]
    assert main(args + ["--out", str(tmp_path)]) == EXIT_OK
    solution = json.loads((tmp_path / "f3_2-1__2_1__2__1__x5.solution.json").read_text())
    assert solution["multiplicity"] == 1


def test_solve_is_deterministic(tmp_path):
    first, second = tmp_path / "a", tmp_path / "b"
    assert main(SOLVE_ARGS + ["--csv", "--out", str(first)]) == EXIT_OK
    assert main(SOLVE_ARGS + ["--csv", "--out", str(second)]) == EXIT_OK
    names = sorted(p.name for p in first.iterdir())
    assert names == sorted(p.name for p in second.iterdir())
    for name in names:
        assert (first / name).read_bytes() == (second / name).read_bytes()


def test_solve_requires_labels():
    args = ["solve", "--f", "3", "--shape", "[1]", "--f1", "2", "--x", "7/2"]
    assert main(args) == EXIT_USAGE


def test_solve_bad_x():
    args = SOLVE_ARGS[:-1] + ["seven"]
    assert main(args) == EXIT_USAGE


# --- sweep ---


def test_sweep_completeness_file(tmp_path):
    args = ["sweep", "--f", "3", "--shape", "[1]", "--f1", "2", "--x", "7/2", "--out", str(tmp_path)]
    assert main(args) == EXIT_OK
    dump = json.loads((tmp_path / "sweep_f3_1__2_1__x7_2.json").read_text())
    assert dump["total"] == dump["dimension"] == 3
    assert dump["passed"] is True
    assert dump["unitarity_residual"] < 1e-8


def test_solve_sweep_flag_matches_sweep(tmp_path):
    args = ["solve", "--f", "3", "--shape", "[1]", "--f1", "2", "--x", "7/2", "--sweep", "--out", str(tmp_path)]
    assert main(args) == EXIT_OK
    assert (tmp_path / "sweep_f3_1__2_1__x7_2.json").exists()
