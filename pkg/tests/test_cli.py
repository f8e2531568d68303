import json
import os

import pytest

from polyspace.cli import main


def test_classify_text(capsys):
    rc = main(["classify", "--lengths", "0,1,1,1", "--target", "planar"])
    out = capsys.readouterr().out
    assert rc == 0
    assert "⟨41⟩" in out and "S^1 u S^1" in out


def test_classify_json_with_morse(capsys):
    rc = main(["classify", "--lengths", "1,1,1,2", "--d", "3", "--format", "json"])
    assert rc == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["code"] == "⟨4⟩"
    assert payload["space"] == "S^3"  # chain space evaluated at d=3
    assert payload["morse"]["eulerV"] == 1


def test_classify_sorts_with_warning(capsys):
    rc = main(["classify", "--lengths", "2,1,1,1"])
    captured = capsys.readouterr()
    assert rc == 0
    assert "sorting" in captured.err
    assert "⟨4⟩" in captured.out


def test_classify_nongeneric_exit_2(capsys):
    rc = main(["classify", "--lengths", "1,1,2"])
    captured = capsys.readouterr()
    assert rc == 2
    assert "H_{3}" in captured.err


def test_classify_parse_error_exit_1(capsys):
    rc = main(["classify", "--lengths", "1,spam,3"])
    assert rc == 1
    assert "error" in capsys.readouterr().err


def test_enumerate_counts(capsys):
    rc = main(["enumerate", "--m", "5", "--format", "json"])
    assert rc == 0
    assert len(json.loads(capsys.readouterr().out)) == 7


def test_enumerate_bound(capsys):
    assert main(["enumerate", "--m", "10"]) == 1
    assert "practical bound" in capsys.readouterr().err


def test_table_matches_golden(capsys):
    golden = os.path.join(os.path.dirname(__file__), "..", "golden")
    for m in (4, 5, 6):
        rc = main(["table", "--m", str(m), "--golden", golden])
        assert rc == 0, capsys.readouterr().out
        assert "matches" in capsys.readouterr().out


def test_table_tsv(capsys):
    rc = main(["table", "--m", "4", "--format", "tsv"])
    assert rc == 0
    lines = capsys.readouterr().out.splitlines()
    assert len(lines) == 3
    assert lines[1].split("\t")[0] == "⟨4⟩"


def test_verify_small(capsys):
    rc = main(["verify", "--m", "4"])
    out = capsys.readouterr().out
    assert rc == 0
    assert "FAIL" not in out
