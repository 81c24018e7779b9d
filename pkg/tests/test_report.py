import csv

import pytest

from qbfcert.report import (corpus_rows, family_scaling, fit_is_linear, loglog_slope,
                            term_vs_model, write_report)


def test_loglog_slope_exact():
    assert loglog_slope([1, 10, 100], [3, 30, 300]) == pytest.approx(1.0)
    assert loglog_slope([1, 2, 4], [1, 4, 16]) == pytest.approx(2.0)


def test_family_scaling_rows():
    rows = family_scaling([1, 10, 100])
    assert [(r["technique"], r["n"], r["steps"], r["clauses_left"]) for r in rows] == [
        ("bce", 1, 4, 0), ("bce", 10, 40, 0), ("bce", 100, 400, 0),
        ("ve", 1, 3, 0), ("ve", 10, 30, 0), ("ve", 100, 300, 0)]
    assert fit_is_linear(rows, "bce") and fit_is_linear(rows, "ve")


def test_term_vs_model_rows():
    rows = term_vs_model(range(1, 4))
    assert [r["term_leaves"] for r in rows] == [1 << n for n in range(1, 4)]
    assert all(r["model_gates"] == 0 for r in rows)


def test_corpus_rows_all_checked():
    rows = corpus_rows(15, seed=2)
    assert len(rows) == 15
    assert all(r["check"] == "correct" for r in rows)


def test_write_report_files(tmp_path):
    paths = write_report(str(tmp_path), count=5, seed=1, sizes=(1, 10))
    assert len(paths) == 6
    with open(tmp_path / "family_scaling.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert rows[0]["technique"] == "bce" and rows[0]["steps"] == "4"
    with open(tmp_path / "cert_sizes.png", "rb") as fh:
        assert fh.read(8) == b"\x89PNG\r\n\x1a\n"
