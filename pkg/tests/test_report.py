import csv
import io
import json

import pytest

from magicser.cli import main
from magicser.problem import make_problem
from magicser.report import (Fixture, build_report, default_fixtures,
                             load_fixtures, rows_to_csv, rows_to_json,
                             rows_to_markdown)


def test_default_fixtures_complete():
    fixtures = default_fixtures()
    assert len(fixtures) == 20
    keys = {fx.key for fx in fixtures}
    assert (2, 500, 1) in keys and (2, 13, 3) in keys
    assert all(fx.source in ("trump-enum", "boyer-enum") for fx in fixtures)


def test_fixture_scaled_integer_parsing():
    fx = next(f for f in default_fixtures() if f.key == (2, 500, 1))
    value = fx.value()
    assert value == 114846453733617811101 * 10 ** 1538
    assert len(str(value)) == 1559


def test_fixture_plain_integer_parsing():
    fx = next(f for f in default_fixtures() if f.key == (2, 13, 3))
    assert fx.value() == 17265701


def test_load_fixtures_array_and_lines(tmp_path):
    records = [{"alpha": 2, "N": 3, "degree": 1, "exact": "8", "source": "t"}]
    array_file = tmp_path / "a.json"
    array_file.write_text(json.dumps(records))
    assert load_fixtures(array_file)[0].value() == 8

    lines_file = tmp_path / "b.jsonl"
    lines_file.write_text(json.dumps(records[0]) + "\n")
    assert load_fixtures(lines_file)[0].value() == 8


def test_load_fixtures_empty_warns(tmp_path):
    empty = tmp_path / "empty.json"
    empty.write_text("")
    with pytest.warns(UserWarning):
        assert load_fixtures(empty) == []


def test_load_fixtures_validation_errors(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps([{"alpha": 2, "N": 3, "degree": 1,
                                "exact": "8"}]))
    with pytest.raises(ValueError, match="missing fields"):
        load_fixtures(bad)
    bad.write_text(json.dumps([{"alpha": 2, "N": 3, "degree": 1,
                                "exact": "1.5", "source": "x"}]))
    with pytest.raises(ValueError, match="not an integer"):
        load_fixtures(bad)


# ---------------------------------------------------------------------------
# report building

def test_build_report_fixture_row():
    rows = build_report([make_problem(3, 100, 1)], default_fixtures(), 2)
    row = rows[0]
    assert row.exact == "1.47135094282799112413e435"
    assert abs(row.rel_residual - (-1.43e-6)) < 0.02e-6
    assert abs(row.scaled_residual - (-1.43)) < 0.02


def test_build_report_bimagic_row():
    rows = build_report([make_problem(2, 25, 2)], default_fixtures(), 1)
    assert abs(rows[0].scaled_residual - 0.059) < 0.001


def test_build_report_computes_small_exact():
    rows = build_report([make_problem(2, 3, 1)], [], 2)
    assert rows[0].exact == "8"
    assert rows[0].rel_residual is not None


def test_build_report_missing_exact():
    rows = build_report([make_problem(2, 600, 1)], [], 2)
    assert rows[0].exact is None
    assert rows[0].rel_residual is None


def test_build_report_zero_residual_on_synthetic_match():
    spec = make_problem(2, 40, 1)
    est = str(__import__("magicser").corrected_estimate(spec, 2))
    # feed the estimate back as the exact value: residual must vanish
    synthetic = Fixture(2, 40, 1, est, "synthetic")
    rows = build_report([spec], [synthetic], 2)
    assert rows[0].rel_residual == 0.0
    assert rows[0].scaled_residual == 0.0


def test_build_report_trimagic_ratio_format():
    rows = build_report([make_problem(2, 13, 3)], default_fixtures(), 0)
    row = rows[0]
    assert row.ratio is not None and row.rel_residual is None
    assert abs(row.ratio - 1.12) < 0.01


def test_build_report_sorted():
    specs = [make_problem(2, 30, 1), make_problem(2, 10, 1)]
    rows = build_report(specs, [], 2)
    assert [r.N for r in rows] == [10, 30]


def test_emitters_agree():
    rows = build_report([make_problem(2, 10, 1), make_problem(2, 12, 1)],
                        default_fixtures(), 2)
    parsed_json = json.loads(rows_to_json(rows))
    parsed_csv = list(csv.DictReader(io.StringIO(rows_to_csv(rows))))
    md = rows_to_markdown(rows)
    assert len(parsed_json) == len(parsed_csv) == 2
    for j, c in zip(parsed_json, parsed_csv):
        assert str(j["N"]) == c["N"]
        assert j["estimate"] == c["estimate"]
        assert j["exact"] == (c["exact"] or None)
        assert f"| {j['estimate']} |" in md


# ---------------------------------------------------------------------------
# CLI

def test_cli_count(capsys):
    assert main(["count", "--alpha", "2", "--order", "3", "--degree", "1"]) == 0
    assert capsys.readouterr().out.strip() == "8"


def test_cli_count_infeasible(capsys):
    assert main(["count", "--alpha", "2", "--order", "6", "--degree", "3"]) == 0
    captured = capsys.readouterr()
    assert captured.out.strip() == "0"
    assert "infeasible" in captured.err


def test_cli_count_methods(capsys):
    for method in ("dp", "exhaustive", "dft"):
        assert main(["count", "--alpha", "2", "--order", "3",
                     "--method", method]) == 0
        assert capsys.readouterr().out.strip() == "8"


def test_cli_coeffs(capsys):
    assert main(["coeffs", "--dimension", "2"]) == 0
    out = capsys.readouterr().out
    assert "K1 = -7/30" in out
    assert "K2 = -1/2" in out
    assert "K3 = 11/2520" in out
    assert "(1, 3/5, 31/420)" in out


def test_cli_coeffs_bimagic(capsys):
    assert main(["coeffs", "--dimension", "3"]) == 0
    out = capsys.readouterr().out
    assert "K1 = -711/980" in out
    assert "1787/2940" in out


def test_cli_estimate(capsys):
    assert main(["estimate", "--alpha", "2", "--order", "1000",
                 "--degree", "1", "--correction-order", "2"]) == 0
    assert capsys.readouterr().out.strip() == "6.591829225199e+3424"


def test_cli_estimate_infeasible_warns(capsys):
    assert main(["estimate", "--alpha", "2", "--order", "14",
                 "--degree", "3", "--correction-order", "0"]) == 0
    captured = capsys.readouterr()
    assert "warning" in captured.err


def test_cli_compare_table1_row(capsys):
    assert main(["compare", "--alpha", "2", "--degree", "1",
                 "--orders", "1000", "--format", "json"]) == 0
    rows = json.loads(capsys.readouterr().out)
    assert len(rows) == 1
    assert abs(rows[0]["rel_residual"] - 3.07e-11) < 0.05e-11
    assert abs(rows[0]["scaled_residual"] - 0.0307) < 0.0005


def test_cli_compare_formats(capsys):
    for fmt in ("md", "csv", "json"):
        assert main(["compare", "--alpha", "2", "--degree", "1",
                     "--orders", "10,12", "--format", fmt]) == 0
        assert capsys.readouterr().out.strip()


def test_cli_compare_custom_fixtures(tmp_path, capsys):
    path = tmp_path / "fx.json"
    path.write_text(json.dumps([{"alpha": 2, "N": 600, "degree": 1,
                                 "exact": "1e1900", "source": "synthetic"}]))
    assert main(["compare", "--alpha", "2", "--degree", "1", "--orders", "600",
                 "--fixtures", str(path), "--format", "json"]) == 0
    rows = json.loads(capsys.readouterr().out)
    assert rows[0]["exact"] == "1e1900"


def test_cli_verify(capsys):
    assert main(["verify"]) == 0
    out = capsys.readouterr().out
    assert "FAIL" not in out
    assert out.count("ok  ") >= 14


def test_cli_rejects_bad_flags(capsys):
    assert main(["count", "--alpha", "1", "--order", "3"]) == 1
    assert "error" in capsys.readouterr().err


def test_cli_threads_env(monkeypatch, capsys):
    monkeypatch.setenv("MAGICSER_THREADS", "3")
    assert main(["count", "--alpha", "2", "--order", "4", "--degree", "1"]) == 0
    assert capsys.readouterr().out.strip() == "86"
