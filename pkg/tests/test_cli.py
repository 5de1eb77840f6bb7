import json

import pytest

from padroot.cli import EXIT_OK, EXIT_PARTIAL, EXIT_USAGE, dispatch


def run(capsys, argv):
    code = dispatch(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_count_roots_trinomial(capsys):
    code, out, _ = run(capsys, ["count-roots", "--p", "3",
                                "--poly", "x^20-10*x^2+9"])
    assert code == EXIT_OK
    assert "distinct=6 with_multiplicity=8" in out
    assert "ExactTorsion" in out


def test_count_roots_structured(capsys):
    code, out, _ = run(capsys, ["--format", "structured", "count-roots",
                                "--p", "5", "--poly", "x^4-1"])
    assert code == EXIT_OK
    doc = json.loads(out)
    assert doc["totals"] == {
        "distinct": 4, "with_multiplicity": 4,
        "upper_bound_with_multiplicity": 4,
    }
    assert doc["config"]["prec"] == 40


def test_count_roots_partial_exit_code(capsys):
    # irrational double roots stay unresolved: exit 2
    code, out, _ = run(capsys, ["count-roots", "--p", "7",
                                "--poly", "x^4-4*x^2+4"])
    assert code == EXIT_PARTIAL
    assert "unresolved" in out


def test_parse_error_exit_code(capsys):
    code, _, err = run(capsys, ["count-roots", "--p", "3", "--poly", "x^+"])
    assert code == EXIT_USAGE
    assert "input error" in err


def test_usage_error(capsys):
    code, _, _ = run(capsys, ["count-roots", "--poly", "x^2-1"])
    assert code == EXIT_USAGE


def test_bounds_command(capsys):
    code, out, _ = run(capsys, ["bounds", "--t", "2", "--p", "5"])
    assert code == EXIT_OK
    assert "upper (t^2-t+1)(q-1): 12" in out


def test_bounds_not_applicable(capsys):
    code, out, _ = run(capsys, ["bounds", "--t", "2", "--p", "3"])
    assert code == EXIT_OK
    assert "not applicable" in out


def test_newton_polygon_command(capsys):
    code, out, _ = run(capsys, ["newton-polygon", "--p", "3",
                                "--poly", "x^20-10*x^2+9"])
    assert code == EXIT_OK
    assert "slope=-1 length=2" in out
    assert "slope=0 length=18" in out


def test_vandermonde_check_command(capsys):
    code, out, _ = run(capsys, ["vandermonde-check", "--t", "2",
                                "--alpha-max", "4"])
    assert code == EXIT_OK
    assert "'failures': 0" in out


def test_search_command(capsys, tmp_path):
    out_file = tmp_path / "sweep.csv"
    code, out, _ = run(capsys, [
        "search", "--p", "5", "--t", "1", "--max-exp", "8",
        "--mode", "exhaustive", "--seed", "0", "--out", str(out_file),
    ])
    assert code == EXIT_OK
    assert "max distinct: 4" in out
    assert out_file.exists()
    assert (tmp_path / "sweep.csv.summary.json").exists()


def test_build_extremal_command(capsys):
    code, out, _ = run(capsys, ["build-extremal", "--t", "2", "--q", "3"])
    assert code == EXIT_OK
    assert "target 6" in out


def test_config_file_override(capsys, tmp_path, monkeypatch):
    config = tmp_path / "config.json"
    config.write_text(json.dumps({"prec": 25, "depth": 5}))
    monkeypatch.setenv("PADROOT_CONFIG", str(config))
    code, out, _ = run(capsys, ["count-roots", "--p", "5", "--poly", "x^2-1"])
    assert code == EXIT_OK
    assert "# prec: 25" in out
    # explicit flag wins over the config file
    code, out, _ = run(capsys, ["--prec", "30", "count-roots", "--p", "5",
                                "--poly", "x^2-1"])
    assert "# prec: 30" in out


def test_poly_from_file(capsys, tmp_path):
    poly_file = tmp_path / "poly.txt"
    poly_file.write_text("x^4 - 1\n")
    code, out, _ = run(capsys, ["count-roots", "--p", "5",
                                "--poly", str(poly_file)])
    assert code == EXIT_OK
    assert "distinct=4" in out
    json_file = tmp_path / "poly.json"
    json_file.write_text(json.dumps({"terms": [[0, "-1/1"], [4, "1/1"]]}))
    code, out, _ = run(capsys, ["count-roots", "--p", "5",
                                "--poly", str(json_file)])
    assert code == EXIT_OK
    assert "distinct=4" in out
