"""Command-line behaviour: exit codes, output formats and config handling."""

import json
from pathlib import Path

import pytest

from reeb_index.cli import EXIT_FAILED, EXIT_OK, EXIT_PARSE, JobConfig, main, render_table, worker_count
from reeb_index.errors import SchemaError

DATA = Path(__file__).resolve().parent.parent / "data"


def run_json(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, json.loads(out.out), out.err


def test_check_cone_good(capsys):
    code, doc, _ = run_json(capsys, "check-cone", "--input", str(DATA / "sphere2_cone.json"))
    assert code == EXIT_OK
    assert doc["verdict"] == "good; pi1 trivial"
    assert doc["faces_by_codim"] == {"1": 3, "2": 3}


def test_hc_c0_ranks(capsys):
    code, doc, _ = run_json(capsys, "hc", "--input", str(DATA / "c0_cone.json"), "--cutoff", "12")
    assert code == EXIT_OK
    expected = {str(d): (0 if d % 2 or d == 0 else (1 if d == 2 else 2)) for d in range(13)}
    assert doc["ranks"] == expected
    assert doc["k_minus"] == 2
    assert doc["k_plus"] is None


def test_prequant_hc_matches_sphere(capsys):
    code, doc, _ = run_json(capsys, "prequant-hc", "--input", str(DATA / "cp2_prequant.json"), "--cutoff", "10")
    assert code == EXIT_OK
    assert doc["ranks"] == {str(d): int(d >= 4 and d % 2 == 0) for d in range(11)}


def test_index_with_certificate(capsys):
    code, doc, _ = run_json(capsys, "index", "--input", str(DATA / "rotation_path.json"),
                            "--bott", "--elliptic-check", "2")
    assert code == EXIT_OK
    assert doc["report"]["mu_rs"] == "-2/2"
    assert doc["certificate"]["status"] == "Elliptic"
    assert doc["bott"]["arc_values"] == [0, -1]
    # rotation by -0.3 turns: mean index -0.6 up to n / k_max
    assert abs(doc["report"]["mean"] + 0.6) <= 1 / 8


def test_hyperbolic_not_certified(capsys):
    code, doc, _ = run_json(capsys, "elliptic-check", "--input", str(DATA / "hyperbolic_path.json"))
    assert code == EXIT_OK
    assert doc["certificate"]["status"] == "HypothesisNotMet"


def test_pinching_boundary_and_ind_hr(capsys):
    code, doc, _ = run_json(capsys, "pinching", "--input", str(DATA / "pinching_boundary.json"))
    assert code == EXIT_OK and doc["bound"] == 10 and doc["boundary"] is True
    code, doc, _ = run_json(capsys, "ind-hr", "--input", str(DATA / "ind_hr.json"))
    assert code == EXIT_OK and doc["mu_minus"] == 6


def test_failure_exit_code(capsys):
    code, doc, err = run_json(capsys, "check-cone", "--input", str(DATA / "line_cone.json"))
    assert code == EXIT_FAILED
    assert doc["error"] == "NotStrictlyConvex"
    assert "NotStrictlyConvex" in err


def test_parse_exit_code(capsys, tmp_path):
    code, doc, _ = run_json(capsys, "check-cone", "--input", str(tmp_path / "missing.json"))
    assert code == EXIT_PARSE and doc["error"] == "SchemaError"
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    code, _, _ = run_json(capsys, "hc", "--input", str(bad))
    assert code == EXIT_PARSE


def test_deterministic_output(capsys):
    argv = ["orbit-index", "--input", str(DATA / "c2_cone.json"), "--cutoff", "4"]
    main(argv)
    first = capsys.readouterr().out
    main(argv)
    assert capsys.readouterr().out == first


def test_table_carries_same_numbers(capsys):
    argv = ["hc", "--input", str(DATA / "c0_cone.json"), "--cutoff", "8"]
    _, doc, _ = run_json(capsys, *argv)
    assert main(argv + ["--format", "table"]) == EXIT_OK
    table = capsys.readouterr().out
    rows = {}
    for line in table.splitlines():
        parts = line.split()
        if len(parts) == 2 and parts[0].isdigit():
            rows[parts[0]] = int(parts[1])
    assert rows == doc["ranks"]


def test_multiple_inputs_worst_status(capsys):
    code, doc, _ = run_json(capsys, "check-cone", "--input", str(DATA / "sphere2_cone.json"),
                            "--input", str(DATA / "line_cone.json"))
    assert code == EXIT_FAILED
    assert [e["input"] for e in doc] == [str(DATA / "sphere2_cone.json"), str(DATA / "line_cone.json")]
    assert doc[0]["result"]["good"] is True


def test_config_file(capsys, tmp_path):
    cfg = tmp_path / "job.json"
    cfg.write_text(json.dumps({"inputs": [str(DATA / "c0_cone.json")], "cutoff": 4}))
    code, doc, _ = run_json(capsys, "hc", "--config", str(cfg))
    assert code == EXIT_OK and doc["cutoff"] == 4
    cfg.write_text(json.dumps({"inputs": [], "cutof": 4}))
    code, doc, _ = run_json(capsys, "hc", "--config", str(cfg))
    assert code == EXIT_PARSE


def test_job_config_rejects_unknown_keys():
    with pytest.raises(SchemaError):
        JobConfig.from_json({"command": "hc", "inputs": [], "verbose": True})


def test_worker_count(monkeypatch):
    monkeypatch.setenv("REEB_INDEX_THREADS", "3")
    assert worker_count(2) == 2 and worker_count(10) == 3
    monkeypatch.setenv("REEB_INDEX_THREADS", "many")
    with pytest.raises(SchemaError):
        worker_count(1)


def test_render_table_orders_degrees_numerically():
    text = render_table({"ranks": {"10": 1, "2": 0, "9": 3}})
    assert [line.split()[0] for line in text.splitlines()[1:]] == ["2", "9", "10"]
