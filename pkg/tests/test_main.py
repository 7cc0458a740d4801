import json

import polars as pl
import pytest
from click.testing import CliRunner

from lindyn.main import EXIT_INVALID, EXIT_UNDECIDABLE, cli

ROT3 = {"dim": 3, "entries": [[0, 0, 1], [1, 0, 0], [0, 1, 0]]}
JORDAN = {"dim": 2, "entries": [[1, 1], [0, 1]]}
SQRT2 = {"kind": "arithmetic", "theta": 1.4142135623730951}


@pytest.fixture
def write(tmp_path):
    def _write(name, doc):
        path = tmp_path / name
        path.write_text(json.dumps(doc), encoding="utf-8")
        return str(path)

    return _write


def _report(path):
    return json.loads(path.read_text(encoding="utf-8"))


@pytest.mark.parametrize(
    "doc, level",
    [
        (ROT3, "UniformlyRigid"),
        (JORDAN, "NotRecurrent"),
    ],
)
def test_classify_matrix(tmp_path, write, doc, level):
    out = tmp_path / "out"
    result = CliRunner().invoke(
        cli, ["classify-matrix", "--input", write("m.json", doc), "--out", str(out)]
    )
    assert result.exit_code == 0, result.output
    report = _report(out / "classify-matrix.json")
    assert report["command"] == "classify-matrix"
    assert report["report"]["verdict"]["level"] == level
    assert {"input_hash", "tolerances", "tool_version"} <= set(report["provenance"])
    assert "spectrum" in report["report"]
    assert len(report["report"]["necessary_conditions"]) == 5


def test_classify_matrix_invalid_input(write):
    result = CliRunner().invoke(
        cli, ["classify-matrix", "--input", write("m.json", {"dim": 3, "entries": [[1]]})]
    )
    assert result.exit_code == EXIT_INVALID


def test_classify_matrix_input_hash_is_stable(tmp_path, write):
    path = write("m.json", ROT3)
    hashes = []
    for name in ("a", "b"):
        out = tmp_path / name
        CliRunner().invoke(cli, ["classify-matrix", "--input", path, "--out", str(out)])
        hashes.append(_report(out / "classify-matrix.json")["provenance"]["input_hash"])
    assert hashes[0] == hashes[1]


def test_classify_lfm_coeffs(tmp_path):
    out = tmp_path / "out"
    result = CliRunner().invoke(
        cli, ["classify-lfm", "--coeffs", "0.5,0,0,1", "--space", "h2", "--out", str(out)]
    )
    assert result.exit_code == 0, result.output
    report = _report(out / "classify-lfm.json")["report"]
    assert report["taxon"]["kind"] == "interior_attractive"
    assert report["verdict"]["level"] == "NotRecurrent"


@pytest.mark.parametrize("args", [["--coeffs", "1,2"], []])
def test_classify_lfm_rejects(args):
    result = CliRunner().invoke(cli, ["classify-lfm", *args])
    assert result.exit_code == EXIT_INVALID


def test_classify_diagonal_undecidable(tmp_path, write):
    out = tmp_path / "out"
    result = CliRunner().invoke(
        cli,
        [
            "classify-diagonal",
            "--input",
            write("d.json", SQRT2),
            "--space",
            "lp",
            "--out",
            str(out),
        ],
    )
    assert result.exit_code == 0, result.output
    report = _report(out / "classify-diagonal.json")["report"]
    assert report["undecidable"] is True
    assert report["verdict"]["level"] == "Rigid"


def test_classify_diagonal_undecidable_strict(write):
    result = CliRunner().invoke(
        cli, ["classify-diagonal", "--input", write("d.json", SQRT2), "--space", "lp", "--strict"]
    )
    assert result.exit_code == EXIT_UNDECIDABLE


def test_rigidity_seq_writes_csv(tmp_path, write):
    out = tmp_path / "out"
    result = CliRunner().invoke(
        cli,
        ["rigidity-seq", "--angles", write("a.json", [0.25]), "--count", "3", "--out", str(out)],
    )
    assert result.exit_code == 0, result.output
    frame = pl.read_csv(out / "rigidity.csv")
    assert frame.columns == ["n", "term", "defect"]
    assert frame["term"].to_list() == [4, 8, 12]


def test_orbit_writes_artifacts(tmp_path, write):
    out = tmp_path / "out"
    result = CliRunner().invoke(
        cli,
        [
            "orbit",
            "--operator",
            write("rot3.json", ROT3),
            "--vector",
            write("e1.json", {"vector": [1, 0, 0]}),
            "--horizon",
            "9",
            "--out",
            str(out),
        ],
    )
    assert result.exit_code == 0, result.output
    frame = pl.read_csv(out / "orbit.csv")
    assert frame.filter(pl.col("is_return"))["n"].to_list() == [3, 6, 9]
    assert (out / "orbit.svg").read_text(encoding="utf-8").startswith("<svg")


def test_laws_list():
    result = CliRunner().invoke(cli, ["laws", "list"])
    assert result.exit_code == 0
    assert "power_law" in result.output
    assert "oracle_agreement_law" in result.output


def test_laws_run(tmp_path):
    out = tmp_path / "out"
    result = CliRunner().invoke(
        cli, ["laws", "run", "--id", "inverse_law", "--budget", "3", "--out", str(out)]
    )
    assert result.exit_code == 0, result.output
    (report,) = _report(out / "laws-run.json")["report"]
    assert report["law_id"] == "inverse_law"
    assert report["passed"] is True


def test_laws_run_unknown_law():
    result = CliRunner().invoke(cli, ["laws", "run", "--id", "no_such_law", "--budget", "1"])
    assert result.exit_code == EXIT_INVALID


def test_eval(tmp_path):
    evals = tmp_path / "datasets" / "matrices" / "evals"
    cases = {
        "0001": {"level": "UniformlyRigid", "witness": [3]},
        "0002": {"level": "NotRecurrent"},
    }
    for name, expected in cases.items():
        (evals / name).mkdir(parents=True)
        case = {"family": "matrix", "space": "complex", "input": ROT3, "expected": expected}
        (evals / name / "eval.json").write_text(json.dumps(case), encoding="utf-8")
    results = tmp_path / "results"
    result = CliRunner().invoke(
        cli,
        ["eval", "--datasets-dir", str(tmp_path / "datasets"), "--results-dir", str(results)],
    )
    assert result.exit_code == 1
    assert "Evaluating matrices (2 evals)..." in result.output
    frame = pl.read_csv(results / "results.csv")
    assert frame["status"].to_list() == ["pass", "fail"]
    summary = _report(results / "results.json")["results"]["matrices"]
    assert summary["passing"] == 1
    assert summary["failed"] == ["0002"]
