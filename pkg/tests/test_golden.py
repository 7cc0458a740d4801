from pathlib import Path

import pytest

from lindyn.golden import compare, observe, run

DATASETS = Path(__file__).parent.parent / "datasets"


@pytest.mark.parametrize(
    "observed, expected, expected_result",
    [
        ({"level": "Rigid"}, {"level": "Rigid"}, True),
        ({"level": "Rigid"}, {"level": "Recurrent"}, False),
        ({"tags": ["a", "b", "c"]}, {"tags": ["b", "a"]}, True),
        ({"tags": ["a"]}, {"tags": ["a", "b"]}, False),
        ({"witness": [2, 4, 6, 8]}, {"witness_prefix": [2, 4]}, True),
        ({"witness": [2, 4, 6, 8]}, {"witness_prefix": [4]}, False),
        ({"witness": None}, {"witness_prefix": [2]}, False),
        ({"witness": [3, 6]}, {"witness": [3, 6]}, True),
        ({"value": 2.0000000000001}, {"value": 2.0}, True),
        ({"value": 2.1}, {"value": 2.0}, False),
        ({"value": 29}, {"value": 29}, True),
        ({"error": "InvalidInput"}, {"error": "InvalidInput"}, True),
        ({"level": "Rigid"}, {"error": "InvalidInput"}, False),
        ({"undecidable": True, "partial": "Rigid"}, {"undecidable": True}, True),
    ],
)
def test_compare(observed, expected, expected_result):
    assert compare(observed, expected) == expected_result


def test_observe_matrix():
    observed = observe(
        {"family": "matrix", "space": "complex", "input": {"dim": 2, "entries": [[0, 1], [1, 0]]}}
    )
    assert observed["level"] == "UniformlyRigid"
    assert observed["witness"] == [2]
    assert observed["fragile"] is False


def test_observe_maps_validation_errors():
    observed = observe({"family": "matrix", "space": "complex", "input": {"dim": 2}})
    assert observed == {"error": "InvalidInput"}


def test_observe_simultaneous_return():
    observed = observe(
        {"family": "simultaneous_return", "input": {"thetas": [0.2], "delta": 0.01}}
    )
    assert observed == {"value": 5}


def _golden_cases():
    return sorted(p for p in DATASETS.glob("*/evals/*") if (p / "eval.json").exists())


@pytest.mark.parametrize(
    "path", _golden_cases(), ids=lambda p: f"{p.parent.parent.name}/{p.name}"
)
def test_golden_case(path):
    passed, expected, observed = run(path)
    assert passed, f"expected {expected}, observed {observed}"
