"""
Golden cases: `datasets/<dataset>/evals/<name>/eval.json` pairs an input with
the expected observation. `observe` runs the case and `compare` matches the
observation against the expectation key by key.
"""

import math
from pathlib import Path
from typing import Any

from pydantic import ValidationError

from .exceptions import LindynError, UndecidableError
from .operators import get_classifier
from .operators.composition import (
    LFMDocument,
    LinearFractionalMap,
    classify_lfm,
    verify_H2_rotation,
)
from .operators.sequence import find_simultaneous_return
from .taxonomy import Tolerance
from .utils import get_tolerance, parse_complex, read_json


def _observe(case: dict, tol: Tolerance) -> dict:
    family = case["family"]
    inp = case["input"]
    if family == "simultaneous_return":
        value = find_simultaneous_return(inp["thetas"], inp["delta"], inp.get("n_min", 1))
        return {"value": value}
    if family == "lfm_taxon":
        phi = LinearFractionalMap.from_document(LFMDocument.model_validate(inp))
        taxon = classify_lfm(phi, tol)
        flags = {k: v for k, v in taxon.to_dict().items() if isinstance(v, bool)}
        return {"kind": taxon.kind, **flags}
    if family == "h2_rotation":
        coeffs = [parse_complex(c) for c in inp["coeffs"]]
        return {"value": verify_H2_rotation(parse_complex(inp["lam"]), coeffs, inp["n"], tol)}

    classify = get_classifier(family, case["space"], case.get("p"), case.get("variant"))
    try:
        result = classify(inp, tol)
    except UndecidableError as e:
        return {
            "undecidable": True,
            "partial": e.partial.level.label if e.partial is not None else None,
        }
    witness = result.witness
    return {
        "level": result.level.label,
        "tags": result.tags,
        "witness": list(witness.terms) if witness is not None else None,
        "fragile": result.fragile,
        "conclusive": result.conclusive,
    }


def observe(case: dict) -> dict:
    tol = get_tolerance(**case.get("tolerance", {}))
    try:
        return _observe(case, tol)
    except ValidationError:
        return {"error": "InvalidInput"}
    except LindynError as e:
        return {"error": type(e).__name__}


def _matches(key: str, observed: Any, expected: Any) -> bool:
    if key == "tags":
        return set(expected).issubset(set(observed or []))
    if key == "witness_prefix":
        return observed is not None and observed[: len(expected)] == expected
    if isinstance(expected, float) and isinstance(observed, (int, float)):
        return math.isclose(observed, expected, rel_tol=1e-9, abs_tol=1e-12)
    return observed == expected


def compare(observed: dict, expected: dict) -> bool:
    for key, value in expected.items():
        source = "witness" if key == "witness_prefix" else key
        if not _matches(key, observed.get(source), value):
            return False
    return True


def run(path: Path) -> tuple[bool, dict, dict]:
    case = read_json(path / "eval.json")
    observed = observe(case)
    return compare(observed, case["expected"]), case["expected"], observed
