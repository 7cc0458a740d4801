from typing import Any, Literal, TypedDict

Emit = Literal["csv", "svg", "both"]

ShiftVariant = Literal["B_w", "I_plus_B_w"]


class Provenance(TypedDict):
    input_hash: str
    tolerances: dict[str, Any]
    tool_version: str


class Report(TypedDict):
    command: str
    report: Any
    provenance: Provenance
    fragile: bool


class EvalResult(TypedDict):
    status: Literal["pass", "fail", "error"]
    dataset: str
    name: str
    expected: Any
    observed: Any
    details: Any


class Results(TypedDict):
    passing: int
    total: int
    failed: list[str]
    failed_error_counts: dict[str, int]
    errored: list[str]
    evals: list[EvalResult]
