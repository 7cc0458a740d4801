"""
Registry of executable laws.

A law pairs a structural statement about recurrence with a seeded instance
family. `run_law` draws `budget` instances, instance i from
`default_rng((seed, i))`, and collects the instances where the classifiers
contradict the statement. Instances whose verdicts are fragile are counted as
skipped rather than judged.
"""

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from ..exceptions import InvalidInput, UnknownLaw


@dataclass(frozen=True)
class LawFailure:
    instance: str
    expected: str
    observed: str

    def to_dict(self) -> dict:
        return {"instance": self.instance, "expected": self.expected, "observed": self.observed}


class Skip(Exception):
    """Raised by a law check when its instance cannot be judged."""


@dataclass(frozen=True)
class Law:
    law_id: str
    anchor: str
    family: str
    check: Callable[[np.random.Generator], Optional[LawFailure]]


@dataclass
class LawReport:
    law_id: str
    anchor: str
    seed: int
    instances_run: int = 0
    skipped: int = 0
    failures: list[LawFailure] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_dict(self) -> dict:
        return {
            "law_id": self.law_id,
            "anchor": self.anchor,
            "seed": self.seed,
            "instances_run": self.instances_run,
            "skipped": self.skipped,
            "passed": self.passed,
            "failures": [f.to_dict() for f in self.failures],
        }


LAWS: dict[str, Law] = {}


def law(law_id: str, anchor: str, family: str):
    def register(check):
        LAWS[law_id] = Law(law_id, anchor, family, check)
        return check

    return register


def get_law(law_id: str) -> Law:
    if law_id not in LAWS:
        raise UnknownLaw(f"Unknown law: {law_id}")
    return LAWS[law_id]


def run_law(law_id: str, budget: int, seed: int = 0) -> LawReport:
    selected = get_law(law_id)
    if budget < 1:
        raise InvalidInput(f"budget must be ≥ 1, got {budget}")
    report = LawReport(law_id=law_id, anchor=selected.anchor, seed=seed)
    for i in range(budget):
        rng = np.random.default_rng((seed, i))
        try:
            failure = selected.check(rng)
        except Skip:
            report.skipped += 1
            continue
        report.instances_run += 1
        if failure is not None:
            report.failures.append(
                LawFailure(f"#{i}: {failure.instance}", failure.expected, failure.observed)
            )
    return report


from . import invariance, structural  # noqa: E402, F401
