"""
Shared numeric primitives, the tolerance policy and the recurrence lattice.

Every classifier in the package returns a `RecurrenceVerdict`. A verdict always
carries at least one piece of evidence: a witness sequence of return times, a
violated necessary condition, or a theorem tag.
"""

import cmath
import math
from dataclasses import dataclass, field
from enum import IntEnum
from fractions import Fraction
from typing import Annotated, Any, Literal, Optional, Union

import numpy as np
import polars as pl
from pydantic import BaseModel, ConfigDict, Field, PlainValidator, field_validator

from .exceptions import CertificationFailure, NonFiniteValue


class Level(IntEnum):
    NOT_RECURRENT = 0
    RECURRENT = 1
    RIGID = 2
    UNIFORMLY_RIGID = 3

    @property
    def label(self) -> str:
        return _LABELS[self]

    @classmethod
    def parse(cls, value: Union[str, int, "Level"]) -> "Level":
        if isinstance(value, str):
            for level, label in _LABELS.items():
                if label == value:
                    return level
            raise ValueError(f"Unknown level: {value}")
        return cls(value)


_LABELS = {
    Level.NOT_RECURRENT: "NotRecurrent",
    Level.RECURRENT: "Recurrent",
    Level.RIGID: "Rigid",
    Level.UNIFORMLY_RIGID: "UniformlyRigid",
}


class Tolerance(BaseModel):
    """
    Declared numerical slack for every decision made by the classifiers.

    `rank_eps` is relative to the largest singular value of the operator under
    test; the remaining eps values are absolute.
    """

    model_config = ConfigDict(frozen=True)

    unimodular_eps: float = Field(default=1e-9, gt=0)
    return_eps: float = Field(default=1e-6, gt=0)
    rank_eps: float = Field(default=1e-9, gt=0)
    max_denominator: int = Field(default=10_000, ge=1)
    witness_target: float = Field(default=0.1, gt=0)
    cluster_eps: float = Field(default=1e-6, gt=0)
    structure_eps: float = Field(default=1e-8, gt=0)

    @field_validator("*")
    @classmethod
    def _finite(cls, value):
        if isinstance(value, float) and not math.isfinite(value):
            raise ValueError("tolerances must be finite")
        return value


DEFAULT_TOLERANCE = Tolerance()


def ensure_finite(z: complex) -> complex:
    z = complex(z)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise NonFiniteValue(f"Non-finite value: {z}")
    return z


def _complex_value(value: Any) -> complex:
    if isinstance(value, complex):
        z = value
    elif isinstance(value, (int, float)) and not isinstance(value, bool):
        z = complex(float(value), 0.0)
    elif isinstance(value, (list, tuple)) and len(value) == 2:
        z = complex(float(value[0]), float(value[1]))
    else:
        raise ValueError(f"expected a number or [re, im] pair, got {value!r}")
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise ValueError(f"non-finite value {value!r}")
    return z


# [re, im] pairs or plain reals in JSON documents
ComplexValue = Annotated[complex, PlainValidator(_complex_value)]


def unit_circle_distance(z: complex) -> float:
    return abs(abs(ensure_finite(z)) - 1.0)


def chord(theta: float) -> float:
    """
    |e^{2πiθ} − 1| computed as 2|sin(πθ)| after reduction to [−1/2, 1/2].
    """
    if not math.isfinite(theta):
        raise NonFiniteValue(f"Non-finite angle: {theta}")
    return 2.0 * abs(math.sin(math.pi * math.remainder(theta, 1.0)))


def chords(thetas: np.ndarray) -> np.ndarray:
    thetas = np.asarray(thetas, dtype=float)
    return 2.0 * np.abs(np.sin(np.pi * (thetas - np.rint(thetas))))


def chord_at(m: int, theta: float) -> float:
    """
    chord(m·θ) with the product reduced modulo 1 in exact rational arithmetic.

    A float θ is a dyadic rational, so the reduction loses nothing even when m is
    large enough that the float product m·θ has no fractional digits left.
    """
    if not math.isfinite(theta):
        raise NonFiniteValue(f"Non-finite angle: {theta}")
    x = Fraction(theta) * m
    return 2.0 * abs(math.sin(math.pi * float(x - round(x))))


def angle_of(z: complex) -> float:
    """Angle of z in turns, in [0, 1)."""
    turns = cmath.phase(ensure_finite(z)) / (2 * math.pi)
    return turns % 1.0


def detect_rational(theta: float, tol: Tolerance) -> Optional[Fraction]:
    """
    Best continued-fraction convergent p/q of θ with q ≤ max_denominator, if it
    lies within unimodular_eps of θ.
    """
    if not math.isfinite(theta):
        raise NonFiniteValue(f"Non-finite angle: {theta}")
    candidate = Fraction(theta).limit_denominator(tol.max_denominator)
    if abs(float(candidate) - theta) <= tol.unimodular_eps:
        return candidate
    return None


@dataclass(frozen=True)
class WitnessSequence:
    terms: tuple[int, ...]
    note: str = ""
    kind: Literal["witness_sequence"] = "witness_sequence"

    def __post_init__(self):
        if not self.terms:
            raise ValueError("witness sequence must be non-empty")
        if self.terms[0] < 1 or any(
            a >= b for a, b in zip(self.terms, self.terms[1:], strict=False)
        ):
            raise ValueError(f"witness sequence must be strictly increasing: {self.terms}")


@dataclass(frozen=True)
class ViolatedCondition:
    tag: str
    detail: str = ""
    kind: Literal["violated_condition"] = "violated_condition"


@dataclass(frozen=True)
class TheoremTag:
    tag: str
    detail: str = ""
    kind: Literal["theorem"] = "theorem"


Evidence = Union[WitnessSequence, ViolatedCondition, TheoremTag]


@dataclass(frozen=True)
class RecurrenceVerdict:
    level: Level
    evidence: tuple[Evidence, ...]
    fragile: bool = False
    conclusive: bool = True

    def __post_init__(self):
        if not self.evidence:
            raise ValueError("a verdict must carry evidence")

    def implies(self, level: Level) -> bool:
        return self.level >= level

    @property
    def tags(self) -> list[str]:
        return [e.tag for e in self.evidence if not isinstance(e, WitnessSequence)]

    @property
    def witness(self) -> Optional[WitnessSequence]:
        for e in self.evidence:
            if isinstance(e, WitnessSequence):
                return e
        return None

    def to_dict(self) -> dict:
        evidence = []
        for e in self.evidence:
            if isinstance(e, WitnessSequence):
                evidence.append({"kind": e.kind, "terms": list(e.terms), "note": e.note})
            else:
                evidence.append({"kind": e.kind, "tag": e.tag, "detail": e.detail})
        return {
            "level": self.level.label,
            "evidence": evidence,
            "fragile": self.fragile,
            "conclusive": self.conclusive,
        }


def verdict(level: Level, *evidence: Evidence, fragile=False, conclusive=True):
    return RecurrenceVerdict(
        level=level, evidence=tuple(evidence), fragile=fragile, conclusive=conclusive
    )


def meet_verdicts(v1: RecurrenceVerdict, v2: RecurrenceVerdict) -> RecurrenceVerdict:
    return RecurrenceVerdict(
        level=min(v1.level, v2.level),
        evidence=v1.evidence + v2.evidence,
        fragile=v1.fragile or v2.fragile,
        conclusive=v1.conclusive and v2.conclusive,
    )


@dataclass(frozen=True)
class RigiditySequence:
    terms: tuple[int, ...]
    defect: tuple[float, ...]
    tail_bound: Optional[tuple[float, ...]] = field(default=None)

    def __post_init__(self):
        if len(self.terms) != len(self.defect):
            raise ValueError("terms and defect must have equal length")
        if self.tail_bound is not None and len(self.tail_bound) != len(self.terms):
            raise ValueError("tail_bound must match terms")
        if any(a >= b for a, b in zip(self.terms, self.terms[1:], strict=False)):
            raise CertificationFailure(f"terms not strictly increasing: {self.terms}")

    def to_frame(self) -> pl.DataFrame:
        data = {
            "n": list(range(1, len(self.terms) + 1)),
            "term": list(self.terms),
            "defect": list(self.defect),
        }
        if self.tail_bound is not None:
            data["tail_bound"] = list(self.tail_bound)
        return pl.DataFrame(data)

    def to_dict(self) -> dict:
        out = {"terms": list(self.terms), "defect": list(self.defect)}
        if self.tail_bound is not None:
            out["tail_bound"] = list(self.tail_bound)
        return out
