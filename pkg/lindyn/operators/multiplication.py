"""
Multiplication operators M_φ f = φ·f.

L²(X, μ) symbols are discrete: a finite atom list, or a countable range given
as an `AngleSequence` carrying geometric weights. C(K) symbols live on a
connected K sampled along a grid. Analytic multipliers cover the Hardy,
Bergman, Dirichlet and Bloch spaces, and the adjoint M_φ* on H² is decided by
whether φ(𝔻) meets the unit circle.
"""

import math
from typing import Annotated, Literal, Optional, Union

import numpy as np
from numpy.polynomial import polynomial as P
from pydantic import BaseModel, Field, PositiveFloat, TypeAdapter, model_validator

from ..exceptions import (
    CertificationFailure,
    GridTooCoarse,
    InvalidInput,
    NotUnimodular,
    UndecidableError,
)
from ..taxonomy import (
    DEFAULT_TOLERANCE,
    ComplexValue,
    Level,
    RecurrenceVerdict,
    RigiditySequence,
    TheoremTag,
    Tolerance,
    ViolatedCondition,
    WitnessSequence,
    angle_of,
    chord_at,
    detect_rational,
    unit_circle_distance,
    verdict,
)
from .sequence import (
    AngleSequence,
    ArithmeticFamily,
    FiniteList,
    RationalList,
    build_rigidity_sequence,
    decide_liminf_sup,
    find_simultaneous_return,
)

RIGIDITY_TERMS = 5
MIN_SAMPLES = 16
ADJOINT_GRID = 256


class AtomicSymbol(BaseModel):
    """Atoms as [[weight, [re, im]], ...]: μ({x_i}) = weight, φ(x_i) = value."""

    kind: Literal["atoms"] = "atoms"
    atoms: list[tuple[PositiveFloat, ComplexValue]] = Field(min_length=1)

    @model_validator(mode="after")
    def _finite_mass(self):
        if not all(math.isfinite(w) for w, _ in self.atoms):
            raise ValueError("atom weights must be finite")
        return self

    def distinct_values(self) -> list[complex]:
        seen: list[complex] = []
        for _, value in self.atoms:
            if value not in seen:
                seen.append(value)
        return seen


class CountableSymbol(BaseModel):
    """Countable range {λ_k e^{2πiθ_k}} with weights weight_ratio^k."""

    kind: Literal["countable"] = "countable"
    angles: AngleSequence
    weight_ratio: float = Field(default=0.5, gt=0, lt=1)


DiscreteMeasureSymbol = Annotated[
    Union[AtomicSymbol, CountableSymbol], Field(discriminator="kind")
]
discrete_symbol_adapter = TypeAdapter(DiscreteMeasureSymbol)


def _unimodular_angles(symbol: AtomicSymbol, tol: Tolerance) -> list[float]:
    angles = []
    for i, value in enumerate(symbol.distinct_values()):
        if unit_circle_distance(value) > tol.unimodular_eps:
            raise NotUnimodular(f"atom #{i} has |φ| = {abs(value):.12g}")
        angles.append(angle_of(value))
    return angles


def mult_rigidity_sequence(
    symbol: Union[AtomicSymbol, CountableSymbol],
    count: int = RIGIDITY_TERMS,
    tol: Tolerance = DEFAULT_TOLERANCE,
) -> RigiditySequence:
    if isinstance(symbol, CountableSymbol):
        return build_rigidity_sequence(symbol.angles, count, tol)
    return build_rigidity_sequence(FiniteList(angles=_unimodular_angles(symbol, tol)), count, tol)


def _atom_witness(angles: list[float], tol: Tolerance) -> WitnessSequence:
    fractions = [detect_rational(t, tol) for t in angles]
    if all(f is not None for f in fractions):
        q = math.lcm(*(f.denominator for f in fractions))
        return WitnessSequence((q, 2 * q, 3 * q), note="common period of the atom values")
    n_star = find_simultaneous_return(angles, tol.witness_target, 1)
    defect = max(chord_at(n_star, t) for t in angles)
    if not defect < tol.witness_target:
        raise CertificationFailure(f"witness {n_star} has defect {defect}")
    return WitnessSequence((n_star,), note=f"max chord {defect:.3g} < {tol.witness_target:g}")


def classify_mult_L2(
    symbol: Union[AtomicSymbol, CountableSymbol], tol: Tolerance = DEFAULT_TOLERANCE
) -> RecurrenceVerdict:
    if isinstance(symbol, AtomicSymbol):
        for i, (weight, value) in enumerate(symbol.atoms):
            if unit_circle_distance(value) > tol.unimodular_eps:
                return verdict(
                    Level.NOT_RECURRENT,
                    ViolatedCondition(
                        "non_unimodular_atom",
                        f"atom #{i} of mass {weight:g} has |φ| = {abs(value):.12g}",
                    ),
                    TheoremTag("l2_unimodular_necessary"),
                )
        angles = _unimodular_angles(symbol, tol)
        return verdict(
            Level.UNIFORMLY_RIGID,
            _atom_witness(angles, tol),
            TheoremTag(
                "l2_multiplication_theorem", "finite range: a.e. and L∞ convergence coincide"
            ),
        )

    angles = symbol.angles
    if isinstance(angles, FiniteList) and angles.moduli is not None:
        for k, r in enumerate(angles.moduli, start=1):
            if abs(r - 1) > tol.unimodular_eps:
                return verdict(
                    Level.NOT_RECURRENT,
                    ViolatedCondition("non_unimodular_atom", f"|φ| = {r:g} on atom {k}"),
                    TheoremTag("l2_unimodular_necessary"),
                )

    decision = decide_liminf_sup(angles, tol)
    if decision.outcome == "zero_liminf":
        n_star = decision.witness
        if isinstance(angles, (RationalList, ArithmeticFamily)):
            witness = WitnessSequence((n_star, 2 * n_star, 3 * n_star), note="sup vanishes")
        else:
            witness = WitnessSequence((n_star,), note=decision.certificate)
        return verdict(
            Level.UNIFORMLY_RIGID,
            witness,
            TheoremTag("l2_multiplication_theorem", decision.certificate),
        )
    sequence = build_rigidity_sequence(angles, RIGIDITY_TERMS, tol)
    constructed = WitnessSequence(sequence.terms, note="defect < 1/n on the first n values")
    base = TheoremTag("l2_countable_range_rigid", "rigidity sequence by Diophantine search")
    rigid = verdict(
        Level.RIGID,
        constructed,
        base,
        ViolatedCondition("not_uniformly_rigid", decision.certificate),
        conclusive=decision.outcome == "positive_liminf",
    )
    if decision.outcome == "positive_liminf":
        return rigid
    raise UndecidableError(decision.certificate, partial=rigid)


class ConstantMultiplier(BaseModel):
    kind: Literal["constant"] = "constant"
    value: ComplexValue


class PolynomialMultiplier(BaseModel):
    """φ(z) = Σ coefficients[m]·z^m, of degree at least one."""

    kind: Literal["polynomial"] = "polynomial"
    coefficients: list[ComplexValue] = Field(min_length=2)

    @model_validator(mode="after")
    def _degree(self):
        if all(c == 0 for c in self.coefficients[1:]):
            raise ValueError("polynomial multipliers must have degree ≥ 1")
        return self

    @property
    def degree(self) -> int:
        return max(m for m, c in enumerate(self.coefficients) if c != 0)

    def __call__(self, z):
        return P.polyval(z, np.asarray(self.coefficients, dtype=complex))


class SampledDiskMultiplier(BaseModel):
    kind: Literal["sampled"] = "sampled"
    points: list[ComplexValue]
    values: list[ComplexValue]

    @model_validator(mode="after")
    def _check(self):
        if len(self.points) != len(self.values):
            raise ValueError("points and values must have equal length")
        if any(abs(z) >= 1 for z in self.points):
            raise ValueError("sample points must lie in the open disk")
        return self


class SampledContinuousSymbol(BaseModel):
    """Values of φ along a grid of a connected compact K."""

    kind: Literal["sampled"] = "sampled"
    grid: list[float]
    values: list[ComplexValue]

    @model_validator(mode="after")
    def _check(self):
        if len(self.grid) != len(self.values):
            raise ValueError("grid and values must have equal length")
        if not all(math.isfinite(x) for x in self.grid):
            raise ValueError("grid must be finite")
        return self


AnalyticMultiplier = Annotated[
    Union[ConstantMultiplier, PolynomialMultiplier, SampledDiskMultiplier],
    Field(discriminator="kind"),
]
analytic_multiplier_adapter = TypeAdapter(AnalyticMultiplier)

ContinuousSymbol = Annotated[
    Union[ConstantMultiplier, SampledContinuousSymbol], Field(discriminator="kind")
]
continuous_symbol_adapter = TypeAdapter(ContinuousSymbol)


class FunctionSpace(BaseModel):
    kind: Literal["hardy", "bergman", "dirichlet", "bloch"]
    p: Optional[float] = None

    @model_validator(mode="after")
    def _check(self):
        if self.kind in ("hardy", "bergman") and (self.p is None or not self.p >= 1):
            raise ValueError(f"{self.kind} space needs p ≥ 1")
        return self

    def __str__(self) -> str:
        return f"{self.kind}{self.p:g}" if self.p is not None else self.kind


def _constant_witness(value: complex, tol: Tolerance) -> WitnessSequence:
    theta = angle_of(value)
    fraction = detect_rational(theta, tol)
    if fraction is not None:
        q = fraction.denominator
        return WitnessSequence((q, 2 * q, 3 * q), note=f"φ^{q} = 1")
    n_star = find_simultaneous_return([theta], tol.witness_target, 1)
    return WitnessSequence((n_star,), note=f"|φ^n − 1| < {tol.witness_target:g}")


def _unimodular_constant(value: complex, tag: str, tol: Tolerance) -> RecurrenceVerdict:
    if unit_circle_distance(value) <= tol.unimodular_eps:
        return verdict(
            Level.UNIFORMLY_RIGID,
            _constant_witness(value, tol),
            TheoremTag(tag, "unimodular constant"),
        )
    return verdict(
        Level.NOT_RECURRENT,
        ViolatedCondition("non_unimodular_constant", f"|φ| = {abs(value):.12g}"),
        TheoremTag(tag),
    )


def classify_mult_CK(
    symbol: Union[ConstantMultiplier, SampledContinuousSymbol],
    tol: Tolerance = DEFAULT_TOLERANCE,
) -> RecurrenceVerdict:
    """
    K is taken to be connected. Samples are compared with 𝕋 and with each other
    within unimodular_eps.
    """
    tag = "ck_multiplication_theorem"
    if isinstance(symbol, ConstantMultiplier):
        return _unimodular_constant(symbol.value, tag, tol)

    if len(symbol.values) < MIN_SAMPLES:
        raise GridTooCoarse(f"{len(symbol.values)} samples, at least {MIN_SAMPLES} required")
    x = np.asarray(symbol.grid, dtype=float)
    v = np.asarray(symbol.values, dtype=complex)
    eps = tol.unimodular_eps
    off = np.abs(np.abs(v) - 1)
    if off.max() > eps:
        i = int(np.argmax(off))
        return verdict(
            Level.NOT_RECURRENT,
            ViolatedCondition("modulus_violation", f"|φ({x[i]:g})| = {abs(v[i]):.12g}"),
            TheoremTag(tag),
        )
    spread = np.abs(v - v[0])
    if spread.max() <= eps:
        return _unimodular_constant(complex(v[0]), tag, tol)
    j = int(np.argmax(spread))
    return verdict(
        Level.NOT_RECURRENT,
        ViolatedCondition(
            "arc_obstruction",
            f"φ({x[0]:g}) ≠ φ({x[j]:g}): φ(K) contains an arc of 𝕋, "
            "and z^n → 1 cannot hold uniformly on it",
        ),
        TheoremTag(tag),
    )


def _space_tag(space: FunctionSpace) -> str:
    if space.kind == "hardy":
        return "hardy_multiplier_theorem"
    return "isometric_multiplier_theorem"


def classify_mult_analytic(
    symbol: Union[ConstantMultiplier, PolynomialMultiplier, SampledDiskMultiplier],
    space: FunctionSpace,
    tol: Tolerance = DEFAULT_TOLERANCE,
) -> RecurrenceVerdict:
    tag = _space_tag(space)
    if isinstance(symbol, ConstantMultiplier):
        return _unimodular_constant(symbol.value, tag, tol)
    if isinstance(symbol, PolynomialMultiplier):
        return verdict(
            Level.NOT_RECURRENT,
            ViolatedCondition("non_constant_symbol", f"polynomial of degree {symbol.degree}"),
            TheoremTag(tag, f"only unimodular constants on {space}"),
        )
    if len(symbol.values) < MIN_SAMPLES:
        raise GridTooCoarse(f"{len(symbol.values)} samples, at least {MIN_SAMPLES} required")
    v = np.asarray(symbol.values, dtype=complex)
    if np.abs(v - v[0]).max() <= tol.return_eps:
        return _unimodular_constant(complex(v[0]), tag, tol)
    return verdict(
        Level.NOT_RECURRENT,
        ViolatedCondition("non_constant_symbol", "sampled values are not constant"),
        TheoremTag(tag, f"only unimodular constants on {space}"),
    )


def adjoint_mult_H2_recurrence(
    symbol: PolynomialMultiplier,
    tol: Tolerance = DEFAULT_TOLERANCE,
    grid: int = ADJOINT_GRID,
) -> RecurrenceVerdict:
    """
    M_φ* on H² is recurrent iff φ(𝔻) ∩ 𝕋 ≠ ∅. Decided on a grid × grid polar
    grid of 𝔻 by a near-zero or a sign change of |φ| − 1; the sign change
    forces a crossing by continuity.
    """
    if grid < MIN_SAMPLES:
        raise GridTooCoarse(f"grid {grid} below {MIN_SAMPLES}")
    if not isinstance(symbol, PolynomialMultiplier):
        raise InvalidInput("adjoint criterion takes a non-constant polynomial")
    radii = np.arange(grid) / grid
    angles = np.exp(2j * np.pi * np.arange(grid) / grid)
    z = np.outer(radii, angles)
    gap = np.abs(symbol(z)) - 1
    distance = np.abs(gap)
    k = int(np.argmin(distance))
    closest = complex(z.flat[k])
    sign_change = bool(gap.min() < 0 < gap.max())
    if distance.flat[k] < tol.unimodular_eps or sign_change:
        return verdict(
            Level.RECURRENT,
            TheoremTag("adjoint_multiplier_theorem", f"φ(𝔻) meets 𝕋 near z = {closest:.6g}"),
            TheoremTag("recurrent_iff_hypercyclic"),
            ViolatedCondition("never_rigid", "M_φ* is never rigid"),
        )
    return verdict(
        Level.NOT_RECURRENT,
        ViolatedCondition(
            "image_misses_circle", f"min ||φ| − 1| = {distance.flat[k]:.6g} at z = {closest:.6g}"
        ),
        TheoremTag("adjoint_multiplier_theorem"),
        fragile=bool(distance.flat[k] < 1 / grid),
    )
