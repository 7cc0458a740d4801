"""
Composition operators C_φ f = f ∘ φ.

Covers linear fractional self-maps of the disk on H(𝔻) and H²(𝔻), affine
symbols on H(ℂ), the two symbol families on H(ℂ*) and self-maps of [0, 1] on
C([0, 1]).
"""

import cmath
import math
from dataclasses import dataclass
from typing import Annotated, Literal, Optional, Sequence, Union

import numpy as np
from pydantic import BaseModel, Field, TypeAdapter, model_validator

from ..exceptions import DegenerateMap, GridTooCoarse, InvalidInput, NotSelfMap
from ..taxonomy import (
    DEFAULT_TOLERANCE,
    ComplexValue,
    Level,
    RecurrenceVerdict,
    TheoremTag,
    Tolerance,
    ViolatedCondition,
    WitnessSequence,
    angle_of,
    chord_at,
    detect_rational,
    ensure_finite,
    unit_circle_distance,
    verdict,
)

BOUNDARY_GRID = 4096
FIXED_POINT_CHECK = 1e-10
ON_CIRCLE_BAND = 1e-8
AFFINE_C = 1e-13
MIN_INTERVAL_SAMPLES = 16


class LFMDocument(BaseModel):
    a: ComplexValue
    b: ComplexValue
    c: ComplexValue
    d: ComplexValue


@dataclass(frozen=True)
class LinearFractionalMap:
    a: complex
    b: complex
    c: complex
    d: complex

    def __post_init__(self):
        for name in "abcd":
            object.__setattr__(self, name, ensure_finite(getattr(self, name)))

    @classmethod
    def from_document(cls, doc: LFMDocument) -> "LinearFractionalMap":
        return cls(doc.a, doc.b, doc.c, doc.d)

    @property
    def determinant(self) -> complex:
        return self.a * self.d - self.b * self.c

    def scale(self) -> float:
        return max(abs(self.a), abs(self.b), abs(self.c), abs(self.d))

    def normalized(self, tol: Tolerance = DEFAULT_TOLERANCE) -> "LinearFractionalMap":
        det = self.determinant
        if abs(det) <= tol.unimodular_eps * self.scale() ** 2:
            raise DegenerateMap(f"ad − bc = {det} vanishes within tolerance")
        root = cmath.sqrt(det)
        return LinearFractionalMap(self.a / root, self.b / root, self.c / root, self.d / root)

    def __call__(self, z):
        return (self.a * z + self.b) / (self.c * z + self.d)

    def derivative(self, z):
        return self.determinant / (self.c * z + self.d) ** 2

    def matrix(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]], dtype=complex)

    @classmethod
    def from_matrix(cls, m: np.ndarray) -> "LinearFractionalMap":
        return cls(complex(m[0, 0]), complex(m[0, 1]), complex(m[1, 0]), complex(m[1, 1]))

    def to_dict(self) -> dict:
        return {"a": self.a, "b": self.b, "c": self.c, "d": self.d}


def _unit_det(m: np.ndarray) -> np.ndarray:
    return m / cmath.sqrt(m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0])


def iterate_lfm(phi: LinearFractionalMap, n: int) -> LinearFractionalMap:
    """φ^{[n]} by repeated squaring of the coefficient matrix, renormalized to unit determinant."""
    if n < 0:
        raise InvalidInput(f"n must be non-negative, got {n}")
    result = np.eye(2, dtype=complex)
    base = _unit_det(phi.matrix())
    while n:
        if n & 1:
            result = _unit_det(result @ base)
        base = _unit_det(base @ base)
        n >>= 1
    return LinearFractionalMap.from_matrix(result)


@dataclass(frozen=True, kw_only=True)
class LFMTaxon:
    symbol: LinearFractionalMap
    fragile: bool = False

    kind = "taxon"

    def fixed_points(self) -> list[complex]:
        return []

    def __post_init__(self):
        for z in self.fixed_points():
            err = abs(self.symbol(z) - z)
            if not err < FIXED_POINT_CHECK * max(1.0, abs(z)):
                raise NotSelfMap(f"fixed point {z} fails re-verification (error {err:.3g})")

    def to_dict(self) -> dict:
        out = {"kind": self.kind, "fragile": self.fragile}
        for name, value in self.__dict__.items():
            if name not in ("symbol", "fragile"):
                out[name] = value
        return out


@dataclass(frozen=True, kw_only=True)
class Parabolic(LFMTaxon):
    automorphism: bool
    fixed_point: complex
    kind = "parabolic"

    def fixed_points(self):
        return [self.fixed_point]


@dataclass(frozen=True, kw_only=True)
class HyperbolicBoundary(LFMTaxon):
    attractive: complex
    other: Optional[complex]  # None is the point at infinity
    automorphism: bool
    kind = "hyperbolic_boundary"

    def fixed_points(self):
        return [z for z in (self.attractive, self.other) if z is not None]


@dataclass(frozen=True, kw_only=True)
class InteriorAttractive(LFMTaxon):
    fixed_point: complex
    kind = "interior_attractive"

    def fixed_points(self):
        return [self.fixed_point]


@dataclass(frozen=True, kw_only=True)
class EllipticAutomorphism(LFMTaxon):
    interior_fp: complex
    multiplier: complex
    kind = "elliptic_automorphism"

    def fixed_points(self):
        return [self.interior_fp]


@dataclass(frozen=True)
class BoundaryProfile:
    maximum: float
    minimum: float


def boundary_profile(phi: LinearFractionalMap) -> BoundaryProfile:
    """
    Extremes of |φ| on 𝕋 from a 4096-point grid, merged with the exact image
    circle (center (b·d̄ − a·c̄)/(|d|² − |c|²), radius |ad − bc|/(|d|² − |c|²)).
    """
    z = np.exp(2j * np.pi * np.arange(BOUNDARY_GRID) / BOUNDARY_GRID)
    values = np.abs(phi(z))
    denom = abs(phi.d) ** 2 - abs(phi.c) ** 2
    center = (phi.b * phi.d.conjugate() - phi.a * phi.c.conjugate()) / denom
    radius = abs(phi.determinant) / denom
    return BoundaryProfile(
        maximum=max(float(values.max()), abs(center) + radius),
        minimum=min(float(values.min()), abs(abs(center) - radius)),
    )


def _fixed_points(phi: LinearFractionalMap, tol: Tolerance):
    """
    Roots of c·z² + (d − a)·z − b = 0 as (roots, double_root, fragile); None
    stands for ∞.
    """
    a, b, c, d = phi.a, phi.b, phi.c, phi.d
    if abs(c) <= AFFINE_C * phi.scale():
        return [b / (d - a), None], False, False
    disc = (d - a) ** 2 + 4 * b * c
    band = tol.unimodular_eps * (abs(a) + abs(d)) ** 2
    fragile = band / 10 <= abs(disc) < 10 * band
    if abs(disc) < band:
        return [(a - d) / (2 * c)], True, fragile
    s = cmath.sqrt(disc)
    q = (a - d) + s if abs((a - d) + s) >= abs((a - d) - s) else (a - d) - s
    z1 = q / (2 * c)
    z2 = -2 * b / q
    return [z1, z2], False, fragile


def classify_lfm(phi: LinearFractionalMap, tol: Tolerance = DEFAULT_TOLERANCE) -> LFMTaxon:
    symbol = phi
    phi = phi.normalized(tol)
    eps = tol.unimodular_eps
    if abs(phi.c) >= abs(phi.d):
        raise NotSelfMap("pole lies in the closed unit disk")
    if abs(phi(0)) >= 1:
        raise NotSelfMap(f"|φ(0)| = {abs(phi(0)):.12g} ≥ 1")
    profile = boundary_profile(phi)
    if profile.maximum > 1 + eps:
        raise NotSelfMap(f"max |φ| on the circle is {profile.maximum:.12g}")
    automorphism = profile.minimum >= 1 - eps

    if abs(phi.b) <= eps and abs(phi.c) <= eps and abs(phi.a - phi.d) <= eps:
        return EllipticAutomorphism(symbol=symbol, interior_fp=0j, multiplier=1 + 0j)

    roots, double, fragile = _fixed_points(phi, tol)
    finite = [z for z in roots if z is not None]
    interior = [z for z in finite if abs(z) < 1 - ON_CIRCLE_BAND]
    if interior:
        z = interior[0]
        multiplier = complex(phi.derivative(z))
        if automorphism and unit_circle_distance(multiplier) <= max(eps, ON_CIRCLE_BAND):
            return EllipticAutomorphism(
                symbol=symbol, interior_fp=z, multiplier=multiplier, fragile=fragile
            )
        return InteriorAttractive(symbol=symbol, fixed_point=z, fragile=fragile)

    on_circle = [z for z in finite if abs(abs(z) - 1) <= ON_CIRCLE_BAND]
    if double:
        if not on_circle:
            raise NotSelfMap("double fixed point off the circle with no interior fixed point")
        return Parabolic(
            symbol=symbol, automorphism=automorphism, fixed_point=on_circle[0], fragile=fragile
        )
    if not on_circle:
        raise NotSelfMap("no fixed point in the closed disk")
    attractive = min(on_circle, key=lambda z: abs(phi.derivative(z)))
    others = [z for z in roots if z is not attractive]
    return HyperbolicBoundary(
        symbol=symbol,
        attractive=attractive,
        other=others[0] if others else None,
        automorphism=automorphism,
        fragile=fragile,
    )


def attracting_point(taxon: LFMTaxon) -> Optional[complex]:
    if isinstance(taxon, (InteriorAttractive, Parabolic)):
        return taxon.fixed_point
    if isinstance(taxon, HyperbolicBoundary):
        return taxon.attractive
    return None


def denjoy_wolff_trace(phi: LinearFractionalMap, z0: complex, n: int, tol=DEFAULT_TOLERANCE):
    """Distances |φ^{[k]}(z0) − p| for k = 1..n, p the Denjoy–Wolff point."""
    p = attracting_point(classify_lfm(phi, tol))
    if p is None:
        raise InvalidInput("elliptic automorphisms have no Denjoy–Wolff point")
    out, z = [], complex(z0)
    for _ in range(n):
        z = phi(z)
        out.append(abs(z - p))
    return out


def escapes_compact(phi: LinearFractionalMap, r: float, n_max: int = 10_000) -> Optional[int]:
    """
    First n with φ^{[n]}(K) ∩ K = ∅ for K the closed disk of radius r, tested on
    a polar grid of K, or None within n_max.
    """
    if not 0 < r < 1:
        raise InvalidInput("radius must lie in (0, 1)")
    radii = r * np.arange(0, 9) / 8
    angles = np.exp(2j * np.pi * np.arange(64) / 64)
    z = np.outer(radii, angles).ravel()
    for n in range(1, n_max + 1):
        z = phi(z)
        if np.all(np.abs(z) > r):
            return n
    return None


class GeneralSymbol(BaseModel):
    """Caller assertions about a non-linear-fractional self-map of 𝔻."""

    kind: Literal["general"] = "general"
    univalent: bool
    fixed_point_free: bool
    elliptic_automorphism: bool = False


def _lfm_or_general(symbol):
    if isinstance(symbol, LFMDocument):
        return LinearFractionalMap.from_document(symbol)
    return symbol


def classify_composition_HD(
    symbol: Union[LinearFractionalMap, GeneralSymbol], tol: Tolerance = DEFAULT_TOLERANCE
) -> RecurrenceVerdict:
    symbol = _lfm_or_general(symbol)
    if isinstance(symbol, GeneralSymbol):
        if symbol.elliptic_automorphism:
            return verdict(Level.RIGID, TheoremTag("hd_rigid_theorem", "elliptic automorphism"))
        if symbol.univalent and symbol.fixed_point_free:
            return verdict(
                Level.RECURRENT,
                TheoremTag("hd_recurrence_theorem", "univalent without fixed point (asserted)"),
            )
        failed = "not_univalent" if not symbol.univalent else "has_fixed_point"
        return verdict(
            Level.NOT_RECURRENT,
            ViolatedCondition(failed, "caller assertion"),
            TheoremTag("hd_recurrence_theorem"),
        )

    taxon = classify_lfm(symbol, tol)
    if isinstance(taxon, EllipticAutomorphism):
        return verdict(
            Level.RIGID,
            TheoremTag("hd_rigid_theorem", "elliptic automorphism"),
            fragile=taxon.fragile,
        )
    if isinstance(taxon, InteriorAttractive):
        return verdict(
            Level.NOT_RECURRENT,
            ViolatedCondition(
                "interior_attractive_fixed_point", f"iterates converge to {taxon.fixed_point}"
            ),
            TheoremTag("hd_recurrence_theorem"),
            fragile=taxon.fragile,
        )
    return verdict(
        Level.RECURRENT,
        TheoremTag("hd_lfm_corollary", f"{taxon.kind} without fixed point in the disk"),
        ViolatedCondition("hereditarily_hypercyclic_not_rigid"),
        fragile=taxon.fragile,
    )


def classify_composition_H2(
    phi: LinearFractionalMap, tol: Tolerance = DEFAULT_TOLERANCE
) -> RecurrenceVerdict:
    if isinstance(phi, LFMDocument):
        phi = LinearFractionalMap.from_document(phi)
    taxon = classify_lfm(phi, tol)
    fragile = taxon.fragile
    if isinstance(taxon, InteriorAttractive):
        return verdict(
            Level.NOT_RECURRENT,
            ViolatedCondition("interior_attractive_fixed_point"),
            TheoremTag("h2_recurrence_theorem"),
            fragile=fragile,
        )
    if isinstance(taxon, Parabolic) and not taxon.automorphism:
        return verdict(
            Level.NOT_RECURRENT,
            ViolatedCondition(
                "parabolic_non_automorphism", "only constant functions can be limit points"
            ),
            TheoremTag("h2_recurrence_theorem"),
            fragile=fragile,
        )
    if isinstance(taxon, (Parabolic, HyperbolicBoundary)):
        return verdict(
            Level.RECURRENT,
            TheoremTag("h2_recurrence_theorem", taxon.kind),
            ViolatedCondition("hereditarily_hypercyclic_not_rigid"),
            fragile=fragile,
        )
    theta = angle_of(taxon.multiplier)
    fraction = detect_rational(theta, tol)
    if fraction is None:
        return verdict(
            Level.RIGID,
            TheoremTag("h2_rigid_theorem", "elliptic automorphism"),
            TheoremTag("rationality_undecided", f"Q={tol.max_denominator}"),
            fragile=fragile,
            conclusive=False,
        )
    q = fraction.denominator
    return verdict(
        Level.UNIFORMLY_RIGID,
        WitnessSequence((q, 2 * q, 3 * q), note=f"multiplier angle {fraction}"),
        TheoremTag("h2_uniform_rigidity_theorem", "conjugate to a rational rotation"),
        fragile=fragile,
    )


def verify_H2_rotation(
    lam: complex,
    coeffs: Sequence[complex],
    n: int,
    tol: Tolerance = DEFAULT_TOLERANCE,
) -> float:
    """‖C_φ^n f − f‖² in H² for φ(z) = λz and f = Σ a_m z^m."""
    if unit_circle_distance(lam) > tol.unimodular_eps:
        raise InvalidInput(f"|λ| = {abs(lam)} is not on the unit circle")
    if n < 1:
        raise InvalidInput(f"n must be ≥ 1, got {n}")
    theta = angle_of(lam)
    fraction = detect_rational(theta, tol)
    total = 0.0
    for m, a in enumerate(coeffs):
        a = ensure_finite(a)
        if a == 0 or m == 0:
            continue
        if fraction is not None:
            x = fraction * (m * n)
            c = 2.0 * abs(math.sin(math.pi * float(x - round(x))))
        else:
            c = chord_at(m * n, theta)
        total += abs(a) ** 2 * c**2
    return total


class AffineSymbol(BaseModel):
    kind: Literal["affine_entire"] = "affine_entire"
    a: ComplexValue
    b: ComplexValue


def classify_composition_entire(
    phi: AffineSymbol, tol: Tolerance = DEFAULT_TOLERANCE
) -> RecurrenceVerdict:
    eps = tol.unimodular_eps
    if unit_circle_distance(phi.a) > eps:
        return verdict(
            Level.NOT_RECURRENT,
            ViolatedCondition("non_unimodular_dilation", f"|a| = {abs(phi.a):.12g}"),
            TheoremTag("entire_recurrence_theorem"),
        )
    if abs(phi.a - 1) <= eps:
        if abs(phi.b) <= eps:
            return verdict(
                Level.RIGID,
                WitnessSequence((1, 2, 3), note="identity"),
                TheoremTag("entire_rigid_theorem", "identity"),
            )
        return verdict(
            Level.RECURRENT,
            TheoremTag("entire_recurrence_theorem"),
            ViolatedCondition("hereditarily_hypercyclic_translation", f"b = {phi.b}"),
        )
    return verdict(Level.RIGID, TheoremTag("entire_rigid_theorem", "a ∈ 𝕋 \\ {1}"))


class PunctureSymbol(BaseModel):
    kind: Literal["mult", "inv"]
    a: ComplexValue

    @model_validator(mode="after")
    def _nonzero(self):
        if self.a == 0:
            raise ValueError("a must be non-zero")
        return self


def classify_composition_punctured(
    phi: PunctureSymbol, tol: Tolerance = DEFAULT_TOLERANCE
) -> RecurrenceVerdict:
    if phi.kind == "inv":
        return verdict(
            Level.RIGID,
            WitnessSequence((2, 4, 6, 8, 10), note="C_φ² = I"),
            TheoremTag("punctured_plane_theorem", "φ(z) = a/z"),
        )
    if unit_circle_distance(phi.a) > tol.unimodular_eps:
        return verdict(
            Level.NOT_RECURRENT,
            ViolatedCondition("non_unimodular_dilation", f"|a| = {abs(phi.a):.12g}"),
            TheoremTag("punctured_plane_theorem"),
        )
    evidence = [TheoremTag("punctured_plane_theorem", "φ(z) = az with a ∈ 𝕋")]
    fraction = detect_rational(angle_of(phi.a), tol)
    if fraction is not None:
        q = fraction.denominator
        evidence.insert(0, WitnessSequence((q, 2 * q, 3 * q), note="a^q = 1"))
    return verdict(Level.RIGID, *evidence)


class IdentityMap(BaseModel):
    kind: Literal["identity"] = "identity"


class ReflectionMap(BaseModel):
    kind: Literal["reflection"] = "reflection"


class AffineIntervalMap(BaseModel):
    kind: Literal["affine"] = "affine"
    p: float = Field(allow_inf_nan=False)
    q: float = Field(allow_inf_nan=False)


class SampledIntervalMap(BaseModel):
    kind: Literal["sampled"] = "sampled"
    grid: list[float]
    values: list[float]

    @model_validator(mode="after")
    def _check(self):
        if len(self.grid) != len(self.values):
            raise ValueError("grid and values must have equal length")
        if not all(math.isfinite(v) for v in self.grid + self.values):
            raise ValueError("samples must be finite")
        return self


IntervalSymbol = Annotated[
    Union[IdentityMap, ReflectionMap, AffineIntervalMap, SampledIntervalMap],
    Field(discriminator="kind"),
]
interval_symbol_adapter = TypeAdapter(IntervalSymbol)

_UNIFORM_INTERVAL = {
    "identity": (WitnessSequence((1, 2, 3), note="C_φ = I"), "φ(x) = x"),
    "reflection": (WitnessSequence((2, 4, 6), note="C_φ² = I"), "φ(x) = 1 − x"),
}


def _interval_uniform(which: str) -> RecurrenceVerdict:
    witness, detail = _UNIFORM_INTERVAL[which]
    return verdict(Level.UNIFORMLY_RIGID, witness, TheoremTag("interval_theorem", detail))


def _interval_reject(tag: str, detail: str) -> RecurrenceVerdict:
    return verdict(
        Level.NOT_RECURRENT, ViolatedCondition(tag, detail), TheoremTag("interval_theorem")
    )


def classify_composition_interval(
    phi: Union[IdentityMap, ReflectionMap, AffineIntervalMap, SampledIntervalMap],
    tol: Tolerance = DEFAULT_TOLERANCE,
) -> RecurrenceVerdict:
    if isinstance(phi, (IdentityMap, ReflectionMap)):
        return _interval_uniform(phi.kind)

    if isinstance(phi, AffineIntervalMap):
        p, q = phi.p, phi.q
        lo, hi = min(q, p + q), max(q, p + q)
        if lo < 0 or hi > 1:
            raise InvalidInput(f"φ(x) = {p}x + {q} does not map [0, 1] into itself")
        if p == 1 and q == 0:
            return _interval_uniform("identity")
        if p == -1 and q == 1:
            return _interval_uniform("reflection")
        if p == 0:
            return _interval_reject("not_injective", f"φ is constant {q:g}")
        x0 = 0.0 if abs(q) >= abs(p + q - 1) else 1.0
        return _interval_reject(
            "not_surjective",
            f"range [{lo:g}, {hi:g}]; |φ(x0) − x0| = {abs(p * x0 + q - x0):g} at x0 = {x0:g}",
        )

    x = np.asarray(phi.grid, dtype=float)
    v = np.asarray(phi.values, dtype=float)
    if x.size < MIN_INTERVAL_SAMPLES:
        raise GridTooCoarse(f"{x.size} samples, at least {MIN_INTERVAL_SAMPLES} required")
    if np.any(np.diff(x) <= 0) or x[0] < 0 or x[-1] > 1:
        raise InvalidInput("grid must be strictly increasing inside [0, 1]")
    eps = tol.return_eps
    if v.min() < -eps or v.max() > 1 + eps:
        raise InvalidInput("sampled values must lie in [0, 1]")
    if np.max(np.abs(v - x)) <= eps:
        return _interval_uniform("identity")
    if np.max(np.abs(v - (1 - x))) <= eps:
        return _interval_uniform("reflection")
    steps = np.diff(v)
    increasing, decreasing = np.all(steps > 0), np.all(steps < 0)
    if not (increasing or decreasing):
        i = int(np.argmax(np.sign(steps) != np.sign(steps[0])))
        return _interval_reject(
            "not_injective", f"samples not strictly monotone near x = {x[i]:g}"
        )
    if v.min() > eps or v.max() < 1 - eps:
        return _interval_reject("not_surjective", f"range [{v.min():g}, {v.max():g}]")
    target = x if increasing else 1 - x
    i = int(np.argmax(np.abs(v - target)))
    return _interval_reject(
        "monotone_but_not_identity",
        f"x0 = {x[i]:g}, deviation {abs(v[i] - target[i]):g}",
    )
