"""
Diagonal operators and weighted backward shifts on c₀, ℓ^p and ℓ^∞.

Symbols are finitely presented (`AngleSequence`, `WeightSequence`) so that the
characterizations become decision procedures. Rigidity sequences are built by
simultaneous Diophantine search and re-certified term by term.
"""

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Annotated, Literal, Optional, Sequence, Union

import numpy as np
from pydantic import BaseModel, Field, TypeAdapter, model_validator

from ..exceptions import (
    BudgetExhausted,
    CertificationFailure,
    InvalidInput,
    NotUnimodular,
    UndecidableError,
    UnresolvedCriterion,
)
from ..orbits import OperatorAction
from ..taxonomy import (
    DEFAULT_TOLERANCE,
    Level,
    RecurrenceVerdict,
    RigiditySequence,
    TheoremTag,
    Tolerance,
    ViolatedCondition,
    WitnessSequence,
    chord,
    chord_at,
    chords,
    detect_rational,
    verdict,
)
from ..types import ShiftVariant

DEFAULT_MAX_SCAN = 50_000_000
CHUNK_ELEMENTS = 1 << 21
SCAN_MARGIN = 1e-6
REFINE_MULTIPLES = 64


class FiniteList(BaseModel):
    """Angles θ_1..θ_N; coordinates beyond N act as the identity."""

    kind: Literal["finite"] = "finite"
    angles: list[float] = Field(min_length=1)
    moduli: Optional[list[float]] = None

    @model_validator(mode="after")
    def _check(self):
        if not all(math.isfinite(t) for t in self.angles):
            raise ValueError("angles must be finite")
        if self.moduli is not None:
            if len(self.moduli) != len(self.angles):
                raise ValueError("moduli must match angles")
            if not all(math.isfinite(r) and r > 0 for r in self.moduli):
                raise ValueError("moduli must be positive and finite")
        return self

    def head(self, n: int) -> list[float]:
        return self.angles[:n]

    def angle(self, k: int) -> float:
        return self.angles[k - 1] if k <= len(self.angles) else 0.0

    def modulus(self, k: int) -> float:
        if self.moduli is None or k > len(self.moduli):
            return 1.0
        return self.moduli[k - 1]


class ArithmeticFamily(BaseModel):
    """θ_k = kθ; `irrational` is a caller certificate."""

    kind: Literal["arithmetic"] = "arithmetic"
    theta: float = Field(allow_inf_nan=False)
    irrational: bool = False

    def head(self, n: int) -> list[float]:
        return [self.angle(k) for k in range(1, n + 1)]

    def angle(self, k: int) -> float:
        return k * self.theta

    def modulus(self, k: int) -> float:
        return 1.0


class DecayingFamily(BaseModel):
    """
    θ_k → 0 from one of three generators, each with the certified bound
    β_k = |θ_k|:

    - power: θ_k = scale / k^rate
    - geometric: θ_k = scale · rate^k, 0 < rate < 1
    - factorial: θ_k = scale / k!
    """

    kind: Literal["decaying"] = "decaying"
    generator: Literal["power", "geometric", "factorial"]
    scale: float = Field(default=1.0, allow_inf_nan=False)
    rate: float = Field(default=2.0, allow_inf_nan=False)

    @model_validator(mode="after")
    def _check(self):
        if self.generator == "power" and self.rate <= 0:
            raise ValueError("power generator needs rate > 0")
        if self.generator == "geometric" and not 0 < self.rate < 1:
            raise ValueError("geometric generator needs 0 < rate < 1")
        return self

    def angle(self, k: int) -> float:
        if self.generator == "power":
            return self.scale / k**self.rate
        if self.generator == "geometric":
            return self.scale * self.rate**k
        return self.scale / math.factorial(k) if k < 171 else 0.0

    def bound(self, k: int) -> float:
        return abs(self.angle(k))

    def head(self, n: int) -> list[float]:
        return [self.angle(k) for k in range(1, n + 1)]

    def modulus(self, k: int) -> float:
        return 1.0


class RationalList(BaseModel):
    kind: Literal["rational"] = "rational"
    fractions: list[tuple[int, int]] = Field(min_length=1)

    @model_validator(mode="after")
    def _check(self):
        if any(q < 1 for _, q in self.fractions):
            raise ValueError("denominators must be ≥ 1")
        return self

    def exact(self) -> list[Fraction]:
        return [Fraction(p, q) for p, q in self.fractions]

    def head(self, n: int) -> list[float]:
        return [float(f) for f in self.exact()[:n]]

    def angle(self, k: int) -> float:
        return float(self.exact()[k - 1]) if k <= len(self.fractions) else 0.0

    def modulus(self, k: int) -> float:
        return 1.0


AngleSequence = Annotated[
    Union[FiniteList, ArithmeticFamily, DecayingFamily, RationalList],
    Field(discriminator="kind"),
]
angle_sequence_adapter = TypeAdapter(AngleSequence)


class SpaceTag(BaseModel):
    kind: Literal["c0", "lp", "linf"]
    p: Optional[float] = None

    @model_validator(mode="after")
    def _check(self):
        if self.kind == "lp" and (self.p is None or not self.p >= 1):
            raise ValueError("lp needs p ≥ 1")
        return self

    def __str__(self) -> str:
        return f"l{self.p:g}" if self.kind == "lp" else self.kind


def _chord_fraction(x: Fraction) -> float:
    return 2.0 * abs(math.sin(math.pi * float(x - round(x))))


def _convergent_denominators(x: Fraction, limit: int) -> list[int]:
    """Denominators q_k ≤ limit of the continued-fraction convergents of x."""
    out = []
    q_prev, q = 0, 1
    while q <= limit:
        out.append(q)
        a = math.floor(x)
        if x == a:
            break
        x = 1 / (x - a)
        q_prev, q = q, math.floor(x) * q + q_prev
    return out


def _refine_return(
    originals: list[float], delta: float, lower: int, upper: int
) -> Optional[int]:
    # multiples of the best single-angle denominators of θ_1, certified on every angle
    candidates = sorted(
        {
            k * q
            for q in _convergent_denominators(Fraction(originals[0]) % 1, upper)
            for k in range(1, REFINE_MULTIPLES + 1)
            if lower <= k * q <= upper
        }
    )
    for candidate in candidates:
        if max(chord_at(candidate, t) for t in originals) < delta:
            return candidate
    return None


def find_simultaneous_return(
    thetas: Sequence[float],
    delta: float,
    n_min: int = 1,
    *,
    max_scan: int = DEFAULT_MAX_SCAN,
) -> int:
    """
    Least m ≥ n_min with max_j chord(m·θ_j) < δ.

    The Dirichlet pigeonhole bound n_min·N^d with N = ⌈2π/δ⌉ + 1 guarantees a
    solution. The scan walks upward in vectorized chunks, so the first certified
    hit is the minimum. When `max_scan` stops the scan short of the bound, the
    search continues over multiples of the convergent denominators of θ_1 up to
    the bound; a hit there is certified but only minimal among those candidates.
    Candidates are re-certified with exact reduction of m·θ.
    """
    if not delta > 0:
        raise InvalidInput(f"delta must be positive, got {delta}")
    if n_min < 1:
        raise InvalidInput(f"n_min must be ≥ 1, got {n_min}")
    if len(thetas) == 0:
        raise InvalidInput("at least one angle is required")
    if not all(math.isfinite(t) for t in thetas):
        raise InvalidInput("angles must be finite")
    originals = [float(t) for t in thetas]
    reduced = np.array([t - math.floor(t) for t in originals])

    bound = n_min * (math.ceil(2 * math.pi / delta) + 1) ** len(originals)
    scan_end = min(bound, n_min + max_scan - 1)
    chunk = max(1, CHUNK_ELEMENTS // len(originals))
    m = n_min
    while m <= scan_end:
        stop = min(m + chunk, scan_end + 1)
        ms = np.arange(m, stop, dtype=np.float64)
        worst = chords(np.outer(ms, reduced)).max(axis=1)
        for idx in np.flatnonzero(worst < delta + SCAN_MARGIN):
            candidate = m + int(idx)
            if max(chord_at(candidate, t) for t in originals) < delta:
                return candidate
        m = stop
    if scan_end < bound:
        refined = _refine_return(originals, delta, scan_end + 1, bound)
        if refined is not None:
            return refined
    raise BudgetExhausted(
        f"no simultaneous return below {delta:g} in [{n_min}, {scan_end}]"
        " or among convergent multiples up to the pigeonhole bound",
        bound=bound,
    )


@dataclass(frozen=True)
class LiminfDecision:
    outcome: Literal["zero_liminf", "positive_liminf", "undecidable"]
    witness: Optional[int]
    certificate: str

    def to_dict(self) -> dict:
        return {
            "outcome": self.outcome,
            "witness": self.witness,
            "certificate": self.certificate,
        }


def decide_liminf_sup(
    angles: Union[FiniteList, ArithmeticFamily, DecayingFamily, RationalList],
    tol: Tolerance = DEFAULT_TOLERANCE,
) -> LiminfDecision:
    """
    Decides whether liminf_n sup_k chord(n·θ_k) is zero.

    Zero comes with a witness n* whose supremum is below `tol.witness_target`
    (exactly zero for rational presentations).
    """
    if isinstance(angles, RationalList):
        n_star = math.lcm(*(f.denominator for f in angles.exact()))
        return LiminfDecision("zero_liminf", n_star, "sup vanishes at multiples of the lcm")

    if isinstance(angles, FiniteList):
        n_star = find_simultaneous_return(angles.angles, tol.witness_target, 1)
        return LiminfDecision(
            "zero_liminf", n_star, f"finite list, max chord < {tol.witness_target:g}"
        )

    if isinstance(angles, ArithmeticFamily):
        fraction = detect_rational(angles.theta, tol)
        if fraction is not None:
            return LiminfDecision(
                "zero_liminf", fraction.denominator, f"θ resolved as {fraction}"
            )
        if angles.irrational:
            return LiminfDecision(
                "positive_liminf", None, "orbit {kθ} dense ⇒ sup = 2 for every n"
            )
        return LiminfDecision(
            "undecidable",
            None,
            f"θ not rational with denominator ≤ {tol.max_denominator} "
            "and not certified irrational",
        )

    if angles.scale == 0:
        return LiminfDecision("zero_liminf", 1, "all angles vanish")
    if angles.generator == "power":
        return LiminfDecision(
            "positive_liminf",
            None,
            "consecutive ratios tend to 1, so for large n some n·θ_k lies in "
            "[1/4, 1/2] and sup ≥ chord(1/4) = √2",
        )
    if angles.generator == "geometric":
        r = angles.rate
        return LiminfDecision(
            "positive_liminf",
            None,
            f"consecutive ratio {r:g}, so for large n some n·θ_k lies in "
            f"[{r / 2:g}, 1/2] and sup ≥ {chord(r / 2):.6g}",
        )
    fraction = detect_rational(angles.scale, tol)
    if fraction is None:
        return LiminfDecision(
            "undecidable", None, "factorial scale not resolved as rational"
        )
    p, q = abs(fraction.numerator), fraction.denominator
    m = max(1, math.floor(2 * math.pi * p / tol.witness_target))
    while not 2 * math.pi * p / (m + 1) < tol.witness_target:
        m += 1
    return LiminfDecision(
        "zero_liminf",
        q * math.factorial(m),
        f"n* = {q}·{m}!: head angles integral, tail chord ≤ 2π·{p}/{m + 1}",
    )


def _head_for_level(angles, n: int) -> list[float]:
    return angles.head(n)


def _certified_defect(angles, m: int, n: int) -> float:
    if isinstance(angles, RationalList):
        return max(_chord_fraction(f * m) for f in angles.exact()[:n])
    return max(chord_at(m, t) for t in _head_for_level(angles, n))


def _require_unimodular(angles, tol: Tolerance) -> None:
    if isinstance(angles, FiniteList) and angles.moduli is not None:
        for k, r in enumerate(angles.moduli, start=1):
            if abs(r - 1) > tol.unimodular_eps:
                raise NotUnimodular(f"|λ_{k}| = {r:g} is not on the unit circle")


def build_rigidity_sequence(
    angles: Union[FiniteList, ArithmeticFamily, DecayingFamily, RationalList],
    count: int,
    tol: Tolerance = DEFAULT_TOLERANCE,
    max_scan: int = DEFAULT_MAX_SCAN,
) -> RigiditySequence:
    if count < 1:
        raise InvalidInput(f"count must be ≥ 1, got {count}")
    _require_unimodular(angles, tol)
    terms: list[int] = []
    defects: list[float] = []
    tails: list[float] = []
    previous = 0
    for n in range(1, count + 1):
        delta = 1.0 / n
        rho = find_simultaneous_return(
            _head_for_level(angles, n), delta, previous + 1, max_scan=max_scan
        )
        defect = _certified_defect(angles, rho, n)
        if not defect < delta:
            raise CertificationFailure(f"term {rho} has defect {defect} ≥ 1/{n}")
        terms.append(rho)
        defects.append(defect)
        if isinstance(angles, DecayingFamily):
            tails.append(min(2.0, 2 * math.pi * rho * angles.bound(n + 1)))
        previous = rho
    return RigiditySequence(
        terms=tuple(terms),
        defect=tuple(defects),
        tail_bound=tuple(tails) if isinstance(angles, DecayingFamily) else None,
    )


def classify_diagonal(
    angles: Union[FiniteList, ArithmeticFamily, DecayingFamily, RationalList],
    space: SpaceTag,
    tol: Tolerance = DEFAULT_TOLERANCE,
) -> RecurrenceVerdict:
    if isinstance(angles, FiniteList) and angles.moduli is not None:
        for k, r in enumerate(angles.moduli, start=1):
            if abs(r - 1) > tol.unimodular_eps:
                return verdict(
                    Level.NOT_RECURRENT,
                    ViolatedCondition("non_unimodular_entry", f"|λ_{k}| = {r:g}"),
                    TheoremTag("diagonal_unimodularity_necessary"),
                )

    decision = decide_liminf_sup(angles, tol)
    witness = None
    if decision.outcome == "zero_liminf":
        n_star = decision.witness
        multiples = (n_star, 2 * n_star, 3 * n_star)
        if isinstance(angles, (RationalList, ArithmeticFamily)):
            witness = WitnessSequence(multiples, note="sup over k vanishes")
        else:
            witness = WitnessSequence((n_star,), note=decision.certificate)

    if space.kind == "linf":
        tag = TheoremTag("linf_diagonal_theorem", decision.certificate)
        if decision.outcome == "zero_liminf":
            return verdict(Level.UNIFORMLY_RIGID, witness, tag)
        if decision.outcome == "positive_liminf":
            return verdict(
                Level.NOT_RECURRENT,
                ViolatedCondition("liminf_sup_positive", decision.certificate),
                tag,
            )
        raise UndecidableError(decision.certificate)

    base = TheoremTag(
        "c0_lp_diagonal_theorem", f"unimodular diagonal on {space} is rigid"
    )
    if decision.outcome == "zero_liminf":
        return verdict(Level.UNIFORMLY_RIGID, witness, base)
    rigid = verdict(
        Level.RIGID,
        base,
        ViolatedCondition("not_uniformly_rigid", decision.certificate),
        conclusive=decision.outcome == "positive_liminf",
    )
    if decision.outcome == "positive_liminf":
        return rigid
    raise UndecidableError(decision.certificate, partial=rigid)


class WeightTail(BaseModel):
    kind: Literal["constant", "periodic"]
    values: list[float] = Field(min_length=1)

    @model_validator(mode="after")
    def _check(self):
        if self.kind == "constant" and len(self.values) != 1:
            raise ValueError("constant tail takes exactly one value")
        if not all(math.isfinite(v) and v > 0 for v in self.values):
            raise ValueError("weights must be positive and finite")
        return self

    def at(self, offset: int) -> float:
        return self.values[offset % len(self.values)]

    def log_mean(self) -> float:
        return float(np.mean(np.log(self.values)))


class WeightSequence(BaseModel):
    """
    Weights w_k for B e_k = w_k e_{k−1}: an explicit window starting at
    `window_start`, a `tail` rule after it and, for bilateral sequences, a
    `negative_tail` rule before it.
    """

    kind: Literal["unilateral", "bilateral"]
    window: list[float] = Field(default_factory=list)
    window_start: int = 1
    tail: Optional[WeightTail] = None
    negative_tail: Optional[WeightTail] = None

    @model_validator(mode="after")
    def _check(self):
        if not all(math.isfinite(v) and v > 0 for v in self.window):
            raise ValueError("weights must be positive and finite")
        if self.kind == "unilateral":
            if self.window_start != 1:
                raise ValueError("unilateral weights start at index 1")
            if self.negative_tail is not None:
                raise ValueError("unilateral weights have no negative tail")
        return self

    def weight(self, k: int) -> float:
        end = self.window_start + len(self.window)
        if self.window_start <= k < end:
            return self.window[k - self.window_start]
        if k >= end:
            if self.tail is None:
                raise UnresolvedCriterion(f"no tail rule for w_{k}")
            return self.tail.at(k - end)
        if self.kind == "unilateral":
            raise InvalidInput(f"unilateral weights are indexed from 1, got {k}")
        if self.negative_tail is None:
            raise UnresolvedCriterion(f"no negative tail rule for w_{k}")
        return self.negative_tail.at(self.window_start - 1 - k)


class SalasCriterion:
    """
    Hypercyclicity of weighted backward shifts B e_k = w_k e_{k−1} with
    eventually periodic weights.

    Unilateral: hypercyclic iff sup_n ∏_{i=1}^n w_i = ∞, which for a periodic
    tail means the tail geometric mean g exceeds 1.

    Bilateral (Salas): hypercyclic iff for every q there are n_j → ∞ with
    ∏_{s=1}^{n} w_{j+s} → ∞ and ∏_{s=0}^{n−1} w_{j−s} → 0 for all |j| ≤ q.
    With periodic tails the positive-side products grow like g₊^n and the
    negative-side products like g₋^n, so the condition reads g₊ > 1 and g₋ < 1.

    A geometric mean within tolerance of 1 but not equal to it cannot be
    resolved in floating point and raises UnresolvedCriterion; a mean of
    exactly 1 gives bounded products.
    """

    name = "salas_weight_criterion"

    @staticmethod
    def _log_mean(tail: Optional[WeightTail], side: str, tol: Tolerance) -> float:
        if tail is None:
            raise UnresolvedCriterion(f"no {side} tail rule, product divergence undecided")
        g = tail.log_mean()
        if g != 0 and abs(g) <= tol.unimodular_eps:
            raise UnresolvedCriterion(f"{side} tail geometric mean too close to 1")
        return g

    def decide(self, weights: WeightSequence, tol: Tolerance) -> tuple[bool, str]:
        g_plus = self._log_mean(weights.tail, "positive", tol)
        if weights.kind == "unilateral":
            holds = g_plus > 0
            return holds, f"tail geometric mean {math.exp(g_plus):.12g}"
        g_minus = self._log_mean(weights.negative_tail, "negative", tol)
        holds = g_plus > 0 and g_minus < 0
        return holds, (
            f"geometric means g+ = {math.exp(g_plus):.12g}, g- = {math.exp(g_minus):.12g}"
        )


SALAS = SalasCriterion()
GROWTH_M = 10


def classify_shift(
    weights: WeightSequence,
    space: SpaceTag,
    variant: ShiftVariant = "B_w",
    tol: Tolerance = DEFAULT_TOLERANCE,
) -> RecurrenceVerdict:
    if space.kind == "linf":
        a1 = weights.weight(1)
        if variant == "B_w":
            bound = a1 * (GROWTH_M - 1) / 5
            return verdict(
                Level.NOT_RECURRENT,
                TheoremTag("linf_backward_shift_theorem"),
                ViolatedCondition(
                    "weight_growth",
                    f"recurrence forces a weight above w_1·(M−1)/5 = {bound:.12g} "
                    f"at M = {GROWTH_M}, for every M",
                ),
            )
        n_star = math.ceil(5 / a1)
        return verdict(
            Level.NOT_RECURRENT,
            TheoremTag("linf_identity_plus_shift_theorem"),
            ViolatedCondition(
                "binomial_growth", f"a return at any N ≥ {n_star} violates N·w_1 < 5"
            ),
        )

    if variant == "I_plus_B_w":
        if weights.kind == "bilateral":
            raise UnresolvedCriterion("I + B_w for bilateral weights is not covered")
        return verdict(
            Level.RECURRENT,
            TheoremTag("identity_plus_backward_shift_hypercyclic"),
            TheoremTag("recurrent_iff_hypercyclic"),
            ViolatedCondition("never_rigid", "‖(I+B)^n e_k − e_k‖ ≥ n·w_k"),
        )

    holds, detail = SALAS.decide(weights, tol)
    if holds:
        return verdict(
            Level.RECURRENT,
            TheoremTag(SALAS.name, detail),
            TheoremTag("recurrent_iff_hypercyclic"),
            ViolatedCondition("never_rigid", "‖B^n e_k − e_k‖ ≥ 1"),
        )
    return verdict(
        Level.NOT_RECURRENT,
        ViolatedCondition("weight_products_bounded", detail),
        TheoremTag("recurrent_iff_hypercyclic"),
    )


class DiagonalOperator(BaseModel):
    kind: Literal["diagonal"] = "diagonal"
    angles: AngleSequence


class ShiftOperator(BaseModel):
    kind: Literal["shift"] = "shift"
    weights: WeightSequence
    variant: ShiftVariant = "B_w"


SequenceOperator = Annotated[
    Union[DiagonalOperator, ShiftOperator], Field(discriminator="kind")
]
sequence_operator_adapter = TypeAdapter(SequenceOperator)


def truncation_indices(weights: WeightSequence, dim: int) -> list[int]:
    if weights.kind == "unilateral":
        return list(range(1, dim + 1))
    low = -(dim // 2)
    return list(range(low, low + dim))


def truncate(op: Union[DiagonalOperator, ShiftOperator], dim: int) -> OperatorAction:
    if dim < 1:
        raise InvalidInput(f"dim must be ≥ 1, got {dim}")
    if isinstance(op, DiagonalOperator):
        angles = op.angles
        entries = [
            angles.modulus(k) * np.exp(2j * np.pi * angles.angle(k)) for k in range(1, dim + 1)
        ]
        return OperatorAction.from_matrix(np.diag(entries), name="diagonal")
    matrix = np.zeros((dim, dim), dtype=complex)
    indices = truncation_indices(op.weights, dim)
    for i in range(1, dim):
        matrix[i - 1, i] = op.weights.weight(indices[i])
    if op.variant == "I_plus_B_w":
        matrix += np.eye(dim)
    return OperatorAction.from_matrix(matrix, name=op.variant)


def shift_return_probe(
    weights: WeightSequence, dim: int, period: int, seed: int = 0
) -> np.ndarray:
    """
    Truncation vector with x_{k+period} = x_k / ∏_{i=k+1}^{k+period} w_i, so that
    B^period x agrees with x except on the last `period` coordinates.
    """
    if not 1 <= period < dim:
        raise InvalidInput("period must satisfy 1 ≤ period < dim")
    indices = truncation_indices(weights, dim)
    w = np.array([weights.weight(k) for k in indices])
    rng = np.random.default_rng(seed)
    x = np.zeros(dim, dtype=complex)
    x[:period] = rng.standard_normal(period) + 1j * rng.standard_normal(period)
    for i in range(period, dim):
        x[i] = x[i - period] / np.prod(w[i - period + 1 : i + 1])
    return x
