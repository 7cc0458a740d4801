"""Laws relating the verdict of T to the verdicts of operators built from it."""

import cmath
import math

import numpy as np
import scipy.linalg

from ..exceptions import ConvergenceFailure
from ..operators.matrix import classify_complex, necessary_conditions
from ..orbits import OperatorAction, default_ensemble, empirical_verdict, scan_returns
from ..taxonomy import DEFAULT_TOLERANCE, Level, RecurrenceVerdict
from . import LawFailure, Skip, law
from .generators import identity_plus_finite_rank, mixed, spoiler, unimodular_diagonalizable

MULTIPLIERS = {
    "i": (1j, 4),
    "e^{2πi/3}": (cmath.exp(2j * math.pi / 3), 3),
    "e^{2πi√2}": (cmath.exp(2j * math.pi * math.sqrt(2)), None),
}
POWERS = (2, 3, 5)
ORACLE_HORIZON = 2000
ORACLE_EPS = 1e-3
FIXED_SPACE_EPS = 1e-8


def classify(matrix: np.ndarray) -> RecurrenceVerdict:
    try:
        result = classify_complex(matrix, DEFAULT_TOLERANCE)
    except ConvergenceFailure as e:
        raise Skip(str(e)) from None
    if result.fragile:
        raise Skip("fragile verdict")
    return result


def _compare(description: str, expected: Level, observed: Level, what: str):
    if expected == observed:
        return None
    return LawFailure(description, f"{what}: {expected.label}", f"{observed.label}")


@law(
    "unimodular_multiple_law",
    "T and λT have the same recurrence level for |λ| = 1",
    "mixed 4x4: unimodular diagonalizable or spoiled; λ ∈ {i, e^{2πi/3}, e^{2πi√2}}",
)
def unimodular_multiple_law(rng: np.random.Generator):
    instance = mixed(rng)
    name = list(MULTIPLIERS)[int(rng.integers(0, len(MULTIPLIERS)))]
    lam, order = MULTIPLIERS[name]
    T = instance.matrix
    description = f"{instance.description}, λ={name}"
    failure = _compare(description, classify(T).level, classify(lam * T).level, "level of λT")
    if failure is not None or order is None or not instance.recurrent:
        return failure
    # T^{qk} x = (λT)^{qk} x when λ^q = 1
    x = default_ensemble(T.shape[0], seed=int(rng.integers(0, 2**31)))[0]
    a = scan_returns(OperatorAction.from_matrix(T), x, 4 * order, 1.0)
    b = scan_returns(OperatorAction.from_matrix(lam * T), x, 4 * order, 1.0)
    for n in range(order, 4 * order + 1, order):
        gap = abs(a.distance_at(n) - b.distance_at(n))
        if gap > 1e-6 * max(1.0, a.distance_at(n), float(np.linalg.norm(x))):
            return LawFailure(description, f"equal distances at n={n}", f"gap {gap:.3g}")
    return None


@law(
    "power_law",
    "T is recurrent iff T^p is",
    "mixed 4x4, p ∈ {2, 3, 5}",
)
def power_law(rng: np.random.Generator):
    instance = mixed(rng)
    p = POWERS[int(rng.integers(0, len(POWERS)))]
    T = instance.matrix
    return _compare(
        f"{instance.description}, p={p}",
        classify(T).level,
        classify(np.linalg.matrix_power(T, p)).level,
        "level of T^p",
    )


@law("inverse_law", "an invertible T is recurrent iff T⁻¹ is", "mixed 4x4 (all invertible)")
def inverse_law(rng: np.random.Generator):
    instance = mixed(rng)
    T = instance.matrix
    return _compare(
        instance.description, classify(T).level, classify(np.linalg.inv(T)).level, "level of T⁻¹"
    )


@law(
    "rigid_power_law",
    "powers of a (uniformly) rigid T stay (uniformly) rigid",
    "unimodular diagonalizable 4x4, p ∈ {2, 3, 5}",
)
def rigid_power_law(rng: np.random.Generator):
    instance = unimodular_diagonalizable(rng)
    p = POWERS[int(rng.integers(0, len(POWERS)))]
    observed = classify(np.linalg.matrix_power(instance.matrix, p)).level
    return _compare(f"{instance.description}, p={p}", Level.UNIFORMLY_RIGID, observed, "T^p")


@law(
    "direct_sum_law",
    "T₁ ⊕ T₂ recurrent requires both summands recurrent",
    "two independent mixed 4x4 instances",
)
def direct_sum_law(rng: np.random.Generator):
    first, second = mixed(rng), mixed(rng)
    expected = min(classify(first.matrix).level, classify(second.matrix).level)
    observed = classify(scipy.linalg.block_diag(first.matrix, second.matrix)).level
    return _compare(
        f"{first.description} ⊕ {second.description}", expected, observed, "level of T₁ ⊕ T₂"
    )


@law(
    "product_recurrence_law",
    "T ⊕ T is recurrent for finite-dimensional recurrent T",
    "unimodular diagonalizable 4x4",
)
def product_recurrence_law(rng: np.random.Generator):
    instance = unimodular_diagonalizable(rng)
    T = instance.matrix
    if classify(T).level < Level.RECURRENT:
        raise Skip("instance not recurrent")
    observed = classify(scipy.linalg.block_diag(T, T)).level
    if observed >= Level.RECURRENT:
        return None
    return LawFailure(instance.description, "T ⊕ T recurrent", observed.label)


@law(
    "oracle_agreement_law",
    "analytic verdicts agree with conclusive empirical verdicts",
    "spoiled 4x4 or unimodular diagonalizable with rational angles",
)
def oracle_agreement_law(rng: np.random.Generator):
    if rng.random() < 0.5:
        instance = spoiler(rng)
    else:
        instance = unimodular_diagonalizable(rng, rational=True)
    T = instance.matrix
    seed = int(rng.integers(0, 2**31))
    empirical = empirical_verdict(
        OperatorAction.from_matrix(T),
        default_ensemble(T.shape[0], seed=seed),
        ORACLE_HORIZON,
        ORACLE_EPS,
        seed=seed,
    )
    if not empirical.conclusive:
        raise Skip("empirical verdict is horizon-limited")
    analytic = classify(T)
    return _compare(instance.description, empirical.level, analytic.level, "analytic level")


@law(
    "identity_plus_compact_law",
    "I + K with K finite rank and unimodular spectrum is recurrent, and T* keeps the"
    " eigenvalue 1, so T is not hypercyclic",
    "I + K on ℂ^4 conjugated by cond(V) ≤ 100, rank K ∈ {1, 2}",
)
def identity_plus_compact_law(rng: np.random.Generator):
    instance = identity_plus_finite_rank(rng)
    T = instance.matrix
    d = T.shape[0]
    observed = classify(T).level
    if observed < Level.RECURRENT:
        return LawFailure(instance.description, "I + K recurrent", observed.label)
    try:
        checks = {c.tag: c for c in necessary_conditions(T, DEFAULT_TOLERANCE)}
    except ConvergenceFailure as e:
        raise Skip(str(e)) from None
    adjoint = checks["recurrence/adjoint_point_spectrum_on_circle"]
    if not adjoint.passed:
        return LawFailure(
            instance.description, "σ_p(T*) ⊂ 𝕋", f"eigenvalue {adjoint.witness} of T*"
        )
    # ker(T* − I) = range(K)^⊥ has dimension d − rank K
    s = scipy.linalg.svdvals(T - np.eye(d))
    fixed = int(np.sum(s <= FIXED_SPACE_EPS * max(1.0, float(np.linalg.norm(T, 2)))))
    if fixed < d - len(instance.angles):
        return LawFailure(
            instance.description, f"dim ker(T* − I) ≥ {d - len(instance.angles)}", str(fixed)
        )
    return None
