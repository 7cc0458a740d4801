"""Laws tying recurrence to structural properties of the operator."""

import math

import numpy as np
import scipy.linalg

from ..exceptions import InconsistentVerdicts
from ..operators.matrix import structural_checks
from ..taxonomy import DEFAULT_TOLERANCE, Level
from . import LawFailure, law
from .generators import (
    random_contraction,
    random_m_isometry,
    random_normal,
    unimodular_diagonalizable,
)
from .invariance import classify

ISOMETRY_EPS = 1e-8
PROBES = 32
RETURN_EPS = 1e-3


def _test_vectors(rng: np.random.Generator, dim: int) -> np.ndarray:
    x = rng.standard_normal((dim, PROBES)) + 1j * rng.standard_normal((dim, PROBES))
    return x / np.linalg.norm(x, axis=0)


@law(
    "contraction_law",
    "a recurrent contraction is a surjective isometry",
    "4x4 contractions: unitary, or U·diag(s)·V* with one s in [0.2, 0.9]",
)
def contraction_law(rng: np.random.Generator):
    instance = random_contraction(rng)
    T = instance.matrix
    if classify(T).level < Level.UNIFORMLY_RIGID:
        return None
    x = _test_vectors(rng, T.shape[0])
    defect = float(np.max(np.abs(np.linalg.norm(T @ x, axis=0) - 1.0)))
    if defect < ISOMETRY_EPS:
        return None
    return LawFailure(instance.description, "‖Tx‖ = ‖x‖", f"max defect {defect:.3g}")


@law(
    "power_bounded_law",
    "a recurrent power bounded T has every vector recurrent",
    "power bounded V·diag(e^{2πip/q})·V⁻¹, cond(V) ≤ 100, q ≤ 12",
)
def power_bounded_law(rng: np.random.Generator):
    instance = unimodular_diagonalizable(rng, rational=True)
    T = instance.matrix
    if classify(T).level < Level.RECURRENT:
        return LawFailure(instance.description, "recurrent", "not recurrent")
    period = math.lcm(*(t.denominator for t in instance.angles))
    x = _test_vectors(rng, T.shape[0])
    distances = np.linalg.norm(np.linalg.matrix_power(T, period) @ x - x, axis=0)
    if np.all(distances < RETURN_EPS):
        return None
    j = int(np.argmax(distances))
    return LawFailure(
        instance.description,
        f"every vector returns at n={period}",
        f"vector #{j} at distance {distances[j]:.3g}",
    )


@law(
    "normal_law",
    "a recurrent normal operator is unitary",
    "4x4 normal U·diag(z)·U*, z unimodular or with one |z| < 1",
)
def normal_law(rng: np.random.Generator):
    instance = random_normal(rng)
    T = instance.matrix
    if classify(T).level < Level.RECURRENT:
        return None
    defect = float(scipy.linalg.norm(T.conj().T @ T - np.eye(T.shape[0]), 2))
    if defect < ISOMETRY_EPS:
        return None
    return LawFailure(instance.description, "‖T*T − I‖ < 1e-8", f"{defect:.3g}")


@law(
    "discrete_spectrum_law",
    "a unimodular eigenbasis makes T recurrent",
    "unimodular diagonalizable 4x4 (eigenbasis of unimodular eigenvectors)",
)
def discrete_spectrum_law(rng: np.random.Generator):
    instance = unimodular_diagonalizable(rng)
    observed = classify(instance.matrix).level
    if observed >= Level.RECURRENT:
        return None
    return LawFailure(instance.description, "recurrent", observed.label)


@law(
    "m_isometry_law",
    "recurrent m-isometries are isometries",
    "W·(J ⊕ D)·W* with W unitary: a 2x2 unimodular Jordan block or a diagonal",
)
def m_isometry_law(rng: np.random.Generator):
    instance = random_m_isometry(rng)
    T = instance.matrix
    try:
        checks = {c.tag: c for c in structural_checks(T, DEFAULT_TOLERANCE, m=3)}
    except InconsistentVerdicts as e:
        return LawFailure(instance.description, "consistent structure", str(e))
    if not checks["is_m_isometry(m=3,p=2)"].result:
        return LawFailure(instance.description, "3-isometry", "identity fails")
    level = classify(T).level
    if level >= Level.RECURRENT and not checks["is_isometry_witnessed"].result:
        return LawFailure(instance.description, "isometry", f"{level.label}, not isometric")
    if instance.recurrent != (level >= Level.RECURRENT):
        return LawFailure(
            instance.description,
            "recurrent" if instance.recurrent else "not recurrent",
            level.label,
        )
    return None
