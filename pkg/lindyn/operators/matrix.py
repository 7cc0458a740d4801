"""
Recurrence of matrices on ℂ^d and ℝ^d.

A matrix is recurrent iff it is similar to a diagonal matrix with unimodular
entries, and in finite dimensions recurrence, rigidity and uniform rigidity
coincide. The spectral and structural checks below instantiate the necessary
conditions that hold for general operators.
"""

import math
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np
import scipy.linalg
from pydantic import BaseModel, model_validator

from ..exceptions import BudgetExhausted, ConvergenceFailure, InconsistentVerdicts, InvalidInput
from ..orbits import OperatorAction
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
    unit_circle_distance,
    verdict,
)

RESIDUAL_LIMIT = 1e-6
WITNESS_SCAN_LIMIT = 200_000
POWER_STEPS = 256
EARLY_STEPS = 16
MAX_LOG_GROWTH = 700.0
# keeps ‖T‖^(2m) and the Gram products finite
MAX_STRUCTURE_NORM = 1e30


class MatrixDocument(BaseModel):
    """`{"dim": d, "entries": [[[re, im], ...], ...]}`, row-major."""

    dim: int
    entries: list[list[ComplexValue]]

    @model_validator(mode="after")
    def _square(self):
        if self.dim < 1:
            raise ValueError("dim must be positive")
        if len(self.entries) != self.dim or any(len(r) != self.dim for r in self.entries):
            raise ValueError(f"entries must be {self.dim}x{self.dim}")
        return self

    def to_array(self) -> np.ndarray:
        return np.array(self.entries, dtype=complex)


@dataclass(frozen=True)
class ComplexMatrix:
    entries: np.ndarray

    def __post_init__(self):
        m = np.array(self.entries, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
            raise InvalidInput(f"Expected a non-empty square matrix, got shape {m.shape}")
        if not np.all(np.isfinite(m)):
            raise InvalidInput("Matrix entries must be finite")
        m.setflags(write=False)
        object.__setattr__(self, "entries", m)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @classmethod
    def from_document(cls, doc: MatrixDocument) -> "ComplexMatrix":
        return cls(doc.to_array())

    def is_real(self) -> bool:
        return bool(np.all(self.entries.imag == 0))

    def action(self, name: str = "T") -> OperatorAction:
        return OperatorAction.from_matrix(self.entries, name=name)


MatrixLike = Union[ComplexMatrix, np.ndarray]


def _as_matrix(T: MatrixLike) -> ComplexMatrix:
    return T if isinstance(T, ComplexMatrix) else ComplexMatrix(np.asarray(T))


@dataclass(frozen=True)
class SpectrumReport:
    eigenvalues: tuple[complex, ...]
    algebraic_multiplicities: tuple[int, ...]
    geometric_multiplicities: tuple[int, ...]
    spectral_radius: float
    all_unimodular: bool
    diagonalizable: bool
    fragile: bool = False
    fragile_eigenvalues: tuple[complex, ...] = field(default=())
    residual: float = 0.0

    def to_dict(self) -> dict:
        return {
            "eigenvalues": list(self.eigenvalues),
            "algebraic_multiplicities": list(self.algebraic_multiplicities),
            "geometric_multiplicities": list(self.geometric_multiplicities),
            "spectral_radius": self.spectral_radius,
            "all_unimodular": self.all_unimodular,
            "diagonalizable": self.diagonalizable,
            "fragile": self.fragile,
            "residual": self.residual,
        }


def _cluster(values: np.ndarray, radius: float) -> list[list[int]]:
    # single-linkage through union-find, clusters ordered by first member
    parent = list(range(len(values)))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(len(values)):
        for j in range(i + 1, len(values)):
            if abs(values[i] - values[j]) <= radius:
                parent[find(j)] = find(i)
    groups: dict[int, list[int]] = {}
    for i in range(len(values)):
        groups.setdefault(find(i), []).append(i)
    return sorted(groups.values(), key=lambda g: g[0])


def spectrum(T: MatrixLike, tol: Tolerance = DEFAULT_TOLERANCE) -> SpectrumReport:
    A = _as_matrix(T).entries
    d = A.shape[0]
    try:
        # LAPACK geev: balancing, Hessenberg reduction and shifted QR
        w, v = scipy.linalg.eig(A)
    except (np.linalg.LinAlgError, ValueError) as e:
        raise ConvergenceFailure(f"Eigenvalue iteration failed: {e}") from None
    scale = max(float(np.linalg.norm(A)), np.finfo(float).tiny)
    residual = float(np.linalg.norm(A @ v - v * w) / scale)
    if not np.isfinite(residual) or residual > RESIDUAL_LIMIT:
        raise ConvergenceFailure("Eigen-decomposition residual too large", residual)

    sigma = scipy.linalg.svdvals(A)
    sigma_max = float(sigma[0]) if sigma.size else 0.0
    radius = max(tol.unimodular_eps, tol.cluster_eps * max(1.0, sigma_max))
    threshold = tol.rank_eps * sigma_max

    order = np.lexsort((np.round(w.imag, 12), np.round(w.real, 12)))
    w = w[order]
    centers, alg, geo, fragile_at = [], [], [], []
    for group in _cluster(w, radius):
        center = complex(np.mean(w[group]))
        s = scipy.linalg.svdvals(A - center * np.eye(d))
        rank = int(np.sum(s > threshold))
        nullity = d - rank
        fragile = rank > 0 and s[rank - 1] < 10 * threshold
        if rank < d and s[rank] > threshold / 10:
            fragile = True
        if nullity > len(group) or nullity == 0:
            fragile = True
        centers.append(center)
        alg.append(len(group))
        geo.append(max(1, min(nullity, len(group))))
        if fragile:
            fragile_at.append(center)

    return SpectrumReport(
        eigenvalues=tuple(centers),
        algebraic_multiplicities=tuple(alg),
        geometric_multiplicities=tuple(geo),
        spectral_radius=float(np.max(np.abs(w))),
        all_unimodular=all(unit_circle_distance(z) <= tol.unimodular_eps for z in centers),
        diagonalizable=all(g == a for g, a in zip(geo, alg, strict=True)),
        fragile=bool(fragile_at),
        fragile_eigenvalues=tuple(fragile_at),
        residual=residual,
    )


def _return_witness(report: SpectrumReport, tol: Tolerance) -> Optional[WitnessSequence]:
    from .sequence import find_simultaneous_return

    angles = [angle_of(z) for z in report.eigenvalues]
    try:
        n = find_simultaneous_return(
            angles, tol.witness_target, 1, max_scan=WITNESS_SCAN_LIMIT
        )
    except BudgetExhausted:
        return None
    return WitnessSequence((n,), note=f"max eigenvalue chord < {tol.witness_target:g}")


def classify_complex(
    T: MatrixLike, tol: Tolerance = DEFAULT_TOLERANCE, report: Optional[SpectrumReport] = None
) -> RecurrenceVerdict:
    report = report or spectrum(T, tol)
    for z, a, g in zip(
        report.eigenvalues,
        report.algebraic_multiplicities,
        report.geometric_multiplicities,
        strict=True,
    ):
        if unit_circle_distance(z) > tol.unimodular_eps:
            return verdict(
                Level.NOT_RECURRENT,
                ViolatedCondition("eigenvalue_off_circle", f"λ={_fmt(z)}, |λ|={abs(z):.12g}"),
                TheoremTag("matrix_recurrence_theorem"),
                fragile=report.fragile,
            )
        if g < a:
            return verdict(
                Level.NOT_RECURRENT,
                ViolatedCondition(
                    "defective_eigenvalue", f"λ={_fmt(z)}, algebraic={a}, geometric={g}"
                ),
                TheoremTag("matrix_recurrence_theorem"),
                fragile=report.fragile,
            )
    evidence = [
        TheoremTag(
            "matrix_recurrence_theorem",
            "similar to a diagonal matrix with unimodular entries",
        ),
        TheoremTag("finite_dimensional_collapse", "recurrent ⇔ uniformly rigid"),
    ]
    witness = _return_witness(report, tol)
    if witness is not None:
        evidence.insert(0, witness)
    return verdict(Level.UNIFORMLY_RIGID, *evidence, fragile=report.fragile)


def real_normal_form(report: SpectrumReport, tol: Tolerance = DEFAULT_TOLERANCE) -> list[str]:
    blocks = []
    for z, a in zip(report.eigenvalues, report.algebraic_multiplicities, strict=True):
        if abs(z - 1) <= tol.cluster_eps:
            blocks.append(f"{a} x [+1]")
        elif abs(z + 1) <= tol.cluster_eps:
            blocks.append(f"{a} x [-1]")
        elif z.imag > 0:
            blocks.append(f"{a} x rotation(cos={z.real:.12g}, sin={z.imag:.12g})")
    return blocks


def classify_real(T: MatrixLike, tol: Tolerance = DEFAULT_TOLERANCE) -> RecurrenceVerdict:
    matrix = _as_matrix(T)
    if not matrix.is_real():
        raise InvalidInput("classify_real requires real entries")
    report = spectrum(matrix, tol)
    result = classify_complex(matrix, tol, report=report)
    if result.level == Level.NOT_RECURRENT:
        return result
    blocks = real_normal_form(report, tol)
    return verdict(
        result.level,
        *result.evidence,
        TheoremTag("real_normal_form", "; ".join(blocks)),
        fragile=result.fragile,
    )


@dataclass(frozen=True)
class ConditionCheck:
    tag: str
    passed: bool
    witness: Optional[complex] = None

    def to_dict(self) -> dict:
        return {"tag": self.tag, "passed": self.passed, "witness": self.witness}


def necessary_conditions(
    T: MatrixLike, tol: Tolerance = DEFAULT_TOLERANCE
) -> list[ConditionCheck]:
    report = spectrum(T, tol)
    eigs = report.eigenvalues
    largest = max(eigs, key=abs)
    off = [z for z in eigs if unit_circle_distance(z) > tol.unimodular_eps]
    outside = [z for z in eigs if abs(z) > 1 + tol.unimodular_eps]
    first_off = off[0] if off else None
    # T − λI has dense range iff conj(λ) is not an eigenvalue of T*
    adjoint = spectrum(_as_matrix(T).entries.conj().T, tol).eigenvalues
    adjoint_off = [z for z in adjoint if unit_circle_distance(z) > tol.unimodular_eps]
    return [
        ConditionCheck(
            "recurrence/spectral_radius_at_least_one",
            report.spectral_radius >= 1 - tol.unimodular_eps,
            largest,
        ),
        ConditionCheck("recurrence/components_meet_circle", not off, first_off),
        ConditionCheck(
            "rigidity/spectrum_in_closed_disk",
            not off,
            outside[0] if outside else first_off,
        ),
        ConditionCheck("uniform_rigidity/spectrum_on_circle", not off, first_off),
        ConditionCheck(
            "recurrence/adjoint_point_spectrum_on_circle",
            not adjoint_off,
            adjoint_off[0] if adjoint_off else None,
        ),
    ]


@dataclass(frozen=True)
class StructuralCheck:
    tag: str
    result: bool
    value: float

    def to_dict(self) -> dict:
        return {"tag": self.tag, "result": self.result, "value": self.value}


def _sample_vectors(d: int, count: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    block = rng.standard_normal((d, count)) + 1j * rng.standard_normal((d, count))
    return block / np.linalg.norm(block, axis=0)


def _power_growth(A: np.ndarray) -> float:
    """Ratio of sup_{n ≤ 256} ‖T^n‖ to max_{n ≤ 16} ‖T^n‖, computed in logs."""
    log_norms = []
    P = np.eye(A.shape[0], dtype=complex)
    log_scale = 0.0
    for _ in range(POWER_STEPS):
        P = P @ A
        s = float(np.linalg.norm(P, 2))
        if s == 0.0:
            log_norms.append(-math.inf)
            break
        log_scale += math.log(s)
        log_norms.append(log_scale)
        P = P / s
    early = max(max(log_norms[:EARLY_STEPS]), math.log(1e-300))
    return math.exp(min(max(log_norms) - early, MAX_LOG_GROWTH))


def m_isometry_defect(A: np.ndarray, X: np.ndarray, m: int, p: float) -> float:
    """max over columns x of |Σ_k (−1)^{m−k} C(m,k) ‖T^k x‖^p| / ‖x‖^p."""
    total = np.zeros(X.shape[1])
    Y = X.copy()
    for k in range(m + 1):
        if k:
            Y = A @ Y
        total += (-1) ** (m - k) * math.comb(m, k) * np.linalg.norm(Y, axis=0) ** p
    return float(np.max(np.abs(total) / np.linalg.norm(X, axis=0) ** p))


def structural_checks(
    T: MatrixLike,
    tol: Tolerance = DEFAULT_TOLERANCE,
    m: int = 1,
    p: float = 2.0,
    seed: int = 0,
) -> list[StructuralCheck]:
    """
    Normality, hyponormality, unitarity, contraction, power-boundedness and the
    (m, p)-isometry identity, followed by the implications that a uniformly
    rigid matrix must satisfy. A failed implication raises InconsistentVerdicts.
    """
    if m < 1 or p <= 0:
        raise InvalidInput("m-isometry order must be ≥ 1 and p > 0")
    A = _as_matrix(T).entries
    d = A.shape[0]
    eye = np.eye(d)
    norm = float(scipy.linalg.norm(A, 2))
    if norm > MAX_STRUCTURE_NORM:
        raise ConvergenceFailure(f"‖T‖ = {norm:.3g} is too large for structural checks")
    scale = max(1.0, norm**2)
    eps = tol.structure_eps

    commutator = A.conj().T @ A - A @ A.conj().T
    normal_defect = float(scipy.linalg.norm(commutator, 2))
    unitary_defect = float(scipy.linalg.norm(A.conj().T @ A - eye, 2))

    X = _sample_vectors(d, 64, seed)
    # the most negative direction of T*T − TT* is the adversarial test vector
    evals, evecs = scipy.linalg.eigh(commutator)
    X = np.column_stack([X, evecs[:, :1]])
    hypo_gap = float(
        np.max(np.linalg.norm(A.conj().T @ X, axis=0) - np.linalg.norm(A @ X, axis=0))
    )
    isometry_defect = float(np.max(np.abs(np.linalg.norm(A @ X, axis=0) - 1.0)))

    growth = _power_growth(A)

    m_defect = m_isometry_defect(A, X, m, p)
    m_threshold = eps * float(np.float64(scale) ** m)

    checks = [
        StructuralCheck("is_normal", normal_defect < eps * scale, normal_defect),
        StructuralCheck("is_hyponormal_witnessed", hypo_gap <= eps * max(1.0, norm), hypo_gap),
        StructuralCheck("is_unitary", unitary_defect < eps, unitary_defect),
        StructuralCheck("is_isometry_witnessed", isometry_defect < eps, isometry_defect),
        StructuralCheck("is_contraction", norm <= 1 + eps, norm),
        StructuralCheck(
            "is_power_bounded_witnessed", bool(np.isfinite(growth) and growth <= 10), growth
        ),
        StructuralCheck(f"is_m_isometry(m={m},p={p:g})", m_defect < m_threshold, m_defect),
    ]

    result = classify_complex(A, tol)
    if result.level == Level.UNIFORMLY_RIGID:
        by_tag = {c.tag: c for c in checks}
        slack = 100 * eps
        unitary = unitary_defect < slack
        implications = [
            ("is_normal", unitary, "normal and recurrent must be unitary"),
            ("is_hyponormal_witnessed", unitary, "hyponormal and recurrent must be unitary"),
            (
                "is_contraction",
                isometry_defect < slack,
                "recurrent contraction must be an isometry",
            ),
            (checks[-1].tag, isometry_defect < slack, "recurrent m-isometry must be an isometry"),
        ]
        for tag, consequent, message in implications:
            if by_tag[tag].result and not consequent:
                raise InconsistentVerdicts(message)
    return checks


def _fmt(z: complex) -> str:
    return f"{z.real:.12g}{z.imag:+.12g}i"
