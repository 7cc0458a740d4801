"""
Numerical orbit engine.

Iterates finite-dimensional operator actions, records ‖T^n x − x‖ and the
ε-return times, and turns ensembles of such scans into horizon-limited verdicts
that serve as the oracle for every analytic classifier.
"""

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
import polars as pl
from scipy.linalg import block_diag

from .exceptions import InvalidInput, ZeroVector
from .taxonomy import (
    Level,
    RecurrenceVerdict,
    TheoremTag,
    ViolatedCondition,
    WitnessSequence,
    verdict,
)

OVERFLOW_GUARD = 1e12
DIVERGENCE_FACTOR = 1e3
EMPIRICAL_TAG = "empirical (horizon-limited)"


@dataclass(frozen=True)
class OperatorAction:
    """
    A linear map on ℂ^dim. When `matrix` is set, `apply` is its product and
    batches of column vectors are pushed through in one multiplication.
    """

    dim: int
    apply: Callable[[np.ndarray], np.ndarray]
    matrix: Optional[np.ndarray] = field(default=None, repr=False)
    name: str = "T"

    def __post_init__(self):
        if self.dim < 1:
            raise InvalidInput(f"Operator dimension must be positive, got {self.dim}")

    @classmethod
    def from_matrix(cls, matrix, name: str = "T") -> "OperatorAction":
        m = np.array(matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise InvalidInput(f"Operator matrix must be square, got shape {m.shape}")
        if not np.all(np.isfinite(m)):
            raise InvalidInput("Operator matrix has non-finite entries")
        m.setflags(write=False)
        return cls(dim=m.shape[0], apply=lambda x: m @ x, matrix=m, name=name)

    def apply_batch(self, block: np.ndarray) -> np.ndarray:
        if self.matrix is not None:
            return self.matrix @ block
        return np.column_stack([self.apply(block[:, j]) for j in range(block.shape[1])])


@dataclass(frozen=True)
class ReturnRecord:
    vector_id: str
    ns: np.ndarray
    distances: np.ndarray
    eps_return_times: tuple[int, ...]
    eps: float
    overflow: bool = False
    max_norm_ratio: float = 1.0
    min_norm_ratio: float = 1.0

    @property
    def samples(self) -> list[tuple[int, float]]:
        return [(int(n), float(d)) for n, d in zip(self.ns, self.distances, strict=True)]

    def distance_at(self, n: int) -> float:
        return float(self.distances[n - 1])

    def to_frame(self) -> pl.DataFrame:
        return pl.DataFrame(
            {
                "n": self.ns.astype(np.int64),
                "distance": self.distances.astype(np.float64),
                "is_return": self.distances < self.eps,
            }
        )


@dataclass
class _BlockScan:
    distances: np.ndarray  # horizon × k, NaN after a column stops
    stopped_at: np.ndarray  # last recorded n per column
    overflow: np.ndarray
    max_ratio: np.ndarray
    min_ratio: np.ndarray


def _as_block(T: OperatorAction, vectors: Sequence[np.ndarray]) -> np.ndarray:
    block = np.column_stack([np.asarray(v, dtype=complex).reshape(-1) for v in vectors])
    if block.shape[0] != T.dim:
        raise InvalidInput(f"Vectors must have length {T.dim}, got {block.shape[0]}")
    if not np.all(np.isfinite(block)):
        raise InvalidInput("Vectors must be finite")
    norms = np.linalg.norm(block, axis=0)
    if np.any(norms == 0):
        raise ZeroVector(f"Zero vector at ensemble position {int(np.argmin(norms))}")
    return block


def _scan_block(T: OperatorAction, block: np.ndarray, horizon: int, guard: float):
    k = block.shape[1]
    norms = np.linalg.norm(block, axis=0)
    distances = np.full((horizon, k), np.nan)
    stopped_at = np.full(k, horizon)
    overflow = np.zeros(k, dtype=bool)
    max_ratio = np.ones(k)
    min_ratio = np.ones(k)
    active = np.ones(k, dtype=bool)
    y = block.copy()
    for n in range(1, horizon + 1):
        y = T.apply_batch(y)
        y[:, ~active] = 0
        ynorm = np.linalg.norm(y, axis=0)
        ratio = ynorm / norms
        d = np.linalg.norm(y - block, axis=0)
        distances[n - 1, active] = d[active]
        max_ratio[active] = np.maximum(max_ratio[active], ratio[active])
        min_ratio[active] = np.minimum(min_ratio[active], ratio[active])
        blown = active & ~(ratio <= guard)
        if np.any(blown):
            overflow |= blown
            stopped_at[blown] = n
            active &= ~blown
        if not np.any(active):
            break
    return _BlockScan(distances, stopped_at, overflow, max_ratio, min_ratio)


def _record(scan: _BlockScan, j: int, eps: float, vector_id: str) -> ReturnRecord:
    last = int(scan.stopped_at[j])
    dist = scan.distances[:last, j]
    ns = np.arange(1, last + 1)
    returns = tuple(int(n) for n in ns[dist < eps])
    return ReturnRecord(
        vector_id=vector_id,
        ns=ns,
        distances=dist,
        eps_return_times=returns,
        eps=eps,
        overflow=bool(scan.overflow[j]),
        max_norm_ratio=float(scan.max_ratio[j]),
        min_norm_ratio=float(scan.min_ratio[j]),
    )


def scan_returns(
    T: OperatorAction,
    x,
    horizon: int,
    eps: float,
    vector_id: str = "x",
    overflow_guard: float = OVERFLOW_GUARD,
) -> ReturnRecord:
    if horizon < 1:
        raise InvalidInput(f"horizon must be at least 1, got {horizon}")
    if not eps > 0:
        raise InvalidInput(f"eps must be positive, got {eps}")
    block = _as_block(T, [x])
    scan = _scan_block(T, block, horizon, overflow_guard)
    return _record(scan, 0, eps, vector_id)


def default_ensemble(dim: int, seed: int = 0, near=None) -> list[np.ndarray]:
    """
    16 complex Gaussian vectors, 8 canonical basis vectors (cycled when dim < 8)
    and 8 perturbations of `near` (the all-ones vector by default).
    """
    rng = np.random.default_rng(seed)
    gaussian = rng.standard_normal((16, dim)) + 1j * rng.standard_normal((16, dim))
    basis = [np.eye(dim, dtype=complex)[k % dim] for k in range(8)]
    center = np.ones(dim, dtype=complex) if near is None else np.asarray(near, complex)
    scale = 1e-3 * max(float(np.linalg.norm(center)), 1.0)
    jitter = rng.standard_normal((8, dim)) + 1j * rng.standard_normal((8, dim))
    nearby = [center + scale * jitter[k] for k in range(8)]
    return list(gaussian) + basis + nearby


def _unit_vectors(dim: int, count: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng([seed, 7919])
    block = rng.standard_normal((dim, count)) + 1j * rng.standard_normal((dim, count))
    return block / np.linalg.norm(block, axis=0)


def empirical_verdict(
    T: OperatorAction,
    ensemble: Sequence[np.ndarray],
    horizon: int,
    eps: float,
    seed: int = 0,
    divergence_factor: float = DIVERGENCE_FACTOR,
    overflow_guard: float = OVERFLOW_GUARD,
) -> RecurrenceVerdict:
    """
    Oracle verdict from ε-return scans of an ensemble.

    Positive levels are horizon-limited by construction. A NotRecurrent verdict
    is marked conclusive only when the failing orbit overflowed or its norm left
    [1/divergence_factor, divergence_factor] within the horizon.
    """
    if len(ensemble) == 0:
        raise InvalidInput("ensemble must be non-empty")
    if horizon < 1 or not eps > 0:
        raise InvalidInput("horizon must be positive and eps > 0")
    block = _as_block(T, ensemble)
    scan = _scan_block(T, block, horizon, overflow_guard)
    tag = TheoremTag(EMPIRICAL_TAG, f"horizon={horizon}, eps={eps:g}, vectors={block.shape[1]}")

    hits = np.nan_to_num(scan.distances, nan=np.inf) < eps
    returned = hits.any(axis=0)
    if not returned.all():
        j = int(np.argmin(returned))
        diverged = (
            scan.overflow[j]
            or scan.max_ratio[j] > divergence_factor
            or scan.min_ratio[j] < 1 / divergence_factor
        )
        return verdict(
            Level.NOT_RECURRENT,
            tag,
            ViolatedCondition("no_eps_return", f"ensemble vector #{j} never returned"),
            conclusive=bool(diverged),
        )

    common = np.flatnonzero(hits.all(axis=1)) + 1
    if common.size == 0:
        first = tuple(int(n) for n in np.flatnonzero(hits[:, 0]) + 1)
        return verdict(
            Level.RECURRENT,
            tag,
            WitnessSequence(first, note="return times of ensemble vector #0"),
            conclusive=False,
        )

    norms = np.linalg.norm(block, axis=0)
    relative = np.nan_to_num(scan.distances, nan=np.inf) < eps * norms
    uniform = np.flatnonzero(relative.all(axis=1)) + 1
    if uniform.size:
        spread = _unit_vectors(T.dim, 16, seed)
        spread_scan = _scan_block(T, spread, int(uniform[-1]), overflow_guard)
        spread_d = np.nan_to_num(spread_scan.distances, nan=np.inf)
        uniform = np.array([n for n in uniform if np.all(spread_d[n - 1] < eps)], dtype=int)
    if uniform.size:
        return verdict(
            Level.UNIFORMLY_RIGID,
            tag,
            WitnessSequence(tuple(int(n) for n in uniform), note="common relative returns"),
            conclusive=False,
        )
    return verdict(
        Level.RIGID,
        tag,
        WitnessSequence(tuple(int(n) for n in common), note="common return times"),
        conclusive=False,
    )


def direct_sum(T1: OperatorAction, T2: OperatorAction) -> OperatorAction:
    name = f"{T1.name}⊕{T2.name}"
    if T1.matrix is not None and T2.matrix is not None:
        return OperatorAction.from_matrix(block_diag(T1.matrix, T2.matrix), name=name)
    d1 = T1.dim

    def apply(x: np.ndarray) -> np.ndarray:
        return np.concatenate([T1.apply(x[:d1]), T2.apply(x[d1:])])

    return OperatorAction(dim=T1.dim + T2.dim, apply=apply, name=name)
