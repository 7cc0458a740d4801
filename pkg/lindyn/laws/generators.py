"""
Seeded random instance families for the laws.

Every generator takes a numpy `Generator` so that a law run is reproducible
from (law_id, budget, seed).
"""

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np
import scipy.linalg

DIM = 4
MAX_CONDITION = 100.0
MAX_DENOMINATOR = 12


@dataclass(frozen=True)
class Instance:
    matrix: np.ndarray
    description: str
    recurrent: Optional[bool] = None
    angles: tuple = ()


def random_unitary(rng: np.random.Generator, dim: int = DIM) -> np.ndarray:
    """Haar unitary from the QR factors of a complex Gaussian matrix."""
    z = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    q, r = scipy.linalg.qr(z)
    phases = np.diag(r) / np.abs(np.diag(r))
    return q * phases


def well_conditioned(
    rng: np.random.Generator, dim: int = DIM, kappa: float = MAX_CONDITION
) -> np.ndarray:
    """U₁·diag(σ)·U₂ with σ log-uniform in [1, κ], so cond ≤ κ."""
    sigma = np.exp(rng.uniform(0.0, np.log(kappa), dim))
    return random_unitary(rng, dim) @ np.diag(sigma) @ random_unitary(rng, dim)


def _angles(rng: np.random.Generator, dim: int, rational: bool) -> list:
    if rational:
        out = []
        for _ in range(dim):
            q = int(rng.integers(1, MAX_DENOMINATOR + 1))
            out.append(Fraction(int(rng.integers(0, q)), q))
        return out
    return [float(t) for t in rng.uniform(0.0, 1.0, dim)]


def _conjugate(rng: np.random.Generator, core: np.ndarray) -> np.ndarray:
    v = well_conditioned(rng, core.shape[0])
    return v @ core @ np.linalg.inv(v)


def unimodular_diagonalizable(
    rng: np.random.Generator, dim: int = DIM, rational: bool = False
) -> Instance:
    """V·diag(e^{2πiθ})·V⁻¹ with cond(V) ≤ 100; rational θ have denominators ≤ 12."""
    angles = _angles(rng, dim, rational)
    core = np.diag(np.exp(2j * np.pi * np.array([float(t) for t in angles])))
    return Instance(
        matrix=_conjugate(rng, core),
        description=f"unimodular diagonalizable, θ={[str(t) for t in angles]}",
        recurrent=True,
        angles=tuple(angles),
    )


def spoiler(rng: np.random.Generator, dim: int = DIM) -> Instance:
    """
    A unimodular diagonalizable core broken either by one eigenvalue of modulus
    in [0.5, 0.95] ∪ [1.05, 1.5] or by a 2×2 Jordan block.
    """
    angles = rng.uniform(0.0, 1.0, dim)
    core = np.diag(np.exp(2j * np.pi * angles)).astype(complex)
    if rng.random() < 0.5:
        modulus = rng.uniform(0.5, 0.95) if rng.random() < 0.5 else rng.uniform(1.05, 1.5)
        core[0, 0] *= modulus
        description = f"off-circle eigenvalue of modulus {modulus:.4f}"
    else:
        core[1, 1] = core[0, 0]
        core[0, 1] = 1.0
        description = "2x2 Jordan block on the circle"
    return Instance(matrix=_conjugate(rng, core), description=description, recurrent=False)


def mixed(rng: np.random.Generator, dim: int = DIM) -> Instance:
    """Half recurrent, half spoiled."""
    if rng.random() < 0.5:
        return unimodular_diagonalizable(rng, dim)
    return spoiler(rng, dim)


def random_normal(rng: np.random.Generator, dim: int = DIM) -> Instance:
    """U·diag(z)·U* with unimodular z, or with one modulus pushed off the circle."""
    z = np.exp(2j * np.pi * rng.uniform(0.0, 1.0, dim))
    recurrent = bool(rng.random() < 0.5)
    if not recurrent:
        z[0] *= rng.uniform(0.5, 0.95)
    u = random_unitary(rng, dim)
    return Instance(
        matrix=u @ np.diag(z) @ u.conj().T,
        description="normal, unimodular spectrum" if recurrent else "normal, one |λ| < 1",
        recurrent=recurrent,
    )


def random_contraction(rng: np.random.Generator, dim: int = DIM) -> Instance:
    """U·diag(s)·V* with s = 1 (unitary) or s uniform in [0.2, 0.9] at one slot."""
    s = np.ones(dim)
    recurrent = bool(rng.random() < 0.5)
    if not recurrent:
        s[int(rng.integers(0, dim))] = rng.uniform(0.2, 0.9)
    matrix = random_unitary(rng, dim) @ np.diag(s) @ random_unitary(rng, dim).conj().T
    return Instance(
        matrix=matrix,
        description="unitary" if recurrent else f"contraction, singular values {s.round(4)}",
        recurrent=recurrent,
    )


def random_m_isometry(rng: np.random.Generator, dim: int = DIM) -> Instance:
    """
    W·(J ⊕ D)·W* with W unitary: J a unimodular 2×2 Jordan block (a strict
    3-isometry) or, half the time, a diagonal block (an isometry).
    """
    z = np.exp(2j * np.pi * rng.uniform(0.0, 1.0, dim))
    core = np.diag(z).astype(complex)
    recurrent = bool(rng.random() < 0.5)
    if not recurrent:
        core[1, 1] = core[0, 0]
        core[0, 1] = 1.0
    w = random_unitary(rng, dim)
    return Instance(
        matrix=w @ core @ w.conj().T,
        description="isometry" if recurrent else "strict 3-isometry (Jordan block)",
        recurrent=recurrent,
    )


def identity_plus_finite_rank(rng: np.random.Generator, dim: int = DIM) -> Instance:
    """
    I + K with K = V·diag(e^{2πiθ_1} − 1, .., e^{2πiθ_r} − 1, 0, ..)·V⁻¹ of rank
    r ∈ {1, 2}, so the identity survives on a subspace of dimension dim − r.
    """
    rank = int(rng.integers(1, 3))
    angles = rng.uniform(0.05, 0.95, rank)
    core = np.eye(dim, dtype=complex)
    core[:rank, :rank] = np.diag(np.exp(2j * np.pi * angles))
    return Instance(
        matrix=_conjugate(rng, core),
        description=f"I + K, rank {rank}, θ={[round(float(t), 6) for t in angles]}",
        recurrent=True,
        angles=tuple(float(t) for t in angles),
    )
