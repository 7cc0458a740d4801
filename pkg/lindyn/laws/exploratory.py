"""
Instance searches around open questions. They record what they see and never
fail: is every rigid operator invertible, and is T ⊕ T recurrent whenever T is?
"""

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from ..operators.sequence import DecayingFamily, DiagonalOperator, truncate
from ..orbits import default_ensemble, direct_sum, empirical_verdict
from ..taxonomy import Level
from . import Skip
from .generators import mixed
from .invariance import classify

EXPLORE_HORIZON = 500
EXPLORE_EPS = 0.05


@dataclass
class ExplorationReport:
    name: str
    seed: int
    instances: int = 0
    observations: list[dict] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "seed": self.seed,
            "instances": self.instances,
            "observations": self.observations,
        }


def rigid_invertibility_search(budget: int, seed: int = 0) -> ExplorationReport:
    """
    Draws matrices, some with a forced zero eigenvalue, and records the smallest
    singular value of every one classified at least Rigid.
    """
    report = ExplorationReport("rigid_invertibility_search", seed)
    for i in range(budget):
        rng = np.random.default_rng((seed, i))
        instance = mixed(rng)
        T = instance.matrix.copy()
        if rng.random() < 0.25:
            u, s, vh = scipy.linalg.svd(T)
            s[-1] = 0.0
            T = (u * s) @ vh
        try:
            result = classify(T)
        except Skip:
            continue
        report.instances += 1
        if result.level >= Level.RIGID:
            sigma_min = float(scipy.linalg.svdvals(T)[-1])
            report.observations.append(
                {"instance": i, "level": result.level.label, "sigma_min": sigma_min}
            )
    return report


def product_recurrence_search(budget: int, seed: int = 0, dim: int = 16) -> ExplorationReport:
    """
    Truncated diagonal operators with slowly decaying angles: compares the
    empirical verdict of T with that of T ⊕ T.
    """
    report = ExplorationReport("product_recurrence_search", seed)
    for i in range(budget):
        rng = np.random.default_rng((seed, i))
        angles = DecayingFamily(
            generator="power", scale=float(rng.uniform(0.1, 1.0)), rate=float(rng.uniform(0.5, 2))
        )
        T = truncate(DiagonalOperator(angles=angles), dim)
        ensemble = default_ensemble(dim, seed=i)
        single = empirical_verdict(T, ensemble, EXPLORE_HORIZON, EXPLORE_EPS, seed=i)
        doubled_ensemble = [
            np.concatenate([x, y]) for x, y in zip(ensemble, ensemble[::-1], strict=True)
        ]
        double = empirical_verdict(
            direct_sum(T, T), doubled_ensemble, EXPLORE_HORIZON, EXPLORE_EPS, seed=i
        )
        report.instances += 1
        report.observations.append(
            {
                "instance": i,
                "scale": angles.scale,
                "rate": angles.rate,
                "T": single.level.label,
                "T⊕T": double.level.label,
            }
        )
    return report
