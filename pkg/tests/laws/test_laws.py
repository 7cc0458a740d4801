import numpy as np
import pytest

from lindyn.exceptions import InvalidInput, UnknownLaw
from lindyn.laws import LAWS, Skip, get_law, law, run_law
from lindyn.laws.exploratory import product_recurrence_search, rigid_invertibility_search
from lindyn.laws.generators import (
    identity_plus_finite_rank,
    mixed,
    random_contraction,
    random_m_isometry,
    random_unitary,
    spoiler,
    unimodular_diagonalizable,
    well_conditioned,
)
from lindyn.operators.matrix import classify_complex
from lindyn.taxonomy import Level

EXPECTED_LAWS = [
    "contraction_law",
    "direct_sum_law",
    "discrete_spectrum_law",
    "identity_plus_compact_law",
    "inverse_law",
    "m_isometry_law",
    "normal_law",
    "oracle_agreement_law",
    "power_bounded_law",
    "power_law",
    "product_recurrence_law",
    "rigid_power_law",
    "unimodular_multiple_law",
]


def test_registry_contents():
    assert sorted(LAWS) == EXPECTED_LAWS


@pytest.mark.parametrize("law_id", EXPECTED_LAWS)
def test_law_passes(law_id):
    report = run_law(law_id, budget=6, seed=0)
    assert report.passed, report.to_dict()["failures"]
    assert report.instances_run + report.skipped == 6


def test_law_run_is_reproducible():
    a = run_law("power_law", budget=5, seed=3).to_dict()
    b = run_law("power_law", budget=5, seed=3).to_dict()
    assert a == b


def test_unknown_law():
    with pytest.raises(UnknownLaw):
        get_law("no_such_law")


def test_budget_must_be_positive():
    with pytest.raises(InvalidInput):
        run_law("power_law", budget=0)


def test_skipped_instances_are_not_judged():
    @law("_always_skip_law", "test", "none")
    def always_skip(rng):
        raise Skip("never judged")

    try:
        report = run_law("_always_skip_law", budget=3)
        assert report.skipped == 3
        assert report.instances_run == 0
        assert report.passed
    finally:
        LAWS.pop("_always_skip_law")


def test_random_unitary_is_unitary():
    u = random_unitary(np.random.default_rng(0))
    np.testing.assert_allclose(u.conj().T @ u, np.eye(4), atol=1e-12)


def test_well_conditioned_condition_number():
    m = well_conditioned(np.random.default_rng(1), kappa=50)
    assert np.linalg.cond(m) <= 50 + 1e-8


@pytest.mark.parametrize("seed", range(5))
def test_unimodular_diagonalizable_is_recurrent(seed):
    instance = unimodular_diagonalizable(np.random.default_rng(seed), rational=True)
    assert instance.recurrent
    assert len(instance.angles) == 4
    assert all(t.denominator <= 12 for t in instance.angles)
    eigs = np.linalg.eigvals(instance.matrix)
    np.testing.assert_allclose(np.abs(eigs), 1, atol=1e-6)


@pytest.mark.parametrize("seed", range(5))
def test_spoiler_is_not_recurrent(seed):
    instance = spoiler(np.random.default_rng(seed))
    assert instance.recurrent is False
    result = classify_complex(instance.matrix)
    assert result.fragile or result.level == Level.NOT_RECURRENT


@pytest.mark.parametrize("seed", range(5))
def test_identity_plus_finite_rank(seed):
    instance = identity_plus_finite_rank(np.random.default_rng(seed))
    rank = len(instance.angles)
    assert rank in (1, 2)
    s = np.linalg.svd(instance.matrix - np.eye(4), compute_uv=False)
    assert int(np.sum(s > 1e-8)) == rank
    assert classify_complex(instance.matrix).level == Level.UNIFORMLY_RIGID


def test_mixed_draws_both_kinds():
    kinds = {mixed(np.random.default_rng(seed)).recurrent for seed in range(20)}
    assert kinds == {True, False}


@pytest.mark.parametrize("seed", range(3))
def test_random_contraction_norm(seed):
    instance = random_contraction(np.random.default_rng(seed))
    assert np.linalg.norm(instance.matrix, 2) <= 1 + 1e-12


@pytest.mark.parametrize("seed", range(3))
def test_random_m_isometry_preserves_norm_only_when_recurrent(seed):
    instance = random_m_isometry(np.random.default_rng(seed))
    x = np.ones(4) / 2
    isometric = abs(np.linalg.norm(instance.matrix @ x) - 1) < 1e-12
    if instance.recurrent:
        assert isometric


def test_rigid_invertibility_search():
    report = rigid_invertibility_search(budget=8, seed=0)
    assert report.instances <= 8
    assert all(o["sigma_min"] > 0 for o in report.observations)
    assert report.to_dict()["name"] == "rigid_invertibility_search"


def test_product_recurrence_search():
    report = product_recurrence_search(budget=2, seed=0, dim=4)
    assert report.instances == 2
    assert {"T", "T⊕T", "scale", "rate"} <= set(report.observations[0])
