import numpy as np
import pytest

from lindyn.exceptions import InvalidInput, ZeroVector
from lindyn.orbits import (
    EMPIRICAL_TAG,
    OperatorAction,
    default_ensemble,
    direct_sum,
    empirical_verdict,
    scan_returns,
)
from lindyn.taxonomy import Level

ROT3 = np.array([[0, 0, 1], [1, 0, 0], [0, 1, 0]])


def test_scan_returns_periodic():
    T = OperatorAction.from_matrix(ROT3)
    record = scan_returns(T, [1, 0, 0], horizon=9, eps=1e-9)
    assert record.eps_return_times == (3, 6, 9)
    assert record.ns.tolist() == list(range(1, 10))
    assert record.distance_at(1) == pytest.approx(np.sqrt(2))
    assert not record.overflow


def test_scan_returns_overflow_stops_early():
    T = OperatorAction.from_matrix([[10.0]])
    record = scan_returns(T, [1.0], horizon=100, eps=0.1, overflow_guard=1e6)
    assert record.overflow
    assert len(record.ns) == 7
    assert record.eps_return_times == ()


def test_scan_returns_frame():
    T = OperatorAction.from_matrix(ROT3)
    frame = scan_returns(T, [1, 2, 3], horizon=3, eps=1e-9).to_frame()
    assert frame.columns == ["n", "distance", "is_return"]
    assert frame["is_return"].to_list() == [False, False, True]


@pytest.mark.parametrize(
    "horizon, eps, x, error",
    [
        (0, 0.1, [1, 0, 0], InvalidInput),
        (10, 0.0, [1, 0, 0], InvalidInput),
        (10, 0.1, [1, 0], InvalidInput),
        (10, 0.1, [0, 0, 0], ZeroVector),
        (10, 0.1, [np.nan, 0, 0], InvalidInput),
    ],
)
def test_scan_returns_rejects(horizon, eps, x, error):
    with pytest.raises(error):
        scan_returns(OperatorAction.from_matrix(ROT3), x, horizon, eps)


def test_operator_action_requires_square_matrix():
    with pytest.raises(InvalidInput):
        OperatorAction.from_matrix(np.ones((2, 3)))


def test_default_ensemble_layout():
    ensemble = default_ensemble(3, seed=1)
    assert len(ensemble) == 32
    np.testing.assert_array_equal(ensemble[16], [1, 0, 0])
    np.testing.assert_array_equal(ensemble[19], [1, 0, 0])
    assert np.allclose(ensemble[24], np.ones(3), atol=0.1)


def test_default_ensemble_is_seeded():
    a = default_ensemble(4, seed=5)
    b = default_ensemble(4, seed=5)
    assert all(np.array_equal(x, y) for x, y in zip(a, b, strict=True))


def test_empirical_verdict_periodic_is_uniformly_rigid():
    T = OperatorAction.from_matrix(ROT3)
    result = empirical_verdict(T, default_ensemble(3), horizon=12, eps=1e-6)
    assert result.level == Level.UNIFORMLY_RIGID
    assert result.witness.terms == (3, 6, 9, 12)
    assert EMPIRICAL_TAG in result.tags
    assert not result.conclusive


def test_empirical_verdict_divergent_is_conclusive():
    T = OperatorAction.from_matrix(2 * np.eye(2))
    result = empirical_verdict(T, default_ensemble(2), horizon=50, eps=1e-3)
    assert result.level == Level.NOT_RECURRENT
    assert result.conclusive


def test_empirical_verdict_jordan_block():
    T = OperatorAction.from_matrix([[1, 1], [0, 1]])
    result = empirical_verdict(T, default_ensemble(2), horizon=2000, eps=1e-3)
    assert result.level == Level.NOT_RECURRENT


def test_direct_sum_of_matrices():
    T = direct_sum(OperatorAction.from_matrix([[1j]]), OperatorAction.from_matrix([[-1]]))
    assert T.dim == 2
    np.testing.assert_allclose(T.matrix, np.diag([1j, -1]))


def test_direct_sum_of_callables():
    half = OperatorAction(dim=1, apply=lambda x: x / 2)
    T = direct_sum(half, OperatorAction.from_matrix([[3.0]]))
    assert T.matrix is None
    np.testing.assert_allclose(T.apply(np.array([2.0, 1.0])), [1.0, 3.0])
