import numpy as np
import pytest

from lindyn.exceptions import ConvergenceFailure, InvalidInput
from lindyn.operators.matrix import (
    ComplexMatrix,
    MatrixDocument,
    classify_complex,
    classify_real,
    m_isometry_defect,
    necessary_conditions,
    real_normal_form,
    spectrum,
    structural_checks,
)
from lindyn.taxonomy import Level

JORDAN = np.array([[1, 1], [0, 1]], dtype=complex)
QUARTER_TURN = np.array([[0, -1], [1, 0]], dtype=float)
FIFTH_ROOT = np.exp(2j * np.pi / 5)


@pytest.mark.parametrize(
    "matrix, level, tag",
    [
        (np.eye(3), Level.UNIFORMLY_RIGID, "finite_dimensional_collapse"),
        (np.diag([1j, -1]), Level.UNIFORMLY_RIGID, "matrix_recurrence_theorem"),
        (JORDAN, Level.NOT_RECURRENT, "defective_eigenvalue"),
        (np.diag([2, 1]), Level.NOT_RECURRENT, "eigenvalue_off_circle"),
        (np.diag([0.5, 1]), Level.NOT_RECURRENT, "eigenvalue_off_circle"),
        (np.zeros((2, 2)), Level.NOT_RECURRENT, "eigenvalue_off_circle"),
    ],
)
def test_classify_complex(matrix, level, tag):
    result = classify_complex(matrix)
    assert result.level == level
    assert tag in result.tags
    assert not result.fragile


@pytest.mark.parametrize(
    "matrix, witness",
    [
        (np.eye(2), 1),
        (np.diag([1j, -1]), 4),
        (np.diag([1, FIFTH_ROOT]), 5),
        (np.array([[0, 0, 1], [1, 0, 0], [0, 1, 0]]), 3),
    ],
)
def test_classify_complex_witness(matrix, witness):
    assert classify_complex(matrix).witness.terms == (witness,)


def test_similar_to_unitary_is_uniformly_rigid():
    S = np.array([[1, 2], [0, 1]], dtype=complex)
    T = S @ np.diag([1j, -1j]) @ np.linalg.inv(S)
    assert classify_complex(T).level == Level.UNIFORMLY_RIGID


def test_spectrum_jordan_block():
    report = spectrum(JORDAN)
    assert report.algebraic_multiplicities == (2,)
    assert report.geometric_multiplicities == (1,)
    assert not report.diagonalizable
    assert report.all_unimodular
    assert report.spectral_radius == pytest.approx(1.0)


def test_spectrum_to_dict_serializes_eigenvalues():
    report = spectrum(np.diag([1j, 2]))
    data = report.to_dict()
    assert len(data["eigenvalues"]) == 2
    assert data["spectral_radius"] == pytest.approx(2.0)
    assert not data["all_unimodular"]


def test_classify_real_reports_rotation_blocks():
    result = classify_real(QUARTER_TURN)
    assert result.level == Level.UNIFORMLY_RIGID
    assert "real_normal_form" in result.tags
    blocks = real_normal_form(spectrum(QUARTER_TURN))
    assert len(blocks) == 1
    assert blocks[0].startswith("1 x rotation")


def test_classify_real_reflection():
    blocks = real_normal_form(spectrum(np.diag([1.0, -1.0])))
    assert sorted(blocks) == ["1 x [+1]", "1 x [-1]"]


def test_classify_real_rejects_complex_entries():
    with pytest.raises(InvalidInput):
        classify_real(np.diag([1j, 1]))


@pytest.mark.parametrize(
    "doc",
    [
        {"dim": 2, "entries": [[1, 0]]},
        {"dim": 0, "entries": []},
        {"dim": 1, "entries": [["x"]]},
    ],
)
def test_matrix_document_rejects(doc):
    with pytest.raises(ValueError):
        MatrixDocument.model_validate(doc)


def test_matrix_document_parses_pairs():
    doc = MatrixDocument.model_validate({"dim": 1, "entries": [[[0, 1]]]})
    matrix = ComplexMatrix.from_document(doc)
    assert matrix.entries[0, 0] == 1j
    assert not matrix.is_real()


def test_complex_matrix_rejects_non_finite():
    with pytest.raises(InvalidInput):
        ComplexMatrix(np.array([[np.inf]]))


def test_necessary_conditions():
    checks = {c.tag: c for c in necessary_conditions(np.diag([2, 1]))}
    assert checks["recurrence/spectral_radius_at_least_one"].passed
    assert not checks["recurrence/components_meet_circle"].passed
    assert checks["rigidity/spectrum_in_closed_disk"].witness == pytest.approx(2)


def test_necessary_conditions_all_pass_for_unitary():
    assert all(c.passed for c in necessary_conditions(np.diag([1j, -1])))


def test_structural_checks_unitary():
    checks = {c.tag: c.result for c in structural_checks(np.diag([1j, -1]))}
    assert checks["is_normal"]
    assert checks["is_unitary"]
    assert checks["is_contraction"]
    assert checks["is_power_bounded_witnessed"]


def test_structural_checks_jordan_block():
    checks = {c.tag: c.result for c in structural_checks(JORDAN, m=3)}
    assert not checks["is_normal"]
    assert not checks["is_power_bounded_witnessed"]
    assert checks["is_m_isometry(m=3,p=2)"]
    assert not checks["is_isometry_witnessed"]


def test_nilpotent_is_witnessed_power_bounded():
    checks = {c.tag: c.result for c in structural_checks(np.array([[0, 1], [0, 0]]))}
    assert checks["is_power_bounded_witnessed"]


def test_m_isometry_defect_of_isometry_vanishes():
    X = np.eye(2, dtype=complex)
    assert m_isometry_defect(np.diag([1j, -1]), X, m=1, p=2) == pytest.approx(0, abs=1e-12)


def test_structural_checks_validates_order():
    with pytest.raises(InvalidInput):
        structural_checks(np.eye(2), m=0)


@pytest.mark.parametrize(
    "matrix",
    [
        100 * np.eye(2),
        np.diag([1e6, 1j]),
        np.array([[1, 1e6], [0, 1]]),
    ],
)
def test_structural_checks_large_norm(matrix):
    checks = {c.tag: c for c in structural_checks(matrix)}
    assert not checks["is_power_bounded_witnessed"].result
    assert np.isfinite(checks["is_power_bounded_witnessed"].value)
    assert not checks["is_contraction"].result
    assert not checks["is_unitary"].result


def test_structural_checks_rejects_overflowing_norm():
    with pytest.raises(ConvergenceFailure):
        structural_checks(1e40 * np.eye(2))


@pytest.mark.parametrize(
    "matrix, passed, witness",
    [
        (np.diag([2, 1]), False, 2),
        (np.diag([2j, 1]), False, -2j),
        (np.diag([0.5, -1]), False, 0.5),
        (JORDAN, True, None),
        (np.diag([1j, -1]), True, None),
    ],
)
def test_adjoint_point_spectrum_condition(matrix, passed, witness):
    checks = {c.tag: c for c in necessary_conditions(matrix)}
    check = checks["recurrence/adjoint_point_spectrum_on_circle"]
    assert check.passed == passed
    if witness is None:
        assert check.witness is None
    else:
        assert check.witness == pytest.approx(witness)
