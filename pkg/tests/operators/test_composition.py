import cmath

import numpy as np
import pytest

from lindyn.exceptions import DegenerateMap, GridTooCoarse, InvalidInput, NotSelfMap
from lindyn.operators.composition import (
    AffineIntervalMap,
    AffineSymbol,
    EllipticAutomorphism,
    GeneralSymbol,
    HyperbolicBoundary,
    IdentityMap,
    InteriorAttractive,
    LinearFractionalMap,
    Parabolic,
    PunctureSymbol,
    ReflectionMap,
    SampledIntervalMap,
    boundary_profile,
    classify_composition_entire,
    classify_composition_H2,
    classify_composition_HD,
    classify_composition_interval,
    classify_composition_punctured,
    classify_lfm,
    denjoy_wolff_trace,
    escapes_compact,
    iterate_lfm,
    verify_H2_rotation,
)
from lindyn.taxonomy import Level

PARABOLIC_AUTO = LinearFractionalMap(2j - 1, 1, -1, 1 + 2j)
PARABOLIC_NON_AUTO = LinearFractionalMap(1j - 1, 1 + 1j, -(1 + 1j), 1 + 3j)
HYPERBOLIC_AUTO = LinearFractionalMap(1, 0.5, 0.5, 1)
HALF = LinearFractionalMap(0.5, 0, 0, 1)
QUARTER_TURN = LinearFractionalMap(1j, 0, 0, 1)
MIDPOINT = LinearFractionalMap(0.5, 0.5, 0, 1)
IRRATIONAL_TURN = LinearFractionalMap(cmath.exp(2j * cmath.pi * 2**0.5), 0, 0, 1)
GRID = np.linspace(0, 1, 33)


@pytest.mark.parametrize(
    "phi, taxon",
    [
        (PARABOLIC_AUTO, Parabolic),
        (PARABOLIC_NON_AUTO, Parabolic),
        (HYPERBOLIC_AUTO, HyperbolicBoundary),
        (MIDPOINT, HyperbolicBoundary),
        (HALF, InteriorAttractive),
        (QUARTER_TURN, EllipticAutomorphism),
        (LinearFractionalMap(1, 0, 0, 1), EllipticAutomorphism),
    ],
)
def test_classify_lfm_taxon(phi, taxon):
    assert isinstance(classify_lfm(phi), taxon)


def test_parabolic_fixed_points():
    auto = classify_lfm(PARABOLIC_AUTO)
    assert auto.automorphism
    assert auto.fixed_point == pytest.approx(1)
    non_auto = classify_lfm(PARABOLIC_NON_AUTO)
    assert not non_auto.automorphism
    assert non_auto.fixed_point == pytest.approx(1)


def test_hyperbolic_automorphism_fixed_points():
    taxon = classify_lfm(HYPERBOLIC_AUTO)
    assert taxon.automorphism
    assert taxon.attractive == pytest.approx(1)
    assert taxon.other == pytest.approx(-1)


def test_hyperbolic_other_fixed_point_at_infinity():
    taxon = classify_lfm(MIDPOINT)
    assert taxon.attractive == pytest.approx(1)
    assert taxon.other is None
    assert not taxon.automorphism


def test_elliptic_multiplier():
    taxon = classify_lfm(QUARTER_TURN)
    assert taxon.multiplier == pytest.approx(1j)
    assert taxon.interior_fp == pytest.approx(0)


def test_taxon_to_dict():
    data = classify_lfm(HALF).to_dict()
    assert data["kind"] == "interior_attractive"
    assert data["fixed_point"] == pytest.approx(0)
    assert "symbol" not in data


@pytest.mark.parametrize(
    "phi, error",
    [
        (LinearFractionalMap(2, 0, 0, 1), NotSelfMap),
        (LinearFractionalMap(1, 0.5, 0, 1), NotSelfMap),
        (LinearFractionalMap(0, 1, 1, 0), NotSelfMap),
        (LinearFractionalMap(1, 1, 1, 1), DegenerateMap),
    ],
)
def test_classify_lfm_rejects(phi, error):
    with pytest.raises(error):
        classify_lfm(phi)


def test_lfm_rejects_non_finite():
    with pytest.raises(InvalidInput):
        LinearFractionalMap(float("nan"), 0, 0, 1)


def test_boundary_profile_of_automorphism():
    profile = boundary_profile(HYPERBOLIC_AUTO)
    assert profile.maximum == pytest.approx(1)
    assert profile.minimum == pytest.approx(1)


def test_iterate_lfm_matches_composition():
    z = 0.3 - 0.2j
    expected = z
    for _ in range(7):
        expected = PARABOLIC_AUTO(expected)
    assert iterate_lfm(PARABOLIC_AUTO, 7)(z) == pytest.approx(expected)


def test_iterate_lfm_rotation_period():
    assert iterate_lfm(QUARTER_TURN, 4)(0.5 + 0.1j) == pytest.approx(0.5 + 0.1j)


def test_iterate_lfm_rejects_negative():
    with pytest.raises(InvalidInput):
        iterate_lfm(HALF, -1)


def test_denjoy_wolff_trace_converges():
    trace = denjoy_wolff_trace(HYPERBOLIC_AUTO, 0.2j, 30)
    assert trace[-1] < trace[0]
    assert trace[-1] < 1e-6


def test_denjoy_wolff_trace_rejects_elliptic():
    with pytest.raises(InvalidInput):
        denjoy_wolff_trace(QUARTER_TURN, 0, 5)


def test_escapes_compact():
    assert escapes_compact(HYPERBOLIC_AUTO, 0.5) is not None
    assert escapes_compact(QUARTER_TURN, 0.5, n_max=50) is None


@pytest.mark.parametrize(
    "phi, level, tag",
    [
        (QUARTER_TURN, Level.RIGID, "hd_rigid_theorem"),
        (HALF, Level.NOT_RECURRENT, "interior_attractive_fixed_point"),
        (PARABOLIC_AUTO, Level.RECURRENT, "hd_lfm_corollary"),
        (PARABOLIC_NON_AUTO, Level.RECURRENT, "hd_lfm_corollary"),
        (MIDPOINT, Level.RECURRENT, "hereditarily_hypercyclic_not_rigid"),
        (
            GeneralSymbol(univalent=True, fixed_point_free=True),
            Level.RECURRENT,
            "hd_recurrence_theorem",
        ),
        (
            GeneralSymbol(univalent=False, fixed_point_free=True),
            Level.NOT_RECURRENT,
            "not_univalent",
        ),
        (
            GeneralSymbol(univalent=True, fixed_point_free=False, elliptic_automorphism=True),
            Level.RIGID,
            "hd_rigid_theorem",
        ),
    ],
)
def test_classify_composition_HD(phi, level, tag):
    result = classify_composition_HD(phi)
    assert result.level == level
    assert tag in result.tags


@pytest.mark.parametrize(
    "phi, level, tag",
    [
        (HALF, Level.NOT_RECURRENT, "interior_attractive_fixed_point"),
        (PARABOLIC_NON_AUTO, Level.NOT_RECURRENT, "parabolic_non_automorphism"),
        (PARABOLIC_AUTO, Level.RECURRENT, "h2_recurrence_theorem"),
        (HYPERBOLIC_AUTO, Level.RECURRENT, "hereditarily_hypercyclic_not_rigid"),
        (QUARTER_TURN, Level.UNIFORMLY_RIGID, "h2_uniform_rigidity_theorem"),
        (IRRATIONAL_TURN, Level.RIGID, "rationality_undecided"),
    ],
)
def test_classify_composition_H2(phi, level, tag):
    result = classify_composition_H2(phi)
    assert result.level == level
    assert tag in result.tags


def test_rational_rotation_witness():
    result = classify_composition_H2(QUARTER_TURN)
    assert result.witness.terms == (4, 8, 12)
    assert result.conclusive


def test_irrational_rotation_is_not_conclusive():
    assert not classify_composition_H2(IRRATIONAL_TURN).conclusive


@pytest.mark.parametrize(
    "lam, coeffs, n, expected",
    [
        (1j, [0, 1], 1, 2.0),
        (1j, [0, 1], 4, 0.0),
        (1j, [5, 1, 2j], 8, 0.0),
        (-1, [0, 0, 1], 1, 0.0),
        (-1, [0, 3], 1, 36.0),
    ],
)
def test_verify_H2_rotation(lam, coeffs, n, expected):
    assert verify_H2_rotation(lam, coeffs, n) == pytest.approx(expected, abs=1e-12)


@pytest.mark.parametrize("lam, n", [(2, 1), (1j, 0)])
def test_verify_H2_rotation_rejects(lam, n):
    with pytest.raises(InvalidInput):
        verify_H2_rotation(lam, [0, 1], n)


@pytest.mark.parametrize(
    "a, b, level",
    [
        (1, 0, Level.RIGID),
        (1, 2, Level.RECURRENT),
        (1j, 3, Level.RIGID),
        (2, 0, Level.NOT_RECURRENT),
        (0.5j, 1, Level.NOT_RECURRENT),
    ],
)
def test_classify_composition_entire(a, b, level):
    assert classify_composition_entire(AffineSymbol(a=a, b=b)).level == level


@pytest.mark.parametrize(
    "kind, a, level, witness",
    [
        ("inv", 3, Level.RIGID, (2, 4, 6, 8, 10)),
        ("mult", 1j, Level.RIGID, (4, 8, 12)),
        ("mult", cmath.exp(2j * cmath.pi * 2**0.5), Level.RIGID, None),
        ("mult", 2, Level.NOT_RECURRENT, None),
    ],
)
def test_classify_composition_punctured(kind, a, level, witness):
    result = classify_composition_punctured(PunctureSymbol(kind=kind, a=a))
    assert result.level == level
    assert (result.witness.terms if result.witness else None) == witness


def test_puncture_symbol_rejects_zero():
    with pytest.raises(ValueError):
        PunctureSymbol(kind="mult", a=0)


@pytest.mark.parametrize(
    "phi, level, tag",
    [
        (IdentityMap(), Level.UNIFORMLY_RIGID, "interval_theorem"),
        (ReflectionMap(), Level.UNIFORMLY_RIGID, "interval_theorem"),
        (AffineIntervalMap(p=1, q=0), Level.UNIFORMLY_RIGID, "interval_theorem"),
        (AffineIntervalMap(p=-1, q=1), Level.UNIFORMLY_RIGID, "interval_theorem"),
        (AffineIntervalMap(p=0, q=0.3), Level.NOT_RECURRENT, "not_injective"),
        (AffineIntervalMap(p=0.5, q=0.25), Level.NOT_RECURRENT, "not_surjective"),
        (SampledIntervalMap(grid=list(GRID), values=list(GRID)), Level.UNIFORMLY_RIGID, None),
        (
            SampledIntervalMap(grid=list(GRID), values=list(1 - GRID)),
            Level.UNIFORMLY_RIGID,
            None,
        ),
        (
            SampledIntervalMap(grid=list(GRID), values=list(4 * GRID * (1 - GRID))),
            Level.NOT_RECURRENT,
            "not_injective",
        ),
        (
            SampledIntervalMap(grid=list(GRID), values=list(GRID / 2)),
            Level.NOT_RECURRENT,
            "not_surjective",
        ),
        (
            SampledIntervalMap(grid=list(GRID), values=list(GRID**2)),
            Level.NOT_RECURRENT,
            "monotone_but_not_identity",
        ),
    ],
)
def test_classify_composition_interval(phi, level, tag):
    result = classify_composition_interval(phi)
    assert result.level == level
    if tag is not None:
        assert tag in result.tags


@pytest.mark.parametrize(
    "phi, error",
    [
        (AffineIntervalMap(p=2, q=0), InvalidInput),
        (SampledIntervalMap(grid=[0, 0.5, 1], values=[0, 0.5, 1]), GridTooCoarse),
        (SampledIntervalMap(grid=list(GRID), values=list(2 * GRID)), InvalidInput),
        (SampledIntervalMap(grid=list(GRID[::-1]), values=list(GRID)), InvalidInput),
    ],
)
def test_classify_composition_interval_rejects(phi, error):
    with pytest.raises(error):
        classify_composition_interval(phi)
