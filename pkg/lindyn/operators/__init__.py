from typing import Any, Callable, Optional

from ..exceptions import InvalidInput
from ..taxonomy import RecurrenceVerdict, Tolerance
from .composition import (
    AffineSymbol,
    GeneralSymbol,
    LFMDocument,
    LinearFractionalMap,
    PunctureSymbol,
    classify_composition_entire,
    classify_composition_H2,
    classify_composition_HD,
    classify_composition_interval,
    classify_composition_punctured,
    interval_symbol_adapter,
)
from .matrix import ComplexMatrix, MatrixDocument, classify_complex, classify_real
from .multiplication import (
    FunctionSpace,
    PolynomialMultiplier,
    adjoint_mult_H2_recurrence,
    analytic_multiplier_adapter,
    classify_mult_analytic,
    classify_mult_CK,
    classify_mult_L2,
    continuous_symbol_adapter,
    discrete_symbol_adapter,
)
from .sequence import (
    ShiftOperator,
    SpaceTag,
    WeightSequence,
    angle_sequence_adapter,
    classify_diagonal,
    classify_shift,
)

ClassifierFn = Callable[[Any, Tolerance], RecurrenceVerdict]

SPACES = {
    "matrix": ("complex", "real"),
    "composition": ("hd", "h2", "entire", "punctured", "interval"),
    "diagonal": ("c0", "lp", "linf"),
    "shift": ("c0", "lp", "linf"),
    "mult": ("l2", "ck", "hardy", "bergman", "dirichlet", "bloch", "adjoint_h2"),
}


def _matrix(doc: Any) -> ComplexMatrix:
    return ComplexMatrix.from_document(MatrixDocument.model_validate(doc))


def _lfm(doc: Any) -> LinearFractionalMap:
    return LinearFractionalMap.from_document(LFMDocument.model_validate(doc))


def _composition_hd(doc: Any, tol: Tolerance) -> RecurrenceVerdict:
    if isinstance(doc, dict) and doc.get("kind") == "general":
        return classify_composition_HD(GeneralSymbol.model_validate(doc), tol)
    return classify_composition_HD(_lfm(doc), tol)


def _angles(doc: Any):
    if isinstance(doc, dict) and doc.get("kind") == "diagonal":
        doc = doc["angles"]
    return angle_sequence_adapter.validate_python(doc)


def _shift(doc: Any, variant: Optional[str]) -> ShiftOperator:
    if isinstance(doc, dict) and doc.get("kind") == "shift":
        op = ShiftOperator.model_validate(doc)
        return op if variant is None else op.model_copy(update={"variant": variant})
    return ShiftOperator(weights=WeightSequence.model_validate(doc), variant=variant or "B_w")


def get_classifier(
    family: str,
    space: str,
    p: Optional[float] = None,
    variant: Optional[str] = None,
) -> ClassifierFn:
    """
    Classifier for an operator family on a space. The returned function parses
    the raw JSON document against the family's schema before classifying.
    """
    if family not in SPACES:
        raise InvalidInput(f"Invalid operator family: {family}")
    if space not in SPACES[family]:
        raise InvalidInput(f"Invalid space for {family}: {space}")
    if p is None and space in ("lp", "hardy", "bergman"):
        p = 2.0

    if family == "matrix":
        if space == "real":
            return lambda doc, tol: classify_real(_matrix(doc), tol)
        return lambda doc, tol: classify_complex(_matrix(doc), tol)

    if family == "composition":
        if space == "hd":
            return _composition_hd
        if space == "h2":
            return lambda doc, tol: classify_composition_H2(_lfm(doc), tol)
        if space == "entire":
            return lambda doc, tol: classify_composition_entire(
                AffineSymbol.model_validate(doc), tol
            )
        if space == "punctured":
            return lambda doc, tol: classify_composition_punctured(
                PunctureSymbol.model_validate(doc), tol
            )
        return lambda doc, tol: classify_composition_interval(
            interval_symbol_adapter.validate_python(doc), tol
        )

    if family == "diagonal":
        tag = SpaceTag(kind=space, p=p)
        return lambda doc, tol: classify_diagonal(_angles(doc), tag, tol)

    if family == "shift":
        tag = SpaceTag(kind=space, p=p)

        def classify(doc: Any, tol: Tolerance) -> RecurrenceVerdict:
            op = _shift(doc, variant)
            return classify_shift(op.weights, tag, op.variant, tol)

        return classify

    if space == "l2":
        return lambda doc, tol: classify_mult_L2(discrete_symbol_adapter.validate_python(doc), tol)
    if space == "ck":
        return lambda doc, tol: classify_mult_CK(
            continuous_symbol_adapter.validate_python(doc), tol
        )
    if space == "adjoint_h2":
        return lambda doc, tol: adjoint_mult_H2_recurrence(
            PolynomialMultiplier.model_validate(doc), tol
        )
    function_space = FunctionSpace(kind=space, p=p)
    return lambda doc, tol: classify_mult_analytic(
        analytic_multiplier_adapter.validate_python(doc), function_space, tol
    )
