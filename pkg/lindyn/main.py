import sys
from pathlib import Path
from traceback import format_exc
from typing import Any, Callable, Optional

import click
import numpy as np
import polars as pl
from pydantic import TypeAdapter, ValidationError
from tabulate import tabulate

from .artifacts import emit_svg, write_csv
from .exceptions import (
    InvalidInput,
    IoFailure,
    LindynError,
    NumericalFailure,
    UndecidableError,
)
from .golden import run as run_golden
from .laws import LAWS, run_law
from .laws.exploratory import product_recurrence_search, rigid_invertibility_search
from .operators import SPACES, ClassifierFn, get_classifier
from .operators.composition import LFMDocument, LinearFractionalMap, classify_lfm
from .operators.matrix import (
    ComplexMatrix,
    MatrixDocument,
    necessary_conditions,
    spectrum,
)
from .operators.sequence import (
    angle_sequence_adapter,
    build_rigidity_sequence,
    sequence_operator_adapter,
    truncate,
)
from .orbits import scan_returns
from .taxonomy import ComplexValue, RecurrenceVerdict, Tolerance, WitnessSequence
from .types import Emit, EvalResult, Report, Results
from .utils import (
    TOLERANCE_ENV_VARS,
    dump_json,
    get_tolerance,
    get_tool_version,
    input_hash,
    parse_complex,
    read_json,
)

root_directory = Path(__file__).resolve().parent.parent
datasets_dir = root_directory / "datasets"
results_dir = root_directory / "results"

EXIT_FAILURE = 1
EXIT_INVALID = 2
EXIT_NUMERICAL = 3
EXIT_UNDECIDABLE = 4

vector_adapter = TypeAdapter(list[ComplexValue])

input_file = click.Path(exists=True, dir_okay=False, path_type=Path)
out_dir = click.Path(file_okay=False, path_type=Path)


def tolerance_options(fn):
    options = [
        click.option("--unimodular-eps", type=float, default=None, help="Unit-circle tolerance"),
        click.option("--return-eps", type=float, default=None, help="Return/sup tolerance"),
        click.option("--rank-eps", type=float, default=None, help="Relative rank threshold"),
        click.option("--max-denominator", type=int, default=None, help="Rationality bound Q"),
        click.option("--witness-target", type=float, default=None, help="Witness chord target"),
        click.option("--cluster-eps", type=float, default=None, help="Eigenvalue cluster radius"),
        click.option("--structure-eps", type=float, default=None, help="Structural tolerance"),
        click.option(
            "--strict", is_flag=True, default=False, help="Exit 4 on undecidable outcomes"
        ),
    ]
    for option in reversed(options):
        fn = option(fn)
    return fn


def _tolerance(options: dict[str, Any]) -> Tolerance:
    return get_tolerance(**{k: options.get(k) for k in TOLERANCE_ENV_VARS})


def _run(body: Callable[[], None]) -> None:
    try:
        body()
    except (InvalidInput, ValidationError) as e:
        click.echo(f"invalid input: {e}", err=True)
        sys.exit(EXIT_INVALID)
    except NumericalFailure as e:
        click.echo(f"numerical failure ({type(e).__name__}): {e}", err=True)
        sys.exit(EXIT_NUMERICAL)
    except UndecidableError as e:
        click.echo(f"undecidable: {e}", err=True)
        sys.exit(EXIT_UNDECIDABLE)
    except LindynError as e:
        click.echo(f"{type(e).__name__}: {e}", err=True)
        sys.exit(EXIT_FAILURE)


def _emit(
    command: str,
    payload: Any,
    inputs: list[Any],
    tol: Tolerance,
    fragile: bool = False,
    out: Optional[Path] = None,
) -> None:
    report: Report = {
        "command": command,
        "report": payload,
        "provenance": {
            "input_hash": input_hash(command, *inputs),
            "tolerances": tol.model_dump(),
            "tool_version": get_tool_version(),
        },
        "fragile": fragile,
    }
    text = dump_json(report)
    click.echo(text)
    if out is not None:
        try:
            out.mkdir(parents=True, exist_ok=True)
            (out / f"{command}.json").write_text(text + "\n", encoding="utf-8")
        except OSError as e:
            raise IoFailure(f"Cannot write report to {out}: {e}") from None


def _summary(result: RecurrenceVerdict) -> None:
    rows = []
    for e in result.evidence:
        if isinstance(e, WitnessSequence):
            rows.append([e.kind, " ".join(str(t) for t in e.terms[:8]), e.note])
        else:
            rows.append([e.kind, e.tag, e.detail])
    click.echo(
        f"level: {result.level.label}  fragile: {result.fragile}  "
        f"conclusive: {result.conclusive}",
        err=True,
    )
    click.echo(tabulate(rows, headers=["evidence", "tag / terms", "detail"]), err=True)


def _classify_and_emit(
    command: str,
    classify: ClassifierFn,
    doc: Any,
    options: dict[str, Any],
    out: Optional[Path],
    extra: Optional[dict] = None,
    settings: Optional[dict] = None,
) -> None:
    tol = _tolerance(options)
    inputs = [doc, settings or {}]
    try:
        result = classify(doc, tol)
    except UndecidableError as e:
        if options.get("strict"):
            raise
        click.echo(f"undecidable: {e}", err=True)
        partial = e.partial
        if partial is not None:
            _summary(partial)
        payload = {
            "verdict": partial.to_dict() if partial is not None else None,
            "undecidable": True,
            "reason": str(e),
            **(extra or {}),
        }
        _emit(command, payload, inputs, tol, bool(partial and partial.fragile), out)
        return
    _summary(result)
    payload = {"verdict": result.to_dict(), **(extra or {})}
    _emit(command, payload, inputs, tol, result.fragile, out)


@click.group()
def cli():
    pass


@cli.command("classify-matrix")
@click.option("--input", "input_path", required=True, type=input_file, help="Matrix JSON")
@click.option("--real", is_flag=True, default=False, help="Classify on ℝ^d")
@click.option("--out", type=out_dir, default=None, help="Directory for the JSON report")
@tolerance_options
def classify_matrix(input_path: Path, real: bool, out: Optional[Path], **options) -> None:
    """
    Classifies a square matrix. The report carries the clustered spectrum and
    the necessary spectral conditions next to the verdict.
    """

    def body():
        tol = _tolerance(options)
        doc = read_json(input_path)
        matrix = ComplexMatrix.from_document(MatrixDocument.model_validate(doc))
        extra = {
            "spectrum": spectrum(matrix, tol).to_dict(),
            "necessary_conditions": [c.to_dict() for c in necessary_conditions(matrix, tol)],
        }
        classify = get_classifier("matrix", "real" if real else "complex")
        _classify_and_emit(
            "classify-matrix", classify, doc, options, out, extra, {"real": real}
        )

    _run(body)


def _coeffs_doc(coeffs: str) -> dict:
    parts = [parse_complex(p) for p in coeffs.split(",")]
    if len(parts) != 4:
        raise InvalidInput(f"--coeffs takes a,b,c,d, got {len(parts)} values")
    return {k: [z.real, z.imag] for k, z in zip("abcd", parts, strict=True)}


@cli.command("classify-lfm")
@click.option("--coeffs", default=None, help='Coefficients "a,b,c,d", e.g. "1,0.5,0.5,1"')
@click.option("--input", "input_path", default=None, type=input_file, help="LFM JSON")
@click.option("--space", default="h2", type=click.Choice(["hd", "h2"]), help="H(𝔻) or H²")
@click.option("--out", type=out_dir, default=None, help="Directory for the JSON report")
@tolerance_options
def classify_lfm_command(
    coeffs: Optional[str],
    input_path: Optional[Path],
    space: str,
    out: Optional[Path],
    **options,
) -> None:
    """
    Classifies the composition operator of a linear fractional self-map of the
    disk, reporting the fixed-point taxon alongside the verdict.
    """

    def body():
        if (coeffs is None) == (input_path is None):
            raise InvalidInput("pass exactly one of --coeffs and --input")
        doc = _coeffs_doc(coeffs) if coeffs is not None else read_json(input_path)
        phi = LinearFractionalMap.from_document(LFMDocument.model_validate(doc))
        taxon = classify_lfm(phi, _tolerance(options))
        _classify_and_emit(
            "classify-lfm",
            get_classifier("composition", space),
            doc,
            options,
            out,
            {"taxon": taxon.to_dict()},
            {"space": space},
        )

    _run(body)


@cli.command("classify-composition")
@click.option("--input", "input_path", required=True, type=input_file, help="Symbol JSON")
@click.option(
    "--space", required=True, type=click.Choice(list(SPACES["composition"])), help="Space"
)
@click.option("--out", type=out_dir, default=None, help="Directory for the JSON report")
@tolerance_options
def classify_composition(input_path: Path, space: str, out: Optional[Path], **options) -> None:
    """Classifies a composition operator on H(𝔻), H², H(ℂ), H(ℂ*) or C([0, 1])."""

    def body():
        doc = read_json(input_path)
        classify = get_classifier("composition", space)
        _classify_and_emit(
            "classify-composition", classify, doc, options, out, settings={"space": space}
        )

    _run(body)


@cli.command("classify-diagonal")
@click.option("--input", "input_path", required=True, type=input_file, help="Angle JSON")
@click.option("--space", default="c0", type=click.Choice(list(SPACES["diagonal"])))
@click.option("--p", type=float, default=None, help="Exponent for lp [default: 2]")
@click.option("--out", type=out_dir, default=None, help="Directory for the JSON report")
@tolerance_options
def classify_diagonal_command(
    input_path: Path, space: str, p: Optional[float], out: Optional[Path], **options
) -> None:
    """Classifies a diagonal operator with a finitely presented angle sequence."""

    def body():
        doc = read_json(input_path)
        classify = get_classifier("diagonal", space, p=p)
        _classify_and_emit(
            "classify-diagonal", classify, doc, options, out, settings={"space": space, "p": p}
        )

    _run(body)


@cli.command("classify-shift")
@click.option("--input", "input_path", required=True, type=input_file, help="Weights JSON")
@click.option("--space", default="c0", type=click.Choice(list(SPACES["shift"])))
@click.option("--p", type=float, default=None, help="Exponent for lp [default: 2]")
@click.option(
    "--variant",
    default=None,
    type=click.Choice(["B_w", "I_plus_B_w"]),
    help="Operator variant [default: from the input, else B_w]",
)
@click.option("--out", type=out_dir, default=None, help="Directory for the JSON report")
@tolerance_options
def classify_shift_command(
    input_path: Path,
    space: str,
    p: Optional[float],
    variant: Optional[str],
    out: Optional[Path],
    **options,
) -> None:
    """Classifies a weighted backward shift B_w or I + B_w."""

    def body():
        doc = read_json(input_path)
        classify = get_classifier("shift", space, p=p, variant=variant)
        settings = {"space": space, "p": p, "variant": variant}
        _classify_and_emit("classify-shift", classify, doc, options, out, settings=settings)

    _run(body)


@cli.command("classify-mult")
@click.option("--input", "input_path", required=True, type=input_file, help="Symbol JSON")
@click.option("--space", required=True, type=click.Choice(list(SPACES["mult"])))
@click.option("--p", type=float, default=None, help="Exponent for Hardy/Bergman [default: 2]")
@click.option("--out", type=out_dir, default=None, help="Directory for the JSON report")
@tolerance_options
def classify_mult(
    input_path: Path, space: str, p: Optional[float], out: Optional[Path], **options
) -> None:
    """Classifies a multiplication operator (or the adjoint M_φ* on H²)."""

    def body():
        doc = read_json(input_path)
        classify = get_classifier("mult", space, p=p)
        _classify_and_emit(
            "classify-mult", classify, doc, options, out, settings={"space": space, "p": p}
        )

    _run(body)


@cli.command("rigidity-seq")
@click.option("--angles", "angles_path", required=True, type=input_file, help="Angle JSON")
@click.option("--count", default=5, help="Number of terms [default: 5]")
@click.option("--out", type=out_dir, default=None, help="Directory for rigidity.csv")
@tolerance_options
def rigidity_seq(angles_path: Path, count: int, out: Optional[Path], **options) -> None:
    """
    Builds a certified rigidity sequence ρ_1 < ρ_2 < ... with defect below 1/n
    on the first n angles.
    """

    def body():
        tol = _tolerance(options)
        doc = read_json(angles_path)
        if isinstance(doc, list):
            doc = {"kind": "finite", "angles": doc}
        sequence = build_rigidity_sequence(angle_sequence_adapter.validate_python(doc), count, tol)
        frame = sequence.to_frame()
        click.echo(tabulate(frame.rows(), headers=frame.columns), err=True)
        if out is not None:
            out.mkdir(parents=True, exist_ok=True)
            write_csv(frame, out / "rigidity.csv")
        _emit("rigidity-seq", sequence.to_dict(), [doc, count], tol, out=out)

    _run(body)


def _operator_action(doc: Any, dim: int):
    if isinstance(doc, dict) and doc.get("kind") in ("diagonal", "shift"):
        return truncate(sequence_operator_adapter.validate_python(doc), dim)
    return ComplexMatrix.from_document(MatrixDocument.model_validate(doc)).action()


@cli.command()
@click.option("--operator", "operator_path", required=True, type=input_file)
@click.option("--vector", "vector_path", required=True, type=input_file)
@click.option("--horizon", default=100, help="Iterations to scan [default: 100]")
@click.option("--eps", default=1e-6, help="Return threshold [default: 1e-6]")
@click.option("--emit", default="both", type=click.Choice(["csv", "svg", "both"]))
@click.option("--out", type=out_dir, default=Path("."), help="Artifact directory")
@tolerance_options
def orbit(
    operator_path: Path,
    vector_path: Path,
    horizon: int,
    eps: float,
    emit: Emit,
    out: Path,
    **options,
) -> None:
    """
    Scans ‖T^n x − x‖ for n = 1..horizon and writes orbit.csv and/or orbit.svg.
    Sequence operators are truncated to the length of the vector.
    """

    def body():
        tol = _tolerance(options)
        op_doc = read_json(operator_path)
        vec_doc = read_json(vector_path)
        values = vec_doc["vector"] if isinstance(vec_doc, dict) else vec_doc
        x = np.array(vector_adapter.validate_python(values), dtype=complex)
        action = _operator_action(op_doc, x.size)
        record = scan_returns(action, x, horizon, eps, vector_id=vector_path.stem)
        click.echo(f"ε-returns: {list(record.eps_return_times)[:20]}", err=True)
        out.mkdir(parents=True, exist_ok=True)
        if emit in ("csv", "both"):
            write_csv(record.to_frame(), out / "orbit.csv")
        if emit in ("svg", "both"):
            emit_svg(record, out / "orbit.svg")
        payload = {
            "horizon": horizon,
            "eps": eps,
            "eps_return_times": list(record.eps_return_times),
            "overflow": record.overflow,
            "max_norm_ratio": record.max_norm_ratio,
            "min_norm_ratio": record.min_norm_ratio,
            "samples": len(record.ns),
        }
        settings = {"horizon": horizon, "eps": eps, "emit": emit}
        _emit("orbit", payload, [op_doc, vec_doc, settings], tol)

    _run(body)


@cli.group()
def laws():
    """Executable laws and exploratory searches."""


@laws.command("list")
def list_laws() -> None:
    """Lists the registered laws with their anchors and instance families."""
    rows = [[LAWS[k].law_id, LAWS[k].anchor, LAWS[k].family] for k in sorted(LAWS)]
    click.echo(tabulate(rows, headers=["law", "anchor", "instances"]))


@laws.command("run")
@click.option("--id", "law_id", default="all", help="Law to run [default: all]")
@click.option("--budget", default=100, help="Instances per law [default: 100]")
@click.option("--seed", default=0, help="Seed [default: 0]")
@click.option("--out", type=out_dir, default=None, help="Directory for the JSON report")
def run_laws(law_id: str, budget: int, seed: int, out: Optional[Path]) -> None:
    """
    Runs laws and prints a JSON report. Exits 1 when any law fails.
    """
    failed = []

    def body():
        ids = sorted(LAWS) if law_id == "all" else [law_id]
        reports = []
        for name in ids:
            click.echo(f"  {name}: ", nl=False, err=True)
            report = run_law(name, budget, seed)
            status = "PASS" if report.passed else "FAIL"
            click.echo(
                f"{status} ({report.instances_run} judged, {report.skipped} skipped, "
                f"{len(report.failures)} failed)",
                err=True,
            )
            if not report.passed:
                failed.append(name)
            reports.append(report.to_dict())
        _emit("laws-run", reports, [ids, budget, seed], get_tolerance(), out=out)

    _run(body)
    if failed:
        sys.exit(EXIT_FAILURE)


EXPLORATIONS = {
    "rigid_invertibility_search": rigid_invertibility_search,
    "product_recurrence_search": product_recurrence_search,
}


@laws.command("explore")
@click.option("--name", required=True, type=click.Choice(sorted(EXPLORATIONS)))
@click.option("--budget", default=20, help="Instances [default: 20]")
@click.option("--seed", default=0, help="Seed [default: 0]")
def explore(name: str, budget: int, seed: int) -> None:
    """Runs an exploratory search; it reports observations and never fails."""

    def body():
        report = EXPLORATIONS[name](budget, seed)
        _emit("laws-explore", report.to_dict(), [name, budget, seed], get_tolerance())

    _run(body)


@cli.command()
@click.option("--dataset", default="all", help="Dataset to evaluate [default: all]")
@click.option("--eval", "eval_name", default=None, help="Eval case to run")
@click.option(
    "--datasets-dir", "datasets_path", type=click.Path(path_type=Path), default=datasets_dir
)
@click.option(
    "--results-dir", "results_path", type=click.Path(path_type=Path), default=results_dir
)
def eval(
    dataset: str,
    eval_name: Optional[str],
    datasets_path: Path,
    results_path: Path,
) -> None:
    """
    Runs the golden corpus and writes results/results.json and results.csv.
    Exits 1 when a case fails or errors.
    """
    datasets = sorted(
        d.name
        for d in datasets_path.iterdir()
        if d.is_dir() and (d / "evals").is_dir() and (dataset == "all" or d.name == dataset)
    )
    all_results: dict[str, Results] = {}
    rows = []
    for i, name in enumerate(datasets):
        if i > 0:
            print()
        eval_paths = sorted((datasets_path / name / "evals").iterdir())
        if eval_name is not None:
            eval_paths = [p for p in eval_paths if p.name == eval_name]
        print(f"Evaluating {name} ({len(eval_paths)} evals)...")
        results: Results = {
            "passing": 0,
            "total": 0,
            "failed": [],
            "failed_error_counts": {},
            "errored": [],
            "evals": [],
        }
        for eval_path in eval_paths:
            print(f"  {eval_path.name}:", end="", flush=True)
            results["total"] += 1
            try:
                passed, expected, observed = run_golden(eval_path)
                result: EvalResult = {
                    "status": "pass" if passed else "fail",
                    "dataset": name,
                    "name": eval_path.name,
                    "expected": expected,
                    "observed": observed,
                    "details": {},
                }
            except Exception as e:
                result = {
                    "status": "error",
                    "dataset": name,
                    "name": eval_path.name,
                    "expected": None,
                    "observed": None,
                    "details": {
                        "exception_class": type(e).__name__,
                        "exception": str(e),
                        "exception_traceback": format_exc(),
                    },
                }
            print(f" {result['status'].upper()}", end="", flush=True)
            if result["status"] == "error":
                class_name = result["details"]["exception_class"]
                counts = results["failed_error_counts"]
                counts[class_name] = counts.get(class_name, 0) + 1
                print(f" ({class_name}: {result['details']['exception']})", end="")
                results["errored"].append(eval_path.name)
            elif result["status"] == "fail":
                results["failed"].append(eval_path.name)
            else:
                results["passing"] += 1
            print(flush=True)
            results["evals"].append(result)
            rows.append(
                {
                    "dataset": name,
                    "name": eval_path.name,
                    "status": result["status"],
                    "expected": dump_json(result["expected"]).replace("\n", " "),
                    "observed": dump_json(result["observed"]).replace("\n", " "),
                }
            )
        total = results["total"]
        passing = results["passing"]
        print(f"  {1 if total == 0 else round(passing / total, 2)} ({passing}/{total})")
        if results["failed"]:
            print(f"Failed evals:\n{sorted(results['failed'])}")
        if results["errored"]:
            print(f"Errored evals:\n{sorted(results['errored'])}")
        all_results[name] = results

    results_path.mkdir(parents=True, exist_ok=True)
    (results_path / "results.json").write_text(
        dump_json({"tool_version": get_tool_version(), "results": all_results}) + "\n",
        encoding="utf-8",
    )
    pl.DataFrame(
        rows, schema=["dataset", "name", "status", "expected", "observed"]
    ).write_csv(results_path / "results.csv")
    if any(r["failed"] or r["errored"] for r in all_results.values()):
        sys.exit(EXIT_FAILURE)
