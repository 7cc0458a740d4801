import json
import time
from pathlib import Path

from lindyn.golden import compare, observe
from lindyn.operators import SPACES

root_directory = Path(__file__).resolve().parent.parent
datasets_dir = root_directory / "datasets"

FAMILIES = {*SPACES, "lfm_taxon", "h2_rotation", "simultaneous_return"}
EXPECTED_KEYS = {
    "level",
    "tags",
    "witness",
    "witness_prefix",
    "fragile",
    "conclusive",
    "kind",
    "automorphism",
    "value",
    "error",
    "undecidable",
    "partial",
}

failed = 0

stats = {}

datasets = sorted(d.name for d in datasets_dir.iterdir() if (d / "evals").is_dir())
for dataset in datasets:
    evals_path = datasets_dir / dataset / "evals"
    print(f"Validating {dataset}...")
    stats[dataset] = {"total": 0, "avg_time": 0, "max_time": 0}
    times = []
    for eval_path in sorted(evals_path.iterdir()):
        stats[dataset]["total"] += 1
        with (eval_path / "eval.json").open() as fp:
            case = json.load(fp)
        name = f"{dataset}/{eval_path.name}"
        error = ""
        if case.get("family") not in FAMILIES:
            error = f"Unknown family {case.get('family')!r}"
        elif case["family"] in SPACES and case.get("space") not in SPACES[case["family"]]:
            error = f"Unknown space {case.get('space')!r}"
        elif not case.get("description"):
            error = "Missing description"
        elif unknown := set(case.get("expected", {})) - EXPECTED_KEYS:
            error = f"Unknown expected keys {sorted(unknown)}"
        if not error:
            start_time = time.time()
            observed = observe(case)
            times.append(time.time() - start_time)
            if not compare(observed, case["expected"]):
                error = f"Observed {observed}"
        if error:
            print(f"  {name}: {error}")
            failed += 1
    if times:
        stats[dataset]["avg_time"] = round(sum(times) / len(times), 5)
        stats[dataset]["max_time"] = round(max(times), 5)
    print("Stats:")
    print(f"  {dataset}: {stats[dataset]['total']} cases")
    print(f"  {dataset}: {stats[dataset]['avg_time']} avg time")
    print(f"  {dataset}: {stats[dataset]['max_time']} max time")
    print()

print("Total cases:", sum(s["total"] for s in stats.values()))

if failed > 0:
    raise SystemExit(f"Failed {failed} cases")
