import hashlib
import os
from importlib.metadata import PackageNotFoundError, version
from pathlib import Path
from typing import Any

import simplejson as json
from dotenv import load_dotenv
from pydantic import ValidationError

from . import __version__
from .exceptions import InvalidInput
from .taxonomy import Tolerance

load_dotenv()

TOLERANCE_ENV_VARS = {
    "unimodular_eps": "LINDYN_TOL_UNIMODULAR",
    "return_eps": "LINDYN_TOL_RETURN",
    "rank_eps": "LINDYN_TOL_RANK",
    "max_denominator": "LINDYN_TOL_MAX_DENOMINATOR",
    "witness_target": "LINDYN_TOL_WITNESS_TARGET",
    "cluster_eps": "LINDYN_TOL_CLUSTER",
    "structure_eps": "LINDYN_TOL_STRUCTURE",
}


def get_tolerance(**overrides: Any) -> Tolerance:
    """
    Build the tolerance policy from defaults, then LINDYN_TOL_* environment
    variables, then explicit overrides (None values are ignored).
    """
    values: dict[str, Any] = {}
    for name, env_var in TOLERANCE_ENV_VARS.items():
        if env_var in os.environ:
            values[name] = os.environ[env_var]
    values.update({k: v for k, v in overrides.items() if v is not None})
    try:
        return Tolerance(**values)
    except ValidationError as e:
        raise InvalidInput(f"Invalid tolerance settings: {e}") from None


def get_tool_version() -> str:
    try:
        return version("lindyn")
    except PackageNotFoundError:
        return __version__


def to_jsonable(value: Any) -> Any:
    if isinstance(value, complex):
        return [value.real, value.imag]
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if hasattr(value, "item") and callable(value.item):
        # numpy scalars
        return to_jsonable(value.item())
    return value


def dump_json(value: Any) -> str:
    return json.dumps(to_jsonable(value), indent=2, sort_keys=True, ignore_nan=True)


def input_hash(*parts: Any) -> str:
    canonical = json.dumps(to_jsonable(list(parts)), sort_keys=True, ignore_nan=True)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def read_json(path: Path) -> Any:
    try:
        with path.open() as fp:
            return json.load(fp)
    except (OSError, ValueError) as e:
        raise InvalidInput(f"Cannot read {path}: {e}") from None


def parse_complex(value: Any) -> complex:
    """Accepts [re, im] pairs, plain real numbers and strings such as "1+2i"."""
    if isinstance(value, str):
        try:
            return complex(value.strip().replace(" ", "").replace("i", "j"))
        except ValueError:
            raise InvalidInput(f"Cannot parse complex number {value!r}") from None
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return complex(float(value), 0.0)
    if isinstance(value, (list, tuple)) and len(value) == 2:
        return complex(float(value[0]), float(value[1]))
    raise InvalidInput(f"Expected a number or [re, im] pair, got {value!r}")
