"""Map files, family descriptors and JSON report plumbing."""

from __future__ import annotations

import hashlib
import json
import math
from fractions import Fraction
from pathlib import Path
from typing import Any

import numpy as np

from . import __version__
from .errors import InvalidArgument
from .fgab import COLUMN_MAP_CONVENTION, IntMatrix
from .ktheory import TRANSPOSE_CONVENTION
from .smooth_cp import CONVOLUTION_CONVENTION
from .symbolic import SymReal
from .torus import DEFAULT_BASIS, TorusMap
from .trigpoly import TrigPoly

CONVENTIONS = {
    "column_map": COLUMN_MAP_CONVENTION,
    "transpose": TRANSPOSE_CONVENTION,
    "convolution": CONVOLUTION_CONVENTION,
}

FAMILIES = ("ji:M,N", "affine:P1,P2,...", "rotation[:LABEL,...]", "rouhani[:AMP]",
            "putnam[:ALPHA,BETA]", "point", "circle:AMP[,THETA]")


# ---- parsing ---------------------------------------------------------------

def _parse_real(obj) -> SymReal | float:
    if isinstance(obj, dict):
        return SymReal({k: Fraction(str(v)) for k, v in obj.items()})
    if isinstance(obj, str):
        try:
            return SymReal.rational(Fraction(obj))
        except (ValueError, ZeroDivisionError):
            raise InvalidArgument(f"bad rational {obj!r}") from None
    if isinstance(obj, bool) or not isinstance(obj, (int, float)):
        raise InvalidArgument(f"bad translation entry {obj!r}")
    return SymReal.rational(obj) if isinstance(obj, int) else float(obj)


def map_from_json(obj: dict) -> TorusMap:
    """Build a map from its JSON description (see README for the schema)."""
    if not isinstance(obj, dict):
        raise InvalidArgument("map description must be a JSON object")
    kind = obj.get("kind", "torus")
    name = str(obj.get("name", ""))
    try:
        if kind == "circle":
            g = TrigPoly.from_json(obj["g"], real=True)
            return TorusMap.circle_diffeo(g, float(obj.get("theta", 0.0)), name=name or "circle-diffeo")
        if kind != "torus":
            raise InvalidArgument(f"unknown map kind {kind!r}")
        basis = {k: float(v) for k, v in obj.get("basis", DEFAULT_BASIS).items()}
        trans = [_parse_real(x) for x in obj["translation"]]
        if any(isinstance(x, float) for x in trans):
            trans = [x.value(basis) if isinstance(x, SymReal) else x for x in trans]
        linear = IntMatrix.from_json(obj["linear"])
        perts = obj.get("perturbations") or [None] * len(trans)
        perts = [None if p is None else TrigPoly.from_json(p, real=True) for p in perts]
        return TorusMap(tuple(trans), linear, tuple(perts), basis,
                        triangular=bool(obj.get("triangular", True)), name=name)
    except KeyError as exc:
        raise InvalidArgument(f"map description lacks field {exc}") from None
    except (TypeError, ValueError) as exc:
        raise InvalidArgument(f"bad map description: {exc}") from None


def load_json(path: str | Path) -> Any:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise InvalidArgument(f"cannot read {path}: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidArgument(f"{path}: JSON error at line {exc.lineno}, column {exc.colno}: "
                              f"{exc.msg}") from None


def load_map(path: str | Path) -> TorusMap:
    return map_from_json(load_json(path))


def _ints(args: str, count: int | None = None) -> list[int]:
    try:
        vals = [int(a) for a in args.split(",") if a.strip()]
    except ValueError:
        raise InvalidArgument(f"expected comma-separated integers, got {args!r}") from None
    if count is not None and len(vals) != count:
        raise InvalidArgument(f"expected {count} integers, got {args!r}")
    return vals


def parse_floats(args: str) -> list[float]:
    try:
        return [float(a) for a in args.split(",") if a.strip()]
    except ValueError:
        raise InvalidArgument(f"expected comma-separated numbers, got {args!r}") from None


def parse_family(desc: str) -> dict:
    """Split a descriptor such as ``ji:2,3`` into ``{"family", ...}``."""
    head, _, args = desc.partition(":")
    head = head.strip().lower()
    if head == "ji":
        m, n = _ints(args, 2)
        return {"family": "ji", "m": m, "n": n}
    if head == "affine":
        return {"family": "affine", "params": _ints(args)}
    if head == "rotation":
        labels = [a.strip() for a in args.split(",") if a.strip()] or ["theta"]
        return {"family": "rotation", "labels": labels}
    if head == "rouhani":
        vals = parse_floats(args)
        if len(vals) > 1:
            raise InvalidArgument("rouhani takes a single amplitude")
        return {"family": "rouhani", "amplitude": vals[0] if vals else 0.0}
    if head == "putnam":
        labels = [a.strip() for a in args.split(",") if a.strip()] or ["alpha", "beta"]
        if len(labels) != 2:
            raise InvalidArgument("putnam takes two symbol labels")
        return {"family": "putnam", "alpha": labels[0], "beta": labels[1]}
    if head == "point":
        return {"family": "point"}
    if head == "circle":
        vals = parse_floats(args)
        if not 1 <= len(vals) <= 2:
            raise InvalidArgument("circle takes AMP[,THETA]")
        return {"family": "circle", "amplitude": vals[0], "theta": vals[1] if len(vals) > 1 else 0.0}
    raise InvalidArgument(f"unknown family {head!r}; known: {', '.join(FAMILIES)}")


def _golden_shadows(labels) -> dict[str, float]:
    # distinct irrational shadows for numerical work; symbols stay exact elsewhere
    out = {}
    for i, l in enumerate(labels):
        out[l] = DEFAULT_BASIS.get(l, math.fmod(math.sqrt(2.0 + i), 1.0))
    return out


def family_map(spec: dict) -> TorusMap:
    fam = spec["family"]
    if fam == "ji":
        return TorusMap.ji(spec["m"], spec["n"])
    if fam == "affine":
        return TorusMap.affine_furstenberg(spec["params"])
    if fam == "rotation":
        labels = spec["labels"]
        return TorusMap.rotation([SymReal.symbol(l) for l in labels], basis=_golden_shadows(labels))
    if fam == "rouhani":
        amp = spec["amplitude"]
        return TorusMap.rouhani(r=TrigPoly.sin(1, 0, amp) if amp else None)
    if fam == "circle":
        a = spec["amplitude"] / (2 * math.pi)
        return TorusMap.circle_diffeo(TrigPoly.sin(1, 0, a), spec["theta"],
                                      name=f"circle(t + {spec['amplitude']}/(2pi) sin 2pi t)")
    raise InvalidArgument(f"family {fam!r} does not describe a torus map")


def resolve_map(arg: str) -> TorusMap:
    """A map file path, or a family descriptor."""
    if Path(arg).is_file():
        return load_map(arg)
    return family_map(parse_family(arg))


# ---- reports -----------------------------------------------------------------

def jsonable(x):
    """Normalize values for JSON: exact numbers become strings, complex a pair."""
    if hasattr(x, "to_json"):
        return jsonable(x.to_json())
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if isinstance(x, bool) or x is None or isinstance(x, str):
        return x
    if isinstance(x, np.bool_):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, (complex, np.complexfloating)):
        return [jsonable(float(x.real)), jsonable(float(x.imag))]
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else str(x)
    if isinstance(x, np.ndarray):
        return jsonable(x.tolist())
    return str(x)


def config_hash(config: dict) -> str:
    blob = json.dumps(jsonable(config), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


def run_report(command: list[str], config: dict, results, provenance=(),
               wall_time: float | None = None) -> dict:
    body = {
        "command": list(command),
        "config": jsonable(config),
        "config_hash": config_hash(config),
        "version": __version__,
        "conventions": CONVENTIONS,
        "results": jsonable(results),
        "provenance": list(provenance),
    }
    if wall_time is not None:
        body["wall_time_s"] = wall_time
    return body


def dumps(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=False, allow_nan=False)
