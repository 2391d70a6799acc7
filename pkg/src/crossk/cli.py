"""Command-line front end: every subcommand prints (or writes) one JSON report.

Exit codes: 0 success, 2 invalid input, 3 resource limit exceeded.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from pathlib import Path
from typing import Sequence

import numpy as np

from . import _kernels
from .conjugacy import DEFAULT_MODCAP, flip_obstruction, ji_matrices, z_similar_bounded
from .elliott import (build_affine_furstenberg_invariant, build_putnam_invariant,
                      invariants_equivalent)
from .errors import InvalidArgument, ResourceLimit, UnsupportedOperation
from .fgab import IntMatrix
from .io import (dumps, family_map, load_json, map_from_json, parse_family, parse_floats,
                 run_report)
from .ktheory import (induced_kstar_torus, point_kdatum, pv_crossed_k, putnam_product_kdata)
from .schweitzer import run_suite
from .smooth_cp import (CrossedElement, SeminormIndex, random_element, seminorm_cp,
                        submultiplicativity_probe)
from .tempered import classify_growth, growth_profile
from .torus import (collapse_f0, distality_probe, ergodic_average, orbit, winding_average)
from .trigpoly import TrigPoly

EXIT_OK, EXIT_INVALID, EXIT_RESOURCE = 0, 2, 3


def _target(arg: str) -> dict:
    """Descriptor or map file -> ``{"map": TorusMap | None, "family": dict | None}``."""
    if Path(arg).is_file():
        return {"map": map_from_json(load_json(arg)), "family": None, "source": arg}
    fam = parse_family(arg)
    if fam["family"] in ("putnam", "point"):
        return {"map": None, "family": fam, "source": arg}
    return {"map": family_map(fam), "family": fam, "source": arg}


# ---- subcommands -------------------------------------------------------------

def cmd_ktheory(args) -> tuple[dict, list[str]]:
    tgt = _target(args.target)
    if tgt["map"] is not None:
        datum = induced_kstar_torus(tgt["map"])
        source = tgt["map"].to_json()
    elif tgt["family"]["family"] == "putnam":
        datum, source = putnam_product_kdata(), tgt["family"]
    else:
        datum, source = point_kdatum(), tgt["family"]
    groups = pv_crossed_k(datum)
    return {"input": source, "k_data": datum.to_json(), "crossed_k": groups.to_json()}, \
        list(groups.notes)


def _invariant(arg: str):
    tgt = _target(arg)
    if tgt["family"] and tgt["family"]["family"] == "putnam":
        f = tgt["family"]
        return build_putnam_invariant(f["alpha"], f["beta"])
    if tgt["map"] is None:
        raise InvalidArgument(f"{arg!r} has no unique-trace invariant in scope")
    return build_affine_furstenberg_invariant(tgt["map"])


def _identification(text: str | None):
    if text is None or text == "union":
        return text
    out = {}
    for pair in text.split(","):
        a, sep, b = pair.partition("=")
        if not sep:
            raise InvalidArgument(f"identification entries look like SRC=DST, got {pair!r}")
        out[a.strip()] = b.strip()
    return out


def cmd_elliott(args) -> tuple[dict, list[str]]:
    e1, e2 = _invariant(args.first), _invariant(args.second)
    verdict = invariants_equivalent(e1, e2, _identification(args.identify))
    return {"first": e1.to_json(), "second": e2.to_json(), "verdict": verdict.to_json()}, \
        list(e1.notes)


def cmd_tempered(args) -> tuple[dict, list[str]]:
    tgt = _target(args.target)
    m = tgt["map"]
    if m is None:
        raise InvalidArgument("tempered needs a torus map")
    if args.exact and not m.is_affine():
        raise UnsupportedOperation("--exact needs an affine map")
    exact = args.exact or (m.is_affine() and not args.numeric)
    if exact:
        max_n = args.max_n or 1024
        ns = sorted({1 << k for k in range(int(math.log2(max_n)) + 1)} | {max_n})
    else:
        max_n = args.max_n or 64
        step = max(1, max_n // 16)
        ns = list(range(step, max_n + 1, step))
    profile = growth_profile(m, ns, exact=exact, grid=args.grid, reduction=args.reduction)
    verdict = classify_growth(profile)
    return {"map": m.to_json(), "profile": profile.to_json(), "verdict": verdict.to_json()}, \
        ["vector fields fixed to coordinate derivations"]


def cmd_smoothcp(args) -> tuple[dict, list[str]]:
    tgt = _target(args.target)
    m = tgt["map"]
    if m is None:
        raise InvalidArgument("smoothcp needs a torus map")
    if not m.is_affine():
        raise UnsupportedOperation("smooth crossed-product arithmetic needs an affine map")
    idx = SeminormIndex(args.n, args.d)
    rng = np.random.default_rng(args.seed)
    assoc = invol = adj = 0.0
    for _ in range(args.axiom_cases):
        s, t, u = (random_element(m, rng) for _ in range(3))
        assoc = max(assoc, _max_diff((s * t) * u, s * (t * u)))
        invol = max(invol, _max_diff((s * t).adjoint(), t.adjoint() * s.adjoint()),
                    _max_diff(s.adjoint().adjoint(), s))
        base = seminorm_cp(s, SeminormIndex(0, args.d), args.grid)
        adj = max(adj, abs(seminorm_cp(s.adjoint(), SeminormIndex(0, args.d), args.grid) - base)
                  / max(base, 1e-300))
    unit = CrossedElement.unit(m)
    widths = tuple(int(w) for w in parse_floats(args.widths) if w == int(w))
    if not widths or min(widths) < 1:
        raise InvalidArgument("--widths takes positive integers")
    probe = submultiplicativity_probe(m, idx, args.samples, args.seed, widths, args.max_freq,
                                      args.grid)
    return {"map": m.to_json(), "index": {"n": idx.n, "d": idx.d},
            "unit_norm": seminorm_cp(unit, idx, args.grid),
            "axioms": {"cases": args.axiom_cases, "associativity_max_error": assoc,
                       "involution_max_error": invol, "adjoint_norm_max_rel_error": adj},
            "probe": probe}, ["finite support stands in for rapid decay"]


def _max_diff(a: CrossedElement, b: CrossedElement) -> float:
    worst = 0.0
    for k in set(a.terms) | set(b.terms):
        fa, fb = a.coeff(k), b.coeff(k)
        for q in set(fa.coeffs) | set(fb.coeffs):
            worst = max(worst, abs(fa.coeff(q) - fb.coeff(q)))
    return worst


def cmd_schweitzer(args) -> tuple[dict, list[str]]:
    res = run_suite(args.cases, args.seed, args.search_prefix)
    return res.to_json(), ["norm inequalities tested on certified interval outer bounds"]


def _matrix(text: str) -> IntMatrix:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidArgument(f"matrix must be a JSON array: {exc.msg}") from None
    return IntMatrix.from_json(obj)


def cmd_conjugacy(args) -> tuple[dict, list[str]]:
    if args.ji:
        A, B = ji_matrices(*args.ji)
    elif args.A and args.B:
        A, B = _matrix(args.A), _matrix(args.B)
    else:
        raise InvalidArgument("give two matrices or --ji M N")
    if args.no_flip:
        verdict = z_similar_bounded(A, B, args.bound, args.modcap)
    else:
        verdict = flip_obstruction(A, B, args.bound, args.modcap)
    return {"A": A.to_json(), "B": B.to_json(), "verdict": verdict.to_json()}, \
        ["mod-k searches are exhaustive over the solution space of P A = B P"]


def cmd_dynamics(args) -> tuple[dict, list[str]]:
    out: dict = {"backend": _kernels.BACKEND}
    if args.f0:
        pts = []
        for text in args.f0:
            vals = parse_floats(text)
            if len(vals) != 2:
                raise InvalidArgument(f"--f0 takes X,Y, got {text!r}")
            x, y = vals
            pts.append({"point": [x, y], "image": list(collapse_f0(x, y))})
        out["collapse_f0"] = pts
    if args.target:
        m = _target(args.target)["map"]
        if m is None:
            raise InvalidArgument("dynamics needs a torus map")
        d = m.dim
        rng = np.random.default_rng(args.seed)
        start = parse_floats(args.start) if args.start else [0.0] * d
        if len(start) != d:
            raise InvalidArgument(f"start point needs {d} coordinates")
        N = args.iterations
        obs = TrigPoly.character([1] + [0] * (d - 1)) if args.observable is None else \
            TrigPoly.from_json(json.loads(args.observable))
        z2 = list(rng.random(d))
        out.update({
            "map": m.to_json(),
            "start": start,
            "iterations": N,
            "endpoint": orbit(m, start, N)[-1].tolist(),
            "ergodic_average": ergodic_average(m, obs, N, start),
            "observable": obs.to_json(),
            "winding_averages": [winding_average(m, i, N, start) for i in range(1, d + 1)],
            "distality": {"second_point": z2, **distality_probe(m, start, z2, N).to_json()},
        })
    if len(out) == 1:
        raise InvalidArgument("dynamics needs a map target or --f0 points")
    return out, ["orbit kernels: " + _kernels.BACKEND]


# ---- parser --------------------------------------------------------------------

def _global_options(parser: argparse.ArgumentParser, suppress: bool) -> None:
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    parser.add_argument("--seed", type=int, default=d(0), help="master random seed")
    parser.add_argument("--out", default=d(None), help="write the report here instead of stdout")
    parser.add_argument("--grid", type=int, default=d(None),
                        help="sup-norm grid points per dimension (default depends on dimension)")
    parser.add_argument("--modcap", type=int, default=d(DEFAULT_MODCAP),
                        help="largest modulus in similarity sweeps")
    parser.add_argument("--bound", type=int, default=d(3), help="entry bound for witness searches")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="crossk", description=__doc__.splitlines()[0])
    _global_options(parser, suppress=False)
    common = argparse.ArgumentParser(add_help=False)
    _global_options(common, suppress=True)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ktheory", parents=[common], help="K-groups of the crossed product")
    p.add_argument("target", help="map file or family descriptor (ji:2,3, rotation, putnam, point, ...)")
    p.set_defaults(func=cmd_ktheory)

    p = sub.add_parser("elliott", parents=[common], help="compare Elliott invariants")
    p.add_argument("action", choices=["compare"])
    p.add_argument("first")
    p.add_argument("second")
    p.add_argument("--identify", default=None,
                   help='"union" or SRC=DST pairs mapping symbols of the second onto the first')
    p.set_defaults(func=cmd_elliott)

    p = sub.add_parser("tempered", parents=[common], help="growth of rho1(h^n)")
    p.add_argument("target")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--exact", action="store_true", help="symbolic path only (affine maps)")
    g.add_argument("--numeric", action="store_true", help="Jacobian products even for affine maps")
    p.add_argument("--max-n", type=int, default=None)
    p.add_argument("--reduction", choices=["sum", "max"], default="sum")
    p.set_defaults(func=cmd_tempered)

    p = sub.add_parser("smoothcp", parents=[common], help="smooth crossed-product experiments")
    p.add_argument("action", choices=["bench"])
    p.add_argument("target")
    p.add_argument("--n", type=int, default=0, help="derivative order of the seminorm")
    p.add_argument("--d", type=int, default=0, help="decay weight of the seminorm")
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--axiom-cases", type=int, default=20)
    p.add_argument("--widths", default="1,2,3")
    p.add_argument("--max-freq", type=int, default=2)
    p.set_defaults(func=cmd_smoothcp)

    p = sub.add_parser("schweitzer", parents=[common], help="sequence-algebra lemma battery")
    p.add_argument("action", choices=["suite"])
    p.add_argument("--cases", type=int, default=1000)
    p.add_argument("--search-prefix", type=int, default=6)
    p.set_defaults(func=cmd_schweitzer)

    p = sub.add_parser("conjugacy", parents=[common], help="integer-matrix similarity evidence")
    p.add_argument("A", nargs="?", help="JSON matrix")
    p.add_argument("B", nargs="?", help="JSON matrix")
    p.add_argument("--ji", type=int, nargs=2, metavar=("M", "N"))
    p.add_argument("--no-flip", action="store_true", help="compare with B only, not also B^-1")
    p.set_defaults(func=cmd_conjugacy)

    p = sub.add_parser("dynamics", parents=[common], help="orbit statistics")
    p.add_argument("target", nargs="?")
    p.add_argument("--iterations", type=int, default=10000)
    p.add_argument("--start", default=None, help="comma-separated start point")
    p.add_argument("--observable", default=None, help="trigonometric polynomial as JSON")
    p.add_argument("--f0", action="append", metavar="X,Y", help="evaluate the collapse map")
    p.set_defaults(func=cmd_dynamics)
    return parser


def _config(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "out")}


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    args = build_parser().parse_args(argv)
    t0 = time.perf_counter()
    try:
        results, notes = args.func(args)
    except (InvalidArgument, UnsupportedOperation) as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
        return EXIT_INVALID
    except json.JSONDecodeError as exc:
        print(json.dumps({"error": "InvalidArgument", "message": f"bad inline JSON: {exc.msg}"}),
              file=sys.stderr)
        return EXIT_INVALID
    except ResourceLimit as exc:
        print(json.dumps({"error": "ResourceLimit", "message": str(exc)}), file=sys.stderr)
        return EXIT_RESOURCE
    report = run_report(["crossk"] + argv, _config(args), results, notes,
                        round(time.perf_counter() - t0, 6))
    text = dumps(report)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
