"""Growth of first derivatives of iterates, as evidence for temperedness.

``rho1(h^n)`` combines the sup norms of the first partials ``D_j (h^n)_i``
of the lift. Two reductions are offered:

* ``"sum"`` (default) -- total over all ``i, j``; rotations give ``d``.
* ``"max"`` -- largest row total ``max_i sum_j``.

Both are submultiplicative under composition and have the same polynomial
or exponential growth type.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial
from typing import Sequence

import numpy as np

from .errors import InvalidArgument, UnsupportedOperation
from .fgab import IntMatrix
from .torus import TorusMap
from .trigpoly import TrigPoly, default_grid, sup_norm

REDUCTIONS = ("sum", "max")
EXP_RESIDUAL_MARGIN = 10.0
EXP_MIN_RATE = 1.05
POLY_MAX_RMS = 0.05


def _reduce(abs_entries: np.ndarray, reduction: str):
    if reduction == "sum":
        return abs_entries.sum()
    if reduction == "max":
        return abs_entries.sum(axis=1).max()
    raise InvalidArgument(f"reduction must be one of {REDUCTIONS}")


def _linear_power(map: TorusMap, n: int) -> IntMatrix:
    return map.linear ** n


def rho1_exact_affine(map: TorusMap, n: int, reduction: str = "sum") -> int:
    if not map.is_affine():
        raise UnsupportedOperation("exact growth needs an unperturbed affine map")
    A = _linear_power(map, int(n))
    entries = np.array([[abs(A[i, j]) for j in range(A.cols)] for i in range(A.rows)], dtype=object)
    return int(_reduce(entries, reduction))


def _grid_points(d: int, grid: int) -> np.ndarray:
    axes = [np.arange(grid) / grid] * d
    return np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, d)


def jacobian_sups(map: TorusMap, n: int, grid: int | None = None) -> np.ndarray:
    """Grid maxima of ``|D_j (h^n)_i|`` via the chain rule along orbits (``n >= 0``)."""
    if n < 0:
        raise InvalidArgument("numeric growth is computed for n >= 0")
    d = map.dim
    grid = default_grid(d) if grid is None else int(grid)
    if map.is_affine():
        # constant Jacobian; a single point is exact
        pts = np.zeros((1, d))
    else:
        pts = _grid_points(d, grid)
    J = np.broadcast_to(np.eye(d), (len(pts), d, d)).copy()
    x = pts
    for _ in range(n):
        J = map.jacobian(x) @ J
        x = np.mod(map.lift(x), 1.0)
    return np.abs(J).max(axis=0)


def rho1_numeric(map: TorusMap, n: int, grid: int | None = None, reduction: str = "sum") -> float:
    """Grid estimate of ``rho1(h^n)`` (exact for affine maps).

    Each entry's sup is taken over the grid before reducing, so on
    non-affine maps the value is a lower estimate converging as the grid
    is refined.
    """
    return float(_reduce(jacobian_sups(map, n, grid), reduction))


def rhom_perturbed_skew(map: TorusMap, m: int, n: int, grid: int | None = None) -> float:
    """``sup_x |D_1^m (h^n)_2|`` for ``(x, y) -> (x + theta, y + c x + r(x))``.

    Uses the closed form ``D_1 (h^n)_2 = c n + sum_{k<n} r'(x + k theta)``
    and ``D_1^m (h^n)_2 = sum_{k<n} r^(m)(x + k theta)`` for ``m >= 2``;
    the orbit sum of each Fourier mode is a geometric series.
    """
    if m < 1 or n < 0:
        raise InvalidArgument("need m >= 1 and n >= 0")
    if map.dim != 2 or map.perturbations[0] is not None:
        raise UnsupportedOperation("expected a two-dimensional skew map perturbed in the second coordinate")
    L = map.linear
    if (L[0, 0], L[0, 1], L[1, 1]) != (1, 0, 1) or L[1, 0] == 0:
        raise UnsupportedOperation("expected linear part [[1, 0], [c, 1]] with c != 0")
    r = map.perturbations[1]
    if r is not None and r.depends_on() - {0}:
        raise UnsupportedOperation("the perturbation may depend only on the first coordinate")
    theta = float(map.translation_float()[0])
    terms = {}
    if m == 1:
        terms[(0,)] = complex(L[1, 0] * n)
    if r is not None:
        for k, c in r.items():
            f = k[0]
            if f == 0:
                continue
            z = np.exp(2j * np.pi * f * theta)
            geo = n if abs(z - 1) < 1e-300 else (1 - z ** n) / (1 - z)
            terms[(f,)] = terms.get((f,), 0) + c * (2j * np.pi * f) ** m * geo
    series = TrigPoly(1, terms)
    if series.is_zero():
        return 0.0
    return sup_norm(series, grid if grid is not None else default_grid(1)).value


def affine_growth_polynomial(map: TorusMap, reduction: str = "sum") -> tuple[Fraction, ...] | None:
    """Coefficients (constant first) of ``rho1(h^n)`` as a polynomial in ``n >= 0``.

    Available when the linear part is unipotent with nonnegative nilpotent
    part, so every entry of ``L^n = sum_k C(n, k) N^k`` is nonnegative.
    """
    if not map.is_affine():
        return None
    d = map.dim
    N = map.linear - IntMatrix.identity(d)
    if any(v < 0 for v in N.entries()):
        return None
    powers = [IntMatrix.identity(d)]
    for _ in range(d):
        powers.append(powers[-1] @ N)
    if not all(v == 0 for v in powers[d].entries()):
        return None
    # entries as polynomials in n: sum_k C(n, k) (N^k)_{ij}
    binom = [_binomial_poly(k) for k in range(d)]

    def entry(i, j):
        out = [Fraction(0)] * d
        for k in range(d):
            for p, c in enumerate(binom[k]):
                out[p] += c * powers[k][i, j]
        return out

    rows = [[entry(i, j) for j in range(d)] for i in range(d)]
    row_totals = [[sum(col[p] for col in row) for p in range(d)] for row in rows]
    if reduction == "sum":
        return tuple(_trim([sum(r[p] for r in row_totals) for p in range(d)]))
    if reduction == "max":
        # the largest row for large n: compare coefficient vectors from the top degree down
        best = max(row_totals, key=lambda r: tuple(reversed(r)))
        return tuple(_trim(best))
    raise InvalidArgument(f"reduction must be one of {REDUCTIONS}")


def _binomial_poly(k: int) -> list[Fraction]:
    coeffs = [Fraction(1)]
    for i in range(k):
        nxt = [Fraction(0)] * (len(coeffs) + 1)
        for p, c in enumerate(coeffs):
            nxt[p + 1] += c
            nxt[p] -= i * c
        coeffs = nxt
    return [c / factorial(k) for c in coeffs]


def _trim(c: list[Fraction]) -> list[Fraction]:
    while len(c) > 1 and c[-1] == 0:
        c.pop()
    return c


@dataclass(frozen=True)
class GrowthProfile:
    samples: tuple[tuple[int, float], ...]
    method: str
    dim: int
    affine: bool
    exact_polynomial: tuple[Fraction, ...] | None = None
    grid: int | None = None
    reduction: str = "sum"

    def __post_init__(self):
        ns = [n for n, _ in self.samples]
        if any(b <= a for a, b in zip(ns, ns[1:])):
            raise InvalidArgument("sample indices must be strictly increasing")
        if any(v < 0 for _, v in self.samples):
            raise InvalidArgument("growth values must be nonnegative")
        if self.method not in ("exact", "jacobian-numeric"):
            raise InvalidArgument(f"unknown method {self.method!r}")

    def to_json(self) -> dict:
        return {"method": self.method, "dimension": self.dim, "affine": self.affine,
                "reduction": self.reduction, "grid": self.grid,
                "samples": [[str(n), v if isinstance(v, float) else str(v)] for n, v in self.samples],
                "exact_polynomial": None if self.exact_polynomial is None
                else [str(c) for c in self.exact_polynomial]}


def growth_profile(map: TorusMap, ns: Sequence[int], exact: bool | None = None,
                   grid: int | None = None, reduction: str = "sum") -> GrowthProfile:
    """Sample ``rho1(h^n)``; the exact path is used for affine maps unless ``exact=False``."""
    ns = sorted(set(int(n) for n in ns))
    if exact is None:
        exact = map.is_affine()
    if exact:
        vals = tuple((n, rho1_exact_affine(map, n, reduction)) for n in ns)
        return GrowthProfile(vals, "exact", map.dim, True,
                             affine_growth_polynomial(map, reduction), None, reduction)
    g = default_grid(map.dim) if grid is None else grid
    vals = tuple((n, rho1_numeric(map, n, g, reduction)) for n in ns)
    return GrowthProfile(vals, "jacobian-numeric", map.dim, map.is_affine(), None, g, reduction)


@dataclass(frozen=True)
class GrowthVerdict:
    kind: str  # polynomial | exponential | inconclusive
    degree: int | None = None
    rate: float | None = None
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind == "polynomial" and (self.degree is None or self.degree < 0):
            raise InvalidArgument("polynomial verdicts need a degree >= 0")
        if self.kind == "exponential" and (self.rate is None or self.rate <= 1):
            raise InvalidArgument("exponential verdicts need a rate > 1")

    def __str__(self) -> str:
        if self.kind == "polynomial":
            return f"polynomial({self.degree})"
        if self.kind == "exponential":
            return f"exponential({self.rate:.4g})"
        return "inconclusive"

    def to_json(self) -> dict:
        return {"class": self.kind, "degree": self.degree, "rate": self.rate,
                "summary": str(self), "diagnostics": self.diagnostics}


def _lstsq(x: np.ndarray, y: np.ndarray) -> tuple[float, float, float]:
    A = np.column_stack([x, np.ones_like(x)])
    (slope, icpt), *_ = np.linalg.lstsq(A, y, rcond=None)
    rms = float(np.sqrt(np.mean((A @ np.array([slope, icpt]) - y) ** 2)))
    return float(slope), float(icpt), rms


def classify_growth(profile: GrowthProfile) -> GrowthVerdict:
    """Polynomial versus exponential fit on the upper half of the samples.

    Only the tail is fitted, where lower-order terms have died out.
    """
    pts = [(n, float(v)) for n, v in profile.samples if n > 0]
    if len(pts) < 8:
        raise InvalidArgument("need at least 8 samples with n > 0")
    if pts[-1][0] < 8 * pts[0][0]:
        raise InvalidArgument("samples must span at least a factor of 8 in n")
    if any(v <= 0 for _, v in pts):
        raise InvalidArgument("growth values must be positive for log fits")
    tail = pts[len(pts) // 2:] if len(pts) >= 16 else pts[(len(pts) - 1) // 2:]
    n = np.array([p[0] for p in tail], dtype=float)
    logv = np.log(np.array([p[1] for p in tail]))
    deg, _, poly_rms = _lstsq(np.log(n), logv)
    slope, _, exp_rms = _lstsq(n, logv)
    rate = float(np.exp(slope))
    diag = {"fitted_degree": deg, "poly_rms": poly_rms, "fitted_rate": rate, "exp_rms": exp_rms,
            "tail_samples": len(tail), "margin": EXP_RESIDUAL_MARGIN, "min_rate": EXP_MIN_RATE}
    if profile.affine:
        diag["degree_cap"] = profile.dim - 1
    if exp_rms * EXP_RESIDUAL_MARGIN < poly_rms and rate > EXP_MIN_RATE:
        return GrowthVerdict("exponential", rate=rate, diagnostics=diag)
    if poly_rms <= POLY_MAX_RMS:
        degree = max(0, int(round(deg)))
        if profile.affine:
            diag["within_cap"] = degree <= profile.dim - 1
        return GrowthVerdict("polynomial", degree=degree, diagnostics=diag)
    return GrowthVerdict("inconclusive", diagnostics=diag)


def composition_norm_bound(map: TorusMap, f: TrigPoly, grid: int | None = None,
                           reduction: str = "max") -> tuple[float, float]:
    """First-order composition estimate ``||f o h||_1 <= C (||f||_0 + ||f||_1)(1 + rho1(h))``.

    Returns ``(lhs, rhs)`` with ``C = 1``, which suffices by the chain rule.
    The left side is a grid maximum and the right side uses certified upper
    bounds for the sups of ``f``, so ``lhs <= rhs`` always holds.
    """
    d = map.dim
    if f.dim != d:
        raise InvalidArgument("dimension mismatch")
    grid = default_grid(d) if grid is None else grid
    pts = _grid_points(d, grid)
    y = np.mod(map.lift(pts), 1.0)
    J = map.jacobian(pts)
    grads = np.stack([np.asarray(f.derivative(i)(y)) for i in range(d)], axis=-1)
    comp = np.einsum("pi,pij->pj", grads, J)
    lhs = float(np.abs(comp).max(axis=0).sum())
    f0 = sup_norm(f, grid).upper
    f1 = sum(sup_norm(f.derivative(i), grid).upper for i in range(d))
    rho = float(_reduce(np.abs(J).max(axis=0), reduction))
    return lhs, (f0 + f1) * (1.0 + rho)
