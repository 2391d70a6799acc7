"""Finitely supported elements of the smooth crossed product by an affine torus map.

An element is ``s = sum_k delta_k (x) s(k)`` with trigonometric polynomial
coefficients. With ``alpha_j(f) = f o h^{-j}`` the operations are

    (s t)(k) = sum_j s(j) * alpha_j(t(k - j))
    s*(k)    = alpha_k(conj(s(-k)))

so ``delta_1`` is the canonical unitary and ``delta_1 f delta_1* = alpha_1(f)``.
Composition with an affine map sends a trigonometric polynomial to another
one exactly, which is why perturbed maps are rejected.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .errors import InvalidArgument, UnsupportedOperation
from .symbolic import to_float
from .torus import TorusMap, iterate_affine_lift
from .trigpoly import TrigPoly, default_grid, sup_norm, word_count

CONVOLUTION_CONVENTION = ("(s t)(k) = sum_j s(j) alpha_j(t(k-j)), s*(k) = alpha_k(conj s(-k)), "
                          "alpha_j f = f o h^-j")


class _Alpha:
    """Cached ``f -> f o h^{-j}`` for one affine map."""

    def __init__(self, map: TorusMap):
        if not map.is_affine():
            raise UnsupportedOperation("crossed-product arithmetic needs an affine map")
        self.map = map
        self._lifts = {}

    def __call__(self, j: int, f: TrigPoly) -> TrigPoly:
        if j == 0:
            return f
        if j not in self._lifts:
            lift = iterate_affine_lift(self.map, -j)
            t = [float(to_float(x, self.map.basis)) % 1.0 for x in lift.translation]
            self._lifts[j] = (t, lift.linear)
        t, L = self._lifts[j]
        return f.compose_affine(t, L)


_ALPHA_CACHE: dict[int, _Alpha] = {}


def _alpha_for(map: TorusMap) -> _Alpha:
    a = _ALPHA_CACHE.get(id(map))
    if a is None or a.map is not map:
        a = _ALPHA_CACHE[id(map)] = _Alpha(map)
    return a


class CrossedElement:
    __slots__ = ("map", "terms")

    def __init__(self, map: TorusMap, terms: Mapping[int, TrigPoly] | None = None):
        d = map.dim
        clean = {}
        for k, f in (terms or {}).items():
            if not isinstance(f, TrigPoly):
                raise InvalidArgument("coefficients must be trigonometric polynomials")
            if f.dim != d:
                raise InvalidArgument(f"coefficient at {k} has dimension {f.dim}, map has {d}")
            if not f.is_zero():
                clean[int(k)] = f
        self.map = map
        self.terms = dict(sorted(clean.items()))

    @classmethod
    def unit(cls, map: TorusMap) -> "CrossedElement":
        return cls(map, {0: TrigPoly.constant(map.dim)})

    @classmethod
    def delta(cls, map: TorusMap, k: int, f: TrigPoly | None = None) -> "CrossedElement":
        return cls(map, {k: TrigPoly.constant(map.dim) if f is None else f})

    def support(self) -> list[int]:
        return list(self.terms)

    def coeff(self, k: int) -> TrigPoly:
        return self.terms.get(k, TrigPoly.zero(self.map.dim))

    def _same_map(self, other: "CrossedElement") -> None:
        if other.map is not self.map:
            raise InvalidArgument("elements belong to different crossed products")

    def __add__(self, other: "CrossedElement") -> "CrossedElement":
        self._same_map(other)
        out = dict(self.terms)
        for k, f in other.terms.items():
            out[k] = out[k] + f if k in out else f
        return CrossedElement(self.map, out)

    def __neg__(self) -> "CrossedElement":
        return CrossedElement(self.map, {k: -f for k, f in self.terms.items()})

    def __sub__(self, other: "CrossedElement") -> "CrossedElement":
        return self + (-other)

    def __mul__(self, other) -> "CrossedElement":
        if isinstance(other, CrossedElement):
            return multiply(self, other)
        return CrossedElement(self.map, {k: f * other for k, f in self.terms.items()})

    def __rmul__(self, c) -> "CrossedElement":
        return CrossedElement(self.map, {k: f * c for k, f in self.terms.items()})

    def adjoint(self) -> "CrossedElement":
        return adjoint(self)

    def allclose(self, other: "CrossedElement", tol: float = 1e-9) -> bool:
        self._same_map(other)
        keys = set(self.terms) | set(other.terms)
        return all(self.coeff(k).allclose(other.coeff(k), tol) for k in keys)

    def __repr__(self) -> str:
        return "CrossedElement(" + ", ".join(f"{k}: {f!r}" for k, f in self.terms.items()) + ")"

    def to_json(self) -> list:
        return [[k, f.to_json()] for k, f in self.terms.items()]

    @classmethod
    def from_json(cls, map: TorusMap, obj: Sequence) -> "CrossedElement":
        try:
            return cls(map, {int(k): TrigPoly.from_json(f) for k, f in obj})
        except (TypeError, ValueError) as exc:
            raise InvalidArgument(f"bad element literal: {exc}") from None


def multiply(s: CrossedElement, t: CrossedElement) -> CrossedElement:
    s._same_map(t)
    alpha = _alpha_for(s.map)
    out: dict[int, TrigPoly] = {}
    for j, sj in s.terms.items():
        for i, ti in t.terms.items():
            term = sj * alpha(j, ti)
            k = j + i
            out[k] = out[k] + term if k in out else term
    return CrossedElement(s.map, out)


def adjoint(s: CrossedElement) -> CrossedElement:
    alpha = _alpha_for(s.map)
    return CrossedElement(s.map, {-k: alpha(-k, f.conj()) for k, f in s.terms.items()})


@dataclass(frozen=True)
class SeminormIndex:
    n: int
    d: int

    def __post_init__(self):
        if self.n < 0 or self.d < 0:
            raise InvalidArgument("seminorm indices must be nonnegative")


def seminorm_f_bounds(f: TrigPoly, n: int, grid: int | None = None,
                      refine: bool = True) -> tuple[float, float]:
    """``(estimate, certified upper bound)`` of ``sum over length-n words of ||D_w f||_inf``."""
    if n < 0:
        raise InvalidArgument("derivative order must be nonnegative")
    value = upper = 0.0
    for alpha, mult in word_count(n, f.dim).items():
        g = f
        for coord, order in enumerate(alpha):
            if order:
                g = g.derivative(coord, order)
        est = sup_norm(g, grid, refine)
        value += mult * est.value
        upper += mult * est.upper
    return value, upper


def seminorm_f(f: TrigPoly, n: int, grid: int | None = None) -> float:
    return seminorm_f_bounds(f, n, grid)[0]


def seminorm_cp_bounds(s: CrossedElement, idx: SeminormIndex, grid: int | None = None,
                       refine: bool = True) -> tuple[float, float]:
    value = upper = 0.0
    for k, f in s.terms.items():
        w = (1 + abs(k)) ** idx.d
        v, u = seminorm_f_bounds(f, idx.n, grid, refine)
        value += w * v
        upper += w * u
    return value, upper


def seminorm_cp(s: CrossedElement, idx: SeminormIndex, grid: int | None = None) -> float:
    return seminorm_cp_bounds(s, idx, grid)[0]


def random_trigpoly(rng: np.random.Generator, d: int, max_freq: int = 3, terms: int = 3) -> TrigPoly:
    coeffs = {}
    for _ in range(terms):
        k = tuple(int(v) for v in rng.integers(-max_freq, max_freq + 1, size=d))
        coeffs[k] = complex(rng.normal(), rng.normal())
    return TrigPoly(d, coeffs)


def random_element(map: TorusMap, rng: np.random.Generator, support: int = 3,
                   window: int = 2, max_freq: int = 3, terms: int = 3) -> CrossedElement:
    """Random element with at most ``support`` nonzero ``k`` in ``[-window, window]``."""
    ks = rng.choice(np.arange(-window, window + 1), size=min(support, 2 * window + 1), replace=False)
    n_terms = int(rng.integers(1, len(ks) + 1))
    return CrossedElement(map, {int(k): random_trigpoly(rng, map.dim, max_freq, terms)
                                for k in ks[:n_terms]})


def submultiplicativity_probe(map: TorusMap, idx: SeminormIndex, sample_count: int = 100,
                              seed: int = 0, widths: Sequence[int] = (1, 2, 3),
                              max_freq: int = 2, grid: int | None = None) -> dict:
    """Largest observed ``||s t|| / (||s|| ||t||)`` over random pairs, per support width.

    The numerator uses grid maxima and the denominator certified upper
    bounds, so the ratio never overstates the true one.
    """
    if not map.is_affine():
        raise UnsupportedOperation("the probe needs an affine map")
    rng = np.random.default_rng(seed)
    grid = default_grid(map.dim) if grid is None else grid
    per_width = []
    for W in widths:
        worst = 0.0
        for _ in range(sample_count):
            s = random_element(map, rng, support=2 * W + 1, window=W, max_freq=max_freq)
            t = random_element(map, rng, support=2 * W + 1, window=W, max_freq=max_freq)
            num = seminorm_cp_bounds(s * t, idx, grid, refine=False)[0]
            den = (seminorm_cp_bounds(s, idx, grid, refine=False)[1]
                   * seminorm_cp_bounds(t, idx, grid, refine=False)[1])
            if den > 0:
                worst = max(worst, num / den)
        per_width.append({"width": W, "max_ratio": worst})
    report = {"map": map.name, "index": {"n": idx.n, "d": idx.d}, "samples_per_width": sample_count,
              "seed": seed, "grid": grid, "truncation_window": [-max(widths), max(widths)],
              "max_frequency": max_freq, "per_width": per_width,
              "max_ratio": max(p["max_ratio"] for p in per_width),
              "convention": CONVOLUTION_CONVENTION}
    report["fitted_constant"] = report["max_ratio"]
    ws = np.array([p["width"] for p in per_width], dtype=float)
    rs = np.array([p["max_ratio"] for p in per_width])
    if len(ws) >= 2 and np.all(rs > 0) and np.all(ws > 0):
        slope, icpt = np.polyfit(np.log(ws), np.log(rs), 1)
        report["width_growth"] = {"exponent": float(slope), "constant": float(np.exp(icpt))}
    return report
