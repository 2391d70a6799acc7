"""Affine and perturbed skew-product diffeomorphisms of the torus (R/Z)^d.

A map is given by its lift ``h~(x) = t + L x + r(x)`` where ``L`` is an
integer matrix with ``|det L| = 1`` and ``r = (r_1, ..., r_d)`` is a vector
of real trigonometric polynomials. By default ``r_i`` may only depend on
``x_1, ..., x_{i-1}``; with a lower-triangular ``L`` that makes the inverse
solvable one coordinate at a time.

Coordinates are 0-based in code; the CLI and reports use 1-based indices
where they talk about "coordinate i".
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np
from scipy.optimize import brentq

from . import _kernels
from .errors import InvalidArgument, UnsupportedOperation
from .fgab import IntMatrix, as_matrix
from .symbolic import SymReal, to_float
from .trigpoly import TrigPoly

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
DEFAULT_BASIS = {"theta": GOLDEN}

Scalar = "float | SymReal"


def reduce_point(p: Sequence[float]) -> tuple[float, ...]:
    """Reduce mod 1 with round-half-to-even, matching the orbit kernels."""
    return tuple(_kernels.py_backend.reduce1(float(v)) for v in p)


def circle_distance(a: float, b: float) -> float:
    r = abs(a - b) % 1.0
    return min(r, 1.0 - r)


def torus_distance(p: Sequence[float], q: Sequence[float]) -> float:
    """Maximum of the coordinatewise circle distances."""
    return max(circle_distance(a, b) for a, b in zip(p, q))


@dataclass(frozen=True, eq=False)
class TorusMap:
    translation: tuple
    linear: IntMatrix
    perturbations: tuple = ()
    basis: Mapping[str, float] = field(default_factory=dict)
    triangular: bool = True
    name: str = ""
    notes: tuple[str, ...] = ()

    def __post_init__(self):
        L = as_matrix(self.linear)
        object.__setattr__(self, "linear", L)
        d = len(self.translation)
        if d < 1:
            raise InvalidArgument("dimension must be positive")
        if L.shape != (d, d):
            raise InvalidArgument(f"linear part must be {d}x{d}, got {L.shape}")
        if abs(L.det()) != 1:
            raise InvalidArgument(f"linear part must have determinant +-1 (got {L.det()})")
        trans = tuple(x if isinstance(x, SymReal) else
                      (SymReal.rational(x) if isinstance(x, (int, Fraction)) else float(x))
                      for x in self.translation)
        object.__setattr__(self, "translation", trans)
        object.__setattr__(self, "basis", dict(self.basis))
        perts = tuple(self.perturbations) or (None,) * d
        if len(perts) != d:
            raise InvalidArgument("need one perturbation slot per coordinate")
        clean = []
        for i, r in enumerate(perts):
            if r is None or (isinstance(r, TrigPoly) and r.is_zero()):
                clean.append(None)
                continue
            if r.dim != d:
                raise InvalidArgument(f"perturbation {i + 1} has dimension {r.dim}, expected {d}")
            if not r.is_real(1e-9):
                raise InvalidArgument(f"perturbation {i + 1} is not real-valued")
            if self.triangular and any(j >= i for j in r.depends_on()):
                raise InvalidArgument(
                    f"perturbation {i + 1} may only depend on coordinates 1..{i}")
            clean.append(r)
        object.__setattr__(self, "perturbations", tuple(clean))
        for x in trans:
            if isinstance(x, SymReal):
                x.value(self.basis)  # every symbol needs a float shadow

    # ---- constructors -------------------------------------------------
    @classmethod
    def rotation(cls, thetas: Sequence, basis: Mapping[str, float] | None = None,
                 name: str = "rotation") -> "TorusMap":
        return cls(tuple(thetas), IntMatrix.identity(len(thetas)),
                   basis=DEFAULT_BASIS if basis is None else basis, name=name)

    @classmethod
    def affine_furstenberg(cls, params: Sequence[int], theta=None,
                           basis: Mapping[str, float] | None = None,
                           name: str = "affine-furstenberg") -> "TorusMap":
        """``x_1 -> x_1 + theta``, ``x_{i+1} -> x_{i+1} + params[i-1] x_i``."""
        d = len(params) + 1
        L = [[int(i == j) for j in range(d)] for i in range(d)]
        for i, p in enumerate(params):
            L[i + 1][i] = int(p)
        theta = SymReal.symbol("theta") if theta is None else theta
        trans = (theta,) + (SymReal.rational(0),) * (d - 1) if isinstance(theta, SymReal) \
            else (float(theta),) + (0.0,) * (d - 1)
        return cls(trans, IntMatrix(L), basis=DEFAULT_BASIS if basis is None else basis,
                   name=name)

    @classmethod
    def ji(cls, m: int, n: int, theta=None, basis=None) -> "TorusMap":
        return cls.affine_furstenberg([m, n], theta, basis, name=f"ji({m},{n})")

    @classmethod
    def rouhani(cls, theta=None, r: TrigPoly | None = None, basis=None) -> "TorusMap":
        """``(x, y) -> (x + theta, y + x + r(x))``; ``r`` is a 1-variable real polynomial."""
        pert = None
        if r is not None:
            if r.dim != 1:
                raise InvalidArgument("r must be a polynomial in one variable")
            pert = TrigPoly(2, {(k[0], 0): c for k, c in r.items()}, real=True)
        base = cls.affine_furstenberg([1], theta, basis)
        return cls(base.translation, base.linear, (None, pert), base.basis,
                   name="rouhani-h2" if pert is not None else "rouhani-h1")

    @classmethod
    def circle_diffeo(cls, g: TrigPoly, theta: float = 0.0, grid: int = 4096,
                      name: str = "circle-diffeo") -> "TorusMap":
        """Circle map with lift ``t -> t + theta + g(t)``; requires ``g' > -1``."""
        if g.dim != 1:
            raise InvalidArgument("g must be a polynomial in one variable")
        gp = np.real(g.derivative(0).grid_values(grid))
        if gp.min() <= -1.0:
            raise InvalidArgument("g' must exceed -1 everywhere for a diffeomorphism")
        return cls((float(theta),), IntMatrix.identity(1), (g,), {}, triangular=False, name=name)

    # ---- basic properties ---------------------------------------------
    @property
    def dim(self) -> int:
        return len(self.translation)

    def is_affine(self) -> bool:
        return all(r is None for r in self.perturbations)

    def translation_float(self) -> np.ndarray:
        return np.array([to_float(x, self.basis) for x in self.translation])

    def is_symbolic(self) -> bool:
        return all(isinstance(x, SymReal) for x in self.translation)

    def linear_array(self) -> np.ndarray:
        return np.array(self.linear.tolist(), dtype=np.int64).reshape(self.dim, self.dim)

    def packed(self):
        """Arrays consumed by the orbit kernels."""
        d = self.dim
        pc, pf, pr, pi = [], [], [], []
        for i, r in enumerate(self.perturbations):
            if r is None:
                continue
            for k, c in r.items():
                pc.append(i)
                pf.append(k)
                pr.append(c.real)
                pi.append(c.imag)
        return (self.translation_float(), self.linear_array(),
                np.array(pc, dtype=np.int64), np.array(pf, dtype=np.int64).reshape(-1, d),
                np.array(pr, dtype=float), np.array(pi, dtype=float))

    # ---- evaluation ---------------------------------------------------
    def lift(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        y = self.translation_float() + x @ self.linear_array().T.astype(float)
        for i, r in enumerate(self.perturbations):
            if r is not None:
                y[..., i] += np.real(r(x))
        return y

    def jacobian(self, x) -> np.ndarray:
        """Jacobian of the lift at points ``x`` with shape (..., d); returns (..., d, d)."""
        x = np.asarray(x, dtype=float)
        J = np.broadcast_to(self.linear_array().astype(float),
                            x.shape[:-1] + (self.dim, self.dim)).copy()
        for i, r in enumerate(self.perturbations):
            if r is None:
                continue
            ks = np.array([k for k, _ in r.items()], dtype=float)
            cs = np.array([c for _, c in r.items()], dtype=complex)
            ph = np.exp(2j * np.pi * (x @ ks.T)) * cs
            J[..., i, :] += np.real(ph @ (2j * np.pi * ks))
        return J

    def inverse_point(self, p: Sequence[float]) -> tuple[float, ...]:
        y = np.asarray(p, dtype=float)
        if len(y) != self.dim:
            raise InvalidArgument("dimension mismatch")
        if self.is_affine():
            Linv = np.array(self.linear.inverse_unimodular().tolist(), dtype=float)
            return reduce_point(Linv @ (y - self.translation_float()))
        if not self.triangular:
            if self.dim != 1:
                raise UnsupportedOperation("inverse of non-triangular maps only in dimension 1")
            target = float(y[0])
            f = lambda s: float(self.lift([s])[0]) - target
            # lift is increasing; bracket the preimage
            lo, hi = target - 2.0 - abs(self.translation_float()[0]), target + 2.0 + \
                abs(self.translation_float()[0])
            lo -= self.perturbations[0].l1_norm()
            hi += self.perturbations[0].l1_norm()
            return reduce_point([brentq(f, lo, hi, xtol=1e-15, rtol=1e-15)])
        L = self.linear
        for i in range(self.dim):
            for j in range(i + 1, self.dim):
                if L[i, j]:
                    raise UnsupportedOperation("perturbed inverse needs a lower-triangular linear part")
        t = self.translation_float()
        x = np.zeros(self.dim)
        for i in range(self.dim):
            rhs = y[i] - t[i] - sum(L[i, j] * x[j] for j in range(i))
            r = self.perturbations[i]
            if r is not None:
                rhs -= float(np.real(r(x)))  # depends only on x_0..x_{i-1}
            x[i] = rhs / L[i, i]
        return reduce_point(x)

    def inverse(self) -> "TorusMap":
        if not self.is_affine():
            raise UnsupportedOperation("closed-form inverse map only for affine maps")
        lift = iterate_affine_lift(self, -1)
        return TorusMap(tuple(lift.translation), lift.linear, basis=self.basis,
                        name=f"{self.name}^-1" if self.name else "")

    # ---- serialization ------------------------------------------------
    def to_json(self) -> dict:
        return {
            "kind": "torus",
            "name": self.name,
            "dimension": self.dim,
            "basis": dict(self.basis),
            "translation": [x.to_json() if isinstance(x, SymReal) else x for x in self.translation],
            "linear": self.linear.to_json(),
            "perturbations": [None if r is None else r.to_json() for r in self.perturbations],
            "triangular": self.triangular,
        }


@dataclass(frozen=True)
class AffineLift:
    """``x -> translation + linear x`` on R^d."""

    translation: tuple
    linear: IntMatrix

    def compose(self, other: "AffineLift") -> "AffineLift":
        """``self o other``."""
        moved = self.linear.apply(list(other.translation))
        return AffineLift(tuple(a + b for a, b in zip(self.translation, moved)),
                          self.linear @ other.linear)

    def to_json(self) -> dict:
        return {"translation": [x.to_json() if isinstance(x, SymReal) else x
                                for x in self.translation],
                "linear": self.linear.to_json()}


def iterate_affine_lift(map: TorusMap, n: int) -> AffineLift:
    """Exact lift of ``h^n`` for an affine map (negative ``n`` via the inverse)."""
    if not map.is_affine():
        raise UnsupportedOperation("iterate_affine_lift needs an unperturbed map")
    d = map.dim
    zero = SymReal() if map.is_symbolic() else 0.0
    trans = map.translation if map.is_symbolic() else tuple(float(to_float(x, map.basis))
                                                           for x in map.translation)
    base = AffineLift(trans, map.linear)
    if n < 0:
        Linv = map.linear.inverse_unimodular()
        base = AffineLift(tuple(-v for v in Linv.apply(list(trans))), Linv)
        n = -n
    result = AffineLift((zero,) * d, IntMatrix.identity(d))
    while n:
        if n & 1:
            result = result.compose(base)
        base = base.compose(base)
        n >>= 1
    return result


def apply(map: TorusMap, p: Sequence[float]) -> tuple[float, ...]:
    if len(p) != map.dim:
        raise InvalidArgument(f"point has dimension {len(p)}, map has {map.dim}")
    return reduce_point(map.lift(np.asarray(p, dtype=float)))


def orbit(map: TorusMap, start: Sequence[float], N: int) -> np.ndarray:
    """Points ``x_0, ..., x_N`` of the reduced orbit (shape (N+1, d))."""
    if len(start) != map.dim:
        raise InvalidArgument("dimension mismatch")
    return _kernels.orbit(*map.packed(), np.asarray(start, float), int(N))


def ergodic_average(map: TorusMap, f: TrigPoly, N: int, start: Sequence[float]) -> complex:
    """Birkhoff average ``(1/N) sum_{k<N} f(h^k(start))``."""
    if N < 1:
        raise InvalidArgument("need at least one iteration")
    if f.dim != map.dim or len(start) != map.dim:
        raise InvalidArgument("dimension mismatch")
    if f.is_zero():
        return 0j
    of = np.array([k for k, _ in f.items()], dtype=np.int64)
    ore = np.array([c.real for _, c in f.items()])
    oim = np.array([c.imag for _, c in f.items()])
    if len(f) == 1 and not of.any():
        return complex(ore[0], oim[0])  # constants are exact
    s = _kernels.ergodic_sum(*map.packed(), np.asarray(start, float), of, ore, oim, int(N))
    return s / N


def winding_average(map: TorusMap, coord: int, N: int, start: Sequence[float]) -> float:
    """Average lift increment of coordinate ``coord`` (1-based) over N steps, mod 1."""
    if not 1 <= coord <= map.dim:
        raise InvalidArgument(f"coordinate must be in 1..{map.dim}")
    if N < 1:
        raise InvalidArgument("need at least one iteration")
    s, isum = _kernels.winding_sums(*map.packed(), np.asarray(start, float), coord - 1, int(N))
    return _kernels.py_backend.reduce1(s / N + isum / N)


@dataclass(frozen=True)
class DistalityReport:
    min_distance: float
    horizon: tuple[int, int]

    def to_json(self) -> dict:
        return {"min_distance": self.min_distance, "horizon": list(self.horizon)}


def distality_probe(map: TorusMap, z1: Sequence[float], z2: Sequence[float],
                    N: int) -> DistalityReport:
    """Minimum over ``n in [N/2, N]`` of ``d(h^n z1, h^n z2)`` (max-of-circle metric)."""
    if reduce_point(z1) == reduce_point(z2):
        raise InvalidArgument("distality probe needs two distinct points")
    lo = N // 2
    m = _kernels.distality_min(*map.packed(), np.asarray(z1, float), np.asarray(z2, float),
                               lo, int(N))
    return DistalityReport(float(m), (lo, int(N)))


def collapse_f0(x: float, y: float) -> tuple[float, float]:
    """Plane map that collapses ``{0} x [-1, 1]`` to the origin.

    Identity for ``|x| >= 1`` and outside the diamond ``|y| <= 2 - |x|``;
    injective off the collapsed segment.
    """
    ax = abs(x)
    if ax >= 1:
        return (x, y)
    if abs(y) <= 1:
        return (x, ax * y)
    if 1 <= y <= 2 - ax:
        return (x, ax + 2 * (y - 1))
    if -(2 - ax) <= y <= -1:
        return (x, -ax + 2 * (y + 1))
    return (x, y)
