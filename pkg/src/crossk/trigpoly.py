"""Trigonometric polynomials on the torus (R/Z)^d.

``f(x) = sum_k c_k exp(2 pi i <k, x>)`` with finitely many nonzero ``c_k``.
Derivatives are ordinary partials ``D_j`` in the coordinates ``x_j``, so
``D_j exp(2 pi i <k, x>) = 2 pi i k_j exp(2 pi i <k, x>)``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np
from scipy.optimize import minimize

from .errors import InvalidArgument

TWO_PI = 2.0 * math.pi
Freq = tuple[int, ...]


def default_grid(d: int) -> int:
    """Grid points per dimension for sup norms."""
    if d <= 2:
        return 1 << 10
    if d == 3:
        return 1 << 5
    return 1 << 3


class TrigPoly:
    __slots__ = ("dim", "_coeffs")

    def __init__(self, dim: int, coeffs: Mapping[Sequence[int], complex] | Iterable = (),
                 real: bool = False, tol: float = 1e-12):
        if dim < 1:
            raise InvalidArgument("dimension must be positive")
        items = coeffs.items() if isinstance(coeffs, Mapping) else coeffs
        data: dict[Freq, complex] = {}
        for k, c in items:
            k = tuple(int(x) for x in k)
            if len(k) != dim:
                raise InvalidArgument(f"frequency {k} has wrong dimension (expected {dim})")
            data[k] = data.get(k, 0j) + complex(c)
        self.dim = dim
        self._coeffs = {k: c for k, c in data.items() if c != 0}
        if real and not self.is_real(tol):
            raise InvalidArgument("coefficients violate c(-k) = conj(c(k)) for a real polynomial")

    # constructors
    @classmethod
    def constant(cls, dim: int, c: complex = 1.0) -> "TrigPoly":
        return cls(dim, {(0,) * dim: c})

    @classmethod
    def zero(cls, dim: int) -> "TrigPoly":
        return cls(dim, {})

    @classmethod
    def character(cls, freq: Sequence[int], c: complex = 1.0) -> "TrigPoly":
        return cls(len(freq), {tuple(freq): c})

    @classmethod
    def cos(cls, dim: int, coord: int, amplitude: float = 1.0, freq: int = 1) -> "TrigPoly":
        """``amplitude * cos(2 pi freq x_coord)`` (0-based coordinate)."""
        k = [0] * dim
        k[coord] = freq
        km = [0] * dim
        km[coord] = -freq
        return cls(dim, {tuple(k): amplitude / 2, tuple(km): amplitude / 2})

    @classmethod
    def sin(cls, dim: int, coord: int, amplitude: float = 1.0, freq: int = 1) -> "TrigPoly":
        k = [0] * dim
        k[coord] = freq
        km = [0] * dim
        km[coord] = -freq
        return cls(dim, {tuple(k): amplitude / 2j, tuple(km): -amplitude / 2j})

    # basic access
    @property
    def coeffs(self) -> dict[Freq, complex]:
        return dict(self._coeffs)

    def items(self):
        return sorted(self._coeffs.items())

    def coeff(self, k: Sequence[int]) -> complex:
        return self._coeffs.get(tuple(k), 0j)

    def __len__(self) -> int:
        return len(self._coeffs)

    def is_zero(self) -> bool:
        return not self._coeffs

    def is_real(self, tol: float = 1e-12) -> bool:
        for k, c in self._coeffs.items():
            neg = tuple(-x for x in k)
            if abs(self._coeffs.get(neg, 0j) - c.conjugate()) > tol * max(1.0, abs(c)):
                return False
        return True

    def depends_on(self) -> set[int]:
        """0-based coordinates that occur with nonzero frequency."""
        return {j for k in self._coeffs for j, x in enumerate(k) if x}

    def max_frequency(self) -> int:
        return max((abs(x) for k in self._coeffs for x in k), default=0)

    def l1_norm(self) -> float:
        return math.fsum(abs(c) for c in self._coeffs.values())

    def __repr__(self) -> str:
        return f"TrigPoly({self.dim}, {dict(self.items())!r})"

    # algebra
    def _check(self, other: "TrigPoly") -> None:
        if self.dim != other.dim:
            raise InvalidArgument(f"dimension mismatch {self.dim} vs {other.dim}")

    def __add__(self, other: "TrigPoly") -> "TrigPoly":
        self._check(other)
        out = dict(self._coeffs)
        for k, c in other._coeffs.items():
            out[k] = out.get(k, 0j) + c
        return TrigPoly(self.dim, out)

    def __neg__(self) -> "TrigPoly":
        return TrigPoly(self.dim, {k: -c for k, c in self._coeffs.items()})

    def __sub__(self, other: "TrigPoly") -> "TrigPoly":
        return self + (-other)

    def __mul__(self, other) -> "TrigPoly":
        if isinstance(other, TrigPoly):
            self._check(other)
            out: dict[Freq, complex] = {}
            for k1, c1 in self._coeffs.items():
                for k2, c2 in other._coeffs.items():
                    k = tuple(a + b for a, b in zip(k1, k2))
                    out[k] = out.get(k, 0j) + c1 * c2
            return TrigPoly(self.dim, out)
        c = complex(other)
        return TrigPoly(self.dim, {k: c * v for k, v in self._coeffs.items()})

    __rmul__ = __mul__

    def conj(self) -> "TrigPoly":
        """Pointwise complex conjugate."""
        return TrigPoly(self.dim, {tuple(-x for x in k): c.conjugate()
                                   for k, c in self._coeffs.items()})

    def derivative(self, coord: int, order: int = 1) -> "TrigPoly":
        return TrigPoly(self.dim, {k: c * (2j * math.pi * k[coord]) ** order
                                   for k, c in self._coeffs.items()})

    def compose_affine(self, translation: Sequence[float], linear) -> "TrigPoly":
        """``x -> f(t + L x)`` for an integer matrix ``L`` (exact in frequencies).

        ``exp(2 pi i <k, t + L x>) = exp(2 pi i <k, t>) exp(2 pi i <L^T k, x>)``.
        """
        d = self.dim
        L = np.asarray(linear.tolist() if hasattr(linear, "tolist") else linear, dtype=np.int64)
        if L.shape != (d, d):
            raise InvalidArgument(f"linear part must be {d}x{d}")
        Lt = L.T.tolist()
        out: dict[Freq, complex] = {}
        for k, c in self._coeffs.items():
            phase = cmath.exp(2j * math.pi * math.fsum(a * b for a, b in zip(k, translation)))
            k2 = tuple(sum(Lt[i][j] * k[j] for j in range(d)) for i in range(d))
            out[k2] = out.get(k2, 0j) + c * phase
        return TrigPoly(d, out)

    def allclose(self, other: "TrigPoly", tol: float = 1e-9) -> bool:
        self._check(other)
        keys = set(self._coeffs) | set(other._coeffs)
        return all(abs(self.coeff(k) - other.coeff(k)) <= tol for k in keys)

    # evaluation
    def __call__(self, x) -> complex | np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.dim:
            raise InvalidArgument("point dimension mismatch")
        if not self._coeffs:
            return np.zeros(x.shape[:-1], dtype=complex) if x.ndim > 1 else 0j
        ks = np.array(list(self._coeffs.keys()), dtype=float)
        cs = np.array(list(self._coeffs.values()), dtype=complex)
        phase = np.exp(2j * np.pi * (x @ ks.T))
        val = phase @ cs
        return complex(val) if np.ndim(val) == 0 else val

    def gradient_at(self, x) -> np.ndarray:
        ks = np.array(list(self._coeffs.keys()), dtype=float)
        cs = np.array(list(self._coeffs.values()), dtype=complex)
        phase = np.exp(2j * np.pi * (np.asarray(x, float) @ ks.T))
        return (phase * cs) @ (2j * np.pi * ks)

    def grid_values(self, grid: int) -> np.ndarray:
        """Values on the uniform grid ``(i_1/G, ..., i_d/G)`` via inverse FFT (exact up to rounding)."""
        arr = np.zeros((grid,) * self.dim, dtype=complex)
        for k, c in self._coeffs.items():
            arr[tuple(x % grid for x in k)] += c
        return np.fft.ifftn(arr) * grid ** self.dim

    def sup_norm(self, grid: int | None = None, refine: bool = True) -> "SupEstimate":
        return sup_norm(self, grid, refine)

    # serialization
    def to_json(self) -> dict:
        return {"dimension": self.dim,
                "terms": [[list(k), [c.real, c.imag]] for k, c in self.items()]}

    @classmethod
    def from_json(cls, obj, real: bool = False) -> "TrigPoly":
        try:
            dim = int(obj["dimension"])
            terms = []
            for k, c in obj["terms"]:
                if isinstance(c, (list, tuple)):
                    c = complex(float(c[0]), float(c[1]))
                else:
                    c = complex(float(c))
                terms.append((k, c))
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidArgument(f"bad trigonometric polynomial: {exc}") from None
        return cls(dim, terms, real=real)


@dataclass(frozen=True)
class SupEstimate:
    """Sup norm estimate: ``value`` is the best lower estimate found,
    ``upper`` a certified upper bound, ``grid`` the grid size per dimension."""

    value: float
    grid_max: float
    upper: float
    grid: int

    def to_json(self) -> dict:
        return {"value": self.value, "grid_max": self.grid_max, "upper": self.upper,
                "grid": self.grid}


def sup_norm(f: TrigPoly, grid: int | None = None, refine: bool = True,
             n_starts: int = 8) -> SupEstimate:
    if f.is_zero():
        return SupEstimate(0.0, 0.0, 0.0, grid or 0)
    d = f.dim
    G = grid or default_grid(d)
    vals = np.abs(f.grid_values(G))
    gmax = float(vals.max())
    # |f(x) - f(x_grid)| <= sum_j ||D_j f||_inf / (2G)
    lip = math.fsum(abs(c) * TWO_PI * sum(abs(x) for x in k) for k, c in f.items())
    upper = min(gmax + lip / (2 * G), f.l1_norm())
    best = gmax
    if refine and lip > 0:
        flat = np.argsort(vals, axis=None)[::-1][:n_starts]
        ks = np.array([k for k, _ in f.items()], dtype=float)
        cs = np.array([c for _, c in f.items()], dtype=complex)

        def neg_sq(x):
            ph = np.exp(2j * np.pi * (ks @ x)) * cs
            v = ph.sum()
            grad = 2.0 * np.real(np.conj(v) * (ph @ (2j * np.pi * ks)))
            return -abs(v) ** 2, -grad

        for idx in flat:
            x0 = np.array(np.unravel_index(idx, vals.shape), dtype=float) / G
            res = minimize(neg_sq, x0, jac=True, method="BFGS",
                           options={"gtol": 1e-13, "maxiter": 200})
            cand = math.sqrt(max(-float(res.fun), 0.0))
            if cand > best:
                best = cand
    best = min(best, upper)
    return SupEstimate(best, gmax, max(upper, best), G)


def word_count(n: int, d: int) -> dict[tuple[int, ...], int]:
    """Multiplicity of each multi-index among the ``d**n`` derivation words of length n.

    Coordinate derivations commute, so a word only matters through its
    multi-index; the multiplicity is the multinomial coefficient.
    """
    counts: dict[tuple[int, ...], int] = {}

    def rec(prefix: list[int], left: int) -> None:
        if len(prefix) == d - 1:
            alpha = tuple(prefix + [left])
            c = math.factorial(n)
            for a in alpha:
                c //= math.factorial(a)
            counts[alpha] = c
            return
        for a in range(left + 1):
            rec(prefix + [a], left - a)

    rec([], n)
    return counts
