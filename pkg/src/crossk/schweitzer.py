"""A Banach *-algebra of convergent sequences with a first-order rate.

Elements of ``B_0`` are bounded sequences ``a`` on ``N = {1, 2, ...}`` with
``lambda(a) = lim a(n)`` and ``omega(a) = lim n (a(n) - lambda(a))``; the
norm is ``||a||_inf + ||a||_omega`` with ``||a||_omega = sup n |a(n) - lambda(a)|``.

The representable elements are ``a(n) = lambda + sum_j c_j n^{-j}`` with
finitely many overridden values. This class is closed under the algebra
operations and adjoint, and every norm is computed as a certified interval:
writing ``u = 1/n``, ``|a(n)|^2`` and ``(n |a(n) - lambda|)^2`` are
polynomials in ``u``, monotone on ``(0, u*)`` where ``u*`` is the smallest
modulus of a critical point, so scanning ``n <= 1/u*`` plus the limit at
``u = 0`` gives the exact supremum.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np
from numpy.polynomial import polynomial as P

from .errors import InvalidArgument

SCAN_CAP = 1_000_000
SCAN_CHUNK = 100_000
REL_PAD = 1e-12
ABS_PAD = 1e-15


@dataclass(frozen=True)
class SchweitzerElement:
    lam: complex = 0j
    tail: tuple[complex, ...] = ()
    exceptional: tuple[tuple[int, complex], ...] = ()

    def __post_init__(self):
        tail = [complex(c) for c in self.tail]
        while tail and tail[-1] == 0:
            tail.pop()
        exc = self.exceptional.items() if isinstance(self.exceptional, Mapping) else self.exceptional
        ex = {}
        for n, v in exc:
            if int(n) < 1:
                raise InvalidArgument("exceptional indices must be >= 1")
            ex[int(n)] = complex(v)
        object.__setattr__(self, "lam", complex(self.lam))
        object.__setattr__(self, "tail", tuple(tail))
        object.__setattr__(self, "exceptional", tuple(sorted(ex.items())))

    # constructors
    @classmethod
    def constant(cls, c: complex) -> "SchweitzerElement":
        return cls(c)

    @classmethod
    def unit(cls) -> "SchweitzerElement":
        return cls(1.0)

    @classmethod
    def reciprocal(cls) -> "SchweitzerElement":
        """``a(n) = 1/n``."""
        return cls(0.0, (1.0,))

    # structure
    @property
    def omega(self) -> complex:
        return self.tail[0] if self.tail else 0j

    @property
    def prefix_length(self) -> int:
        return self.exceptional[-1][0] if self.exceptional else 0

    def is_self_adjoint(self) -> bool:
        return (self.lam.imag == 0 and all(c.imag == 0 for c in self.tail)
                and all(v.imag == 0 for _, v in self.exceptional))

    def tail_value(self, n):
        u = 1.0 / np.asarray(n, dtype=float)
        return P.polyval(u, (self.lam,) + self.tail)

    def __call__(self, n: int) -> complex:
        return evaluate(self, n)

    def values(self, ns) -> np.ndarray:
        ns = np.asarray(ns, dtype=np.int64)
        out = np.asarray(self.tail_value(ns), dtype=complex).copy()
        for n, v in self.exceptional:
            out[ns == n] = v
        return out

    # algebra
    def _pointwise(self, other: "SchweitzerElement", op) -> dict[int, complex]:
        keys = {n for n, _ in self.exceptional} | {n for n, _ in other.exceptional}
        return {n: op(evaluate(self, n), evaluate(other, n)) for n in keys}

    def __add__(self, other) -> "SchweitzerElement":
        other = _coerce(other)
        k = max(len(self.tail), len(other.tail))
        a = self.tail + (0j,) * (k - len(self.tail))
        b = other.tail + (0j,) * (k - len(other.tail))
        return SchweitzerElement(self.lam + other.lam, tuple(x + y for x, y in zip(a, b)),
                                 self._pointwise(other, lambda x, y: x + y))

    __radd__ = __add__

    def __neg__(self) -> "SchweitzerElement":
        return SchweitzerElement(-self.lam, tuple(-c for c in self.tail),
                                 tuple((n, -v) for n, v in self.exceptional))

    def __sub__(self, other) -> "SchweitzerElement":
        return self + (-_coerce(other))

    def __rsub__(self, other) -> "SchweitzerElement":
        return _coerce(other) - self

    def __mul__(self, other) -> "SchweitzerElement":
        return multiply(self, _coerce(other))

    __rmul__ = __mul__

    def adjoint(self) -> "SchweitzerElement":
        return SchweitzerElement(self.lam.conjugate(), tuple(c.conjugate() for c in self.tail),
                                 tuple((n, v.conjugate()) for n, v in self.exceptional))

    def to_json(self) -> dict:
        cj = lambda z: [z.real, z.imag]
        return {"lambda": cj(self.lam), "tail": [cj(c) for c in self.tail],
                "exceptional": [[n, cj(v)] for n, v in self.exceptional]}

    @classmethod
    def from_json(cls, obj) -> "SchweitzerElement":
        def z(v):
            return complex(v[0], v[1]) if isinstance(v, (list, tuple)) else complex(v)
        try:
            return cls(z(obj.get("lambda", 0)), tuple(z(c) for c in obj.get("tail", ())),
                       tuple((int(n), z(v)) for n, v in obj.get("exceptional", ())))
        except (TypeError, ValueError, AttributeError) as exc:
            raise InvalidArgument(f"bad sequence element: {exc}") from None


def _coerce(x) -> SchweitzerElement:
    if isinstance(x, SchweitzerElement):
        return x
    if isinstance(x, (int, float, complex)):
        return SchweitzerElement(x)
    raise InvalidArgument(f"cannot combine with {type(x).__name__}")


def evaluate(a: SchweitzerElement, n: int) -> complex:
    if int(n) != n or n < 1:
        raise InvalidArgument("sequences are indexed by n >= 1")
    for m, v in a.exceptional:
        if m == n:
            return v
    return complex(a.tail_value(int(n)))


def multiply(a: SchweitzerElement, b: SchweitzerElement) -> SchweitzerElement:
    prod = P.polymul((a.lam,) + a.tail, (b.lam,) + b.tail) if (a.tail or b.tail) \
        else np.array([a.lam * b.lam])
    prod = [complex(c) for c in np.atleast_1d(prod)]
    # keep the first-order term in the derivation form
    if len(prod) > 1:
        prod[1] = a.lam * b.omega + a.omega * b.lam
    prod[0] = a.lam * b.lam
    return SchweitzerElement(prod[0], tuple(prod[1:]), a._pointwise(b, lambda x, y: x * y))


# ---- certified suprema ----------------------------------------------------

@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float

    @property
    def width(self) -> float:
        return self.hi - self.lo

    def __add__(self, other: "Interval") -> "Interval":
        return Interval(self.lo + other.lo, self.hi + other.hi)

    def contains(self, x: float) -> bool:
        return self.lo <= x <= self.hi

    def to_json(self) -> dict:
        return {"lo": self.lo, "hi": self.hi, "width": self.width}


def _abs_sq_poly(coeffs: Sequence[complex]) -> np.ndarray:
    c = np.asarray(coeffs, dtype=complex)
    return np.real(P.polymul(c, np.conj(c)))


def _monotone_from(coeffs: Sequence[complex]) -> float | None:
    """Smallest modulus of a nonzero critical point of ``|poly(u)|^2``, or None if constant."""
    q = _abs_sq_poly(coeffs)
    dq = P.polyder(q) if len(q) > 1 else np.zeros(1)
    nz = np.flatnonzero(dq)
    if len(nz) == 0:
        return None
    dq = dq[nz[0]:]  # strip the u^m factor; u = 0 is the limit point, not a turn
    roots = P.polyroots(dq) if len(dq) > 1 else np.array([])
    roots = roots[np.abs(roots) > 0]
    return float(np.abs(roots).min()) if len(roots) else math.inf


def _weighted_values(a: SchweitzerElement, ns: np.ndarray) -> np.ndarray:
    """``n (a(n) - lambda)`` without cancellation: ``sum_j c_j / n^j`` off the exceptional set."""
    u = 1.0 / ns.astype(float)
    out = np.asarray(P.polyval(u, a.tail if a.tail else (0j,)), dtype=complex).copy()
    for n, v in a.exceptional:
        out[ns == n] = n * (v - a.lam)
    return out


def _scan_sup(a: SchweitzerElement, weight: bool, start: int, stop: int,
              want_min: bool = False) -> float:
    best = math.inf if want_min else 0.0
    for lo in range(start, stop + 1, SCAN_CHUNK):
        ns = np.arange(lo, min(stop, lo + SCAN_CHUNK - 1) + 1, dtype=np.int64)
        if len(ns) == 0:
            break
        vals = np.abs(_weighted_values(a, ns)) if weight else np.abs(a.values(ns))
        best = min(best, float(vals.min())) if want_min else max(best, float(vals.max()))
    return best


def _tail_start(coeffs, prefix: int) -> tuple[int, bool]:
    """Index ``M`` past which the tail is monotone; ``(M, exact)``."""
    r = _monotone_from(coeffs)
    if r is None:
        return prefix + 1, True
    need = prefix + 1 if math.isinf(r) else max(prefix + 1, int(math.floor(1.0 / r)) + 2)
    if need > SCAN_CAP:
        return SCAN_CAP, False
    return need, True


def _pad(x: float) -> float:
    return x * (1 + REL_PAD) + ABS_PAD


def sup_interval(a: SchweitzerElement) -> Interval:
    coeffs = (a.lam,) + a.tail
    M, exact = _tail_start(coeffs, a.prefix_length)
    scan = _scan_sup(a, False, 1, M)
    lo = max(scan, abs(a.lam))
    if exact:
        return Interval(lo, _pad(lo))
    bound = abs(a.lam) + sum(abs(c) / M ** (j + 1) for j, c in enumerate(a.tail))
    return Interval(lo, _pad(max(lo, bound)))


def omega_interval(a: SchweitzerElement) -> Interval:
    if not a.tail and not a.exceptional:
        return Interval(0.0, 0.0)
    coeffs = a.tail if a.tail else (0j,)
    M, exact = _tail_start(coeffs, a.prefix_length)
    scan = _scan_sup(a, True, 1, M)
    lo = max(scan, abs(a.omega))
    if exact:
        return Interval(lo, _pad(lo))
    bound = abs(a.omega) + sum(abs(c) / M ** j for j, c in enumerate(a.tail[1:], start=1))
    return Interval(lo, _pad(max(lo, bound)))


def inf_abs(a: SchweitzerElement) -> float:
    """``inf_n |a(n)|`` (exact up to rounding, same monotonicity argument)."""
    M, exact = _tail_start((a.lam,) + a.tail, a.prefix_length)
    scan = _scan_sup(a, False, 1, M, want_min=True)
    best = min(scan, abs(a.lam))
    if not exact:
        best = min(best, abs(a.lam) - sum(abs(c) / M ** (j + 1) for j, c in enumerate(a.tail)))
    return max(best, 0.0)


@dataclass(frozen=True)
class NormReport:
    sup_norm: Interval
    omega_norm: Interval

    @property
    def total(self) -> Interval:
        return self.sup_norm + self.omega_norm

    def to_json(self) -> dict:
        return {"sup_norm": self.sup_norm.to_json(), "omega_norm": self.omega_norm.to_json(),
                "total": self.total.to_json()}


def norms(a: SchweitzerElement) -> NormReport:
    return NormReport(sup_interval(a), omega_interval(a))


def _scale(a: SchweitzerElement) -> float:
    return abs(a.lam) + sum(abs(c) for c in a.tail) + sum(abs(v) for _, v in a.exceptional)


def is_invertible(a: SchweitzerElement) -> bool:
    """Invertible in ``B_0`` iff the values stay away from 0 (the inverse is then again in ``B_0``)."""
    if a.lam == 0:
        return False
    return inf_abs(a) > 1e-13 * max(_scale(a), 1.0)


def perturb_to_invertible(a: SchweitzerElement, epsilon: float) -> tuple[SchweitzerElement, float]:
    """``(a - alpha 1, alpha)`` with real ``0 < alpha < epsilon`` and the result invertible.

    ``||(a - alpha) - a|| = |alpha|`` since constants have vanishing omega-part.
    """
    if not epsilon > 0:
        raise InvalidArgument("epsilon must be positive")
    golden = (math.sqrt(5) - 1) / 2
    for k in range(1, 200):
        alpha = epsilon * ((k * golden) % 1.0)
        if alpha <= 0:
            continue
        b = a - alpha
        if is_invertible(b):
            return b, alpha
    raise InvalidArgument("no invertible perturbation found")  # pragma: no cover


def finite_spectrum_gap(a: SchweitzerElement) -> float:
    """Lower bound ``|omega(a)|`` on ``||b - a||`` over every finite-spectrum ``b``.

    Such ``b`` is eventually constant, so ``omega(b) = 0`` and
    ``|omega(b - a)| <= ||b - a||_omega``.
    """
    return abs(a.omega)


# ---- functional calculus probe -------------------------------------------

def _schedule(n_max: int) -> list[int]:
    out, p = [], 1
    while p <= n_max:
        out.extend(m * p for m in (1, 2, 5) if m * p <= n_max)
        p *= 10
    return out


@dataclass(frozen=True)
class LimitProbe:
    predicted: complex
    schedule: tuple[int, ...]
    measured: tuple[complex, ...]
    status: str  # converged | divergent | inconclusive
    final_error: float

    def at(self, n: int) -> complex:
        return self.measured[self.schedule.index(n)]

    def to_json(self) -> dict:
        cj = lambda z: [z.real, z.imag]
        return {"predicted": cj(self.predicted) if np.isfinite(self.predicted) else None,
                "schedule": list(self.schedule), "measured": [cj(m) for m in self.measured],
                "status": self.status, "final_error": self.final_error}


def c1_limit_probe(a: SchweitzerElement, f: Callable[[float], float],
                   f_prime: Callable[[float], float], n_max: int = 10 ** 6,
                   tol: float = 1e-3) -> LimitProbe:
    """Compare ``n (f(a(n)) - f(lambda))`` with ``f'(lambda) omega(a)`` along n = 1, 2, 5, 10, ..."""
    if not a.is_self_adjoint():
        raise InvalidArgument("the probe needs a self-adjoint element")
    lam = a.lam.real
    with np.errstate(all="ignore"):
        fp = f_prime(lam)
        predicted = complex(fp * a.omega.real) if np.isfinite(fp) else complex(math.inf)
    sched = _schedule(n_max)
    f_lam = f(lam)
    meas = tuple(complex(n * (f(evaluate(a, n).real) - f_lam)) for n in sched)
    tail = np.array([abs(m) for m in meas[len(meas) // 2:]])
    ns = np.array(sched[len(sched) // 2:], dtype=float)
    growth = np.polyfit(np.log(ns), np.log(np.maximum(tail, 1e-300)), 1)[0] if len(ns) > 1 else 0.0
    if np.isfinite(predicted):
        err = abs(meas[-1] - predicted)
        if err < tol:
            status = "converged"
        elif growth > 0.25 and tail[-1] > 1e2:
            status = "divergent"
        else:
            status = "inconclusive"
    else:
        err = math.inf
        status = "divergent" if growth > 0.25 or tail[-1] > 1e2 else "inconclusive"
    return LimitProbe(predicted, tuple(sched), meas, status, float(err))


# ---- finite-spectrum search -----------------------------------------------

def _exact_value(a: SchweitzerElement, n: int) -> Fraction:
    v = evaluate(a, n)
    if v.imag != 0:
        raise InvalidArgument("the search needs a real-valued element")
    for m, w in a.exceptional:
        if m == n:
            return Fraction(w.real)
    return Fraction(a.lam.real) + sum(Fraction(c.real) / Fraction(n) ** (j + 1)
                                      for j, c in enumerate(a.tail))


def finite_spectrum_search(a: SchweitzerElement, prefix_max: int = 6, step=Fraction(1, 20),
                           lo=-1, hi=2) -> dict:
    """Exact minimum of ``||b - a||`` over eventually constant ``b`` with grid values.

    ``b(n) = v_n`` for ``n <= P`` and ``b(n) = mu`` for ``n > P``, all
    values in ``{lo, lo + step, ..., hi}`` and ``P <= prefix_max``. For
    fixed ``(P, mu)`` the norm is ``max(sup-part) + max(omega-part)`` with
    independent per-position choices, so it is minimized exactly by
    sweeping a threshold on the sup-part. The tail ``n > P`` is handled in
    closed form; it needs ``a`` to have no exceptional values beyond ``P``
    and a tail ``lambda + c_1/n`` only.
    """
    step, lo, hi = Fraction(step), Fraction(lo), Fraction(hi)
    if a.lam.imag or any(c.imag for c in a.tail) or len(a.tail) > 1:
        raise InvalidArgument("search implemented for real a(n) = lambda + c/n (+ prefix)")
    lam = Fraction(a.lam.real)
    c1 = Fraction(a.omega.real)
    grid = [lo + k * step for k in range(int((hi - lo) / step) + 1)]
    best = None
    for Pn in range(max(0, a.prefix_length), prefix_max + 1):
        av = {n: _exact_value(a, n) for n in range(1, Pn + 1)}
        for mu in grid:
            # b - a on the tail equals (mu - lam) - c1/n; its limit is mu - lam
            lim = mu - lam
            tail_sup = max(abs(lim - c1 / (Pn + 1)), abs(lim))
            tail_om = abs(c1)  # n |(mu - lam - c1/n) - (mu - lam)| = |c1|
            positions = []
            for n in range(1, Pn + 1):
                opts = sorted((abs(v - av[n]), n * abs(v - av[n] - lim)) for v in grid)
                keys = [o[0] for o in opts]
                running, mins = None, []
                for _, w in opts:
                    running = w if running is None or w < running else running
                    mins.append(running)
                positions.append((keys, mins))
            thresholds = sorted({tail_sup} | {k for keys, _ in positions for k in keys
                                              if k >= tail_sup})
            for T in thresholds:
                om = tail_om
                for keys, mins in positions:
                    i = bisect_right(keys, T)
                    if i == 0:
                        break
                    om = max(om, mins[i - 1])
                else:
                    total = T + om
                    if best is None or total < best[0]:
                        best = (total, Pn, mu, T, om)
    total, Pn, mu, T, om = best
    return {"min_norm": total, "prefix_length": Pn, "mu": mu, "sup_part": T,
            "omega_part": om, "grid_step": step, "range": (lo, hi), "prefix_max": prefix_max}


def brute_force_search(a: SchweitzerElement, prefix_max: int, grid: Sequence[Fraction]) -> Fraction:
    """Direct enumeration (small cases only) of the same minimum; used for cross-checks."""
    from itertools import product

    lam = Fraction(a.lam.real)
    c1 = Fraction(a.omega.real)
    best = None
    for Pn in range(max(0, a.prefix_length), prefix_max + 1):
        av = [_exact_value(a, n) for n in range(1, Pn + 1)]
        for mu in grid:
            lim = mu - lam
            for vs in product(grid, repeat=Pn):
                sup = max([abs(v - x) for v, x in zip(vs, av)] + [abs(lim - c1 / (Pn + 1)), abs(lim)])
                om = max([n * abs(v - x - lim) for n, (v, x) in enumerate(zip(vs, av), start=1)]
                         + [abs(c1)])
                if best is None or sup + om < best:
                    best = sup + om
    return best


# ---- property battery ------------------------------------------------------

def random_element(rng: np.random.Generator, self_adjoint: bool = False, max_j: int = 4,
                   max_prefix: int = 5, bound: float = 2.0) -> SchweitzerElement:
    def z():
        re = rng.uniform(-bound, bound)
        return complex(re, 0.0 if self_adjoint else rng.uniform(-bound, bound))

    J = int(rng.integers(0, max_j + 1))
    N0 = int(rng.integers(0, max_prefix + 1))
    exc = {n: z() for n in range(1, N0 + 1) if rng.random() < 0.5}
    return SchweitzerElement(z(), tuple(z() for _ in range(J)), exc)


@dataclass
class SuiteResult:
    cases: int
    seed: int
    checks: dict = field(default_factory=dict)
    violations: dict = field(default_factory=dict)
    counterexamples: list = field(default_factory=list)
    extras: dict = field(default_factory=dict)

    def record(self, name: str, ok: bool, dump=None) -> None:
        self.checks[name] = self.checks.get(name, 0) + 1
        if not ok:
            self.violations[name] = self.violations.get(name, 0) + 1
            if dump is not None and len(self.counterexamples) < 20:
                self.counterexamples.append({"property": name, **dump})

    @property
    def passed(self) -> bool:
        return not self.violations and all(v.get("pass", True) for v in self.extras.values())

    def to_json(self) -> dict:
        return {"cases": self.cases, "seed": self.seed, "passed": self.passed,
                "checks": self.checks, "violations": self.violations,
                "counterexamples": self.counterexamples, "extras": self.extras}


def run_suite(cases: int = 1000, seed: int = 0, search_prefix: int = 6) -> SuiteResult:
    """Norm inequalities on random pairs plus the fixed finite-spectrum and probe checks.

    Inequalities ``x <= y`` are tested as ``lower(x) <= upper(y)``.
    """
    res = SuiteResult(cases, seed)
    for child in np.random.SeedSequence(seed).spawn(cases):
        rng = np.random.default_rng(child)
        sa = bool(rng.random() < 0.5)
        a, b = random_element(rng, sa), random_element(rng, sa)
        ab = a * b
        na, nb, nab, nas = norms(a), norms(b), norms(ab), norms(a.adjoint())
        dump = {"a": a.to_json(), "b": b.to_json()}
        sa_, wa = na.sup_norm, na.omega_norm
        sb_, wb = nb.sup_norm, nb.omega_norm
        res.record("basic_estimate", nab.omega_norm.lo <= sa_.hi * wb.hi + wa.hi * sb_.hi, dump)
        res.record("sup_submultiplicative", nab.sup_norm.lo <= sa_.hi * sb_.hi, dump)
        res.record("submultiplicative", nab.total.lo <= na.total.hi * nb.total.hi, dump)
        res.record("adjoint_isometry", nas.total.lo <= na.total.hi and na.total.lo <= nas.total.hi,
                   dump)
        res.record("lambda_multiplicative", ab.lam == a.lam * b.lam, dump)
        res.record("omega_derivation", ab.omega == a.lam * b.omega + a.omega * b.lam, dump)
        res.record("interval_width", max(nab.total.width, na.total.width) <= 1e-9 * max(
            1.0, nab.total.hi, na.total.hi), dump)
    unit = norms(SchweitzerElement.unit()).total
    res.record("unit_norm", unit.contains(1.0), {"interval": unit.to_json()})
    rec = SchweitzerElement.reciprocal()
    gap = finite_spectrum_gap(rec)
    search = finite_spectrum_search(rec, prefix_max=search_prefix)
    res.extras["finite_spectrum_gap"] = {"value": gap, "pass": gap == 1.0}
    res.extras["finite_spectrum_search"] = {"min_norm": str(search["min_norm"]),
                                            "prefix_max": search_prefix,
                                            "grid_step": str(search["grid_step"]),
                                            "pass": search["min_norm"] >= 1}
    sq = c1_limit_probe(SchweitzerElement(1.0, (1.0,)), lambda x: x * x, lambda x: 2 * x)
    res.extras["c1_square"] = {"predicted": sq.predicted.real, "at_1e4": sq.at(10 ** 4).real,
                               "status": sq.status,
                               "pass": abs(sq.at(10 ** 4) - 2) < 1e-3}
    rt = c1_limit_probe(rec, math.sqrt, lambda x: 0.5 / math.sqrt(x) if x > 0 else math.inf)
    res.extras["c1_sqrt"] = {"at_1e6": rt.measured[-1].real, "status": rt.status,
                             "pass": rt.status == "divergent" and rt.measured[-1].real > 1e2}
    return res
