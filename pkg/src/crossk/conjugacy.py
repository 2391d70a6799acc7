"""Evidence for and against similarity of integer matrices.

Solutions of ``P A = B P`` form a linear space, so both searches run inside
it instead of over all matrices:

* over Z the solutions are a lattice, enumerated inside the entry box
  via an echelon basis, then filtered by ``det P = +-1``;
* over Z/k the solutions of ``M vec(P) = 0 (mod k)`` are read off a Smith
  form of ``M`` and filtered by ``det P`` being a unit mod k. This visits
  every ``P`` in ``GL_d(Z/k)`` that could work, so a negative answer is
  exhaustive.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import gcd
from typing import Sequence

import numpy as np
import sympy

from .errors import InvalidArgument, ResourceLimit
from .fgab import IntMatrix, as_matrix, hermite_normal_form, smith_normal_form

DEFAULT_MODCAP = 16
MODCAP_LIMIT = 64
ENTRY_BOUND_LIMIT = 6
MAX_DIM = 3
MODK_SOLUTION_CAP = 5_000_000
LATTICE_NODE_CAP = 2_000_000


def ji_matrices(m: int, n: int) -> tuple[IntMatrix, IntMatrix]:
    if m == 0 or n == 0:
        raise InvalidArgument("parameters must be nonzero")
    return (IntMatrix([[1, m, 0], [0, 1, n], [0, 0, 1]]),
            IntMatrix([[1, n, 0], [0, 1, m], [0, 0, 1]]))


def _square_pair(A, B) -> tuple[IntMatrix, IntMatrix]:
    A, B = as_matrix(A), as_matrix(B)
    if not A.is_square() or A.shape != B.shape:
        raise InvalidArgument(f"need square matrices of equal size, got {A.shape} and {B.shape}")
    return A, B


def q_similar(A, B) -> bool:
    """Similarity over Q: equal ranks of ``p(A)^j`` and ``p(B)^j`` for each irreducible factor ``p``."""
    A, B = _square_pair(A, B)
    SA, SB = sympy.Matrix(A.tolist()), sympy.Matrix(B.tolist())
    x = sympy.Symbol("x")
    pa, pb = SA.charpoly(x), SB.charpoly(x)
    if pa.as_expr() != pb.as_expr():
        return False
    _, factors = sympy.factor_list(pa.as_expr(), x)
    n = A.rows
    for p, mult in factors:
        coeffs = sympy.Poly(p, x).all_coeffs()
        pA, pB = sympy.zeros(n, n), sympy.zeros(n, n)
        for c in coeffs:  # Horner
            pA = pA * SA + c * sympy.eye(n)
            pB = pB * SB + c * sympy.eye(n)
        MA, MB = sympy.eye(n), sympy.eye(n)
        for _ in range(mult):
            MA, MB = MA * pA, MB * pB
            if MA.rank() != MB.rank():
                return False
    return True


def _intertwiner_system(A: IntMatrix, B: IntMatrix) -> IntMatrix:
    """Matrix ``M`` with ``M vec(P) = vec(P A - B P)`` (row-major ``vec``)."""
    d = A.rows
    rows = []
    for i in range(d):
        for j in range(d):
            row = [0] * (d * d)
            for l in range(d):
                row[i * d + l] += A[l, j]  # (P A)_{ij} = sum_l P_{il} A_{lj}
                row[l * d + j] -= B[i, l]  # (B P)_{ij} = sum_l B_{il} P_{lj}
            rows.append(row)
    return IntMatrix(rows)


def _det_mod(P: np.ndarray, k: int) -> np.ndarray:
    """Determinants mod k of a stack of d x d matrices with d <= 3."""
    d = P.shape[-1]
    if d == 1:
        return P[:, 0, 0] % k
    if d == 2:
        return (P[:, 0, 0] * P[:, 1, 1] - P[:, 0, 1] * P[:, 1, 0]) % k
    a = P[:, 0, 0] * ((P[:, 1, 1] * P[:, 2, 2] - P[:, 1, 2] * P[:, 2, 1]) % k)
    b = P[:, 0, 1] * ((P[:, 1, 0] * P[:, 2, 2] - P[:, 1, 2] * P[:, 2, 0]) % k)
    c = P[:, 0, 2] * ((P[:, 1, 0] * P[:, 2, 1] - P[:, 1, 1] * P[:, 2, 0]) % k)
    return (a - b + c) % k


def _check_dims(A: IntMatrix) -> None:
    if A.rows > MAX_DIM:
        raise ResourceLimit(f"searches are limited to d <= {MAX_DIM}")


def modk_witness(A, B, k: int, cap: int = DEFAULT_MODCAP) -> IntMatrix | None:
    """An invertible ``P`` mod k with ``P A = B P (mod k)``, or None after exhausting all candidates."""
    A, B = _square_pair(A, B)
    _check_dims(A)
    if k < 2:
        raise InvalidArgument("modulus must be at least 2")
    if k > cap:
        raise ResourceLimit(f"modulus {k} exceeds the cap {cap}")
    d = A.rows
    snf = smith_normal_form(_intertwiner_system(A, B))
    diag = snf.diagonal() + [0] * (d * d - len(snf.diagonal()))
    steps = [k // gcd(s, k) for s in diag]  # y_i ranges over multiples of steps[i] mod k
    radices = [k // st for st in steps]
    total = int(np.prod(radices, dtype=object))
    V = np.array(snf.V.tolist(), dtype=np.int64) % k
    units = np.array([gcd(u, k) == 1 for u in range(k)])
    chunk = 1 << 16
    for start in range(0, total, chunk):
        if start >= MODK_SOLUTION_CAP:
            raise ResourceLimit(f"solution space mod {k} has {total} elements (cap {MODK_SOLUTION_CAP})")
        idx = np.arange(start, min(total, start + chunk), dtype=np.int64)
        Y = np.empty((len(idx), d * d), dtype=np.int64)
        rem = idx
        for i in range(d * d - 1, -1, -1):
            rem, digit = np.divmod(rem, radices[i])
            Y[:, i] = digit * steps[i]
        X = (Y @ V.T) % k
        P = X.reshape(-1, d, d)
        good = np.flatnonzero(units[_det_mod(P, k)])
        if len(good):
            W = IntMatrix(P[good[0]].tolist())
            if not _verify_mod(W, A, B, k):  # pragma: no cover - defensive
                raise AssertionError("mod-k witness failed verification")
            return W
    return None


def _verify_mod(P: IntMatrix, A: IntMatrix, B: IntMatrix, k: int) -> bool:
    D = P @ A - B @ P
    return all(v % k == 0 for v in D.entries()) and gcd(P.det() % k, k) == 1


def modk_similar(A, B, k: int, cap: int = DEFAULT_MODCAP) -> bool:
    return modk_witness(A, B, k, cap) is not None


@dataclass(frozen=True)
class SimilarityVerdict:
    status: str  # similar | not_similar | inconclusive
    witness: IntMatrix | None = None
    obstruction: dict | None = None
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.status not in ("similar", "not_similar", "inconclusive"):
            raise InvalidArgument(f"unknown status {self.status!r}")

    def __str__(self) -> str:
        if self.status == "similar":
            return f"similar({self.witness.tolist()})"
        if self.status == "not_similar":
            return f"not_similar({self.obstruction})"
        return "inconclusive"

    def to_json(self) -> dict:
        return {"status": self.status,
                "witness": None if self.witness is None else self.witness.to_json(),
                "obstruction": self.obstruction, "metadata": self.metadata}


def _lattice_box_search(basis: list[tuple[int, ...]], bound: int, d: int,
                        node_cap: int) -> tuple[IntMatrix | None, int, bool]:
    """DFS over lattice points with all entries in ``[-bound, bound]``; returns a unimodular one if any.

    ``basis`` rows are in Hermite form (strictly increasing pivots), so each
    coefficient is confined by the pivot entry once the earlier ones are fixed.
    """
    r = len(basis)
    dim = d * d
    pivots = [next(j for j, v in enumerate(row) if v) for row in basis]
    visited = 0
    truncated = False

    def order(lo: int, hi: int):
        # 0, 1, -1, 2, -2, ... restricted to [lo, hi]
        out = []
        for m in range(0, max(abs(lo), abs(hi)) + 1):
            for t in ((m,) if m == 0 else (m, -m)):
                if lo <= t <= hi:
                    out.append(t)
        return out

    def ceil_div(a, b):
        return -((-a) // b)

    def rec(level: int, vec: list[int]):
        nonlocal visited, truncated
        if truncated:
            return None
        visited += 1
        if visited > node_cap:
            truncated = True
            return None
        if level == r:
            if all(abs(v) <= bound for v in vec):
                P = IntMatrix([vec[i * d:(i + 1) * d] for i in range(d)])
                if abs(P.det()) == 1:
                    return P
            return None
        row, p = basis[level], pivots[level]
        # entries before this pivot are final (later rows vanish there)
        if any(abs(vec[j]) > bound for j in range(pivots[level - 1] + 1 if level else 0, p)):
            return None
        c = row[p]
        lo = ceil_div(-bound - vec[p], c) if c > 0 else ceil_div(bound - vec[p], c)
        hi = (bound - vec[p]) // c if c > 0 else (-bound - vec[p]) // c
        for t in order(lo, hi):
            found = rec(level + 1, [v + t * w for v, w in zip(vec, row)])
            if found is not None:
                return found
        return None

    W = rec(0, [0] * dim)
    return W, visited, truncated


def z_similar_bounded(A, B, entry_bound: int = 3, modcap: int = DEFAULT_MODCAP,
                      node_cap: int = LATTICE_NODE_CAP) -> SimilarityVerdict:
    """Search for unimodular ``P`` with ``P A = B P`` and entries in ``[-bound, bound]``.

    Without a witness, rational invariants and then ``k = 2..modcap`` are
    tried for an obstruction; otherwise the verdict is inconclusive.
    """
    A, B = _square_pair(A, B)
    _check_dims(A)
    if not 0 <= entry_bound <= ENTRY_BOUND_LIMIT:
        raise ResourceLimit(f"entry bound must lie in [0, {ENTRY_BOUND_LIMIT}]")
    if not 2 <= modcap <= MODCAP_LIMIT:
        raise ResourceLimit(f"modulus cap must lie in [2, {MODCAP_LIMIT}]")
    d = A.rows
    meta = {"entry_bound": entry_bound, "modcap": modcap, "convention": "P A = B P"}
    M = _intertwiner_system(A, B)
    snf = smith_normal_form(M)
    rank = sum(1 for s in snf.diagonal() if s)
    kernel = [tuple(snf.V[i, j] for i in range(d * d)) for j in range(rank, d * d)]
    meta["solution_lattice_rank"] = len(kernel)
    if kernel:
        basis = hermite_normal_form(kernel, d * d)
        W, visited, truncated = _lattice_box_search(basis, entry_bound, d, node_cap)
        meta.update(lattice_nodes=visited, lattice_search_truncated=truncated)
        if W is not None:
            if W @ A != B @ W or abs(W.det()) != 1:  # pragma: no cover - defensive
                raise AssertionError("witness failed verification")
            return SimilarityVerdict("similar", W, None, meta)
    if not q_similar(A, B):
        return SimilarityVerdict("not_similar", None, {"kind": "rational-invariant mismatch"}, meta)
    checked = []
    for k in range(2, modcap + 1):
        if modk_witness(A, B, k, cap=modcap) is None:
            meta["moduli_checked"] = checked + [k]
            return SimilarityVerdict("not_similar", None, {"kind": "modulus", "k": k}, meta)
        checked.append(k)
    meta["moduli_checked"] = checked
    return SimilarityVerdict("inconclusive", None, None, meta)


@dataclass(frozen=True)
class FlipVerdict:
    direct: SimilarityVerdict
    inverse: SimilarityVerdict

    @property
    def status(self) -> str:
        if "similar" in (self.direct.status, self.inverse.status):
            return "flip_similar"
        if self.direct.status == self.inverse.status == "not_similar":
            return "excluded"
        return "undetermined"

    def to_json(self) -> dict:
        return {"status": self.status, "direct": self.direct.to_json(),
                "inverse": self.inverse.to_json()}


def flip_obstruction(A, B, entry_bound: int = 3, modcap: int = DEFAULT_MODCAP) -> FlipVerdict:
    A, B = _square_pair(A, B)
    if abs(B.det()) != 1:
        raise InvalidArgument("the target matrix must be invertible over Z")
    return FlipVerdict(z_similar_bounded(A, B, entry_bound, modcap),
                       z_similar_bounded(A, B.inverse_unimodular(), entry_bound, modcap))


def random_unimodular(rng: np.random.Generator, d: int, steps: int = 2, max_entry: int = 2) -> IntMatrix:
    """Product of a few elementary matrices with entries kept within ``max_entry``."""
    while True:
        P = IntMatrix.identity(d)
        for _ in range(steps):
            i, j = rng.choice(d, size=2, replace=False) if d > 1 else (0, 0)
            E = [[int(a == b) for b in range(d)] for a in range(d)]
            if d > 1:
                E[i][j] = int(rng.choice([-1, 1]))
            elif rng.random() < 0.5:
                E[0][0] = -1
            P = P @ IntMatrix(E)
        if max(abs(v) for v in P.entries()) <= max_entry and \
                max(abs(v) for v in P.inverse_unimodular().entries()) <= max_entry:
            return P
