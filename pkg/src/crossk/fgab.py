"""Exact integer linear algebra and finitely generated abelian groups.

Convention used throughout the package: an ``m x n`` matrix ``A`` is the
homomorphism ``Z^n -> Z^m`` acting on column vectors (``x -> A x``).
So ``cokernel(A) = Z^m / A Z^n`` and ``kernel_rank(A) = n - rank(A)``.

All arithmetic is on Python ints, so nothing overflows.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import combinations
from math import gcd
from typing import Iterable, Sequence

from .errors import InvalidArgument

COLUMN_MAP_CONVENTION = "A: Z^cols -> Z^rows acting on column vectors"


class IntMatrix:
    """Immutable integer matrix with exact arithmetic."""

    __slots__ = ("rows", "cols", "_data")

    def __init__(self, data: Iterable[Iterable[int]] = (), rows: int | None = None,
                 cols: int | None = None):
        data = tuple(tuple(int(x) for x in row) for row in data)
        nr = len(data) if rows is None else rows
        if cols is None:
            nc = len(data[0]) if data else 0
        else:
            nc = cols
        if len(data) != nr and not (len(data) == 0 and nc == 0):
            raise InvalidArgument(f"expected {nr} rows, got {len(data)}")
        if len(data) == 0:
            data = tuple(() for _ in range(nr)) if nc == 0 else tuple((0,) * nc for _ in range(nr))
        for row in data:
            if len(row) != nc:
                raise InvalidArgument("ragged matrix rows")
        self.rows = nr
        self.cols = nc
        self._data = data

    # construction helpers
    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls(((1 if i == j else 0) for j in range(n)) for i in range(n))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "IntMatrix":
        return cls((((0,) * cols) for _ in range(rows)), rows=rows, cols=cols)

    @classmethod
    def diag(cls, values: Sequence[int], rows: int | None = None,
             cols: int | None = None) -> "IntMatrix":
        r = len(values) if rows is None else rows
        c = len(values) if cols is None else cols
        out = [[0] * c for _ in range(r)]
        for i, v in enumerate(values):
            out[i][i] = v
        return cls(out, rows=r, cols=c)

    @classmethod
    def block_diag(cls, blocks: Sequence["IntMatrix"]) -> "IntMatrix":
        r = sum(b.rows for b in blocks)
        c = sum(b.cols for b in blocks)
        out = [[0] * c for _ in range(r)]
        i0 = j0 = 0
        for b in blocks:
            for i in range(b.rows):
                for j in range(b.cols):
                    out[i0 + i][j0 + j] = b[i, j]
            i0 += b.rows
            j0 += b.cols
        return cls(out, rows=r, cols=c)

    # access
    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def __getitem__(self, idx: tuple[int, int]) -> int:
        i, j = idx
        return self._data[i][j]

    def row(self, i: int) -> tuple[int, ...]:
        return self._data[i]

    def column(self, j: int) -> tuple[int, ...]:
        return tuple(r[j] for r in self._data)

    def tolist(self) -> list[list[int]]:
        return [list(r) for r in self._data]

    def entries(self) -> tuple[int, ...]:
        """Row-major entries."""
        return tuple(x for r in self._data for x in r)

    def is_square(self) -> bool:
        return self.rows == self.cols

    # arithmetic
    def __eq__(self, other: object) -> bool:
        if not isinstance(other, IntMatrix):
            return NotImplemented
        return self.shape == other.shape and self._data == other._data

    def __hash__(self) -> int:
        return hash((self.rows, self.cols, self._data))

    def __repr__(self) -> str:
        return f"IntMatrix({self.tolist()!r})"

    def __add__(self, other: "IntMatrix") -> "IntMatrix":
        self._check_same_shape(other)
        return IntMatrix(((a + b for a, b in zip(r, s)) for r, s in zip(self._data, other._data)),
                         rows=self.rows, cols=self.cols)

    def __sub__(self, other: "IntMatrix") -> "IntMatrix":
        self._check_same_shape(other)
        return IntMatrix(((a - b for a, b in zip(r, s)) for r, s in zip(self._data, other._data)),
                         rows=self.rows, cols=self.cols)

    def __neg__(self) -> "IntMatrix":
        return IntMatrix(((-a for a in r) for r in self._data), rows=self.rows, cols=self.cols)

    def scale(self, c: int) -> "IntMatrix":
        return IntMatrix(((c * a for a in r) for r in self._data), rows=self.rows, cols=self.cols)

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise InvalidArgument(f"shape mismatch {self.shape} @ {other.shape}")
        cols_b = [other.column(j) for j in range(other.cols)]
        return IntMatrix(((sum(a * b for a, b in zip(r, c)) for c in cols_b) for r in self._data),
                         rows=self.rows, cols=other.cols)

    def apply(self, vec: Sequence) -> list:
        """Matrix times column vector; works for any ring elements supporting * and +."""
        if len(vec) != self.cols:
            raise InvalidArgument("vector length mismatch")
        out = []
        for r in self._data:
            acc = 0
            for a, v in zip(r, vec):
                if a:
                    acc = acc + a * v
            out.append(acc)
        return out

    def __pow__(self, n: int) -> "IntMatrix":
        if not self.is_square():
            raise InvalidArgument("power of a non-square matrix")
        if n < 0:
            return self.inverse_unimodular() ** (-n)
        result = IntMatrix.identity(self.rows)
        base = self
        while n:
            if n & 1:
                result = result @ base
            base = base @ base
            n >>= 1
        return result

    def transpose(self) -> "IntMatrix":
        return IntMatrix(zip(*self._data), rows=self.cols, cols=self.rows) if self.rows else \
            IntMatrix.zeros(self.cols, 0)

    T = property(transpose)

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "IntMatrix":
        return IntMatrix(((self._data[i][j] for j in cols) for i in rows),
                         rows=len(rows), cols=len(cols))

    def det(self) -> int:
        """Determinant by fraction-free Bareiss elimination."""
        if not self.is_square():
            raise InvalidArgument("determinant of a non-square matrix")
        n = self.rows
        if n == 0:
            return 1
        m = [list(r) for r in self._data]
        sign = 1
        prev = 1
        for k in range(n - 1):
            if m[k][k] == 0:
                swap = next((i for i in range(k + 1, n) if m[i][k] != 0), None)
                if swap is None:
                    return 0
                m[k], m[swap] = m[swap], m[k]
                sign = -sign
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
            prev = m[k][k]
        return sign * m[n - 1][n - 1]

    def rank(self) -> int:
        return sum(1 for d in smith_normal_form(self).diagonal() if d != 0)

    def inverse_unimodular(self) -> "IntMatrix":
        """Exact inverse of a square matrix with determinant +1 or -1."""
        d = self.det()
        if d not in (1, -1):
            raise InvalidArgument(f"matrix is not unimodular (det = {d})")
        n = self.rows
        # adjugate / det
        adj = [[0] * n for _ in range(n)]
        idx = list(range(n))
        for i in range(n):
            for j in range(n):
                minor = self.submatrix([r for r in idx if r != j], [c for c in idx if c != i])
                adj[i][j] = (-1) ** (i + j) * minor.det()
        return IntMatrix(([a * d for a in r] for r in adj), rows=n, cols=n)

    def _check_same_shape(self, other: "IntMatrix") -> None:
        if self.shape != other.shape:
            raise InvalidArgument(f"shape mismatch {self.shape} vs {other.shape}")

    # serialization: arrays of decimal strings so big ints survive any JSON reader
    def to_json(self) -> list[list[str]]:
        return [[str(x) for x in r] for r in self._data]

    @classmethod
    def from_json(cls, obj) -> "IntMatrix":
        if isinstance(obj, str):
            obj = json.loads(obj)
        if not isinstance(obj, list) or not all(isinstance(r, list) for r in obj):
            raise InvalidArgument("matrix must be a JSON array of arrays")
        try:
            return cls([int(x) for x in r] for r in obj)
        except (TypeError, ValueError) as exc:
            raise InvalidArgument(f"bad matrix entry: {exc}") from None


def as_matrix(a) -> IntMatrix:
    return a if isinstance(a, IntMatrix) else IntMatrix(a)


@dataclass(frozen=True)
class SnfDecomposition:
    U: IntMatrix
    S: IntMatrix
    V: IntMatrix

    def diagonal(self) -> list[int]:
        return [self.S[i, i] for i in range(min(self.S.rows, self.S.cols))]


def smith_normal_form(A) -> SnfDecomposition:
    """Smith normal form ``U A V = S`` with unimodular ``U``, ``V``.

    Pivots are chosen as the entry of least absolute value in the active
    block, which keeps intermediate entries small.
    """
    A = as_matrix(A)
    m, n = A.shape
    a = A.tolist()
    U = [[int(i == j) for j in range(m)] for i in range(m)]
    V = [[int(i == j) for j in range(n)] for i in range(n)]

    def swap_rows(i, k):
        a[i], a[k] = a[k], a[i]
        U[i], U[k] = U[k], U[i]

    def swap_cols(j, k):
        for r in a:
            r[j], r[k] = r[k], r[j]
        for r in V:
            r[j], r[k] = r[k], r[j]

    def add_row(dst, src, q):  # row_dst += q * row_src
        a[dst] = [x + q * y for x, y in zip(a[dst], a[src])]
        U[dst] = [x + q * y for x, y in zip(U[dst], U[src])]

    def add_col(dst, src, q):  # col_dst += q * col_src
        for r in a:
            r[dst] += q * r[src]
        for r in V:
            r[dst] += q * r[src]

    for t in range(min(m, n)):
        while True:
            best = None
            for i in range(t, m):
                for j in range(t, n):
                    v = a[i][j]
                    if v and (best is None or abs(v) < best[0]):
                        best = (abs(v), i, j)
            if best is None:
                break
            _, i, j = best
            if i != t:
                swap_rows(t, i)
            if j != t:
                swap_cols(t, j)
            p = a[t][t]
            dirty = False
            for i in range(t + 1, m):
                if a[i][t]:
                    add_row(i, t, -(a[i][t] // p))
                    dirty = dirty or a[i][t] != 0
            for j in range(t + 1, n):
                if a[t][j]:
                    add_col(j, t, -(a[t][j] // p))
                    dirty = dirty or a[t][j] != 0
            if dirty:
                continue
            # enforce divisibility of the rest of the block by the pivot
            bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n)
                        if a[i][j] % p), None)
            if bad is None:
                break
            add_row(t, bad[0], 1)
        if t < m and t < n and a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            U[t] = [-x for x in U[t]]
        if best is None:
            break
    return SnfDecomposition(IntMatrix(U, rows=m, cols=m), IntMatrix(a, rows=m, cols=n),
                            IntMatrix(V, rows=n, cols=n))


def hermite_normal_form(rows: Iterable[Sequence[int]], ncols: int) -> list[tuple[int, ...]]:
    """Row-style Hermite normal form of the lattice spanned by ``rows``.

    Returned rows are nonzero, pivot columns strictly increase, pivots are
    positive and entries above each pivot lie in ``[0, pivot)``. The result
    depends only on the lattice, not on the generating set.
    """
    a = [list(r) for r in rows if any(r)]
    out: list[list[int]] = []
    col = 0
    while a and col < ncols:
        live = [r for r in a if r[col] != 0]
        rest = [r for r in a if r[col] == 0]
        if not live:
            col += 1
            continue
        while len(live) > 1:
            live.sort(key=lambda r: abs(r[col]))
            p = live[0]
            nxt = [p]
            for r in live[1:]:
                q = r[col] // p[col]
                r = [x - q * y for x, y in zip(r, p)]
                if r[col]:
                    nxt.append(r)
                elif any(r):
                    rest.append(r)
            live = nxt
        p = live[0]
        if p[col] < 0:
            p = [-x for x in p]
        out.append(p)
        a = rest
        col += 1
    # reduce entries above pivots
    for k in range(len(out)):
        pc = next(j for j, x in enumerate(out[k]) if x)
        for i in range(k):
            q = out[i][pc] // out[k][pc]
            if q:
                out[i] = [x - q * y for x, y in zip(out[i], out[k])]
    return [tuple(r) for r in out]


@dataclass(frozen=True)
class FgAbGroup:
    """``Z^free_rank (+) Z/d_1 (+) ... (+) Z/d_k`` with ``d_1 | d_2 | ... | d_k``, all ``d_i >= 2``."""

    free_rank: int = 0
    invariant_factors: tuple[int, ...] = ()

    def __post_init__(self):
        if self.free_rank < 0:
            raise InvalidArgument("free rank must be nonnegative")
        facs = tuple(int(d) for d in self.invariant_factors)
        object.__setattr__(self, "invariant_factors", facs)
        for d in facs:
            if d < 2:
                raise InvalidArgument(f"invariant factor {d} < 2; use from_orders to normalize")
        for d1, d2 in zip(facs, facs[1:]):
            if d2 % d1:
                raise InvalidArgument(f"invariant factors {facs} violate the divisibility chain")

    @classmethod
    def from_orders(cls, free_rank: int, orders: Iterable[int]) -> "FgAbGroup":
        """Normalize ``Z^r (+) sum Z/n_i`` for arbitrary cyclic orders ``n_i``.

        An order of 0 contributes a free summand; orders 1 and -1 vanish.
        """
        orders = [abs(int(x)) for x in orders]
        free_rank += sum(1 for x in orders if x == 0)
        torsion = [x for x in orders if x >= 2]
        if not torsion:
            return cls(free_rank, ())
        diag = smith_normal_form(IntMatrix.diag(torsion)).diagonal()
        return cls(free_rank, tuple(d for d in diag if d >= 2))

    @classmethod
    def free(cls, rank: int) -> "FgAbGroup":
        return cls(rank, ())

    @classmethod
    def trivial(cls) -> "FgAbGroup":
        return cls(0, ())

    @property
    def torsion_order(self) -> int:
        out = 1
        for d in self.invariant_factors:
            out *= d
        return out

    def is_trivial(self) -> bool:
        return self.free_rank == 0 and not self.invariant_factors

    def __str__(self) -> str:
        parts = []
        if self.free_rank == 1:
            parts.append("Z")
        elif self.free_rank > 1:
            parts.append(f"Z^{self.free_rank}")
        parts += [f"Z/{d}" for d in self.invariant_factors]
        return " + ".join(parts) if parts else "0"

    def to_json(self) -> dict:
        return {"free_rank": self.free_rank,
                "invariant_factors": [str(d) for d in self.invariant_factors],
                "pretty": str(self)}

    @classmethod
    def from_json(cls, obj: dict) -> "FgAbGroup":
        return cls.from_orders(int(obj.get("free_rank", 0)),
                               [int(d) for d in obj.get("invariant_factors", [])])


def cokernel(A) -> FgAbGroup:
    """``Z^rows / A Z^cols`` in invariant-factor form."""
    A = as_matrix(A)
    diag = smith_normal_form(A).diagonal()
    rank = sum(1 for d in diag if d)
    return FgAbGroup(A.rows - rank, tuple(d for d in diag if d >= 2))


def kernel_rank(A) -> int:
    """Rank of the (free) kernel of ``A: Z^cols -> Z^rows``."""
    A = as_matrix(A)
    return A.cols - A.rank()


def kernel_basis(A) -> IntMatrix:
    """Columns form a Z-basis of ``ker A`` (possibly 0 columns)."""
    A = as_matrix(A)
    snf = smith_normal_form(A)
    r = sum(1 for d in snf.diagonal() if d)
    cols = list(range(r, A.cols))
    return snf.V.submatrix(list(range(A.cols)), cols)


def direct_sum(*groups: FgAbGroup) -> FgAbGroup:
    free = sum(g.free_rank for g in groups)
    return FgAbGroup.from_orders(free, [d for g in groups for d in g.invariant_factors])


def exterior_power(A, k: int) -> IntMatrix:
    """Matrix of ``Lambda^k(A)`` on the lexicographically ordered basis of k-subsets.

    Entry ``(I, J)`` is the minor ``det A[I, J]``, i.e. the coefficient of
    ``e_I`` in ``A e_{j1} ^ ... ^ A e_{jk}``.
    """
    A = as_matrix(A)
    if not A.is_square():
        raise InvalidArgument("exterior power needs a square matrix")
    d = A.rows
    if k < 0 or k > d:
        raise InvalidArgument(f"exterior degree {k} out of range for dimension {d}")
    subsets = list(combinations(range(d), k))
    return IntMatrix(((A.submatrix(I, J).det() for J in subsets) for I in subsets),
                     rows=len(subsets), cols=len(subsets))
