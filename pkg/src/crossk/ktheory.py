"""K-groups of crossed products by Z from the Pimsner-Voiculescu sequence.

For ``A = C*(Z, X, h)`` the six-term sequence splits into

    0 -> coker(id - h*_j) -> K_j(A) -> ker(id - h*_{j+1}) -> 0

and the kernel is a subgroup of a free group, hence free, so the sequence
splits: ``K_0 = coker(id - h*_0) + Z^{rk ker(id - h*_1)}`` and symmetrically
for ``K_1``.

On tori, ``K^*(T^d)`` is identified with the exterior algebra on
``H^1(T^d; Z) = Z^d`` (even degrees give ``K^0``, odd give ``K^1``), and
``h*`` acts by ``Lambda^k(L^T)`` where ``L`` is the integer linear part of
the lift. Translations and perturbations are homotopically trivial and
do not enter.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb

from .errors import InvalidArgument
from .fgab import (COLUMN_MAP_CONVENTION, FgAbGroup, IntMatrix, as_matrix, cokernel,
                   direct_sum, exterior_power, kernel_rank)
from .torus import TorusMap

TRANSPOSE_CONVENTION = ("h* on K^*(T^d) = Lambda(L^T), L = integer linear part of the lift; "
                        "Lambda^1 block = action on H^1 in the dx_1..dx_d basis")
HOMOTOPY_NOTE = "translation and perturbation ignored (homotopy invariance)"
SPLITTING_NOTE = "extensions split: the quotient ker(id - h*) is free"


@dataclass(frozen=True)
class KDatum:
    """Either the matrices of ``h*`` on ``K^0``/``K^1`` or abstract ker/coker data of ``id - h*``."""

    even_action: IntMatrix | None = None
    odd_action: IntMatrix | None = None
    ker0_rank: int | None = None
    coker0: FgAbGroup | None = None
    ker1_rank: int | None = None
    coker1: FgAbGroup | None = None
    notes: tuple[str, ...] = ()

    def __post_init__(self):
        matrix_form = self.even_action is not None or self.odd_action is not None
        abstract_form = any(v is not None for v in
                            (self.ker0_rank, self.coker0, self.ker1_rank, self.coker1))
        if matrix_form == abstract_form:
            raise InvalidArgument("populate exactly one of the matrix form or the abstract form")
        if matrix_form:
            if self.even_action is None or self.odd_action is None:
                raise InvalidArgument("matrix form needs both even and odd actions")
            for name in ("even_action", "odd_action"):
                m = as_matrix(getattr(self, name))
                if not m.is_square():
                    raise InvalidArgument(f"{name} must be square")
                object.__setattr__(self, name, m)
        elif None in (self.ker0_rank, self.coker0, self.ker1_rank, self.coker1):
            raise InvalidArgument("abstract form needs ker0_rank, coker0, ker1_rank, coker1")

    @property
    def is_matrix_form(self) -> bool:
        return self.even_action is not None

    @classmethod
    def for_torus_dimension(cls, even: IntMatrix, odd: IntMatrix, d: int, **kw) -> "KDatum":
        e = sum(comb(d, k) for k in range(0, d + 1, 2))
        o = sum(comb(d, k) for k in range(1, d + 1, 2))
        if even.shape != (e, e) or odd.shape != (o, o):
            raise InvalidArgument(f"actions must be {e}x{e} and {o}x{o} for d={d}")
        return cls(even_action=even, odd_action=odd, **kw)

    def to_json(self) -> dict:
        if self.is_matrix_form:
            body = {"form": "matrix", "even_action": self.even_action.to_json(),
                    "odd_action": self.odd_action.to_json()}
        else:
            body = {"form": "abstract", "ker0_rank": self.ker0_rank,
                    "coker0": self.coker0.to_json(), "ker1_rank": self.ker1_rank,
                    "coker1": self.coker1.to_json()}
        body["notes"] = list(self.notes)
        return body


@dataclass(frozen=True)
class CrossedKGroups:
    k0: FgAbGroup
    k1: FgAbGroup
    notes: tuple[str, ...] = field(default=())

    def to_json(self) -> dict:
        return {"K0": self.k0.to_json(), "K1": self.k1.to_json(), "notes": list(self.notes)}


def induced_kstar_torus(map: TorusMap) -> KDatum:
    """Matrices of ``h*`` on ``K^0(T^d)`` and ``K^1(T^d)`` (block diagonal over degrees)."""
    d = map.dim
    A = map.linear.transpose()
    even = IntMatrix.block_diag([exterior_power(A, k) for k in range(0, d + 1, 2)])
    odd = IntMatrix.block_diag([exterior_power(A, k) for k in range(1, d + 1, 2)])
    notes = (TRANSPOSE_CONVENTION, COLUMN_MAP_CONVENTION, HOMOTOPY_NOTE)
    return KDatum(even_action=even, odd_action=odd, notes=notes)


def point_kdatum() -> KDatum:
    """The one-point space: ``K^0 = Z`` with trivial action, ``K^1 = 0``."""
    return KDatum(even_action=IntMatrix.identity(1), odd_action=IntMatrix.zeros(0, 0),
                  notes=("one-point space",))


def pv_crossed_k(datum: KDatum) -> CrossedKGroups:
    if datum.is_matrix_form:
        m0 = IntMatrix.identity(datum.even_action.rows) - datum.even_action
        m1 = IntMatrix.identity(datum.odd_action.rows) - datum.odd_action
        coker0, coker1 = cokernel(m0), cokernel(m1)
        ker0, ker1 = kernel_rank(m0), kernel_rank(m1)
    else:
        coker0, coker1 = datum.coker0, datum.coker1
        ker0, ker1 = datum.ker0_rank, datum.ker1_rank
    k0 = direct_sum(coker0, FgAbGroup.free(ker1))
    k1 = direct_sum(coker1, FgAbGroup.free(ker0))
    return CrossedKGroups(k0, k1, tuple(datum.notes) + (SPLITTING_NOTE,))


def putnam_product_kdata(alpha=None, beta=None) -> KDatum:
    """Abstract PV data for a rotation times a Denjoy-type Cantor system.

    ``id - h*`` on ``K^i(S^1 x X_beta)`` is identified with ``id - g_beta^*``
    on ``K^0(X_beta)``, whose kernel is Z and cokernel Z^2 for every
    admissible ``(alpha, beta)``; the parameters only affect the trace.
    """
    return KDatum(ker0_rank=1, coker0=FgAbGroup.free(2), ker1_rank=1, coker1=FgAbGroup.free(2),
                  notes=("abstract Denjoy-factor data: ker = Z, coker = Z^2 in both degrees",))


def torus_crossed_k(map: TorusMap) -> CrossedKGroups:
    return pv_crossed_k(induced_kstar_torus(map))
