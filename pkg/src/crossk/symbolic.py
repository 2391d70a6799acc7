"""Exact real numbers of the form q_0 + q_1 theta_1 + ... over a declared basis.

The caller asserts that ``1, theta_1, theta_2, ...`` are rationally
independent; nothing here checks that. Float shadows (``basis`` maps a
label to its numerical value) are used only for dynamics.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Mapping

from .errors import InvalidArgument

ONE = "1"


class SymReal:
    __slots__ = ("_c",)

    def __init__(self, coeffs: Mapping[str, object] | None = None):
        c = {}
        for label, q in (coeffs or {}).items():
            q = Fraction(q) if not isinstance(q, float) else Fraction(q).limit_denominator()
            if q:
                c[str(label)] = q
        self._c = c

    @classmethod
    def rational(cls, q) -> "SymReal":
        return cls({ONE: q})

    @classmethod
    def symbol(cls, label: str, coeff=1) -> "SymReal":
        return cls({label: coeff})

    @property
    def coeffs(self) -> dict[str, Fraction]:
        return dict(self._c)

    def labels(self) -> set[str]:
        return set(self._c) - {ONE}

    def coeff(self, label: str) -> Fraction:
        return self._c.get(label, Fraction(0))

    def is_rational(self) -> bool:
        return not self.labels()

    def value(self, basis: Mapping[str, float]) -> float:
        total = 0.0
        for label, q in sorted(self._c.items()):
            if label == ONE:
                total += float(q)
            else:
                try:
                    total += float(q) * float(basis[label])
                except KeyError:
                    raise InvalidArgument(f"no numerical value for symbol {label!r}") from None
        return total

    def vector(self, labels: tuple[str, ...]) -> tuple[Fraction, ...]:
        extra = set(self._c) - set(labels)
        if extra:
            raise InvalidArgument(f"symbols {sorted(extra)} not in basis {labels}")
        return tuple(self.coeff(l) for l in labels)

    def __add__(self, other) -> "SymReal":
        other = _coerce(other)
        out = dict(self._c)
        for l, q in other._c.items():
            out[l] = out.get(l, 0) + q
        return SymReal(out)

    __radd__ = __add__

    def __neg__(self) -> "SymReal":
        return SymReal({l: -q for l, q in self._c.items()})

    def __sub__(self, other) -> "SymReal":
        return self + (-_coerce(other))

    def __rsub__(self, other) -> "SymReal":
        return _coerce(other) - self

    def __mul__(self, k) -> "SymReal":
        if isinstance(k, SymReal):
            if k.is_rational():
                k = k.coeff(ONE)
            elif self.is_rational():
                return k * self.coeff(ONE)
            else:
                raise InvalidArgument("product of two irrational symbolic reals is not representable")
        if isinstance(k, float):
            raise InvalidArgument("symbolic reals only scale by exact rationals")
        k = Fraction(k)
        return SymReal({l: k * q for l, q in self._c.items()})

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = SymReal.rational(other)
        if not isinstance(other, SymReal):
            return NotImplemented
        return self._c == other._c

    def __hash__(self) -> int:
        return hash(tuple(sorted(self._c.items())))

    def __repr__(self) -> str:
        if not self._c:
            return "0"
        return " + ".join(f"{q}*{l}" if l != ONE else str(q) for l, q in sorted(self._c.items()))

    def to_json(self) -> dict[str, str]:
        return {l: str(q) for l, q in sorted(self._c.items())}


def _coerce(x) -> SymReal:
    if isinstance(x, SymReal):
        return x
    if isinstance(x, (int, Fraction)):
        return SymReal.rational(x)
    raise InvalidArgument(f"cannot mix symbolic reals with {type(x).__name__}")


def to_float(x, basis: Mapping[str, float]) -> float:
    return x.value(basis) if isinstance(x, SymReal) else float(x)
