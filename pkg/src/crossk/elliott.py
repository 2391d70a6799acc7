"""Elliott-invariant data for crossed products with a unique trace.

Only the case where the positive cone of ``K_0`` is determined by the trace
(``eta > 0`` iff ``tau(eta) > 0``) and the trace is unique is representable.
In that case an isomorphism of invariants amounts to: isomorphic ``K_0``
and ``K_1``, equal trace ranges as subgroups of R, and the unit class going
to 1. Trace ranges live in ``Q 1 + Q theta_1 + ...`` over symbols the caller
declares rationally independent, so subgroup equality is exact.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm
from typing import Mapping, Sequence

from .errors import InvalidArgument
from .fgab import FgAbGroup, hermite_normal_form
from .ktheory import pv_crossed_k, putnam_product_kdata, torus_crossed_k
from .symbolic import ONE, SymReal
from .torus import TorusMap

CONE_RULE = "strict-positivity-of-trace"
TRACE_COUNT = "unique trace"
SCOPE_NOTE = ("equivalence compares invariant data (K0, K1, trace range, unit) for "
              "unique-trace, trace-determined-cone families only")


def _canonical_rows(gens: Sequence[Sequence[Fraction]], width: int) -> tuple:
    gens = [tuple(Fraction(x) for x in g) for g in gens]
    D = 1
    for g in gens:
        for x in g:
            D = lcm(D, x.denominator)
    H = hermite_normal_form([[int(x * D) for x in g] for g in gens], width)
    return tuple(tuple(Fraction(x, D) for x in row) for row in H)


@dataclass(frozen=True)
class TraceRange:
    """Subgroup of R generated by rational combinations of ``labels``.

    ``rows`` is the Hermite normal form of the subgroup (as rational row
    vectors), which depends only on the subgroup.
    """

    labels: tuple[str, ...]
    rows: tuple[tuple[Fraction, ...], ...]

    @classmethod
    def generated_by(cls, labels: Sequence[str], generators: Sequence) -> "TraceRange":
        labels = tuple(labels)
        if not labels or labels[0] != ONE:
            raise InvalidArgument('basis labels must start with "1"')
        if len(set(labels)) != len(labels):
            raise InvalidArgument("basis labels must be distinct")
        vecs = []
        for g in generators:
            if isinstance(g, SymReal):
                vecs.append(g.vector(labels))
            elif isinstance(g, (int, Fraction)):
                vecs.append(SymReal.rational(g).vector(labels))
            else:
                v = tuple(Fraction(x) for x in g)
                if len(v) != len(labels):
                    raise InvalidArgument("generator length does not match basis")
                vecs.append(v)
        return cls(labels, _canonical_rows(vecs, len(labels)))

    def contains(self, v) -> bool:
        if isinstance(v, (int, Fraction)):
            v = SymReal.rational(v)
        v = v.vector(self.labels) if isinstance(v, SymReal) else tuple(Fraction(x) for x in v)
        return _canonical_rows(list(self.rows) + [v], len(self.labels)) == self.rows

    def rank(self) -> int:
        return len(self.rows)

    def relabel(self, labels: Sequence[str], mapping: Mapping[str, str] | None = None) -> "TraceRange":
        """Express on a larger basis ``labels``; ``mapping`` renames this range's symbols first."""
        mapping = dict(mapping or {})
        mapping.setdefault(ONE, ONE)
        labels = tuple(labels)
        vecs = []
        for row in self.rows:
            coeffs = {}
            for l, q in zip(self.labels, row):
                target = mapping.get(l, l)
                if target not in labels:
                    raise InvalidArgument(f"symbol {l!r} has no counterpart in basis {labels}")
                coeffs[target] = coeffs.get(target, 0) + q
            vecs.append(SymReal(coeffs))
        return TraceRange.generated_by(labels, vecs)

    def describe(self) -> str:
        parts = []
        for row in self.rows:
            parts.append(repr(SymReal(dict(zip(self.labels, row)))) + "*Z")
        return " + ".join(parts) if parts else "0"

    def to_json(self) -> dict:
        return {"basis": list(self.labels),
                "hermite_rows": [[str(x) for x in r] for r in self.rows],
                "pretty": self.describe()}


@dataclass(frozen=True)
class ElliottInvariant:
    k0: FgAbGroup
    k1: FgAbGroup
    trace_range: TraceRange
    unit_trace: tuple[Fraction, ...]
    cone_rule: str = CONE_RULE
    trace_count: str = TRACE_COUNT
    family: str = ""
    notes: tuple[str, ...] = field(default=())

    def __post_init__(self):
        if self.cone_rule != CONE_RULE or self.trace_count != TRACE_COUNT:
            raise InvalidArgument("only unique-trace, trace-determined cones are representable")
        if not self.trace_range.contains(self.unit_trace):
            raise InvalidArgument("the unit trace must lie in the trace range")

    @property
    def labels(self) -> tuple[str, ...]:
        return self.trace_range.labels

    def to_json(self) -> dict:
        return {"family": self.family, "K0": self.k0.to_json(), "K1": self.k1.to_json(),
                "trace_range": self.trace_range.to_json(),
                "unit_trace": [str(x) for x in self.unit_trace],
                "cone_rule": self.cone_rule, "trace_count": self.trace_count,
                "notes": list(self.notes)}


def _unit(labels) -> tuple[Fraction, ...]:
    return SymReal.rational(1).vector(tuple(labels))


def _basis_for(labels_needed: set[str], basis_labels: Sequence[str] | None) -> tuple[str, ...]:
    if basis_labels is None:
        return (ONE,) + tuple(sorted(labels_needed))
    basis = tuple(basis_labels)
    if basis[:1] != (ONE,):
        basis = (ONE,) + tuple(l for l in basis if l != ONE)
    missing = labels_needed - set(basis)
    if missing:
        raise InvalidArgument(f"symbols {sorted(missing)} missing from basis {basis}")
    return basis


def is_affine_furstenberg(map: TorusMap) -> bool:
    L = map.linear
    d = map.dim
    for i in range(d):
        for j in range(d):
            if j > i and L[i, j] != 0:
                return False
            if i == j and L[i, j] != 1:
                return False
    if any(L[0, j] for j in range(1, d)):
        return False
    return all(L[i, i - 1] != 0 for i in range(1, d))


def build_affine_furstenberg_invariant(map: TorusMap, theta_label: str | None = None,
                                       basis_labels: Sequence[str] | None = None) -> ElliottInvariant:
    """Invariant of ``C*(Z, T^d, h)`` for an affine Furstenberg map (perturbations allowed).

    The trace range is ``Z + theta Z`` with ``theta`` the first translation;
    perturbations and the later translations do not change the invariant.
    """
    if not map.triangular or not is_affine_furstenberg(map):
        raise InvalidArgument("map is not of affine Furstenberg type (unipotent lower-triangular "
                              "linear part with nonzero sub-diagonal)")
    theta = map.translation[0]
    if not isinstance(theta, SymReal):
        raise InvalidArgument("the rotation number must be given symbolically")
    if theta.is_rational():
        raise InvalidArgument(f"rotation number {theta!r} is rational")
    if theta_label is not None and theta_label not in theta.labels():
        raise InvalidArgument(f"rotation number {theta!r} does not involve {theta_label!r}")
    basis = _basis_for(theta.labels(), basis_labels)
    groups = torus_crossed_k(map)
    rng = TraceRange.generated_by(basis, [SymReal.rational(1), theta])
    notes = groups.notes + ("trace values on K0 generators follow the pattern 1, theta, 0, ...",
                            SCOPE_NOTE)
    return ElliottInvariant(groups.k0, groups.k1, rng, _unit(basis),
                            family=map.name or "affine-furstenberg", notes=notes)


def build_rotation_invariant(theta: SymReal, basis_labels: Sequence[str] | None = None) -> ElliottInvariant:
    return build_affine_furstenberg_invariant(TorusMap.rotation([theta], basis={
        l: 0.5 for l in theta.labels()}), basis_labels=basis_labels)


def build_putnam_invariant(alpha_label: str = "alpha", beta_label: str = "beta",
                           basis_labels: Sequence[str] | None = None) -> ElliottInvariant:
    """Rotation by alpha times a Denjoy-type Cantor system with parameter beta."""
    if alpha_label == beta_label:
        raise InvalidArgument("alpha and beta must be distinct symbols")
    if ONE in (alpha_label, beta_label):
        raise InvalidArgument('"1" is reserved for the rational unit')
    basis = _basis_for({alpha_label, beta_label}, basis_labels)
    groups = pv_crossed_k(putnam_product_kdata())
    rng = TraceRange.generated_by(basis, [SymReal.rational(1), SymReal.symbol(alpha_label),
                                          SymReal.symbol(beta_label)])
    return ElliottInvariant(groups.k0, groups.k1, rng, _unit(basis),
                            family=f"putnam({alpha_label},{beta_label})",
                            notes=groups.notes + (SCOPE_NOTE,))


@dataclass(frozen=True)
class EquivalenceVerdict:
    equivalent: bool
    failures: tuple[str, ...]
    details: dict

    def __bool__(self) -> bool:
        return self.equivalent

    def to_json(self) -> dict:
        return {"equivalent": self.equivalent, "failures": list(self.failures),
                "details": self.details, "scope": SCOPE_NOTE}


def invariants_equivalent(e1: ElliottInvariant, e2: ElliottInvariant,
                          identification: Mapping[str, str] | str | None = None) -> EquivalenceVerdict:
    """Compare invariant data.

    ``identification`` is either a mapping from the symbols of ``e2`` to
    symbols of ``e1``, or ``"union"`` to treat all symbols of both as one
    rationally independent family. Without it both invariants must use the
    same set of symbols.
    """
    r1, r2 = e1.trace_range, e2.trace_range
    if identification == "union":
        basis = (ONE,) + tuple(sorted((set(r1.labels) | set(r2.labels)) - {ONE}))
        r1, r2 = r1.relabel(basis), r2.relabel(basis)
    elif identification is not None:
        r2 = r2.relabel(r1.labels, identification)
    elif set(r1.labels) != set(r2.labels):
        raise InvalidArgument(f"bases {r1.labels} and {r2.labels} differ; supply an identification")
    elif r1.labels != r2.labels:
        r2 = r2.relabel(r1.labels)
    failures = []
    if e1.k0 != e2.k0:
        failures.append(f"K0: {e1.k0} vs {e2.k0}")
    if e1.k1 != e2.k1:
        failures.append(f"K1: {e1.k1} vs {e2.k1}")
    if r1 != r2:
        failures.append(f"trace range: {r1.describe()} vs {r2.describe()}")
    u1 = _unit(r1.labels)
    if e1.unit_trace != _unit(e1.labels) or e2.unit_trace != _unit(e2.labels) or \
            not r1.contains(u1):
        failures.append("unit class does not trace to 1")
    details = {"K0": [str(e1.k0), str(e2.k0)], "K1": [str(e1.k1), str(e2.k1)],
               "trace_range": [r1.describe(), r2.describe()]}
    return EquivalenceVerdict(not failures, tuple(failures), details)
