from fractions import Fraction
from math import gcd

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from crossk.errors import InvalidArgument
from crossk.elliott import (TraceRange, build_affine_furstenberg_invariant,
                            build_putnam_invariant, build_rotation_invariant,
                            invariants_equivalent)
from crossk.fgab import FgAbGroup
from crossk.symbolic import SymReal
from crossk.torus import TorusMap
from crossk.trigpoly import TrigPoly

THETA = SymReal.symbol("theta")


def inv(m, n, theta=THETA):
    return build_affine_furstenberg_invariant(TorusMap.ji(m, n, theta=theta))


@pytest.mark.parametrize("m,n", [(2, 3), (2, 5), (3, 4), (4, 6)])
def test_swapped_parameters_are_equivalent(m, n):
    assert invariants_equivalent(inv(m, n), inv(n, m)).equivalent


@pytest.mark.parametrize("m,n", [(2, 3), (2, 5), (3, 4), (5, 7)])
def test_coprime_parameters_collapse(m, n):
    assert gcd(m, n) == 1
    assert invariants_equivalent(inv(m, n), inv(m * n, 1)).equivalent


def test_noncoprime_parameters_do_not_collapse():
    v = invariants_equivalent(inv(2, 4), inv(8, 1))
    assert not v.equivalent
    assert any(f.startswith("K0") for f in v.failures)


def test_rotation_ranges():
    phi = SymReal.symbol("phi")
    r1, r2 = build_rotation_invariant(THETA), build_rotation_invariant(phi)
    assert not invariants_equivalent(r1, r2, "union").equivalent
    assert invariants_equivalent(r1, r2, {"phi": "theta"}).equivalent
    with pytest.raises(InvalidArgument):
        invariants_equivalent(r1, r2)
    # Z + theta Z = Z + (3 - theta) Z = Z + (-theta) Z
    assert invariants_equivalent(r1, build_rotation_invariant(3 - THETA)).equivalent
    assert invariants_equivalent(r1, build_rotation_invariant(-THETA)).equivalent
    assert not invariants_equivalent(r1, build_rotation_invariant(THETA * 2)).equivalent


def test_perturbation_keeps_invariant():
    a = build_affine_furstenberg_invariant(TorusMap.rouhani())
    b = build_affine_furstenberg_invariant(TorusMap.rouhani(r=TrigPoly.sin(1, 0, 0.2)))
    assert invariants_equivalent(a, b).equivalent


def test_putnam_invariant():
    e = build_putnam_invariant()
    assert e.k0 == FgAbGroup(3) and e.k1 == FgAbGroup(3)
    assert e.trace_range.rank() == 3
    for g in (1, SymReal.symbol("alpha"), SymReal.symbol("beta")):
        assert e.trace_range.contains(g)
    assert not e.trace_range.contains(SymReal.symbol("alpha") * Fraction(1, 2))
    assert e.trace_range.describe() == "1*Z + 1*alpha*Z + 1*beta*Z"


def test_builder_rejects_out_of_scope_maps():
    with pytest.raises(InvalidArgument):
        build_affine_furstenberg_invariant(TorusMap.ji(2, 3, theta=0.3))
    with pytest.raises(InvalidArgument):
        build_affine_furstenberg_invariant(TorusMap.ji(2, 3, theta=SymReal.rational(Fraction(1, 3))))
    with pytest.raises(InvalidArgument):
        build_affine_furstenberg_invariant(TorusMap.ji(0, 3))
    with pytest.raises(InvalidArgument):
        build_putnam_invariant("a", "a")


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(st.integers(-5, 5), st.integers(-5, 5), st.integers(-5, 5)),
                min_size=1, max_size=4),
       st.integers(-4, 4), st.integers(0, 3))
def test_trace_range_depends_only_on_subgroup(gens, q, idx):
    labels = ("1", "a", "b")
    base = TraceRange.generated_by(labels, gens)
    i = idx % len(gens)
    j = (i + 1) % len(gens)
    mixed = list(gens)
    if i != j:
        mixed[j] = tuple(x + q * y for x, y in zip(gens[j], gens[i]))
    assert TraceRange.generated_by(labels, mixed) == base
    assert TraceRange.generated_by(labels, list(reversed(gens))) == base
    for g in gens:
        assert base.contains(g)
