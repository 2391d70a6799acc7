import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from crossk.errors import InvalidArgument
from crossk.fgab import FgAbGroup, IntMatrix, exterior_power
from crossk.ktheory import (KDatum, induced_kstar_torus, point_kdatum, pv_crossed_k,
                            putnam_product_kdata, torus_crossed_k)
from crossk.symbolic import SymReal
from crossk.torus import TorusMap


@pytest.mark.parametrize("m,n", [(2, 3), (2, 5), (3, 4), (1, 1), (2, 2), (4, 6)])
def test_affine_skew_product_k_groups(m, n):
    groups = torus_crossed_k(TorusMap.ji(m, n))
    expect = FgAbGroup.from_orders(4, [m, n])
    assert groups.k0 == expect
    assert groups.k1 == expect


def test_rotation_and_identity_maps():
    rot = torus_crossed_k(TorusMap.rotation([SymReal.symbol("theta")]))
    assert rot.k0 == FgAbGroup(2) and rot.k1 == FgAbGroup(2)
    ident2 = torus_crossed_k(TorusMap((0.1, 0.2), IntMatrix.identity(2)))
    assert ident2.k0 == FgAbGroup(4) and ident2.k1 == FgAbGroup(4)


def test_perturbation_does_not_change_k_groups():
    from crossk.trigpoly import TrigPoly
    a = torus_crossed_k(TorusMap.rouhani())
    b = torus_crossed_k(TorusMap.rouhani(r=TrigPoly.sin(1, 0, 0.1)))
    assert a == b
    assert a.k0 == FgAbGroup(3) and a.k1 == FgAbGroup(3)


def test_induced_action_uses_transpose_on_degree_one():
    L = IntMatrix([[1, 0, 0], [2, 1, 0], [0, 3, 1]])
    datum = induced_kstar_torus(TorusMap.ji(2, 3))
    assert datum.even_action.shape == (4, 4)
    assert datum.odd_action.shape == (4, 4)
    assert datum.odd_action.submatrix([0, 1, 2], [0, 1, 2]) == L.transpose()


@pytest.mark.parametrize("m,n", [(2, 3), (3, 4), (4, 6)])
def test_untransposed_convention_gives_same_groups(m, n):
    L = TorusMap.ji(m, n).linear
    datum = KDatum(
        even_action=IntMatrix.block_diag([exterior_power(L, k) for k in (0, 2)]),
        odd_action=IntMatrix.block_diag([exterior_power(L, k) for k in (1, 3)]))
    a, b = pv_crossed_k(datum), torus_crossed_k(TorusMap.ji(m, n))
    assert (a.k0, a.k1) == (b.k0, b.k1)


def test_point_and_putnam():
    pt = pv_crossed_k(point_kdatum())
    assert pt.k0 == FgAbGroup(1) and pt.k1 == FgAbGroup(1)
    pu = pv_crossed_k(putnam_product_kdata())
    assert pu.k0 == FgAbGroup(3) and pu.k1 == FgAbGroup(3)


def test_kdatum_validation():
    with pytest.raises(InvalidArgument):
        KDatum()
    with pytest.raises(InvalidArgument):
        KDatum(even_action=IntMatrix.identity(2))
    with pytest.raises(InvalidArgument):
        KDatum.for_torus_dimension(IntMatrix.identity(2), IntMatrix.identity(2), 3)


def unimodular_3x3():
    ops = st.lists(st.tuples(st.integers(0, 2), st.integers(0, 2), st.integers(-2, 2)),
                   max_size=5)

    def build(steps):
        M = IntMatrix.identity(3)
        for i, j, q in steps:
            if i != j:
                E = IntMatrix([[int(a == b) + (q if (a, b) == (i, j) else 0) for b in range(3)]
                               for a in range(3)])
                M = E @ M
        return M
    return ops.map(build)


@settings(max_examples=60, deadline=None)
@given(unimodular_3x3())
def test_torus_k_groups_have_equal_ranks(L):
    # for tori the Euler characteristic of the crossed product vanishes
    groups = torus_crossed_k(TorusMap((0.1, 0.2, 0.3), L))
    assert groups.k0.free_rank == groups.k1.free_rank
    assert groups.k0.free_rank >= 2


@settings(max_examples=40, deadline=None)
@given(unimodular_3x3(), unimodular_3x3())
def test_k_groups_are_conjugacy_invariant(L, P):
    a = torus_crossed_k(TorusMap((0.1, 0.2, 0.3), L))
    b = torus_crossed_k(TorusMap((0.1, 0.2, 0.3), P @ L @ P.inverse_unimodular()))
    assert (a.k0, a.k1) == (b.k0, b.k1)
