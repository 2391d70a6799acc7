import cmath
import math

import numpy as np
import pytest

from crossk.errors import InvalidArgument, UnsupportedOperation
from crossk.smooth_cp import (CrossedElement, SeminormIndex, random_element, seminorm_cp,
                              seminorm_cp_bounds, submultiplicativity_probe)
from crossk.symbolic import SymReal
from crossk.torus import TorusMap
from crossk.trigpoly import TrigPoly

GOLDEN = (math.sqrt(5) - 1) / 2
ROT = TorusMap.rotation([SymReal.symbol("theta")])
JI = TorusMap.ji(2, 3)


def _max_error(a, b):
    worst = 0.0
    for k in set(a.terms) | set(b.terms):
        fa, fb = a.coeff(k), b.coeff(k)
        for q in set(fa.coeffs) | set(fb.coeffs):
            worst = max(worst, abs(fa.coeff(q) - fb.coeff(q)))
    return worst


@pytest.mark.parametrize("m", [ROT, JI], ids=["rotation", "ji"])
def test_algebra_axioms(m):
    rng = np.random.default_rng(7)
    one = CrossedElement.unit(m)
    for _ in range(15):
        s, t, u = (random_element(m, rng) for _ in range(3))
        assert _max_error((s * t) * u, s * (t * u)) < 1e-9
        assert _max_error(s * (t + u), s * t + s * u) < 1e-9
        assert _max_error((s * t).adjoint(), t.adjoint() * s.adjoint()) < 1e-9
        assert _max_error(s.adjoint().adjoint(), s) < 1e-9
        assert _max_error(one * s, s) < 1e-12 and _max_error(s * one, s) < 1e-12


@pytest.mark.parametrize("m", [ROT, JI], ids=["rotation", "ji"])
def test_covariance_against_pointwise_composition(m):
    rng = np.random.default_rng(3)
    d = m.dim
    for _ in range(5):
        f = TrigPoly(d, {tuple(int(v) for v in rng.integers(-2, 3, d)): complex(*rng.normal(size=2))
                         for _ in range(3)})
        u = CrossedElement.delta(m, 1)
        conj = u * CrossedElement.delta(m, 0, f) * u.adjoint()
        assert conj.support() == [0]
        for x in rng.random((4, d)):
            expect = complex(f(np.array(m.inverse_point(x))))
            assert abs(complex(conj.coeff(0)(x)) - expect) < 1e-9


def test_rotation_commutation_phase():
    # delta_1 e(x) = exp(-2 pi i theta) e(x) delta_1
    u = CrossedElement.delta(ROT, 1)
    e = CrossedElement.delta(ROT, 0, TrigPoly.character([1]))
    lhs, rhs = u * e, e * u
    phase = cmath.exp(-2j * math.pi * GOLDEN)
    assert lhs.allclose(rhs * phase, 1e-12)


def test_unitary_and_adjoint():
    u = CrossedElement.delta(JI, 1)
    one = CrossedElement.unit(JI)
    assert (u * u.adjoint()).allclose(one) and (u.adjoint() * u).allclose(one)
    f = TrigPoly(3, {(1, 0, 0): 2j, (0, 1, -1): 1.0})
    s = CrossedElement(JI, {2: f})
    assert s.adjoint().support() == [-2]


def test_seminorm_examples():
    u = CrossedElement.delta(ROT, 1)
    assert seminorm_cp(u, SeminormIndex(0, 1)) == 2.0
    assert seminorm_cp(CrossedElement.unit(ROT), SeminormIndex(3, 5)) == 0.0
    assert seminorm_cp(CrossedElement.unit(ROT), SeminormIndex(0, 5)) == 1.0
    v = CrossedElement.delta(ROT, 1, TrigPoly.character([1]))
    assert seminorm_cp(v, SeminormIndex(1, 1)) == pytest.approx(4 * math.pi, rel=1e-12)
    w = CrossedElement.delta(JI, -2, TrigPoly.character([1, 1, 0]))
    # two derivation words of length one, each of sup 2 pi, weight 3^2
    assert seminorm_cp(w, SeminormIndex(1, 2)) == pytest.approx(9 * 4 * math.pi, rel=1e-12)


@pytest.mark.parametrize("m", [ROT, JI], ids=["rotation", "ji"])
def test_adjoint_preserves_sup_seminorm(m):
    rng = np.random.default_rng(11)
    for _ in range(5):
        s = random_element(m, rng)
        a = seminorm_cp(s, SeminormIndex(0, 2))
        b = seminorm_cp(s.adjoint(), SeminormIndex(0, 2))
        assert abs(a - b) <= 1e-9 * a
        lo, hi = seminorm_cp_bounds(s, SeminormIndex(1, 1))
        assert lo <= hi


def test_submultiplicativity_probe_on_rotation():
    rep = submultiplicativity_probe(ROT, SeminormIndex(0, 0), sample_count=30, seed=1)
    assert rep["max_ratio"] <= 1.0
    assert [p["width"] for p in rep["per_width"]] == [1, 2, 3]
    assert rep["truncation_window"] == [-3, 3]


def test_rejections():
    circ = TorusMap.circle_diffeo(TrigPoly.sin(1, 0, 0.01), 0.2)
    with pytest.raises(UnsupportedOperation):
        CrossedElement.delta(circ, 1) * CrossedElement.delta(circ, 1)
    with pytest.raises(InvalidArgument):
        CrossedElement(ROT, {0: TrigPoly.constant(2)})
    with pytest.raises(InvalidArgument):
        CrossedElement.unit(ROT) * CrossedElement.unit(TorusMap.rotation([SymReal.symbol("phi")], {"phi": 0.3}))
    with pytest.raises(InvalidArgument):
        SeminormIndex(-1, 0)


def test_json_round_trip():
    s = random_element(JI, np.random.default_rng(0))
    assert CrossedElement.from_json(JI, s.to_json()).allclose(s, 0)
