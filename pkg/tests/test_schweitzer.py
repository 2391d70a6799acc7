import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from crossk.errors import InvalidArgument
from crossk.schweitzer import (SchweitzerElement, brute_force_search, c1_limit_probe, evaluate,
                               finite_spectrum_gap, finite_spectrum_search, inf_abs, is_invertible,
                               norms, perturb_to_invertible, run_suite)

REC = SchweitzerElement.reciprocal()

small = st.floats(-2, 2, allow_nan=False).map(lambda x: round(x, 3))
elements = st.builds(
    lambda lam, tail, exc: SchweitzerElement(lam, tuple(tail), {n: v for n, v in exc}),
    small, st.lists(small, max_size=3),
    st.lists(st.tuples(st.integers(1, 4), small), max_size=3))


def _exact(x):
    return Fraction(x.real), Fraction(x.imag)


def _brute(a, N=3000):
    # exact rational arithmetic on the (binary) float inputs
    lam = _exact(a.lam)
    tail = [_exact(c) for c in a.tail]
    exc = {n: _exact(v) for n, v in a.exceptional}
    sup2 = om2 = Fraction(0)
    for n in range(1, N + 1):
        if n in exc:
            re, im = exc[n]
        else:
            re = lam[0] + sum(c[0] / Fraction(n) ** (j + 1) for j, c in enumerate(tail))
            im = lam[1] + sum(c[1] / Fraction(n) ** (j + 1) for j, c in enumerate(tail))
        sup2 = max(sup2, re * re + im * im)
        dr, di = n * (re - lam[0]), n * (im - lam[1])
        om2 = max(om2, dr * dr + di * di)
    return math.sqrt(sup2), math.sqrt(om2)


def test_evaluation_formula():
    a = SchweitzerElement(1.5, (2.0, -3.0), {2: 7.0})
    assert evaluate(a, 1) == 1.5 + 2.0 - 3.0
    assert evaluate(a, 2) == 7.0
    assert evaluate(a, 4) == pytest.approx(1.5 + 2 / 4 - 3 / 16)
    assert a.omega == 2.0
    with pytest.raises(InvalidArgument):
        evaluate(a, 0)


def test_reference_norms():
    r = norms(REC)
    assert r.sup_norm.contains(1.0) and r.omega_norm.contains(1.0) and r.total.contains(2.0)
    one = norms(SchweitzerElement.unit()).total
    assert one.contains(1.0) and one.width <= 2e-12
    assert norms(REC * REC).total.contains(2.0)


@settings(max_examples=40, deadline=None)
@given(elements)
def test_norm_intervals_enclose_brute_force(a):
    sup_b, om_b = _brute(a)
    r = norms(a)
    assert sup_b <= r.sup_norm.hi
    assert om_b <= r.omega_norm.hi
    assert r.sup_norm.lo <= r.sup_norm.hi and r.omega_norm.lo <= r.omega_norm.hi
    assert r.total.width <= 1e-9 * max(1.0, r.total.hi)


@settings(max_examples=80, deadline=None)
@given(elements, elements)
def test_algebra_is_pointwise(a, b):
    ab = a * b
    for n in range(1, 30):
        assert abs(evaluate(ab, n) - evaluate(a, n) * evaluate(b, n)) < 1e-9
        assert abs(evaluate(a + b, n) - evaluate(a, n) - evaluate(b, n)) < 1e-12
        assert abs(evaluate(a.adjoint(), n) - evaluate(a, n).conjugate()) < 1e-12
    assert ab.lam == a.lam * b.lam
    assert abs(ab.omega - (a.lam * b.omega + a.omega * b.lam)) < 1e-12


@settings(max_examples=80, deadline=None)
@given(elements, elements)
def test_submultiplicative_and_basic_estimate(a, b):
    na, nb, nab = norms(a), norms(b), norms(a * b)
    assert nab.total.lo <= na.total.hi * nb.total.hi
    assert nab.omega_norm.lo <= (na.sup_norm.hi * nb.omega_norm.hi
                                 + na.omega_norm.hi * nb.sup_norm.hi)
    assert norms(a.adjoint()).total.lo <= na.total.hi


def test_invertibility():
    assert is_invertible(SchweitzerElement.unit())
    assert not is_invertible(REC)
    assert not is_invertible(SchweitzerElement(1.0, (-1.0,)))  # vanishes at n = 1
    b = REC - 0.3
    assert is_invertible(b)
    assert inf_abs(b) == pytest.approx(1 / 3 - 0.3)
    c, alpha = perturb_to_invertible(REC, 1e-3)
    assert 0 < alpha < 1e-3 and is_invertible(c)
    assert norms(c - REC).total.contains(alpha)


def test_finite_spectrum_distance():
    assert finite_spectrum_gap(REC) == 1.0
    grid = [Fraction(k, 4) for k in range(-4, 9)]
    assert brute_force_search(REC, 2, grid) == finite_spectrum_search(
        REC, prefix_max=2, step=Fraction(1, 4))["min_norm"]
    res = finite_spectrum_search(REC, prefix_max=3, step=Fraction(1, 10))
    assert res["min_norm"] >= 1


def test_limit_probes():
    sq = c1_limit_probe(SchweitzerElement(1.0, (1.0,)), lambda x: x * x, lambda x: 2 * x,
                        n_max=10 ** 4)
    assert sq.status == "converged"
    assert abs(sq.at(10 ** 4) - 2) < 1e-3
    rt = c1_limit_probe(REC, math.sqrt, lambda x: 0.5 / math.sqrt(x) if x > 0 else math.inf)
    assert rt.status == "divergent"
    assert rt.measured[-1].real > 1e2
    with pytest.raises(InvalidArgument):
        c1_limit_probe(SchweitzerElement(1j), abs, abs)


def test_suite_is_deterministic():
    a = run_suite(cases=60, seed=5, search_prefix=3)
    b = run_suite(cases=60, seed=5, search_prefix=3)
    assert a.passed and a.to_json() == b.to_json()
    assert a.checks["submultiplicative"] == 60


def test_json_round_trip():
    a = SchweitzerElement(1 + 2j, (0.5, -1j), {3: 2.0})
    assert SchweitzerElement.from_json(a.to_json()) == a
