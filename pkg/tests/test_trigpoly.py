import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from crossk.errors import InvalidArgument
from crossk.symbolic import SymReal, to_float
from crossk.trigpoly import TrigPoly, sup_norm, word_count


def trigpolys(d=2, max_freq=3, max_terms=4):
    freq = st.tuples(*[st.integers(-max_freq, max_freq)] * d)
    coef = st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False)
    return st.dictionaries(freq, coef, min_size=1, max_size=max_terms).map(
        lambda c: TrigPoly(d, c))


def _brute_sup(f, n=400):
    xs = np.linspace(0, 1, n, endpoint=False)
    pts = np.stack(np.meshgrid(*[xs] * f.dim, indexing="ij"), -1).reshape(-1, f.dim)
    return float(np.max(np.abs(f(pts))))


@settings(max_examples=40, deadline=None)
@given(trigpolys())
def test_sup_norm_bounds_bracket_dense_sampling(f):
    est = sup_norm(f)
    dense = _brute_sup(f)
    assert est.value <= est.upper + 1e-12
    assert dense <= est.upper + 1e-9
    assert est.value >= est.grid_max - 1e-12
    assert est.upper <= f.l1_norm() + 1e-12


def test_sup_norm_known_values():
    assert sup_norm(TrigPoly.cos(1, 0, 2.0)).value == pytest.approx(2.0, abs=1e-12)
    f = TrigPoly(1, {(1,): 1.0, (3,): 1.0})
    assert sup_norm(f).value == pytest.approx(2.0, abs=1e-10)
    # maximum off the grid is found by refinement
    g = TrigPoly(1, {(1,): 1.0, (2,): 0.5j})
    est = sup_norm(g, grid=16)
    assert est.value == pytest.approx(_brute_sup(g, 200000), abs=1e-8)


@settings(max_examples=40, deadline=None)
@given(trigpolys(), trigpolys())
def test_product_matches_pointwise(f, g):
    x = np.array([[0.13, 0.71], [0.5, 0.25], [0.9, 0.02]])
    assert np.allclose((f * g)(x), f(x) * g(x))
    assert np.allclose((f + g)(x), f(x) + g(x))
    assert np.allclose(f.conj()(x), np.conj(f(x)))


@settings(max_examples=30, deadline=None)
@given(trigpolys(), st.floats(0, 1), st.floats(0, 1))
def test_compose_affine_matches_pointwise(f, a, b):
    L = [[1, 0], [2, 1]]
    g = f.compose_affine([a, b], L)
    x = np.array([0.3, 0.8])
    y = np.array([a, b]) + np.array(L) @ x
    assert complex(g(x)) == pytest.approx(complex(f(y)), abs=1e-9)


def test_derivative_and_grid():
    f = TrigPoly.sin(2, 1, 1.0, freq=2)
    df = f.derivative(1)
    x = np.array([0.1, 0.3])
    assert complex(df(x)).real == pytest.approx(4 * math.pi * math.cos(4 * math.pi * 0.3))
    vals = f.grid_values(8)
    assert vals.shape == (8, 8)
    assert vals[0, 1].real == pytest.approx(math.sin(2 * math.pi * 2 / 8))
    assert TrigPoly.from_json(f.to_json()).allclose(f)


def test_word_count():
    assert word_count(2, 2) == {(0, 2): 1, (1, 1): 2, (2, 0): 1}
    for n in range(4):
        for d in range(1, 4):
            assert sum(word_count(n, d).values()) == d ** n


def test_trigpoly_validation():
    with pytest.raises(InvalidArgument):
        TrigPoly(2, {(1,): 1.0})
    with pytest.raises(InvalidArgument):
        TrigPoly.from_json({"dimension": 1})


def test_symbolic_reals():
    t = SymReal.symbol("theta")
    x = 3 - t
    assert x.coeff("theta") == -1 and x.coeff("1") == 3
    assert x.value({"theta": 0.5}) == 2.5
    assert (x + t) == SymReal.rational(3)
    assert (t * 2).vector(("1", "theta")) == (Fraction(0), Fraction(2))
    assert to_float(Fraction(1, 4), {}) == 0.25
    with pytest.raises(InvalidArgument):
        t.value({})
