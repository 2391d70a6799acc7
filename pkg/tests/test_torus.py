import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from crossk import _kernels
from crossk.errors import InvalidArgument
from crossk.symbolic import SymReal
from crossk.torus import (TorusMap, apply, collapse_f0, distality_probe, ergodic_average,
                          iterate_affine_lift, orbit, winding_average)
from crossk.trigpoly import TrigPoly

GOLDEN = (math.sqrt(5) - 1) / 2

MAPS = [
    TorusMap.rotation([SymReal.symbol("theta")]),
    TorusMap.ji(2, 3),
    TorusMap.rouhani(r=TrigPoly.sin(1, 0, 0.05)),
    TorusMap.circle_diffeo(TrigPoly.sin(1, 0, 0.1 / (2 * math.pi)), 0.3),
]


def _obs(d):
    return TrigPoly(d, {tuple([1] + [0] * (d - 1)): 1.0, tuple([0] * (d - 1) + [2]): 0.5j})


@pytest.mark.skipif(_kernels.c_backend is None, reason="compiled kernels not built")
@pytest.mark.parametrize("m", MAPS, ids=lambda m: m.name)
def test_compiled_kernels_match_python(m):
    py, c = _kernels.py_backend, _kernels.c_backend
    packed = m.packed()
    x0 = np.linspace(0.1, 0.7, m.dim)
    assert np.array_equal(py.orbit(*packed, x0, 500), c.orbit(*packed, x0, 500))
    f = _obs(m.dim)
    of = np.array([k for k, _ in f.items()], dtype=np.int64)
    ore = np.array([v.real for _, v in f.items()])
    oim = np.array([v.imag for _, v in f.items()])
    assert abs(py.ergodic_sum(*packed, x0, of, ore, oim, 500)
               - c.ergodic_sum(*packed, x0, of, ore, oim, 500)) < 1e-9
    for coord in range(m.dim):
        a = py.winding_sums(*packed, x0, coord, 500)
        b = c.winding_sums(*packed, x0, coord, 500)
        assert a[1] == b[1] and abs(a[0] - b[0]) < 1e-9
    z2 = (x0 + 0.37) % 1.0
    assert py.distality_min(*packed, x0, z2, 100, 400) == pytest.approx(
        c.distality_min(*packed, x0, z2, 100, 400), abs=1e-12)


@pytest.mark.parametrize("m", MAPS, ids=lambda m: m.name)
def test_orbit_matches_pointwise_application(m):
    start = [0.2] * m.dim
    pts = orbit(m, start, 30)
    p = tuple(start)
    for k in range(1, 31):
        p = apply(m, p)
        dist = np.abs(((np.array(p) - pts[k]) + 0.5) % 1.0 - 0.5)
        assert dist.max() < 1e-9


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(0, 1, exclude_max=True), min_size=3, max_size=3))
def test_inverse_point_undoes_map(p):
    m = TorusMap.ji(2, 3)
    q = m.inverse_point(apply(m, p))
    assert np.abs(((np.array(q) - np.array(p)) + 0.5) % 1.0 - 0.5).max() < 1e-9


def test_inverse_map_and_affine_lift_iteration():
    m = TorusMap.ji(2, 3)
    lift = iterate_affine_lift(m, 5)
    assert lift.linear == m.linear ** 5
    back = iterate_affine_lift(m, -5).compose(lift)
    assert back.linear.tolist() == [[1, 0, 0], [0, 1, 0], [0, 0, 1]]
    assert all(x == SymReal.rational(0) for x in back.translation)
    inv = m.inverse()
    p = (0.3, 0.6, 0.1)
    assert np.allclose(np.array(apply(inv, apply(m, p))) % 1.0, np.array(p), atol=1e-12)


def test_rotation_ergodic_average_closed_form():
    # sum of e^{2 pi i k theta} is a geometric series
    m = TorusMap.rotation([SymReal.symbol("theta")])
    N = 5000
    z = complex(math.cos(2 * math.pi * GOLDEN), math.sin(2 * math.pi * GOLDEN))
    expect = (1 - z ** N) / (1 - z) / N
    got = ergodic_average(m, TrigPoly.character([1]), N, [0.0])
    assert abs(got - expect) < 1e-10
    assert abs(got) < 1e-2


def test_ergodic_average_witnesses_on_skew_products():
    # nontrivial characters average to zero for uniquely ergodic skew products
    for m in (TorusMap.ji(2, 3), TorusMap.rouhani(r=TrigPoly.sin(1, 0, 0.05))):
        for k in ([1, 0, 0][:m.dim], [0] * (m.dim - 1) + [1]):
            avg = ergodic_average(m, TrigPoly.character(k), 10 ** 5, [0.1] * m.dim)
            assert abs(avg) < 1e-2
    assert ergodic_average(TorusMap.ji(2, 3), TrigPoly.constant(3, 2.5), 10, [0.0] * 3) == 2.5


def test_winding_averages():
    m = TorusMap.ji(2, 3)
    assert winding_average(m, 1, 1000, [0.0] * 3) == pytest.approx(GOLDEN, abs=1e-12)
    # oracle: iterate the unreduced lift directly
    N, start = 60, [0.1, 0.2, 0.3]
    X = np.array(start)
    for _ in range(N):
        X = m.lift(X)
    for coord in (1, 2, 3):
        expect = ((X[coord - 1] - start[coord - 1]) / N) % 1.0
        got = winding_average(m, coord, N, start)
        assert min(abs(got - expect), 1 - abs(got - expect)) < 1e-9
    with pytest.raises(InvalidArgument):
        winding_average(m, 4, 10, [0.0] * 3)


def test_distality_floor_is_exact_for_isometries():
    m = TorusMap.rotation([SymReal.symbol("a"), SymReal.symbol("b")],
                          basis={"a": GOLDEN, "b": math.sqrt(2) - 1})
    z1, z2 = [0.1, 0.2], [0.35, 0.9]
    rep = distality_probe(m, z1, z2, 2000)
    assert rep.min_distance == pytest.approx(0.3, abs=1e-9)
    with pytest.raises(InvalidArgument):
        distality_probe(m, z1, z1, 10)


def test_distality_floor_positive_on_skew_product():
    m = TorusMap.ji(1, 1)
    rep = distality_probe(m, [0.1, 0.2, 0.3], [0.1, 0.2, 0.55], 4000)
    # pairs differing only in the last coordinate keep their distance
    assert rep.min_distance == pytest.approx(0.25, abs=1e-9)


def test_collapse_f0():
    assert collapse_f0(0.0, 0.5) == (0.0, 0.0)
    assert collapse_f0(0.0, -1.0) == (0.0, 0.0)
    assert collapse_f0(1.5, 0.3) == (1.5, 0.3)
    assert collapse_f0(0.5, 3.0) == (0.5, 3.0)
    # continuous across the diamond boundary and injective off the segment
    assert collapse_f0(0.5, 1.5) == (0.5, 1.5)
    assert collapse_f0(0.5, 1.0) == (0.5, 0.5)
    xs = np.linspace(-0.9, 0.9, 19)
    ys = np.linspace(-2.5, 2.5, 51)
    images = {collapse_f0(float(x), float(y)) for x in xs for y in ys if abs(x) > 1e-12}
    assert len(images) == sum(1 for x in xs if abs(x) > 1e-12) * len(ys)


def test_map_validation():
    with pytest.raises(InvalidArgument):
        TorusMap((0.1, 0.2), [[2, 0], [0, 1]])
    with pytest.raises(InvalidArgument):
        TorusMap((0.1, 0.2), [[1, 0], [0, 1]], (TrigPoly.sin(2, 1, 0.1), None))
    with pytest.raises(InvalidArgument):
        TorusMap.circle_diffeo(TrigPoly.sin(1, 0, 1.0))


def test_fallback_backend_selected_by_environment():
    import os
    import subprocess
    import sys
    env = dict(os.environ, CROSSK_PURE_PYTHON="1")
    code = "from crossk import _kernels; print(_kernels.BACKEND, _kernels.orbit is _kernels.py_backend.orbit)"
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True,
                         check=True).stdout.split()
    assert out == ["python", "True"]
