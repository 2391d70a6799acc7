from itertools import product

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from crossk.conjugacy import (flip_obstruction, ji_matrices, modk_similar, modk_witness,
                              q_similar, random_unimodular, z_similar_bounded)
from crossk.errors import InvalidArgument, ResourceLimit
from crossk.fgab import IntMatrix


def _all_matrices_mod(k, d=3):
    digits = np.array(list(product(range(k), repeat=d * d)), dtype=np.int64)
    return digits.reshape(-1, d, d)


def _det3(P):
    return (P[:, 0, 0] * (P[:, 1, 1] * P[:, 2, 2] - P[:, 1, 2] * P[:, 2, 1])
            - P[:, 0, 1] * (P[:, 1, 0] * P[:, 2, 2] - P[:, 1, 2] * P[:, 2, 0])
            + P[:, 0, 2] * (P[:, 1, 0] * P[:, 2, 1] - P[:, 1, 1] * P[:, 2, 0]))


def brute_count(A, B, k):
    """Invertible intertwiners ``P A = B P`` mod k, by exhaustive enumeration."""
    P = _all_matrices_mod(k)
    a = np.array(A.tolist())
    b = np.array(B.tolist())
    ok = np.all((P @ a - b @ P) % k == 0, axis=(1, 2))
    det = _det3(P[ok]) % k
    return int(np.sum(np.gcd(det, k) == 1))


@pytest.mark.parametrize("k,expected", [(2, 8), (3, 108), (4, 0)])
def test_mod_k_against_exhaustive_oracle(k, expected):
    A, B = ji_matrices(2, 3)
    assert brute_count(A, B, k) == expected
    assert modk_similar(A, B, k) == (expected > 0)


def test_mod_k_pattern_for_the_swapped_pair():
    A, B = ji_matrices(2, 3)
    sim = {k for k in range(2, 17) if modk_similar(A, B, k)}
    assert sim == {2, 3, 5, 6, 7, 10, 11, 13, 14, 15}
    W = modk_witness(A, B, 5)
    D = W @ A - B @ W
    assert all(v % 5 == 0 for v in D.entries()) and W.det() % 5 != 0


@settings(max_examples=25, deadline=None)
@given(st.lists(st.integers(-2, 2), min_size=9, max_size=9),
       st.lists(st.integers(-2, 2), min_size=9, max_size=9), st.sampled_from([2, 3]))
def test_mod_k_matches_oracle_on_random_pairs(a, b, k):
    A = IntMatrix([a[0:3], a[3:6], a[6:9]])
    B = IntMatrix([b[0:3], b[3:6], b[6:9]])
    assert modk_similar(A, B, k) == (brute_count(A, B, k) > 0)


def test_rational_similarity():
    A, B = ji_matrices(2, 3)
    assert q_similar(A, B)
    assert q_similar(A, B.inverse_unimodular())
    assert not q_similar(A, IntMatrix.identity(3))
    assert not q_similar(IntMatrix([[1, 1, 0], [0, 1, 0], [0, 0, 1]]), A)
    assert q_similar(IntMatrix([[2, 1], [0, 3]]), IntMatrix([[3, 0], [5, 2]]))


def test_swapped_pair_is_excluded():
    A, B = ji_matrices(2, 3)
    v = z_similar_bounded(A, B, 3, 16)
    assert v.status == "not_similar"
    assert v.obstruction == {"kind": "modulus", "k": 4}
    flip = flip_obstruction(A, B, 3, 16)
    assert flip.status == "excluded"
    assert flip.inverse.status == "not_similar"


def test_conjugate_pairs_have_witnesses():
    rng = np.random.default_rng(0)
    A, _ = ji_matrices(2, 3)
    for _ in range(20):
        P = random_unimodular(rng, 3)
        B = P @ A @ P.inverse_unimodular()
        v = z_similar_bounded(A, B, 3, 16)
        assert v.status == "similar"
        W = v.witness
        assert W @ A == B @ W and abs(W.det()) == 1


def test_small_obstructions():
    # same characteristic polynomial, different Jordan structure
    A = IntMatrix([[1, 1], [0, 1]])
    assert z_similar_bounded(A, IntMatrix.identity(2)).obstruction["kind"] == \
        "rational-invariant mismatch"
    # rationally similar but not over Z: [[1, 2], [0, 1]] versus [[1, 1], [0, 1]]
    v = z_similar_bounded(IntMatrix([[1, 2], [0, 1]]), A)
    assert v.status == "not_similar" and v.obstruction == {"kind": "modulus", "k": 2}


def test_resource_limits():
    A, B = ji_matrices(2, 3)
    with pytest.raises(ResourceLimit):
        z_similar_bounded(A, B, 3, 100)
    with pytest.raises(ResourceLimit):
        z_similar_bounded(A, B, 9, 16)
    with pytest.raises(ResourceLimit):
        modk_witness(A, B, 20, cap=16)
    with pytest.raises(ResourceLimit):
        z_similar_bounded(IntMatrix.identity(4), IntMatrix.identity(4))
    with pytest.raises(InvalidArgument):
        flip_obstruction(A, IntMatrix([[2, 0, 0], [0, 1, 0], [0, 0, 1]]))
