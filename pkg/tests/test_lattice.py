import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hyplat.lattice import (cofactor_row, ellipsoid_points, ext_gcd, integer_det, lll_reduce,
                            unimodular_completion)

ints = st.integers(-50, 50)


@given(ints, ints)
def test_ext_gcd_bezout(a, b):
    g, x, y = ext_gcd(a, b)
    assert g == math.gcd(a, b)
    assert a * x + b * y == g


@given(st.lists(st.lists(st.integers(-6, 6), min_size=3, max_size=3), min_size=3, max_size=3))
def test_integer_det_matches_float(rows):
    assert integer_det(rows) == round(np.linalg.det(np.array(rows, dtype=float)))


@given(st.lists(st.lists(st.integers(-5, 5), min_size=3, max_size=3), min_size=2, max_size=2),
       st.lists(st.integers(-5, 5), min_size=3, max_size=3))
def test_cofactor_row_expands_determinant(rows, x):
    v = cofactor_row(rows)
    assert integer_det(rows + [x]) == sum(a * b for a, b in zip(x, v))


primitive = st.lists(st.integers(-30, 30), min_size=2, max_size=4).filter(
    lambda v: math.gcd(*v) == 1)


@given(primitive)
def test_unimodular_completion(v):
    p, basis = unimodular_completion(v)
    assert sum(a * b for a, b in zip(p, v)) == 1
    assert len(basis) == len(v) - 1
    for b in basis:
        assert sum(a * c for a, c in zip(b, v)) == 0
    # p together with the kernel basis is unimodular
    assert abs(integer_det([p] + basis)) == 1


def test_unimodular_completion_rejects_non_primitive():
    with pytest.raises(ValueError):
        unimodular_completion([2, 4, 6])


@given(st.lists(st.lists(st.integers(-20, 20), min_size=3, max_size=3), min_size=3, max_size=3)
       .filter(lambda b: integer_det(b) != 0))
@settings(max_examples=40)
def test_lll_preserves_lattice(basis):
    red = lll_reduce(basis)
    assert abs(integer_det(red)) == abs(integer_det(basis))
    # each reduced vector is an integer combination of the original basis
    B = np.array(basis, dtype=float).T
    for r in red:
        coeffs = np.linalg.solve(B, np.array(r, dtype=float))
        assert np.allclose(coeffs, np.round(coeffs), atol=1e-8)


def test_lll_first_vector_is_short():
    basis = [[1, 0, 0], [0, 1, 0], [1000, 1001, 1]]
    red = lll_reduce(basis)
    assert max(sum(x * x for x in r) for r in red) <= 3


def _brute(gram, r2, center, box):
    out = set()
    for x in itertools.product(range(-box, box + 1), repeat=len(gram)):
        d = np.array(x) - center
        if d @ gram @ d <= r2 + 1e-9:
            out.add(x)
    return out


@given(st.integers(0, 1000), st.floats(0.5, 12))
@settings(max_examples=30, deadline=None)
def test_ellipsoid_points_match_brute_force(seed, r2):
    rng = np.random.default_rng(seed)
    A = rng.normal(size=(3, 3))
    gram = A @ A.T + 0.5 * np.eye(3)
    center = rng.uniform(-1, 1, size=3)
    box = int(math.ceil(math.sqrt(r2 / np.linalg.eigvalsh(gram)[0]))) + 2
    got = set(ellipsoid_points(gram, r2, center))
    assert got == _brute(gram, r2, center, box)


def test_ellipsoid_points_rejects_indefinite():
    with pytest.raises(ValueError):
        list(ellipsoid_points(np.array([[1.0, 2.0], [2.0, 1.0]]), 1.0))


def test_ellipsoid_points_exact_gram_fraction_radius():
    pts = list(ellipsoid_points(np.eye(2), float(Fraction(2))))
    assert len(pts) == 9
