import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hyplat.exactlat import (BallSpec, Method, NotPositiveDefiniteError, count_general_ball,
                             count_identity_ball, count_naive, count_subtask, enumerate_ball,
                             final_row_count, final_row_solutions, frobenius_sq,
                             parse_rational, partition_workload, twisted_norm_sq)
from hyplat.lattice import integer_det

# hand-checked small counts: T^2 = 2 gives the four signed permutation matrices of det 1
KNOWN = {(2, 1): 0, (2, 2): 4, (2, 4): 20, (2, 9): 52, (2, 25): 132, (3, 3): 24, (3, 4): 312}


@pytest.mark.parametrize("key", sorted(KNOWN))
def test_known_counts(key):
    n, r2 = key
    assert count_identity_ball(BallSpec(n, Fraction(r2))).count == KNOWN[key]


@pytest.mark.parametrize("n,r2", [(2, 1), (2, 3), (2, 5), (2, 8), (2, 10), (3, 3), (3, 4)])
def test_row_recursion_matches_naive(n, r2):
    spec = BallSpec(n, Fraction(r2))
    assert count_identity_ball(spec).count == count_naive(spec).count


@given(st.fractions(min_value=0, max_value=40, max_denominator=7))
@settings(max_examples=30, deadline=None)
def test_count_depends_on_floor_of_radius(r2):
    a = count_identity_ball(BallSpec(2, r2)).count
    b = count_identity_ball(BallSpec(2, Fraction(int(r2)))).count
    assert a == b


def test_count_monotone_in_radius():
    counts = [count_identity_ball(BallSpec(2, Fraction(k))).count for k in range(1, 60)]
    assert counts == sorted(counts)


def test_enumeration_members_are_valid_and_sorted():
    spec = BallSpec(3, Fraction(4))
    mats = list(enumerate_ball(spec))
    assert len(mats) == 312
    assert mats == sorted(mats)
    assert len(set(mats)) == len(mats)
    for m in mats:
        assert integer_det(m) == 1 and frobenius_sq(m) <= 4


@pytest.mark.parametrize("k", [1, 2, 3, 7])
def test_partition_sums_to_total(k):
    spec = BallSpec(3, Fraction(9))
    total = count_identity_ball(spec).count
    assert sum(count_subtask(t) for t in partition_workload(spec, k)) == total


def test_workers_do_not_change_count():
    spec = BallSpec(3, Fraction(9))
    assert count_identity_ball(spec, workers=2).count == count_identity_ball(spec).count


@given(st.lists(st.integers(-4, 4), min_size=3, max_size=3).filter(
    lambda v: np.gcd.reduce(v) == 1), st.integers(0, 30))
@settings(max_examples=40, deadline=None)
def test_final_row_count_matches_scan(v, budget):
    m = int(budget ** 0.5)
    rng = range(-m, m + 1)
    brute = sorted(x for x in itertools.product(rng, repeat=3)
                   if sum(a * b for a, b in zip(x, v)) == 1 and sum(a * a for a in x) <= budget)
    assert final_row_count(v, budget) == len(brute)
    assert final_row_solutions(v, budget) == brute


def test_final_row_non_primitive_is_empty():
    assert final_row_count([2, 4, 0], 50) == 0


def test_general_base_at_identity_matches():
    for r2 in (2, 4, 6):
        spec = BallSpec(3, Fraction(r2), np.eye(3), np.eye(3))
        rec = count_general_ball(spec)
        assert rec.count == count_identity_ball(BallSpec(3, Fraction(r2))).count
        assert rec.method is Method.GENERIC_FORM


def test_general_base_diagonal_brute_force():
    z = np.diag([2.0, 0.5])
    w = np.eye(2)
    for r2 in (2, 5, 17):
        spec = BallSpec(2, Fraction(r2), z, w)
        brute = 0
        for e in itertools.product(range(-12, 13), repeat=4):
            M = np.array(e).reshape(2, 2)
            if integer_det(M.tolist()) == 1 and twisted_norm_sq(M, z, w) <= r2 + 1e-9:
                brute += 1
        assert count_general_ball(spec).count == brute


@given(st.integers(-3, 3), st.integers(-3, 3))
@settings(max_examples=15, deadline=None)
def test_general_count_invariant_under_integral_base_change(a, b):
    # ||z^-1 g w|| with z = u in SL_2(Z) just permutes the lattice
    u = np.array([[1.0, a], [0.0, 1.0]]) @ np.array([[1.0, 0.0], [b, 1.0]])
    spec = BallSpec(2, Fraction(30), u, u)
    ref = count_general_ball(BallSpec(2, Fraction(30), np.eye(2), np.eye(2))).count
    assert count_general_ball(spec).count == ref


def test_tiny_ball_with_skewed_base_is_empty():
    assert count_general_ball(BallSpec(2, Fraction(2), np.diag([2.0, 0.5]), np.eye(2))).count == 0


def test_twisted_norm_reduces_to_frobenius():
    M = np.array([[2, 1], [1, 1]])
    assert twisted_norm_sq(M, np.eye(2), np.eye(2)) == pytest.approx(frobenius_sq(M))


def test_ill_conditioned_base_rejected():
    z = np.diag([1e7, 1e-7])
    with pytest.raises(NotPositiveDefiniteError):
        count_general_ball(BallSpec(2, Fraction(4), z, np.eye(2)))


def test_validation():
    with pytest.raises(ValueError):
        BallSpec(1, Fraction(4))
    with pytest.raises(ValueError):
        BallSpec(2, Fraction(-1))
    with pytest.raises(ValueError):
        BallSpec(2, Fraction(4), np.diag([2.0, 2.0]), np.eye(2))
    with pytest.raises(ValueError):
        parse_rational("2.5")
    assert parse_rational("9/4") == Fraction(9, 4)


def test_document_round_trip():
    spec = BallSpec(2, Fraction(9, 4), np.diag([2.0, 0.5]), np.eye(2), tol=1e-8)
    again = BallSpec.from_document(spec.to_document())
    assert again.to_document() == spec.to_document()
    with pytest.raises(ValueError):
        BallSpec.from_document({"n": 2, "radius_sq": 2.5})


def test_record_row_columns():
    row = count_identity_ball(BallSpec(2, Fraction(4))).to_row()
    assert list(row) == ["n", "radius_sq", "count", "method", "borderline", "seconds"]
    assert row["radius_sq"] == "4/1" and row["count"] == 20
