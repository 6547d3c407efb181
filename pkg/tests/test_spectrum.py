from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hyplat.spectrum import (CASE_LABELS, SpectralType, avg_supnorm_exponent, case_table,
                             coincidence_count, cover_exponent, enumerate_types, instantiate,
                             profile, profile_row, re_bound, supnorm_envelope, supnorm_exponent)
from hyplat.sphtrans import rho

CUSP4 = SpectralType(4, ((4, 4),))
SPEH4 = SpectralType(4, ((4, 2),))


@pytest.mark.parametrize("n,count", [(2, 2), (3, 4), (4, 10)])
def test_type_counts(n, count):
    assert len(enumerate_types(n)) == count
    assert len(enumerate_types(n, include_constant=True)) == count + 1


def test_n3_types():
    got = {t.blocks for t in enumerate_types(3)}
    assert got == {((3, 3),), ((2, 2), (1, 1)), ((2, 1), (1, 1)), ((1, 1), (1, 1), (1, 1))}


def test_case_labels_cover_types():
    for n in (3, 4):
        assert {t.blocks for t in enumerate_types(n)} == set(CASE_LABELS[n])


def test_blocks_are_canonical_multisets():
    a = SpectralType(3, ((1, 1), (2, 1)))
    b = SpectralType(3, ((2, 1), (1, 1)))
    assert a == b and hash(a) == hash(b)


def test_type_validation():
    with pytest.raises(ValueError):
        SpectralType(4, ((3, 2), (1, 1)))
    with pytest.raises(ValueError):
        SpectralType(4, ((2, 1), (1, 1)))
    with pytest.raises(ValueError):
        enumerate_types(1)


def test_tags():
    assert SpectralType(3, ((3, 1),)).tags == ["CONSTANT"]
    assert SpectralType(3, ((3, 3),)).tags == ["CUSPIDAL"]


def test_re_bound_values():
    assert re_bound(SpectralType(3, ((2, 1), (1, 1)))) == Fraction(1, 2)
    assert re_bound(SpectralType(4, ((3, 1), (1, 1)))) == 1
    for n in range(2, 7):
        assert re_bound(SpectralType(n, ((n, 1),))) == Fraction(n - 1, 2)


def test_exponent_examples():
    assert coincidence_count(CUSP4) == 0
    assert coincidence_count(SPEH4) == 2
    assert supnorm_exponent(CUSP4) == 6
    assert supnorm_exponent(SPEH4) == 4
    assert avg_supnorm_exponent(CUSP4) == 6
    assert avg_supnorm_exponent(SPEH4) == 1
    assert cover_exponent(SpectralType(3, ((1, 1),) * 3)) == 2
    for n in range(2, 7):
        const = SpectralType(n, ((n, 1),))
        assert coincidence_count(const) == Fraction(n * (n - 1), 2)
        assert supnorm_exponent(const) == 0
        assert cover_exponent(const) == 0
        assert cover_exponent(SpectralType(n, ((n, n),))) == n - 1
        assert avg_supnorm_exponent(SpectralType(n, ((1, 1),) * n)) == 0


@pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
def test_profile_invariants(n):
    for t in enumerate_types(n, include_constant=True):
        p = profile(t)
        assert p.supnorm_exp + p.coincidence == Fraction(n * (n - 1), 2)
        assert min(p.re_max, p.coincidence, p.supnorm_exp, p.avg_supnorm_exp, p.cover_exp) >= 0
        assert p.cover_exp == sum(f for _, f in t.blocks) - 1
    cusp = profile(SpectralType(n, ((n, n),)))
    assert cusp.avg_supnorm_exp == cusp.supnorm_exp == Fraction(n * (n - 1), 2)


def test_profile_row_schema():
    row = profile_row(SPEH4)
    assert set(row) == {"n", "blocks", "tags", "re_bound", "coincidence", "supnorm_exp",
                        "avg_supnorm_exp", "cover_exp"}
    assert row["blocks"] == [[4, 2]] and row["coincidence"] == "2"


def test_instantiate_constant_is_rho():
    for n in range(2, 7):
        pt = instantiate(SpectralType(n, ((n, 1),)), [0])
        assert np.array_equal(pt.assembled.array, rho(n).astype(complex))


def test_instantiate_minimal():
    s = (0.3j, 0.5j, -0.8j)
    pt = instantiate(SpectralType(3, ((1, 1),) * 3), s)
    assert np.allclose(pt.assembled.array, s)


def test_instantiate_speh():
    nu = 0.2 + 1.5j
    pt = instantiate(SPEH4, [0], [(nu, -nu)])
    assert np.allclose(pt.assembled.array, [nu + 0.5, -nu + 0.5, nu - 0.5, -nu - 0.5])


def test_instantiate_validation():
    t = SpectralType(3, ((2, 2), (1, 1)))
    with pytest.raises(ValueError):
        instantiate(t, [1j, 1j])  # 2*s1 + s2 != 0
    with pytest.raises(ValueError):
        instantiate(t, [1j, -2j], [(0.1j, 0.2j), None])  # cusp parameter not summing to 0
    with pytest.raises(ValueError):
        instantiate(t, [1j, -2j])  # missing cusp parameter
    with pytest.raises(ValueError):
        instantiate(t, [1j])


@st.composite
def instantiations(draw):
    n = draw(st.integers(2, 6))
    t = draw(st.sampled_from(enumerate_types(n, include_constant=True)))
    ts = [draw(st.floats(-20, 20)) for _ in t.blocks]
    # impose sum d_j s_j = 0 on the last block
    d_last = t.blocks[-1][0]
    ts[-1] = -sum(d * x for (d, _), x in zip(t.blocks[:-1], ts[:-1])) / d_last
    cps = []
    for d, f in t.blocks:
        if f == 1:
            cps.append(None)
            continue
        re = [draw(st.floats(-0.5, 0.5)) for _ in range(f // 2)]
        im = [draw(st.floats(-10, 10)) for _ in range(f)]
        im[-1] = -sum(im[:-1])
        # real parts in +-pairs keep sum zero and |Re| <= 1/2
        reals = re + [-x for x in re] + [0.0] * (f % 2)
        cps.append(tuple(complex(a, b) for a, b in zip(reals, im)))
    return t, [1j * x for x in ts], cps


@given(instantiations())
@settings(max_examples=80, deadline=None)
def test_instantiation_properties(case):
    t, s, cps = case
    pt = instantiate(t, s, cps)
    mu = pt.assembled
    assert mu.n == t.n
    assert abs(mu.array.sum()) < 1e-8
    assert mu.re_norm <= float(re_bound(t)) + 1e-12


def test_supnorm_envelope():
    assert supnorm_envelope(np.zeros(3)) == 1
    assert supnorm_envelope([3j, -3j]) == pytest.approx(7)
    mu = np.array([0.1j, 2j, -2.1j])
    assert supnorm_envelope(mu) == pytest.approx(supnorm_envelope(mu[::-1]))


def test_case_tables():
    t3 = case_table(3)
    assert [g.cases for g in t3["groups"]] == [("1a", "2a", "4"), ("1b", "2b", "3")]
    assert [g.at() for g in t3["groups"]] == [(3, -2), (Fraction(9, 2), Fraction(-1, 2))]
    assert t3["smoothing"].at() == (6, 1)
    t4 = case_table(4)
    names = {g.name: g for g in t4["groups"]}
    assert names["tempered"].cases == ("1a", "3a", "5a", "6a", "8a", "10")
    assert names["Epstein"].at() == (10, 0)
    beta = names["one non-tempered pair"]
    assert beta.beta_range == (0, Fraction(1, 2))
    assert beta.at(Fraction(1, 2)) == (8, Fraction(-9, 4))
    assert t4["smoothing"].at() == (12, 1)
    every = sorted(c for g in t4["groups"] for c in g.cases)
    assert every == sorted(c for labels in CASE_LABELS[4].values() for c in labels)
    with pytest.raises(ValueError):
        case_table(5)
