import math

import mpmath
import pytest
import sympy
from hypothesis import given, settings, strategies as st

from hyplat.mainterm import fit_error_exponent, main_constant, main_term, zeta_at_integer


@pytest.mark.parametrize("k", [2, 3, 4, 5, 8, 12])
def test_zeta_matches_mpmath(k):
    with mpmath.workprec(160):
        assert abs(zeta_at_integer(k, 128) - mpmath.zeta(k)) < mpmath.mpf(2) ** -120


def test_zeta_even_values_closed_form():
    for k in (2, 4, 6):
        exact = sympy.zeta(k).evalf(40)
        assert abs(float(zeta_at_integer(k)) - float(exact)) < 1e-15


def test_zeta_rejects_non_integers():
    with pytest.raises(ValueError):
        zeta_at_integer(1)
    with pytest.raises(ValueError):
        zeta_at_integer(2.5)


def test_c2_is_six():
    assert abs(main_constant(2).value - 6) < mpmath.mpf(10) ** -30


def test_c_n_closed_form_via_sympy():
    for n in (2, 3, 4):
        expr = sympy.pi ** sympy.Rational(n * n, 2) / (
            sympy.gamma(sympy.Rational(n * n - n + 2, 2)) * sympy.gamma(sympy.Rational(n, 2))
            * sympy.prod([sympy.zeta(k) for k in range(2, n + 1)]))
        assert float(main_constant(n).value) == pytest.approx(float(expr.evalf(30)), rel=1e-14)


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_c_n_stable_across_precisions(n):
    lo, hi = main_constant(n, 64).value, main_constant(n, 256).value
    assert abs(lo - hi) / hi < 1e-12


def test_main_term_scaling():
    assert main_term(2, 10.0) == pytest.approx(600.0)
    assert main_term(3, 2.0) == pytest.approx(64 * float(main_constant(3).value))


@given(st.floats(0.5, 2.5), st.floats(0.1, 3.0))
@settings(max_examples=30)
def test_fit_recovers_synthetic_exponent(theta, amp):
    c2 = 6.0
    ts = [10.0, 20.0, 40.0, 80.0]
    pts = [(t, round(c2 * t * t + amp * t ** theta * 1e3)) for t in ts]
    rep = fit_error_exponent(2, pts)
    assert rep.fitted_error_exponent == pytest.approx(theta, abs=1e-3)
    assert rep.main_exponent == 2
    assert all(s == 1 for s in rep.signs)


def test_fit_excludes_exact_hits():
    pts = [(10.0, 600), (20.0, 2400 + 50), (40.0, 9600 + 100), (80.0, 38400 + 200)]
    rep = fit_error_exponent(2, pts)
    assert rep.excluded == [(10.0, 600)]
    assert rep.fitted_error_exponent == pytest.approx(1.0, abs=1e-9)


def test_fit_errors():
    with pytest.raises(ValueError):
        fit_error_exponent(2, [(20.0, 1), (10.0, 2), (30.0, 3)])
    with pytest.raises(ValueError):
        fit_error_exponent(2, [(10.0, 600), (20.0, 2400), (30.0, 5)])


def test_fit_exact_power_law():
    ts = [1e4, 2e4, 4e4, 8e4, 1.6e5]
    pts = [(t, int(mpmath.nint(main_constant(2).value * mpmath.mpf(t) ** 2 + mpmath.mpf(t) ** 1.5)))
           for t in ts]
    assert fit_error_exponent(2, pts).fitted_error_exponent == pytest.approx(1.5, abs=1e-6)


@given(st.floats(0.5, 2.0), st.floats(0.9, 1.8))
@settings(max_examples=20)
def test_fit_scale_invariance(theta, lam):
    # rescaling T by lam with matching power-law counts leaves the slope alone
    def pts(scale):
        return [(t * scale, int(mpmath.nint(6 * mpmath.mpf(t * scale) ** 2
                                            + 1e12 * mpmath.mpf(t * scale) ** theta)))
                for t in (1e3, 2e3, 4e3, 8e3)]
    a = fit_error_exponent(2, pts(1.0)).fitted_error_exponent
    b = fit_error_exponent(2, pts(lam)).fitted_error_exponent
    assert abs(a - b) < 1e-9
