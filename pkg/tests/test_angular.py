import math
from fractions import Fraction

import numpy as np
import pytest
import sympy
from hypothesis import given, settings, strategies as st
from scipy.special import lpmv

from coverspec import angular as A
from coverspec.errors import Inadmissible, MismatchedCovering
from coverspec.rational import make_covering_parameter, parse_k
from coverspec.spectrum import admissible_m

K1, K3, K23, K52 = parse_k("1"), parse_k("3"), parse_k("2/3"), parse_k("5/2")


def _exact_inner(Y1, Y2):
    """Exact rational value of int_{-1}^{1} (1-u^2)^j D1 D2 du (same m)."""
    poly = {0: Fraction(1)}
    factors = [{0: Fraction(1), 2: Fraction(-1)}] * Y1.j + [dict(enumerate(Y1.deriv_coeffs)), dict(enumerate(Y2.deriv_coeffs))]
    for f in factors:
        out = {}
        for a, ca in poly.items():
            for b, cb in f.items():
                out[a + b] = out.get(a + b, 0) + ca * cb
        poly = out
    return sum(c * Fraction(2, d + 1) for d, c in poly.items() if d % 2 == 0)


# --- Legendre --------------------------------------------------------------


def test_p0_p1():
    assert A.legendre(0).coeffs == (Fraction(1),)
    assert A.legendre(1).coeffs == (Fraction(0), Fraction(1))


def test_p2_matches_symbolic_rodrigues():
    x = sympy.symbols("x")
    expected = sympy.Poly(sympy.diff((x**2 - 1) ** 2, x, 2) / 8, x).all_coeffs()[::-1]
    assert A.legendre(2).coeffs == tuple(Fraction(int(c.p), int(c.q)) for c in expected)
    assert A.legendre(2).coeffs == (Fraction(-1, 2), Fraction(0), Fraction(3, 2))


@pytest.mark.parametrize("l", [3, 7, 12, 20, 25])
def test_legendre_against_sympy(l):
    x = sympy.symbols("x")
    ref = sympy.Poly(sympy.legendre(l, x), x).all_coeffs()[::-1]
    assert A.legendre(l).coeffs == tuple(Fraction(int(c.p), int(c.q)) for c in ref)


def test_p_at_one_exact():
    for l in range(31):
        assert A.legendre(l).exact(1) == 1


@pytest.mark.parametrize("l", range(0, 15))
def test_parity(l):
    P = A.legendre(l)
    assert all(c == 0 for i, c in enumerate(P.coeffs) if (i - l) % 2)


def test_large_degree_no_overflow():
    # coefficients exceed 64-bit range around here
    P = A.legendre(40)
    assert P.exact(1) == 1
    assert max(abs(c.numerator) for c in P.coeffs) > 2**63


def test_derivative_of_p2():
    assert A.legendre_derivative(A.legendre(2), 1) == (Fraction(0), Fraction(3))


def test_derivative_identity_and_zero():
    P = A.legendre(5)
    assert A.legendre_derivative(P, 0) == P.coeffs
    assert A.is_zero_poly(A.legendre_derivative(A.legendre(2), 3))


@pytest.mark.parametrize("l,j", [(4, 2), (6, 5), (9, 3)])
def test_derivative_against_sympy(l, j):
    x = sympy.symbols("x")
    ref = sympy.Poly(sympy.diff(sympy.legendre(l, x), x, j), x).all_coeffs()[::-1]
    assert A.legendre_derivative(A.legendre(l), j) == tuple(Fraction(int(c.p), int(c.q)) for c in ref)


@given(st.integers(0, 15), st.integers(0, 20))
def test_zero_derivative_agrees_with_rejection(l, j):
    zero = A.is_zero_poly(A.legendre_derivative(A.legendre(l), j))
    assert zero == (j > l)
    # m = j on k = 1 gives derivative order j
    if zero:
        with pytest.raises(Inadmissible):
            A.make_harmonic(l, j, K1)
    else:
        assert A.make_harmonic(l, j, K1).j == j


# --- construction ----------------------------------------------------------


def test_make_harmonic_k3():
    assert A.make_harmonic(2, 3, K3).j == 1


def test_make_harmonic_two_thirds():
    Y = A.make_harmonic(3, 2, K23)
    assert Y.j == 3
    assert Y.deriv_coeffs == (Fraction(15),)


def test_make_harmonic_rejects_non_multiple():
    with pytest.raises(Inadmissible):
        A.make_harmonic(2, 1, K3)


def test_make_harmonic_rejects_order_above_l():
    with pytest.raises(Inadmissible):
        A.make_harmonic(2, 2, K23)


@given(st.integers(1, 12), st.integers(1, 12), st.integers(-60, 60))
def test_square_and_linear_conditions_coincide(p, q, m):
    k = make_covering_parameter(p, q)
    ratio_sq = Fraction(m * m) / k.fraction**2
    assert (ratio_sq.denominator == 1) == (A.derivative_order(m, k) is not None)


# --- evaluation ------------------------------------------------------------


def test_y00_is_one():
    Y = A.make_harmonic(0, 0, K23)
    for th, ph in [(0.1, 0.0), (1.0, 3.0), (3.0, 6.0)]:
        assert A.eval_harmonic(Y, A.AngularPoint(th, ph)) == 1


def test_y10_vanishes_on_equator():
    Y = A.make_harmonic(1, 0, K23)
    assert abs(A.eval_harmonic(Y, A.AngularPoint(math.pi / 2, 0.0))) < 1e-15


# values from a sympy evaluation of exp(i m phi) sin^j (d^j P_l)(cos theta)
SYMPY_Y_2_3_K3 = [
    ((0.3, 0.0), 0.846963710092553, 0.0),
    ((0.9, 1.1), -1.44248225169884, -0.23043040578395863),
    ((1.4, 2.5), 0.17417808585038927, 0.47132831559907756),
    ((2.2, 4.0), -1.2045197657845763, 0.7659058523432447),
    ((3.0, 5.9), -0.17137645273359373, 0.3824845197839995),
]
SYMPY_Y_3_2_K23 = [
    ((0.3, 0.0), 0.3871264138370074, 0.0),
    ((0.9, 1.1), -4.242947802996709, 5.829059520423381),
    ((1.4, 2.5), 4.071890852316211, -13.765088130053151),
    ((2.2, 4.0), -1.1534230625463762, 7.842944011111966),
    ((3.0, 5.9), 0.030370386617489177, -0.029236084668353778),
]


def test_y23_k3_equator():
    Y = A.make_harmonic(2, 3, K3)
    assert abs(A.eval_harmonic(Y, A.AngularPoint(math.pi / 2, 0.0))) < 1e-15


@pytest.mark.parametrize("point,re,im", SYMPY_Y_2_3_K3)
def test_eval_against_frozen_sympy_k3(point, re, im):
    z = A.eval_harmonic(A.make_harmonic(2, 3, K3), A.AngularPoint(*point))
    assert z == pytest.approx(complex(re, im), abs=1e-13)


@pytest.mark.parametrize("point,re,im", SYMPY_Y_3_2_K23)
def test_eval_against_frozen_sympy_two_thirds(point, re, im):
    z = A.eval_harmonic(A.make_harmonic(3, 2, K23), A.AngularPoint(*point))
    assert z == pytest.approx(complex(re, im), abs=1e-12)


def test_negative_m_is_conjugate():
    Yp, Ym = A.make_harmonic(4, 3, K3), A.make_harmonic(4, -3, K3)
    for th, ph in [(0.4, 0.2), (2.0, 5.0)]:
        assert Ym(th, ph) == pytest.approx(np.conj(Yp(th, ph)))


@pytest.mark.parametrize("l", range(0, 9))
def test_reduces_to_associated_legendre_at_k1(l):
    # scipy's lpmv carries the (-1)^m Condon-Shortley phase
    thetas = np.linspace(0.05, math.pi - 0.05, 23)
    phi = 0.77
    for m in range(-l, l + 1):
        Y = A.make_harmonic(l, m, K1)
        ref = (-1) ** abs(m) * lpmv(abs(m), l, np.cos(thetas)) * np.exp(1j * m * phi)
        np.testing.assert_allclose(Y(thetas, phi), ref, rtol=1e-12, atol=1e-12 * np.max(np.abs(ref)))


def test_angular_point_validation():
    with pytest.raises(ValueError):
        A.AngularPoint(0.0, 0.0)
    with pytest.raises(ValueError):
        A.AngularPoint(1.0, 2 * math.pi)


# --- residuals -------------------------------------------------------------


def test_theta_residual_l0_exact():
    Y = A.make_harmonic(0, 0, K1)
    assert np.all(A.theta_residual(Y, A.interior_thetas(17)) == 0.0)


def test_theta_residual_l1():
    assert abs(A.theta_residual(A.make_harmonic(1, 0, K1), 1.0)) < 1e-10


def test_theta_residual_two_thirds_l3_m2():
    Y = A.make_harmonic(3, 2, K23)
    assert np.max(np.abs(A.theta_residual(Y, A.interior_thetas(50)))) < 1e-8


@pytest.mark.parametrize("l,m,k", [(4, 3, K3), (6, 4, K23), (7, 5, K52), (5, -2, K1)])
def test_theta_derivatives_match_finite_differences(l, m, k):
    Y = A.make_harmonic(l, m, k)
    h = 1e-4
    for theta in np.linspace(0.3, 2.8, 9):
        v, d1, d2 = Y.theta_factor(theta)
        f = lambda t: Y.theta_factor(t)[0]
        fd1 = (f(theta + h) - f(theta - h)) / (2 * h)
        fd2 = (f(theta + h) - 2 * v + f(theta - h)) / (h * h)
        scale = 1 + abs(v) + abs(d1) + abs(d2)
        assert abs(fd1 - d1) < 1e-5 * scale
        assert abs(fd2 - d2) < 1e-5 * scale


def test_theta_residual_detects_wrong_constant():
    # Theta from (l=3, j=3) fed lambda for l=4 must not satisfy the ODE
    Y = A.make_harmonic(3, 2, K23)
    bad = A.angular_ode_residual(1.0, Y.theta_factor(1.0), 20, Y.mu)
    assert abs(bad) > 1.0


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(["1", "2", "3", "2/3", "5/2", "3/4", "7/3"]), st.integers(0, 12), st.data())
def test_theta_residual_property(k_text, l, data):
    k = parse_k(k_text)
    m = data.draw(st.sampled_from(admissible_m(l, k)))
    Y = A.make_harmonic(l, m, k)
    th = A.interior_thetas(100)
    scaled = np.abs(A.theta_residual(Y, th)) / A.theta_residual_scale(Y, th)
    assert np.max(scaled) < 1e-8


@pytest.mark.parametrize("m,phi", [(0, 0.3), (3, 0.7), (-2, math.pi / 5)])
def test_phi_residual(m, phi):
    assert A.phi_residual(m, phi) < 1e-12


# --- inner products --------------------------------------------------------


def test_y00_y10_orthogonal():
    assert abs(A.inner_product(A.make_harmonic(0, 0, K1), A.make_harmonic(1, 0, K1))) < 1e-10


def test_distinct_m_exactly_zero():
    assert A.inner_product(A.make_harmonic(4, 3, K3), A.make_harmonic(4, -3, K3)) == 0


def test_two_thirds_l3_l5_orthogonal():
    assert abs(A.inner_product(A.make_harmonic(3, 2, K23), A.make_harmonic(5, 2, K23))) < 1e-10


def test_mismatched_covering():
    with pytest.raises(MismatchedCovering):
        A.inner_product(A.make_harmonic(1, 0, K1), A.make_harmonic(1, 0, K3))


@pytest.mark.parametrize("k", [K1, K3, K23, K52])
def test_inner_product_matches_exact_rational_integral(k):
    for l1 in range(7):
        for l2 in range(l1, 7):
            for m in set(admissible_m(l1, k)) & set(admissible_m(l2, k)):
                Y1, Y2 = A.make_harmonic(l1, m, k), A.make_harmonic(l2, m, k)
                exact = 2 * math.pi * float(k) * float(_exact_inner(Y1, Y2))
                got = A.inner_product(Y1, Y2)
                assert got.real == pytest.approx(exact, rel=1e-12, abs=1e-9)
                if l1 != l2:
                    assert exact == 0


def test_norm_of_standard_harmonic():
    # k = 1: int |P_l^m|^2 dOmega = 4 pi (l+m)! / ((2l+1)(l-m)!)
    for l, m in [(0, 0), (2, 1), (5, 3), (8, 8)]:
        Y = A.make_harmonic(l, m, K1)
        expected = 4 * math.pi * math.factorial(l + m) / ((2 * l + 1) * math.factorial(l - m))
        assert Y.norm() ** 2 == pytest.approx(expected, rel=1e-12)


def test_norm_scales_with_k():
    # same Theta, measure carries the factor k
    a, b = A.make_harmonic(3, 0, K1), A.make_harmonic(3, 0, K52)
    assert b.norm() ** 2 == pytest.approx(2.5 * a.norm() ** 2, rel=1e-13)


def test_sample_csv_round_trip():
    import csv
    import io

    Y = A.make_harmonic(3, 2, K23)
    rows = A.sample_harmonic(Y, A.interior_thetas(4), [0.0, 1.3])
    buf = io.StringIO()
    A.write_samples_csv(rows, buf)
    parsed = list(csv.DictReader(io.StringIO(buf.getvalue())))
    assert list(parsed[0]) == list(A.SAMPLE_FIELDS)
    for src, rec in zip(rows, parsed):
        assert float(rec["re"]) == src["re"]
        assert float(rec["theta"]) == src["theta"]
        assert (int(rec["p"]), int(rec["q"])) == (2, 3)
