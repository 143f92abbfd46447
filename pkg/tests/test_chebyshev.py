"""Tests for Chebyshev evaluation and the spectral parameters."""
from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.polynomial import chebyshev as C

from typreal.chebyshev import (
    compute_eta,
    compute_mu,
    compute_nu,
    derivative_identity_residuals,
    eval_T,
    eval_U,
    eval_U_at_cospi,
    eval_U_prime,
    largest_root_U_prime,
    spectral_params,
    trig_root_identity_residuals,
)

mpmath = pytest.importorskip("mpmath")


def U_oracle(n, x):
    """U_n through numpy's Chebyshev-series machinery, using U_n = T'_{n+1} / (n+1)."""
    coef = np.zeros(n + 2)
    coef[n + 1] = 1.0
    return C.chebval(x, C.chebder(coef)) / (n + 1)


class TestEvalU:
    def test_u0_is_one(self):
        assert eval_U(0, 0.3) == 1.0

    def test_u1_is_2x(self):
        assert eval_U(1, 0.5) == pytest.approx(1.0, abs=1e-15)

    def test_u2_root_at_half(self):
        assert abs(eval_U(2, math.cos(math.pi / 3))) < 1e-15

    def test_negative_orders_reflect(self):
        assert eval_U(-1, 0.4) == 0.0
        assert eval_U(-3, 0.4) == pytest.approx(-eval_U(1, 0.4))

    @pytest.mark.parametrize("n", [0, 1, 5, 17, 40])
    def test_endpoint_limits(self, n):
        assert eval_U(n, 1.0) == n + 1
        assert eval_U(n, -1.0) == (-1) ** n * (n + 1)
        assert eval_U(n, 1.0 - 1e-9) == n + 1

    @pytest.mark.parametrize("x", [-1.7, -0.95, -0.2, 0.0, 0.61, 0.999, 1.3])
    @pytest.mark.parametrize("n", [0, 3, 10, 25])
    def test_matches_numpy_chebyshev_series(self, n, x):
        ref = U_oracle(n, x)
        assert eval_U(n, x) == pytest.approx(ref, rel=1e-11, abs=1e-11 * (n + 1))

    @settings(max_examples=200)
    @given(n=st.integers(1, 80), x=st.floats(-2.0, 2.0))
    def test_three_term_recurrence(self, n, x):
        lhs = eval_U(n + 1, x)
        rhs = 2.0 * x * eval_U(n, x) - eval_U(n - 1, x)
        scale = max(abs(lhs), abs(2.0 * x * eval_U(n, x)), abs(eval_U(n - 1, x)), 1.0)
        assert abs(lhs - rhs) <= 1e-12 * scale

    @settings(max_examples=200)
    @given(n=st.integers(0, 200), t=st.floats(1e-3, math.pi - 1e-3))
    def test_trig_consistency(self, n, t):
        x = math.cos(t)
        # the trig form evaluated at t itself, not at acos(cos t)
        assert abs(eval_U(n, x) - math.sin((n + 1) * t) / math.sin(t)) <= 1e-11 * (n + 1) ** 2

    def test_exact_angle_form(self):
        assert eval_U_at_cospi(1, Fraction(1, 3)) == 1.0
        assert eval_U_at_cospi(2, Fraction(1, 3)) == 0.0
        for k in range(12):
            assert eval_U_at_cospi(k, Fraction(2, 11)) == pytest.approx(
                eval_U(k, math.cos(2 * math.pi / 11)), abs=1e-13)
        with pytest.raises(ValueError):
            eval_U_at_cospi(3, Fraction(3, 2))


class TestEvalUPrime:
    def test_u1_prime_constant(self):
        assert eval_U_prime(1, 0.7) == 2.0

    def test_vanishes_at_nu2(self):
        assert abs(eval_U_prime(4, compute_nu(2))) < 1e-13

    def test_u3_prime_hand_value(self):
        # U_3 = 8x^3 - 4x, U_3' = 24x^2 - 4
        assert eval_U_prime(3, 0.2) == pytest.approx(-3.04, abs=1e-14)
        alt = (5 * eval_U(2, 0.2) - 3 * eval_U(4, 0.2)) / (2 * 0.96)
        assert eval_U_prime(3, 0.2) == pytest.approx(alt, abs=1e-14)

    @pytest.mark.parametrize("n", [1, 2, 7, 30])
    def test_endpoint_values(self, n):
        lim = n * (n + 1) * (n + 2) / 3
        assert eval_U_prime(n, 1.0) == pytest.approx(lim, rel=1e-14)
        assert eval_U_prime(n, -1.0) == pytest.approx((-1) ** (n + 1) * lim, rel=1e-14)

    @settings(max_examples=300)
    @given(n=st.integers(1, 60), x=st.floats(-0.99, 0.99))
    def test_central_difference(self, n, x):
        # the O(h^2) truncation term grows like n^7 near |x| = 1, so the
        # agreement is relative to the size of the derivative
        h = 1e-6
        fd = (eval_U(n, x + h) - eval_U(n, x - h)) / (2 * h)
        d = eval_U_prime(n, x)
        assert abs(d - fd) <= 1e-5 * max(1.0, abs(d))

    @pytest.mark.parametrize("x", [0.99, -0.99])
    def test_central_difference_absolute_gap_near_endpoints(self, x):
        # documents why the difference check is relative: with h = 1e-6 the
        # absolute gap at n = 60 near the endpoints exceeds 1e-5 because of the
        # truncation term alone, which mpmath confirms
        n, h = 60, 1e-6
        mpmath.mp.dps = 40
        exact_fd = (mpmath.chebyu(n, x + h) - mpmath.chebyu(n, x - h)) / (2 * h)
        exact_d = mpmath.diff(lambda y: mpmath.chebyu(n, y), x)
        assert float(abs(exact_fd - exact_d)) > 1e-5
        assert eval_U_prime(n, x) == pytest.approx(float(exact_d), rel=1e-9)


class TestEvalT:
    def test_examples(self):
        assert eval_T(0, 0.9) == 1.0
        assert eval_T(2, 0.5) == pytest.approx(-0.5, abs=1e-15)
        x = 0.37
        assert abs(eval_T(3, x) - (x * eval_U(2, x) - eval_U(1, x))) < 1e-15

    @pytest.mark.parametrize("x", [-1.5, 1.2, 3.0])
    def test_outside_interval(self, x):
        for n in range(6):
            assert eval_T(n, x) == pytest.approx(float(mpmath.chebyt(n, x)), rel=1e-13)


class TestSpectralParameters:
    def test_mu_examples(self):
        assert compute_mu(3) == 0.5
        assert compute_mu(5) == pytest.approx(math.cos(math.pi / 4), abs=1e-16)
        assert abs(eval_U(3, compute_mu(5))) < 1e-12

    def test_mu_rejects_even(self):
        with pytest.raises(ValueError):
            compute_mu(4)

    def test_nu_and_eta_small_cases(self):
        assert compute_nu(2) == pytest.approx(math.sqrt(3 / 8), abs=1e-16)
        assert compute_nu(2) < math.sin(math.pi / 4)
        assert compute_eta(2) == 0.25
        assert compute_eta(2) == 1 - 2 * (3 / 8)

    @pytest.mark.parametrize("n", [1, 3, 0])
    def test_nu_rejects(self, n):
        with pytest.raises(ValueError):
            compute_nu(n)

    def test_nu4_against_scan(self):
        # smallest positive root of U'_6 from a dense scan of the derivative
        x = np.arange(1, 1_000_000) * 1e-6
        v = np.array([eval_U_prime(6, float(y)) for y in x[::100]])
        i = np.nonzero(np.signbit(v[:-1]) != np.signbit(v[1:]))[0][0]
        lo, hi = x[::100][i], x[::100][i + 1]
        assert lo <= compute_nu(4) <= hi

    def test_eta4_is_max_root_of_derivative_difference(self):
        def f(y):
            return eval_U_prime(3, y) - eval_U_prime(2, y)
        x = np.arange(1, 1_000_000) * 1e-6
        v = np.array([f(float(y)) for y in x[::50]])
        idx = np.nonzero(np.signbit(v[:-1]) != np.signbit(v[1:]))[0]
        lo, hi = x[::50][idx[-1]], x[::50][idx[-1] + 1]
        assert lo <= compute_eta(4) <= hi

    @pytest.mark.parametrize("n", range(2, 121, 2))
    def test_nu_eta_correctly_rounded(self, n):
        mpmath.mp.dps = 50

        def g(x):
            return (n + 4) * mpmath.chebyu(n + 1, x) - (n + 2) * mpmath.chebyu(n + 3, x)

        root = mpmath.findroot(g, compute_nu(n))
        assert compute_nu(n) == float(root)
        assert compute_eta(n) == float(1 - 2 * root**2)

    @pytest.mark.parametrize("n", list(range(3, 200, 2)))
    def test_odd_parameter_residual(self, n):
        mu = compute_mu(n)
        assert mu == pytest.approx(math.cos(2 * math.pi / (n + 3)), abs=2e-16)
        assert abs(eval_U((n + 1) // 2, mu)) <= 1e-10 * (n + 3)

    @pytest.mark.parametrize("n", list(range(2, 200, 2)))
    def test_even_parameter_residuals(self, n):
        nu, eta = compute_nu(n), compute_eta(n)
        assert abs(eval_U_prime(n + 2, nu)) <= 1e-8 * (n + 3) ** 2
        assert abs(eval_U_prime(n // 2 + 1, eta) - eval_U_prime(n // 2, eta)) <= 1e-8 * (n + 3) ** 2
        assert eta == pytest.approx(1 - 2 * nu * nu, abs=2e-16)

    @pytest.mark.parametrize("n", list(range(4, 61, 2)))
    def test_root_brackets(self, n):
        assert compute_nu(n) < math.sin(math.pi / (n + 2))
        assert largest_root_U_prime(n) < math.cos(math.pi / n)

    def test_nu_is_smallest_positive_root(self):
        for n in (2, 6, 12, 30):
            x = np.linspace(1e-6, compute_nu(n) * (1 - 1e-9), 20_000)
            v = np.array([eval_U_prime(n + 2, float(y)) for y in x])
            assert np.all(np.sign(v) == np.sign(v[0]))

    def test_loose_tolerance_gives_bisection_midpoint(self):
        assert compute_nu(10, tol=1e-6) == pytest.approx(compute_nu(10), abs=1e-6)

    def test_spectral_params(self):
        sp = spectral_params(3)
        assert (sp.parity, sp.mu, sp.half_bound) == ("odd", 0.5, 0.5)
        sp = spectral_params(2)
        assert (sp.parity, sp.eta, sp.half_bound) == ("even", 0.25, 0.25)
        with pytest.raises(ValueError):
            spectral_params(1)


class TestDerivativeIdentities:
    def test_symmetric_point(self):
        assert max(derivative_identity_residuals(1, 0.0)) < 1e-12

    def test_examples(self):
        assert derivative_identity_residuals(5, 0.3)[0] <= 1e-10
        assert derivative_identity_residuals(8, -0.6)[4] <= 1e-10

    @settings(max_examples=300)
    @given(k=st.integers(1, 60), x=st.floats(-0.99, 0.99))
    def test_random(self, k, x):
        assert max(derivative_identity_residuals(k, x)) <= 1e-10

    def test_rejects_endpoints(self):
        with pytest.raises(ValueError):
            derivative_identity_residuals(3, 1.0)


def _scan_roots(n):
    a, b = (n + 2) / 2, (n + 4) / 2

    def f(t):
        return b * math.sin(a * t) + a * math.sin(b * t)

    grid = np.linspace(1e-3, math.pi - 1e-3, 20_000)
    vals = b * np.sin(a * grid) + a * np.sin(b * grid)
    roots = []
    for i in np.nonzero(np.signbit(vals[:-1]) != np.signbit(vals[1:]))[0]:
        lo, hi = grid[i], grid[i + 1]
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if mid in (lo, hi):
                break
            if (f(mid) > 0) == (f(lo) > 0):
                lo = mid
            else:
                hi = mid
        roots.append(0.5 * (lo + hi))
    return roots


@pytest.mark.parametrize("n", list(range(2, 41)))
def test_trig_root_identities(n):
    roots = _scan_roots(n)
    assert roots
    for t in roots:
        assert max(trig_root_identity_residuals(n, t)) <= 1e-9
