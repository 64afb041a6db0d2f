import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from scipy.special import ive

from services.errors import DomainError, PoleError
from services.models import KernelParams
from services.special_functions import (
    G_c,
    bessel_i52,
    bessel_i52_scaled,
    bessel_i52_series,
    boundary_factor,
    f_c,
    g0_subtracted,
    g2d,
    g2d_weighted_sum,
    g_c,
    gstar_1d,
    gstar_2d,
    w_g0,
)


class TestBessel:
    @pytest.mark.parametrize("x", np.geomspace(1e-3, 30.0, 25))
    def test_closed_form_matches_series(self, x):
        assert bessel_i52(x) == pytest.approx(bessel_i52_series(x, terms=90), rel=1e-12)

    @pytest.mark.parametrize("x", [0.5, 1.9, 2.1, 10.0, 150.0, 650.0, 800.0])
    def test_scaled_matches_scipy(self, x):
        assert bessel_i52_scaled(x) == pytest.approx(ive(2.5, x), rel=1e-10)

    def test_array_input(self):
        x = np.array([0.1, 1.0, 5.0, 50.0])
        np.testing.assert_allclose(bessel_i52_scaled(x), ive(2.5, x), rtol=1e-10)

    def test_zero(self):
        assert bessel_i52_scaled(0.0) == 0.0

    def test_overflow_only_unscaled(self):
        assert math.isfinite(bessel_i52(700.0))
        assert math.isinf(bessel_i52(750.0))
        assert math.isfinite(bessel_i52_scaled(750.0))

    def test_negative_argument(self):
        with pytest.raises(DomainError):
            bessel_i52_scaled(-1.0)


class TestHyperbolicKernels:
    def test_half_is_tanh(self):
        w = np.linspace(-3.0, 3.0, 13)
        np.testing.assert_allclose(g_c(Fraction(1, 2), w), np.tanh(math.pi * w / 3.0), rtol=1e-13, atol=1e-15)

    def test_f_vanishes_at_zero_shift(self):
        assert np.all(f_c(0, np.linspace(-2.0, 2.0, 5)) == 0.0)

    def test_g0_pole(self):
        with pytest.raises(PoleError):
            g_c(0, np.array([0.0, 1.0]))

    def test_large_argument_saturates(self):
        assert g_c(Fraction(1, 3), 2000.0) == 1.0
        assert g_c(Fraction(1, 3), -2000.0) == -1.0
        assert f_c(Fraction(1, 3), 2000.0) == pytest.approx(0.0, abs=1e-200)

    @pytest.mark.parametrize("w", [1e-6, 1e-3, 0.04, 0.2, 1.5])
    def test_subtracted_g0(self, w):
        with mpmath.workdps(40):
            u = mpmath.mpf(math.pi) * w / 3
            expected = float(mpmath.coth(u) - 1 / u)
        assert float(g0_subtracted(w)) == pytest.approx(expected, rel=1e-12, abs=1e-16)

    def test_w_g0_limit(self):
        assert float(w_g0(0.0)) == pytest.approx(3.0 / math.pi, rel=1e-15)

    def test_G_zero_shift_continuous(self):
        assert float(G_c(0, 0.0)) == 0.0
        assert float(G_c(0, 1e-8)) == pytest.approx(3e-8 / math.pi, rel=1e-6)

    @pytest.mark.parametrize("c", [Fraction(1, 3), Fraction(1, 6), Fraction(5, 12)])
    def test_parity(self, c):
        # g_c 는 홀함수, f_c 는 짝함수
        w = np.linspace(0.05, 4.0, 40)
        np.testing.assert_allclose(g_c(c, -w), -g_c(c, w), rtol=1e-14, atol=0.0)
        np.testing.assert_allclose(f_c(c, -w), f_c(c, w), rtol=1e-14, atol=0.0)


class TestKernelParams:
    @pytest.mark.parametrize(
        "k,r1,r2,case",
        [(1, 1, None, "generic"), (1, 3, None, "zero"), (2, 1, 2, "generic"), (2, 0, 4, "zero_first"),
         (2, 5, 6, "zero_second"), (1, 0, 3, "double_zero")],
    )
    def test_cases(self, k, r1, r2, case):
        assert KernelParams(k=k, r1=r1, r2=r2).case == case


class TestOneDimensionalKernel:
    @pytest.mark.parametrize("k,r", [(1, 0), (1, 1), (2, 3), (3, 4)])
    def test_vanishes_at_endpoints(self, k, r):
        assert np.all(gstar_1d(k, r, np.array([-1.0, 1.0])) == 0.0)

    def test_zero_class_is_finite_at_origin(self):
        assert np.isfinite(gstar_1d(1, 0, 0.0))

    def test_values_at_origin(self):
        assert float(gstar_1d(1, 0, 0.0)) == pytest.approx(2.0 * math.sqrt(2.0) / math.pi, rel=1e-14)
        assert float(gstar_1d(1, 1, 0.0)) == 0.0

    def test_boundary_factor_clips(self):
        assert float(boundary_factor(1.0 + 1e-15)) == 0.0


class TestTwoDimensionalKernel:
    def test_swap_symmetry(self):
        rng = np.random.default_rng(3)
        w1 = rng.uniform(-2.0, 2.0, 100)
        w2 = rng.uniform(-2.0, 2.0, 100)
        for k, r in [(1, 1), (1, 2), (2, 1), (2, 5)]:
            np.testing.assert_array_equal(g2d(k, r, 0, w1, w2), g2d(k, 0, r, w2, w1))

    @pytest.mark.parametrize("r2", [1, 2])
    @pytest.mark.parametrize("w2", [-0.7, 0.3, 1.1])
    @pytest.mark.parametrize("w1", [1e-6, 1e-7])
    def test_removable_limit(self, r2, w2, w1):
        # 축 위의 극한값과 O(w₁) 안에서 이어진다
        near = g2d(1, 0, r2, np.array([w1]), np.array([w2]))
        at = g2d(1, 0, r2, np.array([0.0]), np.array([w2]))
        assert abs(near[0] - at[0]) < 20.0 * w1

    def test_double_zero_finite_at_origin(self):
        value = g2d(1, 0, 0, np.array([0.0]), np.array([0.0]))
        assert np.isfinite(value[0])

    def test_double_zero_value_at_origin(self):
        assert float(gstar_2d(1, 0, 0, 0.0, 0.0)) == pytest.approx(27.0 / math.pi ** 2, rel=1e-12)

    def test_vanishes_on_ellipse(self):
        theta = np.linspace(0.0, 2.0 * math.pi, 7)
        # Q(w) = 1 위의 점
        v1, v2 = np.cos(theta), np.sin(theta)
        w1 = v1 - v2 / math.sqrt(3.0)
        w2 = 2.0 * v2 / math.sqrt(3.0)
        assert np.max(np.abs(gstar_2d(1, 1, 2, w1, w2))) < 1e-15

    @pytest.mark.parametrize("k", [1, 2])
    def test_weighted_sum_matches_explicit_sum(self, k):
        rng = np.random.default_rng(11)
        modulus = 3 * k
        weights = rng.normal(size=(modulus, modulus)) + 1j * rng.normal(size=(modulus, modulus))
        w1 = rng.uniform(-1.5, 1.5, 40)
        w2 = rng.uniform(-1.5, 1.5, 40)
        expected = sum(
            weights[r1, r2] * g2d(k, r1, r2, w1, w2) for r1 in range(modulus) for r2 in range(modulus)
        )
        np.testing.assert_allclose(g2d_weighted_sum(k, weights, w1, w2, chunk=16), expected, rtol=1e-11, atol=1e-11)

    def test_weighted_sum_shape_check(self):
        with pytest.raises(ValueError):
            g2d_weighted_sum(2, np.ones((3, 3)), np.zeros(4), np.zeros(4))
