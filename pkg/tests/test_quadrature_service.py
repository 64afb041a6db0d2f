import math

import numpy as np
import pytest
from scipy.special import beta

from services.quadrature_service import (
    elliptic_region_rule,
    gauss_legendre,
    gaussian_half_width,
    mapped_gauss_legendre,
    truncated_line_rule,
    truncated_plane_rule,
)
from services.special_functions import quadratic_form

SQRT3 = math.sqrt(3.0)


class TestIntervalRule:
    def test_weights_sum(self):
        rule = gauss_legendre(200)
        assert rule.weights.sum() == pytest.approx(2.0, rel=1e-14)

    def test_boundary_power_integral(self):
        # ∫(1-w²)^{5/4} dw = B(1/2, 9/4)
        rule = gauss_legendre(200)
        value = rule.integrate(np.power(1.0 - rule.nodes ** 2, 1.25))
        assert value == pytest.approx(beta(0.5, 2.25), abs=1e-9)

    def test_mapped_polynomial_exact(self):
        nodes, weights = mapped_gauss_legendre(0.0, 3.0, 5)
        assert np.dot(weights, nodes ** 7) == pytest.approx(3.0 ** 8 / 8, rel=1e-13)

    def test_complex_integrand(self):
        rule = gauss_legendre(40)
        value = rule.integrate(np.exp(1j * rule.nodes))
        assert value == pytest.approx(2.0 * math.sin(1.0), rel=1e-14)

    def test_invalid_order(self):
        with pytest.raises(ValueError):
            gauss_legendre(0)


class TestEllipticRegion:
    def test_area(self):
        rule = elliptic_region_rule(120, 160)
        assert rule.weights.sum() == pytest.approx(2.0 * math.pi / SQRT3, rel=1e-13)
        assert rule.size == 120 * 160

    def test_nodes_inside(self):
        rule = elliptic_region_rule(20, 24)
        assert np.all(quadratic_form(rule.w1, rule.w2) <= 1.0 + 1e-12)

    def test_quadratic_moment(self):
        rule = elliptic_region_rule(10, 16)
        value = rule.integrate(quadratic_form(rule.w1, rule.w2))
        assert value == pytest.approx(math.pi / SQRT3, rel=1e-13)

    def test_odd_integrand_vanishes(self):
        rule = elliptic_region_rule(120, 160)
        w1, w2 = rule.w1, rule.w2
        assert abs(rule.integrate(w1)) < 1e-14
        assert abs(rule.integrate(w1 * w2 * w2)) < 1e-14

    def test_scaled_region(self):
        rule = elliptic_region_rule(10, 16, scale=0.5)
        assert rule.weights.sum() == pytest.approx(0.25 * 2.0 * math.pi / SQRT3, rel=1e-13)

    def test_boundary_weighted_integral_converges(self):
        def integral(radial, angular):
            rule = elliptic_region_rule(radial, angular)
            q = quadratic_form(rule.w1, rule.w2)
            return rule.integrate(np.power(np.clip(1.0 - q, 0.0, None), 1.25) * np.cosh(rule.w1))

        base = integral(120, 160)
        assert abs(integral(240, 320) - base) < 1e-8 * abs(base)


class TestTruncatedRules:
    def test_half_width(self):
        W = gaussian_half_width(2.0, 1e-16)
        assert math.exp(-2.0 * W * W) == pytest.approx(1e-16, rel=1e-9)

    def test_line_gaussian(self):
        rule = truncated_line_rule(gaussian_half_width(1.0, 1e-18), 120)
        assert rule.integrate(np.exp(-rule.nodes ** 2)) == pytest.approx(math.sqrt(math.pi), rel=1e-13)

    def test_plane_gaussian(self):
        rate = 2.0 * math.pi / 3.0
        rule = truncated_plane_rule(gaussian_half_width(rate, 1e-18), 80)
        value = rule.integrate(np.exp(-rate * quadratic_form(rule.w1, rule.w2)))
        assert value == pytest.approx(SQRT3, rel=1e-12)

    def test_plane_delegates_in_one_dimension(self):
        rule = truncated_plane_rule(3.0, 30, dim=1)
        assert rule.kind == "real-line"
        assert rule.size == 30
