import math
from fractions import Fraction

import pytest

from services.errors import DomainError, HorizonExceededError
from services.models import FluxClass, RationalQSeries
from services.qseries_service import (
    eta_power_series,
    f2_series,
    f3_series,
    h2_series,
    h3_series,
    hurwitz_class_number,
    oracle_alpha3,
    oracle_table,
)

H0_COEFFS = [Fraction(-1, 12), Fraction(1, 2), 1, Fraction(4, 3), Fraction(3, 2), 2, 2, 2, 3, Fraction(5, 2), 2]
H1_COEFFS = [Fraction(1, 3), 1, 1, 2, 1, 3, Fraction(4, 3), 3, 2, 4]
ETA_MINUS_NINE = [1, 9, 54, 255, 1035, 3753, 12483, 38709, 113265, 315445, 841842]
ALPHA_MU_ZERO = [Fraction(1, 9), 0, 0, Fraction(55, 3), 216, 1512, 8110, 36612]
ALPHA_MU_ONE = [3, 42, 333, 1968, 9609, 40881, 156486]


class TestHurwitz:
    def test_h0_coefficients(self):
        assert list(h2_series(0, 10).coeffs) == H0_COEFFS

    def test_h1_coefficients(self):
        assert list(h2_series(1, 9).coeffs) == H1_COEFFS

    def test_h1_offset(self):
        assert h2_series(1, 3).offset == Fraction(3, 4)

    @pytest.mark.parametrize("N", [1, 2, 5, 6, 9, 10])
    def test_vanishes_for_residues_one_and_two(self, N):
        assert hurwitz_class_number(N) == 0

    def test_negative_argument(self):
        with pytest.raises(ValueError):
            hurwitz_class_number(-3)


class TestEtaPowers:
    def test_eta_minus_nine(self):
        series = eta_power_series(-9, 10)
        assert series.offset == Fraction(-3, 8)
        assert list(series.coeffs) == ETA_MINUS_NINE

    def test_eta_product_is_one(self):
        product = eta_power_series(9, 12) * eta_power_series(-9, 12)
        assert product.offset == 0
        assert list(product.coeffs) == [1] + [0] * 12

    def test_eta_to_the_first_is_euler_product(self):
        # ∏(1-qⁿ) = 1 - q - q² + q⁵ + q⁷ - q¹² - ...
        series = eta_power_series(1, 12)
        assert list(series.coeffs) == [1, -1, -1, 0, 0, 1, 0, 1, 0, 0, 0, 0, -1]


class TestOracle:
    @pytest.mark.parametrize("n,expected", list(enumerate(ALPHA_MU_ZERO)))
    def test_mu_zero(self, n, expected):
        assert oracle_alpha3(0, n) == expected

    @pytest.mark.parametrize("n,expected", list(enumerate(ALPHA_MU_ONE)))
    def test_mu_one(self, n, expected):
        assert oracle_alpha3(1, n) == expected

    def test_mu_zero_at_horizon(self):
        assert oracle_alpha3(0, 10) == 1770498

    def test_mu_minus_one_equals_mu_one(self):
        assert oracle_table(-1, 6) == oracle_table(1, 6)

    def test_f3_offsets(self):
        assert f3_series(0, 4).offset == Fraction(-3, 8)
        assert f3_series(1, 4).offset == Fraction(31, 24)
        assert f3_series(-1, 4).offset == -FluxClass(mu=-1).delta

    def test_f2_leading_coefficient(self):
        assert f2_series(0, 3).coefficient(0) == Fraction(-1, 12)
        assert f2_series(1, 3).offset == Fraction(3, 4) - Fraction(3, 8)


class TestHorizon:
    def test_mu_zero_horizon_named(self):
        with pytest.raises(HorizonExceededError) as info:
            oracle_table(0, 30)
        assert info.value.horizon == 10
        assert "10" in str(info.value)

    def test_mu_one_horizon(self):
        with pytest.raises(HorizonExceededError) as info:
            h3_series(1, 7)
        assert info.value.horizon == 6

    def test_exit_code(self):
        assert HorizonExceededError(0, 11, 10).exit_code == 4


class TestRationalQSeries:
    def test_evaluate_rejects_lower_half_plane(self):
        with pytest.raises(DomainError):
            eta_power_series(-9, 4).evaluate(complex(0.1, -0.5))

    def test_evaluate_geometric(self):
        series = RationalQSeries(offset=0, coeffs=tuple([1] * 60))
        value = series.evaluate(1j)
        expected = 1.0 / (1.0 - math.exp(-2 * math.pi))
        assert value.real == pytest.approx(expected, rel=1e-14)
        assert abs(value.imag) < 1e-15

    def test_coefficient_beyond_range(self):
        with pytest.raises(IndexError):
            eta_power_series(-9, 3).coefficient(4)

    def test_product_truncates_to_shorter(self):
        product = eta_power_series(-9, 8) * h2_series(0, 3)
        assert product.n_max == 3

    def test_json_rendering(self):
        data = h2_series(1, 1).to_json()
        assert data["offset"] == "3/4"
        assert data["coeffs"] == ["1/3", "1/1"]

    def test_truncation_estimate_small_at_large_height(self):
        assert f3_series(1, 6).truncation_estimate(1j) < 1e-12
