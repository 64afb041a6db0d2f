import cmath
import math
from fractions import Fraction

import numpy as np
import pytest

from services.config import QuadratureConfig
from services.eichler_service import (
    EichlerService,
    mordell_2d_weights,
    theta,
    theta_on_cusp_path,
    theta_trans1_residual,
    theta_trans2_residual,
)
from services.errors import ConvergenceError, PreconditionError
from services.models import EichlerPoint, ThetaIndex, UnimodularMatrix


@pytest.fixture(scope="module")
def eichler() -> EichlerService:
    return EichlerService(QuadratureConfig())


class TestTheta:
    def test_rejects_real_axis(self):
        with pytest.raises(ConvergenceError):
            theta(ThetaIndex(ell=0), complex(0.3, 0.0))

    def test_jacobi_value_at_i(self):
        # ϑ₃(e^{-π}) = π^{1/4}/Γ(3/4), ϑ_0(τ) = Σ e^{2πiτn²} 이므로 τ = i/2
        expected = math.pi ** 0.25 / math.gamma(0.75)
        assert theta(ThetaIndex(ell=0), 0.5j).real == pytest.approx(expected, rel=1e-14)

    @pytest.mark.parametrize("alpha", [0, 1])
    def test_trans1_at_S(self, alpha):
        assert theta_trans1_residual(UnimodularMatrix.S(), complex(1.0, 3.0) / 2, alpha) < 1e-12

    @pytest.mark.parametrize("name", ["S", "T"])
    @pytest.mark.parametrize("mu", range(3))
    @pytest.mark.parametrize("alpha", [0, 1])
    def test_trans2(self, name, mu, alpha):
        M = UnimodularMatrix.S() if name == "S" else UnimodularMatrix.T()
        rng = np.random.default_rng(5)
        for _ in range(5):
            tau = complex(rng.uniform(-0.5, 0.5), rng.uniform(0.6, 1.5))
            assert theta_trans2_residual(M, tau, mu, alpha) < 1e-10

    def test_cusp_path_matches_direct_series(self):
        t = np.array([0.05, 0.3, 2.0])
        values = theta_on_cusp_path(Fraction(1, 3), 3, 0, 1, t)
        for ti, value in zip(t, values):
            assert value == pytest.approx(theta(ThetaIndex(ell=Fraction(1, 3), scale=3), 1j * ti), rel=1e-13)

    def test_cusp_path_phase(self):
        # h′/k = 1/2, ℓ = 1/2: n² ≡ 1/4 (mod 2) 이라 위상이 e^{-iπ/4}
        t = np.array([0.4])
        shifted = theta_on_cusp_path(Fraction(1, 2), 1, 1, 2, t)[0]
        plain = theta_on_cusp_path(Fraction(1, 2), 1, 0, 1, t)[0]
        assert shifted == pytest.approx(cmath.exp(-0.25j * math.pi) * plain, rel=1e-13)

    def test_cusp_path_needs_positive_t(self):
        with pytest.raises(ConvergenceError):
            theta_on_cusp_path(Fraction(0), 1, 0, 1, np.array([0.0, 1.0]))


class TestOneDimensional:
    def test_direct_matches_mordell(self, eichler):
        pt = EichlerPoint(hprime=1, k=3, z=0.8)
        assert abs(eichler.E1_direct(2, pt) - eichler.E1_mordell(2, pt)) < 1e-8

    @pytest.mark.parametrize("j,hprime,k,z", [(0, 0, 1, 1.0), (3, 1, 2, 0.7), (1, 2, 5, 1.3)])
    def test_direct_matches_mordell_grid(self, eichler, j, hprime, k, z):
        pt = EichlerPoint(hprime=hprime, k=k, z=z)
        assert abs(eichler.E1_direct(j, pt) - eichler.E1_mordell(j, pt)) < 1e-8

    def test_purely_imaginary_on_real_path(self, eichler):
        value = eichler.E1_direct(0, EichlerPoint(hprime=0, k=1, z=1.0))
        assert math.isfinite(abs(value))
        assert abs(value.real) < 1e-12 * abs(value)

    def test_large_z(self, eichler):
        z = 400.0
        value = eichler.E1_direct(0, EichlerPoint(hprime=0, k=1, z=z))
        assert value == pytest.approx(2j / math.sqrt(z), rel=1e-2)

    def test_principal_empty_for_zero_cutoff(self, eichler):
        pt = EichlerPoint(hprime=0, k=1, z=1.0, b=0)
        assert eichler.E1_principal(1, pt) == 0
        assert eichler.E2_principal(0, pt) == 0

    def test_principal_needs_rademacher_circle(self, eichler):
        with pytest.raises(PreconditionError):
            eichler.E1_principal(1, EichlerPoint(hprime=0, k=1, z=2.0))

    def test_principal_discrepancy_finite(self, eichler):
        pt = EichlerPoint(hprime=1, k=2, z=1.0 / complex(1.0, 0.4))
        assert math.isfinite(eichler.principal_discrepancy(1, 1, pt))

    @pytest.mark.parametrize("y", [-0.6, 0.0, 0.4])
    def test_principal_discrepancy_grows_like_log(self, eichler, y):
        # D₁(k) / (1 + log k) 는 k 에 대해 유계
        z = 1.0 / complex(1.0, y)
        for k in range(1, 13):
            pt = EichlerPoint(hprime=7 % k, k=k, z=z)
            assert eichler.principal_discrepancy(1, 1, pt) / (1.0 + math.log(k)) < 5.0


class TestTwoDimensionalPrincipal:
    ORDER = 48

    @pytest.fixture(scope="class")
    def low(self) -> EichlerService:
        return EichlerService(QuadratureConfig(mordell_order=120, radial_order=48))

    def test_discrepancy_grows_like_log_squared(self, low):
        # D₂(k) / (1 + log k)² 는 k 에 대해 유계
        z = 1.0 / complex(1.0, 0.3)
        for k in range(1, 7):
            pt = EichlerPoint(hprime=5 % k, k=k, z=z)
            assert low.principal_discrepancy(2, 0, pt, order=self.ORDER) / (1.0 + math.log(k)) ** 2 < 20.0

    def test_order_reaches_both_integrals(self, low):
        pt = EichlerPoint(hprime=1, k=3, z=1.0 / complex(1.0, -0.2))
        Z = 1.0 / pt.z
        shifted = EichlerPoint(hprime=pt.hprime, k=pt.k, z=Z, b=pt.b)
        growth = cmath.exp(2.0 * math.pi * float(pt.b) * Z)
        for order in (24, self.ORDER):
            expected = abs(growth * low.E2_mordell(0, shifted, order=order) - low.E2_principal(0, pt, order=order))
            assert low.principal_discrepancy(2, 0, pt, order=order) == expected
        assert low.E2_principal(0, pt, order=24) != low.E2_principal(0, pt, order=self.ORDER)


class TestTwoDimensional:
    @pytest.mark.parametrize("nu", range(3))
    def test_weights_per_class(self, nu):
        weights = mordell_2d_weights(nu, 0, 1)
        assert np.count_nonzero(weights) == 3

    def test_sign_symmetry(self, eichler):
        pt = EichlerPoint(hprime=0, k=1, z=1.0)
        assert eichler.E2_direct(1, pt) == pytest.approx(eichler.E2_direct(2, pt), rel=1e-12)

    def test_large_z(self, eichler):
        z = 400.0
        value = eichler.E2_direct(0, EichlerPoint(hprime=0, k=1, z=z))
        assert value == pytest.approx(-2.0 / z, rel=1e-2)

    @pytest.mark.slow
    @pytest.mark.parametrize("nu,hprime,k,z", [(0, 0, 1, 1.0), (1, 1, 2, 0.7)])
    def test_direct_matches_mordell(self, eichler, nu, hprime, k, z):
        pt = EichlerPoint(hprime=hprime, k=k, z=z)
        assert abs(eichler.E2_direct(nu, pt) - eichler.E2_mordell(nu, pt)) < 1e-6
