# services/completion_service.py
"""U(2) 완비 ĥ_α 와 f₃,μ 의 mock 변환식(S 형 행렬) 수치 검사"""

import cmath
import logging
import math
from fractions import Fraction
from typing import Optional

import numpy as np

from services.config import QuadratureConfig
from services.eichler_service import EichlerService, theta
from services.errors import PreconditionError
from services.models import EichlerPoint, ThetaIndex, UnimodularMatrix
from services.multiplier_service import chi
from services.qseries_service import eta_power_series, f2_series, f3_series, h2_series
from services.quadrature_service import mapped_gauss_legendre
from services.reference.h3_coefficients import H3Coefficients

logger = logging.getLogger(__name__)

SQRT2 = math.sqrt(2.0)
SQRT3 = math.sqrt(3.0)


class CompletionService:
    def __init__(self, quad: Optional[QuadratureConfig] = None, eichler: Optional[EichlerService] = None):
        self.quad = quad or QuadratureConfig()
        self.eichler = eichler or EichlerService(self.quad)

    def period_integral(self, alpha: int, tau: complex) -> complex:
        """∫₀^∞ ϑ_{α/2}(-τ̄ + it)·(2y + t)^{-3/2} dt, y = Im τ"""
        x, y = tau.real, tau.imag
        ell = Fraction(alpha, 2)
        min_square = 1.0 if alpha == 0 else 0.25
        budget = math.log(1.0 / self.quad.tail_eps) + math.log(10.0)
        upper = max(budget / (2.0 * math.pi * min_square) - y, 1.0)
        t, weights = mapped_gauss_legendre(0.0, upper, self.quad.direct_order)

        values = np.empty(t.shape, dtype=complex)
        for i, ti in enumerate(t):
            value = theta(ThetaIndex(ell=ell), complex(-x, y + ti), self.quad.tail_eps)
            if alpha == 0:
                value -= 1.0
            values[i] = value * (2.0 * y + ti) ** -1.5
        total = complex(np.dot(weights, values))
        if alpha == 0:
            total += 2.0 / math.sqrt(2.0 * y)
        return total

    def h2_completion(self, alpha: int, tau: complex, n_max: int = 30) -> complex:
        """ĥ_α(τ) = h_α(τ) - (i/(4√2π))∫_{-τ̄}^{i∞} ϑ_{α/2}(w)(-i(w+τ))^{-3/2} dw"""
        holomorphic = h2_series(alpha, n_max).evaluate(tau)
        # w = -τ̄ + it 이면 dw = i·dt, -i(w+τ) = 2y + t
        return holomorphic + self.period_integral(alpha, tau) / (4.0 * SQRT2 * math.pi)

    def trans3_residual_S(self, alpha: int, tau: complex, n_max: int = 30) -> float:
        lhs = self.h2_completion(alpha, -1.0 / tau, n_max)
        weight = (-1j * tau) ** 1.5 / SQRT2
        rhs = -weight * sum(
            (-1) ** (alpha * beta) * self.h2_completion(beta, tau, n_max) for beta in range(2)
        )
        return abs(lhs - rhs)

    def trans3_residual_T(self, alpha: int, tau: complex, n_max: int = 30) -> float:
        lhs = self.h2_completion(alpha, tau + 1.0, n_max)
        rhs = (1j ** ((-alpha * alpha) % 4)) * self.h2_completion(alpha, tau, n_max)
        return abs(lhs - rhs)

    def verify_mock_transformation(self, mu: int, M: UnimodularMatrix, tau: complex,
                                   n_max: int = 30, tolerance: float = 1e-6,
                                   include_mock_terms: bool = True) -> float:
        """f₃,μ(τ)(-i(cτ+d))^{-3/2} 와 Σ_ν χ_M(ν,μ)[...] 의 차이 |LHS - RHS|.

        a = 0, c = 1 인 행렬 (S·T^d) 만 받는다. 이때 ϱ = -a/c = 0 이고 E 들은
        τ′ = i·z 에서 직접 표현으로 평가된다.
        """
        if M.a != 0 or M.c != 1:
            raise PreconditionError("mock transformation check supports matrices with a = 0, c = 1 only")
        tau_prime = M.act(tau)
        if min(tau.imag, tau_prime.imag) < 0.8:
            raise PreconditionError("both tau and its image need Im >= 0.8 for the truncated series")

        def truncated_f3(residue: int):
            flux_mu = residue if residue < 2 else -1
            return f3_series(flux_mu, min(n_max, H3Coefficients.horizon(residue)))

        f3_here = truncated_f3(mu % 3)
        f_alpha = [f2_series(alpha, n_max) for alpha in range(2)]
        f_plain = eta_power_series(-9, n_max)

        estimates = [f3_here.truncation_estimate(tau)]
        estimates += [truncated_f3(nu).truncation_estimate(tau_prime) for nu in range(3)]
        estimates += [series.truncation_estimate(tau_prime) for series in f_alpha + [f_plain]]
        if max(estimates) > tolerance:
            raise PreconditionError(
                f"series truncation estimate {max(estimates):.2e} exceeds tolerance {tolerance:.1e}"
            )

        lhs = f3_here.evaluate(tau) * (-1j * M.automorphy(tau)) ** -1.5

        point = EichlerPoint(hprime=0, k=1, z=-1j * tau_prime)
        one_dim = 9.0 * SQRT3 * 1j / (2.0 * SQRT2 * math.pi)
        two_dim = 9.0 * SQRT3 / (16.0 * math.pi ** 2)
        f_alpha_values = [series.evaluate(tau_prime) for series in f_alpha]
        f_value = f_plain.evaluate(tau_prime)

        rhs = 0j
        for nu in range(3):
            bracket = truncated_f3(nu).evaluate(tau_prime)
            if include_mock_terms:
                bracket -= one_dim * sum(
                    f_alpha_values[alpha] * self.eichler.E1_direct(2 * nu + 3 * alpha, point)
                    for alpha in range(2)
                )
                bracket -= two_dim * f_value * self.eichler.E2_direct(nu, point)
            rhs += chi(M, nu, mu) * bracket

        residual = abs(lhs - rhs)
        logger.debug(f"📊 mock transformation mu={mu} tau={tau}: residual {residual:.3e}")
        return residual
