# services/eichler_service.py
"""theta 적분 E₁, E₂ 의 직접 표현과 Mordell 표현, 주요부 E₁*, E₂*, theta 변환식 검사"""

import cmath
import logging
import math
from fractions import Fraction
from typing import Optional, Tuple

import numpy as np
from numpy.polynomial import Chebyshev
from numpy.polynomial.chebyshev import chebpts1

from services.config import QuadratureConfig
from services.errors import ConvergenceError, PreconditionError
from services.models import EichlerPoint, ThetaIndex, UnimodularMatrix
from services.multiplier_service import psi2, psi3, roots_of_unity
from services.quadrature_service import (
    elliptic_region_rule,
    gaussian_half_width,
    mapped_gauss_legendre,
    truncated_line_rule,
    truncated_plane_rule,
)
from services.special_functions import g2d_weighted_sum, g_c, quadratic_form, w_g0

logger = logging.getLogger(__name__)

SQRT3 = math.sqrt(3.0)
SQRT6 = math.sqrt(6.0)


# ---------------------------------------------------------------- theta

def _log_budget(tail_eps: float) -> float:
    return math.log(1.0 / tail_eps) + math.log(10.0)


def theta(idx: ThetaIndex, tau: complex, tail_eps: float = 1e-16) -> complex:
    """ϑ_ℓ(scale·τ) = Σ_{n∈ℓ+ℤ} e^{2πi·scale·τ·n²}"""
    if tau.imag <= 0:
        raise ConvergenceError(f"theta series diverges for Im(tau) = {tau.imag} <= 0")
    scaled = idx.scale * tau
    cutoff = int(math.ceil(math.sqrt(_log_budget(tail_eps) / (2.0 * math.pi * scaled.imag)))) + 2
    ell = float(idx.ell - math.floor(idx.ell))
    n = ell + np.arange(-cutoff, cutoff + 1)
    terms = np.exp(2j * math.pi * scaled * n * n)
    return complex(math.fsum(terms.real.tolist()), math.fsum(terms.imag.tolist()))


def _residue_min_square(ell: Fraction) -> float:
    """ℓ+ℤ 의 0 아닌 원소 중 가장 작은 n²"""
    frac = ell - math.floor(ell)
    if frac == 0:
        return 1.0
    return float(min(frac, 1 - frac)) ** 2


def theta_on_cusp_path(ell: Fraction, scale: int, hprime: int, k: int, t: np.ndarray,
                       drop_constant: bool = False, tail_eps: float = 1e-16) -> np.ndarray:
    """ϑ_ℓ(scale·(i·t - h′/k)), t > 0 배열.

    위상 e^{-2πi·scale·h′·n²/k} 는 정수 지수로 정확히 줄여서 계산한다.
    drop_constant 이면 n = 0 항을 뺀다.
    """
    t = np.asarray(t, dtype=float)
    if np.any(t <= 0):
        raise ConvergenceError("cusp-path theta needs t > 0")
    ell = Fraction(ell)
    den = ell.denominator
    p0 = ell.numerator % den
    budget = _log_budget(tail_eps)
    bound = budget / (2.0 * math.pi * scale * float(t.min()))
    cutoff = int(math.ceil(math.sqrt(bound))) + 2

    m = np.arange(-cutoff, cutoff + 1, dtype=np.int64)
    p = p0 + den * m
    if drop_constant:
        p = p[p != 0]
    nsq = (p.astype(float) / den) ** 2
    order = np.argsort(nsq, kind="stable")
    p = p[order]
    nsq = nsq[order]
    phases = roots_of_unity(-scale * hprime * p * p, k * den * den)

    out = np.empty(t.shape, dtype=complex)
    flat_t = t.ravel()
    flat_out = out.ravel()
    for i, ti in enumerate(flat_t):
        count = int(np.searchsorted(nsq, budget / (2.0 * math.pi * scale * ti), side="right"))
        flat_out[i] = np.dot(phases[:count], np.exp(-2.0 * math.pi * scale * ti * nsq[:count]))
    return flat_out.reshape(t.shape)


def theta_trans1_residual(M: UnimodularMatrix, tau: complex, alpha: int) -> float:
    lhs = theta(ThetaIndex(ell=Fraction(alpha, 2)), M.act(tau))
    rhs = cmath.sqrt(M.automorphy(tau)) * sum(
        psi2(M, alpha, beta) * theta(ThetaIndex(ell=Fraction(beta, 2)), tau) for beta in range(2)
    )
    return abs(lhs - rhs)


def theta_trans2_residual(M: UnimodularMatrix, tau: complex, mu: int, alpha: int) -> float:
    lhs = theta(ThetaIndex(ell=Fraction(2 * mu + 3 * alpha, 6), scale=3), M.act(tau))
    rhs = 0j
    for nu in range(3):
        for beta in range(2):
            rhs += (
                psi2(M, alpha, beta).conjugate()
                * psi3(M, mu, nu)
                * theta(ThetaIndex(ell=Fraction(2 * nu + 3 * beta, 6), scale=3), tau)
            )
    return abs(lhs - cmath.sqrt(M.automorphy(tau)) * rhs)


# ---------------------------------------------------------------- Mordell 커널

def mordell_1d_kernel(j: int, hprime: int, k: int, w: np.ndarray) -> np.ndarray:
    """Σ_{r mod 6k, r≡j mod 6} ζ_{12k}^{-h′r²}·w·g_{r/6k}(w/2k)"""
    w = np.asarray(w, dtype=float)
    total = np.zeros(w.shape, dtype=complex)
    for m in range(k):
        r = (j % 6) + 6 * m
        phase = roots_of_unity(np.array([-hprime * r * r]), 12 * k)[0]
        if r % (6 * k) == 0:
            values = 2.0 * k * w_g0(w / (2.0 * k))
        else:
            values = w * g_c(Fraction(r, 6 * k), w / (2.0 * k))
        total += phase * values
    return total


def mordell_2d_weights(nu: int, hprime: int, k: int) -> np.ndarray:
    """W[r₁,r₂] = ζ_{3k}^{-h′Q(r)} (r₁ ≡ r₂ + ν mod 3), 그 외 0"""
    modulus = 3 * k
    r1, r2 = np.meshgrid(np.arange(modulus, dtype=np.int64), np.arange(modulus, dtype=np.int64), indexing="ij")
    weights = roots_of_unity(-hprime * (r1 * r1 + r2 * r2 + r1 * r2), modulus)
    admissible = (r1 - r2 - nu) % 3 == 0
    return np.where(admissible, weights, 0)


class EichlerService:
    """E₁, E₂ 평가기. 구적 차수는 QuadratureConfig 에서 읽는다."""

    def __init__(self, quad: Optional[QuadratureConfig] = None):
        self.quad = quad or QuadratureConfig()

    # ------------------------------------------------------------ E₁

    def E1_direct(self, j: int, pt: EichlerPoint) -> complex:
        """E₁,j(h′/k + iz) = i·∫₀^∞ ϑ_{j/6}(3(it - h′/k))(t+z)^{-3/2} dt"""
        ell = Fraction(j, 6)
        constant = (j % 6) == 0
        z = pt.z
        rate = 6.0 * math.pi * _residue_min_square(ell)
        upper = math.sqrt(_log_budget(self.quad.tail_eps) / rate)

        s, weights = mapped_gauss_legendre(0.0, upper, self.quad.direct_order)
        t = s * s
        thetas = theta_on_cusp_path(ell, 3, pt.hprime, pt.k, t, drop_constant=constant,
                                    tail_eps=self.quad.tail_eps)
        integrand = 2.0 * s * thetas * (t + z) ** -1.5
        total = complex(np.dot(weights, integrand))
        if constant:
            total += 2.0 / cmath.sqrt(z)
        return 1j * total

    def _mordell_1d_integral(self, j: int, hprime: int, k: int, Z: complex,
                             half_width: Optional[float] = None) -> complex:
        # ∫ Σ_r ζ·w·g(w/2k)·e^{-πZw²/6} dw, 기본은 가우스 꼬리로 자른 실직선
        if half_width is None:
            half_width = gaussian_half_width(math.pi * Z.real / 6.0, self.quad.tail_eps * 1e-2)
        rule = truncated_line_rule(half_width, self.quad.mordell_order)
        w = rule.nodes
        values = mordell_1d_kernel(j, hprime, k, w) * np.exp(-math.pi * Z * w * w / 6.0)
        return rule.integrate(values)

    def E1_mordell(self, j: int, pt: EichlerPoint) -> complex:
        prefactor = math.pi * 1j / (3.0 * SQRT6 * pt.k)
        return prefactor * self._mordell_1d_integral(j, pt.hprime, pt.k, pt.z)

    def E1_principal(self, j: int, pt: EichlerPoint) -> complex:
        """E₁*(h′/k + i/z): |w| ≤ 2√(3b) 로 자른 적분에 e^{2πb/z} 를 곱한 값"""
        Z = self._rademacher_variable(pt)
        if pt.b == 0:
            return 0j
        half = 2.0 * math.sqrt(3.0 * float(pt.b))
        prefactor = cmath.exp(2.0 * math.pi * float(pt.b) * Z) * math.pi * 1j / (3.0 * SQRT6 * pt.k)
        return prefactor * self._mordell_1d_integral(j, pt.hprime, pt.k, Z, half_width=half)

    # ------------------------------------------------------------ E₂

    def _inner_antiderivative(self, alpha: int, pt: EichlerPoint) -> Tuple[Chebyshev, Chebyshev, float]:
        """R_α(s) = ∫_s^{S₂} 2σ(σ²+z)^{-3/2}·(ϑ_{α/2}(iσ² - h′/k) - [α=0]) dσ 의 Chebyshev 원시함수"""
        ell = Fraction(alpha, 2)
        rate = 2.0 * math.pi * _residue_min_square(ell)
        upper = math.sqrt(_log_budget(self.quad.tail_eps) / rate)
        degree = self.quad.direct_order
        sigma = 0.5 * upper * (chebpts1(degree + 1) + 1.0)
        thetas = theta_on_cusp_path(ell, 1, pt.hprime, pt.k, sigma * sigma,
                                    drop_constant=(alpha == 0), tail_eps=self.quad.tail_eps)
        values = 2.0 * sigma * thetas * (sigma * sigma + pt.z) ** -1.5
        domain = [0.0, upper]
        real_part = Chebyshev.fit(sigma, values.real, degree, domain=domain).integ()
        imag_part = Chebyshev.fit(sigma, values.imag, degree, domain=domain).integ()
        return real_part, imag_part, upper

    def E2_direct(self, nu: int, pt: EichlerPoint) -> complex:
        """-∫₀^∞ (w₁+z)^{-3/2} ∫_{w₁}^∞ (w₂+z)^{-3/2} Σ_α ϑ_{(2ν+3α)/6}(3(iw₁-h′/k))ϑ_{α/2}(iw₂-h′/k)"""
        z = pt.z
        total = 0j
        for alpha in range(2):
            outer_ell = Fraction(2 * nu + 3 * alpha, 6)
            outer_constant = outer_ell.denominator == 1
            inner_constant = alpha == 0
            if outer_constant and inner_constant:
                # 상수 × 상수: ∫₀^∞ (w+z)^{-3/2}·2(w+z)^{-1/2} dw = 2/z
                total += 2.0 / z

            real_part, imag_part, inner_upper = self._inner_antiderivative(alpha, pt)
            outer_rate = 6.0 * math.pi * _residue_min_square(outer_ell)
            upper = max(math.sqrt(_log_budget(self.quad.tail_eps) / outer_rate), inner_upper)
            s, weights = mapped_gauss_legendre(0.0, upper, self.quad.direct_order)
            t = s * s

            clipped = np.minimum(s, inner_upper)
            remainder = (real_part(inner_upper) - real_part(clipped)) + 1j * (
                imag_part(inner_upper) - imag_part(clipped)
            )
            outer_theta = theta_on_cusp_path(outer_ell, 3, pt.hprime, pt.k, t,
                                             drop_constant=outer_constant, tail_eps=self.quad.tail_eps)
            bracket = outer_theta * remainder
            if outer_constant:
                bracket = bracket + remainder
            if inner_constant:
                bracket = bracket + 2.0 * outer_theta * (t + z) ** -0.5
            integrand = 2.0 * s * (t + z) ** -1.5 * bracket
            total += complex(np.dot(weights, integrand))
        return -total

    def _mordell_2d_integral(self, nu: int, hprime: int, k: int, Z: complex,
                             region_scale: Optional[float] = None, order: Optional[int] = None) -> complex:
        weights = mordell_2d_weights(nu, hprime, k)
        if region_scale is None:
            half_width = gaussian_half_width(2.0 * math.pi * Z.real / 3.0, self.quad.tail_eps * 1e-4)
            rule = truncated_plane_rule(half_width, order or self.quad.mordell_order)
        else:
            radial = order or self.quad.radial_order
            rule = elliptic_region_rule(radial, max(2, 2 * ((4 * radial // 3) // 2)), scale=region_scale)
        w1, w2 = rule.w1, rule.w2
        kernel = g2d_weighted_sum(k, weights, w1, w2)
        values = kernel * np.exp(-2.0 * math.pi * Z * quadratic_form(w1, w2) / 3.0)
        return rule.integrate(values)

    def E2_mordell(self, nu: int, pt: EichlerPoint, order: Optional[int] = None) -> complex:
        prefactor = -2.0 * math.pi ** 2 / (27.0 * SQRT3 * pt.k ** 2)
        return prefactor * self._mordell_2d_integral(nu, pt.hprime, pt.k, pt.z, order=order)

    def E2_principal(self, nu: int, pt: EichlerPoint, order: Optional[int] = None) -> complex:
        """E₂*(h′/k + i/z): Q(w) ≤ 3b 영역의 적분에 e^{2πb/z} 를 곱한 값"""
        Z = self._rademacher_variable(pt)
        if pt.b == 0:
            return 0j
        prefactor = -cmath.exp(2.0 * math.pi * float(pt.b) * Z) * 2.0 * math.pi ** 2 / (27.0 * SQRT3 * pt.k ** 2)
        scale = math.sqrt(3.0 * float(pt.b))
        return prefactor * self._mordell_2d_integral(nu, pt.hprime, pt.k, Z, region_scale=scale, order=order)

    # ------------------------------------------------------------ 주요부 오차

    def principal_discrepancy(self, kind: int, index: int, pt: EichlerPoint,
                              order: Optional[int] = None) -> float:
        """|e^{2πb/z}·E(h′/k + i/z) - E*| (kind = 1 또는 2)"""
        Z = self._rademacher_variable(pt)
        growth = cmath.exp(2.0 * math.pi * float(pt.b) * Z)
        shifted = EichlerPoint(hprime=pt.hprime, k=pt.k, z=Z, b=pt.b)
        if kind == 1:
            full = self.E1_mordell(index, shifted)
            principal = self.E1_principal(index, pt)
        else:
            full = self.E2_mordell(index, shifted, order=order)
            principal = self.E2_principal(index, pt, order=order)
        return abs(growth * full - principal)

    @staticmethod
    def _rademacher_variable(pt: EichlerPoint) -> complex:
        if not pt.on_rademacher_path():
            raise PreconditionError(f"principal parts need Re(1/z) >= 1, got z = {pt.z}")
        return 1.0 / pt.z
