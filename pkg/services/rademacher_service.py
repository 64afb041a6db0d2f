# services/rademacher_service.py
"""α₃,μ(n) 의 Rademacher 형 정확 공식: 세 급수 𝒜₁, 𝒜₂, 𝒜₃ 와 점근식"""

import asyncio
import logging
import math
from fractions import Fraction
from typing import List, Optional, Tuple

import numpy as np

from services.config import QuadratureConfig, Settings
from services.errors import NumericalOverflowError, PreconditionError, RealnessError
from services.models import FluxClass, KloostermanKey, RademacherConfig, SeriesBreakdown, SeriesRow
from services.multiplier_service import KloostermanService
from services.quadrature_service import elliptic_region_rule, gauss_legendre
from services.special_functions import (
    GSTAR_SCALE,
    bessel_i52_scaled,
    boundary_factor,
    g2d_weighted_sum,
    gstar_1d,
    quadratic_form,
)

logger = logging.getLogger(__name__)

# 𝒜₁ 의 x = π√(6n_μ)/k 가 이 값을 넘으면 e^x 를 따로 들고 다닌다
SCALED_PATH_THRESHOLD = 600.0
# 오차 추정 C·N^{-3/2}(1 + log N)², n = 5 의 두 표에서 맞춘 상수
ERROR_CONSTANT = 0.27
REALNESS_TOLERANCE = 1e-10


def _flux(mu) -> FluxClass:
    return mu if isinstance(mu, FluxClass) else FluxClass(mu=mu)


def _bessel_argument(n_mu: Fraction, k: int) -> float:
    return math.pi * math.sqrt(6.0 * float(n_mu)) / k


def _prefactor(n_mu: Fraction) -> float:
    return (6.0 / float(n_mu)) ** 1.25


def _exponentiate(mantissa: float, exponent: float, label: str) -> float:
    """mantissa·e^{exponent}, 범위를 넘으면 NumericalOverflowError"""
    if mantissa == 0.0:
        return 0.0
    log_size = math.log(abs(mantissa)) + exponent
    if log_size > 709.0:
        raise NumericalOverflowError(f"{label}: value e^{log_size:.1f} exceeds double range")
    if exponent > SCALED_PATH_THRESHOLD:
        return math.copysign(math.exp(log_size), mantissa)
    return mantissa * math.exp(exponent)


def _assert_real(label: str, value: complex, scale: float) -> float:
    if abs(value.imag) > REALNESS_TOLERANCE * max(scale, 1e-300):
        logger.error(f"❌ {label}: imaginary residue {value.imag:.3e}")
        raise RealnessError(label, value, scale)
    return value.real


def alpha3_asymptotic(n: int) -> float:
    """세 항 점근식 (1/(4(6n)^{3/2}))e^{π√(6n)}·(1 - 81/(8π(6n)^{1/4}) + (243√3/(16π²) - 3/π)/(6n)^{1/2})"""
    if n < 1:
        raise PreconditionError("the asymptotic expansion needs n >= 1")
    six_n = 6.0 * n
    bracket = (
        1.0
        - 81.0 / (8.0 * math.pi * six_n ** 0.25)
        + (243.0 * math.sqrt(3.0) / (16.0 * math.pi ** 2) - 3.0 / math.pi) / math.sqrt(six_n)
    )
    if bracket == 0.0:
        return 0.0
    log_value = math.pi * math.sqrt(six_n) - math.log(4.0) - 1.5 * math.log(six_n) + math.log(abs(bracket))
    return math.copysign(math.exp(log_value), bracket)


def asymptotic_bracket(n: int) -> float:
    six_n = 6.0 * n
    return (
        1.0
        - 81.0 / (8.0 * math.pi * six_n ** 0.25)
        + (243.0 * math.sqrt(3.0) / (16.0 * math.pi ** 2) - 3.0 / math.pi) / math.sqrt(six_n)
    )


def leading_monomial(n_value: float) -> float:
    """(1/(4(6n)^{3/2}))e^{π√(6n)} (n 은 실수 허용)"""
    six_n = 6.0 * n_value
    return math.exp(math.pi * math.sqrt(six_n) - math.log(4.0) - 1.5 * math.log(six_n))


class RademacherService:
    def __init__(self, settings: Optional[Settings] = None, kloosterman: Optional[KloostermanService] = None):
        self.settings = settings or Settings()
        self.kloosterman = kloosterman or KloostermanService()

    @property
    def quad(self) -> QuadratureConfig:
        return self.settings.quad

    # ------------------------------------------------------------ 개별 항

    def _n_mu(self, flux: FluxClass, n: int) -> Fraction:
        n_mu = flux.n_mu(n)
        if n_mu <= 0:
            raise PreconditionError(
                f"n_mu = {n_mu} <= 0 for mu={flux.mu}, n={n}: this coefficient is the polar term itself"
            )
        return n_mu

    def term_A1(self, mu, n: int, k: int) -> float:
        """(π/144)(6/n_μ)^{5/4}·K_k(μ,0;n,0,0)/k·I_{5/2}(π√(6n_μ)/k)"""
        flux = _flux(mu)
        n_mu = self._n_mu(flux, n)
        x = _bessel_argument(n_mu, k)
        kloosterman = self.kloosterman.kloosterman(KloostermanKey(k=k, mu=flux.mu, nu=0, n_mu=n_mu))
        # K_k 는 |항| <= 1 인 φ(k) 개의 합이라 상쇄로 0 이 될 수 있다
        units = float(self.kloosterman.unit_count(k))
        value = _assert_real(f"A1(mu={flux.mu}, n={n}, k={k})", kloosterman, max(abs(kloosterman), units))
        mantissa = math.pi / 144.0 * _prefactor(n_mu) * value / k * bessel_i52_scaled(x)
        return _exponentiate(mantissa, x, f"A1 k={k}")

    def term_A2(self, mu, n: int, k: int) -> float:
        """-(9π/512)(6/n_μ)^{5/4} Σ_r K_k(μ,r mod 3;n,r,0)/k²·∫ g*_{k,r}(w) I_{5/2}(x√(1-w²)) dw"""
        flux = _flux(mu)
        n_mu = self._n_mu(flux, n)
        x = _bessel_argument(n_mu, k)
        rule = gauss_legendre(self.quad.interval_order)
        w = rule.nodes
        root = np.sqrt(np.clip(1.0 - w * w, 0.0, None))
        # I(x√(1-w²)) = e^{x}·e^{x(√(1-w²)-1)}·ive(·)
        bessel = np.exp(x * (root - 1.0)) * bessel_i52_scaled(x * root)

        units = float(self.kloosterman.unit_count(k))
        total = 0j
        scale = 0.0
        for r in range(3 * k):
            key = KloostermanKey(k=k, mu=flux.mu, nu=r % 3, n_mu=n_mu, r1=r, r2=0)
            weight = self.kloosterman.kloosterman(key)
            integral = rule.integrate(gstar_1d(k, r, w) * bessel)
            total += weight * integral
            scale += max(abs(weight), units) * abs(integral)
        value = _assert_real(f"A2(mu={flux.mu}, n={n}, k={k})", total, scale)
        mantissa = -9.0 * math.pi / 512.0 * _prefactor(n_mu) * value / (k * k)
        return _exponentiate(mantissa, x, f"A2 k={k}")

    def term_A3(self, mu, n: int, k: int) -> float:
        """(3π/1024)(6/n_μ)^{5/4} Σ_{r₁,r₂} K_k(μ,ν;n,r₁,r₂)/k³·∫_{Q≤1} g*_{k,r}(w) I_{5/2}(x√(1-Q)) dw"""
        flux = _flux(mu)
        n_mu = self._n_mu(flux, n)
        x = _bessel_argument(n_mu, k)
        rule = elliptic_region_rule(self.quad.radial_order, self.quad.angular_order)
        w1, w2 = rule.w1, rule.w2
        q = quadratic_form(w1, w2)
        root = np.sqrt(np.clip(1.0 - q, 0.0, None))
        radial = boundary_factor(q) * np.exp(x * (root - 1.0)) * bessel_i52_scaled(x * root)

        weights = self.kloosterman.class_weights(k, flux.mu, n_mu)
        kernel = g2d_weighted_sum(k, weights, GSTAR_SCALE * w1, GSTAR_SCALE * w2)
        total = rule.integrate(kernel * radial)
        # 크기 기준: 가중치 절댓값과 φ(k) 중 큰 쪽으로 같은 적분을 다시 잰다
        units = float(self.kloosterman.unit_count(k))
        floor = np.maximum(np.abs(weights), units)
        scale = rule.integrate(np.abs(g2d_weighted_sum(k, floor, GSTAR_SCALE * w1, GSTAR_SCALE * w2)) * radial)
        value = _assert_real(f"A3(mu={flux.mu}, n={n}, k={k})", complex(total), abs(scale))
        mantissa = 3.0 * math.pi / 1024.0 * _prefactor(n_mu) * value / k ** 3
        return _exponentiate(mantissa, x, f"A3 k={k}")

    def k_terms(self, mu, n: int, k: int) -> Tuple[float, float, float]:
        return self.term_A1(mu, n, k), self.term_A2(mu, n, k), self.term_A3(mu, n, k)

    # ------------------------------------------------------------ 전체 합

    async def alpha3_rademacher_async(self, cfg: RademacherConfig) -> SeriesBreakdown:
        """k = 1..N 을 스레드에 나눠 계산하고 k 오름차순으로 합친다."""
        if cfg.quad != self.quad:
            self.settings = self.settings.model_copy(update={"quad": cfg.quad})
        logger.info(f"🚀 Rademacher sum: mu={cfg.flux.mu}, n={cfg.n}, N={cfg.N}, threads={self.settings.threads}")
        n_mu = self._n_mu(cfg.flux, cfg.n)
        semaphore = asyncio.Semaphore(self.settings.threads)

        async def prefetch(k: int, r1: int) -> None:
            async with semaphore:
                await asyncio.to_thread(self.kloosterman.class_row, k, cfg.flux.mu, n_mu, r1)

        async def run(k: int) -> Tuple[float, float, float]:
            # 같은 k 안에서도 r₁ 별 Kloosterman 행을 나눠 채운다
            await asyncio.gather(*(prefetch(k, r1) for r1 in range(3 * k)))
            async with semaphore:
                terms = await asyncio.to_thread(self.k_terms, cfg.flux, cfg.n, k)
                logger.debug(f"✅ k={k}: A1={terms[0]:.6f} A2={terms[1]:.6f} A3={terms[2]:.6f}")
                return terms

        results = await asyncio.gather(*(run(k) for k in range(1, cfg.N + 1)))
        return self._assemble(cfg, results)

    def alpha3_rademacher(self, cfg: RademacherConfig) -> SeriesBreakdown:
        return asyncio.run(self.alpha3_rademacher_async(cfg))

    def _assemble(self, cfg: RademacherConfig, results: List[Tuple[float, float, float]]) -> SeriesBreakdown:
        rows = []
        a1_terms: List[float] = []
        a2_terms: List[float] = []
        a3_terms: List[float] = []
        for k, (a1, a2, a3) in enumerate(results, start=1):
            a1_terms.append(a1)
            a2_terms.append(a2)
            a3_terms.append(a3)
            a1_cum = math.fsum(a1_terms)
            a2_cum = math.fsum(a2_terms)
            a3_cum = math.fsum(a3_terms)
            rows.append(
                SeriesRow(
                    k=k, A1_k=a1, A2_k=a2, A3_k=a3,
                    A1_cum=a1_cum, A2_cum=a2_cum, A3_cum=a3_cum,
                    total=a1_cum + a2_cum + a3_cum,
                )
            )
        N = cfg.N
        error = ERROR_CONSTANT * N ** -1.5 * (1.0 + math.log(N)) ** 2
        breakdown = SeriesBreakdown(
            mu=cfg.flux.mu, n=cfg.n, N=N, rows=rows, total=rows[-1].total, error_estimate=error
        )
        logger.info(f"📊 total = {breakdown.total:.6f} (error estimate {error:.1e})")
        return breakdown
