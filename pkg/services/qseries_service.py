# services/qseries_service.py
"""정확한 유리수 q-급수: Hurwitz 류수, η 거듭제곱, h₃,μ 표, α₃,μ(n) 오라클"""

import logging
import math
from fractions import Fraction
from functools import lru_cache
from typing import List, Tuple

from services.errors import HorizonExceededError
from services.models import FluxClass, RationalQSeries
from services.reference.h3_coefficients import H3Coefficients

logger = logging.getLogger(__name__)


@lru_cache(maxsize=None)
def hurwitz_class_number(N: int) -> Fraction:
    """H(N): 판별식 -N 인 양의 정부호 이차형식의 가중 류수.

    간약형 |b| ≤ a ≤ c (|b| = a 또는 a = c 이면 b ≥ 0) 을 직접 센다.
    a(x²+y²) 와 동치인 형식은 1/2, a(x²+xy+y²) 와 동치인 형식은 1/3 로 센다.
    """
    if N < 0:
        raise ValueError("Hurwitz class numbers are defined for N >= 0")
    if N == 0:
        return Fraction(-1, 12)
    if N % 4 in (1, 2):
        return Fraction(0)

    total = Fraction(0)
    a = 1
    while 3 * a * a <= N:
        for b in range(-a + 1, a + 1):
            numerator = b * b + N
            if numerator % (4 * a):
                continue
            c = numerator // (4 * a)
            if c < a:
                continue
            if b < 0 and a == c:
                continue
            if b == 0 and a == c:
                total += Fraction(1, 2)
            elif b == a and a == c:
                total += Fraction(1, 3)
            else:
                total += 1
        a += 1
    return total


def h2_series(alpha: int, n_max: int) -> RationalQSeries:
    """h_α = Σ H(4n+3α) q^{n+3α/4}"""
    if alpha not in (0, 1):
        raise ValueError("alpha must be 0 or 1")
    if n_max < 0:
        raise ValueError("n_max must be nonnegative")
    coeffs = tuple(hurwitz_class_number(4 * n + 3 * alpha) for n in range(n_max + 1))
    return RationalQSeries(offset=Fraction(3 * alpha, 4), coeffs=coeffs)


@lru_cache(maxsize=None)
def _divisor_sum(n: int) -> int:
    total = 0
    for d in range(1, math.isqrt(n) + 1):
        if n % d == 0:
            total += d
            if d * d != n:
                total += n // d
    return total


@lru_cache(maxsize=64)
def _eta_power_coeffs(exponent: int, n_max: int) -> Tuple[Fraction, ...]:
    # P = ∏(1-qⁿ)^e 에 대해 n·a_n = -e·Σ σ(k) a_{n-k}
    coeffs: List[Fraction] = [Fraction(1)]
    for n in range(1, n_max + 1):
        acc = sum(_divisor_sum(k) * coeffs[n - k] for k in range(1, n + 1))
        coeffs.append(Fraction(-exponent * acc, n))
    return tuple(coeffs)


def eta_power_series(exponent: int, n_max: int) -> RationalQSeries:
    """η^e = q^{e/24} ∏(1-qⁿ)^e"""
    if n_max < 0:
        raise ValueError("n_max must be nonnegative")
    return RationalQSeries(offset=Fraction(exponent, 24), coeffs=_eta_power_coeffs(exponent, n_max))


def _as_flux(mu) -> FluxClass:
    return mu if isinstance(mu, FluxClass) else FluxClass(mu=mu)


def h3_series(mu, n_max: int) -> RationalQSeries:
    flux = _as_flux(mu)
    horizon = H3Coefficients.horizon(flux.residue)
    if n_max > horizon:
        logger.warning(f"⚠️ h3 horizon exceeded: mu={flux.mu}, n_max={n_max}, horizon={horizon}")
        raise HorizonExceededError(flux.mu, n_max, horizon)
    coeffs = H3Coefficients.coefficients(flux.residue)[: n_max + 1]
    return RationalQSeries(offset=H3Coefficients.offset(flux.residue), coeffs=coeffs)


def f3_series(mu, n_max: int) -> RationalQSeries:
    """f₃,μ = h₃,μ / η⁹ (q^{-Δ_μ} 부터 시작)"""
    flux = _as_flux(mu)
    series = h3_series(flux, n_max) * eta_power_series(-9, n_max)
    assert series.offset == -flux.delta, "exponent bookkeeping of f3 broke"
    return series


def f2_series(alpha: int, n_max: int) -> RationalQSeries:
    """f_α = h_α / η⁹"""
    return h2_series(alpha, n_max) * eta_power_series(-9, n_max)


def oracle_alpha3(mu, n: int) -> Fraction:
    """α₃,μ(n): h₃,μ 와 η⁻⁹ 의 정확한 합성곱"""
    if n < 0:
        raise ValueError("n must be nonnegative")
    return f3_series(mu, n).coefficient(n)


def oracle_table(mu, n_max: int) -> List[Fraction]:
    series = f3_series(mu, n_max)
    return list(series.coeffs)
