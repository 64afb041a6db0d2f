# services/special_functions.py
"""닫힌 형태 커널: I_{5/2}, g_c, f_c, G_c, g*_{k,r}, 네 경우의 2차원 커널 g_{k,r₁,r₂}.

모든 함수는 numpy 배열에 대해 원소별로 동작한다.
"""

import math
from fractions import Fraction
from typing import Union

import numpy as np
from scipy.special import gammaln

from services.errors import DomainError, PoleError
from services.models import KernelParams

ArrayLike = Union[float, np.ndarray]

A_RATE = 2.0 * math.pi / 3.0
THREE_OVER_PI = 3.0 / math.pi
SQRT2 = math.sqrt(2.0)
GSTAR_SCALE = 3.0 / (2.0 * SQRT2)

# u = πw/3 가 이보다 작으면 coth 관련 함수는 급수로 계산
COTH_SERIES_THRESHOLD = 5e-2
# (G(w₂) - G(w₂ + w₁/2))/w₁ 를 적분형으로 바꾸는 경계
DIFFERENCE_THRESHOLD = 1e-4
BESSEL_SERIES_THRESHOLD = 2.0
# 이 이상에서 g_c ≡ sign(w), f_c ≡ 0 (배정밀도 안에서)
_CLIP = 600.0

_GL4_NODES, _GL4_WEIGHTS = np.polynomial.legendre.leggauss(4)
_GL4_T = 0.5 * (_GL4_NODES + 1.0)
_GL4_W = 0.5 * _GL4_WEIGHTS


# ---------------------------------------------------------------- Bessel I_{5/2}

def _bessel_series_scaled(x: np.ndarray) -> np.ndarray:
    # Σ (x/2)^{2m+5/2} / (m! Γ(m+7/2)), 로그 공간에서 항을 만든 뒤 e^{-x} 를 곱한다
    out = np.zeros_like(x)
    positive = x > 0
    xp = x[positive]
    log_half = np.log(xp / 2.0)
    total = np.zeros_like(xp)
    for m in range(40):
        total += np.exp((2 * m + 2.5) * log_half - gammaln(m + 1) - gammaln(m + 3.5) - xp)
    out[positive] = total
    return out


def _bessel_closed_scaled(x: np.ndarray) -> np.ndarray:
    # e^{-x}·√(2/(πx))·((1 + 3/x²) sinh x - (3/x) cosh x)
    decay = np.exp(-2.0 * x)
    sinh_scaled = 0.5 * (1.0 - decay)
    cosh_scaled = 0.5 * (1.0 + decay)
    return np.sqrt(2.0 / (math.pi * x)) * ((1.0 + 3.0 / (x * x)) * sinh_scaled - (3.0 / x) * cosh_scaled)


def bessel_i52_scaled(x: ArrayLike) -> ArrayLike:
    """e^{-x}·I_{5/2}(x)"""
    arr = np.asarray(x, dtype=float)
    if np.any(arr < 0):
        raise DomainError("I_{5/2} is evaluated for x >= 0 only")
    flat = np.atleast_1d(arr).astype(float)
    out = np.empty_like(flat)
    small = flat < BESSEL_SERIES_THRESHOLD
    out[small] = _bessel_series_scaled(flat[small])
    out[~small] = _bessel_closed_scaled(flat[~small])
    return out.reshape(arr.shape) if arr.ndim else float(out[0])


def bessel_i52(x: ArrayLike) -> ArrayLike:
    """I_{5/2}(x). x ≳ 709 에서는 inf 가 되므로 scaled 판을 쓸 것."""
    scaled = bessel_i52_scaled(x)
    with np.errstate(over="ignore"):
        return scaled * np.exp(np.asarray(x, dtype=float))


def bessel_i52_series(x: float, terms: int = 60) -> float:
    """멱급수 그 자체 (검증용, 작은 x)"""
    if x < 0:
        raise DomainError("I_{5/2} is evaluated for x >= 0 only")
    if x == 0:
        return 0.0
    return math.fsum(
        math.exp((2 * m + 2.5) * math.log(x / 2.0) - math.lgamma(m + 1) - math.lgamma(m + 3.5))
        for m in range(terms)
    )


# ---------------------------------------------------------------- g_c, f_c

def _denominator(c: float, y: np.ndarray) -> np.ndarray:
    # cosh y - cos 2πc = 2(sinh²(y/2) + sin²(πc)) : 상쇄 없는 형태
    return 2.0 * (np.sinh(0.5 * y) ** 2 + math.sin(math.pi * c) ** 2)


def _as_c(c) -> float:
    return float(Fraction(c) % 1) if not isinstance(c, float) else c % 1.0


def g_c(c, w: ArrayLike) -> ArrayLike:
    """g_c(w) = sinh(2πw/3)/(cosh(2πw/3) - cos 2πc)"""
    cf = _as_c(c)
    w = np.asarray(w, dtype=float)
    if cf == 0.0:
        if np.any(w == 0):
            raise PoleError("g_0 has a pole at w = 0")
        return 1.0 / np.tanh(math.pi * w / 3.0)
    y = np.clip(A_RATE * w, -_CLIP, _CLIP)
    with np.errstate(over="ignore", invalid="ignore"):
        value = np.sinh(y) / _denominator(cf, y)
    return np.where(np.abs(y) >= _CLIP, np.sign(y), value)


def f_c(c, w: ArrayLike) -> ArrayLike:
    """f_c(w) = sin 2πc/(cosh(2πw/3) - cos 2πc)"""
    cf = _as_c(c)
    w = np.asarray(w, dtype=float)
    if cf == 0.0:
        return np.zeros_like(w)
    y = np.clip(A_RATE * w, -_CLIP, _CLIP)
    with np.errstate(over="ignore"):
        return math.sin(2.0 * math.pi * cf) / _denominator(cf, y)


def g_c_prime(c, w: ArrayLike) -> ArrayLike:
    """d/dw g_c(w) = a(1 - C cosh(aw))/D², c ≠ 0"""
    cf = _as_c(c)
    if cf == 0.0:
        raise PoleError("derivative of g_0 is not used directly")
    w = np.asarray(w, dtype=float)
    y = np.clip(A_RATE * w, -_CLIP, _CLIP)
    big_c = math.cos(2.0 * math.pi * cf)
    with np.errstate(over="ignore", invalid="ignore"):
        denom = _denominator(cf, y)
        value = A_RATE * (1.0 - big_c * np.cosh(y)) / (denom * denom)
    return np.where(np.abs(y) >= _CLIP, 0.0, value)


def _u_coth_u(u: np.ndarray) -> np.ndarray:
    # u·coth u, 원점에서 1
    small = np.abs(u) < COTH_SERIES_THRESHOLD
    u2 = u * u
    series = 1.0 + u2 / 3.0 - u2 * u2 / 45.0 + 2.0 * u2 ** 3 / 945.0 - u2 ** 4 / 4725.0
    safe = np.where(small, 1.0, u)
    return np.where(small, series, safe / np.tanh(safe))


def w_g0(w: ArrayLike) -> ArrayLike:
    """w·g₀(w) (원점에서 3/π 로 연속)"""
    w = np.asarray(w, dtype=float)
    return THREE_OVER_PI * _u_coth_u(math.pi * w / 3.0)


def g0_subtracted(w: ArrayLike) -> ArrayLike:
    """g₀(w) - 3/(πw): 유계, 원점에서 0"""
    w = np.asarray(w, dtype=float)
    u = math.pi * w / 3.0
    small = np.abs(u) < COTH_SERIES_THRESHOLD
    u2 = u * u
    series = u / 3.0 - u * u2 / 45.0 + 2.0 * u * u2 * u2 / 945.0 - u * u2 ** 3 / 4725.0
    safe = np.where(small, 1.0, u)
    return np.where(small, series, 1.0 / np.tanh(safe) - 1.0 / safe)


def G_c(c, x: ArrayLike) -> ArrayLike:
    """G_c(x) = x²·g_c(x), c = 0 은 제거 가능한 극한"""
    x = np.asarray(x, dtype=float)
    if _as_c(c) == 0.0:
        return x * w_g0(x)
    return x * x * g_c(c, x)


# ---------------------------------------------------------------- 1차원 커널

def boundary_factor(s: ArrayLike) -> ArrayLike:
    """(1 - s)^{5/4}, 반올림으로 음수가 된 인자는 0 으로 자른다."""
    return np.power(np.clip(1.0 - np.asarray(s, dtype=float), 0.0, None), 1.25)


def gstar_1d(k: int, r: int, w: ArrayLike) -> ArrayLike:
    """g*_{k,r}(w) = w·g_{r/3k}(3w/(2√2k))·(1-w²)^{5/4}"""
    params = KernelParams(k=k, r1=r)
    w = np.asarray(w, dtype=float)
    x = GSTAR_SCALE * w / k
    if params.case == "zero":
        core = (k / GSTAR_SCALE) * w_g0(x)
    else:
        core = w * g_c(params.c1, x)
    return core * boundary_factor(w * w)


# ---------------------------------------------------------------- 2차원 커널

def _H_prime(c: float, k: int, x: np.ndarray) -> np.ndarray:
    """H(x) = x²·g_c(x/k) 의 도함수"""
    if c == 0.0:
        # H = (3k/π)² φ(u), φ = u² coth u, u = πx/(3k)
        u = math.pi * x / (3.0 * k)
        small = np.abs(u) < COTH_SERIES_THRESHOLD
        u2 = u * u
        series = 1.0 + u2 - u2 * u2 / 9.0 + 2.0 * u2 ** 3 / 135.0 - u2 ** 4 / 525.0
        safe = np.clip(np.where(small, 1.0, u), -_CLIP, _CLIP)
        closed = 2.0 * safe / np.tanh(safe) - (safe / np.sinh(safe)) ** 2
        return (3.0 * k / math.pi) * np.where(small, series, closed)
    scaled = x / k
    return 2.0 * x * g_c(c, scaled) + (x * x / k) * g_c_prime(c, scaled)


def _H(c: float, k: int, x: np.ndarray) -> np.ndarray:
    if c == 0.0:
        return k * x * w_g0(x / k)
    return x * x * g_c(c, x / k)


def _difference_quotient(c: float, k: int, w1: np.ndarray, w2: np.ndarray) -> np.ndarray:
    """(H(w₂) - H(w₂ + w₁/2))/w₁, 작은 |w₁| 에서는 -(1/2)∫₀¹ H′(w₂ + t·w₁/2) dt"""
    small = np.abs(w1) < DIFFERENCE_THRESHOLD
    safe = np.where(small, 1.0, w1)
    direct = (_H(c, k, w2) - _H(c, k, w2 + 0.5 * safe)) / safe
    if not np.any(small):
        return direct
    integral = np.zeros_like(w2)
    for t, weight in zip(_GL4_T, _GL4_W):
        integral = integral + weight * _H_prime(c, k, w2 + 0.5 * t * w1)
    return np.where(small, -0.5 * integral, direct)


def _kernel_zero_first(c2: float, k: int, w1: np.ndarray, w2: np.ndarray) -> np.ndarray:
    """r₁ ≡ 0, r₂ ≢ 0 경우 (w₁ = 0 에서 제거 가능한 형태로 재배열)"""
    g2 = g_c(c2, w2 / k)
    return (
        (w1 + 4.0 * w2) * k * w_g0(w1 / k) * g2
        + w2 * w2 * g0_subtracted(w1 / k) * g2
        + (3.0 * k / math.pi) * _difference_quotient(c2, k, w1, w2)
    )


def _kernel_double_zero(k: int, w1: np.ndarray, w2: np.ndarray) -> np.ndarray:
    a1 = k * w_g0(w1 / k)
    a2 = k * w_g0(w2 / k)
    return (
        4.0 * a1 * a2
        + w2 * a2 * g0_subtracted(w1 / k)
        + w1 * a1 * g0_subtracted(w2 / k)
        + (3.0 * k / math.pi) * (_difference_quotient(0.0, k, w1, w2) + _difference_quotient(0.0, k, w2, w1))
    )


def _kernel_generic(c1: float, c2: float, k: int, w1: np.ndarray, w2: np.ndarray) -> np.ndarray:
    poly = w1 * w1 + w2 * w2 + 4.0 * w1 * w2
    return poly * (g_c(c1, w1 / k) * g_c(c2, w2 / k) - f_c(c1, w1 / k) * f_c(c2, w2 / k))


def g2d(k: int, r1: int, r2: int, w1: ArrayLike, w2: ArrayLike) -> ArrayLike:
    """g_{k,(r₁,r₂)}(w₁,w₂), 축 위의 제거 가능한 특이점은 극한값을 돌려준다."""
    params = KernelParams(k=k, r1=r1, r2=r2)
    w1 = np.asarray(w1, dtype=float)
    w2 = np.asarray(w2, dtype=float)
    case = params.case
    if case == "generic":
        return _kernel_generic(float(params.c1), float(params.c2), k, w1, w2)
    if case == "zero_first":
        return _kernel_zero_first(float(params.c2), k, w1, w2)
    if case == "zero_second":
        return _kernel_zero_first(float(params.c1), k, w2, w1)
    return _kernel_double_zero(k, w1, w2)


def quadratic_form(w1: ArrayLike, w2: ArrayLike) -> ArrayLike:
    return w1 * w1 + w2 * w2 + w1 * w2


def gstar_2d(k: int, r1: int, r2: int, w1: ArrayLike, w2: ArrayLike) -> ArrayLike:
    """g*_{k,r₁,r₂}(w) = g_{k,r}(3w/(2√2))·(1 - Q(w))^{5/4}"""
    w1 = np.asarray(w1, dtype=float)
    w2 = np.asarray(w2, dtype=float)
    return g2d(k, r1, r2, GSTAR_SCALE * w1, GSTAR_SCALE * w2) * boundary_factor(quadratic_form(w1, w2))


def g2d_weighted_sum(k: int, weights: np.ndarray, w1: np.ndarray, w2: np.ndarray,
                     chunk: int = 20000) -> np.ndarray:
    """Σ_{r₁,r₂ mod 3k} weights[r₁,r₂]·g_{k,r}(w₁,w₂).

    r ≢ 0 블록은 g, f 표를 한 번 만들어 einsum 으로 합친다.
    """
    modulus = 3 * k
    weights = np.asarray(weights)
    if weights.shape != (modulus, modulus):
        raise ValueError(f"weights must have shape ({modulus}, {modulus})")
    w1 = np.asarray(w1, dtype=float)
    w2 = np.asarray(w2, dtype=float)
    out = np.zeros(w1.shape, dtype=np.result_type(weights, float))
    cs = [r / modulus for r in range(1, modulus)]
    inner = weights[1:, 1:]

    for start in range(0, w1.size, chunk):
        sl = slice(start, start + chunk)
        x1 = w1[sl]
        x2 = w2[sl]
        g1 = np.stack([g_c(c, x1 / k) for c in cs])
        f1 = np.stack([f_c(c, x1 / k) for c in cs])
        g2 = np.stack([g_c(c, x2 / k) for c in cs])
        f2 = np.stack([f_c(c, x2 / k) for c in cs])
        poly = x1 * x1 + x2 * x2 + 4.0 * x1 * x2
        part = poly * (np.einsum("ab,an,bn->n", inner, g1, g2) - np.einsum("ab,an,bn->n", inner, f1, f2))
        for r in range(1, modulus):
            c = cs[r - 1]
            if weights[0, r] != 0:
                part = part + weights[0, r] * _kernel_zero_first(c, k, x1, x2)
            if weights[r, 0] != 0:
                part = part + weights[r, 0] * _kernel_zero_first(c, k, x2, x1)
        if weights[0, 0] != 0:
            part = part + weights[0, 0] * _kernel_double_zero(k, x1, x2)
        out[sl] = part
    return out
