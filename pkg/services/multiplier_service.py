# services/multiplier_service.py
"""Weil 표현 ψ₂,M / ψ₃,M, η 승수, χ_M, 일반화 Kloosterman 합"""

import cmath
import logging
import math
import threading
from fractions import Fraction
from typing import Dict, Optional, Tuple

import numpy as np

from services.errors import DomainError
from services.models import KloostermanKey, UnimodularMatrix

logger = logging.getLogger(__name__)

SQRT2 = math.sqrt(2.0)
SQRT3 = math.sqrt(3.0)


def root_of_unity(numerator, denominator: int) -> complex:
    """exp(2πi·numerator/denominator), 삼각함수 전에 정확히 mod 를 취한다."""
    if denominator == 0:
        raise ZeroDivisionError("root of unity of order 0")
    if denominator < 0:
        numerator, denominator = -numerator, -denominator
    if isinstance(numerator, Fraction):
        reduced = Fraction(numerator) % denominator
        angle = 2.0 * math.pi * float(reduced / denominator)
    else:
        angle = 2.0 * math.pi * ((int(numerator) % denominator) / denominator)
    return complex(math.cos(angle), math.sin(angle))


def roots_of_unity(numerators: np.ndarray, denominator: int) -> np.ndarray:
    """정수 배열용 벡터 버전"""
    if denominator < 0:
        numerators, denominator = -numerators, -denominator
    reduced = np.mod(numerators.astype(np.int64), denominator)
    return np.exp(2j * np.pi * reduced / denominator)


def kronecker_symbol(a: int, n: int) -> int:
    """Kronecker 기호 (a/n). (a/-1) = sign(a), (0/1) = 1."""
    if n == 0:
        return 1 if abs(a) == 1 else 0
    result = 1
    if n < 0:
        n = -n
        if a < 0:
            result = -result
    twos = 0
    while n % 2 == 0:
        n //= 2
        twos += 1
    if twos:
        if a % 2 == 0:
            return 0
        if twos % 2 == 1 and a % 8 in (3, 5):
            result = -result
    # n 은 이제 양의 홀수: Jacobi 기호
    a %= n
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def _sign(x: int) -> int:
    return (x > 0) - (x < 0)


def psi2(M: UnimodularMatrix, alpha: int, beta: int) -> complex:
    alpha %= 2
    beta %= 2
    a, b, c, d = M.a, M.b, M.c, M.d
    if c == 0:
        if alpha != beta:
            return 0j
        return (1j ** ((a * b * alpha * alpha) % 4)) * cmath.exp(-1j * math.pi * (1 - _sign(d)) / 4)

    j = np.arange(abs(c), dtype=np.int64)
    m = 2 * j + alpha
    # exp(πi N / 2c) = ζ_{4c}^N
    phases = roots_of_unity(a * m * m - 2 * beta * m + d * beta * beta, 4 * c)
    prefactor = cmath.exp(-1j * math.pi * _sign(c) / 4) / math.sqrt(2 * abs(c))
    return complex(prefactor * phases.sum())


def lambda3(M: UnimodularMatrix, mu: int, nu: int) -> complex:
    """λ₃,M(μ,ν): |c|² 항의 이중 합"""
    a, c, d = M.a, M.c, M.d
    mu %= 3
    nu %= 3
    j1, j2 = np.meshgrid(np.arange(abs(c), dtype=np.int64), np.arange(abs(c), dtype=np.int64), indexing="ij")
    exponent = (
        a * mu * mu + d * nu * nu - 2 * mu * nu
        + 3 * a * (j1 * j1 - j1 * j2 + j2 * j2)
        + 3 * j1 * (a * mu - nu)
    )
    return complex(roots_of_unity(exponent, 3 * c).sum())


def psi3(M: UnimodularMatrix, mu: int, nu: int) -> complex:
    mu %= 3
    nu %= 3
    a, b, c, d = M.a, M.b, M.c, M.d
    if c == 0:
        if mu != nu:
            return 0j
        return root_of_unity(a * b * mu * mu, 3) * (1j ** ((_sign(d) - 1) % 4))
    return (1j ** ((-_sign(c)) % 4)) / (SQRT3 * abs(c)) * lambda3(M, mu, nu)


def psi2_matrix(M: UnimodularMatrix) -> np.ndarray:
    return np.array([[psi2(M, al, be) for be in range(2)] for al in range(2)])


def psi3_matrix(M: UnimodularMatrix) -> np.ndarray:
    return np.array([[psi3(M, mu, nu) for nu in range(3)] for mu in range(3)])


def eta_multiplier(M: UnimodularMatrix) -> complex:
    """η(Mτ) = ψ(M)(-i(cτ+d))^{1/2} η(τ) 의 ψ(M)"""
    a, b, c, d = M.a, M.b, M.c, M.d
    if c == 0:
        return root_of_unity(b, 24)
    if c % 2:
        symbol = kronecker_symbol(d, abs(c))
        exponent = (a + d) * c - b * d * (c * c - 1) - 3 * c + 3
    else:
        symbol = kronecker_symbol(c, d)
        exponent = a * c * (1 - d * d) + d * (b - c + 3)
    # e^{πi·E/12} = ζ₂₄^E
    return symbol * root_of_unity(exponent, 24)


def chi(M: UnimodularMatrix, mu: int, nu: int) -> complex:
    """χ_M(μ,ν) = i·ψ(M)⁹·ψ₃,M(μ,ν)"""
    return 1j * eta_multiplier(M) ** 9 * psi3(M, mu, nu)


def rademacher_matrix(h: int, k: int) -> Tuple[UnimodularMatrix, int]:
    """(h, k) 에 대한 M = (h′, -(1+hh′)/k; k, -h) 와 정규 대표 h′"""
    if k == 1:
        hprime = 0
    else:
        hprime = (-pow(h, -1, k)) % k
    return rademacher_matrix_with(h, k, hprime), hprime


def rademacher_matrix_with(h: int, k: int, hprime: int) -> UnimodularMatrix:
    if (h * hprime + 1) % k:
        raise DomainError(f"h'={hprime} does not solve h*h' = -1 mod {k} for h={h}")
    return UnimodularMatrix(a=hprime, b=-(1 + h * hprime) // k, c=k, d=-h)


def quadratic_form(r1: int, r2: int) -> int:
    """Q(r₁,r₂) = r₁² + r₂² + r₁r₂"""
    return r1 * r1 + r2 * r2 + r1 * r2


def kloosterman_summand(key: KloostermanKey, h: int, hprime: int) -> complex:
    """h 하나의 기여. h′ 대표를 바꿔도 값이 같아야 한다."""
    M = rademacher_matrix_with(h, key.k, hprime)
    exponent = -key.n24 * h - (9 + 8 * quadratic_form(key.r1, key.r2)) * hprime
    return root_of_unity(exponent, 24 * key.k) * chi(M, key.nu, key.mu)


class KloostermanService:
    """K_k(μ,ν;n,r₁,r₂) 계산과 메모 캐시.

    χ 표는 k 별로 (모든 h 를 한 번에), 합은 정규화된 키별로 보관한다.
    h 에 대한 합은 numpy 로 한 번에 계산한다.
    """

    def __init__(self, cache: Optional[Dict[str, Tuple[float, float]]] = None):
        self._unit_tables: Dict[int, Tuple[np.ndarray, np.ndarray, np.ndarray]] = {}
        self._sums: Dict[Tuple[int, ...], complex] = {}
        self._lock = threading.Lock()
        self.hits = 0
        self.misses = 0
        if cache:
            self.load(cache)

    def unit_tables(self, k: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """gcd(h, k) = 1 인 h 들, 그 h′, 그리고 χ 표 (φ(k)×3×3)"""
        cached = self._unit_tables.get(k)
        if cached is not None:
            return cached
        hs, hprimes, tables = [], [], []
        for h in range(k):
            if math.gcd(h, k) != 1:
                continue
            M, hprime = rademacher_matrix(h, k)
            hs.append(h)
            hprimes.append(hprime)
            tables.append([[chi(M, nu, mu) for mu in range(3)] for nu in range(3)])
        entry = (np.array(hs, dtype=np.int64), np.array(hprimes, dtype=np.int64), np.array(tables, dtype=complex))
        with self._lock:
            return self._unit_tables.setdefault(k, entry)

    def unit_count(self, k: int) -> int:
        """φ(k): 합의 항 수. 각 항의 크기는 1 이하."""
        return len(self.unit_tables(k)[0])

    def kloosterman(self, key: KloostermanKey) -> complex:
        canonical = key.canonical()
        cached = self._sums.get(canonical)
        if cached is not None:
            with self._lock:
                self.hits += 1
            return cached

        k, mu, nu, n24, r1, r2 = canonical
        hs, hprimes, tables = self.unit_tables(k)
        q_term = 9 + 8 * quadratic_form(r1, r2)
        phases = roots_of_unity(-n24 * hs - q_term * hprimes, 24 * k)
        total = complex(np.dot(phases, tables[:, nu, mu]))
        with self._lock:
            self.misses += 1
            return self._sums.setdefault(canonical, total)

    def class_row(self, k: int, mu: int, n_mu: Fraction, r1: int) -> np.ndarray:
        """W[r₁, ·] 한 줄"""
        modulus = 3 * k
        return np.array([
            self.kloosterman(KloostermanKey(k=k, mu=mu, nu=(r1 - r2) % 3, n_mu=n_mu, r1=r1, r2=r2))
            for r2 in range(modulus)
        ])

    def class_weights(self, k: int, mu: int, n_mu: Fraction) -> np.ndarray:
        """W[r₁, r₂] = K_k(μ, (r₁-r₂) mod 3; n, r₁, r₂), r 는 0..3k-1"""
        return np.vstack([self.class_row(k, mu, n_mu, r1) for r1 in range(3 * k)])

    def export(self) -> Dict[str, Tuple[float, float]]:
        with self._lock:
            return {",".join(map(str, key)): (value.real, value.imag) for key, value in self._sums.items()}

    def load(self, cache: Dict[str, Tuple[float, float]]) -> None:
        loaded = 0
        for text, (re_part, im_part) in cache.items():
            key = tuple(int(part) for part in text.split(","))
            self._sums[key] = complex(float(re_part), float(im_part))
            loaded += 1
        logger.info(f"💾 Loaded {loaded} cached Kloosterman sums")
