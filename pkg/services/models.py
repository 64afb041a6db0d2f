# services/models.py
"""공통 데이터 모델 (pydantic)"""

import cmath
import math
from fractions import Fraction
from typing import Annotated, Any, ClassVar, Dict, List, Literal, Optional, Tuple

import numpy as np
from pydantic import (
    BaseModel,
    BeforeValidator,
    ConfigDict,
    Field,
    PlainSerializer,
    field_validator,
    model_validator,
)

from services.config import QuadratureConfig
from services.errors import DomainError


def _to_fraction(value: Any) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("bool is not a rational")
    if isinstance(value, (int, str)):
        return Fraction(value)
    if isinstance(value, float) and value.is_integer():
        return Fraction(int(value))
    raise TypeError(f"cannot read {value!r} as an exact rational")


def _fraction_text(value: Fraction) -> str:
    return f"{value.numerator}/{value.denominator}"


def _to_complex(value: Any) -> complex:
    if isinstance(value, (list, tuple)) and len(value) == 2:
        return complex(float(value[0]), float(value[1]))
    return complex(value)


Rational = Annotated[
    Fraction,
    BeforeValidator(_to_fraction),
    PlainSerializer(_fraction_text, return_type=str),
]

ComplexValue = Annotated[
    complex,
    BeforeValidator(_to_complex),
    PlainSerializer(lambda z: [z.real, z.imag], return_type=list),
]


class RationalQSeries(BaseModel):
    """q^offset · Σ coeffs[n] qⁿ, 계수는 n_max 까지만 신뢰한다."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    offset: Rational
    coeffs: Tuple[Rational, ...]

    @field_validator("coeffs")
    @classmethod
    def _non_empty(cls, value):
        if len(value) == 0:
            raise ValueError("a series needs at least one coefficient")
        return value

    @property
    def n_max(self) -> int:
        return len(self.coeffs) - 1

    def coefficient(self, n: int) -> Fraction:
        if n < 0:
            return Fraction(0)
        if n > self.n_max:
            raise IndexError(f"index {n} beyond reliable range {self.n_max}")
        return self.coeffs[n]

    def truncate(self, n_max: int) -> "RationalQSeries":
        if n_max > self.n_max:
            raise IndexError(f"cannot extend a series reliable to {self.n_max}")
        return RationalQSeries(offset=self.offset, coeffs=self.coeffs[: n_max + 1])

    def scale(self, factor) -> "RationalQSeries":
        factor = Fraction(factor)
        return RationalQSeries(offset=self.offset, coeffs=tuple(factor * c for c in self.coeffs))

    def __add__(self, other: "RationalQSeries") -> "RationalQSeries":
        if self.offset != other.offset:
            raise ValueError("series with different offsets cannot be added termwise")
        n_max = min(self.n_max, other.n_max)
        return RationalQSeries(
            offset=self.offset,
            coeffs=tuple(self.coeffs[n] + other.coeffs[n] for n in range(n_max + 1)),
        )

    def __mul__(self, other: "RationalQSeries") -> "RationalQSeries":
        # 곱의 신뢰 범위는 두 인자 중 짧은 쪽
        n_max = min(self.n_max, other.n_max)
        coeffs = []
        for n in range(n_max + 1):
            coeffs.append(sum((self.coeffs[m] * other.coeffs[n - m] for m in range(n + 1)), Fraction(0)))
        return RationalQSeries(offset=self.offset + other.offset, coeffs=tuple(coeffs))

    def evaluate(self, tau: complex) -> complex:
        """τ (Im τ > 0) 에서 잘린 급수의 값"""
        if tau.imag <= 0:
            raise DomainError("q-series evaluation needs Im(tau) > 0")
        q_offset = cmath.exp(2j * math.pi * tau * float(self.offset))
        q = cmath.exp(2j * math.pi * tau)
        total = 0j
        power = 1 + 0j
        for c in self.coeffs:
            total += float(c) * power
            power *= q
        return q_offset * total

    def truncation_estimate(self, tau: complex) -> float:
        """잘린 꼬리의 대략적 크기: 마지막 계수로 다음 항을 어림한다."""
        last = max(abs(float(c)) for c in self.coeffs[-3:])
        q_abs = math.exp(-2 * math.pi * tau.imag)
        head = math.exp(-2 * math.pi * tau.imag * float(self.offset))
        return 10.0 * max(last, 1.0) * head * q_abs ** (self.n_max + 1)

    def to_json(self) -> Dict[str, Any]:
        return self.model_dump(mode="json")


class FluxClass(BaseModel):
    model_config = ConfigDict(frozen=True)

    mu: Literal[-1, 0, 1]

    @property
    def delta(self) -> Fraction:
        return Fraction(3, 8) if self.mu == 0 else Fraction(-31, 24)

    @property
    def residue(self) -> int:
        return self.mu % 3

    def n_mu(self, n: int) -> Fraction:
        return Fraction(n) - self.delta


class UnimodularMatrix(BaseModel):
    """SL₂(ℤ) 원소 (a b; c d)"""

    model_config = ConfigDict(frozen=True)

    a: int
    b: int
    c: int
    d: int

    @model_validator(mode="after")
    def _check(self):
        if self.a * self.d - self.b * self.c != 1:
            raise ValueError(f"determinant of ({self.a},{self.b};{self.c},{self.d}) is not 1")
        if self.c == 0 and self.d <= 0:
            raise ValueError("c = 0 requires d > 0")
        return self

    @classmethod
    def S(cls) -> "UnimodularMatrix":
        return cls(a=0, b=-1, c=1, d=0)

    @classmethod
    def T(cls, power: int = 1) -> "UnimodularMatrix":
        return cls(a=1, b=power, c=0, d=1)

    @classmethod
    def identity(cls) -> "UnimodularMatrix":
        return cls(a=1, b=0, c=0, d=1)

    @classmethod
    def random(cls, rng: np.random.Generator, max_c: int = 12) -> "UnimodularMatrix":
        """c ≠ 0 인 무작위 행렬"""
        while True:
            c = int(rng.integers(1, max_c + 1)) * (1 if rng.random() < 0.5 else -1)
            d = int(rng.integers(-3 * max_c, 3 * max_c + 1))
            if math.gcd(c, d) != 1:
                continue
            # a·d ≡ 1 (mod c)
            a = pow(d, -1, abs(c)) if abs(c) > 1 else 0
            a += abs(c) * int(rng.integers(-2, 3))
            b = (a * d - 1) // c
            if a * d - b * c == 1:
                return cls(a=a, b=b, c=c, d=d)

    def sharp(self) -> "UnimodularMatrix":
        """M♯ = (a, -b; -c, d)"""
        return UnimodularMatrix(a=self.a, b=-self.b, c=-self.c, d=self.d)

    def __matmul__(self, other: "UnimodularMatrix") -> "UnimodularMatrix":
        return UnimodularMatrix(
            a=self.a * other.a + self.b * other.c,
            b=self.a * other.b + self.b * other.d,
            c=self.c * other.a + self.d * other.c,
            d=self.c * other.b + self.d * other.d,
        )

    def act(self, tau: complex) -> complex:
        return (self.a * tau + self.b) / (self.c * tau + self.d)

    def automorphy(self, tau: complex) -> complex:
        return self.c * tau + self.d


class KloostermanKey(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    k: int = Field(ge=1)
    mu: int
    nu: int
    n_mu: Rational
    r1: int = 0
    r2: int = 0

    @property
    def n24(self) -> int:
        scaled = 24 * self.n_mu
        if scaled.denominator != 1:
            raise DomainError(f"24*n_mu = {scaled} is not an integer")
        return scaled.numerator

    def canonical(self) -> Tuple[int, int, int, int, int, int]:
        """캐시 키: (k, μ mod 3, ν mod 3, 24n_μ, r₁ mod 3k, r₂ mod 3k)"""
        modulus = 3 * self.k
        return (self.k, self.mu % 3, self.nu % 3, self.n24, self.r1 % modulus, self.r2 % modulus)


class KernelParams(BaseModel):
    model_config = ConfigDict(frozen=True)

    k: int = Field(ge=1)
    r1: int
    r2: Optional[int] = None

    @property
    def c1(self) -> Fraction:
        return Fraction(self.r1 % (3 * self.k), 3 * self.k)

    @property
    def c2(self) -> Fraction:
        if self.r2 is None:
            raise ValueError("one-dimensional kernel has no second residue")
        return Fraction(self.r2 % (3 * self.k), 3 * self.k)

    @property
    def case(self) -> str:
        zero1 = self.c1 == 0
        if self.r2 is None:
            return "zero" if zero1 else "generic"
        zero2 = self.c2 == 0
        if zero1 and zero2:
            return "double_zero"
        if zero1:
            return "zero_first"
        if zero2:
            return "zero_second"
        return "generic"


class QuadratureRule(BaseModel):
    """nodes: (N,) 또는 (N, 2) 배열, weights: (N,) 양수 배열"""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    nodes: np.ndarray
    weights: np.ndarray
    kind: Literal["interval", "elliptic-region", "real-line", "real-plane"]
    order: int

    @model_validator(mode="after")
    def _check(self):
        if self.nodes.shape[0] != self.weights.shape[0]:
            raise ValueError("nodes and weights differ in length")
        if np.any(self.weights <= 0):
            raise ValueError("quadrature weights must be positive")
        return self

    @property
    def size(self) -> int:
        return int(self.weights.shape[0])

    @property
    def w1(self) -> np.ndarray:
        return self.nodes if self.nodes.ndim == 1 else self.nodes[:, 0]

    @property
    def w2(self) -> np.ndarray:
        return self.nodes[:, 1]

    def integrate(self, values: np.ndarray):
        """고정된 노드 순서로 math.fsum 누적 (스레드 수와 무관하게 비트 단위 재현)"""
        products = np.asarray(values) * self.weights
        if np.iscomplexobj(products):
            return complex(math.fsum(products.real.tolist()), math.fsum(products.imag.tolist()))
        return math.fsum(products.tolist())


class ThetaIndex(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    ell: Rational
    scale: Literal[1, 3] = 1

    @property
    def reduced(self) -> Fraction:
        """ℓ mod 1 을 [0, 1/2] 로 접은 대표값 (ϑ_ℓ = ϑ_{-ℓ} = ϑ_{ℓ+1})"""
        frac = self.ell - math.floor(self.ell)
        return min(frac, 1 - frac)


class EichlerPoint(BaseModel):
    """τ = h′/k + i·z (직접/Mordell 표현), 주요부는 τ = h′/k + i/z 에서 평가한다."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    hprime: int
    k: int = Field(1, ge=1)
    z: ComplexValue
    b: Rational = Fraction(3, 8)

    @model_validator(mode="after")
    def _check(self):
        if self.z.real <= 0:
            raise ValueError("EichlerPoint requires Re(z) > 0")
        if self.b < 0:
            raise ValueError("principal-part cutoff b must be nonnegative")
        return self

    @property
    def cusp(self) -> Fraction:
        return Fraction(self.hprime, self.k)

    @property
    def tau(self) -> complex:
        return float(self.cusp) + 1j * self.z

    def on_rademacher_path(self) -> bool:
        return (1 / self.z).real >= 1 - 1e-12


class RademacherConfig(BaseModel):
    flux: FluxClass
    n: int = Field(ge=0)
    N: int = Field(ge=1)
    quad: QuadratureConfig = Field(default_factory=QuadratureConfig)


class SeriesRow(BaseModel):
    k: int
    A1_k: float
    A2_k: float
    A3_k: float
    A1_cum: float
    A2_cum: float
    A3_cum: float
    total: float


class SeriesBreakdown(BaseModel):
    mu: int
    n: int
    N: int
    rows: List[SeriesRow]
    total: float
    error_estimate: float

    TSV_COLUMNS: ClassVar[Tuple[str, ...]] = ("k", "A1_k", "A2_k", "A3_k", "A1_cum", "A2_cum", "A3_cum", "total")

    @property
    def A1(self) -> float:
        return self.rows[-1].A1_cum

    @property
    def A2(self) -> float:
        return self.rows[-1].A2_cum

    @property
    def A3(self) -> float:
        return self.rows[-1].A3_cum

    def cumulative(self, N: int) -> SeriesRow:
        return self.rows[N - 1]

    def to_tsv(self) -> str:
        lines = ["\t".join(self.TSV_COLUMNS)]
        for row in self.rows:
            values = [str(row.k)] + [repr(float(getattr(row, col))) for col in self.TSV_COLUMNS[1:]]
            lines.append("\t".join(values))
        return "\n".join(lines) + "\n"


class IdentityReport(BaseModel):
    identity: str
    parameters: Dict[str, Any]
    lhs: ComplexValue
    rhs: ComplexValue
    residual: float
    tolerance: float
    passed: bool = Field(serialization_alias="pass")

    @classmethod
    def compare(cls, identity: str, parameters: Dict[str, Any], lhs, rhs, tolerance: float,
                relative: bool = False) -> "IdentityReport":
        lhs = complex(lhs)
        rhs = complex(rhs)
        residual = abs(lhs - rhs)
        if relative:
            residual /= max(abs(lhs), abs(rhs), 1e-300)
        return cls(
            identity=identity,
            parameters=parameters,
            lhs=lhs,
            rhs=rhs,
            residual=residual,
            tolerance=tolerance,
            passed=bool(residual <= tolerance),
        )
