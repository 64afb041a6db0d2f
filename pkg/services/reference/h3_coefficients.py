# services/reference/h3_coefficients.py
from fractions import Fraction
from typing import Dict, Tuple


class H3Coefficients:
    """U(3) 생성함수 h₃,μ 의 알려진 앞부분 계수 (더 늘릴 방법은 이 프로젝트 범위 밖)"""

    # h₃,₀ = 1/9 - q + 3q² + ... + 414q¹⁰
    MU_ZERO: Tuple[Fraction, ...] = (
        Fraction(1, 9), Fraction(-1), Fraction(3), Fraction(17), Fraction(41), Fraction(78),
        Fraction(120), Fraction(193), Fraction(240), Fraction(359), Fraction(414),
    )

    # h₃,±₁ = q^{5/3}(3 + 15q + 36q² + ... + 246q⁶)
    MU_ONE: Tuple[Fraction, ...] = (
        Fraction(3), Fraction(15), Fraction(36), Fraction(69), Fraction(114), Fraction(165),
        Fraction(246),
    )

    OFFSETS: Dict[int, Fraction] = {0: Fraction(0), 1: Fraction(5, 3)}

    @classmethod
    def coefficients(cls, residue: int) -> Tuple[Fraction, ...]:
        """residue = μ mod 3 (2 ≡ -1 은 1 과 같은 계열)"""
        return cls.MU_ZERO if residue % 3 == 0 else cls.MU_ONE

    @classmethod
    def offset(cls, residue: int) -> Fraction:
        return cls.OFFSETS[0 if residue % 3 == 0 else 1]

    @classmethod
    def horizon(cls, residue: int) -> int:
        return len(cls.coefficients(residue)) - 1
