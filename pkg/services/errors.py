# services/errors.py
"""mockrad 예외 계층. 각 예외는 CLI 종료 코드를 함께 가진다."""

from typing import Optional


class MockRadError(Exception):
    """모든 mockrad 예외의 기반 클래스"""

    exit_code = 1


class HorizonExceededError(MockRadError):
    """h₃,μ 표의 범위를 넘는 계수를 요청한 경우"""

    exit_code = 4

    def __init__(self, mu: int, requested: int, horizon: int):
        self.mu = mu
        self.requested = requested
        self.horizon = horizon
        super().__init__(
            f"h3 coefficients for mu={mu} are tabulated only up to index {horizon} "
            f"(requested {requested})"
        )


class NumericalAssertionError(MockRadError):
    exit_code = 3


class RealnessError(NumericalAssertionError):
    """k 항의 허수부가 허용 오차를 넘는 경우"""

    def __init__(self, label: str, value: complex, scale: float):
        self.label = label
        self.value = value
        self.scale = scale
        super().__init__(
            f"{label}: imaginary residue {value.imag:.3e} exceeds tolerance "
            f"(scale {scale:.3e})"
        )


class NumericalOverflowError(NumericalAssertionError):
    pass


class DomainError(MockRadError, ValueError):
    exit_code = 2


class PoleError(MockRadError, ZeroDivisionError):
    exit_code = 3


class ConvergenceError(MockRadError):
    """Im(τ) ≤ 0 에서 theta 급수를 요청한 경우"""

    exit_code = 3


class PreconditionError(MockRadError):
    exit_code = 3


class VerificationFailure(MockRadError):
    """verify / tables 비교 실패"""

    exit_code = 5

    def __init__(self, message: str, failures: Optional[list] = None):
        self.failures = failures or []
        super().__init__(message)
