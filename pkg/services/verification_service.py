# services/verification_service.py
"""항등식 검사 모음: multipliers, theta, mordell1, mordell2, principal, mock-transform"""

import asyncio
import logging
import math
from typing import Callable, Dict, List, Optional

import numpy as np

from services.completion_service import CompletionService
from services.config import QuadratureConfig, Settings
from services.eichler_service import EichlerService, theta_trans1_residual, theta_trans2_residual
from services.models import EichlerPoint, FluxClass, IdentityReport, KloostermanKey, UnimodularMatrix
from services.multiplier_service import (
    KloostermanService,
    kloosterman_summand,
    psi2_matrix,
    psi3_matrix,
    rademacher_matrix,
)

logger = logging.getLogger(__name__)

SUITES = ("multipliers", "theta", "mordell1", "mordell2", "principal", "mock-transform")

DEFAULT_TOLERANCES: Dict[str, float] = {
    "multipliers": 1e-12,
    "theta": 1e-10,
    "trans3": 1e-8,
    "mordell1": 1e-8,
    "mordell2": 1e-6,
    "principal": 2.0,
    "mock-transform": 1e-6,
}

# (j, h′, k, z): 9 개 격자점
MORDELL1_GRID = [
    (j, hprime, k, z)
    for (hprime, k, z) in [(0, 1, 1.0), (1, 3, 0.8), (1, 2, 0.7 + 0.2j)]
    for j in (0, 2, 3)
]
# (ν, h′, k, z)
MORDELL2_GRID = [
    (0, 0, 1, 1.0),
    (1, 1, 2, 0.7),
    (2, 0, 1, 1.0),
    (1, 1, 3, 0.9),
]

Check = Callable[[], IdentityReport]


def _max_deviation(matrix: np.ndarray) -> float:
    identity = np.eye(matrix.shape[0])
    return float(np.max(np.abs(matrix @ matrix.conj().T - identity)))


class VerificationService:
    def __init__(self, settings: Optional[Settings] = None,
                 kloosterman: Optional[KloostermanService] = None,
                 eichler: Optional[EichlerService] = None,
                 completion: Optional[CompletionService] = None,
                 seed: int = 20240601):
        self.settings = settings or Settings()
        self.kloosterman = kloosterman or KloostermanService()
        self.eichler = eichler or EichlerService(self.quad)
        self.completion = completion or CompletionService(self.quad, self.eichler)
        self.seed = seed

    @property
    def quad(self) -> QuadratureConfig:
        return self.settings.quad

    def _tolerance(self, name: str, override: Optional[float]) -> float:
        return override if override is not None else DEFAULT_TOLERANCES[name]

    # ------------------------------------------------------------ multipliers

    def multiplier_checks(self, tolerance: Optional[float] = None, samples: int = 50) -> List[Check]:
        tol = self._tolerance("multipliers", tolerance)
        rng = np.random.default_rng(self.seed)
        matrices = [UnimodularMatrix.random(rng) for _ in range(samples)]
        checks: List[Check] = []

        for index, M in enumerate(matrices):
            params = {"M": [M.a, M.b, M.c, M.d], "sample": index}

            def unitarity(M=M, params=params) -> IdentityReport:
                deviation = max(_max_deviation(psi2_matrix(M)), _max_deviation(psi3_matrix(M)))
                return IdentityReport.compare("psi-unitarity", params, deviation, 0.0, tol)

            def conjugation(M=M, params=params) -> IdentityReport:
                sharp = M.sharp()
                deviation = max(
                    float(np.max(np.abs(psi2_matrix(sharp) - psi2_matrix(M).conj()))),
                    float(np.max(np.abs(psi3_matrix(sharp) - psi3_matrix(M).conj()))),
                )
                return IdentityReport.compare("psi-sharp-conjugation", params, deviation, 0.0, tol)

            checks += [unitarity, conjugation]

        def representative() -> IdentityReport:
            # k = 5, h = 2: h′ 와 h′ + 5
            key = KloostermanKey(k=5, mu=0, nu=1, n_mu=FluxClass(mu=0).n_mu(5), r1=2, r2=1)
            _, hprime = rademacher_matrix(2, 5)
            lhs = kloosterman_summand(key, 2, hprime)
            rhs = kloosterman_summand(key, 2, hprime + 5)
            return IdentityReport.compare("kloosterman-representative", {"k": 5, "h": 2}, lhs, rhs, tol)

        def shift() -> IdentityReport:
            # 캐시 키 정규화를 거치지 않고 h 합을 직접 계산한다
            k = 2
            n_mu = FluxClass(mu=1).n_mu(3)

            def direct(key: KloostermanKey) -> complex:
                return sum(
                    kloosterman_summand(key, h, rademacher_matrix(h, k)[1])
                    for h in range(k) if math.gcd(h, k) == 1
                )

            base = KloostermanKey(k=k, mu=1, nu=2, n_mu=n_mu, r1=1, r2=2)
            shifted = KloostermanKey(k=k, mu=1, nu=2, n_mu=n_mu, r1=1 + 3 * k, r2=2)
            return IdentityReport.compare("kloosterman-r-shift", {"k": k, "r1": [1, 1 + 3 * k]},
                                          direct(base), direct(shifted), tol)

        return checks + [representative, shift]

    # ------------------------------------------------------------ theta

    def theta_checks(self, tolerance: Optional[float] = None, samples: int = 5) -> List[Check]:
        tol = self._tolerance("theta", tolerance)
        tol3 = self._tolerance("trans3", tolerance)
        rng = np.random.default_rng(self.seed + 1)
        taus = [complex(rng.uniform(-0.5, 0.5), rng.uniform(0.6, 1.5)) for _ in range(samples)]
        checks: List[Check] = []

        for name, M in (("S", UnimodularMatrix.S()), ("T", UnimodularMatrix.T())):
            for tau in taus:
                for alpha in range(2):
                    params = {"M": name, "tau": [tau.real, tau.imag], "alpha": alpha}

                    def trans1(M=M, tau=tau, alpha=alpha, params=params) -> IdentityReport:
                        residual = theta_trans1_residual(M, tau, alpha)
                        return IdentityReport.compare("theta-trans1", params, residual, 0.0, tol)

                    checks.append(trans1)
                    for mu in range(3):
                        params2 = dict(params, mu=mu)

                        def trans2(M=M, tau=tau, alpha=alpha, mu=mu, params=params2) -> IdentityReport:
                            residual = theta_trans2_residual(M, tau, mu, alpha)
                            return IdentityReport.compare("theta-trans2", params, residual, 0.0, tol)

                        checks.append(trans2)

        for alpha in range(2):
            def trans3_s(alpha=alpha) -> IdentityReport:
                residual = self.completion.trans3_residual_S(alpha, 1j)
                return IdentityReport.compare("h2-trans3-S", {"alpha": alpha, "tau": [0.0, 1.0]},
                                              residual, 0.0, tol3)

            def trans3_t(alpha=alpha) -> IdentityReport:
                tau = complex(1.0, 4.0) / 3.0
                residual = self.completion.trans3_residual_T(alpha, tau)
                return IdentityReport.compare("h2-trans3-T", {"alpha": alpha, "tau": [tau.real, tau.imag]},
                                              residual, 0.0, tol3)

            checks += [trans3_s, trans3_t]
        return checks

    # ------------------------------------------------------------ Mordell

    def mordell1_checks(self, tolerance: Optional[float] = None) -> List[Check]:
        tol = self._tolerance("mordell1", tolerance)
        checks: List[Check] = []
        for j, hprime, k, z in MORDELL1_GRID:
            def check(j=j, hprime=hprime, k=k, z=z) -> IdentityReport:
                pt = EichlerPoint(hprime=hprime, k=k, z=z)
                params = {"j": j, "hprime": hprime, "k": k, "z": [complex(z).real, complex(z).imag]}
                return IdentityReport.compare(
                    "E1-direct-vs-mordell", params, self.eichler.E1_direct(j, pt), self.eichler.E1_mordell(j, pt), tol
                )

            checks.append(check)
        return checks

    def mordell2_checks(self, tolerance: Optional[float] = None) -> List[Check]:
        tol = self._tolerance("mordell2", tolerance)
        checks: List[Check] = []
        for nu, hprime, k, z in MORDELL2_GRID:
            def check(nu=nu, hprime=hprime, k=k, z=z) -> IdentityReport:
                pt = EichlerPoint(hprime=hprime, k=k, z=z)
                params = {"nu": nu, "hprime": hprime, "k": k, "z": [z, 0.0]}
                return IdentityReport.compare(
                    "E2-direct-vs-mordell", params, self.eichler.E2_direct(nu, pt), self.eichler.E2_mordell(nu, pt), tol
                )

            checks.append(check)
        return checks

    # ------------------------------------------------------------ 주요부

    def principal_constants(self, kind: int, hprime_seed: int, y: float, k_max: int,
                            order: Optional[int] = None) -> float:
        """한 (h′, z) 표본에서 C = max_k D(k)/(1 + log k)^kind"""
        z = 1.0 / complex(1.0, y)
        ratios = []
        for k in range(1, k_max + 1):
            hprime = hprime_seed % k
            pt = EichlerPoint(hprime=hprime, k=k, z=z)
            discrepancy = self.eichler.principal_discrepancy(kind, 1 if kind == 1 else 0, pt, order=order)
            ratios.append(discrepancy / (1.0 + math.log(k)) ** kind)
        return max(ratios)

    def principal_checks(self, ratio: Optional[float] = None, k_max: int = 20, samples: int = 10,
                         two_dim_order: int = 48) -> List[Check]:
        """max C / min C ≤ ratio (기본 2) 이면 통과. 잔차 허용 오차와는 따로 받는다."""
        tol = self._tolerance("principal", ratio)
        rng = np.random.default_rng(self.seed + 2)
        draws = [(int(rng.integers(0, 1000)), float(rng.uniform(-1.0, 1.0))) for _ in range(samples)]
        checks: List[Check] = []
        for kind in (1, 2):
            def check(kind=kind) -> IdentityReport:
                order = two_dim_order if kind == 2 else None
                constants = [self.principal_constants(kind, seed, y, k_max, order) for seed, y in draws]
                spread = max(constants) / max(min(constants), 1e-300)
                params = {"dimension": kind, "k_max": k_max, "samples": samples, "constants": constants}
                return IdentityReport(
                    identity=f"principal-part-E{kind}",
                    parameters=params,
                    lhs=complex(spread),
                    rhs=complex(tol),
                    residual=spread,
                    tolerance=tol,
                    passed=bool(spread <= tol),
                )

            checks.append(check)
        return checks

    # ------------------------------------------------------------ mock 변환

    def mock_transform_checks(self, tolerance: Optional[float] = None) -> List[Check]:
        tol = self._tolerance("mock-transform", tolerance)
        S = UnimodularMatrix.S()
        checks: List[Check] = []
        for mu in (0, 1):
            def check(mu=mu) -> IdentityReport:
                residual = self.completion.verify_mock_transformation(mu, S, 1j, tolerance=tol)
                return IdentityReport.compare("mock-transformation", {"mu": mu, "M": "S", "tau": [0.0, 1.0]},
                                              residual, 0.0, tol)

            def non_vacuous(mu=mu) -> IdentityReport:
                # E 항을 빼면 잔차가 커야 한다
                residual = self.completion.verify_mock_transformation(
                    mu, S, 1j, tolerance=tol, include_mock_terms=False
                )
                return IdentityReport(
                    identity="mock-transformation-without-E",
                    parameters={"mu": mu, "M": "S", "tau": [0.0, 1.0]},
                    lhs=complex(residual),
                    rhs=complex(1e-3),
                    residual=residual,
                    tolerance=1e-3,
                    passed=bool(residual > 1e-3),
                )

            checks += [check, non_vacuous]
        return checks

    # ------------------------------------------------------------ 실행

    def checks_for(self, suite: str, tolerance: Optional[float] = None,
                   ratio: Optional[float] = None) -> List[Check]:
        """tolerance 는 잔차 검사에, ratio 는 principal 의 상수 비율 검사에만 쓴다"""
        builders = {
            "multipliers": lambda: self.multiplier_checks(tolerance),
            "theta": lambda: self.theta_checks(tolerance),
            "mordell1": lambda: self.mordell1_checks(tolerance),
            "mordell2": lambda: self.mordell2_checks(tolerance),
            "principal": lambda: self.principal_checks(ratio),
            "mock-transform": lambda: self.mock_transform_checks(tolerance),
        }
        if suite == "all":
            return [check for name in SUITES for check in builders[name]()]
        if suite not in builders:
            raise ValueError(f"unknown verification suite: {suite}")
        return builders[suite]()

    async def run_async(self, suite: str, tolerance: Optional[float] = None,
                        ratio: Optional[float] = None) -> List[IdentityReport]:
        checks = self.checks_for(suite, tolerance, ratio)
        logger.info(f"🚀 Verifying suite '{suite}': {len(checks)} checks")
        semaphore = asyncio.Semaphore(self.settings.threads)

        async def run(check: Check) -> IdentityReport:
            async with semaphore:
                return await asyncio.to_thread(check)

        reports = await asyncio.gather(*(run(check) for check in checks))
        failed = [report for report in reports if not report.passed]
        if failed:
            for report in failed:
                logger.warning(f"⚠️ {report.identity} {report.parameters}: residual {report.residual:.3e}")
        else:
            logger.info(f"✅ All {len(reports)} checks passed")
        return list(reports)

    def run(self, suite: str, tolerance: Optional[float] = None,
            ratio: Optional[float] = None) -> List[IdentityReport]:
        return asyncio.run(self.run_async(suite, tolerance, ratio))
