import os
import sys

import pytest

# 프로젝트 루트를 Python 경로에 추가
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from services.config import QuadratureConfig, Settings
from services.multiplier_service import KloostermanService


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: full-order numerics (table reproduction, mock transformation)")


@pytest.fixture
def low_quad() -> QuadratureConfig:
    """빠른 구조 검사용 낮은 차수"""
    return QuadratureConfig(
        interval_order=60,
        radial_order=24,
        angular_order=32,
        mordell_order=120,
        direct_order=120,
    )


@pytest.fixture
def low_settings(low_quad) -> Settings:
    return Settings(quad=low_quad, threads=2)


@pytest.fixture
def kloosterman() -> KloostermanService:
    return KloostermanService()
