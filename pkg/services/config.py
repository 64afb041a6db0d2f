# services/config.py
import os
from typing import Optional

from pydantic import BaseModel, Field, field_validator


class QuadratureConfig(BaseModel):
    """구적 규칙 차수 설정 (quad.* 키)"""

    interval_order: int = Field(200, ge=1)
    radial_order: int = Field(120, ge=1)
    angular_order: int = Field(160, ge=2)
    mordell_order: int = Field(400, ge=1)
    direct_order: int = Field(400, ge=8)
    tail_eps: float = Field(1e-16, gt=0.0, lt=1e-6)

    @field_validator("angular_order")
    @classmethod
    def _even_angular(cls, value: int) -> int:
        # 원점 대칭 (θ → θ+π) 이 규칙에 그대로 남도록 짝수만 허용
        if value % 2:
            raise ValueError("angular_order must be even")
        return value


class Settings(BaseModel):
    quad: QuadratureConfig = Field(default_factory=QuadratureConfig)
    threads: int = Field(default_factory=lambda: os.cpu_count() or 1, ge=1)
    cache_path: Optional[str] = None
    reports_dir: str = "reports"


_QUAD_ENV_KEYS = {
    "interval_order": "MOCKRAD_QUAD_INTERVAL_ORDER",
    "radial_order": "MOCKRAD_QUAD_RADIAL_ORDER",
    "angular_order": "MOCKRAD_QUAD_ANGULAR_ORDER",
    "mordell_order": "MOCKRAD_QUAD_MORDELL_ORDER",
    "direct_order": "MOCKRAD_QUAD_DIRECT_ORDER",
    "tail_eps": "MOCKRAD_QUAD_TAIL_EPS",
}


def load_settings(**overrides) -> Settings:
    """환경 변수에서 설정을 읽고, 주어진 값(CLI 플래그)으로 덮어쓴다.

    quad.* 항목은 overrides에 "quad_interval_order" 처럼 접두어를 붙여 넘긴다.
    None 값은 무시한다.
    """
    quad_values = {}
    for field, env_key in _QUAD_ENV_KEYS.items():
        raw = os.getenv(env_key)
        if raw is not None and raw != "":
            quad_values[field] = raw
        override = overrides.pop(f"quad_{field}", None)
        if override is not None:
            quad_values[field] = override

    values = {"quad": QuadratureConfig(**quad_values)}

    threads = os.getenv("MOCKRAD_THREADS")
    if threads:
        values["threads"] = threads
    cache_path = os.getenv("MOCKRAD_CACHE")
    if cache_path:
        values["cache_path"] = cache_path
    reports_dir = os.getenv("MOCKRAD_REPORTS_DIR")
    if reports_dir:
        values["reports_dir"] = reports_dir

    values.update({key: value for key, value in overrides.items() if value is not None})
    return Settings(**values)
