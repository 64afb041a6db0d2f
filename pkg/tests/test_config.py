import pytest
from pydantic import ValidationError

from services.config import QuadratureConfig, load_settings


class TestLoadSettings:
    def test_defaults(self, monkeypatch):
        monkeypatch.delenv("MOCKRAD_QUAD_RADIAL_ORDER", raising=False)
        monkeypatch.delenv("MOCKRAD_REPORTS_DIR", raising=False)
        settings = load_settings()
        assert settings.quad == QuadratureConfig()
        assert settings.reports_dir == "reports"

    def test_environment(self, monkeypatch):
        monkeypatch.setenv("MOCKRAD_QUAD_RADIAL_ORDER", "48")
        monkeypatch.setenv("MOCKRAD_THREADS", "3")
        settings = load_settings()
        assert settings.quad.radial_order == 48
        assert settings.threads == 3

    def test_flag_overrides_environment(self, monkeypatch):
        monkeypatch.setenv("MOCKRAD_QUAD_RADIAL_ORDER", "48")
        monkeypatch.setenv("MOCKRAD_THREADS", "3")
        settings = load_settings(threads=5, quad_radial_order=64, cache_path=None)
        assert settings.quad.radial_order == 64
        assert settings.threads == 5
        assert settings.cache_path is None

    @pytest.mark.parametrize("field,value", [("angular_order", 31), ("interval_order", 0), ("tail_eps", 1e-3)])
    def test_invalid_quadrature(self, field, value):
        with pytest.raises(ValidationError):
            QuadratureConfig(**{field: value})

    def test_invalid_environment(self, monkeypatch):
        monkeypatch.setenv("MOCKRAD_THREADS", "0")
        with pytest.raises(ValidationError):
            load_settings()
