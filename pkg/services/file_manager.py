import os
import json
import logging
from datetime import datetime
from typing import Dict, List, Optional, Tuple

import aiofiles

from services.models import IdentityReport, SeriesBreakdown

logger = logging.getLogger(__name__)


class FileManager:
    def __init__(self, base_dir: str = "reports"):
        self.base_dir = base_dir

    def _report_path(self, name: str, extension: str) -> str:
        os.makedirs(self.base_dir, exist_ok=True)
        stamp = datetime.now().strftime("%Y%m%d_%H%M%S")
        return os.path.join(self.base_dir, f"{name}_{stamp}.{extension}")

    async def _write_text(self, file_path: str, text: str) -> str:
        async with aiofiles.open(file_path, "w", encoding="utf-8") as f:
            await f.write(text)
        logger.info(f"💾 Saved {file_path}")
        return file_path

    async def save_breakdown(self, breakdown: SeriesBreakdown, fmt: str = "tsv") -> str:
        """SeriesBreakdown 을 TSV 또는 JSON 으로 저장"""
        name = f"alpha3_mu{breakdown.mu}_n{breakdown.n}_N{breakdown.N}"
        if fmt == "json":
            text = json.dumps(breakdown.model_dump(mode="json"), ensure_ascii=False, indent=2)
        else:
            text = breakdown.to_tsv()
        return await self._write_text(self._report_path(name, fmt), text)

    async def save_verification(self, suite: str, reports: List[IdentityReport]) -> str:
        """검증 결과 JSON 저장"""
        data = [report.model_dump(mode="json", by_alias=True) for report in reports]
        text = json.dumps(data, ensure_ascii=False, indent=2)
        return await self._write_text(self._report_path(f"verify_{suite}", "json"), text)

    async def save_json(self, name: str, data: Dict) -> str:
        text = json.dumps(data, ensure_ascii=False, indent=2)
        return await self._write_text(self._report_path(name, "json"), text)

    async def load_cache(self, cache_path: str) -> Optional[Dict[str, Tuple[float, float]]]:
        """Kloosterman 캐시 로드. 파일이 없으면 None."""
        if not os.path.exists(cache_path):
            return None
        async with aiofiles.open(cache_path, "r", encoding="utf-8") as f:
            content = await f.read()
        try:
            return {key: (float(value[0]), float(value[1])) for key, value in json.loads(content).items()}
        except (ValueError, TypeError, IndexError, AttributeError) as e:
            logger.warning(f"⚠️ Ignoring unreadable cache {cache_path}: {e}")
            return None

    async def save_cache(self, cache_path: str, cache: Dict[str, Tuple[float, float]]) -> str:
        """JSON float 는 repr 정밀도로 쓰이므로 다시 읽어도 같은 값이 된다."""
        directory = os.path.dirname(cache_path)
        if directory:
            os.makedirs(directory, exist_ok=True)
        text = json.dumps({key: [value[0], value[1]] for key, value in sorted(cache.items())}, indent=2)
        return await self._write_text(cache_path, text)
