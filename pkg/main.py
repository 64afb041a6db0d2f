# main.py
"""mockrad 명령행: compute | oracle | verify | tables | bench"""

import argparse
import asyncio
import json
import logging
import math
import os
import sys
import time
from typing import Dict, List, Optional

from dotenv import load_dotenv
from pydantic import ValidationError

# 현재 디렉토리를 Python 경로에 추가
current_dir = os.path.dirname(os.path.abspath(__file__))
sys.path.append(current_dir)

from services.config import Settings, load_settings
from services.errors import MockRadError, VerificationFailure
from services.file_manager import FileManager
from services.models import FluxClass, RademacherConfig, SeriesBreakdown
from services.multiplier_service import KloostermanService
from services.qseries_service import oracle_table
from services.rademacher_service import RademacherService
from services.reference.published_tables import PublishedTables
from services.verification_service import SUITES, VerificationService

logger = logging.getLogger("mockrad")

QUAD_FLAGS = ("interval_order", "radial_order", "angular_order", "mordell_order", "direct_order", "tail_eps")


class UsageError(Exception):
    """argparse 오류를 종료 코드 2 로 돌려주기 위한 예외"""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="mockrad", description="U(3) Vafa-Witten coefficients on P2: exact q-series and Rademacher sums")
    parser.add_argument("--verbose", "-v", action="store_true", help="DEBUG 로그 출력")
    parser.add_argument("--cache", metavar="PATH", default=None, help="Kloosterman 합 JSON 캐시")
    parser.add_argument("--threads", type=int, default=None)
    parser.add_argument("--format", choices=["tsv", "json"], default="tsv", dest="fmt")
    parser.add_argument("--save", action="store_true", help="reports 디렉토리에 결과 저장")
    for field in QUAD_FLAGS:
        parser.add_argument(f"--quad-{field.replace('_', '-')}", dest=f"quad_{field}",
                            type=float if field == "tail_eps" else int, default=None)

    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    compute = sub.add_parser("compute", help="Rademacher 합으로 α₃,μ(n) 계산")
    compute.add_argument("--mu", type=int, choices=[-1, 0, 1], default=0)
    compute.add_argument("--n", type=int, default=5)
    compute.add_argument("--N", type=int, default=3)

    oracle = sub.add_parser("oracle", help="정확한 q-급수 계수표")
    oracle.add_argument("--mu", type=int, choices=[-1, 0, 1], default=0)
    oracle.add_argument("--n-max", type=int, default=5, dest="n_max")

    verify = sub.add_parser("verify", help="항등식 수치 검사")
    verify.add_argument("suite", choices=list(SUITES) + ["all"])
    verify.add_argument("--tol", type=float, default=None, help="잔차 검사 허용 오차")
    verify.add_argument("--ratio", type=float, default=None, help="principal 상수 비율 상한 (기본 2)")

    sub.add_parser("tables", help="n = 5 수치표 재현 및 비교")

    bench = sub.add_parser("bench", help="k 별 소요 시간 측정")
    bench.add_argument("--mu", type=int, choices=[-1, 0, 1], default=0)
    bench.add_argument("--n", type=int, default=5)
    bench.add_argument("--N", type=int, default=3)
    return parser


def configure_logging(verbose: bool) -> None:
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )


# ---------------------------------------------------------------- 명령

async def _kloosterman(settings: Settings, file_manager: FileManager) -> KloostermanService:
    cache = None
    if settings.cache_path:
        cache = await file_manager.load_cache(settings.cache_path)
    return KloostermanService(cache)


async def _store_cache(settings: Settings, file_manager: FileManager, service: KloostermanService) -> None:
    if settings.cache_path:
        await file_manager.save_cache(settings.cache_path, service.export())


def render_breakdown(breakdown: SeriesBreakdown, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(breakdown.model_dump(mode="json"), ensure_ascii=False, indent=2) + "\n"
    return breakdown.to_tsv()


async def cmd_compute(args, settings: Settings, file_manager: FileManager) -> int:
    cfg = RademacherConfig(flux=FluxClass(mu=args.mu), n=args.n, N=args.N, quad=settings.quad)
    kloosterman = await _kloosterman(settings, file_manager)
    service = RademacherService(settings, kloosterman)
    breakdown = await service.alpha3_rademacher_async(cfg)
    sys.stdout.write(render_breakdown(breakdown, args.fmt))
    await _store_cache(settings, file_manager, kloosterman)
    if args.save:
        await file_manager.save_breakdown(breakdown, args.fmt)
    return 0


def cmd_oracle(args) -> int:
    values = oracle_table(args.mu, args.n_max)
    lines = ["n\texact\tdecimal"]
    for n, value in enumerate(values):
        exact = str(value.numerator) if value.denominator == 1 else f"{value.numerator}/{value.denominator}"
        lines.append(f"{n}\t{exact}\t{float(value)!r}")
    sys.stdout.write("\n".join(lines) + "\n")
    return 0


async def cmd_verify(args, settings: Settings, file_manager: FileManager) -> int:
    kloosterman = await _kloosterman(settings, file_manager)
    service = VerificationService(settings, kloosterman)
    reports = await service.run_async(args.suite, args.tol, args.ratio)
    data = [report.model_dump(mode="json", by_alias=True) for report in reports]
    sys.stdout.write(json.dumps(data, ensure_ascii=False, indent=2) + "\n")
    if args.save:
        await file_manager.save_verification(args.suite, reports)
    failed = [f"{report.identity} {report.parameters}" for report in reports if not report.passed]
    if failed:
        raise VerificationFailure(f"{len(failed)} of {len(reports)} checks failed", failed)
    return 0


def compare_tables(computed: Dict[int, SeriesBreakdown]) -> List[Dict]:
    """표의 각 칸을 인쇄 자릿수로 반올림해 비교한다."""
    cells = []
    for mu, breakdown in computed.items():
        table = PublishedTables.table(mu)
        for column, expected_values in table["rows"].items():
            for N, expected in zip(PublishedTables.N_VALUES, expected_values):
                row = breakdown.cumulative(N)
                value = row.total if column == "total" else getattr(row, f"{column}_cum")
                cells.append({
                    "mu": mu,
                    "column": column,
                    "N": N,
                    "expected": expected,
                    "computed": round(value, table["decimals"]),
                    "diff": value - expected,
                    "pass": abs(value - expected) <= PublishedTables.CELL_TOLERANCE,
                })
    return cells


async def cmd_tables(args, settings: Settings, file_manager: FileManager) -> int:
    kloosterman = await _kloosterman(settings, file_manager)
    service = RademacherService(settings, kloosterman)
    computed = {}
    for mu in sorted(PublishedTables.TABLES):
        table = PublishedTables.table(mu)
        cfg = RademacherConfig(flux=FluxClass(mu=mu), n=table["n"], N=max(PublishedTables.N_VALUES), quad=settings.quad)
        computed[mu] = await service.alpha3_rademacher_async(cfg)
    await _store_cache(settings, file_manager, kloosterman)

    cells = compare_tables(computed)
    if args.fmt == "json":
        sys.stdout.write(json.dumps(cells, ensure_ascii=False, indent=2) + "\n")
    else:
        lines = ["mu\tcolumn\tN\texpected\tcomputed\tdiff\tpass"]
        for cell in cells:
            decimals = PublishedTables.table(cell["mu"])["decimals"]
            lines.append(
                f"{cell['mu']}\t{cell['column']}\t{cell['N']}\t{cell['expected']:.{decimals}f}\t"
                f"{cell['computed']:.{decimals}f}\t{cell['diff']:+.2e}\t{cell['pass']}"
            )
        sys.stdout.write("\n".join(lines) + "\n")
    if args.save:
        await file_manager.save_json("tables", {"cells": cells})

    failed = [f"mu={c['mu']} {c['column']}(N={c['N']}) diff {c['diff']:+.2e}" for c in cells if not c["pass"]]
    if failed:
        raise VerificationFailure(f"{len(failed)} table cells differ", failed)
    logger.info(f"✅ All {len(cells)} table cells reproduced")
    return 0


def cmd_bench(args, settings: Settings) -> int:
    service = RademacherService(settings)
    flux = FluxClass(mu=args.mu)
    rows = []
    for k in range(1, args.N + 1):
        timings = []
        for term in (service.term_A1, service.term_A2, service.term_A3):
            start = time.perf_counter()
            term(flux, args.n, k)
            timings.append(time.perf_counter() - start)
        rows.append((k, *timings))
        logger.debug(f"📊 k={k}: {timings}")

    lines = ["k\tA1_seconds\tA2_seconds\tA3_seconds"]
    lines += [f"{k}\t{t1:.4f}\t{t2:.4f}\t{t3:.4f}" for k, t1, t2, t3 in rows]
    if len(rows) >= 2 and rows[0][3] > 0 and rows[-1][3] > 0:
        # A3 비용 ∝ k^p 의 관측 지수
        exponent = math.log(rows[-1][3] / rows[0][3]) / math.log(rows[-1][0])
        lines.append(f"# observed A3 cost exponent: {exponent:.2f}")
    sys.stdout.write("\n".join(lines) + "\n")
    return 0


async def dispatch(args, settings: Settings) -> int:
    file_manager = FileManager(settings.reports_dir)
    if args.command == "compute":
        return await cmd_compute(args, settings, file_manager)
    if args.command == "oracle":
        return cmd_oracle(args)
    if args.command == "verify":
        return await cmd_verify(args, settings, file_manager)
    if args.command == "tables":
        return await cmd_tables(args, settings, file_manager)
    return await asyncio.to_thread(cmd_bench, args, settings)


def main(argv: Optional[List[str]] = None) -> int:
    load_dotenv()
    try:
        args = build_parser().parse_args(argv)
    except UsageError as e:
        sys.stderr.write(f"mockrad: error: {e}\n")
        return 2

    configure_logging(args.verbose)
    try:
        overrides = {name: getattr(args, name) for name in (f"quad_{f}" for f in QUAD_FLAGS)}
        settings = load_settings(threads=args.threads, cache_path=args.cache, **overrides)
        if args.command in ("compute", "bench"):
            RademacherConfig(flux=FluxClass(mu=args.mu), n=args.n, N=args.N)
        return asyncio.run(dispatch(args, settings))
    except ValidationError as e:
        sys.stderr.write(f"mockrad: invalid configuration: {e}\n")
        return 2
    except VerificationFailure as e:
        logger.error(f"❌ {e}")
        for failure in e.failures:
            sys.stderr.write(f"  {failure}\n")
        return e.exit_code
    except MockRadError as e:
        logger.error(f"❌ {e}")
        return e.exit_code


if __name__ == "__main__":
    sys.exit(main())
