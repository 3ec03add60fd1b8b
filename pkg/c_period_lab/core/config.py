"""
환경 설정 관리 모듈

환경 변수(접두사 C_PERIOD_LAB_) 또는 .env 파일에서 수치 실험 기본값을 로드하고 검증합니다.
환경별 설정 분리를 지원합니다.
"""

import math
import os
import logging
from pathlib import Path
from typing import Optional

from pydantic_settings import BaseSettings, SettingsConfigDict

logger = logging.getLogger(__name__)


def _get_env_file() -> Optional[str]:
    """
    환경에 따라 .env 파일 경로를 결정합니다.

    우선순위:
    1. .env.{C_PERIOD_LAB_ENVIRONMENT} (예: .env.dev, .env.test)
    2. .env
    3. None (환경 변수만 사용)
    """
    env = os.getenv("C_PERIOD_LAB_ENVIRONMENT", "dev").lower()

    # config.py 위치: c_period_lab/core/config.py -> 프로젝트 루트는 2단계 위
    project_root = Path(__file__).resolve().parent.parent.parent

    env_file = project_root / f".env.{env}"
    if env_file.exists():
        logger.info(f"Loading environment file: .env.{env}")
        return str(env_file)

    env_file = project_root / ".env"
    if env_file.exists():
        logger.info("Loading environment file: .env")
        return str(env_file)

    logger.debug("No .env file found. Using environment variables and defaults only.")
    return None


class Settings(BaseSettings):
    """
    실험 설정 클래스

    환경 변수 또는 .env 파일에서 설정을 로드합니다.
    모든 수치 기본값은 CLI 플래그/RunConfig로 개별 실행마다 덮어쓸 수 있습니다.
    """

    # 환경 설정
    ENVIRONMENT: str = "dev"
    DEBUG: bool = False
    LOG_LEVEL: str = "INFO"
    LOG_FILE: Optional[str] = None

    # 병렬 처리 (C_PERIOD_LAB_THREADS)
    THREADS: int = max(1, min(8, os.cpu_count() or 1))
    CHUNK_SIZE: int = 256

    # 그리드 기본값 (sup을 유한 그리드 최댓값으로 근사)
    GRID_STEP: float = 0.005
    FULL_LINE_HALF_WIDTH: float = 200 * math.pi
    HALF_LINE_LENGTH: float = 400 * math.pi

    # Stepanov 창 적분
    STEPANOV_NODES: int = 64

    # 평균 / 스펙트럼
    MEAN_TOL: float = 1e-4
    MEAN_STEP: float = 0.01
    MEAN_BASE_HORIZON: float = 1000.0
    MEAN_HORIZON_COUNT: int = 8

    # 회전 궤도 탐색 예산
    ORBIT_L_MAX: int = 10_000_000

    # 합성곱 구적
    CONVOLUTION_STEP: float = 0.001
    FRACTIONAL_TAIL_STEP: float = 0.01
    KERNEL_TAIL_TOL: float = 1e-8
    KERNEL_SUM_TOL: float = 1e-12
    MAX_TRUNCATION: float = 2000.0

    # 급수 builtin 의 꼬리 상한을 보장하는 평가 구간 |t| <= SERIES_HORIZON
    SERIES_HORIZON: float = 1e5

    model_config = SettingsConfigDict(
        env_prefix="C_PERIOD_LAB_",
        env_file=_get_env_file(),
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",  # 추가 필드는 무시
    )

    def validate_settings(self) -> tuple[list[str], list[str]]:
        """
        설정값을 검증하고 문제가 있는 필드를 반환합니다.

        Returns:
            (critical_issues, warning_issues): (치명적 문제 리스트, 경고 문제 리스트)
        """
        critical_issues = []
        warning_issues = []

        if self.THREADS < 1:
            critical_issues.append("THREADS (1 이상이어야 함)")
        if self.CHUNK_SIZE < 1:
            critical_issues.append("CHUNK_SIZE (1 이상이어야 함)")

        for name in ("GRID_STEP", "MEAN_STEP", "CONVOLUTION_STEP", "FRACTIONAL_TAIL_STEP",
                     "MEAN_TOL", "KERNEL_TAIL_TOL", "KERNEL_SUM_TOL"):
            if not getattr(self, name) > 0:
                critical_issues.append(f"{name} (양수여야 함)")

        if self.STEPANOV_NODES < 8:
            critical_issues.append("STEPANOV_NODES (8 이상이어야 함)")
        if self.MEAN_HORIZON_COUNT < 2:
            critical_issues.append("MEAN_HORIZON_COUNT (수렴 판정에 2개 이상 필요)")
        if self.ORBIT_L_MAX < 1:
            critical_issues.append("ORBIT_L_MAX (1 이상이어야 함)")

        if self.GRID_STEP > 0.05:
            warning_issues.append("GRID_STEP (0.05 초과 - sup 근사 오차가 커질 수 있음)")
        if self.THREADS > (os.cpu_count() or 1) * 4:
            warning_issues.append("THREADS (CPU 수 대비 과도함)")

        return critical_issues, warning_issues

    def validate_and_raise(self) -> None:
        """
        설정을 검증하고 치명적 문제가 있으면 예외를 발생시킵니다.

        Raises:
            ValueError: 필수 설정이 유효하지 않은 경우
        """
        critical_issues, warning_issues = self.validate_settings()

        if critical_issues:
            raise ValueError(
                f"❌ 유효하지 않은 설정: {', '.join(critical_issues)}. "
                f"C_PERIOD_LAB_* 환경 변수 또는 .env 파일을 확인하세요."
            )

        if warning_issues:
            logger.warning(f"⚠️ 설정 경고: {', '.join(warning_issues)}")


# 설정 인스턴스 생성
settings = Settings()

critical_issues, warning_issues = settings.validate_settings()
if critical_issues:
    logger.warning(f"⚠️ 설정 문제 감지: {', '.join(critical_issues)}")
if warning_issues:
    logger.warning(f"⚠️ 설정 경고: {', '.join(warning_issues)}")
if not critical_issues and not warning_issues:
    logger.debug(
        f"✅ 설정 검증 완료. Environment: {settings.ENVIRONMENT}, Threads: {settings.THREADS}"
    )
