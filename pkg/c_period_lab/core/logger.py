"""
로깅 설정

CLI 실행 한 번에 루트 로거를 한 번 구성합니다.
결과 JSON/CSV 가 stdout 또는 파일로 나가므로 로그는 항상 stderr (와 선택적 로그 파일) 로 보냅니다.
"""

import logging
import sys
from pathlib import Path
from typing import List, Optional

from .config import settings

DEFAULT_LOG_FORMAT = (
    "%(asctime)s | %(levelname)-8s | %(name)s | "
    "%(filename)s:%(lineno)d | %(message)s"
)
DATE_FORMAT = "%Y-%m-%d %H:%M:%S"

# 과학 계산 라이브러리의 로그는 DEBUG 가 아니면 WARNING 이상만
QUIET_LOGGERS = ("numpy", "scipy", "pandas", "hypothesis", "matplotlib")


def _resolve_level(log_level: Optional[str]) -> str:
    if log_level:
        return log_level.upper()
    return "DEBUG" if settings.DEBUG else (settings.LOG_LEVEL or "INFO").upper()


def _handlers(log_file: Optional[str]) -> List[logging.Handler]:
    handlers: List[logging.Handler] = [logging.StreamHandler(sys.stderr)]
    if not log_file:
        return handlers
    try:
        Path(log_file).parent.mkdir(parents=True, exist_ok=True)
        handlers.append(logging.FileHandler(log_file, encoding="utf-8"))
    except OSError as e:
        # stderr 만으로 계속 진행
        sys.stderr.write(f"⚠️ 로그 파일을 열 수 없습니다 ({log_file}): {e}\n")
    return handlers


def setup_logging(
    log_level: Optional[str] = None,
    log_file: Optional[str] = None,
    log_format: Optional[str] = None
) -> None:
    """
    루트 로거를 구성합니다. 다시 호출하면 기존 핸들러를 교체합니다.

    Args:
        log_level: DEBUG | INFO | WARNING | ERROR | CRITICAL. None 이면 settings.DEBUG / LOG_LEVEL
        log_file: 추가 로그 파일 (None 이면 settings.LOG_FILE)
        log_format: 로그 포맷 문자열
    """
    level = _resolve_level(log_level)
    numeric_level = getattr(logging, level, logging.INFO)
    formatter = logging.Formatter(log_format or DEFAULT_LOG_FORMAT, datefmt=DATE_FORMAT)

    root = logging.getLogger()
    root.setLevel(numeric_level)
    root.handlers.clear()
    for handler in _handlers(log_file or settings.LOG_FILE):
        handler.setLevel(numeric_level)
        handler.setFormatter(formatter)
        root.addHandler(handler)

    library_level = logging.DEBUG if settings.DEBUG else logging.WARNING
    for name in QUIET_LOGGERS:
        logging.getLogger(name).setLevel(library_level)

    logging.getLogger(__name__).debug(f"✅ 로깅 구성 완료: level={level}, env={settings.ENVIRONMENT}")


def get_logger(name: str) -> logging.Logger:
    """모듈별 로거 (보통 get_logger(__name__))."""
    return logging.getLogger(name)
