"""
c_period_lab 명령줄 진입점

    python -m c_period_lab <command> [--config run.json] [flags]

설정 파일(JSON)을 읽고 플래그로 덮어쓴 뒤 RunConfig 로 검증하여 실행합니다.
종료 코드: 0 성공, 2 입력 검증 오류, 3 수치 실패.
"""

import argparse
import json
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, ValidationError

# 로깅 설정 초기화 (가장 먼저 실행 - 다른 임포트 전에)
from c_period_lab.core.logger import get_logger, setup_logging
from c_period_lab.core.config import settings

logger = get_logger(__name__)

from c_period_lab.commands import COMMANDS, dispatch  # noqa: E402
from c_period_lab.core.exceptions import LabError, LabValidationError, NumericalFailure  # noqa: E402
from c_period_lab.core.responses import ErrorDetail, ErrorResponse, SuccessResponse  # noqa: E402
from c_period_lab.services import exporters  # noqa: E402
from c_period_lab.services.constants import ExitCode  # noqa: E402
from c_period_lab.services.schemas.run_config import RunConfig  # noqa: E402

# 예외 객체에서 error.context 로 옮길 속성
_CONTEXT_ATTRS = ("value", "m1", "best_so_far", "best_distance", "residual_history", "inequality",
                  "gamma", "exponent")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="c_period_lab", description="c-almost periodic function lab")
    parser.add_argument("command", choices=sorted(COMMANDS), help="실행할 서브커맨드")
    parser.add_argument("--config", type=Path, help="RunConfig JSON 파일")
    parser.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=JSON",
                        help="설정 필드 덮어쓰기 (값은 JSON, 예: --set epsilon=0.01)")
    parser.add_argument("--epsilon", type=float)
    parser.add_argument("--tau-max", dest="tau_max", type=float)
    parser.add_argument("--tau-step", dest="tau_step", type=float)
    parser.add_argument("--tol", type=float)
    parser.add_argument("--json-out", dest="json_path", type=Path, help="결과 JSON 경로 (기본 stdout)")
    parser.add_argument("--csv-out", dest="csv_path", type=Path, help="곡선 CSV 경로")
    parser.add_argument("--log-level", dest="log_level", help="DEBUG | INFO | WARNING | ERROR")
    return parser


def _parse_override(item: str) -> tuple[str, Any]:
    key, sep, raw = item.partition("=")
    if not sep or not key:
        raise LabValidationError(f"override must look like KEY=JSON, got '{item}'", field="--set")
    try:
        return key.strip(), json.loads(raw)
    except json.JSONDecodeError:
        # 따옴표 없는 문자열 허용
        return key.strip(), raw


def load_config(args: argparse.Namespace) -> RunConfig:
    """설정 파일 -> --set -> 개별 플래그 순으로 병합하여 검증합니다. 뒤쪽이 우선합니다."""
    raw: Dict[str, Any] = {}
    if args.config is not None:
        try:
            raw = json.loads(args.config.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as e:
            raise LabValidationError(f"cannot read config file {args.config}: {e}", field="--config") from e
        if not isinstance(raw, dict):
            raise LabValidationError("config file must contain a JSON object", field="--config")
    raw["command"] = args.command
    for item in args.overrides:
        key, value = _parse_override(item)
        raw[key] = value
    for name in ("epsilon", "tau_max", "tau_step", "tol"):
        value = getattr(args, name)
        if value is not None:
            raw[name] = value
    output = dict(raw.get("output") or {})
    if args.json_path is not None:
        output["json_path"] = str(args.json_path)
    if args.csv_path is not None:
        output["csv_path"] = str(args.csv_path)
    raw["output"] = output
    return RunConfig.model_validate(raw)


def _error_response(command: Optional[str], exit_code: ExitCode, error: Exception) -> ErrorResponse:
    if isinstance(error, ValidationError):
        first = error.errors()[0]
        detail = ErrorDetail(
            code="VALIDATION_ERROR",
            message=f"{first['msg']} ({error.error_count()} error(s))",
            field=".".join(str(p) for p in first["loc"]) or None,
        )
    elif isinstance(error, LabError):
        context = {name: getattr(error, name) for name in _CONTEXT_ATTRS if getattr(error, name, None) is not None}
        if "value" in context and isinstance(context["value"], complex):
            context["value"] = [context["value"].real, context["value"].imag]
        detail = ErrorDetail(code=error.code, message=error.message, field=error.field,
                             context=context or None)
    elif exit_code is ExitCode.VALIDATION:
        detail = ErrorDetail(code="CONFIG_ERROR", message=str(error))
    else:
        detail = ErrorDetail(code="INTERNAL_ERROR", message=f"{type(error).__name__}: {error}")
    return ErrorResponse(command=command, exit_code=int(exit_code), error=detail)


def _emit(response: BaseModel, path: Optional[Path]) -> None:
    if path is None:
        sys.stdout.write(response.model_dump_json(indent=2) + "\n")
    else:
        exporters.write_json(response, path)


def run(args: argparse.Namespace) -> int:
    """파싱된 인자로 한 번 실행하고 종료 코드를 반환합니다."""
    json_path = args.json_path
    try:
        settings.validate_and_raise()
    except ValueError as e:
        logger.critical(f"❌ Configuration validation failed: {e}")
        _emit(_error_response(args.command, ExitCode.VALIDATION, e), json_path)
        return int(ExitCode.VALIDATION)

    try:
        config = load_config(args)
        json_path = config.output.json_path
        data, frame = dispatch(config)
        response = SuccessResponse[Dict[str, Any]](command=config.command, data=data)
        _emit(response, json_path)
        if frame is not None and config.output.csv_path is not None:
            exporters.write_frame(frame, config.output.csv_path)
            logger.info(f"📝 CSV 저장: {config.output.csv_path}")
        return int(ExitCode.OK)
    except NumericalFailure as e:
        logger.error(f"❌ 수치 실패 [{e.code}]: {e.message}")
        code, error = ExitCode.NUMERICAL, e
    except (LabValidationError, ValidationError) as e:
        logger.error(f"❌ 입력 검증 실패: {e}")
        code, error = ExitCode.VALIDATION, e
    except Exception as e:
        logger.exception(f"❌ 예상하지 못한 오류: {e}")
        code, error = ExitCode.NUMERICAL, e
    _emit(_error_response(args.command, code, error), json_path)
    return int(code)


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    setup_logging(log_level=args.log_level)
    return run(args)


if __name__ == "__main__":
    sys.exit(main())
