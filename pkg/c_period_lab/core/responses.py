"""
표준화된 실행 결과 모델

모든 CLI 서브커맨드에서 일관된 JSON 결과 형식을 제공합니다.
같은 설정 파일이 바이트 단위로 같은 출력을 내도록 타임스탬프는 넣지 않습니다.
"""

from typing import Any, Generic, Optional, TypeVar

from pydantic import BaseModel, Field

T = TypeVar('T')


class ErrorDetail(BaseModel):
    """에러 상세 정보"""
    code: str = Field(..., description="에러 코드")
    message: str = Field(..., description="에러 메시지")
    field: Optional[str] = Field(None, description="에러가 발생한 필드 (검증 오류인 경우)")
    context: Optional[dict[str, Any]] = Field(None, description="예외별 부가 정보 (M1, best_so_far 등)")


class ErrorResponse(BaseModel):
    """표준화된 에러 응답 모델"""
    success: bool = Field(False, description="실행 성공 여부")
    command: Optional[str] = Field(None, description="실행한 서브커맨드")
    exit_code: int = Field(..., description="프로세스 종료 코드")
    error: ErrorDetail = Field(..., description="에러 상세 정보")


class SuccessResponse(BaseModel, Generic[T]):
    """표준화된 성공 응답 모델"""
    success: bool = Field(True, description="실행 성공 여부")
    command: str = Field(..., description="실행한 서브커맨드")
    data: T = Field(..., description="결과 데이터")
    message: Optional[str] = Field(None, description="추가 메시지")
