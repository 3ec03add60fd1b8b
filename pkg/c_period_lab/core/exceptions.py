"""
커스텀 예외 클래스 정의

신호 구성, 주기 탐색, 합성곱, 고정점 풀이에서 사용하는 표준 예외 클래스입니다.
LabValidationError 계열은 입력 오류(CLI 종료 코드 2),
NumericalFailure 계열은 수치 실패(CLI 종료 코드 3)를 나타냅니다.
"""

from typing import Any, Optional, Sequence


class LabError(Exception):
    """c_period_lab 기본 예외 클래스"""

    code = "LAB_ERROR"

    def __init__(self, message: str, field: Optional[str] = None):
        super().__init__(message)
        self.message = message
        self.field = field


# ------------------------------------------------------
# 입력 검증 실패 (exit 2)
# ------------------------------------------------------

class LabValidationError(LabError):
    """입력 데이터 검증 실패 예외"""

    code = "VALIDATION_ERROR"

    def __init__(self, message: str, field: Optional[str] = None, value: Any = None):
        super().__init__(message, field)
        self.value = value


class DomainError(LabValidationError):
    """반직선 [0,∞) 신호를 음수 시각에서 평가하거나 정의역이 맞지 않는 경우"""

    code = "DOMAIN_ERROR"


class SignalSpecError(LabValidationError):
    """알 수 없는 builtin 이름 또는 잘못된 신호 파라미터"""

    code = "SIGNAL_SPEC_ERROR"


class UnitCircleError(LabValidationError):
    """| |c| - 1 | > 1e-12 인 승수 c"""

    code = "UNIT_CIRCLE_ERROR"


class GridError(LabValidationError):
    """start >= end, step <= 0 또는 노드가 2개 미만인 그리드"""

    code = "GRID_ERROR"


class WrongKindError(LabValidationError):
    """유리수 편각이 필요한 연산에 무리수 편각 c 를 넘긴 경우 (또는 반대)"""

    code = "WRONG_KIND"


class SingularWindowError(LabValidationError):
    """커널의 첫 창 [0,1] 에서 L^q 적분이 발산하는 경우"""

    code = "SINGULAR_WINDOW"

    def __init__(self, message: str, gamma: float = None, exponent: float = None):
        super().__init__(message, field="q", value=exponent)
        self.gamma = gamma
        self.exponent = exponent


class PreconditionError(LabValidationError):
    """연산의 사전 조건 위반 (예: c=1 에 대한 평균-0 검사, 빈 스캔)"""

    code = "PRECONDITION_FAILED"


# ------------------------------------------------------
# 수치 실패 (exit 3)
# ------------------------------------------------------

class NumericalFailure(LabError):
    """수치 계산이 결과를 보장하지 못한 경우의 기본 예외"""

    code = "NUMERICAL_FAILURE"


class TransferError(NumericalFailure):
    """(ε/2, c^l) 주기를 (ε, c') 주기로 옮기는 부등식이 성립하지 않음"""

    code = "TRANSFER_FAILED"

    def __init__(self, message: str, inequality: str = None):
        super().__init__(message)
        self.inequality = inequality


class EmptyMaskError(NumericalFailure):
    """|t|, |t+τ| >= M 조건을 만족하는 그리드 노드가 없음"""

    code = "EMPTY_MASK"


class ExtensionError(NumericalFailure):
    """음수 x 를 덮는 (ε,c) 주기 τ >= |x| 가 스캔 보고서에 없음"""

    code = "EXTENSION_FAILED"


class SearchBudgetError(NumericalFailure):
    """l_max 안에서 요청한 개수의 궤도 근사 지수를 찾지 못함"""

    code = "SEARCH_BUDGET_EXHAUSTED"

    def __init__(self, message: str, best_so_far: Optional[Sequence[int]] = None,
                 best_distance: Optional[float] = None):
        super().__init__(message)
        self.best_so_far = list(best_so_far or [])
        self.best_distance = best_distance


class ContractionError(NumericalFailure):
    """M1 = L·∫R >= 1 이라 축약 사상이 보장되지 않음"""

    code = "NOT_A_CONTRACTION"

    def __init__(self, message: str, m1: float = None):
        super().__init__(message, field="M1")
        self.m1 = m1


class DivergenceError(NumericalFailure):
    """고정점 반복의 잔차가 연속으로 증가함"""

    code = "DIVERGENCE"

    def __init__(self, message: str, residual_history: Optional[Sequence[float]] = None):
        super().__init__(message)
        self.residual_history = list(residual_history or [])
