"""
실행 설정 스키마

CLI 가 받는 JSON 설정 파일(또는 플래그)의 구조를 정의합니다.
알 수 없는 필드는 거부하고, 서브커맨드별 필수 필드는 실행 전에 검증합니다.
"""

from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

from c_period_lab.services.convolution import Kernel
from c_period_lab.services.signal_core import Grid, SignalDescriptor, UnitComplex

Command = Literal[
    "signal-list", "defect", "scan", "recurrence", "semi", "stepanov",
    "spectrum", "mean", "orbit", "convolve", "heat", "solve",
]

# 서브커맨드별 필수 필드 (c, tau, p_candidates 는 신호의 hint 로 채울 수 있어 실행 시 확인)
REQUIRED_FIELDS: Dict[str, Tuple[str, ...]] = {
    "signal-list": (),
    "defect": ("signal",),
    "scan": ("signal", "epsilon", "tau_max", "tau_step"),
    "recurrence": ("signal", "alphas"),
    "semi": ("signal", "epsilon", "m_max"),
    "stepanov": ("signal", "epsilon", "tau_max", "tau_step"),
    "spectrum": ("signal", "freq_grid", "threshold"),
    "mean": ("signal",),
    "orbit": ("phi", "target", "epsilon", "k_count"),
    "convolve": ("signal", "kernel"),
    "heat": ("signal", "t0", "xs"),
    "solve": ("forcing", "kernel", "grid"),
}


class ForcingSpec(BaseModel):
    """builtin forcing 이름과 파라미터"""
    model_config = ConfigDict(extra="forbid")

    name: str = Field(..., description="zero | harmonic | harmonic-sine | linear")
    params: Dict[str, Any] = Field(default_factory=dict)


class OutputSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    json_path: Optional[Path] = Field(None, description="결과 JSON 경로 (None이면 stdout)")
    csv_path: Optional[Path] = Field(None, description="곡선/궤적 CSV 경로")


class RunConfig(BaseModel):
    """재현 가능한 단일 실행 설정"""

    model_config = ConfigDict(extra="forbid")

    command: Command
    signal: Optional[SignalDescriptor] = None
    c: Optional[UnitComplex] = None
    grid: Optional[Grid] = None

    # 주기 / 회귀
    tau: Optional[float] = Field(None, gt=0)
    epsilon: Optional[float] = Field(None, gt=0)
    tau_max: Optional[float] = Field(None, gt=0)
    tau_step: Optional[float] = Field(None, gt=0)
    alphas: Optional[List[float]] = None
    p_candidates: Optional[List[float]] = None
    m_max: Optional[int] = Field(None, ge=1)
    mask_radius: Optional[float] = Field(None, ge=0, description="defect/stepanov 의 |t| >= M 마스크")

    # Stepanov
    p: float = Field(1.0, ge=1.0)
    nodes_per_window: Optional[int] = Field(None, ge=8)
    starts: Optional[List[float]] = None

    # 평균 / 스펙트럼
    r: float = 0.0
    horizons: Optional[List[float]] = None
    freq_grid: Optional[List[float]] = None
    threshold: Optional[float] = Field(None, gt=0)
    mean_zero: bool = Field(False, description="mean: c 와 스캔으로 평균-0 검사도 수행")
    n_count: int = Field(16, ge=1)

    # 궤도
    phi: Optional[float] = None
    target: Optional[Tuple[float, float]] = None
    k_count: Optional[int] = Field(None, ge=1)
    l_max: Optional[int] = Field(None, ge=1)

    # 합성곱 / 열 방정식
    kernel: Optional[Kernel] = None
    ts: Optional[List[float]] = None
    halfline: bool = False
    truncation: Optional[float] = Field(None, gt=0)
    q: Optional[float] = Field(None, ge=1)
    conjugate: bool = False
    t0: Optional[float] = Field(None, gt=0)
    xs: Optional[List[float]] = None

    # 고정점 풀이
    forcing: Optional[ForcingSpec] = None
    u0: Tuple[float, float] = (0.0, 0.0)
    tol: Optional[float] = Field(None, gt=0)
    max_iter: int = Field(200, ge=1)
    allow_non_contraction: bool = False

    output: OutputSpec = Field(default_factory=OutputSpec)

    @model_validator(mode="after")
    def _required_for_command(self) -> "RunConfig":
        missing = [name for name in REQUIRED_FIELDS[self.command] if getattr(self, name) is None]
        if missing:
            raise ValueError(f"command '{self.command}' requires: {', '.join(missing)}")
        if self.command == "convolve" and not self.ts and self.q is None:
            raise ValueError("command 'convolve' requires 'ts' or 'q'")
        return self
