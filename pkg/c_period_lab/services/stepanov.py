"""
Stepanov 노름 모듈

단위 창 [t, t+1] 의 L^p 노름과 lift f̂(t)(s) = f(t+s) 의 (p,c)-결함,
Stepanov 주기 스캔을 제공합니다. 창 적분은 합성 사다리꼴 공식입니다.
"""

from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from scipy.integrate import trapezoid

from c_period_lab.core.config import settings
from c_period_lab.core.exceptions import EmptyMaskError, LabValidationError
from c_period_lab.core.logger import get_logger
from c_period_lab.services.period_scan import PeriodScanReport, build_scan_report, scan_taus
from c_period_lab.services.signal_core import GridLike, Signal, UnitComplex, as_unit, resolve_nodes
from c_period_lab.services.workers import iter_concat, map_chunks, split_chunks

logger = get_logger(__name__)

_EVAL_BUDGET = 2_000_000


class StepanovParams(BaseModel):
    model_config = ConfigDict(frozen=True)

    p: float = Field(1.0, ge=1.0)
    nodes_per_window: int = Field(default_factory=lambda: settings.STEPANOV_NODES, ge=8)

    @property
    def offsets(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, self.nodes_per_window)

    @property
    def dx(self) -> float:
        return 1.0 / (self.nodes_per_window - 1)


def _window_lp(values: np.ndarray, params: StepanovParams) -> np.ndarray:
    """마지막 축이 창 내부 노드인 ‖·‖ 배열의 (∫|·|^p)^{1/p}."""
    return trapezoid(values ** params.p, dx=params.dx, axis=-1) ** (1.0 / params.p)


def stepanov_profile(signal: Signal, params: StepanovParams, starts: GridLike) -> np.ndarray:
    """각 창 시작점 t 에서의 (∫_t^{t+1} ‖f‖^p)^{1/p}."""
    t0, _ = resolve_nodes(starts)
    offsets = params.offsets
    per_chunk = max(1, _EVAL_BUDGET // offsets.size)

    def run(chunk: np.ndarray) -> np.ndarray:
        norms = signal.norms((chunk[:, None] + offsets[None, :]).ravel()).reshape(chunk.size, offsets.size)
        return _window_lp(norms, params)

    return iter_concat(map_chunks(run, split_chunks(t0, per_chunk)))


def stepanov_norm(signal: Signal, params: StepanovParams, starts: GridLike) -> float:
    """
    sup_t (∫_t^{t+1} ‖f(s)‖^p ds)^{1/p} 를 창 시작점 그리드에서 근사합니다.

    Raises:
        DomainError: 창이 정의역을 벗어나는 경우
    """
    return float(np.max(stepanov_profile(signal, params, starts)))


def window_defects_for_taus(signal: Signal, taus: np.ndarray, c: UnitComplex, params: StepanovParams,
                            t0: np.ndarray) -> np.ndarray:
    """여러 τ 에 대해 max_t (∫_t^{t+1} ‖f(s+τ) - c f(s)‖^p ds)^{1/p} 를 계산합니다."""
    taus = np.atleast_1d(np.asarray(taus, dtype=float))
    if taus.size == 0:
        return np.empty(0)
    offsets = params.offsets
    points = (t0[:, None] + offsets[None, :]).ravel()
    base = signal.evaluate(points)
    cval = c.value
    per_chunk = max(1, _EVAL_BUDGET // points.size)

    def run(chunk: np.ndarray) -> np.ndarray:
        shifted = signal.evaluate((chunk[:, None] + points[None, :]).ravel())
        shifted = shifted.reshape(chunk.size, points.size, signal.dim)
        norms = np.linalg.norm(shifted - cval * base[None, :, :], axis=2)
        norms = norms.reshape(chunk.size, t0.size, offsets.size)
        return _window_lp(norms, params).max(axis=1)

    return iter_concat(map_chunks(run, split_chunks(taus, per_chunk)))


def stepanov_defect(signal: Signal, tau: float, c: UnitComplex, params: StepanovParams,
                    starts: GridLike) -> float:
    """lift f̂ 의 L^p 창 거리로 잰 c-결함."""
    c = as_unit(c)
    t0, _ = resolve_nodes(starts)
    return float(window_defects_for_taus(signal, np.array([tau]), c, params, t0)[0])


def stepanov_defect_beyond(signal: Signal, tau: float, c: UnitComplex, params: StepanovParams,
                           starts: GridLike, M: float) -> float:
    """
    창 [t, t+1] 과 이동된 창이 모두 |s| >= M 영역에 있는 시작점만으로 본 결함.

    Raises:
        EmptyMaskError: 조건을 만족하는 창이 없는 경우
    """
    c = as_unit(c)
    t0, _ = resolve_nodes(starts)

    def outside(lo: np.ndarray) -> np.ndarray:
        return (lo >= M) | (lo + 1.0 <= -M)

    mask = outside(t0) & outside(t0 + tau)
    if not np.any(mask):
        raise EmptyMaskError(f"no window lies beyond M = {M}", field="M")
    return float(window_defects_for_taus(signal, np.array([tau]), c, params, t0[mask])[0])


def stepanov_scan(signal: Signal, c: UnitComplex, epsilon: float, params: StepanovParams,
                  tau_max: float, tau_step: float, starts: Optional[GridLike] = None) -> PeriodScanReport:
    """
    Stepanov (p,c)-주기 스캔. scan_periods 와 같은 보고서 형식에 p 가 추가됩니다.

    starts 가 없으면 [0, 2·tau_max] 의 정수 창 시작점을 사용합니다.
    """
    c = as_unit(c)
    if not epsilon > 0:
        raise LabValidationError("epsilon must be positive", field="epsilon", value=epsilon)
    if starts is None:
        starts = np.arange(0.0, 2 * tau_max + 1.0)
    t0, _ = resolve_nodes(starts)
    taus = scan_taus(tau_max, tau_step)
    defects = window_defects_for_taus(signal, taus, c, params, t0)
    report = build_scan_report(c, epsilon, tau_max, tau_step, taus, defects, starts,
                               metric="stepanov", p=params.p)
    logger.info(
        f"stepanov scan {signal.descriptor.name} p={params.p}: accepted={len(report.accepted)}, "
        f"max_gap={report.max_gap:.6g}"
    )
    return report
