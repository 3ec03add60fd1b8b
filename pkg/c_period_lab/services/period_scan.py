"""
(ε,c)-주기 구조 측정 모듈

그리드 위에서 sup_t ‖f(t+τ) - c f(t)‖ 를 계산하여 다음을 제공합니다.
- 결함(defect), τ 스캔과 상대 조밀성(relative density) 증거
- c-균등 회귀(uniform recurrence) 결함 수열, semi-c-주기성 검사
- 거듭제곱 망원(telescoping) 부등식, c^l 주기의 c' 주기로의 이전
- 점근적(마스크된) 결함, 반직선 신호의 음수 시각 근사 확장

스캔은 증거(witness)를 줄 뿐 c-거의 주기성을 반박하지는 못합니다.
"""

import math
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_serializer, model_validator

from c_period_lab.core.exceptions import (
    EmptyMaskError,
    ExtensionError,
    LabValidationError,
    PreconditionError,
    TransferError,
)
from c_period_lab.core.logger import get_logger
from c_period_lab.services.signal_core import (
    Grid,
    GridLike,
    Signal,
    UnitComplex,
    as_unit,
    resolve_nodes,
)
from c_period_lab.services.workers import iter_concat, map_chunks, split_chunks

logger = get_logger(__name__)

# 한 번에 평가할 (τ 개수 × 노드 수) 상한
_EVAL_BUDGET = 2_000_000


# ------------------------------------------------------
# 보고서 모델
# ------------------------------------------------------

class PeriodScanReport(BaseModel):
    """τ = k·tau_step (0 < τ <= tau_max) 스캔 결과."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    c: UnitComplex
    epsilon: float = Field(..., ge=0)
    tau_max: float = Field(..., gt=0)
    tau_step: float = Field(..., gt=0)
    accepted: List[Tuple[float, float]] = Field(default_factory=list)
    max_gap: float
    grid: Optional[Grid] = None
    metric: str = "sup"
    p: Optional[float] = None
    diagnostics: Dict[str, Any] = Field(default_factory=dict)
    curve: Optional[np.ndarray] = Field(None, exclude=True, repr=False)

    @model_validator(mode="after")
    def _check_accepted(self) -> "PeriodScanReport":
        taus = [tau for tau, _ in self.accepted]
        if any(b <= a for a, b in zip(taus, taus[1:])):
            raise ValueError("accepted τ values must be strictly increasing")
        if any(d > self.epsilon for _, d in self.accepted):
            raise ValueError("accepted defects must not exceed epsilon")
        return self

    @field_serializer("c")
    def _serialize_c(self, c: UnitComplex) -> Dict[str, Any]:
        return c.describe()

    @property
    def accepted_taus(self) -> np.ndarray:
        return np.array([tau for tau, _ in self.accepted], dtype=float)


class RecurrenceReport(BaseModel):
    """shift 수열 (α_n) 과 각 shift 의 결함."""

    alphas: List[float]
    defects: List[float]
    c: Optional[UnitComplex] = None
    slack: float = 0.0

    @model_validator(mode="after")
    def _check(self) -> "RecurrenceReport":
        if len(self.alphas) != len(self.defects):
            raise ValueError("alphas and defects must have equal length")
        return self

    @field_serializer("c")
    def _serialize_c(self, c: Optional[UnitComplex]) -> Optional[Dict[str, Any]]:
        return None if c is None else c.describe()


class DefectEstimate(BaseModel):
    value: float
    certified: Optional[float] = None


class RelativeDensity(BaseModel):
    witnessed: bool
    dense_with_l: Optional[float] = None


class SemiCheckResult(BaseModel):
    found: Optional[float] = None
    m_max: int
    m_tested: Optional[int] = None
    truncated: bool = False
    worst_defect: Optional[float] = None


class PowerDefectBound(BaseModel):
    lhs: float
    rhs: float
    rhs_orbit: float
    l: int

    @property
    def holds(self) -> bool:
        return self.lhs <= self.rhs_orbit


class ExtensionResult(BaseModel):
    value: List[Tuple[float, float]]
    error_bound: float
    tau: float
    applications: int

    def as_array(self) -> np.ndarray:
        return np.array([complex(re, im) for re, im in self.value])


class BoundednessWitness(BaseModel):
    window_length: float
    window_max: float
    grid_max: float
    applications: int
    bound: float
    slack: float

    @property
    def holds(self) -> bool:
        return self.grid_max <= self.bound + self.slack


# ------------------------------------------------------
# 결함 계산
# ------------------------------------------------------

def _grid_model(grid: GridLike) -> Optional[Grid]:
    return grid if isinstance(grid, Grid) else None


def defects_for_taus(signal: Signal, taus: np.ndarray, c: UnitComplex, nodes: np.ndarray,
                     base_values: Optional[np.ndarray] = None) -> np.ndarray:
    """
    여러 τ 에 대해 max_t ‖f(t+τ) - c f(t)‖ 를 벡터화하여 계산합니다.

    τ 는 청크로 나뉘어 스레드 풀에서 평가되고, 결과 순서는 taus 와 같습니다.
    """
    taus = np.atleast_1d(np.asarray(taus, dtype=float))
    if taus.size == 0:
        return np.empty(0)
    cval = c.value
    base = signal.evaluate(nodes) if base_values is None else base_values
    per_chunk = max(1, _EVAL_BUDGET // max(1, nodes.size))

    def run(chunk: np.ndarray) -> np.ndarray:
        shifted = signal.evaluate((chunk[:, None] + nodes[None, :]).ravel())
        shifted = shifted.reshape(chunk.size, nodes.size, signal.dim)
        return np.linalg.norm(shifted - cval * base[None, :, :], axis=2).max(axis=1)

    return iter_concat(map_chunks(run, split_chunks(taus, per_chunk)))


def defect(signal: Signal, tau: float, c: UnitComplex, grid: GridLike) -> float:
    """
    그리드 노드 t 에 대한 max ‖f(t+τ) - c·f(t)‖.

    Raises:
        DomainError: 그리드 또는 그리드+τ 가 정의역을 벗어나는 경우
        UnitCircleError: |c| != 1
    """
    c = as_unit(c)
    nodes, _ = resolve_nodes(grid)
    return float(defects_for_taus(signal, np.array([tau]), c, nodes)[0])


def certified_defect(signal: Signal, tau: float, c: UnitComplex, grid: GridLike) -> DefectEstimate:
    """
    결함과 인증 상한. Lipschitz 상수 L 이 등록된 경우 certified = max + 2L·step/2 + 2·tail_bound.
    """
    c = as_unit(c)
    nodes, step = resolve_nodes(grid)
    value = float(defects_for_taus(signal, np.array([tau]), c, nodes)[0])
    certified = None
    if signal.lipschitz is not None:
        certified = value + signal.lipschitz * step + 2 * signal.tail_bound
    return DefectEstimate(value=value, certified=certified)


def gap_profile(accepted_taus: np.ndarray, tau_max: float) -> float:
    """[0, τ_1], [τ_i, τ_{i+1}], [τ_k, T_max] 간격의 최댓값. 빈 목록이면 T_max."""
    if accepted_taus.size == 0:
        return float(tau_max)
    edges = np.concatenate(([0.0], accepted_taus, [tau_max]))
    return float(np.max(np.diff(edges)))


def build_scan_report(c: UnitComplex, epsilon: float, tau_max: float, tau_step: float,
                      taus: np.ndarray, defects: np.ndarray, grid: GridLike, **extra: Any) -> PeriodScanReport:
    mask = defects <= epsilon
    accepted = [(float(t), float(d)) for t, d in zip(taus[mask], defects[mask])]
    return PeriodScanReport(
        c=c, epsilon=epsilon, tau_max=tau_max, tau_step=tau_step,
        accepted=accepted,
        max_gap=gap_profile(taus[mask], tau_max),
        grid=_grid_model(grid),
        curve=np.column_stack([taus, defects]) if taus.size else np.empty((0, 2)),
        **extra,
    )


def scan_taus(tau_max: float, tau_step: float) -> np.ndarray:
    """τ = k·tau_step, k = 1, 2, ... , τ <= tau_max."""
    if not tau_step > 0:
        raise LabValidationError("tau_step must be positive", field="tau_step", value=tau_step)
    if not tau_max > 0:
        raise LabValidationError("tau_max must be positive", field="tau_max", value=tau_max)
    count = int(math.floor(tau_max / tau_step + 1e-9))
    return tau_step * np.arange(1, count + 1, dtype=float)


def real_valued_multiplier_guard(signal: Signal, c: UnitComplex, grid: GridLike) -> Dict[str, Any]:
    """
    실수값 신호에 대한 진단 플래그.

    0 이 아닌 실수값 신호는 c = ±1 일 때만, 음이 아니면 c = 1 일 때만
    c-균등 회귀일 수 있습니다. 그리드 표본으로 판정합니다.
    """
    nodes, _ = resolve_nodes(grid)
    values = signal.evaluate(nodes)
    real_valued = bool(np.all(np.abs(values.imag) <= 1e-14))
    nonzero = bool(np.any(np.abs(values) > 0))
    nonnegative = real_valued and bool(np.all(values.real >= 0))
    cval = c.value
    if not (real_valued and nonzero):
        admissible = True
    elif nonnegative:
        admissible = abs(cval - 1) <= 1e-12
    else:
        admissible = abs(cval - 1) <= 1e-12 or abs(cval + 1) <= 1e-12
    return {"real_valued": real_valued, "nonnegative": nonnegative, "multiplier_admissible": admissible}


def scan_periods(signal: Signal, c: UnitComplex, epsilon: float, tau_max: float, tau_step: float,
                 grid: GridLike) -> PeriodScanReport:
    """
    τ = k·tau_step <= tau_max 마다 결함을 계산하여 ε 이하인 τ 를 수집합니다.

    Returns:
        PeriodScanReport: 수용된 τ 가 없어도 유효한 결과 (max_gap = tau_max)
    """
    c = as_unit(c)
    if not epsilon > 0:
        raise LabValidationError("epsilon must be positive", field="epsilon", value=epsilon)
    nodes, _ = resolve_nodes(grid)
    taus = scan_taus(tau_max, tau_step)
    defects = defects_for_taus(signal, taus, c, nodes)
    report = build_scan_report(
        c, epsilon, tau_max, tau_step, taus, defects, grid,
        diagnostics=real_valued_multiplier_guard(signal, c, nodes),
    )
    logger.info(
        f"scan {signal.descriptor.name}: {taus.size} τ, accepted={len(report.accepted)}, "
        f"max_gap={report.max_gap:.6g}"
    )
    return report


def relative_density(report: PeriodScanReport) -> RelativeDensity:
    """수용된 τ 가 있으면 l = max_gap, 없으면 not_witnessed (스캔은 부정을 증명하지 못함)."""
    if not report.accepted:
        return RelativeDensity(witnessed=False)
    return RelativeDensity(witnessed=True, dense_with_l=report.max_gap)


def validate_alphas(alphas: Sequence[float]) -> np.ndarray:
    values = np.asarray(alphas, dtype=float)
    if values.size == 0 or np.any(values <= 0) or np.any(np.diff(values) <= 0):
        raise LabValidationError("alphas must be positive and strictly increasing", field="alphas")
    return values


def recurrence_defects(signal: Signal, c: UnitComplex, alphas: Sequence[float],
                       grid: Optional[GridLike] = None) -> RecurrenceReport:
    """
    각 α_n 에서의 결함. grid 가 없으면 신호 정의역의 기본 그리드를 사용합니다.

    slack 은 절단 꼬리에서 오는 2·tail_bound 입니다.
    """
    c = as_unit(c)
    values = validate_alphas(alphas)
    grid = grid if grid is not None else Grid.default_for(signal.domain)
    nodes, _ = resolve_nodes(grid)
    defects = defects_for_taus(signal, values, c, nodes)
    return RecurrenceReport(alphas=values.tolist(), defects=defects.tolist(), c=c,
                            slack=2 * signal.tail_bound)


def semi_c_check(signal: Signal, c: UnitComplex, epsilon: float, p_candidates: Sequence[float],
                 m_max: int, grid: GridLike) -> SemiCheckResult:
    """
    max_{1<=m<=m_max} defect(m·p, c^m) <= ε 인 첫 후보 p 를 찾습니다.

    양의 m 만 검사합니다. 신호의 절단 유효 구간(horizon)을 넘어서는 m 은 잘라내고
    truncated=True 로 보고합니다.
    """
    c = as_unit(c)
    if not epsilon > 0:
        raise LabValidationError("epsilon must be positive", field="epsilon", value=epsilon)
    if m_max < 1:
        raise LabValidationError("m_max must be at least 1", field="m_max", value=m_max)
    nodes, _ = resolve_nodes(grid)
    candidates = np.asarray(p_candidates, dtype=float)
    if candidates.size == 0 or np.any(candidates <= 0):
        raise LabValidationError("p candidates must be positive", field="p_candidates")

    horizon = signal.truncation.horizon if signal.truncation else math.inf
    reach = float(np.max(np.abs(nodes)))
    if math.isfinite(horizon):
        limits = np.floor((horizon - reach) / candidates).astype(int)
        limits = np.clip(limits, 0, m_max)
    else:
        limits = np.full(candidates.size, m_max)

    base = signal.evaluate(nodes)
    alive = np.ones(candidates.size, dtype=bool)
    worst = np.zeros(candidates.size)
    for m in range(1, m_max + 1):
        active = np.flatnonzero(alive & (limits >= m))
        if active.size == 0:
            break
        d = defects_for_taus(signal, m * candidates[active], c.power(m), nodes, base_values=base)
        worst[active] = np.maximum(worst[active], d)
        alive[active[d > epsilon]] = False

    winners = np.flatnonzero(alive & (limits >= 1))
    if winners.size == 0:
        logger.info(f"semi_c_check {signal.descriptor.name}: none of {candidates.size} candidates")
        return SemiCheckResult(found=None, m_max=m_max)
    idx = int(winners[0])
    result = SemiCheckResult(
        found=float(candidates[idx]), m_max=m_max, m_tested=int(limits[idx]),
        truncated=bool(limits[idx] < m_max), worst_defect=float(worst[idx]),
    )
    if result.truncated:
        logger.warning(f"semi_c_check: m range truncated to {result.m_tested} by truncation horizon")
    return result


def power_defect_bound(signal: Signal, c: UnitComplex, tau: float, l: int, grid: GridLike) -> PowerDefectBound:
    """
    망원 부등식 ‖f(·+lτ) - c^l f(·)‖ <= l·‖f(·+τ) - c f(·)‖ 의 양변.

    f(x+lτ) - c^l f(x) = Σ_k c^{l-1-k}[f(x+(k+1)τ) - c f(x+kτ)] 이므로,
    rhs 는 원래 그리드에서의 l·defect(τ, c) 입니다.
    rhs_orbit 는 그리드의 τ-궤도 {x + kτ : k < l} 위 결함의 최댓값에 l 을 곱한 값이며
    lhs <= rhs_orbit 가 반올림 오차까지 성립합니다.
    """
    c = as_unit(c)
    if l < 1:
        raise LabValidationError("l must be a positive integer", field="l", value=l)
    nodes, _ = resolve_nodes(grid)
    lhs = float(defects_for_taus(signal, np.array([l * tau]), c.power(l), nodes)[0])
    orbit = (nodes[None, :] + tau * np.arange(l)[:, None]).ravel()
    rhs_orbit = l * float(defects_for_taus(signal, np.array([tau]), c, orbit)[0])
    rhs = l * float(defects_for_taus(signal, np.array([tau]), c, nodes)[0])
    return PowerDefectBound(lhs=lhs, rhs=rhs, rhs_orbit=rhs_orbit, l=l)


def c_power_periods(report: PeriodScanReport, l: int) -> List[Tuple[float, float]]:
    """(ε,c)-주기 τ 는 (l·ε, c^l)-주기 l·τ 를 줍니다."""
    if l < 1:
        raise LabValidationError("l must be a positive integer", field="l", value=l)
    return [(l * tau, l * d) for tau, d in report.accepted]


def transfer_periods(base: PeriodScanReport, c_prime: UnitComplex, sup_norm_f: float,
                     epsilon: float) -> List[float]:
    """
    c^{l_k} 에 대한 (ε/2)-주기를 c' 에 대한 ε-주기로 옮깁니다.

    ‖f(t+τ) - c'f(t)‖ <= ‖f(t+τ) - c^{l}f(t)‖ + |c^{l} - c'|·‖f‖∞ < ε/2 + ε/2.

    Raises:
        TransferError: base.epsilon > ε/2 또는 |c^{l} - c'| >= ε/(2‖f‖∞)
    """
    c_prime = as_unit(c_prime)
    if base.epsilon > epsilon / 2:
        raise TransferError(
            f"base.epsilon <= epsilon/2 violated ({base.epsilon:.6g} > {epsilon / 2:.6g})",
            inequality="base.epsilon <= epsilon/2",
        )
    distance = abs(base.c.value - c_prime.value)
    if sup_norm_f > 0 and not distance < epsilon / (2 * sup_norm_f):
        raise TransferError(
            f"|c^l - c'| < epsilon/(2·sup|f|) violated ({distance:.6g} >= {epsilon / (2 * sup_norm_f):.6g})",
            inequality="|c^l - c'| < epsilon/(2*sup_norm_f)",
        )
    return [tau for tau, _ in base.accepted]


def defect_beyond(signal: Signal, tau: float, c: UnitComplex, grid: GridLike, M: float) -> float:
    """
    |t| >= M 이고 |t+τ| >= M 인 노드에서만 본 결함 (점근적 변형).

    Raises:
        EmptyMaskError: 조건을 만족하는 노드가 없는 경우
    """
    c = as_unit(c)
    nodes, _ = resolve_nodes(grid)
    mask = (np.abs(nodes) >= M) & (np.abs(nodes + tau) >= M)
    if not np.any(mask):
        raise EmptyMaskError(f"no grid node satisfies |t|, |t+τ| >= {M}", field="M")
    return float(defects_for_taus(signal, np.array([tau]), c, nodes[mask])[0])


def extend_half_line(signal: Signal, c: UnitComplex, epsilon: float, x: float, report: PeriodScanReport,
                     iterate: bool = False) -> ExtensionResult:
    """
    반직선 신호를 음수 x 로 근사 확장합니다: c^{-1}·f(x + τ), τ 는 |x| 이상인 가장 작은 수용 주기.

    iterate=True 면 그런 τ 가 없을 때 가장 큰 수용 주기를 k 번 적용하고
    오차 상한을 k·ε 로 보고합니다.

    Raises:
        ExtensionError: 사용할 수 있는 τ 가 없는 경우
    """
    c = as_unit(c)
    if x >= 0:
        raise LabValidationError("extension point x must be negative", field="x", value=x)
    usable = [tau for tau, d in report.accepted if d <= epsilon]
    if not usable:
        raise ExtensionError(f"report has no (ε={epsilon}, c)-period", field="report")
    candidates = [tau for tau in usable if tau >= abs(x)]
    if candidates:
        tau, applications = candidates[0], 1
    elif iterate:
        tau = usable[-1]
        applications = int(math.ceil(abs(x) / tau))
    else:
        raise ExtensionError(f"no accepted τ >= |x| = {abs(x):.6g}", field="x")
    value = c.inverse().power(applications).value * signal.eval(x + applications * tau)
    if applications > 1:
        logger.warning(f"extend_half_line: {applications} period applications, error <= {applications * epsilon:.3g}")
    return ExtensionResult(
        value=[(float(v.real), float(v.imag)) for v in value],
        error_bound=applications * epsilon, tau=tau, applications=applications,
    )


def boundedness_witness(signal: Signal, report: PeriodScanReport, grid: GridLike) -> BoundednessWitness:
    """
    유한 구간에서의 유계성 증거: 노드 t >= 0 을 수용 주기로 [0, l] 까지 되돌리며
    ‖f(t)‖ <= max_{[0,l]}‖f‖ + ε·(적용 횟수) 를 확인합니다.
    """
    if not report.accepted:
        raise PreconditionError("boundedness witness needs a nonempty scan", field="report")
    nodes, step = resolve_nodes(grid)
    nodes = nodes[nodes >= 0]
    length = report.max_gap
    taus = report.accepted_taus

    current = nodes.copy()
    applications = 0
    while True:
        pending = current > length
        if not np.any(pending):
            break
        idx = np.searchsorted(taus, current[pending], side="right") - 1
        current[pending] -= taus[np.maximum(idx, 0)]
        applications += 1

    window_nodes = np.arange(0.0, length + step / 2, step) if step > 0 else np.array([0.0])
    window_max = float(max(np.max(signal.norms(window_nodes)), np.max(signal.norms(current))))
    grid_max = float(np.max(signal.norms(nodes)))
    slack = applications * (signal.lipschitz * step if signal.lipschitz is not None else 0.0)
    return BoundednessWitness(
        window_length=length, window_max=window_max, grid_max=grid_max, applications=applications,
        bound=window_max + report.epsilon * applications, slack=slack,
    )


def uniform_recurrence_check(report: RecurrenceReport, tol: float) -> Dict[str, Any]:
    """
    결함 수열이 감소하며 tol 아래로 내려가는지 보여주는 곡선 요약. 증명이 아닌 관측입니다.
    """
    defects = np.asarray(report.defects, dtype=float)
    return {
        "nonincreasing": bool(np.all(np.diff(defects) <= 1e-12)),
        "last_defect": float(defects[-1]) if defects.size else None,
        "below_tol": bool(defects.size and defects[-1] <= tol + report.slack),
    }
