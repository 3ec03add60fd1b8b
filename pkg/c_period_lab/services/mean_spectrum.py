"""
평균 / 스펙트럼 모듈

Bohr-Fourier 계수 P_r(f) = lim (1/T)∫_0^T e^{-irs} f(s) ds, Cesàro 평균, 스펙트럼 추정,
그리고 유리수 편각 c != 1 에 대한 평균-0 검사를 제공합니다.

적분은 지평선(horizon) 사이 구간마다 증분 합성 사다리꼴로 계산하고,
여러 주파수를 한 번에 처리합니다. 극한은 마지막 두 지평선의 값이 tol 이내일 때만 선언합니다.
"""

import math
from typing import List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_serializer

from c_period_lab.core.config import settings
from c_period_lab.core.exceptions import LabValidationError, PreconditionError
from c_period_lab.core.logger import get_logger
from c_period_lab.services.constants import ValidationMessages
from c_period_lab.services.period_scan import PeriodScanReport
from c_period_lab.services.rotation_orbit import root_structure
from c_period_lab.services.signal_core import Signal, UnitComplex, as_unit
from c_period_lab.services.workers import map_chunks

logger = get_logger(__name__)

_BLOCK_BUDGET = 4_000_000


def _pairs(values: Optional[np.ndarray]) -> Optional[List[Tuple[float, float]]]:
    if values is None:
        return None
    return [(float(v.real), float(v.imag)) for v in np.ravel(values)]


class MeanEstimate(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    r: float = 0.0
    horizons: List[float]
    values: np.ndarray = Field(..., description="(K, dim) complex")
    converged: bool
    limit: Optional[np.ndarray] = None
    tol: float

    @field_serializer("values")
    def _ser_values(self, values: np.ndarray) -> List[List[Tuple[float, float]]]:
        return [_pairs(row) for row in values]

    @field_serializer("limit")
    def _ser_limit(self, limit: Optional[np.ndarray]) -> Optional[List[Tuple[float, float]]]:
        return _pairs(limit)

    @property
    def last(self) -> np.ndarray:
        return self.values[-1]

    def decay_curve(self) -> List[Tuple[float, float]]:
        """(T, ‖mean(T)‖) 곡선."""
        return [(T, float(np.linalg.norm(v))) for T, v in zip(self.horizons, self.values)]


class SpectrumLine(BaseModel):
    r: float
    magnitude: float
    value: Tuple[float, float]


class MeanZeroResult(BaseModel):
    passed: bool
    tau: float
    defect: float
    order: int
    sup_norm: float
    curve: List[Tuple[float, float, float]] = Field(..., description="(T, |mean(T)|, bound(T))")


# ------------------------------------------------------
# 적분 엔진
# ------------------------------------------------------

def default_horizons() -> List[float]:
    return [settings.MEAN_BASE_HORIZON * 2 ** k for k in range(settings.MEAN_HORIZON_COUNT)]


def _check_horizons(horizons: Sequence[float]) -> np.ndarray:
    values = np.asarray(horizons, dtype=float)
    if values.size == 0 or values[0] <= 0 or np.any(np.diff(values) <= 0):
        raise LabValidationError("horizons must be positive and strictly increasing", field="horizons")
    return values


def running_integrals(signal: Signal, rs: Sequence[float], horizons: Sequence[float],
                      step: Optional[float] = None) -> Tuple[np.ndarray, float]:
    """
    ∫_0^{T_k} e^{-irs} f(s) ds 를 모든 (r, T_k) 에 대해 계산합니다.

    구간 [T_{k-1}, T_k] 는 h = 길이/ceil(길이/step) 의 균등 사다리꼴로 적분하고 누적합니다.

    Returns:
        (integrals, sup_norm): (R, K, dim) 복소 배열과 사용된 노드에서의 max ‖f‖
    """
    step = step or settings.MEAN_STEP
    freqs = np.asarray(rs, dtype=float)
    ends = _check_horizons(horizons)
    starts = np.concatenate(([0.0], ends[:-1]))
    block = max(1024, _BLOCK_BUDGET // max(1, freqs.size))

    def segment(bounds: Tuple[float, float]) -> Tuple[np.ndarray, float]:
        a, b = bounds
        m = max(1, int(math.ceil((b - a) / step)))
        h = (b - a) / m
        total = np.zeros((freqs.size, signal.dim), dtype=complex)
        peak = 0.0
        for lo in range(0, m + 1, block):
            idx = np.arange(lo, min(m + 1, lo + block))
            s = a + h * idx
            w = np.full(idx.size, h)
            w[idx == 0] = h / 2
            w[idx == m] = h / 2
            values = signal.evaluate(s)
            peak = max(peak, float(np.max(np.linalg.norm(values, axis=1))))
            total += (np.exp(-1j * np.outer(freqs, s)) * w) @ values
        return total, peak

    parts = map_chunks(segment, list(zip(starts.tolist(), ends.tolist())))
    integrals = np.cumsum(np.stack([p[0] for p in parts], axis=1), axis=1)
    return integrals, max(p[1] for p in parts)


def _estimate(r: float, horizons: np.ndarray, integrals: np.ndarray, tol: float) -> MeanEstimate:
    values = integrals / horizons[:, None]
    converged = bool(values.shape[0] >= 2 and np.linalg.norm(values[-1] - values[-2]) <= tol)
    return MeanEstimate(
        r=r, horizons=horizons.tolist(), values=values, converged=converged,
        limit=values[-1].copy() if converged else None, tol=tol,
    )


def bohr_coefficient(signal: Signal, r: float, horizons: Optional[Sequence[float]] = None,
                     tol: Optional[float] = None, step: Optional[float] = None) -> MeanEstimate:
    """
    (1/T_k)∫_0^{T_k} e^{-irs} f(s) ds 를 지평선마다 계산합니다.

    수렴하지 않으면 예외 대신 converged=False 로 보고합니다.
    """
    horizons = _check_horizons(horizons if horizons is not None else default_horizons())
    tol = tol or settings.MEAN_TOL
    integrals, _ = running_integrals(signal, [r], horizons, step)
    estimate = _estimate(float(r), horizons, integrals[0], tol)
    logger.debug(f"P_{r}({signal.descriptor.name}) -> {estimate.last}, converged={estimate.converged}")
    return estimate


def cesaro_mean(signal: Signal, horizons: Optional[Sequence[float]] = None, tol: Optional[float] = None,
                step: Optional[float] = None) -> MeanEstimate:
    """(1/T)∫_0^T f(s) ds. r = 0 인 bohr_coefficient 입니다."""
    return bohr_coefficient(signal, 0.0, horizons, tol, step)


def spectrum_scan(signal: Signal, freq_grid: Sequence[float], threshold: float,
                  horizons: Optional[Sequence[float]] = None, tol: Optional[float] = None,
                  step: Optional[float] = None) -> List[SpectrumLine]:
    """
    수렴했고 |P_r| >= threshold 인 주파수 r 목록.
    """
    if not threshold > 0:
        raise LabValidationError("threshold must be positive", field="threshold", value=threshold)
    horizons = _check_horizons(horizons if horizons is not None else default_horizons())
    tol = tol or settings.MEAN_TOL
    freqs = np.asarray(freq_grid, dtype=float)
    integrals, _ = running_integrals(signal, freqs, horizons, step)

    lines: List[SpectrumLine] = []
    for r, row in zip(freqs, integrals):
        estimate = _estimate(float(r), horizons, row, tol)
        if not estimate.converged:
            logger.debug(f"spectrum r={r}: not converged")
            continue
        magnitude = float(np.linalg.norm(estimate.limit))
        if magnitude >= threshold:
            v = complex(estimate.limit[0])
            lines.append(SpectrumLine(r=float(r), magnitude=magnitude, value=(v.real, v.imag)))
    logger.info(f"spectrum {signal.descriptor.name}: {len(lines)} of {freqs.size} frequencies above {threshold}")
    return lines


def mean_zero_check(signal: Signal, c: UnitComplex, scan: PeriodScanReport, n_count: int = 16,
                    step: Optional[float] = None, tol: Optional[float] = None) -> MeanZeroResult:
    """
    유리수 편각 c != 1 에 대해 (ε,c)-주기 τ 가 있으면 평균이 0 으로 감쇠함을 확인합니다.

    구간 적분 I_k = ∫_{kτ}^{(k+1)τ} f 는 I_{k+1} = c·I_k + e_k, |e_k| <= dτ 를 만족하므로
    (1 - c)·Σ_{k<n} I_k = I_0 - I_n + Σ e_k 이고
    |mean(nτ)| <= (2‖f‖∞/n + d)/|1 - c| 입니다 (d 는 τ 의 결함).
    모든 n = 1..n_count 에서 이 상한(+tol)을 만족하면 통과입니다.

    Raises:
        WrongKindError: c 가 유리수 편각이 아닌 경우
        PreconditionError: c = 1, 빈 스캔, 또는 스캔의 승수가 c 와 다른 경우
    """
    c = as_unit(c)
    c.require_rational()
    if c.is_one():
        raise PreconditionError(ValidationMessages.C_EQUALS_ONE, field="c")
    if not scan.accepted:
        raise PreconditionError(ValidationMessages.EMPTY_SCAN, field="scan")
    if abs(scan.c.value - c.value) > 1e-12:
        raise PreconditionError("scan multiplier differs from c", field="scan.c")
    tol = tol or settings.MEAN_TOL

    tau, d = scan.accepted[0]
    horizons = tau * np.arange(1, n_count + 1, dtype=float)
    integrals, sup_f = running_integrals(signal, [0.0], horizons, step)
    means = np.linalg.norm(integrals[0] / horizons[:, None], axis=1)
    gap = abs(1 - c.value)
    bounds = (2 * sup_f / np.arange(1, n_count + 1) + d) / gap
    passed = bool(np.all(means <= bounds + tol))
    order = root_structure(c).order
    logger.info(f"mean_zero_check τ={tau:.6g}: passed={passed}, last |mean|={means[-1]:.3g}")
    return MeanZeroResult(
        passed=passed, tau=tau, defect=d, order=order, sup_norm=sup_f,
        curve=[(float(T), float(m), float(b)) for T, m, b in zip(horizons, means, bounds)],
    )
