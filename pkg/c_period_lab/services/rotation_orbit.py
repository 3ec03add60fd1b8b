"""
회전 궤도 근사 모듈

무리수 회전 c = exp(iπφ) 의 거듭제곱 c^l 로 단위원 위의 목표점을 근사하고,
유리수 편각 c 의 근(root) 구조를 계산합니다.
"""

import math
from typing import Generator, Iterator, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, Field

from c_period_lab.core.config import settings
from c_period_lab.core.exceptions import LabValidationError, SearchBudgetError
from c_period_lab.core.logger import get_logger
from c_period_lab.services.constants import Defaults, OrbitStrategy
from c_period_lab.services.signal_core import UnitComplex, as_unit

logger = get_logger(__name__)


class OrbitApproximants(BaseModel):
    phi: float
    target: Tuple[float, float]
    epsilon: float
    ls: List[int]
    gaps_bound: int
    certified_gap: Optional[int] = None
    max_distance: float = Field(..., description="max_k |c^{l_k} - target|")
    strategy: OrbitStrategy = OrbitStrategy.SCAN


class RootStructure(BaseModel):
    order: int
    q_power_sign: int


# ------------------------------------------------------
# 연분수
# ------------------------------------------------------

def continued_fraction_coeffs(x: float, max_terms: int = 64, eps: float = 1e-12) -> Generator[int, None, None]:
    """실수 x 에 유클리드 알고리즘을 적용해 연분수 계수를 생성합니다."""
    for _ in range(max_terms):
        n, rem = divmod(x, 1)
        yield int(n)
        if rem < eps:
            break
        x = 1 / rem


def convergents(coeffs: Iterator[int]) -> Generator[Tuple[int, int], None, None]:
    """계수열을 점근분수 (p_k, q_k) 로 접습니다 (연속자 행렬 [[a,1],[1,0]] 의 누적곱)."""
    p_prev, p = 1, 0
    q_prev, q = 0, 1
    for a in coeffs:
        p_prev, p = a * p_prev + p, p_prev
        q_prev, q = a * q_prev + q, q_prev
        yield p_prev, q_prev


def _circle_distance(x: np.ndarray) -> np.ndarray:
    """[0,1) 위 분수의 가장 가까운 정수까지 거리 ‖x‖."""
    frac = np.mod(x, 1.0)
    return np.minimum(frac, 1.0 - frac)


def certified_gap_bound(phi: float, epsilon: float, l_max: int) -> Optional[int]:
    """
    연속 근사 지수 간격의 상한.

    α = φ/2 의 점근분수 분모 q 에 대해 η = 2π‖qα‖ 가 목표 호의 폭 2δ
    (δ = 2·arcsin(ε/2)) 보다 작으면, l, l+q, l+2q, ... 는 한 방향으로 η 씩 움직이므로
    열린 호를 건너뛸 수 없고 q·ceil(2π/η) 걸음 안에 호에 들어갑니다.
    분모가 l_max 를 넘기 전까지의 후보 중 가장 작은 상한을 반환합니다.
    """
    if epsilon >= 2:
        return 1
    delta = 2 * math.asin(epsilon / 2)
    alpha = (phi / 2) % 1.0
    best: Optional[int] = None
    for _, q in convergents(continued_fraction_coeffs(alpha)):
        if q < 1:
            continue
        if q > l_max:
            break
        eta = 2 * math.pi * float(_circle_distance(np.array([q * alpha]))[0])
        if eta == 0:
            break
        if eta < 2 * delta:
            bound = q * math.ceil(2 * math.pi / eta)
            best = bound if best is None else min(best, bound)
    return best


# ------------------------------------------------------
# 궤도 근사
# ------------------------------------------------------

def orbit_distances(phi: float, target: complex, ls: np.ndarray) -> np.ndarray:
    """|c^l - target|, c = exp(iπφ). 편각은 l·φ/2 의 소수부로 계산해 큰 l 에서도 정확도를 유지합니다."""
    theta = math.atan2(target.imag, target.real) / (2 * math.pi)
    turns = _circle_distance(ls * (phi / 2) - theta)
    return 2 * np.sin(np.pi * turns)


def _step_denominator(alpha: float, half_width: float, l_max: int) -> Optional[Tuple[int, float]]:
    """‖qα‖ < 2·half_width 인 첫 점근분수 분모 q 와 부호 있는 걸음 qα - round(qα)."""
    for _, q in convergents(continued_fraction_coeffs(alpha)):
        if q < 1:
            continue
        if q > l_max:
            return None
        step = q * alpha - round(q * alpha)
        if step == 0:
            return None
        if abs(step) < 2 * half_width:
            return q, step
    return None


def _convergent_front(phi: float, target: complex, epsilon: float, k_count: int,
                      l_max: int) -> Optional[Tuple[List[int], int]]:
    """
    점근분수 분모 q 로 허용 집합의 앞 k_count 개를 직접 구성합니다.

    l = r + jq (r = 1..q) 사슬에서 c^l 의 편각은 한 방향으로 ‖qα‖ 씩 움직이고
    ‖qα‖ 가 목표 호의 폭보다 작으므로 호를 건너뛰지 않습니다.
    각 사슬의 다음 진입 j 를 해석적으로 계산해 사슬마다 앞 k_count 개를 모으면
    전체 허용 집합의 앞 k_count 개가 그 안에 들어 있습니다.
    후보 중 하나라도 거리 검증에 실패하면 None 을 반환합니다.
    """
    if epsilon >= 2:
        return None
    half_width = math.asin(epsilon / 2) / math.pi
    alpha = (phi / 2) % 1.0
    picked = _step_denominator(alpha, half_width, l_max)
    if picked is None:
        return None
    q, step = picked
    if q * k_count > Defaults.ORBIT_CHUNK:
        return None

    theta = math.atan2(target.imag, target.real) / (2 * math.pi)
    sign = 1.0 if step > 0 else -1.0
    speed = abs(step)
    residues = np.arange(1, q + 1, dtype=np.int64)
    # 호 (-δ, δ) 를 [0, 2δ) 로 옮긴 좌표
    origin = np.mod(sign * (residues * alpha - theta) + half_width, 1.0)
    j = np.zeros(q, dtype=np.int64)
    hits: List[np.ndarray] = []
    for _ in range(k_count):
        position = np.mod(origin + j * speed, 1.0)
        inside = (position > 0) & (position < 2 * half_width)
        j = j + np.where(inside, 0, np.ceil((1.0 - position) / speed)).astype(np.int64)
        hits.append(residues + j * q)
        j = j + 1

    candidates = np.unique(np.concatenate(hits))[:k_count]
    if np.any(orbit_distances(phi, target, candidates.astype(float)) >= epsilon):
        return None
    return [int(l) for l in candidates], q


def _scan_front(phi: float, target: complex, epsilon: float, k_count: int, stop_at: int,
                collect_all: bool) -> Tuple[List[int], float]:
    """l = 1..stop_at 를 청크 단위로 전수 검사합니다. (찾은 l, 최소 거리) 를 반환합니다."""
    found: List[int] = []
    best_distance = math.inf
    start = 1
    while start <= stop_at:
        end = min(stop_at, start + Defaults.ORBIT_CHUNK - 1)
        ls = np.arange(start, end + 1, dtype=np.int64)
        d = orbit_distances(phi, target, ls.astype(float))
        found.extend(int(l) for l in ls[d < epsilon])
        best_distance = min(best_distance, float(d.min()))
        if not collect_all and len(found) >= k_count:
            break
        start = end + 1
    return found, best_distance


def orbit_approximants(phi: float, target: complex, epsilon: float, k_count: int,
                       l_max: Optional[int] = None, l_limit: Optional[int] = None) -> OrbitApproximants:
    """
    |c^l - target| < ε 인 양의 정수 l 을 증가 순으로 찾습니다.

    먼저 φ/2 의 점근분수 분모 q (q <= l_max) 로 l = r + jq 사슬의 진입점을 계산하고,
    쓸 만한 분모가 없으면 l = 1..l_max 전수 검사로 넘어갑니다.
    두 경로 모두 허용 집합의 앞부분과 정확히 일치하는 l 을 반환합니다.
    점근분수 경로의 l 은 l_max 를 넘을 수 있습니다.
    간격 상한은 관측 최대 간격(근사 지수가 2개 이상일 때)이고,
    연분수 점근분수에서 얻은 인증 상한을 함께 보고합니다.

    Args:
        phi: 무리수 회전 파라미터 (호출자 선언)
        target: 단위원 위 목표점
        epsilon: 근사 허용 오차
        k_count: 필요한 최소 개수
        l_max: 점근분수 분모와 전수 검사의 상한 (None이면 settings.ORBIT_L_MAX)
        l_limit: 주어지면 l <= l_limit 인 허용 l 을 모두 전수 검사로 반환

    Raises:
        SearchBudgetError: l_max 안에서 k_count 개를 찾지 못한 경우 (찾은 것까지 포함)
    """
    target = complex(target)
    as_unit(target)
    if not epsilon > 0:
        raise LabValidationError("epsilon must be positive", field="epsilon", value=epsilon)
    if k_count < 1:
        raise LabValidationError("k_count must be at least 1", field="k_count", value=k_count)
    budget = int(l_max or settings.ORBIT_L_MAX)

    front = None if l_limit else _convergent_front(phi, target, epsilon, k_count, budget)
    if front is not None:
        found, step_q = front
        strategy = OrbitStrategy.CONVERGENT
        logger.debug(f"orbit: convergent denominator q={step_q}")
    else:
        stop_at = min(budget, l_limit) if l_limit else budget
        found, best_distance = _scan_front(phi, target, epsilon, k_count, stop_at, l_limit is not None)
        if len(found) < k_count:
            raise SearchBudgetError(
                f"found {len(found)} of {k_count} orbit approximants within l <= {stop_at}",
                best_so_far=found, best_distance=best_distance,
            )
        if l_limit is None:
            found = found[:k_count]
        strategy = OrbitStrategy.SCAN

    distances = orbit_distances(phi, target, np.asarray(found, dtype=float))
    certified = certified_gap_bound(phi, epsilon, budget)
    gaps = np.diff(found)
    if gaps.size:
        gaps_bound = int(gaps.max())
    else:
        gaps_bound = certified or found[0]
    logger.info(
        f"orbit φ={phi:.12g} [{strategy.value}]: {len(found)} approximants, "
        f"gaps_bound={gaps_bound}, certified={certified}"
    )
    return OrbitApproximants(
        phi=phi, target=(target.real, target.imag), epsilon=epsilon, ls=found,
        gaps_bound=gaps_bound, certified_gap=certified, max_distance=float(distances.max()),
        strategy=strategy,
    )


def orbit_min_distance(phi: float, target: complex, L: int) -> float:
    """min_{1<=l<=L} |c^l - target|."""
    best = math.inf
    for start in range(1, L + 1, Defaults.ORBIT_CHUNK):
        ls = np.arange(start, min(L, start + Defaults.ORBIT_CHUNK - 1) + 1, dtype=float)
        best = min(best, float(orbit_distances(phi, complex(target), ls).min()))
    return best


def root_structure(c: UnitComplex) -> RootStructure:
    """
    유리수 편각 c = exp(iπp/q) 의 위수와 c^q 의 부호.

    Raises:
        WrongKindError: 무리수 편각인 경우
    """
    c = as_unit(c)
    p, q = c.require_rational()
    order = q if p % 2 == 0 else 2 * q
    return RootStructure(order=order, q_power_sign=-1 if p % 2 else 1)
