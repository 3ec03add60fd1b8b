"""
고정점 풀이 모듈

완화해(mild solution) 사상
    (Υu)(t) = ∫_{-∞}^t R(t-s) F(s, u(s)) ds
를 유한 그리드 위에서 축약 반복으로 풀고, 해의 회귀 결함을 진단합니다.

그리드 시작점 이전의 이력은 첫 노드 값 G_0 으로 채우며,
절단 창이 그리드를 벗어나는 앞쪽 J 개 노드는 경계 노드로 표시되어
잔차와 결함 통계에서 제외됩니다.
"""

import math
from dataclasses import dataclass
from typing import Any, Callable, Dict, List, Optional, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_serializer
from scipy.signal import fftconvolve

from c_period_lab.core.exceptions import (
    ContractionError,
    DivergenceError,
    LabValidationError,
    SignalSpecError,
    SingularWindowError,
)
from c_period_lab.core.logger import get_logger
from c_period_lab.services.constants import Defaults, KernelKind, SolveStatus
from c_period_lab.services.convolution import Kernel, product_weights, stepanov_exponent_admissible
from c_period_lab.services.period_scan import RecurrenceReport, validate_alphas
from c_period_lab.services.signal_core import Grid, Signal, UnitComplex, as_unit

logger = get_logger(__name__)

ForcingFunc = Callable[[np.ndarray, np.ndarray], np.ndarray]


# ------------------------------------------------------
# Forcing
# ------------------------------------------------------

@dataclass(frozen=True)
class Forcing:
    """F(t, u): (n,) 시각과 (n, dim) 상태를 받아 (n, dim) 복소 배열을 반환. ‖F(t,x)-F(t,y)‖ <= L‖x-y‖."""

    func: ForcingFunc
    lipschitz_L: float
    description: str = "custom"
    dim: int = 1
    params: Optional[Dict[str, Any]] = None

    def __call__(self, t: np.ndarray, u: np.ndarray) -> np.ndarray:
        return np.asarray(self.func(t, u), dtype=complex).reshape(u.shape)

    def check_lipschitz(self, t_min: float = -50.0, t_max: float = 50.0, samples: int = 256,
                        seed: int = 0) -> float:
        """
        무작위 탐침에서 ‖F(t,x)-F(t,y)‖ <= L‖x-y‖ + 1e-9 를 확인합니다.

        Returns:
            float: 관측된 최대 비율

        Raises:
            LabValidationError: 위반이 발견된 경우
        """
        rng = np.random.default_rng(seed)
        t = rng.uniform(t_min, t_max, samples)
        shape = (samples, self.dim)
        x = rng.normal(size=shape) + 1j * rng.normal(size=shape)
        y = rng.normal(size=shape) + 1j * rng.normal(size=shape)
        lhs = np.linalg.norm(self(t, x) - self(t, y), axis=1)
        rhs = self.lipschitz_L * np.linalg.norm(x - y, axis=1)
        if np.any(lhs > rhs + Defaults.LIPSCHITZ_SLACK):
            raise LabValidationError(
                f"forcing '{self.description}' violates its Lipschitz constant L={self.lipschitz_L}",
                field="lipschitz_L", value=self.lipschitz_L,
            )
        return float(np.max(lhs / np.maximum(np.linalg.norm(x - y, axis=1), 1e-300)))


class _ForcingParams(BaseModel):
    model_config = ConfigDict(extra="forbid")


class HarmonicParams(_ForcingParams):
    amplitude: float = 1.0
    mu: float = 1.0


class HarmonicSineParams(HarmonicParams):
    coupling: float = 0.1


class LinearParams(_ForcingParams):
    k: float = Field(1.0, description="F(t,u) = k·u")


def _zero(_: _ForcingParams) -> Forcing:
    return Forcing(func=lambda t, u: np.zeros_like(u, dtype=complex), lipschitz_L=0.0, description="zero")


def _harmonic(p: HarmonicParams) -> Forcing:
    return Forcing(
        func=lambda t, u: np.broadcast_to((p.amplitude * np.exp(1j * p.mu * t))[:, None], u.shape),
        lipschitz_L=0.0, description=f"{p.amplitude}·e^(i{p.mu}t)",
    )


def _harmonic_sine(p: HarmonicSineParams) -> Forcing:
    return Forcing(
        func=lambda t, u: (p.amplitude * np.exp(1j * p.mu * t))[:, None] + p.coupling * np.sin(u.real),
        lipschitz_L=abs(p.coupling), description=f"{p.amplitude}·e^(i{p.mu}t) + {p.coupling}·sin(Re u)",
    )


def _linear(p: LinearParams) -> Forcing:
    return Forcing(func=lambda t, u: p.k * u, lipschitz_L=abs(p.k), description=f"{p.k}·u")


FORCINGS = {
    "zero": (_zero, _ForcingParams),
    "harmonic": (_harmonic, HarmonicParams),
    "harmonic-sine": (_harmonic_sine, HarmonicSineParams),
    "linear": (_linear, LinearParams),
}


def build_forcing(name: str, params: Optional[Dict[str, Any]] = None) -> Forcing:
    """
    이름으로 builtin forcing 을 만듭니다.

    Raises:
        SignalSpecError: 알 수 없는 이름 또는 잘못된 파라미터
    """
    if name not in FORCINGS:
        raise SignalSpecError(f"unknown forcing '{name}'", field="forcing", value=name)
    factory, model = FORCINGS[name]
    try:
        parsed = model(**(params or {}))
    except ValidationError as e:
        raise SignalSpecError(f"invalid forcing params: {e.errors()[0]['msg']}", field="forcing.params") from e
    forcing = factory(parsed)
    return Forcing(func=forcing.func, lipschitz_L=forcing.lipschitz_L, description=forcing.description,
                   params={"name": name, **parsed.model_dump()})


# ------------------------------------------------------
# Trajectory
# ------------------------------------------------------

class Trajectory(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    grid: Grid
    values: np.ndarray = Field(..., description="(n, dim) complex")
    iterations: int = 0
    residual: float = math.inf
    status: SolveStatus = SolveStatus.MAX_ITER
    residual_history: List[float] = Field(default_factory=list)
    boundary: int = Field(0, description="앞쪽 경계 노드 수 J")
    m1: Optional[float] = None

    @field_serializer("values")
    def _ser_values(self, values: np.ndarray) -> List[List[float]]:
        return [[float(v.real), float(v.imag)] for v in values[:, 0]] if values.shape[1] == 1 else \
            [[float(x) for z in row for x in (z.real, z.imag)] for row in values]

    @property
    def nodes(self) -> np.ndarray:
        return self.grid.nodes

    @property
    def interior(self) -> slice:
        return slice(self.boundary, None)

    @classmethod
    def constant(cls, grid: Grid, value: complex = 0.0, dim: int = 1) -> "Trajectory":
        return cls(grid=grid, values=np.full((grid.size, dim), complex(value), dtype=complex))

    @classmethod
    def from_signal(cls, grid: Grid, signal: Signal) -> "Trajectory":
        return cls(grid=grid, values=signal.evaluate(grid.nodes).copy())


def _kernel_window(kernel: Kernel, h: float, truncation: Optional[float]) -> np.ndarray:
    T = truncation or kernel.default_truncation()
    J = max(1, int(math.ceil(T / h - 1e-9)))
    return product_weights(kernel, h * np.arange(J + 1, dtype=float))


def upsilon_apply(forcing: Forcing, kernel: Kernel, u: Trajectory, truncation: Optional[float] = None,
                  forcing_exponent: Optional[float] = None) -> Trajectory:
    """
    (Υu)(t_i) = Σ_j w_j F(t_{i-j}, u(t_{i-j})), u_j = j·h 의 곱 적분 가중치.

    Args:
        forcing_exponent: forcing 의 Stepanov 지수 q. 주어지면 분수 커널에 대해
            (γ-1)q/(q-1) > -1 을 검사합니다.

    Raises:
        SingularWindowError: 위 조건이 성립하지 않는 경우
    """
    if forcing_exponent is not None and kernel.kind is KernelKind.FRACTIONAL:
        if not stepanov_exponent_admissible(kernel.gamma, forcing_exponent):
            raise SingularWindowError(
                f"(γ-1)q/(q-1) <= -1 for γ={kernel.gamma}, q={forcing_exponent}",
                gamma=kernel.gamma, exponent=forcing_exponent,
            )
    h = u.grid.step
    weights = _kernel_window(kernel, h, truncation)
    J = weights.size - 1
    n = u.values.shape[0]
    G = forcing(u.nodes, u.values)
    padded = np.concatenate((np.repeat(G[:1], J, axis=0), G), axis=0)
    out = np.empty_like(G)
    for d in range(G.shape[1]):
        out[:, d] = fftconvolve(padded[:, d], weights, mode="valid")
    return Trajectory(grid=u.grid, values=out[:n], iterations=u.iterations, boundary=min(J, n))


def contraction_estimate(L: float, kernel: Kernel, n: int = 1) -> float:
    """M_n <= (L·∫_0^∞ R)^n (상수 L 에서 반복 적분이 인수분해됨)."""
    if n < 1:
        raise LabValidationError("n must be at least 1", field="n", value=n)
    return (L * kernel.integral()) ** n


def fixed_point_solve(forcing: Forcing, kernel: Kernel, u0: Trajectory, tol: float = 1e-8,
                      max_iter: int = 200, allow_non_contraction: bool = False,
                      truncation: Optional[float] = None) -> Trajectory:
    """
    u <- Υu 를 내부 노드 sup 변화가 tol 이하가 될 때까지 반복합니다.

    Raises:
        ContractionError: M1 >= 1 이고 allow_non_contraction=False 인 경우
        DivergenceError: 잔차가 5회 연속 증가한 경우
    """
    m1 = contraction_estimate(forcing.lipschitz_L, kernel, 1)
    if m1 >= 1:
        if not allow_non_contraction:
            raise ContractionError(f"M1 = L·∫R = {m1:.6g} >= 1, not a contraction", m1=m1)
        logger.warning(f"⚠️ M1 = {m1:.6g} >= 1, iterating without contraction guarantee")

    current = u0
    history: List[float] = []
    streak = 0
    for iteration in range(1, max_iter + 1):
        nxt = upsilon_apply(forcing, kernel, current, truncation)
        J = nxt.boundary
        residual = float(np.max(np.linalg.norm(nxt.values[J:] - current.values[J:], axis=1))) \
            if J < nxt.values.shape[0] else 0.0
        streak = streak + 1 if history and residual > history[-1] else 0
        history.append(residual)
        current = nxt
        logger.debug(f"iteration {iteration}: residual={residual:.3e}")
        if residual <= tol:
            logger.info(f"✅ fixed point converged in {iteration} iterations (residual={residual:.3e}, M1={m1:.3g})")
            return nxt.model_copy(update={
                "iterations": iteration, "residual": residual, "status": SolveStatus.CONVERGED,
                "residual_history": history, "m1": m1,
            })
        if streak >= Defaults.DIVERGENCE_STREAK:
            raise DivergenceError(
                f"residual grew for {streak} consecutive iterations (last {residual:.3e})",
                residual_history=history,
            )

    logger.warning(f"⚠️ max_iter={max_iter} reached, residual={history[-1]:.3e}")
    return current.model_copy(update={
        "iterations": max_iter, "residual": history[-1], "status": SolveStatus.MAX_ITER,
        "residual_history": history, "m1": m1,
    })


def recurrence_of_solution(solution: Trajectory, c: UnitComplex, alphas: Sequence[float]) -> RecurrenceReport:
    """
    해의 결함 max_i ‖u(t_i + α) - c·u(t_i)‖ (경계 노드 제외).

    α 가 그리드 간격의 정수배면 인덱스 이동, 아니면 선형 보간을 사용합니다.

    Raises:
        LabValidationError: α 가 그리드 범위를 넘는 경우
    """
    c = as_unit(c)
    values = validate_alphas(alphas)
    nodes = solution.nodes
    u = solution.values
    h = solution.grid.step
    J = solution.boundary
    n = nodes.size
    cval = c.value

    defects = []
    for alpha in values:
        k_float = alpha / h
        k = int(round(k_float))
        if abs(k_float - k) <= 1e-9 * max(1.0, k_float):
            if J + k >= n:
                raise LabValidationError(f"shift α={alpha:.6g} exceeds grid reach", field="alphas", value=alpha)
            diff = u[J + k:] - cval * u[J:n - k]
        else:
            src = nodes[J:]
            src = src[src + alpha <= nodes[-1]]
            if src.size == 0:
                raise LabValidationError(f"shift α={alpha:.6g} exceeds grid reach", field="alphas", value=alpha)
            shifted = np.stack([np.interp(src + alpha, nodes, u[:, d].real)
                                + 1j * np.interp(src + alpha, nodes, u[:, d].imag) for d in range(u.shape[1])], axis=1)
            diff = shifted - cval * u[J:J + src.size]
        defects.append(float(np.max(np.linalg.norm(diff, axis=1))))
    return RecurrenceReport(alphas=values.tolist(), defects=defects, c=c)
