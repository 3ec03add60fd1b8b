"""
합성곱 모듈

커널 R 과의 무한/유한 합성곱
    F(t) = ∫_{-∞}^t R(t-s) f(s) ds,   H(t) = ∫_0^t R(t-s) f(s) ds,
열 커널 해, 그리고 커널 합산 가능성 Σ_k ‖R‖_{L^q[k,k+1]} 을 계산합니다.

구적법은 곱 적분(product integration)입니다: 각 셀에서 f 를 선형 보간하고
커널의 정확한 0차/1차 모멘트로 가중치를 만듭니다. 분수 커널의 u=0 특이 셀도 정확히 적분됩니다.
"""

import math
from typing import List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_serializer, model_validator
from scipy.special import erf, erfc, erfcinv

from c_period_lab.core.config import settings
from c_period_lab.core.exceptions import DomainError, LabValidationError, SingularWindowError
from c_period_lab.core.logger import get_logger
from c_period_lab.services.constants import KernelKind, SignalDomain
from c_period_lab.services.signal_core import Signal
from c_period_lab.services.workers import iter_concat, map_chunks, split_chunks

logger = get_logger(__name__)

_EVAL_BUDGET = 4_000_000


class Kernel(BaseModel):
    """
    스칼라 커널 R(u), u > 0.

    exponential(ω):   e^{-ωu}
    fractional(γ):    u^{γ-1} (u <= 1), u^{-γ-1} (u > 1)
    gaussian-heat(t₀): e^{-u²/(4t₀)} / (2√(πt₀))
    """

    model_config = ConfigDict(frozen=True)

    kind: KernelKind
    omega: Optional[float] = Field(None, gt=0)
    gamma: Optional[float] = Field(None, gt=0, lt=1)
    t0: Optional[float] = Field(None, gt=0)

    @model_validator(mode="after")
    def _params(self) -> "Kernel":
        required = {KernelKind.EXPONENTIAL: "omega", KernelKind.FRACTIONAL: "gamma", KernelKind.GAUSSIAN_HEAT: "t0"}
        name = required[self.kind]
        if getattr(self, name) is None:
            raise ValueError(f"{self.kind.value} kernel requires '{name}'")
        return self

    @classmethod
    def exponential(cls, omega: float = 1.0) -> "Kernel":
        return cls(kind=KernelKind.EXPONENTIAL, omega=omega)

    @classmethod
    def fractional(cls, gamma: float) -> "Kernel":
        return cls(kind=KernelKind.FRACTIONAL, gamma=gamma)

    @classmethod
    def gaussian_heat(cls, t0: float) -> "Kernel":
        return cls(kind=KernelKind.GAUSSIAN_HEAT, t0=t0)

    @property
    def _prefactor(self) -> float:
        return 1.0 / (2.0 * math.sqrt(math.pi * self.t0))

    def eval(self, u: np.ndarray) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        if self.kind is KernelKind.EXPONENTIAL:
            return np.exp(-self.omega * u)
        if self.kind is KernelKind.FRACTIONAL:
            g = self.gamma
            with np.errstate(divide="ignore"):
                return np.where(u <= 1.0, u ** (g - 1.0), u ** (-g - 1.0))
        return self._prefactor * np.exp(-u * u / (4.0 * self.t0))

    def integral(self) -> float:
        """∫_0^∞ R(u) du."""
        if self.kind is KernelKind.EXPONENTIAL:
            return 1.0 / self.omega
        if self.kind is KernelKind.FRACTIONAL:
            return 2.0 / self.gamma
        return 0.5

    def _antiderivatives(self, u: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """F0(u) = ∫_0^u R, F1(u) = ∫_0^u v·R(v) dv."""
        u = np.asarray(u, dtype=float)
        if self.kind is KernelKind.EXPONENTIAL:
            w = self.omega
            e = np.exp(-w * u)
            return (1.0 - e) / w, (1.0 - e * (w * u + 1.0)) / (w * w)
        if self.kind is KernelKind.FRACTIONAL:
            g = self.gamma
            low = np.minimum(u, 1.0)
            high = np.maximum(u, 1.0)
            f0 = low ** g / g + (1.0 - high ** (-g)) / g
            f1 = low ** (g + 1.0) / (g + 1.0) + (high ** (1.0 - g) - 1.0) / (1.0 - g)
            return f0, f1
        s = 2.0 * math.sqrt(self.t0)
        return 0.5 * erf(u / s), self._prefactor * 2.0 * self.t0 * (1.0 - np.exp(-(u / s) ** 2))

    def moments(self, a: np.ndarray, b: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """셀 [a, b] 의 m0 = ∫R, m1 = ∫u·R."""
        fa0, fa1 = self._antiderivatives(a)
        fb0, fb1 = self._antiderivatives(b)
        return fb0 - fa0, fb1 - fa1

    def tail(self, T: float) -> float:
        """∫_T^∞ R(u) du."""
        if self.kind is KernelKind.EXPONENTIAL:
            return math.exp(-self.omega * T) / self.omega
        if self.kind is KernelKind.FRACTIONAL:
            g = self.gamma
            if T <= 1.0:
                return (1.0 - T ** g) / g + 1.0 / g
            return T ** (-g) / g
        return 0.5 * float(erfc(T / (2.0 * math.sqrt(self.t0))))

    def default_truncation(self, tol: Optional[float] = None) -> float:
        """꼬리 ∫_T^∞ R <= tol 인 T (settings.MAX_TRUNCATION 으로 상한)."""
        tol = tol or settings.KERNEL_TAIL_TOL
        if self.kind is KernelKind.EXPONENTIAL:
            T = max(0.0, math.log(1.0 / (self.omega * tol)) / self.omega)
        elif self.kind is KernelKind.FRACTIONAL:
            T = (1.0 / (self.gamma * tol)) ** (1.0 / self.gamma)
        else:
            T = 2.0 * math.sqrt(self.t0) * float(erfcinv(2.0 * tol))
        if T > settings.MAX_TRUNCATION:
            logger.warning(
                f"{self.kind.value} kernel: truncation {T:.3g} capped at {settings.MAX_TRUNCATION}, "
                f"tail = {self.tail(settings.MAX_TRUNCATION):.3g}"
            )
            T = settings.MAX_TRUNCATION
        return max(T, 1.0) if self.kind is KernelKind.FRACTIONAL else T


class ConvolutionResult(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    kernel: Kernel
    ts: np.ndarray
    values: np.ndarray
    truncation: float
    tail_bound: float

    @field_serializer("ts")
    def _ser_ts(self, ts: np.ndarray) -> List[float]:
        return ts.tolist()

    @field_serializer("values")
    def _ser_values(self, values: np.ndarray) -> List[List[Tuple[float, float]]]:
        return [[(float(v.real), float(v.imag)) for v in row] for row in values]


# ------------------------------------------------------
# 곱 적분 가중치
# ------------------------------------------------------

def _uniform(a: float, b: float, h: float) -> np.ndarray:
    return np.linspace(a, b, max(1, int(math.ceil((b - a) / h - 1e-9))) + 1)


def quadrature_nodes(kernel: Kernel, T: float, step: Optional[float] = None,
                     tail_step: Optional[float] = None) -> np.ndarray:
    """[0, T] 의 u-노드. 분수 커널은 [0, 1] 에 step, [1, T] 에 tail_step 을 씁니다."""
    step = step or settings.CONVOLUTION_STEP
    if kernel.kind is KernelKind.FRACTIONAL and T > 1.0:
        tail_step = tail_step or settings.FRACTIONAL_TAIL_STEP
        return np.concatenate((_uniform(0.0, 1.0, step), _uniform(1.0, T, tail_step)[1:]))
    return _uniform(0.0, T, step)


def product_weights(kernel: Kernel, u: np.ndarray) -> np.ndarray:
    """
    ∫_0^T R(u) g(u) du ≈ Σ_j w_j g(u_j), g 를 셀마다 선형 보간.

    셀 [a, b] 기여: g(a)·(b·m0 - m1)/h + g(b)·(m1 - a·m0)/h
    """
    a, b = u[:-1], u[1:]
    h = b - a
    m0, m1 = kernel.moments(a, b)
    w = np.zeros_like(u)
    w[:-1] += (b * m0 - m1) / h
    w[1:] += (m1 - a * m0) / h
    return w


def _apply(signal: Signal, ts: np.ndarray, offsets: np.ndarray, weights: np.ndarray,
           sign: float = -1.0) -> Tuple[np.ndarray, float]:
    """Σ_j w_j f(t + sign·u_j) 를 모든 t 에 대해 계산하고 사용한 값의 max ‖f‖ 를 반환합니다."""
    per_chunk = max(1, _EVAL_BUDGET // offsets.size)

    def run(chunk: np.ndarray) -> Tuple[np.ndarray, float]:
        pts = (chunk[:, None] + sign * offsets[None, :]).ravel()
        vals = signal.evaluate(pts).reshape(chunk.size, offsets.size, signal.dim)
        peak = float(np.max(np.linalg.norm(vals, axis=2)))
        return np.einsum("j,njd->nd", weights, vals), peak

    parts = map_chunks(run, split_chunks(ts, per_chunk))
    return iter_concat(p[0] for p in parts).reshape(ts.size, signal.dim), max(p[1] for p in parts)


# ------------------------------------------------------
# 합성곱 연산
# ------------------------------------------------------

def convolve_on_grid(kernel: Kernel, signal: Signal, ts: np.ndarray, truncation: Optional[float] = None,
                     step: Optional[float] = None, tail_step: Optional[float] = None) -> ConvolutionResult:
    """
    출력 시각들에서 ∫_{t-T}^t R(t-s) f(s) ds 를 계산합니다. tail_bound = ‖f‖∞·∫_T^∞ R.
    """
    ts = np.atleast_1d(np.asarray(ts, dtype=float))
    T = truncation or kernel.default_truncation()
    if not T > 0:
        raise LabValidationError("truncation must be positive", field="truncation", value=T)
    u = quadrature_nodes(kernel, T, step, tail_step)
    values, peak = _apply(signal, ts, u, product_weights(kernel, u))
    tail = peak * kernel.tail(T)
    logger.debug(f"convolve {kernel.kind.value} × {signal.descriptor.name}: {ts.size} t, {u.size} nodes, tail={tail:.3g}")
    return ConvolutionResult(kernel=kernel, ts=ts, values=values, truncation=T, tail_bound=tail)


def convolve_line(kernel: Kernel, signal: Signal, t: float, truncation: Optional[float] = None,
                  step: Optional[float] = None, tail_step: Optional[float] = None) -> ConvolutionResult:
    """F(t) = ∫_{-∞}^t R(t-s) f(s) ds 를 [t-T, t] 로 절단해 계산합니다."""
    if signal.domain is not SignalDomain.FULL_LINE:
        raise DomainError("convolve_line requires a full-line signal", field="signal")
    return convolve_on_grid(kernel, signal, np.array([t]), truncation, step, tail_step)


def convolve_halfline(kernel: Kernel, signal: Signal, t: float, step: Optional[float] = None,
                      tail_step: Optional[float] = None) -> ConvolutionResult:
    """
    H(t) = ∫_0^t R(t-s) f(s) ds.

    Raises:
        DomainError: t <= 0
    """
    if not t > 0:
        raise DomainError("convolve_halfline requires t > 0", field="t", value=t)
    u = quadrature_nodes(kernel, float(t), step, tail_step)
    values, _ = _apply(signal, np.array([float(t)]), u, product_weights(kernel, u))
    return ConvolutionResult(kernel=kernel, ts=np.array([float(t)]), values=values, truncation=float(t),
                             tail_bound=0.0)


def heat_solution(signal: Signal, t0: float, x, truncation: Optional[float] = None,
                  step: Optional[float] = None) -> ConvolutionResult:
    """
    (1/(2√(πt₀)))∫ e^{-(x-s)²/(4t₀)} f(s) ds 를 대칭 창 [x-W, x+W] 에서 계산합니다.

    W 기본값은 양쪽 가우스 꼬리 erfc(W/(2√t₀)) 가 KERNEL_TAIL_TOL 이하가 되는 값입니다.
    """
    if signal.domain is not SignalDomain.FULL_LINE:
        raise DomainError("heat_solution requires a full-line signal", field="signal")
    kernel = Kernel.gaussian_heat(t0)
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    W = truncation or 2.0 * math.sqrt(t0) * float(erfcinv(settings.KERNEL_TAIL_TOL))
    u = quadrature_nodes(kernel, W, step)
    weights = product_weights(kernel, u)
    left, peak_left = _apply(signal, xs, u, weights, sign=-1.0)
    right, peak_right = _apply(signal, xs, u, weights, sign=1.0)
    tail = max(peak_left, peak_right) * 2.0 * kernel.tail(W)
    return ConvolutionResult(kernel=kernel, ts=xs, values=left + right, truncation=W, tail_bound=tail)


# ------------------------------------------------------
# 커널 합산 가능성
# ------------------------------------------------------

class KernelSummability(BaseModel):
    value: float = Field(..., description="Σ_k ‖R‖_{L^q[k,k+1]} 의 인증 상한")
    partial_sum: float
    tail_bound: float
    exponent: float
    terms: int


def stepanov_exponent_admissible(gamma: float, q: float) -> bool:
    """(γ-1)·q/(q-1) > -1 (q > 1) 인지 확인합니다."""
    if q <= 1:
        return False
    return (gamma - 1.0) * q / (q - 1.0) > -1.0


def kernel_q_tail(kernel: Kernel, q: float, conjugate: bool = False, max_terms: int = 1_000_000) -> KernelSummability:
    """
    M = Σ_{k>=0} (∫_k^{k+1} R^e)^{1/e}, e = q (conjugate=True 면 e = q/(q-1)).

    부분합은 꼬리 상한이 KERNEL_SUM_TOL 아래로 내려가거나 max_terms 에 닿을 때까지 더하고,
    남은 꼬리의 해석적 상한을 더한 값을 반환합니다.

    Raises:
        SingularWindowError: 분수 커널에서 (γ-1)·e <= -1 이라 k=0 창이 발산하는 경우
    """
    if q < 1:
        raise LabValidationError("q must be at least 1", field="q", value=q)
    if conjugate:
        if q <= 1:
            raise LabValidationError("conjugate exponent requires q > 1", field="q", value=q)
        e = q / (q - 1.0)
    else:
        e = float(q)
    tol = settings.KERNEL_SUM_TOL

    if kernel.kind is KernelKind.EXPONENTIAL:
        w = kernel.omega
        first = ((1.0 - math.exp(-e * w)) / (e * w)) ** (1.0 / e)
        value = first / (1.0 - math.exp(-w))
        return KernelSummability(value=value, partial_sum=value, tail_bound=0.0, exponent=e, terms=0)

    if kernel.kind is KernelKind.FRACTIONAL:
        g = kernel.gamma
        if not (g - 1.0) * e > -1.0:
            raise SingularWindowError(
                f"(γ-1)·q = {(g - 1.0) * e:.6g} <= -1: k=0 window of u^(γ-1) is not in L^q",
                gamma=g, exponent=e,
            )
        first = (1.0 / ((g - 1.0) * e + 1.0)) ** (1.0 / e)
        power = (g + 1.0) * e - 1.0
        # Σ_{k>=K} k^{-γ-1} <= K^{-γ-1} + K^{-γ}/γ
        K = 1
        while K < max_terms and K ** (-g - 1.0) + K ** (-g) / g > tol:
            K *= 2
        K = min(K, max_terms)
        k = np.arange(1, K, dtype=float)
        terms = ((k ** (-power) - (k + 1.0) ** (-power)) / power) ** (1.0 / e)
        partial = first + float(terms.sum())
        tail = K ** (-g - 1.0) + K ** (-g) / g
        return KernelSummability(value=partial + tail, partial_sum=partial, tail_bound=tail, exponent=e, terms=K)

    t0 = kernel.t0
    pref = 1.0 / (2.0 * math.sqrt(math.pi * t0))
    scale = math.sqrt(e) / (2.0 * math.sqrt(t0))
    partial = 0.0
    K = 0
    while True:
        window = pref ** e * math.sqrt(math.pi * t0 / e) * (math.erf((K + 1) * scale) - math.erf(K * scale))
        partial += window ** (1.0 / e)
        K += 1
        # 창별 L^q 노름 <= sup = G(k) 이므로 Σ_{k>=K} G(k) <= G(K) + ½erfc(K/(2√t₀))
        tail = pref * math.exp(-K * K / (4.0 * t0)) + 0.5 * math.erfc(K / (2.0 * math.sqrt(t0)))
        if tail < tol or K >= max_terms:
            break
    return KernelSummability(value=partial + tail, partial_sum=partial, tail_bound=tail, exponent=e, terms=K)
