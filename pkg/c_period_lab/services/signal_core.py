"""
신호 코어 모듈

순수 평가 사상 t -> C^d 로서의 신호(Signal), 단위원 위의 승수(UnitComplex),
유한 샘플링 그리드(Grid)와 builtin 신호 생성, 변환, 그리드 sup 노름을 제공합니다.

모든 평가는 벡터화되어 있습니다: evaluate(ts) 는 (n,) 실수 배열을 받아
(n, dim) 복소 배열을 돌려줍니다. Signal 은 불변이며 스레드 간 공유해도 안전합니다.
"""

import math
from dataclasses import dataclass, field, replace
from functools import reduce
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple, Type, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from c_period_lab.core.config import settings
from c_period_lab.core.exceptions import (
    DomainError,
    GridError,
    SignalSpecError,
    UnitCircleError,
    WrongKindError,
)
from c_period_lab.core.logger import get_logger
from c_period_lab.services.constants import (
    ArgKind,
    Defaults,
    SignalDomain,
    TransformKind,
    ValidationMessages,
)

logger = get_logger(__name__)

SignalFunc = Callable[[np.ndarray], np.ndarray]


# ------------------------------------------------------
# 1) 단위원 승수 c
# ------------------------------------------------------

class UnitComplex(BaseModel):
    """
    |c| = 1 인 승수와 편각의 산술적 분류.

    rational(p, q): c = exp(iπp/q), gcd(|p|, q) = 1 (c = 1 은 p=0, q=1)
    irrational(phi): c = exp(iπ·phi), phi 가 무리수라는 것은 호출자의 선언
    """

    model_config = ConfigDict(frozen=True)

    re: float
    im: float
    arg_kind: ArgKind = ArgKind.IRRATIONAL
    p: Optional[int] = None
    q: Optional[int] = None
    phi: Optional[float] = None

    @model_validator(mode="before")
    @classmethod
    def _fill_value(cls, data: Any) -> Any:
        if not isinstance(data, dict):
            return data
        data = dict(data)
        kind = data.get("arg_kind", ArgKind.IRRATIONAL)
        kind = ArgKind(kind)
        data["arg_kind"] = kind
        if kind is ArgKind.RATIONAL and data.get("p") is not None and data.get("q") is not None:
            angle = math.pi * data["p"] / data["q"]
        elif kind is ArgKind.IRRATIONAL and data.get("phi") is not None:
            angle = math.pi * data["phi"]
        else:
            angle = None
        if angle is not None:
            data.setdefault("re", math.cos(angle))
            data.setdefault("im", math.sin(angle))
        elif kind is ArgKind.IRRATIONAL and "re" in data and "im" in data:
            data["phi"] = math.atan2(data["im"], data["re"]) / math.pi
        return data

    @model_validator(mode="after")
    def _check_unit(self) -> "UnitComplex":
        value = self.value
        if abs(abs(value) - 1.0) > Defaults.UNIT_TOL:
            raise UnitCircleError(
                f"{ValidationMessages.NOT_UNIT} (|c| = {abs(value):.15g})", field="c", value=value
            )
        if self.arg_kind is ArgKind.RATIONAL:
            if self.p is None or self.q is None:
                raise UnitCircleError("rational arg_kind requires p and q", field="c")
            if self.q < 1:
                raise UnitCircleError("rational arg_kind requires q >= 1", field="c.q", value=self.q)
            if math.gcd(abs(self.p), self.q) != 1:
                raise UnitCircleError(
                    f"rational arg_kind requires gcd(|p|, q) = 1, got p={self.p}, q={self.q}",
                    field="c",
                )
            expected = complex(math.cos(math.pi * self.p / self.q), math.sin(math.pi * self.p / self.q))
            if abs(value - expected) > Defaults.UNIT_TOL:
                raise UnitCircleError("c does not match exp(iπp/q)", field="c", value=value)
        elif self.phi is not None:
            expected = complex(math.cos(math.pi * self.phi), math.sin(math.pi * self.phi))
            if abs(value - expected) > Defaults.UNIT_TOL:
                raise UnitCircleError("c does not match exp(iπ·phi)", field="c", value=value)
        return self

    @property
    def value(self) -> complex:
        return complex(self.re, self.im)

    @classmethod
    def rational(cls, p: int, q: int) -> "UnitComplex":
        """c = exp(iπp/q) 를 생성합니다. p 는 2q 를 법으로 (-q, q] 범위로 정규화하지 않습니다."""
        return cls(arg_kind=ArgKind.RATIONAL, p=int(p), q=int(q))

    @classmethod
    def irrational(cls, phi: float) -> "UnitComplex":
        return cls(arg_kind=ArgKind.IRRATIONAL, phi=float(phi))

    @classmethod
    def from_angle(cls, theta: float) -> "UnitComplex":
        """c = exp(iθ). 편각의 유리성은 판정하지 않고 irrational 로 선언합니다."""
        return cls.irrational(theta / math.pi)

    @classmethod
    def one(cls) -> "UnitComplex":
        return cls.rational(0, 1)

    def is_one(self) -> bool:
        if self.arg_kind is ArgKind.RATIONAL:
            return self.p % (2 * self.q) == 0
        return abs(self.value - 1.0) <= Defaults.UNIT_TOL

    def power(self, l: int) -> "UnitComplex":
        """c^l. rational 은 분류를 유지하고 irrational 은 phi·l 로 선언을 이어갑니다."""
        if self.arg_kind is ArgKind.RATIONAL:
            num = (self.p * l) % (2 * self.q)
            g = math.gcd(num, self.q)
            return UnitComplex.rational(num // g, self.q // g)
        return UnitComplex.irrational(self.phi * l)

    def inverse(self) -> "UnitComplex":
        if self.arg_kind is ArgKind.RATIONAL:
            return UnitComplex.rational(-self.p, self.q)
        return UnitComplex.irrational(-self.phi)

    def require_rational(self) -> Tuple[int, int]:
        if self.arg_kind is not ArgKind.RATIONAL:
            raise WrongKindError("operation requires a rational-arg multiplier", field="c")
        return self.p, self.q

    def describe(self) -> Dict[str, Any]:
        """JSON 출력용 {re, im, arg_kind} 표현."""
        out: Dict[str, Any] = {"re": self.re, "im": self.im, "arg_kind": self.arg_kind.value}
        if self.arg_kind is ArgKind.RATIONAL:
            out.update(p=self.p, q=self.q)
        elif self.phi is not None:
            out["phi"] = self.phi
        return out


def as_unit(c: Union[UnitComplex, complex, float, int]) -> UnitComplex:
    """
    연산 입력을 UnitComplex 로 정규화합니다.

    Raises:
        UnitCircleError: | |c| - 1 | > 1e-12 인 경우
    """
    if isinstance(c, UnitComplex):
        return c
    value = complex(c)
    if abs(abs(value) - 1.0) > Defaults.UNIT_TOL:
        raise UnitCircleError(f"{ValidationMessages.NOT_UNIT} (|c| = {abs(value):.15g})", field="c", value=value)
    if value == 1:
        return UnitComplex.one()
    if value == -1:
        return UnitComplex.rational(1, 1)
    return UnitComplex(re=value.real, im=value.imag)


# ------------------------------------------------------
# 2) 샘플링 그리드
# ------------------------------------------------------

class Grid(BaseModel):
    """t-구간 [start, end] 의 균등 샘플링. 노드 수 = floor((end-start)/step) + 1 >= 2."""

    model_config = ConfigDict(frozen=True)

    start: float
    end: float
    step: float

    @model_validator(mode="after")
    def _check(self) -> "Grid":
        if not self.step > 0:
            raise GridError("grid step must be positive", field="step", value=self.step)
        if not self.start < self.end:
            raise GridError(ValidationMessages.GRID_ORDER, field="end", value=self.end)
        if self.size < 2:
            raise GridError(ValidationMessages.GRID_NODES, field="step", value=self.step)
        return self

    @property
    def size(self) -> int:
        return int(math.floor((self.end - self.start) / self.step + 1e-9)) + 1

    @property
    def nodes(self) -> np.ndarray:
        return self.start + self.step * np.arange(self.size, dtype=float)

    @classmethod
    def default_for(cls, domain: SignalDomain, step: Optional[float] = None) -> "Grid":
        """full-line [-W, W], half-line [0, L] 기본 그리드."""
        step = step or settings.GRID_STEP
        if domain is SignalDomain.HALF_LINE:
            return cls(start=0.0, end=settings.HALF_LINE_LENGTH, step=step)
        return cls(start=-settings.FULL_LINE_HALF_WIDTH, end=settings.FULL_LINE_HALF_WIDTH, step=step)


GridLike = Union[Grid, np.ndarray, Sequence[float]]


def resolve_nodes(grid: GridLike) -> Tuple[np.ndarray, float]:
    """
    Grid 또는 노드 배열을 (nodes, step) 으로 바꿉니다.
    배열의 step 은 인접 노드 간격의 최댓값입니다.
    """
    if isinstance(grid, Grid):
        return grid.nodes, grid.step
    nodes = np.asarray(grid, dtype=float).ravel()
    if nodes.size == 0:
        raise GridError(ValidationMessages.GRID_NODES, field="grid")
    step = float(np.max(np.abs(np.diff(nodes)))) if nodes.size > 1 else 0.0
    return nodes, step


# ------------------------------------------------------
# 3) Signal
# ------------------------------------------------------

class SignalDescriptor(BaseModel):
    """재현 가능한 실행을 위한 JSON 직렬화 형태 {name, params, transforms}."""

    name: str
    params: Dict[str, Any] = Field(default_factory=dict)
    transforms: List[Dict[str, Any]] = Field(default_factory=list)


@dataclass(frozen=True)
class Truncation:
    """급수 절단 메타데이터. |t| <= horizon 에서 형식적 극한과의 sup 차이가 tail_bound 이하."""

    terms: int
    tail_bound: float
    horizon: float = math.inf


@dataclass(frozen=True)
class Signal:
    domain: SignalDomain
    dim: int
    func: SignalFunc = field(repr=False, compare=False)
    lipschitz: Optional[float] = None
    truncation: Optional[Truncation] = None
    descriptor: SignalDescriptor = field(default_factory=lambda: SignalDescriptor(name="custom"))
    period_hint: Optional[float] = None
    multiplier_hint: Optional[UnitComplex] = None

    @classmethod
    def from_callable(
        cls,
        func: Callable[[np.ndarray], np.ndarray],
        domain: SignalDomain = SignalDomain.FULL_LINE,
        dim: int = 1,
        lipschitz: Optional[float] = None,
        name: str = "custom",
    ) -> "Signal":
        """
        사용자 정의 신호를 만듭니다. func 는 (n,) 배열을 받아 (n,) 또는 (n, dim) 배열을 반환해야 합니다.
        """
        if dim < 1:
            raise SignalSpecError("dim must be a positive integer", field="dim", value=dim)

        def wrapped(ts: np.ndarray) -> np.ndarray:
            out = np.asarray(func(ts), dtype=complex)
            return out.reshape(ts.shape[0], dim)

        return cls(domain=domain, dim=dim, func=wrapped, lipschitz=lipschitz,
                   descriptor=SignalDescriptor(name=name))

    @property
    def tail_bound(self) -> float:
        return self.truncation.tail_bound if self.truncation else 0.0

    def evaluate(self, ts: Union[np.ndarray, Sequence[float], float]) -> np.ndarray:
        """
        여러 시각에서 신호를 평가합니다.

        Returns:
            np.ndarray: (n, dim) 복소 배열

        Raises:
            DomainError: half-line 신호를 t < 0 에서 평가하는 경우
        """
        ts = np.atleast_1d(np.asarray(ts, dtype=float))
        if self.domain is SignalDomain.HALF_LINE and ts.size and float(ts.min()) < 0.0:
            raise DomainError(
                f"{ValidationMessages.HALF_LINE_NEGATIVE} (min t = {float(ts.min()):.6g})",
                field="t", value=float(ts.min()),
            )
        return self.func(ts)

    def eval(self, t: float) -> np.ndarray:
        """단일 시각 평가. (dim,) 복소 벡터를 반환합니다."""
        return self.evaluate(np.array([float(t)]))[0]

    def norms(self, ts: np.ndarray) -> np.ndarray:
        """각 시각에서의 유클리드 노름 ‖f(t)‖."""
        return np.linalg.norm(self.evaluate(ts), axis=1)


def _column(values: np.ndarray) -> np.ndarray:
    return np.asarray(values, dtype=complex).reshape(-1, 1)


# ------------------------------------------------------
# 4) builtin 파라미터 모델
# ------------------------------------------------------

class _Params(BaseModel):
    model_config = ConfigDict(extra="forbid")


class ExponentialParams(_Params):
    mu: float = 1.0


class EmptyParams(_Params):
    pass


class ConstantParams(_Params):
    kappa: float = 1.0
    kappa_im: float = 0.0
    half_line: bool = False


class ExponentialSumParams(_Params):
    mus: List[float] = Field(..., min_length=1)
    amplitudes: Optional[List[float]] = None

    @model_validator(mode="after")
    def _lengths(self) -> "ExponentialSumParams":
        if self.amplitudes is not None and len(self.amplitudes) != len(self.mus):
            raise ValueError("amplitudes and mus must have equal length")
        return self


class StrinaParams(_Params):
    p: int = 1
    q: int = 1
    N: int = Field(50, ge=1)

    @model_validator(mode="after")
    def _odd(self) -> "StrinaParams":
        if self.p < 1 or self.q < 1 or self.p % 2 == 0 or self.q % 2 == 0:
            raise ValueError("strina-series requires odd natural p and q")
        if (self.p - 1) % self.q != 0:
            raise ValueError("strina-series requires q | p - 1")
        return self


class HarauxParams(_Params):
    base: int = 2
    N: int = Field(30, ge=1)
    horizon: Optional[float] = Field(None, gt=0)

    @field_validator("base")
    @classmethod
    def _base(cls, v: int) -> int:
        if v not in (2, 3):
            raise ValueError("haraux-souplet base must be 2 or 3")
        return v


class DugorocneParams(_Params):
    N: int = Field(25, ge=1)
    horizon: Optional[float] = Field(None, gt=0)


class BohrParams(_Params):
    n_max: int = Field(6, ge=1, le=Defaults.BOHR_N_MAX)


class DevriesParams(_Params):
    periods: Optional[List[int]] = None
    i_max: int = Field(Defaults.DEVRIES_I_MAX, ge=1, le=6)
    horizon: Optional[float] = Field(None, gt=0)

    @field_validator("periods")
    @classmethod
    def _divisibility(cls, v: Optional[List[int]]) -> Optional[List[int]]:
        if v is None:
            return v
        if not v or v[0] < 1:
            raise ValueError("devries periods must be positive integers")
        for a, b in zip(v, v[1:]):
            if not (b > a and b % a == 0):
                raise ValueError("devries periods must be strictly increasing with p_i | p_(i+1)")
        return v


class ExpDecayParams(_Params):
    rate: float = Field(1.0, gt=0)


# ------------------------------------------------------
# 5) builtin 생성 함수
# ------------------------------------------------------

def _exponential(params: ExponentialParams) -> Signal:
    mu = params.mu
    period = 2 * math.pi / abs(mu) if mu != 0 else None
    return Signal(
        domain=SignalDomain.FULL_LINE, dim=1,
        func=lambda ts: _column(np.exp(1j * mu * ts)),
        lipschitz=abs(mu),
        period_hint=period,
        multiplier_hint=UnitComplex.one() if period else None,
    )


def _cosine(_: EmptyParams) -> Signal:
    return Signal(
        domain=SignalDomain.FULL_LINE, dim=1,
        func=lambda ts: _column(np.cos(ts)),
        lipschitz=1.0, period_hint=math.pi, multiplier_hint=UnitComplex.rational(1, 1),
    )


def _constant(params: ConstantParams) -> Signal:
    kappa = complex(params.kappa, params.kappa_im)
    domain = SignalDomain.HALF_LINE if params.half_line else SignalDomain.FULL_LINE
    return Signal(
        domain=domain, dim=1,
        func=lambda ts: np.full((ts.shape[0], 1), kappa, dtype=complex),
        lipschitz=0.0,
    )


def _exponential_sum(params: ExponentialSumParams) -> Signal:
    mus = np.asarray(params.mus, dtype=float)
    amps = np.asarray(params.amplitudes if params.amplitudes is not None else [1.0] * len(mus), dtype=complex)

    def func(ts: np.ndarray) -> np.ndarray:
        return _column(np.exp(1j * np.outer(ts, mus)) @ amps)

    return Signal(domain=SignalDomain.FULL_LINE, dim=1, func=func,
                  lipschitz=float(np.sum(np.abs(amps) * np.abs(mus))))


def _kader(_: EmptyParams) -> Signal:
    return Signal(
        domain=SignalDomain.FULL_LINE, dim=1,
        func=lambda ts: _column(0.5 * np.cos(4 * ts) + 2.0 * np.cos(2 * ts)),
        lipschitz=Defaults.KADER_LIPSCHITZ, period_hint=math.pi, multiplier_hint=UnitComplex.one(),
    )


def strina_period(q: int, N: int) -> float:
    """f_N 의 c-주기 π·Π_{n<=N}(2nq+1)/q. 이 주기에서 f_N(x+P) = e^{iπ/q} f_N(x) 가 정확히 성립합니다."""
    return math.pi * math.prod(2 * n * q + 1 for n in range(1, N + 1)) / q


def _strina(params: StrinaParams) -> Signal:
    q, N = params.q, params.N
    n = np.arange(1, N + 1, dtype=float)
    freqs = 1.0 / (2 * n * q + 1)
    weights = 1.0 / n ** 2

    def func(ts: np.ndarray) -> np.ndarray:
        out = np.zeros(ts.shape[0], dtype=complex)
        for w, f in zip(weights, freqs):
            out += w * np.exp(1j * f * ts)
        return _column(out)

    tail = max(0.0, math.pi ** 2 / 6 - float(np.sum(weights)))
    return Signal(
        domain=SignalDomain.FULL_LINE, dim=1, func=func,
        lipschitz=float(np.sum(weights * freqs)),
        truncation=Truncation(terms=N, tail_bound=tail),
        period_hint=strina_period(q, N),
        multiplier_hint=UnitComplex.rational(params.p, q),
    )


def haraux_tail_bound(base: int, N: int, horizon: float) -> float:
    """
    Σ_{n>N} (1/n)·min(1, (H/bⁿ)²). |t| <= H 에서 sin²(t/bⁿ) <= min(1, (t/bⁿ)²) 를 사용합니다.
    """
    total = 0.0
    n = N + 1
    while True:
        ratio = horizon / float(base) ** n
        term = min(1.0, ratio * ratio) / n
        if ratio < 1.0 and term < 1e-18:
            # 남은 항은 공비 1/b² 의 등비급수로 상한
            total += term / (1.0 - 1.0 / base ** 2)
            break
        total += term
        n += 1
    return total


def _haraux_series(base: int, N: int) -> Tuple[SignalFunc, float]:
    scales = [float(base) ** k for k in range(1, N + 1)]

    def series(ts: np.ndarray) -> np.ndarray:
        out = np.zeros(ts.shape[0], dtype=float)
        for k, scale in enumerate(scales, start=1):
            out += np.sin(ts / scale) ** 2 / k
        return out

    lipschitz = sum(1.0 / (k * s) for k, s in enumerate(scales, start=1))
    return series, lipschitz


def _haraux(params: HarauxParams) -> Signal:
    horizon = params.horizon or settings.SERIES_HORIZON
    series, lipschitz = _haraux_series(params.base, params.N)
    return Signal(
        domain=SignalDomain.FULL_LINE, dim=1,
        func=lambda ts: _column(series(ts)),
        lipschitz=lipschitz,
        truncation=Truncation(terms=params.N, tail_bound=haraux_tail_bound(params.base, params.N, horizon),
                              horizon=horizon),
    )


def _dugorocne(params: DugorocneParams) -> Signal:
    horizon = params.horizon or settings.SERIES_HORIZON
    series, _ = _haraux_series(3, params.N)
    # g 가 비유계라 전역 Lipschitz 상수는 없음
    return Signal(
        domain=SignalDomain.FULL_LINE, dim=1,
        func=lambda ts: _column(np.sin(ts) * series(ts)),
        truncation=Truncation(terms=params.N, tail_bound=haraux_tail_bound(3, params.N, horizon),
                              horizon=horizon),
    )


def bohr_tau_sequence(n: int) -> List[float]:
    """τ₁ = 1, τ_n = 2·Σ_{i<n} i·τ_i + 1 (τ_n > 2Σ iτ_i 를 만족하는 한 가지 선택)."""
    taus: List[float] = []
    for k in range(1, n + 1):
        taus.append(1.0 if k == 1 else 2.0 * sum(i * t for i, t in enumerate(taus, start=1)) + 1.0)
    return taus


def bohr_support_radius(n: int) -> float:
    """supp f_n ⊆ [-S_n, S_n], S_1 = 1, S_n = S_{n-1} + (n-1)τ_n. |x| <= S_n 에서 f = f_n."""
    taus = bohr_tau_sequence(n)
    radius = 1.0
    for k in range(2, n + 1):
        radius += (k - 1) * taus[k - 1]
    return radius


def bohr_level(ts: np.ndarray, n: int) -> np.ndarray:
    """
    재귀 f_n(x) = Σ_{|m|<=n-1} ((n-|m|)/n)·f_{n-1}(x - mτ_n) 를 평가합니다.

    τ_n > 2S_{n-1} 이므로 평행이동 사본의 지지집합이 서로소이고,
    각 단계에서 가장 가까운 m = round(x/τ_n) 하나만 기여합니다.
    """
    taus = bohr_tau_sequence(n)
    x = np.asarray(ts, dtype=float).copy()
    weight = np.ones_like(x)
    for k in range(n, 1, -1):
        tau = taus[k - 1]
        m = np.rint(x / tau)
        weight *= np.where(np.abs(m) <= k - 1, (k - np.abs(m)) / k, 0.0)
        x -= m * tau
    return weight * np.maximum(0.0, 1.0 - np.abs(x))


def _bohr(params: BohrParams) -> Signal:
    n = params.n_max
    return Signal(
        domain=SignalDomain.FULL_LINE, dim=1,
        func=lambda ts: _column(bohr_level(ts, n)),
        lipschitz=1.0,
        truncation=Truncation(terms=n, tail_bound=0.0, horizon=bohr_support_radius(n)),
    )


def devries_default_periods(i_max: int) -> List[int]:
    return [2 ** (i * i) for i in range(1, i_max + 1)]


def _devries(params: DevriesParams) -> Signal:
    periods = params.periods or devries_default_periods(params.i_max)
    horizon = params.horizon or settings.SERIES_HORIZON
    # 다음 주기 p_{i+1} >= 2p_i 이고 |t| <= H 에서 f_{i+1}(t) <= H / p_{i+1}
    next_period = 2 ** ((len(periods) + 1) ** 2) if params.periods is None else 2 * periods[-1]
    ps = np.asarray(periods, dtype=float)

    def func(ts: np.ndarray) -> np.ndarray:
        out = np.zeros(ts.shape[0], dtype=float)
        for p in ps:
            out = np.maximum(out, np.abs(np.mod(ts + p, 2 * p) - p) / p)
        return _column(out)

    return Signal(
        domain=SignalDomain.FULL_LINE, dim=1, func=func,
        lipschitz=1.0 / ps[0],
        truncation=Truncation(terms=len(periods), tail_bound=min(1.0, horizon / next_period), horizon=horizon),
        period_hint=2.0 * periods[-1], multiplier_hint=UnitComplex.one(),
    )


def _exp_decay(params: ExpDecayParams) -> Signal:
    rate = params.rate
    return Signal(
        domain=SignalDomain.HALF_LINE, dim=1,
        func=lambda ts: _column(np.exp(-rate * ts)),
        lipschitz=rate,
    )


BUILTINS: Dict[str, Tuple[Callable[[Any], Signal], Type[_Params], str]] = {
    "exponential": (_exponential, ExponentialParams, "e^{iμt}"),
    "cosine": (_cosine, EmptyParams, "cos t"),
    "constant": (_constant, ConstantParams, "constant κ"),
    "exponential-sum": (_exponential_sum, ExponentialSumParams, "Σ a_k e^{iμ_k t}"),
    "kader-g": (_kader, EmptyParams, "½cos 4t + 2cos 2t"),
    "strina-series": (_strina, StrinaParams, "Σ_{n<=N} e^{ix/(2nq+1)}/n²"),
    "haraux-souplet": (_haraux, HarauxParams, "Σ_{n<=N} (1/n)sin²(t/bⁿ)"),
    "bohr-recurrent": (_bohr, BohrParams, "Bohr recursion f_n, n <= n_max"),
    "devries": (_devries, DevriesParams, "max_i triangular wave of period 2p_i"),
    "dugorocne-f": (_dugorocne, DugorocneParams, "sin t · Σ_{n<=N} (1/n)sin²(t/3ⁿ)"),
    "exp-decay": (_exp_decay, ExpDecayParams, "e^{-rate·t} on [0,∞)"),
}


def builtin_catalog() -> List[Dict[str, Any]]:
    """signal-list 출력용 builtin 이름, 설명, 파라미터 스키마."""
    return [
        {"name": name, "formula": formula, "params": model.model_json_schema().get("properties", {})}
        for name, (_, model, formula) in BUILTINS.items()
    ]


def make_builtin(name: str, params: Optional[Dict[str, Any]] = None) -> Signal:
    """
    이름과 파라미터로 builtin 신호를 만듭니다.

    Args:
        name: BUILTINS 의 키
        params: 파라미터 맵 (알 수 없는 키는 거부)

    Returns:
        Signal: 급수 builtin 은 truncation.tail_bound 가 설정됨

    Raises:
        SignalSpecError: 알 수 없는 이름 또는 잘못된 파라미터
    """
    params = dict(params or {})
    if name not in BUILTINS:
        raise SignalSpecError(f"unknown builtin signal '{name}'", field="name", value=name)
    factory, model, _ = BUILTINS[name]
    try:
        parsed = model(**params)
    except ValidationError as e:
        raise SignalSpecError(f"invalid params for '{name}': {e.errors()[0]['msg']}", field="params",
                              value=params) from e
    signal = factory(parsed)
    logger.debug(f"builtin '{name}' 생성: {parsed.model_dump()}")
    return replace(signal, descriptor=SignalDescriptor(name=name, params=parsed.model_dump(mode="json")))


# ------------------------------------------------------
# 6) 변환
# ------------------------------------------------------

def _with_transform(signal: Signal, entry: Dict[str, Any], **changes: Any) -> Signal:
    descriptor = signal.descriptor.model_copy(update={"transforms": [*signal.descriptor.transforms, entry]})
    changes.setdefault("period_hint", None)
    changes.setdefault("multiplier_hint", None)
    return replace(signal, descriptor=descriptor, **changes)


def _require_compatible(a: Signal, b: Signal) -> None:
    if a.domain is not b.domain or a.dim != b.dim:
        raise DomainError(ValidationMessages.DIM_MISMATCH, field="other")


def transform(signal: Signal, kind: Union[TransformKind, str], **kwargs: Any) -> Signal:
    """
    신호에 변환을 적용해 새 Signal 을 만듭니다.

    지원 변환 (kwargs):
        scale(alpha), shift(a), dilate(b), reflect, add(other), multiply(other),
        modulus, restrict (full-line -> half-line), reciprocal

    Lipschitz 상수는 계산 가능한 경우 전파됩니다:
    scale |α|L, shift L, dilate |b|L, reflect L, add L1+L2, modulus L, restrict L.

    Raises:
        DomainError: 정의역/차원 불일치, half-line 신호의 reflect 등
        SignalSpecError: 잘못된 변환 파라미터
    """
    kind = TransformKind(kind)
    f = signal.func
    L = signal.lipschitz
    trunc = signal.truncation

    if kind is TransformKind.SCALE:
        alpha = complex(kwargs["alpha"])
        return _with_transform(
            signal, {"kind": kind.value, "alpha": [alpha.real, alpha.imag]},
            func=lambda ts: alpha * f(ts), lipschitz=None if L is None else abs(alpha) * L,
            truncation=None if trunc is None else replace(trunc, tail_bound=abs(alpha) * trunc.tail_bound),
            period_hint=signal.period_hint, multiplier_hint=signal.multiplier_hint,
        )

    if kind is TransformKind.SHIFT:
        a = float(kwargs["a"])
        if signal.domain is SignalDomain.HALF_LINE and a < 0:
            raise DomainError("half-line shift requires a >= 0", field="a", value=a)
        return _with_transform(
            signal, {"kind": kind.value, "a": a},
            func=lambda ts: f(ts + a), lipschitz=L,
            truncation=None if trunc is None else replace(trunc, horizon=max(0.0, trunc.horizon - abs(a))),
            period_hint=signal.period_hint, multiplier_hint=signal.multiplier_hint,
        )

    if kind is TransformKind.DILATE:
        b = float(kwargs["b"])
        if b == 0:
            raise SignalSpecError("dilate requires b != 0", field="b", value=b)
        if signal.domain is SignalDomain.HALF_LINE and b < 0:
            raise DomainError("half-line dilate requires b > 0", field="b", value=b)
        return _with_transform(
            signal, {"kind": kind.value, "b": b},
            func=lambda ts: f(b * ts), lipschitz=None if L is None else abs(b) * L,
            truncation=None if trunc is None else replace(trunc, horizon=trunc.horizon / abs(b)),
            period_hint=None if signal.period_hint is None else signal.period_hint / abs(b),
            multiplier_hint=signal.multiplier_hint if b > 0 else None,
        )

    if kind is TransformKind.REFLECT:
        if signal.domain is not SignalDomain.FULL_LINE:
            raise DomainError(ValidationMessages.REFLECT_HALF_LINE, field="kind")
        return _with_transform(
            signal, {"kind": kind.value},
            func=lambda ts: f(-ts), lipschitz=L,
            period_hint=signal.period_hint,
            multiplier_hint=None if signal.multiplier_hint is None else signal.multiplier_hint.inverse(),
        )

    if kind in (TransformKind.ADD, TransformKind.MULTIPLY):
        other: Signal = kwargs["other"]
        _require_compatible(signal, other)
        g = other.func
        entry = {"kind": kind.value, "other": other.descriptor.model_dump(mode="json")}
        tail = signal.tail_bound + other.tail_bound
        truncation = Truncation(terms=0, tail_bound=tail) if tail > 0 and kind is TransformKind.ADD else None
        if kind is TransformKind.ADD:
            lip = None if L is None or other.lipschitz is None else L + other.lipschitz
            return _with_transform(signal, entry, func=lambda ts: f(ts) + g(ts), lipschitz=lip,
                                   truncation=truncation)
        return _with_transform(signal, entry, func=lambda ts: f(ts) * g(ts), lipschitz=None, truncation=None)

    if kind is TransformKind.MODULUS:
        return _with_transform(
            signal, {"kind": kind.value},
            func=lambda ts: _column(np.linalg.norm(f(ts), axis=1)), lipschitz=L, dim=1,
        )

    if kind is TransformKind.RESTRICT:
        if signal.domain is SignalDomain.HALF_LINE:
            return signal
        return _with_transform(
            signal, {"kind": kind.value}, domain=SignalDomain.HALF_LINE,
            period_hint=signal.period_hint, multiplier_hint=signal.multiplier_hint,
        )

    if kind is TransformKind.RECIPROCAL:
        def reciprocal(ts: np.ndarray) -> np.ndarray:
            values = f(ts)
            if np.any(values == 0):
                raise DomainError("reciprocal of a signal that vanishes on the grid", field="kind")
            return 1.0 / values

        return _with_transform(
            signal, {"kind": kind.value}, func=reciprocal, lipschitz=None, truncation=None,
            period_hint=signal.period_hint,
            multiplier_hint=None if signal.multiplier_hint is None else signal.multiplier_hint.inverse(),
        )

    raise SignalSpecError(f"unsupported transform '{kind}'", field="kind")  # pragma: no cover


def build_signal(descriptor: Union[SignalDescriptor, Dict[str, Any]]) -> Signal:
    """
    JSON 디스크립터 {name, params, transforms[]} 로부터 신호를 다시 만듭니다.
    add/multiply 의 other 는 중첩 디스크립터입니다.
    """
    if not isinstance(descriptor, SignalDescriptor):
        try:
            descriptor = SignalDescriptor.model_validate(descriptor)
        except ValidationError as e:
            raise SignalSpecError(f"invalid signal descriptor: {e.errors()[0]['msg']}", field="signal") from e

    signal = make_builtin(descriptor.name, descriptor.params)
    for entry in descriptor.transforms:
        entry = dict(entry)
        kind = entry.pop("kind", None)
        try:
            kind = TransformKind(kind)
        except ValueError as e:
            raise SignalSpecError(f"unknown transform '{kind}'", field="transforms") from e
        if "other" in entry:
            entry["other"] = build_signal(entry["other"])
        if kind is TransformKind.SCALE and isinstance(entry.get("alpha"), (list, tuple)):
            entry["alpha"] = complex(*entry["alpha"])
        try:
            signal = transform(signal, kind, **entry)
        except (KeyError, TypeError) as e:
            raise SignalSpecError(f"invalid parameters for transform '{kind.value}'", field="transforms") from e
    return signal


def combine(signals: Sequence[Signal]) -> Signal:
    """add 변환을 연쇄 적용한 합 신호."""
    return reduce(lambda a, b: transform(a, TransformKind.ADD, other=b), signals)


# ------------------------------------------------------
# 7) 그리드 sup 노름
# ------------------------------------------------------

class NormEstimate(BaseModel):
    """그리드 최댓값과, Lipschitz 상수가 등록된 경우의 인증 상한."""

    value: float
    certified_bound: Optional[float] = None
    step: float
    tail_bound: float = 0.0


def sup_norm(signal: Signal, grid: GridLike) -> NormEstimate:
    """
    그리드 노드에서 ‖f(t)‖ 의 최댓값을 계산합니다.

    Lipschitz 상수 L 이 등록되어 있으면 certified_bound = max + L·step/2 + tail_bound 입니다.
    """
    nodes, step = resolve_nodes(grid)
    value = float(np.max(signal.norms(nodes)))
    certified = None
    if signal.lipschitz is not None:
        certified = value + signal.lipschitz * step / 2 + signal.tail_bound
    return NormEstimate(value=value, certified_bound=certified, step=step, tail_bound=signal.tail_bound)
