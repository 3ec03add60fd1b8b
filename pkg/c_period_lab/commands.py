"""
서브커맨드 핸들러

검증된 RunConfig 를 받아 해당 서비스 모듈을 호출하고
(JSON 데이터, CSV 프레임 또는 None) 을 돌려줍니다. 파일 기록은 main 에서 합니다.
"""

from typing import Any, Callable, Dict, Optional, Tuple

import numpy as np
import pandas as pd

from c_period_lab.core.config import settings
from c_period_lab.core.exceptions import PreconditionError
from c_period_lab.core.logger import get_logger
from c_period_lab.services import exporters
from c_period_lab.services.constants import SolveStatus
from c_period_lab.services.convolution import (
    convolve_halfline,
    convolve_on_grid,
    convolve_line,
    heat_solution,
    kernel_q_tail,
)
from c_period_lab.services.mean_spectrum import bohr_coefficient, mean_zero_check, spectrum_scan
from c_period_lab.services.period_scan import (
    certified_defect,
    defect_beyond,
    recurrence_defects,
    relative_density,
    scan_periods,
    semi_c_check,
    uniform_recurrence_check,
)
from c_period_lab.services.rotation_orbit import orbit_approximants
from c_period_lab.services.schemas.run_config import RunConfig
from c_period_lab.services.signal_core import Grid, Signal, UnitComplex, build_signal, builtin_catalog
from c_period_lab.services.solver import Trajectory, build_forcing, fixed_point_solve, recurrence_of_solution
from c_period_lab.services.stepanov import StepanovParams, stepanov_defect_beyond, stepanov_scan

logger = get_logger(__name__)

CommandResult = Tuple[Dict[str, Any], Optional[pd.DataFrame]]


def _signal(config: RunConfig) -> Signal:
    return build_signal(config.signal)


def _grid(config: RunConfig, signal: Signal) -> Grid:
    return config.grid or Grid.default_for(signal.domain)


def _multiplier(config: RunConfig, signal: Signal) -> UnitComplex:
    """설정의 c, 없으면 신호의 multiplier_hint."""
    c = config.c if config.c is not None else signal.multiplier_hint
    if c is None:
        raise PreconditionError(f"'c' is required: {signal.descriptor.name} has no multiplier hint", field="c")
    return c


def _period(config: RunConfig, signal: Signal) -> float:
    """설정의 tau, 없으면 신호의 period_hint."""
    tau = config.tau if config.tau is not None else signal.period_hint
    if tau is None:
        raise PreconditionError(f"'tau' is required: {signal.descriptor.name} has no period hint", field="tau")
    return tau


# ------------------------------------------------------
# 신호 / 주기
# ------------------------------------------------------

def run_signal_list(config: RunConfig) -> CommandResult:
    return {"builtins": builtin_catalog()}, None


def run_defect(config: RunConfig) -> CommandResult:
    signal = _signal(config)
    grid = _grid(config, signal)
    tau, c = _period(config, signal), _multiplier(config, signal)
    estimate = certified_defect(signal, tau, c, grid)
    data: Dict[str, Any] = {"tau": tau, "c": c.describe(), **estimate.model_dump(mode="json")}
    if config.mask_radius is not None:
        data["defect_beyond"] = defect_beyond(signal, tau, c, grid, config.mask_radius)
    return data, None


def run_scan(config: RunConfig) -> CommandResult:
    signal = _signal(config)
    report = scan_periods(signal, _multiplier(config, signal), config.epsilon, config.tau_max, config.tau_step,
                          _grid(config, signal))
    data = report.model_dump(mode="json")
    data["relative_density"] = relative_density(report).model_dump(mode="json")
    frame = exporters.curve_frame(exporters.scan_curve_rows(report.curve), ["tau", "defect"])
    return data, frame


def run_recurrence(config: RunConfig) -> CommandResult:
    signal = _signal(config)
    report = recurrence_defects(signal, _multiplier(config, signal), config.alphas, config.grid)
    data = report.model_dump(mode="json")
    data["verdict"] = uniform_recurrence_check(report, config.epsilon or settings.MEAN_TOL)
    frame = exporters.curve_frame(zip(report.alphas, report.defects), ["alpha", "defect"])
    return data, frame


def run_semi(config: RunConfig) -> CommandResult:
    signal = _signal(config)
    candidates = config.p_candidates
    if not candidates:
        candidates = [_period(config, signal)]
    result = semi_c_check(signal, _multiplier(config, signal), config.epsilon, candidates, config.m_max,
                          _grid(config, signal))
    return result.model_dump(mode="json"), None


def run_stepanov(config: RunConfig) -> CommandResult:
    signal = _signal(config)
    params = StepanovParams(p=config.p, **({"nodes_per_window": config.nodes_per_window}
                                           if config.nodes_per_window else {}))
    starts = np.asarray(config.starts, dtype=float) if config.starts else None
    c = _multiplier(config, signal)
    report = stepanov_scan(signal, c, config.epsilon, params, config.tau_max, config.tau_step, starts)
    data = report.model_dump(mode="json")
    if config.mask_radius is not None and config.tau is not None:
        window_starts = starts if starts is not None else np.arange(0.0, 2 * config.tau_max + 1.0)
        data["defect_beyond"] = stepanov_defect_beyond(signal, config.tau, c, params, window_starts,
                                                       config.mask_radius)
    frame = exporters.curve_frame(exporters.scan_curve_rows(report.curve), ["tau", "defect"])
    return data, frame


# ------------------------------------------------------
# 평균 / 스펙트럼 / 궤도
# ------------------------------------------------------

def run_spectrum(config: RunConfig) -> CommandResult:
    signal = _signal(config)
    lines = spectrum_scan(signal, config.freq_grid, config.threshold, config.horizons, config.tol)
    frame = exporters.curve_frame(((line.r, line.magnitude) for line in lines), ["r", "magnitude"])
    return {"lines": [line.model_dump(mode="json") for line in lines]}, frame


def run_mean(config: RunConfig) -> CommandResult:
    signal = _signal(config)
    estimate = bohr_coefficient(signal, config.r, config.horizons, config.tol)
    data = estimate.model_dump(mode="json")
    if config.mean_zero:
        missing = [name for name in ("c", "epsilon", "tau_max", "tau_step") if getattr(config, name) is None]
        if missing:
            raise PreconditionError(f"mean_zero requires: {', '.join(missing)}", field="mean_zero")
        scan = scan_periods(signal, config.c, config.epsilon, config.tau_max, config.tau_step,
                            _grid(config, signal))
        data["mean_zero"] = mean_zero_check(signal, config.c, scan, config.n_count).model_dump(mode="json")
    frame = exporters.curve_frame(estimate.decay_curve(), ["T", "abs_mean"])
    return data, frame


def run_orbit(config: RunConfig) -> CommandResult:
    result = orbit_approximants(config.phi, complex(*config.target), config.epsilon, config.k_count,
                                l_max=config.l_max)
    return result.model_dump(mode="json"), None


# ------------------------------------------------------
# 합성곱 / 풀이
# ------------------------------------------------------

def run_convolve(config: RunConfig) -> CommandResult:
    signal = _signal(config)
    kernel = config.kernel
    data: Dict[str, Any] = {"kernel": kernel.model_dump(mode="json")}
    frame = None
    if config.ts:
        ts = np.asarray(config.ts, dtype=float)
        if config.halfline:
            parts = [convolve_halfline(kernel, signal, float(t)) for t in ts]
            values = np.concatenate([p.values for p in parts], axis=0)
            data["halfline"] = True
        elif ts.size == 1:
            result = convolve_line(kernel, signal, float(ts[0]), config.truncation)
            values = result.values
            data.update(truncation=result.truncation, tail_bound=result.tail_bound)
        else:
            result = convolve_on_grid(kernel, signal, ts, config.truncation)
            values = result.values
            data.update(truncation=result.truncation, tail_bound=result.tail_bound)
        data["values"] = [[float(v.real), float(v.imag)] for v in values[:, 0]]
        data["ts"] = ts.tolist()
        frame = exporters.complex_frame(ts, values)
    if config.q is not None:
        data["summability"] = kernel_q_tail(kernel, config.q, config.conjugate).model_dump(mode="json")
    return data, frame


def run_heat(config: RunConfig) -> CommandResult:
    signal = _signal(config)
    result = heat_solution(signal, config.t0, config.xs, config.truncation)
    data = result.model_dump(mode="json")
    return data, exporters.complex_frame(result.ts, result.values, time_column="x")


def run_solve(config: RunConfig) -> CommandResult:
    forcing = build_forcing(config.forcing.name, config.forcing.params)
    forcing.check_lipschitz(config.grid.start, config.grid.end)
    u0 = Trajectory.constant(config.grid, complex(*config.u0))
    solution = fixed_point_solve(
        forcing, config.kernel, u0,
        tol=config.tol or 1e-8, max_iter=config.max_iter,
        allow_non_contraction=config.allow_non_contraction, truncation=config.truncation,
    )
    data: Dict[str, Any] = {
        "forcing": forcing.params,
        "iterations": solution.iterations,
        "residual": solution.residual,
        "M1": solution.m1,
        "converged": solution.status is SolveStatus.CONVERGED,
        "status": solution.status.value,
        "residual_history": solution.residual_history,
        "boundary_nodes": solution.boundary,
    }
    if config.alphas and config.c is not None:
        data["recurrence"] = recurrence_of_solution(solution, config.c, config.alphas).model_dump(mode="json")
    return data, exporters.complex_frame(solution.nodes, solution.values)


COMMANDS: Dict[str, Callable[[RunConfig], CommandResult]] = {
    "signal-list": run_signal_list,
    "defect": run_defect,
    "scan": run_scan,
    "recurrence": run_recurrence,
    "semi": run_semi,
    "stepanov": run_stepanov,
    "spectrum": run_spectrum,
    "mean": run_mean,
    "orbit": run_orbit,
    "convolve": run_convolve,
    "heat": run_heat,
    "solve": run_solve,
}


def dispatch(config: RunConfig) -> CommandResult:
    logger.info(f"▶ {config.command} 실행")
    data, frame = COMMANDS[config.command](config)
    logger.info(f"✅ {config.command} 완료")
    return data, frame
