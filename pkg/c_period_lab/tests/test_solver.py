"""
고정점 풀이 테스트
"""

import math

import numpy as np
import pytest

from c_period_lab.core.exceptions import (
    ContractionError,
    DivergenceError,
    LabValidationError,
    SignalSpecError,
    SingularWindowError,
)
from c_period_lab.services.constants import SolveStatus
from c_period_lab.services.convolution import Kernel
from c_period_lab.services.signal_core import Grid, UnitComplex
from c_period_lab.services.solver import (
    Forcing,
    Trajectory,
    build_forcing,
    contraction_estimate,
    fixed_point_solve,
    recurrence_of_solution,
    upsilon_apply,
)


@pytest.fixture
def exp_kernel() -> Kernel:
    return Kernel.exponential(1.0)


@pytest.mark.unit
class TestForcing:
    """forcing 생성과 Lipschitz 검사"""

    def test_unknown_forcing(self):
        with pytest.raises(SignalSpecError, match="unknown forcing"):
            build_forcing("cubic")

    def test_invalid_params(self):
        with pytest.raises(SignalSpecError, match="invalid forcing params"):
            build_forcing("linear", {"slope": 1.0})

    def test_builtin_constants_hold(self):
        for name in ("zero", "harmonic", "harmonic-sine", "linear"):
            build_forcing(name).check_lipschitz()

    def test_lying_forcing_rejected(self):
        """L 을 과소 보고한 forcing 은 거부"""
        liar = Forcing(func=lambda t, u: 3.0 * u, lipschitz_L=1.0, description="liar")
        with pytest.raises(LabValidationError, match="violates"):
            liar.check_lipschitz()


@pytest.mark.unit
class TestUpsilon:
    """Υ 사상 한 번 적용"""

    def test_contraction_estimate(self, exp_kernel):
        assert contraction_estimate(0.1, exp_kernel) == pytest.approx(0.1)
        assert contraction_estimate(0.1, exp_kernel, 3) == pytest.approx(0.001)
        assert contraction_estimate(1.0, Kernel.fractional(0.5)) == pytest.approx(4.0)

    def test_harmonic(self, exp_kernel):
        """F = e^{it}: 내부 노드에서 Υu = e^{it}/(1+i)"""
        grid = Grid(start=0.0, end=30.0, step=0.001)
        out = upsilon_apply(build_forcing("harmonic"), exp_kernel, Trajectory.constant(grid))
        assert out.boundary > 0
        expected = np.exp(1j * grid.nodes[out.interior]) / (1 + 1j)
        assert np.max(np.abs(out.values[out.interior, 0] - expected)) < 1e-6

    def test_zero_forcing(self, exp_kernel):
        grid = Grid(start=0.0, end=10.0, step=0.01)
        out = upsilon_apply(build_forcing("zero"), exp_kernel, Trajectory.constant(grid, 2.0))
        assert np.all(out.values == 0)

    def test_linear_on_constant(self, exp_kernel):
        """F = u, u = κ: Υu = κ·∫_0^T R ≈ κ"""
        grid = Grid(start=0.0, end=10.0, step=0.01)
        out = upsilon_apply(build_forcing("linear", {"k": 1.0}), exp_kernel, Trajectory.constant(grid, 0.5))
        assert np.allclose(out.values, 0.5, atol=1e-6)

    def test_fractional_exponent_gate(self):
        grid = Grid(start=0.0, end=5.0, step=0.01)
        with pytest.raises(SingularWindowError):
            upsilon_apply(build_forcing("harmonic"), Kernel.fractional(0.5), Trajectory.constant(grid),
                          forcing_exponent=1.5)


@pytest.mark.unit
class TestFixedPoint:
    """축약 반복"""

    def test_not_a_contraction(self, exp_kernel):
        grid = Grid(start=0.0, end=10.0, step=0.01)
        with pytest.raises(ContractionError) as excinfo:
            fixed_point_solve(build_forcing("linear", {"k": 2.0}), exp_kernel, Trajectory.constant(grid))
        assert excinfo.value.m1 == pytest.approx(2.0)

    def test_divergence(self, exp_kernel):
        grid = Grid(start=0.0, end=10.0, step=0.01)
        with pytest.raises(DivergenceError) as excinfo:
            fixed_point_solve(build_forcing("linear", {"k": 2.0}), exp_kernel, Trajectory.constant(grid, 1.0),
                              allow_non_contraction=True)
        assert len(excinfo.value.residual_history) == 6

    def test_max_iter(self, exp_kernel):
        grid = Grid(start=0.0, end=30.0, step=0.01)
        result = fixed_point_solve(build_forcing("harmonic-sine"), exp_kernel, Trajectory.constant(grid),
                                   tol=1e-14, max_iter=2)
        assert result.status is SolveStatus.MAX_ITER
        assert result.iterations == 2


@pytest.mark.integration
class TestHarmonicSineSolution:
    """F(t,u) = e^{it} + .1 sin(Re u), R = e^{-u}: M1 = .1"""

    @pytest.fixture
    def setup(self, exp_kernel):
        grid = Grid(start=0.0, end=60.0, step=0.01)
        return grid, build_forcing("harmonic-sine"), exp_kernel

    def _random_start(self, grid: Grid, seed: int) -> Trajectory:
        rng = np.random.default_rng(seed)
        values = rng.normal(size=(grid.size, 1)) + 1j * rng.normal(size=(grid.size, 1))
        return Trajectory(grid=grid, values=values)

    def test_converges_geometrically(self, setup):
        """내부 잔차 r_k <= M1^{k-1}·sup‖Υu0 - u0‖"""
        grid, forcing, kernel = setup
        u0 = self._random_start(grid, 1)
        first = np.max(np.abs(upsilon_apply(forcing, kernel, u0).values - u0.values))
        result = fixed_point_solve(forcing, kernel, u0, tol=1e-8)
        assert result.status is SolveStatus.CONVERGED
        assert result.m1 == pytest.approx(0.1)
        for k, r in enumerate(result.residual_history):
            assert r <= 0.1 ** k * first + 1e-10

    def test_residual_ratio(self, setup):
        """영 시작점에서 반복마다 잔차가 M1 = .1 근처 비율로 줄어듦"""
        grid, forcing, kernel = setup
        result = fixed_point_solve(forcing, kernel, Trajectory.constant(grid), tol=1e-8)
        history = result.residual_history
        assert len(history) >= 3
        for previous, current in zip(history, history[1:]):
            if previous > 1e-12:
                assert current <= 0.12 * previous

    def test_independent_of_start(self, setup):
        """두 시작점의 해 차이 <= 2·tol/(1 - M1)"""
        grid, forcing, kernel = setup
        tol = 1e-8
        a = fixed_point_solve(forcing, kernel, self._random_start(grid, 1), tol=tol)
        b = fixed_point_solve(forcing, kernel, self._random_start(grid, 2), tol=tol)
        J = max(a.boundary, b.boundary)
        assert np.max(np.abs(a.values[J:] - b.values[J:])) <= 2 * tol / (1 - a.m1)

    def test_solution_is_periodic(self, setup):
        """forcing 이 2π-주기이므로 해도 α = 2πn 에서 회귀"""
        grid, forcing, kernel = setup
        solution = fixed_point_solve(forcing, kernel, Trajectory.constant(grid), tol=1e-10)
        report = recurrence_of_solution(solution, UnitComplex.one(), [2 * math.pi, 4 * math.pi])
        assert max(report.defects) <= 1e-4


@pytest.mark.unit
class TestRecurrenceOfSolution:
    """해의 회귀 결함"""

    def test_zero_trajectory(self):
        grid = Grid(start=0.0, end=10.0, step=0.01)
        report = recurrence_of_solution(Trajectory.constant(grid), 1, [1.0, 2.345])
        assert report.defects == [0.0, 0.0]

    def test_shift_beyond_grid(self):
        grid = Grid(start=0.0, end=10.0, step=0.01)
        with pytest.raises(LabValidationError, match="exceeds grid reach"):
            recurrence_of_solution(Trajectory.constant(grid), 1, [20.0])
