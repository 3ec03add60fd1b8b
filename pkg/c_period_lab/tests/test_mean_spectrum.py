"""
평균 / 스펙트럼 테스트
"""

import math

import numpy as np
import pytest

from c_period_lab.core.exceptions import LabValidationError, PreconditionError, WrongKindError
from c_period_lab.services.mean_spectrum import (
    bohr_coefficient,
    cesaro_mean,
    mean_zero_check,
    running_integrals,
    spectrum_scan,
)
from c_period_lab.services.period_scan import scan_periods
from c_period_lab.services.signal_core import Grid, UnitComplex, make_builtin

HORIZONS = [100.0 * 2 ** k for k in range(6)]


@pytest.mark.unit
class TestMeans:
    """Cesàro 평균과 Bohr 계수"""

    def test_running_integral_of_constant(self):
        signal = make_builtin("constant", {"kappa": 3.0})
        integrals, peak = running_integrals(signal, [0.0], [1.0, 2.5, 7.0])
        assert np.allclose(integrals[0, :, 0], [3.0, 7.5, 21.0])
        assert peak == pytest.approx(3.0)

    def test_exponential_mean_decays(self, exp1):
        """|mean_T(e^{it})| = |e^{iT} - 1|/T <= 2/T"""
        estimate = cesaro_mean(exp1, HORIZONS, tol=1e-2)
        for T, value in estimate.decay_curve():
            assert value <= 2.0 / T + 1e-6
        assert estimate.converged
        assert abs(estimate.limit[0]) < 1e-2

    def test_bohr_coefficient_of_own_frequency(self, exp1):
        estimate = bohr_coefficient(exp1, 1.0, HORIZONS)
        assert estimate.converged
        assert estimate.limit[0] == pytest.approx(1.0, abs=1e-6)

    def test_not_converged_reported(self, exp1):
        """수렴하지 않으면 예외 대신 converged=False"""
        estimate = bohr_coefficient(exp1, 0.0, [1.0, 2.0], tol=1e-9)
        assert not estimate.converged
        assert estimate.limit is None

    def test_horizons_validated(self, exp1):
        with pytest.raises(LabValidationError, match="strictly increasing"):
            cesaro_mean(exp1, [10.0, 5.0])

    @pytest.mark.slow
    def test_haraux_mean_growth(self):
        """haraux-souplet 밑 3 의 평균은 T = 3^kπ 에서 ½(ln k - 1) - .1 을 넘음"""
        signal = make_builtin("haraux-souplet", {"base": 3, "N": 30})
        ks = list(range(8, 13))
        estimate = cesaro_mean(signal, [3 ** k * math.pi for k in ks], step=0.5)
        for k, value in zip(ks, estimate.values[:, 0]):
            assert value.real > 0.5 * (math.log(k) - 1) - 0.1


@pytest.mark.unit
class TestSpectrum:
    """스펙트럼 추정"""

    @pytest.mark.slow
    def test_kader_spectrum(self):
        """½cos 4t + 2cos 2t 의 스펙트럼은 {±2, ±4}, |P| = {1, .25}"""
        signal = make_builtin("kader-g")
        freqs = [-4.0, -3.0, -2.0, -1.0, 0.0, 1.0, 2.0, 3.0, 4.0]
        lines = spectrum_scan(signal, freqs, 0.1, horizons=[2000.0 * 2 ** k for k in range(6)], tol=1e-3)
        found = {line.r: line.magnitude for line in lines}
        assert set(found) == {-4.0, -2.0, 2.0, 4.0}
        for r, expected in ((2.0, 1.0), (-2.0, 1.0), (4.0, 0.25), (-4.0, 0.25)):
            assert found[r] == pytest.approx(expected, rel=0.05)

    def test_threshold_validated(self, exp1):
        with pytest.raises(LabValidationError, match="threshold"):
            spectrum_scan(exp1, [1.0], 0.0)


@pytest.mark.unit
class TestMeanZero:
    """c != 1 의 평균-0 검사"""

    @pytest.fixture
    def i_scan(self, exp1):
        grid = Grid(start=-10.0, end=10.0, step=0.01)
        return scan_periods(exp1, UnitComplex.rational(1, 2), 1e-9, 2.0, math.pi / 8, grid)

    def test_exponential_with_i(self, exp1, i_scan):
        result = mean_zero_check(exp1, UnitComplex.rational(1, 2), i_scan)
        assert result.passed
        assert result.tau == pytest.approx(math.pi / 2)
        assert result.order == 4
        for T, mean, _ in result.curve:
            assert mean <= 2.0 / T + 1e-4

    def test_bound_values(self, exp1, i_scan):
        """상한 = (2‖f‖∞/n + d)/|1 - c|"""
        result = mean_zero_check(exp1, UnitComplex.rational(1, 2), i_scan, n_count=8)
        assert result.sup_norm == pytest.approx(1.0, abs=1e-9)
        for n, (T, mean, bound) in enumerate(result.curve, start=1):
            assert T == pytest.approx(n * result.tau)
            assert bound == pytest.approx((2 * result.sup_norm / n + result.defect) / math.sqrt(2), rel=1e-9)
            assert mean <= bound

    def test_c_equals_one(self, exp1, i_scan):
        with pytest.raises(PreconditionError, match="c != 1"):
            mean_zero_check(exp1, UnitComplex.one(), i_scan)

    def test_irrational(self, exp1, i_scan):
        with pytest.raises(WrongKindError):
            mean_zero_check(exp1, UnitComplex.irrational(math.sqrt(2) - 1), i_scan)

    def test_empty_scan(self, cosine):
        report = scan_periods(cosine, UnitComplex.rational(1, 2), 0.5, 2.0, 0.5, np.linspace(-5, 5, 101))
        with pytest.raises(PreconditionError, match="no accepted"):
            mean_zero_check(cosine, UnitComplex.rational(1, 2), report)
