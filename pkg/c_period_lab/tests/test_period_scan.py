"""
(ε,c)-주기 측정 테스트

결함, 스캔, 회귀 결함, semi-c 검사, 망원 부등식, 반직선 확장을 검증합니다.
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings as hyp_settings, strategies as st

from c_period_lab.core.exceptions import (
    EmptyMaskError,
    ExtensionError,
    LabValidationError,
    PreconditionError,
    TransferError,
    UnitCircleError,
)
from c_period_lab.services.period_scan import (
    boundedness_witness,
    c_power_periods,
    certified_defect,
    defect,
    defect_beyond,
    extend_half_line,
    power_defect_bound,
    recurrence_defects,
    relative_density,
    scan_periods,
    semi_c_check,
    transfer_periods,
    uniform_recurrence_check,
)
from c_period_lab.services.signal_core import Grid, UnitComplex, make_builtin, transform


@pytest.mark.unit
class TestDefect:
    """결함 계산 테스트"""

    def test_exact_period(self, exp1, small_grid):
        """e^{it} 의 τ = 2πk, c = 1"""
        for k in (1, 2, 5):
            assert defect(exp1, 2 * math.pi * k, 1, small_grid) <= 1e-10

    def test_exact_c_period(self, exp1, small_grid, rng):
        """e^{it} 의 τ = θ, c = e^{iθ} (무작위 θ 20개)"""
        for theta in rng.uniform(0.01, 2 * math.pi, 20):
            assert defect(exp1, theta, UnitComplex.from_angle(theta), small_grid) <= 1e-10

    def test_off_circle_rejected(self, exp1, small_grid):
        with pytest.raises(UnitCircleError, match="must equal 1"):
            defect(exp1, 1.0, 1.5, small_grid)

    def test_certified_defect(self, exp1, small_grid):
        estimate = certified_defect(exp1, 1.0, 1, small_grid)
        assert estimate.certified == pytest.approx(estimate.value + small_grid.step)

    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    def test_dugorocne_anti_period(self, n):
        """dugorocne-f, c = -1, α = 3ⁿπ: 결함 <= π/(2(n+1))"""
        signal = make_builtin("dugorocne-f", {"N": 25})
        grid = Grid(start=-50.0, end=50.0, step=0.05)
        d = defect(signal, 3 ** n * math.pi, UnitComplex.rational(1, 1), grid)
        assert d <= math.pi / (2 * (n + 1)) + 2 * signal.tail_bound + 1e-9

    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    def test_haraux_base3_period(self, n):
        """haraux-souplet 밑 3, c = 1, α = 3ⁿπ: 결함 <= π/(2(n+1))"""
        signal = make_builtin("haraux-souplet", {"base": 3, "N": 30})
        grid = Grid(start=-50.0, end=50.0, step=0.05)
        d = defect(signal, 3 ** n * math.pi, 1, grid)
        assert d <= math.pi / (2 * (n + 1)) + 2 * signal.tail_bound + 1e-9

    def test_defect_beyond_empty_mask(self, exp1, small_grid):
        with pytest.raises(EmptyMaskError, match="no grid node"):
            defect_beyond(exp1, 1.0, 1, small_grid, M=100.0)

    def test_defect_beyond(self, exp1, small_grid):
        assert defect_beyond(exp1, 2 * math.pi, 1, small_grid, M=3.0) <= 1e-10


@pytest.mark.unit
class TestScan:
    """τ 스캔 테스트"""

    def test_exponential_scan(self, exp1, small_grid):
        """|e^{iτ} - 1| <= .005 인 τ 는 2π 근처의 6.28 뿐"""
        report = scan_periods(exp1, 1, 0.005, 7.0, 0.01, small_grid)
        taus = report.accepted_taus
        assert taus == pytest.approx([6.28])
        assert all(d <= 0.005 for _, d in report.accepted)
        density = relative_density(report)
        assert density.witnessed and density.dense_with_l == report.max_gap

    def test_cosine_with_i_is_empty(self, cosine, small_grid):
        """cos t, c = i: ‖f(τ) - i f(0)‖ >= 1 이므로 ε = .5 에서 수용 없음"""
        report = scan_periods(cosine, UnitComplex.rational(1, 2), 0.5, 10.0, 0.05, small_grid)
        assert report.accepted == []
        assert report.max_gap == 10.0
        assert not relative_density(report).witnessed
        assert report.diagnostics["multiplier_admissible"] is False
        assert abs(cosine.eval(0.0)[0]) >= 1.0

    def test_kader_not_anti_periodic(self, coarse_grid):
        """g(τ) + g(0) >= -1.5 + 2.5 = 1 이므로 c = -1, ε = .5 에서 수용 없음"""
        report = scan_periods(make_builtin("kader-g"), UnitComplex.rational(1, 1), 0.5, 200 * math.pi, 0.01,
                              coarse_grid)
        assert report.accepted == []
        assert not relative_density(report).witnessed

    def test_invalid_epsilon(self, exp1, small_grid):
        with pytest.raises(LabValidationError, match="epsilon"):
            scan_periods(exp1, 1, 0.0, 7.0, 0.01, small_grid)

    def test_report_serializes_c(self, exp1, small_grid):
        report = scan_periods(exp1, UnitComplex.rational(1, 2), 1e-6, 2.0, math.pi / 8, small_grid)
        dumped = report.model_dump(mode="json")
        assert dumped["c"]["arg_kind"] == "rational"
        assert "curve" not in dumped
        assert report.accepted_taus == pytest.approx([math.pi / 2])

    def test_c_power_periods(self, exp1, small_grid):
        report = scan_periods(exp1, UnitComplex.rational(1, 2), 1e-6, 2.0, math.pi / 8, small_grid)
        (tau, d), = c_power_periods(report, 3)
        assert tau == pytest.approx(3 * math.pi / 2)
        assert defect(exp1, tau, UnitComplex.rational(1, 2).power(3), small_grid) <= 3 * d + 1e-12


@pytest.mark.unit
class TestRecurrence:
    """회귀 결함과 semi-c 검사"""

    def test_haraux_recurrence(self):
        signal = make_builtin("haraux-souplet", {"base": 3, "N": 30})
        alphas = [3 ** n * math.pi for n in range(1, 5)]
        report = recurrence_defects(signal, 1, alphas, Grid(start=-30.0, end=30.0, step=0.05))
        for n, d in enumerate(report.defects, start=1):
            assert d <= math.pi / (2 * (n + 1)) + report.slack + 1e-9
        verdict = uniform_recurrence_check(report, tol=1.0)
        assert verdict["below_tol"]

    def test_alphas_validated(self, exp1):
        with pytest.raises(LabValidationError, match="strictly increasing"):
            recurrence_defects(exp1, 1, [2.0, 1.0], np.linspace(0, 1, 5))

    def test_semi_c_cosine(self, cosine, small_grid):
        """cos(t + mπ) = (-1)^m cos t: p = π 가 모든 m 에서 통과"""
        result = semi_c_check(cosine, UnitComplex.rational(1, 1), 1e-9, [1.0, math.pi], 5, small_grid)
        assert result.found == pytest.approx(math.pi)
        assert result.m_tested == 5
        assert not result.truncated

    def test_semi_c_none(self, cosine, small_grid):
        result = semi_c_check(cosine, UnitComplex.rational(1, 1), 1e-9, [1.0, 2.0], 3, small_grid)
        assert result.found is None

    def test_semi_c_kader_with_i(self, coarse_grid):
        """kader-g 는 c = i 로 semi-c 주기를 갖지 않음: m = 1 에서 |g(p) - 2.5i| >= 2.5"""
        candidates = np.arange(0.1, 100.05, 0.1)
        result = semi_c_check(make_builtin("kader-g"), UnitComplex.rational(1, 2), 0.5, candidates, 32,
                              coarse_grid)
        assert result.found is None


@pytest.mark.unit
class TestTelescoping:
    """망원 부등식 (무작위)"""

    @hyp_settings(max_examples=200, deadline=None)
    @given(
        name=st.sampled_from(["exponential", "cosine", "kader-g", "bohr-recurrent"]),
        tau=st.floats(min_value=0.1, max_value=5.0),
        l=st.integers(min_value=1, max_value=8),
        p=st.integers(min_value=0, max_value=11),
        q=st.sampled_from([1, 2, 3, 4, 6]),
    )
    def test_power_defect_bound(self, name, tau, l, p, q):
        signal = make_builtin(name)
        if math.gcd(p, q) != 1:
            p, q = 1, 1
        c = UnitComplex.rational(p, q)
        grid = Grid(start=-5.0, end=5.0, step=0.05)
        bound = power_defect_bound(signal, c, tau, l, grid)
        assert bound.lhs <= bound.rhs_orbit + 1e-9
        if name != "bohr-recurrent":
            # 주기 <= 그리드 폭: 궤도 점마다 가장 가까운 노드까지 step/2 이내
            assert bound.lhs <= bound.rhs + 2 * l * (signal.lipschitz or 0.0) * grid.step


@pytest.mark.unit
class TestTransferAndExtension:
    """주기 이전, 반직선 확장, 유계성 증거"""

    @pytest.fixture
    def half_cosine(self):
        return transform(make_builtin("cosine"), "restrict")

    @pytest.fixture
    def anti_report(self, half_cosine):
        grid = Grid(start=0.0, end=20.0, step=0.01)
        return scan_periods(half_cosine, UnitComplex.rational(1, 1), 1e-9, 10.0, math.pi / 8, grid)

    def test_anti_periods(self, anti_report):
        assert anti_report.accepted_taus == pytest.approx([math.pi, 3 * math.pi])

    def test_extend_half_line(self, half_cosine, anti_report):
        result = extend_half_line(half_cosine, UnitComplex.rational(1, 1), 1e-9, -2.0, anti_report)
        assert result.applications == 1
        assert result.tau == pytest.approx(math.pi)
        assert result.as_array()[0] == pytest.approx(math.cos(-2.0), abs=1e-9)

    def test_extend_needs_long_period(self, half_cosine, anti_report):
        with pytest.raises(ExtensionError, match="no accepted"):
            extend_half_line(half_cosine, UnitComplex.rational(1, 1), 1e-9, -20.0, anti_report)

    def test_extend_iterated(self, half_cosine, anti_report):
        result = extend_half_line(half_cosine, UnitComplex.rational(1, 1), 1e-9, -20.0, anti_report, iterate=True)
        assert result.applications == 3
        assert result.error_bound == pytest.approx(3e-9)
        assert result.as_array()[0] == pytest.approx(math.cos(-20.0), abs=1e-8)

    def test_transfer_rejects_loose_base(self, exp1, small_grid):
        base = scan_periods(exp1, 1, 0.01, 7.0, 0.01, small_grid)
        with pytest.raises(TransferError, match="epsilon/2"):
            transfer_periods(base, 1, 1.0, 0.01)

    def test_transfer(self, exp1, small_grid):
        base = scan_periods(exp1, 1, 0.005, 7.0, 0.001, small_grid)
        c_prime = UnitComplex.from_angle(0.001)
        taus = transfer_periods(base, c_prime, 1.0, 0.01)
        for tau in taus:
            assert defect(exp1, tau, c_prime, small_grid) <= 0.01

    def test_boundedness_witness(self, exp1):
        grid = Grid(start=0.0, end=40.0, step=0.01)
        report = scan_periods(exp1, 1, 0.01, 7.0, 0.01, grid)
        witness = boundedness_witness(exp1, report, grid)
        assert witness.holds

    def test_boundedness_needs_scan(self, cosine, small_grid):
        report = scan_periods(cosine, UnitComplex.rational(1, 2), 0.5, 2.0, 0.5, small_grid)
        with pytest.raises(PreconditionError):
            boundedness_witness(cosine, report, small_grid)
