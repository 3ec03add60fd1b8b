"""
Stepanov 노름 테스트
"""

import math

import numpy as np
import pytest
from pydantic import ValidationError

from c_period_lab.core.exceptions import DomainError, EmptyMaskError
from c_period_lab.services.period_scan import defect
from c_period_lab.services.signal_core import UnitComplex, make_builtin, sup_norm
from c_period_lab.services.stepanov import (
    StepanovParams,
    stepanov_defect,
    stepanov_defect_beyond,
    stepanov_norm,
    stepanov_profile,
    stepanov_scan,
)

STARTS = np.arange(-10.0, 10.0, 0.5)


@pytest.mark.unit
class TestStepanovNorm:
    """창 L^p 노름"""

    def test_params_validated(self):
        with pytest.raises(ValidationError):
            StepanovParams(p=0.5)
        with pytest.raises(ValidationError):
            StepanovParams(nodes_per_window=4)

    @pytest.mark.parametrize("p", [1.0, 2.0, 3.5])
    def test_constant(self, p):
        """상수 κ 의 창 노름은 |κ|"""
        signal = make_builtin("constant", {"kappa": 2.0})
        assert stepanov_norm(signal, StepanovParams(p=p), STARTS) == pytest.approx(2.0)

    def test_monotone_in_p(self):
        """단위 창에서 p <= q 이면 ‖f‖_{S^p} <= ‖f‖_{S^q}"""
        signal = make_builtin("kader-g")
        norms = [stepanov_norm(signal, StepanovParams(p=p), STARTS) for p in (1.0, 1.5, 2.0, 4.0)]
        assert all(a <= b + 1e-12 for a, b in zip(norms, norms[1:]))

    def test_dominated_by_sup(self):
        """Stepanov 노름 <= 같은 노드의 sup"""
        signal = make_builtin("exponential-sum", {"mus": [1.0, math.sqrt(3)]})
        params = StepanovParams(p=2.0)
        nodes = (STARTS[:, None] + params.offsets[None, :]).ravel()
        assert stepanov_norm(signal, params, STARTS) <= sup_norm(signal, nodes).value + 1e-12

    def test_profile_shape(self, cosine):
        assert stepanov_profile(cosine, StepanovParams(), STARTS).shape == STARTS.shape

    def test_half_line_domain(self):
        with pytest.raises(DomainError):
            stepanov_norm(make_builtin("exp-decay"), StepanovParams(), np.array([-2.0, 0.0]))


@pytest.mark.unit
class TestStepanovDefect:
    """lift 결함과 스캔"""

    def test_exact_period(self, exp1):
        assert stepanov_defect(exp1, 2 * math.pi, 1, StepanovParams(p=2.0), STARTS) <= 1e-10

    def test_dominated_by_sup_defect(self, cosine):
        """창 결함 <= 창 노드에서의 sup 결함 = 2|sin(τ/2)|"""
        d = stepanov_defect(cosine, 0.3, 1, StepanovParams(p=2.0), STARTS)
        assert d <= 2 * math.sin(0.15) + 1e-12

    def test_scan(self, exp1):
        report = stepanov_scan(exp1, 1, 0.05, StepanovParams(p=2.0), 7.0, 0.01)
        assert report.metric == "stepanov"
        assert report.p == 2.0
        assert np.any(np.abs(report.accepted_taus - 2 * math.pi) < 0.01)

    def test_defect_beyond_empty(self, exp1):
        with pytest.raises(EmptyMaskError):
            stepanov_defect_beyond(exp1, 1.0, 1, StepanovParams(), STARTS, M=50.0)

    def test_defect_beyond(self, exp1):
        d = stepanov_defect_beyond(exp1, 2 * math.pi, 1, StepanovParams(), STARTS, M=2.0)
        assert d <= 1e-10

    def test_anti_period(self, cosine):
        """cos(s + π) = -cos s"""
        assert stepanov_defect(cosine, math.pi, -1, StepanovParams(p=1.0), STARTS) <= 1e-6

    def test_haraux_window_bound(self):
        """haraux 밑 3, τ = 3³π: 창 L² 결함 <= sup 결함 상한 π/8"""
        signal = make_builtin("haraux-souplet", {"base": 3, "N": 25})
        d = stepanov_defect(signal, 27 * math.pi, 1, StepanovParams(p=2.0), np.arange(-30.0, 30.0, 0.5))
        assert d <= math.pi / 8 + 2 * signal.tail_bound + 1e-9

    def test_cosine_with_i_never_accepted(self, cosine):
        """창 [0, 1] 에서 ∫|cos(s+τ) - i cos s|² >= ∫_0^1 cos² s > .25"""
        report = stepanov_scan(cosine, UnitComplex.rational(1, 2), 0.5, StepanovParams(p=2.0), 100.0, 0.01,
                               starts=np.array([0.0, 1.0]))
        assert report.accepted == []

    def test_holder_monotone_in_p(self):
        """같은 창에서 p <= p' 이면 결함도 증가"""
        signal = make_builtin("kader-g")
        c = UnitComplex.rational(1, 2)
        defects = [stepanov_defect(signal, 1.3, c, StepanovParams(p=p), STARTS) for p in (1.0, 2.0, 3.0, 6.0)]
        assert all(a <= b + 1e-12 for a, b in zip(defects, defects[1:]))

    def test_window_defect_below_sup_defect(self):
        """창 결함 <= 창 노드 위 sup 결함"""
        signal = make_builtin("kader-g")
        c = UnitComplex.rational(1, 2)
        params = StepanovParams(p=3.0)
        nodes = (STARTS[:, None] + params.offsets[None, :]).ravel()
        assert stepanov_defect(signal, 0.7, c, params, STARTS) <= defect(signal, 0.7, c, nodes) + 1e-12


@pytest.mark.unit
class TestStepanovUnbounded:
    """dugorocne-f 는 Stepanov 비유계"""

    def test_late_windows_exceed_early(self):
        """t = 3⁶π/2 근처에서 sin t = 1, g(t) >= H_6 이므로 창 노름이 초기 창보다 큼"""
        signal = make_builtin("dugorocne-f", {"N": 25})
        params = StepanovParams(p=1.0)
        early = stepanov_norm(signal, params, np.arange(0.0, 20.0, 0.25))
        late = stepanov_norm(signal, params, np.arange(1140.0, 1150.0, 0.25))
        assert late > early + 0.5
