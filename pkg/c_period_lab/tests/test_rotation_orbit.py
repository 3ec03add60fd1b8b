"""
회전 궤도 근사 테스트
"""

import math
from itertools import islice

import numpy as np
import pytest

from c_period_lab.core.exceptions import LabValidationError, SearchBudgetError, WrongKindError
from c_period_lab.services.constants import OrbitStrategy
from c_period_lab.services.rotation_orbit import (
    certified_gap_bound,
    continued_fraction_coeffs,
    convergents,
    orbit_approximants,
    orbit_distances,
    orbit_min_distance,
    root_structure,
)
from c_period_lab.services.signal_core import UnitComplex

PHI = math.sqrt(2) - 1


def _oracle(phi: float, target: complex, epsilon: float, l_max: int) -> list:
    """직접 거듭제곱으로 계산한 허용 집합"""
    ls = np.arange(1, l_max + 1)
    distances = np.abs(np.exp(1j * math.pi * phi * ls) - target)
    return ls[distances < epsilon].tolist()


@pytest.mark.unit
class TestContinuedFraction:
    """연분수 계수와 점근분수"""

    def test_sqrt2_minus_1(self):
        assert list(islice(continued_fraction_coeffs(PHI), 5)) == [0, 2, 2, 2, 2]

    def test_rational_terminates(self):
        assert list(continued_fraction_coeffs(0.75)) == [0, 1, 3]

    def test_convergents(self):
        assert list(convergents(iter([0, 2, 2]))) == [(0, 1), (1, 2), (2, 5)]


@pytest.mark.unit
class TestOrbit:
    """궤도 근사 지수 탐색"""

    def test_distances_match_direct_powers(self):
        ls = np.arange(1, 50, dtype=float)
        direct = np.abs(np.exp(1j * math.pi * PHI * ls) + 1)
        assert np.allclose(orbit_distances(PHI, -1 + 0j, ls), direct, atol=1e-12)

    def test_matches_oracle(self):
        """φ = √2-1, 목표 -1, ε = .05 에서 전수 오라클과 일치"""
        result = orbit_approximants(PHI, -1 + 0j, 0.05, 12)
        oracle = _oracle(PHI, -1 + 0j, 0.05, result.ls[-1])
        assert result.ls == oracle
        assert result.gaps_bound == max(np.diff(oracle))
        assert result.max_distance < 0.05

    def test_l_limit_returns_all(self):
        result = orbit_approximants(PHI, -1 + 0j, 0.05, 1, l_limit=2000)
        assert result.ls == _oracle(PHI, -1 + 0j, 0.05, 2000)

    def test_certified_gap_covers_observed(self):
        result = orbit_approximants(PHI, -1 + 0j, 0.05, 12)
        assert result.certified_gap is not None
        assert result.certified_gap >= result.gaps_bound

    def test_budget_exhausted(self):
        """l_max 안에서 찾지 못하면 지금까지 찾은 것을 함께 보고"""
        with pytest.raises(SearchBudgetError, match="found") as excinfo:
            orbit_approximants(PHI, -1 + 0j, 1e-6, 3, l_max=100)
        assert excinfo.value.best_so_far == []
        assert excinfo.value.best_distance > 1e-6

    def test_invalid_epsilon(self):
        with pytest.raises(LabValidationError, match="epsilon"):
            orbit_approximants(PHI, -1 + 0j, 0.0, 3)

    def test_min_distance_decreases(self):
        assert orbit_min_distance(PHI, -1 + 0j, 1000) <= orbit_min_distance(PHI, -1 + 0j, 100)

    def test_certified_gap_trivial_epsilon(self):
        assert certified_gap_bound(PHI, 2.5, 100) == 1

    def test_convergent_path_beyond_scan_budget(self):
        """l_max = 100 안에는 근사 지수가 12개가 안 되지만 분모 q = 29 사슬로 앞 12개를 정확히 구성"""
        assert len(_oracle(PHI, -1 + 0j, 0.05, 100)) < 12
        result = orbit_approximants(PHI, -1 + 0j, 0.05, 12, l_max=100)
        assert result.strategy is OrbitStrategy.CONVERGENT
        assert result.ls[-1] > 100
        assert result.ls == _oracle(PHI, -1 + 0j, 0.05, result.ls[-1])

    def test_l_limit_uses_scan(self):
        result = orbit_approximants(PHI, -1 + 0j, 0.05, 1, l_limit=500)
        assert result.strategy is OrbitStrategy.SCAN

    def test_target_is_c_itself(self):
        """목표가 c 자신이면 l = 1 이 정확히 맞음"""
        c = complex(np.exp(1j * math.pi * PHI))
        result = orbit_approximants(PHI, c, 1e-9, 1)
        assert result.ls == [1]

    def test_golden_ratio_returns_to_one(self):
        phi = (math.sqrt(5) - 1) / 2
        result = orbit_approximants(phi, 1 + 0j, 0.01, 3)
        oracle = _oracle(phi, 1 + 0j, 0.01, result.ls[-1])
        assert result.ls == oracle
        assert result.gaps_bound == max(np.diff(oracle))


@pytest.mark.unit
class TestRootStructure:
    """유리수 편각의 위수"""

    def test_i(self):
        structure = root_structure(UnitComplex.rational(1, 2))
        assert structure.order == 4
        assert structure.q_power_sign == -1

    def test_cube_root(self):
        structure = root_structure(UnitComplex.rational(2, 3))
        assert structure.order == 3
        assert structure.q_power_sign == 1

    def test_irrational_rejected(self):
        with pytest.raises(WrongKindError):
            root_structure(UnitComplex.irrational(PHI))

    @pytest.mark.parametrize("p, q", [(1, 1), (1, 2), (2, 3), (1, 3), (3, 4), (2, 5), (5, 6)])
    def test_powers_sum_to_zero(self, p, q):
        """1 + c + ... + c^{order-1} = 0"""
        c = UnitComplex.rational(p, q)
        order = root_structure(c).order
        assert abs(sum(c.value ** n for n in range(order))) < 1e-10
        assert abs(c.value ** order - 1) < 1e-10
