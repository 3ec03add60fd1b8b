"""
Pytest 설정 및 공통 Fixture

테스트에 필요한 공통 신호, 그리드, 난수 생성기를 제공합니다.
"""

import numpy as np
import pytest

from c_period_lab.services.signal_core import Grid, Signal, make_builtin


@pytest.fixture
def small_grid() -> Grid:
    """[-10, 10], step 0.01 (2001 노드)"""
    return Grid(start=-10.0, end=10.0, step=0.01)


@pytest.fixture
def coarse_grid() -> Grid:
    """[-5, 5], step 0.05 (201 노드) - 무작위 반복 테스트용"""
    return Grid(start=-5.0, end=5.0, step=0.05)


@pytest.fixture
def exp1() -> Signal:
    """e^{it}"""
    return make_builtin("exponential", {"mu": 1.0})


@pytest.fixture
def cosine() -> Signal:
    return make_builtin("cosine")


@pytest.fixture
def rng() -> np.random.Generator:
    """재현 가능한 난수 생성기"""
    return np.random.default_rng(20240601)
