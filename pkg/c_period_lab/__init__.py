"""
c_period_lab

c-거의 주기 함수(c-almost periodic functions)를 위한 수치 실험 도구.
신호 구성, (ε,c)-주기 탐색, Stepanov 노름, Bohr-Fourier 스펙트럼,
합성곱과 분수 차 고정점 풀이를 제공합니다.
"""

__version__ = "0.1.0"
