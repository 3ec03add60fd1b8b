"""
청크 병렬 실행 모듈

τ 스캔, 주파수 스캔, 출력 그리드 합성곱처럼 서로 독립인 작업 묶음을
ThreadPoolExecutor 로 실행하고, 제출 순서대로 결과를 돌려줍니다.
numpy 연산은 GIL 을 해제하므로 스레드 풀로 충분합니다.
"""

from concurrent.futures import ThreadPoolExecutor, as_completed
from typing import Callable, Iterable, List, Optional, Sequence, TypeVar

import numpy as np

from c_period_lab.core.config import settings
from c_period_lab.core.logger import get_logger

logger = get_logger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def split_chunks(values: np.ndarray, chunk_size: Optional[int] = None) -> List[np.ndarray]:
    """
    1차원 배열을 chunk_size 크기의 연속 조각으로 나눕니다.

    Args:
        values: 나눌 배열
        chunk_size: 조각 크기 (None이면 settings.CHUNK_SIZE)

    Returns:
        List[np.ndarray]: 순서가 보존된 조각 리스트 (빈 배열이면 빈 리스트)
    """
    size = max(1, int(chunk_size or settings.CHUNK_SIZE))
    values = np.asarray(values)
    return [values[i:i + size] for i in range(0, values.shape[0], size)]


def map_chunks(fn: Callable[[T], R], chunks: Sequence[T], threads: Optional[int] = None) -> List[R]:
    """
    각 조각에 fn 을 적용하고 결과를 입력 순서대로 반환합니다.

    조각이 하나뿐이거나 스레드가 1개면 풀을 만들지 않고 직접 실행합니다.
    작업 중 예외가 나면 그대로 다시 발생시킵니다.

    Args:
        fn: 조각 하나를 처리하는 함수
        chunks: 조각 시퀀스
        threads: 최대 작업자 수 (None이면 settings.THREADS)

    Returns:
        List: chunks 와 같은 순서의 결과
    """
    workers = max(1, int(threads or settings.THREADS))
    if len(chunks) <= 1 or workers == 1:
        return [fn(chunk) for chunk in chunks]

    results: List[Optional[R]] = [None] * len(chunks)
    with ThreadPoolExecutor(max_workers=min(workers, len(chunks))) as executor:
        futures = {executor.submit(fn, chunk): index for index, chunk in enumerate(chunks)}
        for future in as_completed(futures):
            index = futures[future]
            try:
                results[index] = future.result()
            except Exception:
                logger.error(f"❌ chunk {index}/{len(chunks)} 처리 실패")
                raise
    logger.debug(f"{len(chunks)} chunks 완료 (workers={workers})")
    return results  # type: ignore[return-value]


def iter_concat(parts: Iterable[np.ndarray]) -> np.ndarray:
    """조각 결과를 하나의 배열로 이어 붙입니다."""
    parts = list(parts)
    if not parts:
        return np.empty(0)
    return np.concatenate(parts)
