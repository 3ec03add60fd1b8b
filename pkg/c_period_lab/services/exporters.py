"""
결과 파일 저장 모듈

JSON 보고서와 CSV 곡선을 원자적으로 기록합니다:
같은 디렉터리의 임시 파일에 쓴 뒤 os.replace 로 옮깁니다.
"""

import os
import tempfile
from pathlib import Path
from typing import Iterable, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from pydantic import BaseModel

from c_period_lab.core.logger import get_logger

logger = get_logger(__name__)

PathLike = Union[str, Path]


def atomic_write(path: PathLike, write) -> Path:
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=target.parent, prefix=f".{target.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            write(fh)
        os.replace(tmp, target)
    except Exception:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    logger.debug(f"📝 {target} 저장 완료")
    return target


def write_json(model: BaseModel, path: PathLike) -> Path:
    """pydantic 모델을 들여쓴 JSON 으로 저장합니다."""
    text = model.model_dump_json(indent=2)
    return atomic_write(path, lambda fh: fh.write(text + "\n"))


def write_frame(frame: pd.DataFrame, path: PathLike) -> Path:
    return atomic_write(path, lambda fh: frame.to_csv(fh, index=False))


def curve_frame(rows: Iterable[Sequence[float]], columns: Sequence[str]) -> pd.DataFrame:
    """(x, y, ...) 튜플 곡선을 DataFrame 으로 만듭니다."""
    return pd.DataFrame(list(rows), columns=list(columns))


def complex_frame(ts: np.ndarray, values: np.ndarray, time_column: str = "t") -> pd.DataFrame:
    """
    (n,) 시각과 (n, dim) 복소 값을 t, re, im 열로 펼칩니다.
    dim > 1 이면 re_0, im_0, re_1, ... 열을 씁니다.
    """
    values = np.asarray(values, dtype=complex).reshape(len(ts), -1)
    data = {time_column: np.asarray(ts, dtype=float)}
    if values.shape[1] == 1:
        data["re"] = values[:, 0].real
        data["im"] = values[:, 0].imag
    else:
        for d in range(values.shape[1]):
            data[f"re_{d}"] = values[:, d].real
            data[f"im_{d}"] = values[:, d].imag
    return pd.DataFrame(data)


def scan_curve_rows(curve: np.ndarray) -> Iterable[Tuple[float, float]]:
    """스캔 보고서의 (τ, defect) 배열을 행 튜플로."""
    return [(float(t), float(d)) for t, d in np.asarray(curve).reshape(-1, 2)]
