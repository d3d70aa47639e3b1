"""
輸出格式 - 17 位有效數字的 CSV、鍵排序的 JSON 與寫出工具
"""

import csv
import io
import json
import math
import sys
from pathlib import Path
from typing import Any, Iterable, Optional, Sequence

import numpy as np

from ..utils.logging import get_logger

logger = get_logger(__name__)

FLOAT_FORMAT = '%.17g'


def format_float(value: Any) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return FLOAT_FORMAT % float(value)


def to_csv(columns: Sequence[str], rows: Iterable[Sequence[Any]],
           comments_before: Sequence[str] = (), comments_after: Sequence[str] = ()) -> str:
    """
    產生 CSV 文字

    Args:
        columns: 欄位名稱
        rows: 數值列
        comments_before: 表頭前的註解行 (不含 '# ')
        comments_after: 資料後的註解行

    Returns:
        以 '\\n' 換行的 CSV 文字
    """
    buffer = io.StringIO()
    for comment in comments_before:
        buffer.write(f"# {comment}\n")
    writer = csv.writer(buffer, lineterminator='\n')
    writer.writerow(columns)
    for row in rows:
        writer.writerow([format_float(v) for v in row])
    for comment in comments_after:
        buffer.write(f"# {comment}\n")
    return buffer.getvalue()


def _plain(value: Any) -> Any:
    """轉成 JSON 可序列化的純 Python 值；非有限浮點數輸出為 null"""
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, np.ndarray)):
        return [_plain(v) for v in value]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else None
    return value


def to_json(data: Any) -> str:
    return json.dumps(_plain(data), sort_keys=True, indent=2, ensure_ascii=False) + '\n'


def write_output(content: str, path: Optional[str] = None) -> None:
    """
    寫出結果；path 為 None 時寫到標準輸出

    Args:
        content: 文字內容
        path: 輸出檔路徑
    """
    if path is None:
        sys.stdout.write(content)
        sys.stdout.flush()
        return
    target = Path(path)
    if target.parent and not target.parent.exists():
        target.parent.mkdir(parents=True, exist_ok=True)
    with open(target, 'w', encoding='utf-8', newline='') as file:
        file.write(content)
    logger.info(f"結果已寫入 {target}")
