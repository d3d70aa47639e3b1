"""
平行計算工具 - 以執行緒池對逐點計算做 map，結果保持輸入順序
"""

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, TypeVar

from .logging import get_logger

logger = get_logger(__name__)

T = TypeVar('T')
R = TypeVar('R')


def parallel_map(func: Callable[[T], R], items: Iterable[T], jobs: int = 1) -> List[R]:
    """
    對 items 逐一呼叫 func

    jobs ≤ 1 時直接在目前執行緒執行；否則使用 ThreadPoolExecutor。
    任一項目拋出的例外會原樣向上傳遞。

    Args:
        func: 逐項計算函數
        items: 輸入序列
        jobs: 工作執行緒數

    Returns:
        與輸入同順序的結果列表
    """
    items = list(items)
    if jobs <= 1 or len(items) <= 1:
        return [func(item) for item in items]

    workers = min(jobs, len(items))
    logger.debug(f"以 {workers} 個執行緒處理 {len(items)} 個項目")
    with ThreadPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(func, items))
