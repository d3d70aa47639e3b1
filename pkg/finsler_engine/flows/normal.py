"""
Finsler 法向量 - 由切向量求單位法向量，以及其逆運算
"""

from typing import List, Optional, Sequence

import numpy as np
from scipy import optimize

from ..config import settings
from ..engine.scalar_field import BundlePoint, EvaluationError
from ..geometry.connection import LocalGeometry, values
from ..geometry.frame import FrameGeometry
from ..geometry.surface import FinslerSurface
from ..utils.logging import get_logger

logger = get_logger(__name__)


class NormalSolveError(EvaluationError):
    """找不到滿足正交條件的法向量"""
    pass


def fiber_gradient(surface: FinslerSurface, x: Sequence[float], y: Sequence[float]) -> np.ndarray:
    """F_y(x, y)，0 次齊次"""
    geometry = LocalGeometry(surface, BundlePoint(tuple(x), tuple(y)), order=1)
    return values(geometry.F_y)


def _direction(theta: float) -> np.ndarray:
    return np.array([np.cos(theta), np.sin(theta)])


def _orientation(N: np.ndarray, T: np.ndarray) -> float:
    # σ 與 N²T¹ − T²N¹ 同號
    return float(N[1] * T[0] - T[1] * N[0])


def normal_vector(surface: FinslerSurface, x: Sequence[float], T: Sequence[float],
                  n_scan: Optional[int] = None, tol: Optional[float] = None) -> np.ndarray:
    """
    單位法向量 N：g_N(N,N) = 1、g_N(N,T) = 0 且 σ > 0

    以 N(θ) = (cosθ, sinθ)/F 參數化候選，h(θ) = F_y(x, N(θ))·T 與 g_N(N,T) 同號；
    先以等距掃描找出變號區間，再以 Brent 法求根到 θ 容差。

    Args:
        surface: 曲面
        x: 位置
        T: 切向量 (不必正規化)
        n_scan: 掃描點數，預設取設定 normal.n_scan
        tol: 求根容差 (θ)，預設取設定 normal.root_tol

    Returns:
        法向量 N

    Raises:
        NormalSolveError: 掃描中沒有變號或沒有 σ > 0 的根
    """
    T = np.asarray(T, dtype=float)
    if not np.any(T):
        raise ValueError("切向量 T 不可為零")
    n_scan = n_scan or settings.get('normal.n_scan', 64)
    tol = tol or settings.get('normal.root_tol', 1e-12)

    def h(theta: float) -> float:
        return float(fiber_gradient(surface, x, _direction(theta)) @ T)

    thetas = 2.0 * np.pi * np.arange(n_scan + 1) / n_scan
    scan = [h(theta) for theta in thetas[:-1]]
    scan.append(scan[0])

    roots: List[float] = []
    for k in range(n_scan):
        if scan[k] == 0.0:
            roots.append(float(thetas[k]))
        elif scan[k] * scan[k + 1] < 0.0:
            roots.append(optimize.brentq(h, float(thetas[k]), float(thetas[k + 1]), xtol=tol))

    if not roots:
        raise NormalSolveError(f"在 x={tuple(x)} 找不到 T={tuple(T)} 的法向量 (掃描無變號)")

    candidates = [surface.normalize(x, _direction(theta)) for theta in roots]
    positive = [N for N in candidates if _orientation(N, T) > 0.0]
    if not positive:
        raise NormalSolveError(f"在 x={tuple(x)} 找不到 σ > 0 的法向量")
    if len(positive) > 1:
        logger.warning(f"在 x={tuple(x)} 找到 {len(positive)} 個 σ > 0 的根，取第一個")
    return positive[0]


def tangent_from_normal(surface: FinslerSurface, x: Sequence[float], N: Sequence[float]) -> np.ndarray:
    """
    N-平行曲線的投影切向量 T = e₁(x,N)/F(x, e₁(x,N))，σ > 0

    Args:
        surface: 曲面
        x: 位置
        N: 指標線上的法向量

    Returns:
        切向量 T，F(x, T) = 1
    """
    geometry = FrameGeometry(surface, BundlePoint(tuple(x), tuple(N)), order=2)
    m = values(geometry.m_up)
    return m / surface.norm(x, m)


def initial_conditions(surface: FinslerSurface, x0: Sequence[float],
                       T0: Optional[Sequence[float]] = None,
                       N0: Optional[Sequence[float]] = None):
    """
    由 (x0, T0) 或 (x0, N0) 補出另一個方向，兩者都正規化到 F = 1

    Returns:
        (x0, T0, N0) 三個 numpy 陣列
    """
    if (T0 is None) == (N0 is None):
        raise ValueError("必須恰好提供 T0 或 N0 其中之一")
    x0 = np.asarray(x0, dtype=float)
    if T0 is not None:
        T0 = surface.normalize(x0, T0)
        N0 = normal_vector(surface, x0, T0)
    else:
        N0 = surface.normalize(x0, N0)
        T0 = tangent_from_normal(surface, x0, N0)
    return x0, T0, N0
