"""
N-平行流 - 指標叢上 ê₁ 的積分曲線，以及下層二階方程的交叉驗證
"""

from typing import Sequence

import numpy as np

from ..engine.scalar_field import BundlePoint
from ..geometry.connection import LocalGeometry, values
from ..geometry.frame import FrameGeometry
from ..geometry.surface import FinslerSurface
from ..utils.logging import get_logger
from .base_flow import BaseFlow, Trajectory, max_distance
from .diagnostics import DiagnosticsError, diagnostics
from .normal import normal_vector

logger = get_logger(__name__)

FLOW_ORDER = 3


class IndicatrixFlow(BaseFlow):
    """狀態 z = (x, N)，每步把 N 縮放回指標線"""

    def frame(self, state: np.ndarray, order: int) -> FrameGeometry:
        return FrameGeometry(self.surface, BundlePoint(tuple(state[:2]), tuple(state[2:])), order)

    def project(self, state: np.ndarray) -> np.ndarray:
        x, N = state[:2], state[2:]
        return np.concatenate((x, N / self.surface.norm(x, N)))


class ParallelFlow(IndicatrixFlow):
    """ż = ê₁(z)，即 σ ≡ 1 參數化"""

    name = "n_parallel"

    def rhs(self, t: float, state: np.ndarray) -> np.ndarray:
        return values(self.frame(state, FLOW_ORDER).ehat[0])


class DownstairsParallelFlow(BaseFlow):
    """
    N-平行曲線在底空間的二階方程 (σ ≡ 1)：
    ẍ^i + Γ^i_jk(x, N) ẋ^j ẋ^k = 0，N 於每個階段由 normal_vector 重新求出
    """

    name = "n_parallel_downstairs"

    def rhs(self, t: float, state: np.ndarray) -> np.ndarray:
        x, v = state[:2], state[2:]
        N = normal_vector(self.surface, x, v)
        geometry = LocalGeometry(self.surface, BundlePoint(tuple(x), tuple(N)), order=3)
        gamma = values(geometry.Gamma)
        return np.concatenate((v, -np.einsum('ijk,j,k->i', gamma, v, v)))


def run_diagnostics(surface: FinslerSurface, trajectory: Trajectory) -> None:
    try:
        diagnostics(surface, trajectory)
    except DiagnosticsError as e:
        logger.warning(f"{trajectory.flow} 軌跡無法計算診斷量: {e}")


def n_parallel_flow(surface: FinslerSurface, x0: Sequence[float], N0: Sequence[float],
                    length: float, step: float, renormalize: bool = True,
                    cross_validate: bool = False) -> Trajectory:
    """
    積分 N-平行曲線

    Args:
        surface: 曲面
        x0: 起點
        N0: 初始法向量，會正規化到指標線上
        length: 參數長度
        step: 步長
        renormalize: 每步把 N 投影回指標線
        cross_validate: 同時積分下層二階方程，並把最大位置差記錄在
            params['cross_validation_gap']

    Returns:
        已附加診斷量的 Trajectory
    """
    x0 = np.asarray(x0, dtype=float)
    N0 = surface.normalize(x0, N0)
    flow = ParallelFlow(surface, length, step, renormalize)
    trajectory = flow.integrate(np.concatenate((x0, N0)))
    run_diagnostics(surface, trajectory)

    if cross_validate:
        v0 = values(FrameGeometry(surface, BundlePoint(tuple(x0), tuple(N0)), 2).m_up)
        downstairs = DownstairsParallelFlow(surface, length, step, renormalize=False)
        reference = downstairs.integrate(np.concatenate((x0, v0)))
        gap = max_distance(trajectory, reference)
        trajectory.params['cross_validation_gap'] = gap
        trajectory.params['cross_validation_status'] = reference.status
        logger.info(f"下層方程交叉驗證: 最大位置差 {gap:.3e}")

    return trajectory
