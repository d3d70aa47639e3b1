"""
N-極值流 - ż = ê₁ − (I₁/(1+I₃)) ê₃，Euler-Lagrange 方程 (I₃+1)k = I₁σ² 的 σ ≡ 1 形式
"""

from typing import Optional, Sequence

import numpy as np

from ..config import tolerance
from ..geometry.connection import values
from ..geometry.surface import FinslerSurface
from .base_flow import DegenerateFlowError, Trajectory
from .parallel_flow import IndicatrixFlow, run_diagnostics

EXTREMAL_ORDER = 4


class ExtremalFlow(IndicatrixFlow):
    """N-極值曲線的指標叢流"""

    name = "n_extremal"

    def __init__(self, surface: FinslerSurface, length: float, step: float,
                 renormalize: bool = True, tol_degenerate: Optional[float] = None):
        super().__init__(surface, length, step, renormalize)
        self.tol_degenerate = tol_degenerate if tol_degenerate is not None else tolerance('degenerate')

    def rhs(self, t: float, state: np.ndarray) -> np.ndarray:
        geometry = self.frame(state, EXTREMAL_ORDER)
        I1, I3 = geometry.I_a[0].value, geometry.I_a[2].value
        one_plus_I3 = 1.0 + I3
        if abs(one_plus_I3) <= self.tol_degenerate:
            raise DegenerateFlowError(t, one_plus_I3)
        c = I1 / one_plus_I3
        ehat = values(geometry.ehat)
        return ehat[0] - c * ehat[2]

    def params(self):
        params = super().params()
        params['tol_degenerate'] = self.tol_degenerate
        return params


def n_extremal_flow(surface: FinslerSurface, x0: Sequence[float], N0: Sequence[float],
                    length: float, step: float, renormalize: bool = True,
                    tol_degenerate: Optional[float] = None) -> Trajectory:
    """
    積分 N-極值曲線；|1 + I₃| ≤ tol_degenerate 時停止並標記 el_degenerate

    Args:
        surface: 曲面
        x0: 起點
        N0: 初始法向量，會正規化到指標線上
        length: 參數長度
        step: 步長
        renormalize: 每步把 N 投影回指標線
        tol_degenerate: 退化門檻，預設取設定 tolerances.degenerate

    Returns:
        已附加診斷量的 Trajectory
    """
    x0 = np.asarray(x0, dtype=float)
    N0 = surface.normalize(x0, N0)
    flow = ExtremalFlow(surface, length, step, renormalize, tol_degenerate)
    trajectory = flow.integrate(np.concatenate((x0, N0)))
    run_diagnostics(surface, trajectory)
    return trajectory
