"""
測地流 - 單位速率噴射方程 ẍ^i + 2G^i(x, ẋ) = 0
"""

from typing import Sequence

import numpy as np

from ..engine.scalar_field import BundlePoint
from ..geometry.connection import LocalGeometry, values
from ..geometry.surface import FinslerSurface
from .base_flow import BaseFlow, Trajectory
from .diagnostics import attach_geodesic_drift


class GeodesicFlow(BaseFlow):
    """狀態 (x, v)，fiber 欄位存放速度 ẋ"""

    name = "geodesic"

    def rhs(self, t: float, state: np.ndarray) -> np.ndarray:
        x, v = state[:2], state[2:]
        geometry = LocalGeometry(self.surface, BundlePoint(tuple(x), tuple(v)), order=2)
        G = values(geometry.G)
        return np.concatenate((v, -2.0 * G))

    def project(self, state: np.ndarray) -> np.ndarray:
        x, v = state[:2], state[2:]
        return np.concatenate((x, v / self.surface.norm(x, v)))


def geodesic_flow(surface: FinslerSurface, x0: Sequence[float], T0: Sequence[float],
                  length: float, step: float, renormalize: bool = True) -> Trajectory:
    """
    積分單位速率測地線

    Args:
        surface: 曲面
        x0: 起點
        T0: 初速，會正規化到 F(x0, T0) = 1
        length: 弧長
        step: 步長
        renormalize: 每步把速度縮放回 F = 1

    Returns:
        Trajectory，σ 與 k 欄位不填
    """
    x0 = np.asarray(x0, dtype=float)
    T0 = surface.normalize(x0, T0)
    flow = GeodesicFlow(surface, length, step, renormalize)
    trajectory = flow.integrate(np.concatenate((x0, T0)))
    attach_geodesic_drift(surface, trajectory)
    return trajectory
