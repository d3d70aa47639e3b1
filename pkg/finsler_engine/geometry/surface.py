"""
Finsler 曲面定義 - 座標圖、度量族與封閉形式的對照解
"""

import math
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..engine import jet as jm
from ..engine.scalar_field import ScalarField


class SurfaceFamily:
    """度量族類"""
    RIEMANNIAN = "riemannian"
    RANDERS = "randers"
    MINKOWSKI = "minkowski"
    CUSTOM = "custom"


@dataclass(frozen=True)
class ChartDomain:
    """
    單一座標圖：開矩形或開圓盤
    """

    kind: str
    x1: Optional[Tuple[float, float]] = None
    x2: Optional[Tuple[float, float]] = None
    center: Tuple[float, float] = (0.0, 0.0)
    radius: Optional[float] = None

    @classmethod
    def rectangle(cls, x1: Tuple[float, float], x2: Tuple[float, float]) -> 'ChartDomain':
        return cls('rectangle', x1=tuple(x1), x2=tuple(x2))

    @classmethod
    def disk(cls, radius: float, center: Tuple[float, float] = (0.0, 0.0)) -> 'ChartDomain':
        return cls('disk', center=tuple(center), radius=float(radius))

    def contains(self, x: Sequence[float]) -> bool:
        if not (math.isfinite(x[0]) and math.isfinite(x[1])):
            return False
        if self.kind == 'rectangle':
            return self.x1[0] < x[0] < self.x1[1] and self.x2[0] < x[1] < self.x2[1]
        return math.hypot(x[0] - self.center[0], x[1] - self.center[1]) < self.radius

    def bounds(self) -> Tuple[Tuple[float, float], Tuple[float, float]]:
        if self.kind == 'rectangle':
            return self.x1, self.x2
        cx, cy = self.center
        return (cx - self.radius, cx + self.radius), (cy - self.radius, cy + self.radius)

    def shrunk(self, margin: float) -> 'ChartDomain':
        """向內縮 margin 比例的座標圖"""
        if self.kind == 'rectangle':
            def inset(lo, hi):
                pad = margin * (hi - lo)
                return (lo + pad, hi - pad)
            return ChartDomain.rectangle(inset(*self.x1), inset(*self.x2))
        return ChartDomain.disk(self.radius * (1.0 - 2.0 * margin), self.center)

    def sample(self, rng: np.random.Generator, n: int, margin: float = 0.05) -> np.ndarray:
        """
        在內縮後的座標圖中均勻取樣

        Returns:
            形狀 (n, 2) 的位置陣列
        """
        inner = self.shrunk(margin)
        if inner.kind == 'rectangle':
            lo = np.array([inner.x1[0], inner.x2[0]])
            hi = np.array([inner.x1[1], inner.x2[1]])
            return lo + (hi - lo) * rng.random((n, 2))
        r = inner.radius * np.sqrt(rng.random(n))
        phi = 2.0 * np.pi * rng.random(n)
        return np.column_stack((inner.center[0] + r * np.cos(phi), inner.center[1] + r * np.sin(phi)))

    def grid(self, n_x1: int, n_x2: int, margin: float = 0.05,
             x1: Optional[Tuple[float, float]] = None,
             x2: Optional[Tuple[float, float]] = None) -> List[Tuple[float, float]]:
        """矩形網格點，只保留座標圖內的點"""
        (b1, b2) = self.shrunk(margin).bounds()
        x1 = x1 or b1
        x2 = x2 or b2
        axis1 = np.linspace(x1[0], x1[1], n_x1) if n_x1 > 1 else np.array([0.5 * (x1[0] + x1[1])])
        axis2 = np.linspace(x2[0], x2[1], n_x2) if n_x2 > 1 else np.array([0.5 * (x2[0] + x2[1])])
        return [(float(a), float(b)) for a in axis1 for b in axis2 if self.contains((a, b))]

    def describe(self) -> str:
        if self.kind == 'rectangle':
            return f"rectangle x1∈{self.x1}, x2∈{self.x2}"
        return f"disk center={self.center}, radius={self.radius}"


@dataclass(frozen=True)
class Oracles:
    """
    封閉形式的對照解，用於交叉驗證

    metric(x, y) -> 2×2 g；christoffel(x) -> Γ[i][j][k] (黎曼情形)；
    gauss_curvature(x) -> K；geodesic(x0, T0, times) -> 位置陣列
    """

    metric: Optional[Callable] = None
    christoffel: Optional[Callable] = None
    gauss_curvature: Optional[Callable] = None
    geodesic: Optional[Callable] = None


@dataclass(frozen=True)
class FinslerSurface:
    """
    Finsler 曲面：座標圖加上泛型純量 F(x1, x2, y1, y2)

    a(x1, x2) 回傳 2×2 黎曼部分，b(x1, x2) 回傳 1-形式分量；
    兩者只對 riemannian 與 randers 族有意義。
    """

    name: str
    family: str
    chart: ChartDomain
    F: ScalarField
    a: Optional[Callable] = None
    b: Optional[Callable] = None
    params: Dict[str, Any] = field(default_factory=dict)
    oracles: Oracles = field(default_factory=Oracles)

    def norm(self, x: Sequence[float], y: Sequence[float]) -> float:
        """F(x, y) 的浮點數值"""
        return float(self.F(float(x[0]), float(x[1]), float(y[0]), float(y[1])))

    def normalize(self, x: Sequence[float], y: Sequence[float]) -> np.ndarray:
        """把 y 縮放到指標線 F(x, y) = 1 上"""
        y = np.asarray(y, dtype=float)
        return y / self.norm(x, y)

    def b_norm(self, x: Sequence[float]) -> Optional[float]:
        """b 的 a-範數 sqrt(a^{ij} b_i b_j)；非 randers 族回傳 None"""
        if self.b is None:
            return None
        a = np.array(self.a(float(x[0]), float(x[1])), dtype=float) if self.a else np.eye(2)
        b = np.array(self.b(float(x[0]), float(x[1])), dtype=float)
        return float(np.sqrt(b @ np.linalg.solve(a, b)))


def _identity_field(x1, x2):
    return ((1.0, 0.0), (0.0, 1.0))


def _quadratic_form(a, y1, y2):
    return a[0][0] * y1 * y1 + 2.0 * a[0][1] * y1 * y2 + a[1][1] * y2 * y2


def riemannian_surface(name: str, chart: ChartDomain, a: Callable,
                       oracles: Optional[Oracles] = None,
                       params: Optional[Dict[str, Any]] = None) -> FinslerSurface:
    """
    黎曼曲面 F = sqrt(a_ij y^i y^j)

    Args:
        name: 曲面名稱
        chart: 座標圖
        a: 泛型函數 a(x1, x2)，回傳對稱 2×2 巢狀序列
        oracles: 對照解
        params: 參數記錄
    """
    def F(x1, x2, y1, y2):
        return jm.sqrt(_quadratic_form(a(x1, x2), y1, y2))

    return FinslerSurface(name, SurfaceFamily.RIEMANNIAN, chart, F, a=a,
                          params=dict(params or {}), oracles=oracles or Oracles())


def randers_surface(name: str, chart: ChartDomain, b: Callable, a: Optional[Callable] = None,
                    oracles: Optional[Oracles] = None,
                    params: Optional[Dict[str, Any]] = None) -> FinslerSurface:
    """
    Randers 曲面 F = sqrt(a_ij y^i y^j) + b_i y^i

    Args:
        name: 曲面名稱
        chart: 座標圖
        b: 泛型函數 b(x1, x2)，回傳兩個分量
        a: 黎曼部分，預設為歐氏 δ
        oracles: 對照解
        params: 參數記錄
    """
    a = a or _identity_field

    def F(x1, x2, y1, y2):
        b1, b2 = b(x1, x2)
        return jm.sqrt(_quadratic_form(a(x1, x2), y1, y2)) + b1 * y1 + b2 * y2

    return FinslerSurface(name, SurfaceFamily.RANDERS, chart, F, a=a, b=b,
                          params=dict(params or {}), oracles=oracles or Oracles())


def minkowski_surface(name: str, chart: ChartDomain, norm: Callable,
                      oracles: Optional[Oracles] = None,
                      params: Optional[Dict[str, Any]] = None) -> FinslerSurface:
    """
    局部 Minkowski 曲面，F 只依賴 y

    Args:
        norm: 泛型函數 norm(y1, y2)
    """
    def F(x1, x2, y1, y2):
        return norm(y1, y2)

    return FinslerSurface(name, SurfaceFamily.MINKOWSKI, chart, F,
                          params=dict(params or {}), oracles=oracles or Oracles())


def custom_surface(name: str, chart: ChartDomain, F: ScalarField,
                   params: Optional[Dict[str, Any]] = None) -> FinslerSurface:
    """任意泛型純量 F 的曲面"""
    return FinslerSurface(name, SurfaceFamily.CUSTOM, chart, F, params=dict(params or {}))
