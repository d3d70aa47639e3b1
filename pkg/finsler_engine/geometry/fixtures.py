"""
內建曲面樣本 - 可由設定檔以名稱選用，並支援參數覆寫
"""

import math
from typing import Callable, Dict, Optional

import numpy as np

from ..config import ConfigurationError, FIELD_VARIABLES, NORM_VARIABLES, SurfaceConfig
from ..engine import jet as jm
from ..utils.expressions import compile_expression
from ..utils.logging import get_logger
from .surface import (ChartDomain, FinslerSurface, Oracles, minkowski_surface,
                      randers_surface, riemannian_surface)

logger = get_logger(__name__)


def _zero_christoffel(x):
    return np.zeros((2, 2, 2))


def _randers_metric_oracle(b_field: Callable) -> Callable:
    """
    a = δ 的 Randers 基本張量封閉解
    g_ij = (F/α)(δ_ij − y_i y_j/α²) + F_{y_i} F_{y_j}
    """
    def metric(x, y):
        y = np.asarray(y, dtype=float)
        b = np.asarray(b_field(float(x[0]), float(x[1])), dtype=float)
        alpha = float(np.hypot(y[0], y[1]))
        F = alpha + float(b @ y)
        F_y = y / alpha + b
        return (F / alpha) * (np.eye(2) - np.outer(y, y) / alpha ** 2) + np.outer(F_y, F_y)
    return metric


def euclidean() -> FinslerSurface:
    """歐氏平面 F = |y|"""
    return riemannian_surface(
        'euclidean', ChartDomain.rectangle((-5.0, 5.0), (-5.0, 5.0)),
        lambda x1, x2: ((1.0, 0.0), (0.0, 1.0)),
        oracles=Oracles(
            metric=lambda x, y: np.eye(2),
            christoffel=_zero_christoffel,
            gauss_curvature=lambda x: 0.0,
            geodesic=lambda x0, T0, t: np.asarray(x0) + np.outer(t, T0),
        ))


def _sphere_christoffel(x):
    s, c = math.sin(x[0]), math.cos(x[0])
    gamma = np.zeros((2, 2, 2))
    gamma[0][1][1] = -s * c
    gamma[1][0][1] = gamma[1][1][0] = c / s
    return gamma


def great_circle(x0, T0, t) -> np.ndarray:
    """
    單位球面在極座標 (x1 = 極角, x2 = 經度) 下的大圓

    Args:
        x0: 起點
        T0: 單位初速 (F(x0, T0) = 1)
        t: 弧長參數陣列

    Returns:
        形狀 (len(t), 2) 的位置
    """
    t = np.asarray(t, dtype=float)
    th, ph = x0
    p0 = np.array([math.sin(th) * math.cos(ph), math.sin(th) * math.sin(ph), math.cos(th)])
    d_th = np.array([math.cos(th) * math.cos(ph), math.cos(th) * math.sin(ph), -math.sin(th)])
    d_ph = np.array([-math.sin(th) * math.sin(ph), math.sin(th) * math.cos(ph), 0.0])
    v0 = T0[0] * d_th + T0[1] * d_ph
    p = np.outer(np.cos(t), p0) + np.outer(np.sin(t), v0)
    theta = np.arccos(np.clip(p[:, 2], -1.0, 1.0))
    phi = np.unwrap(np.arctan2(p[:, 1], p[:, 0]))
    phi += ph - phi[0]
    return np.column_stack((theta, phi))


def sphere() -> FinslerSurface:
    """單位球面，a = diag(1, sin²x1)，座標圖避開兩極"""
    return riemannian_surface(
        'sphere', ChartDomain.rectangle((0.2, math.pi - 0.2), (-7.0, 7.0)),
        lambda x1, x2: ((1.0, 0.0), (0.0, jm.sin(x1) ** 2)),
        oracles=Oracles(
            metric=lambda x, y: np.diag([1.0, math.sin(x[0]) ** 2]),
            christoffel=_sphere_christoffel,
            gauss_curvature=lambda x: 1.0,
            geodesic=great_circle,
        ))


def _poincare_christoffel(x):
    r2 = x[0] ** 2 + x[1] ** 2
    dphi = 2.0 * np.asarray(x, dtype=float) / (1.0 - r2)
    gamma = np.zeros((2, 2, 2))
    delta = np.eye(2)
    for i in range(2):
        for j in range(2):
            for k in range(2):
                gamma[i][j][k] = delta[i][j] * dphi[k] + delta[i][k] * dphi[j] - delta[j][k] * dphi[i]
    return gamma


def poincare_disk() -> FinslerSurface:
    """Poincaré 圓盤 a = 4/(1−r²)² δ，K = −1"""
    def a(x1, x2):
        factor = 4.0 / (1.0 - x1 * x1 - x2 * x2) ** 2
        return ((factor, 0.0), (0.0, factor))

    return riemannian_surface(
        'poincare_disk', ChartDomain.disk(0.9), a,
        oracles=Oracles(
            metric=lambda x, y: 4.0 / (1.0 - x[0] ** 2 - x[1] ** 2) ** 2 * np.eye(2),
            christoffel=_poincare_christoffel,
            gauss_curvature=lambda x: -1.0,
        ))


def randers_minkowski(b1: float = 0.3, b2: float = 0.0) -> FinslerSurface:
    """a = δ、b 為常數的 Randers 範數 (局部 Minkowski)"""
    b = lambda x1, x2: (b1, b2)
    return randers_surface(
        'randers_minkowski', ChartDomain.rectangle((-5.0, 5.0), (-5.0, 5.0)), b,
        oracles=Oracles(
            metric=_randers_metric_oracle(b),
            christoffel=_zero_christoffel,
            gauss_curvature=lambda x: 0.0,
            geodesic=lambda x0, T0, t: np.asarray(x0) + np.outer(t, T0),
        ),
        params={'b1': b1, 'b2': b2})


def randers_nonberwald(eps: float = 0.2) -> FinslerSurface:
    """a = δ、b = (eps·x2, 0) 的非 Berwald Randers 曲面"""
    b = lambda x1, x2: (eps * x2, 0.0)
    return randers_surface(
        'randers_nonberwald', ChartDomain.rectangle((-2.0, 2.0), (-1.0, 1.0)), b,
        oracles=Oracles(metric=_randers_metric_oracle(b)),
        params={'eps': eps})


# 樣本登錄表
FIXTURES: Dict[str, Callable[..., FinslerSurface]] = {
    'euclidean': euclidean,
    'sphere': sphere,
    'poincare_disk': poincare_disk,
    'randers_minkowski': randers_minkowski,
    'randers_nonberwald': randers_nonberwald,
}


def build_fixture(name: str, params: Optional[Dict[str, float]] = None) -> FinslerSurface:
    """
    以名稱建立樣本曲面

    Raises:
        ConfigurationError: 未知樣本或不支援的參數
    """
    factory = FIXTURES.get(name)
    if factory is None:
        raise ConfigurationError(f"未知的曲面樣本: {name} (可用: {', '.join(sorted(FIXTURES))})")
    try:
        return factory(**(params or {}))
    except TypeError as e:
        raise ConfigurationError(f"樣本 {name} 不接受參數 {sorted(params or {})}: {e}")


def _chart_from_config(chart) -> ChartDomain:
    if chart.kind == 'rectangle':
        return ChartDomain.rectangle(chart.x1, chart.x2)
    return ChartDomain.disk(chart.radius, chart.center)


def _matrix_field(entries):
    compiled = [[compile_expression(e, FIELD_VARIABLES) for e in row] for row in entries]

    def a(x1, x2):
        return tuple(tuple(f(x1, x2) for f in row) for row in compiled)
    return a


def _vector_field(entries):
    compiled = [compile_expression(e, FIELD_VARIABLES) for e in entries]

    def b(x1, x2):
        return tuple(f(x1, x2) for f in compiled)
    return b


def surface_from_config(config: SurfaceConfig) -> FinslerSurface:
    """
    依設定建立曲面：內建樣本或自訂族

    Raises:
        ConfigurationError: 樣本或表達式無效
    """
    if config.fixture is not None:
        surface = build_fixture(config.fixture, config.params)
        logger.info(f"使用內建曲面樣本 {surface.name} 參數 {surface.params}")
        return surface

    name = config.label
    chart = _chart_from_config(config.chart)
    try:
        if config.family == 'riemannian':
            surface = riemannian_surface(name, chart, _matrix_field(config.a))
        elif config.family == 'randers':
            a = _matrix_field(config.a) if config.a is not None else None
            surface = randers_surface(name, chart, _vector_field(config.b), a=a)
        else:
            surface = minkowski_surface(name, chart, compile_expression(config.norm, NORM_VARIABLES))
    except ValueError as e:
        raise ConfigurationError(f"自訂曲面 {name} 的表達式無效: {e}")
    logger.info(f"建立自訂 {config.family} 曲面 {name}，座標圖 {chart.describe()}")
    return surface
