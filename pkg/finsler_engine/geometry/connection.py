"""
Finsler 核心 - 基本張量、Cartan 張量、噴射、非線性聯絡與 Chern 聯絡
"""

from dataclasses import dataclass
from functools import cached_property
from typing import List

import numpy as np

from ..engine.jet import Jet, MAX_ORDER
from ..engine.scalar_field import (BundlePoint, EvaluationError, check_chart,
                                   jet_coordinates, lift)
from ..utils.logging import get_logger
from .surface import FinslerSurface

logger = get_logger(__name__)


class ConvexityError(EvaluationError):
    """基本張量不是正定的"""
    pass


def values(nested):
    """把巢狀 jet 結構轉成 numpy 數值陣列"""
    if isinstance(nested, Jet):
        return nested.value
    if isinstance(nested, (list, tuple)):
        return np.array([values(item) for item in nested])
    return float(nested)


@dataclass(frozen=True)
class MetricJet:
    """一點上的 g_ij、其逆、行列式與 Cartan 張量 A_ijk"""

    g: np.ndarray
    g_inv: np.ndarray
    det_g: float
    A: np.ndarray


@dataclass(frozen=True)
class ConnectionJet:
    """噴射係數 G^i、非線性聯絡 N^i_j 與 Chern 聯絡係數 Γ^i_jk"""

    G: np.ndarray
    NLC: np.ndarray
    Gamma: np.ndarray


class LocalGeometry:
    """
    以 order 階 jet 在一個叢點展開的局部幾何

    每一層量都比前一層少若干階：F 為 order 階，g 為 order-2 階，
    A、N、Γ 為 order-3 階。所有量以 cached_property 延遲計算，
    同一點上的多個檢查可共用一次展開。
    """

    def __init__(self, surface: FinslerSurface, point: BundlePoint, order: int):
        if not 1 <= order <= MAX_ORDER:
            raise ValueError(f"jet 階數必須介於 1 與 {MAX_ORDER}: {order}")
        check_chart(point, surface.chart)
        self.surface = surface
        self.point = point
        self.order = order
        self.u = jet_coordinates(point, order)

    def zero(self) -> Jet:
        return Jet.constant(0.0, self.order)

    @cached_property
    def F(self) -> Jet:
        F = lift(self.surface.F(*self.u), self.order)
        if not F.is_finite():
            raise EvaluationError(f"F 在 x={self.point.x}, y={self.point.y} 產生非有限值")
        if F.value <= 0.0:
            raise EvaluationError(f"F 在 x={self.point.x}, y={self.point.y} 不為正: {F.value}")
        return F

    @cached_property
    def E(self) -> Jet:
        return self.F * self.F

    @cached_property
    def F_y(self) -> List[Jet]:
        return [self.F.deriv(2), self.F.deriv(3)]

    @cached_property
    def E_y(self) -> List[Jet]:
        return [self.E.deriv(2), self.E.deriv(3)]

    @cached_property
    def g(self) -> List[List[Jet]]:
        g01 = 0.5 * self.E_y[0].deriv(3)
        g = [[0.5 * self.E_y[0].deriv(2), g01], [g01, 0.5 * self.E_y[1].deriv(3)]]
        eigenvalues = np.linalg.eigvalsh(values(g))
        if eigenvalues[0] <= 0.0:
            raise ConvexityError(
                f"not strongly convex at p = (x={self.point.x}, y={self.point.y}); "
                f"最小特徵值 {eigenvalues[0]:.3e}")
        return g

    @cached_property
    def det_g(self) -> Jet:
        g = self.g
        return g[0][0] * g[1][1] - g[0][1] * g[0][1]

    @cached_property
    def sqrt_det_g(self) -> Jet:
        return self.det_g ** 0.5

    @cached_property
    def g_inv(self) -> List[List[Jet]]:
        g, inv_det = self.g, self.det_g.reciprocal()
        off = -g[0][1] * inv_det
        return [[g[1][1] * inv_det, off], [off, g[0][0] * inv_det]]

    @cached_property
    def A(self) -> List[List[List[Jet]]]:
        half_F = 0.5 * self.F
        return [[[half_F * self.g[i][j].deriv(2 + k) for k in range(2)]
                 for j in range(2)] for i in range(2)]

    @cached_property
    def G(self) -> List[Jet]:
        E = self.E
        y = self.u[2:]
        # ∂²E/∂y^l∂x^k y^k − ∂E/∂x^l
        terms = [self.E_y[l].deriv(0) * y[0] + self.E_y[l].deriv(1) * y[1] - E.deriv(l)
                 for l in range(2)]
        return [0.25 * (self.g_inv[i][0] * terms[0] + self.g_inv[i][1] * terms[1])
                for i in range(2)]

    @cached_property
    def N(self) -> List[List[Jet]]:
        """N[i][j] = ∂G^i/∂y^j"""
        return [[self.G[i].deriv(2 + j) for j in range(2)] for i in range(2)]

    def delta(self, f: Jet, k: int) -> Jet:
        """水平導數 δ_k f = ∂f/∂x^k − N^s_k ∂f/∂y^s"""
        return f.deriv(k) - self.N[0][k] * f.deriv(2) - self.N[1][k] * f.deriv(3)

    @cached_property
    def Gamma(self) -> List[List[List[Jet]]]:
        """Γ[l][j][k] = ½ g^{li}(δ_k g_ij + δ_j g_ik − δ_i g_jk)"""
        dg = [[[self.delta(self.g[i][j], k) for k in range(2)] for j in range(2)] for i in range(2)]
        gamma = [[[None, None], [None, None]], [[None, None], [None, None]]]
        for l in range(2):
            for j in range(2):
                for k in range(j, 2):
                    total = self.zero()
                    for i in range(2):
                        total = total + self.g_inv[l][i] * (dg[i][j][k] + dg[i][k][j] - dg[j][k][i])
                    gamma[l][j][k] = gamma[l][k][j] = 0.5 * total
        return gamma

    def metric(self) -> MetricJet:
        return MetricJet(values(self.g), values(self.g_inv), self.det_g.value, values(self.A))

    def connection(self) -> ConnectionJet:
        return ConnectionJet(values(self.G), values(self.N), values(self.Gamma))


def metric_jet(surface: FinslerSurface, point: BundlePoint) -> MetricJet:
    """
    基本張量 g_ij = ½∂²F²/∂y^i∂y^j 與 Cartan 張量 A_ijk = (F/2)∂g_ij/∂y^k

    Raises:
        ConvexityError: g 不是正定 ("not strongly convex at p")
        ChartDomainError: 點落在座標圖之外
    """
    return LocalGeometry(surface, point, order=3).metric()


def spray_and_connections(surface: FinslerSurface, point: BundlePoint) -> ConnectionJet:
    """
    噴射 G^i、非線性聯絡 N^i_j = ∂G^i/∂y^j 與 Chern 聯絡係數 Γ^i_jk
    """
    return LocalGeometry(surface, point, order=3).connection()
