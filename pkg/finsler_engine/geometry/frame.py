"""
標架與不變量 - Berwald 標架、餘標架、提升標架場與不變量 I, J, K 及其方向導數
"""

from dataclasses import dataclass, asdict
from functools import cached_property
from typing import Callable, Dict, List, Sequence, Union

import numpy as np

from ..engine.jet import Jet
from ..engine.scalar_field import (BundlePoint, CoordinateOneForm, CoordinateVector,
                                   derivative_along, evaluate_field, evaluate_two_form,
                                   exterior_derivative_jet)
from ..utils.logging import get_logger
from .connection import LocalGeometry, values
from .surface import FinslerSurface

logger = get_logger(__name__)

# 各量所需的最低 jet 階數
FRAME_ORDER = 3
INVARIANT_ORDER = 5
FIELD_ORDERS = {'I': 4, 'J': 5, 'K': 5}


class FrameGeometry(LocalGeometry):
    """
    在 LocalGeometry 之上建立 Berwald 標架、提升場 ê_a 與餘標架 ω^a

    標架場對纖維伸縮不變，因此求值點不必位於指標線上。
    標架索引在內部為 0, 1, 2，對外 API 使用 1, 2, 3。
    """

    @cached_property
    def m_up(self) -> List[Jet]:
        return [self.F_y[1] / self.sqrt_det_g, -self.F_y[0] / self.sqrt_det_g]

    @cached_property
    def l_up(self) -> List[Jet]:
        return [self.u[2] / self.F, self.u[3] / self.F]

    @cached_property
    def m_down(self) -> List[Jet]:
        scale = self.sqrt_det_g / self.F
        return [scale * self.u[3], -(scale * self.u[2])]

    @cached_property
    def l_down(self) -> List[Jet]:
        return list(self.F_y)

    def horizontal_lift(self, v: Sequence[Jet]) -> List[Jet]:
        """v^i δ/δx^i 的座標分量"""
        N = self.N
        return [v[0], v[1],
                -(N[0][0] * v[0] + N[0][1] * v[1]),
                -(N[1][0] * v[0] + N[1][1] * v[1])]

    @cached_property
    def ehat(self) -> List[List[Jet]]:
        zero = self.zero()
        vertical = [zero, zero, self.F * self.m_up[0], self.F * self.m_up[1]]
        return [self.horizontal_lift(self.m_up), self.horizontal_lift(self.l_up), vertical]

    @cached_property
    def omega(self) -> List[List[Jet]]:
        zero = self.zero()
        m, N, F = self.m_down, self.N, self.F
        omega3 = [(m[0] * N[0][k] + m[1] * N[1][k]) / F for k in range(2)] + [m[0] / F, m[1] / F]
        return [[m[0], m[1], zero, zero],
                [self.l_down[0], self.l_down[1], zero, zero],
                omega3]

    @cached_property
    def d_omega(self) -> List[List[List[Jet]]]:
        return [exterior_derivative_jet(form) for form in self.omega]

    def frame_derivative(self, f: Jet, a: int) -> Jet:
        """f_a = ê_a(f)，a 為 0 起算的標架索引"""
        return derivative_along(f, self.ehat[a])

    def two_form_on_frame(self, d, a: int, b: int) -> Jet:
        return evaluate_two_form(d, self.ehat[a], self.ehat[b])

    @cached_property
    def I(self) -> Jet:
        m, A = self.m_up, self.A
        total = self.zero()
        for i in range(2):
            for j in range(2):
                for k in range(2):
                    total = total + A[i][j][k] * m[i] * m[j] * m[k]
        return total

    @cached_property
    def K(self) -> Jet:
        return self.two_form_on_frame(self.d_omega[2], 0, 1)

    @cached_property
    def J(self) -> Jet:
        return -self.two_form_on_frame(self.d_omega[2], 0, 2)

    def derivatives(self, f: Jet) -> List[Jet]:
        return [self.frame_derivative(f, a) for a in range(3)]

    @cached_property
    def I_a(self) -> List[Jet]:
        return self.derivatives(self.I)

    @cached_property
    def J_a(self) -> List[Jet]:
        return self.derivatives(self.J)

    @cached_property
    def K_a(self) -> List[Jet]:
        return self.derivatives(self.K)

    def scalar(self, name: str) -> Jet:
        """以名稱取得不變量 jet"""
        if name not in FIELD_ORDERS:
            raise ValueError(f"未知的不變量名稱: {name}")
        return getattr(self, name)

    def frame(self) -> 'FrameData':
        ehat = values(self.ehat)
        omega = values(self.omega)
        return FrameData(
            m_up=values(self.m_up), l_up=values(self.l_up),
            m_down=values(self.m_down), l_down=values(self.l_down),
            ehat=tuple(CoordinateVector(tuple(row)) for row in ehat),
            omega=tuple(CoordinateOneForm(tuple(row)) for row in omega),
        )

    def invariant_set(self) -> 'InvariantSet':
        I_a, J_a, K_a = self.I_a, self.J_a, self.K_a
        return InvariantSet(
            I=self.I.value, J=self.J.value, K=self.K.value,
            I1=I_a[0].value, I2=I_a[1].value, I3=I_a[2].value,
            J1=J_a[0].value, J2=J_a[1].value, J3=J_a[2].value,
            K1=K_a[0].value, K2=K_a[1].value, K3=K_a[2].value,
            I22=self.frame_derivative(I_a[1], 1).value,
            I23=self.frame_derivative(I_a[1], 2).value,
        )


@dataclass(frozen=True)
class FrameData:
    """Berwald 標架與餘標架在一點的數值"""

    m_up: np.ndarray
    l_up: np.ndarray
    m_down: np.ndarray
    l_down: np.ndarray
    ehat: tuple
    omega: tuple

    def duality(self) -> np.ndarray:
        """ω^a(ê_b) 表"""
        return np.array([[float(np.dot(w.as_array(), e.as_array())) for e in self.ehat]
                         for w in self.omega])


@dataclass(frozen=True)
class InvariantSet:
    """不變量及其標架方向導數"""

    I: float
    J: float
    K: float
    I1: float
    I2: float
    I3: float
    J1: float
    J2: float
    J3: float
    K1: float
    K2: float
    K3: float
    I22: float
    I23: float

    @property
    def one_plus_I3(self) -> float:
        return 1.0 + self.I3

    def to_dict(self) -> Dict[str, float]:
        return asdict(self)


def berwald_frame(surface: FinslerSurface, point: BundlePoint) -> FrameData:
    """
    Berwald 標架 e₁ = m, e₂ = l，提升場 ê₁ = m^i δ_i, ê₂ = l^i δ_i, ê₃ = F m^i ∂_{y^i}
    與餘標架 ω¹, ω², ω³ = (1/F) m_j (dy^j + N^j_k dx^k)
    """
    return FrameGeometry(surface, point, FRAME_ORDER).frame()


def invariants(surface: FinslerSurface, point: BundlePoint) -> InvariantSet:
    """
    I = A(m,m,m)、K = dω³(ê₁,ê₂)、J = −dω³(ê₁,ê₃) 及其方向導數
    """
    geometry = FrameGeometry(surface, point, INVARIANT_ORDER)
    result = geometry.invariant_set()
    logger.debug(f"不變量 x={point.x}, y={point.y}: I={result.I:.6g}, J={result.J:.6g}, K={result.K:.6g}")
    return result


FieldSpec = Union[str, Callable]


def directional_derivative(surface: FinslerSurface, f: FieldSpec, point: BundlePoint, a: int) -> float:
    """
    f_a = ê_a(f)

    Args:
        surface: 曲面
        f: 不變量名稱 ('I', 'J', 'K') 或 0 次齊次的泛型純量場
        point: 求值點
        a: 標架索引 1, 2 或 3

    Returns:
        方向導數值
    """
    if a not in (1, 2, 3):
        raise ValueError(f"標架索引必須是 1, 2 或 3: {a}")
    if isinstance(f, str):
        order = FIELD_ORDERS.get(f)
        if order is None:
            raise ValueError(f"未知的不變量名稱: {f}")
        geometry = FrameGeometry(surface, point, order)
        field_jet = geometry.scalar(f)
    else:
        geometry = FrameGeometry(surface, point, 4)
        field_jet = evaluate_field(f, point, geometry.order, surface.chart)
    return geometry.frame_derivative(field_jet, a - 1).value

