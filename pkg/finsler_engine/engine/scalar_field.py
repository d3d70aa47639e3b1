"""
純量場引擎 - 在切叢 TM∖{0} 上求值純量場及其精確偏導數，並提供外微分與李括號
"""

import math
import itertools
from dataclasses import dataclass
from typing import Any, Callable, Dict, List, Sequence, Tuple

import numpy as np

from .jet import Jet, JetOrderError, N_VARS, monomials, n_terms
from ..utils.logging import get_logger

logger = get_logger(__name__)

# 泛型純量場: f(x1, x2, y1, y2)，可接受浮點數或 Jet
ScalarField = Callable[..., Any]
MultiIndex = Tuple[int, int, int, int]

# 座標名稱 (偏導數索引順序)
COORDINATES = ('x1', 'x2', 'y1', 'y2')

MAX_ORDER_X = 3
MAX_ORDER_Y = 4

# 差分後援的基準步長
DIFFERENCE_STEP = 1e-5


class EvaluationError(Exception):
    """純量場求值失敗"""
    pass


class ChartDomainError(EvaluationError):
    """求值點落在座標圖之外"""
    pass


class BundlePointError(ValueError):
    """無效的叢點"""
    pass


@dataclass(frozen=True)
class BundlePoint:
    """切叢上的點 (x, y)，y 不得為零"""

    x: Tuple[float, float]
    y: Tuple[float, float]

    def __post_init__(self):
        object.__setattr__(self, 'x', (float(self.x[0]), float(self.x[1])))
        object.__setattr__(self, 'y', (float(self.y[0]), float(self.y[1])))
        if not all(math.isfinite(v) for v in self.x + self.y):
            raise BundlePointError(f"叢點座標必須為有限值: x={self.x}, y={self.y}")
        if self.y == (0.0, 0.0):
            raise BundlePointError("纖維方向 y 不可為零向量")

    @classmethod
    def from_coords(cls, coords: Sequence[float]) -> 'BundlePoint':
        return cls((coords[0], coords[1]), (coords[2], coords[3]))

    @property
    def coords(self) -> np.ndarray:
        return np.array(self.x + self.y)

    def scaled(self, factor: float) -> 'BundlePoint':
        """纖維方向乘以 factor (正齊次性檢查用)"""
        return BundlePoint(self.x, (self.y[0] * factor, self.y[1] * factor))


def multi_index(*variables: int) -> MultiIndex:
    """
    把座標索引序列轉成多重指標，例如 multi_index(2, 2) = (0, 0, 2, 0)
    """
    alpha = [0] * N_VARS
    for k in variables:
        alpha[k] += 1
    return tuple(alpha)


@dataclass(frozen=True)
class DerivativeJet:
    """
    純量場在一點的值與偏導數表

    partials 以多重指標 (x1, x2, y1, y2) 為鍵，涵蓋 x 方向至 order_x 階、
    y 方向至 order_y 階的所有混合偏導數。
    """

    value: float
    partials: Dict[MultiIndex, float]
    order_x: int
    order_y: int

    def __getitem__(self, alpha: Sequence[int]) -> float:
        return self.partials[tuple(alpha)]

    def derivative(self, *variables: int) -> float:
        """依座標索引取偏導數，例如 derivative(0, 3) = ∂²f/∂x1∂y2"""
        return self.partials[multi_index(*variables)]


@dataclass(frozen=True)
class CoordinateVector:
    """座標標架 (∂x1, ∂x2, ∂y1, ∂y2) 下的切向量"""

    components: Tuple[float, float, float, float]

    def __post_init__(self):
        object.__setattr__(self, 'components', tuple(float(c) for c in self.components))

    def as_array(self) -> np.ndarray:
        return np.array(self.components)


@dataclass(frozen=True)
class CoordinateOneForm:
    """座標餘標架 (dx1, dx2, dy1, dy2) 下的 1-形式"""

    components: Tuple[float, float, float, float]

    def __post_init__(self):
        object.__setattr__(self, 'components', tuple(float(c) for c in self.components))

    def as_array(self) -> np.ndarray:
        return np.array(self.components)

    def __call__(self, vector: CoordinateVector) -> float:
        return pair(self, vector)


def pair(form: CoordinateOneForm, vector: CoordinateVector) -> float:
    """⟨form, vector⟩ 雙線性配對"""
    return float(sum(a * b for a, b in zip(form.components, vector.components)))


def check_chart(point: BundlePoint, chart) -> None:
    if chart is not None and not chart.contains(point.x):
        raise ChartDomainError(f"點 x={point.x} 不在座標圖 {chart.describe()} 內")


def jet_coordinates(point: BundlePoint, order: int) -> Tuple[Jet, Jet, Jet, Jet]:
    """叢點四個座標的種子 jet"""
    coords = point.x + point.y
    return tuple(Jet.variable(coords[k], k, order) for k in range(N_VARS))


def lift(value, order: int) -> Jet:
    """把常數或 jet 統一成指定階數的 jet"""
    if isinstance(value, Jet):
        return value.truncate(order)
    return Jet.constant(float(value), order)


def evaluate_field(f: ScalarField, point: BundlePoint, order: int,
                   chart=None) -> Jet:
    """
    以 jet 算術求值泛型純量場

    Args:
        f: 泛型純量場
        point: 求值點
        order: jet 總階數
        chart: 可選的座標圖，用於定義域檢查

    Returns:
        f 在 point 的 jet

    Raises:
        ChartDomainError: 點落在座標圖之外
        EvaluationError: 結果含非有限值
    """
    check_chart(point, chart)
    result = lift(f(*jet_coordinates(point, order)), order)
    if not result.is_finite():
        raise EvaluationError(f"純量場在 x={point.x}, y={point.y} 產生非有限值")
    return result


def _admissible(alpha: Sequence[int], order_x: int, order_y: int) -> bool:
    return alpha[0] + alpha[1] <= order_x and alpha[2] + alpha[3] <= order_y


def _difference_weights(order: int) -> List[Tuple[float, float]]:
    # 中心差分: 偏移 (order/2 - j) 步長，權重 (-1)^j C(order, j)
    return [(order / 2.0 - j, (-1.0) ** j * math.comb(order, j)) for j in range(order + 1)]


def _tensor_difference(f: ScalarField, origin: np.ndarray, alpha: MultiIndex,
                       steps: np.ndarray) -> float:
    stencils = [_difference_weights(a) for a in alpha]
    total = 0.0
    for combo in itertools.product(*stencils):
        shifted = origin + np.array([offset for offset, _ in combo]) * steps
        weight = math.prod(w for _, w in combo)
        total += weight * float(f(*shifted))
    return total / math.prod(h ** a for h, a in zip(steps, alpha))


def _difference_partial(f: ScalarField, origin: np.ndarray, alpha: MultiIndex) -> float:
    order = sum(alpha)
    scale = np.maximum(1.0, np.abs(origin))
    steps = DIFFERENCE_STEP * scale * 10.0 ** (order - 1)
    coarse = _tensor_difference(f, origin, alpha, steps)
    fine = _tensor_difference(f, origin, alpha, steps / 2.0)
    # 一次 Richardson 外插
    return (4.0 * fine - coarse) / 3.0


def eval_jet(f: ScalarField, point: BundlePoint, order_x: int = 2, order_y: int = 2,
             method: str = 'jet', chart=None) -> DerivativeJet:
    """
    求值純量場及其至 (order_x, order_y) 階的所有混合偏導數

    Args:
        f: 泛型純量場 f(x1, x2, y1, y2)
        point: 求值點
        order_x: x 方向最高階數 (≤ 3)
        order_y: y 方向最高階數 (≤ 4)
        method: 'jet' 為截斷多項式算術 (機器精度)，'difference' 為僅接受浮點數
            的黑箱場所用的中心差分後援 (二階以內相對誤差約 1e-6)
        chart: 可選的座標圖

    Returns:
        DerivativeJet

    Raises:
        ValueError: 階數超出支援範圍或未知方法
        ChartDomainError: 點落在座標圖之外
        EvaluationError: 非有限值
    """
    if not (0 <= order_x <= MAX_ORDER_X and 0 <= order_y <= MAX_ORDER_Y):
        raise ValueError(f"不支援的導數階數 ({order_x}, {order_y})，上限為 ({MAX_ORDER_X}, {MAX_ORDER_Y})")

    order = order_x + order_y
    wanted = [alpha for alpha in monomials()[:n_terms(order)] if _admissible(alpha, order_x, order_y)]

    if method == 'jet':
        result = evaluate_field(f, point, order, chart)
        partials = {alpha: result.partial(alpha) for alpha in wanted}
        return DerivativeJet(result.value, partials, order_x, order_y)

    if method == 'difference':
        check_chart(point, chart)
        origin = point.coords
        value = float(f(*origin))
        partials = {alpha: (value if sum(alpha) == 0 else _difference_partial(f, origin, alpha))
                    for alpha in wanted}
        if not all(math.isfinite(v) for v in partials.values()):
            raise EvaluationError(f"差分求值在 x={point.x}, y={point.y} 產生非有限值")
        logger.debug(f"以差分後援求得 {len(partials)} 個偏導數")
        return DerivativeJet(value, partials, order_x, order_y)

    raise ValueError(f"未知的求導方法: {method}")


# 外微分與李括號 (jet 層級)

def exterior_derivative_jet(components: Sequence[Jet]) -> List[List[Jet]]:
    """(dω)_ab = ∂_a ω_b − ∂_b ω_a，輸入為四個分量 jet"""
    partial = [[components[b].deriv(a) for b in range(N_VARS)] for a in range(N_VARS)]
    return [[partial[a][b] - partial[b][a] for b in range(N_VARS)] for a in range(N_VARS)]


def evaluate_two_form(d: Sequence[Sequence[Any]], X: Sequence[Any], Y: Sequence[Any]):
    """2-形式在一對向量上的值 Σ d_ab X^a Y^b"""
    total = 0.0
    for a in range(N_VARS):
        for b in range(N_VARS):
            if a != b:
                total = total + d[a][b] * X[a] * Y[b]
    return total


def pair_jet(form: Sequence[Any], vector: Sequence[Any]):
    """1-形式與向量場的逐點配對"""
    total = 0.0
    for a in range(N_VARS):
        total = total + form[a] * vector[a]
    return total


def derivative_along(f: Jet, vector: Sequence[Any]) -> Jet:
    """X(f) = X^μ ∂_μ f"""
    total = 0.0
    for mu in range(N_VARS):
        total = total + vector[mu] * f.deriv(mu)
    return total


def lie_bracket_jet(X: Sequence[Jet], Y: Sequence[Jet]) -> List[Jet]:
    """[X,Y]^a = X^b ∂_b Y^a − Y^b ∂_b X^a"""
    return [derivative_along(Y[a], X) - derivative_along(X[a], Y) for a in range(N_VARS)]


# 以座標分量函數描述的場

def _component_jets(field_components: Sequence[Any], point: BundlePoint, order: int) -> List[Jet]:
    u = jet_coordinates(point, order)
    jets = []
    for component in field_components:
        value = component(*u) if callable(component) else component
        jet = lift(value, order)
        if not jet.is_finite():
            raise EvaluationError(f"場分量在 x={point.x}, y={point.y} 產生非有限值")
        jets.append(jet)
    return jets


def exterior_derivative(omega: Sequence[Any], point: BundlePoint, chart=None) -> np.ndarray:
    """
    1-形式場的外微分

    Args:
        omega: 四個分量，每個為泛型純量場或常數
        point: 求值點
        chart: 可選的座標圖

    Returns:
        反對稱 4×4 陣列 (dω)_ab
    """
    check_chart(point, chart)
    d = exterior_derivative_jet(_component_jets(omega, point, 1))
    return np.array([[d[a][b].value for b in range(N_VARS)] for a in range(N_VARS)])


def lie_bracket(X: Sequence[Any], Y: Sequence[Any], point: BundlePoint, chart=None) -> CoordinateVector:
    """
    兩個向量場的李括號

    Args:
        X, Y: 各四個分量，每個為泛型純量場或常數
        point: 求值點
        chart: 可選的座標圖

    Returns:
        [X,Y] 的座標分量
    """
    check_chart(point, chart)
    bracket = lie_bracket_jet(_component_jets(X, point, 1), _component_jets(Y, point, 1))
    return CoordinateVector(tuple(c.value for c in bracket))


__all__ = [
    'BundlePoint', 'BundlePointError', 'ChartDomainError', 'CoordinateOneForm', 'CoordinateVector',
    'DerivativeJet', 'EvaluationError', 'JetOrderError', 'eval_jet', 'evaluate_field',
    'exterior_derivative', 'exterior_derivative_jet', 'lie_bracket', 'lie_bracket_jet',
    'multi_index', 'pair', 'pair_jet', 'evaluate_two_form', 'derivative_along',
]
