"""
截斷泰勒多項式模組 - 四個叢座標上的高階前向模式自動微分
"""

import math
import itertools
from functools import lru_cache
from typing import Sequence, Tuple, Union

import numpy as np

# 叢座標數量 (x1, x2, y1, y2)
N_VARS = 4
# 支援的最高總階數 (x 三階 + y 四階)
MAX_ORDER = 7

Scalar = Union[float, int, np.floating]


class JetOrderError(ValueError):
    """截斷階數不足以再取導數"""
    pass


def _degree(alpha: Tuple[int, ...]) -> int:
    return sum(alpha)


@lru_cache(maxsize=None)
def monomials() -> Tuple[Tuple[int, ...], ...]:
    """
    依總次數分級排列的所有單項式指標

    前 n_terms(m) 個元素恰好是次數不超過 m 的單項式，
    因此截斷到較低階只需切片。
    """
    table = []
    for degree in range(MAX_ORDER + 1):
        layer = [alpha for alpha in itertools.product(range(degree + 1), repeat=N_VARS)
                 if _degree(alpha) == degree]
        table.extend(sorted(layer, reverse=True))
    return tuple(table)


@lru_cache(maxsize=None)
def monomial_index():
    return {alpha: i for i, alpha in enumerate(monomials())}


@lru_cache(maxsize=None)
def n_terms(order: int) -> int:
    return math.comb(order + N_VARS, N_VARS)


@lru_cache(maxsize=None)
def _product_table(order: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    mons = monomials()[:n_terms(order)]
    index = monomial_index()
    left, right, target = [], [], []
    for i, a in enumerate(mons):
        room = order - _degree(a)
        for j, b in enumerate(mons):
            if _degree(b) > room:
                break
            left.append(i)
            right.append(j)
            target.append(index[tuple(p + q for p, q in zip(a, b))])
    return np.array(left), np.array(right), np.array(target)


@lru_cache(maxsize=None)
def _derivative_table(order: int, k: int) -> Tuple[np.ndarray, np.ndarray]:
    index = monomial_index()
    sources, factors = [], []
    for beta in monomials()[:n_terms(order - 1)]:
        raised = list(beta)
        raised[k] += 1
        sources.append(index[tuple(raised)])
        factors.append(beta[k] + 1.0)
    return np.array(sources), np.array(factors)


def _multiply(a: np.ndarray, b: np.ndarray, order: int) -> np.ndarray:
    left, right, target = _product_table(order)
    return np.bincount(target, weights=a[left] * b[right], minlength=n_terms(order))


class Jet:
    """
    四變數截斷泰勒多項式

    係數以分級單項式排列；coeffs[i] 是單項式 monomials()[i] 的泰勒係數
    (即偏導數除以多重階乘)。不同階數的 jet 運算時取較低階。
    """

    __slots__ = ('coeffs', 'order')
    # 讓 numpy 純量把運算交回 Jet 的反射運算子
    __array_ufunc__ = None

    def __init__(self, coeffs: np.ndarray, order: int):
        self.coeffs = coeffs
        self.order = order

    @classmethod
    def constant(cls, value: Scalar, order: int) -> 'Jet':
        coeffs = np.zeros(n_terms(order))
        coeffs[0] = value
        return cls(coeffs, order)

    @classmethod
    def variable(cls, value: Scalar, k: int, order: int) -> 'Jet':
        """第 k 個座標在 value 處的種子 jet"""
        coeffs = np.zeros(n_terms(order))
        coeffs[0] = value
        if order >= 1:
            unit = [0] * N_VARS
            unit[k] = 1
            coeffs[monomial_index()[tuple(unit)]] = 1.0
        return cls(coeffs, order)

    @property
    def value(self) -> float:
        return float(self.coeffs[0])

    def truncate(self, order: int) -> 'Jet':
        if order >= self.order:
            return self
        return Jet(self.coeffs[:n_terms(order)], order)

    def is_finite(self) -> bool:
        return bool(np.all(np.isfinite(self.coeffs)))

    def partial(self, alpha: Sequence[int]) -> float:
        """多重指標 alpha 的偏導數值"""
        alpha = tuple(alpha)
        if _degree(alpha) > self.order:
            raise JetOrderError(f"階數 {self.order} 的 jet 無法提供 {alpha} 偏導數")
        scale = math.prod(math.factorial(a) for a in alpha)
        return float(self.coeffs[monomial_index()[alpha]] * scale)

    def deriv(self, k: int) -> 'Jet':
        """對第 k 個座標的偏導數，階數降一"""
        if self.order == 0:
            raise JetOrderError("零階 jet 無法再取導數")
        sources, factors = _derivative_table(self.order, k)
        return Jet(self.coeffs[sources] * factors, self.order - 1)

    def _align(self, other: 'Jet') -> Tuple[np.ndarray, np.ndarray, int]:
        order = min(self.order, other.order)
        size = n_terms(order)
        return self.coeffs[:size], other.coeffs[:size], order

    # 算術運算

    def __pos__(self):
        return self

    def __neg__(self):
        return Jet(-self.coeffs, self.order)

    def __add__(self, other):
        if isinstance(other, Jet):
            a, b, order = self._align(other)
            return Jet(a + b, order)
        coeffs = self.coeffs.copy()
        coeffs[0] += other
        return Jet(coeffs, self.order)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, Jet):
            a, b, order = self._align(other)
            return Jet(a - b, order)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Jet):
            a, b, order = self._align(other)
            return Jet(_multiply(a, b, order), order)
        return Jet(self.coeffs * other, self.order)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Jet):
            return self * other.reciprocal()
        return Jet(self.coeffs / other, self.order)

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def __pow__(self, exponent):
        if isinstance(exponent, Jet):
            return exp(exponent * self.log())
        if float(exponent).is_integer() and abs(exponent) <= 16:
            return self._integer_power(int(exponent))
        return self.power(float(exponent))

    def __rpow__(self, base):
        return exp(self * np.log(base))

    def _integer_power(self, n: int) -> 'Jet':
        if n < 0:
            return self._integer_power(-n).reciprocal()
        result = Jet.constant(1.0, self.order)
        factor = self
        while n:
            if n & 1:
                result = result * factor
            n >>= 1
            if n:
                factor = factor * factor
        return result

    # 單變數函數，以泰勒展開複合

    def compose(self, series: Sequence[float]) -> 'Jet':
        """
        計算 f(self)，series[k] 為 f 在 self.value 處的 k 階導數除以 k!

        Args:
            series: 長度至少 order + 1 的泰勒係數

        Returns:
            複合後的 jet
        """
        h = self.coeffs.copy()
        h[0] = 0.0
        result = np.zeros_like(h)
        result[0] = series[self.order]
        for k in range(self.order - 1, -1, -1):
            result = _multiply(result, h, self.order)
            result[0] += series[k]
        return Jet(result, self.order)

    def reciprocal(self) -> 'Jet':
        a = self.value
        with np.errstate(divide='ignore', invalid='ignore'):
            series = [(-1.0) ** k / np.float64(a) ** (k + 1) for k in range(self.order + 1)]
        return self.compose(series)

    def power(self, p: float) -> 'Jet':
        a = np.float64(self.value)
        with np.errstate(divide='ignore', invalid='ignore'):
            series = [np.power(a, p)]
            for k in range(1, self.order + 1):
                series.append(series[-1] * (p - k + 1) / (k * a))
        return self.compose(series)

    def exp(self) -> 'Jet':
        e = np.exp(self.value)
        return self.compose([e / math.factorial(k) for k in range(self.order + 1)])

    def log(self) -> 'Jet':
        a = np.float64(self.value)
        with np.errstate(divide='ignore', invalid='ignore'):
            series = [np.log(a)] + [(-1.0) ** (k + 1) / (k * a ** k) for k in range(1, self.order + 1)]
        return self.compose(series)

    def _periodic(self, cycle: Sequence[float]) -> 'Jet':
        period = len(cycle)
        return self.compose([cycle[k % period] / math.factorial(k) for k in range(self.order + 1)])

    def sin(self) -> 'Jet':
        s, c = math.sin(self.value), math.cos(self.value)
        return self._periodic((s, c, -s, -c))

    def cos(self) -> 'Jet':
        s, c = math.sin(self.value), math.cos(self.value)
        return self._periodic((c, -s, -c, s))

    def sinh(self) -> 'Jet':
        return self._periodic((math.sinh(self.value), math.cosh(self.value)))

    def cosh(self) -> 'Jet':
        return self._periodic((math.cosh(self.value), math.sinh(self.value)))

    def __repr__(self):
        return f"Jet(value={self.value!r}, order={self.order})"


# 泛型純量函數：同一個度量定義同時適用於浮點數、陣列與 jet

def sqrt(x):
    return x.power(0.5) if isinstance(x, Jet) else np.sqrt(x)


def exp(x):
    return x.exp() if isinstance(x, Jet) else np.exp(x)


def log(x):
    return x.log() if isinstance(x, Jet) else np.log(x)


def sin(x):
    return x.sin() if isinstance(x, Jet) else np.sin(x)


def cos(x):
    return x.cos() if isinstance(x, Jet) else np.cos(x)


def tan(x):
    return x.sin() / x.cos() if isinstance(x, Jet) else np.tan(x)


def sinh(x):
    return x.sinh() if isinstance(x, Jet) else np.sinh(x)


def cosh(x):
    return x.cosh() if isinstance(x, Jet) else np.cosh(x)


def tanh(x):
    return x.sinh() / x.cosh() if isinstance(x, Jet) else np.tanh(x)


def value_of(x) -> float:
    """jet 或純量的數值"""
    return x.value if isinstance(x, Jet) else float(x)


# 表達式編譯器使用的命名空間
NAMESPACE = {
    'sqrt': sqrt,
    'exp': exp,
    'log': log,
    'sin': sin,
    'cos': cos,
    'tan': tan,
    'sinh': sinh,
    'cosh': cosh,
    'tanh': tanh,
    'pi': math.pi,
}
