"""
軌跡診斷 - 由取樣點的數值切向量計算 σ、k、Euler-Lagrange 殘差與約束漂移
"""

from dataclasses import dataclass

import numpy as np

from ..engine.scalar_field import BundlePoint
from ..geometry.connection import values
from ..geometry.frame import FrameGeometry
from ..geometry.surface import FinslerSurface
from ..utils.logging import get_logger
from .base_flow import Trajectory

logger = get_logger(__name__)

DIAGNOSTIC_ORDER = 4

# 四階有限差分模板 (前兩點、中心、後兩點)
_FORWARD_0 = np.array([-25.0, 48.0, -36.0, 16.0, -3.0]) / 12.0
_FORWARD_1 = np.array([-3.0, -10.0, 18.0, -6.0, 1.0]) / 12.0
_CENTRAL = np.array([1.0, -8.0, 0.0, 8.0, -1.0]) / 12.0


class DiagnosticsError(ValueError):
    """軌跡不足以計算診斷量"""
    pass


def time_derivative(series: np.ndarray, h: float) -> np.ndarray:
    """
    等距取樣序列的時間導數

    五個以上取樣時使用四階模板，三到四個取樣時使用二階模板。

    Args:
        series: 形狀 (n,) 或 (n, d) 的取樣
        h: 取樣間距

    Returns:
        與輸入同形狀的導數
    """
    series = np.asarray(series, dtype=float)
    n = len(series)
    if n < 3:
        raise DiagnosticsError(f"至少需要 3 個取樣，目前只有 {n} 個")
    result = np.empty_like(series)

    if n < 5:
        result[1:-1] = (series[2:] - series[:-2]) / (2.0 * h)
        result[0] = (-3.0 * series[0] + 4.0 * series[1] - series[2]) / (2.0 * h)
        result[-1] = (3.0 * series[-1] - 4.0 * series[-2] + series[-3]) / (2.0 * h)
        return result

    for i in range(2, n - 2):
        result[i] = np.tensordot(_CENTRAL, series[i - 2:i + 3], axes=1) / h
    result[0] = np.tensordot(_FORWARD_0, series[:5], axes=1) / h
    result[1] = np.tensordot(_FORWARD_1, series[:5], axes=1) / h
    result[-1] = -np.tensordot(_FORWARD_0, series[::-1][:5], axes=1) / h
    result[-2] = -np.tensordot(_FORWARD_1, series[::-1][:5], axes=1) / h
    return result


@dataclass
class DiagnosticSeries:
    """逐取樣的診斷量"""

    sigma: np.ndarray
    k: np.ndarray
    k_cov: np.ndarray
    B: np.ndarray
    el_residual: np.ndarray
    el_system_residual: np.ndarray
    orth_drift: np.ndarray
    indicatrix_drift: np.ndarray
    T: np.ndarray

    def max_abs(self, name: str) -> float:
        return float(np.max(np.abs(getattr(self, name))))


def diagnostics(surface: FinslerSurface, trajectory: Trajectory,
                attach: bool = True) -> DiagnosticSeries:
    """
    沿指標叢上的軌跡 z = (x, N) 計算診斷量

    ż 由取樣的有限差分得到 (與積分用的右端項無關)：
    σ = ω¹(ż)、k = −σ ω³(ż)、el_residual = (I₃+1)k − I₁σ²、
    Euler-Lagrange 系統殘差 dI(ż) + ω³(ż)；
    k_cov = −g_N(D_T N, ẋ) 由 Chern 聯絡的共變導數獨立計算；
    B = σ'/σ − A_N(ẋ, ẋ, D_T N)/σ² 只作紀錄。

    Args:
        surface: 曲面
        trajectory: 等距取樣的軌跡 (fiber 為法向量 N)
        attach: 是否寫回軌跡取樣

    Returns:
        DiagnosticSeries

    Raises:
        DiagnosticsError: 取樣少於 3 個或非等距
    """
    n = len(trajectory)
    if n < 3:
        raise DiagnosticsError(f"至少需要 3 個取樣，目前只有 {n} 個")
    times = trajectory.times
    h = float(times[1] - times[0])
    if not np.allclose(np.diff(times), h, rtol=1e-9, atol=1e-12):
        raise DiagnosticsError("診斷需要等距取樣")

    states = trajectory.states
    zdot = time_derivative(states, h)

    out = {name: np.empty(n) for name in ('sigma', 'k', 'k_cov', 'el_residual', 'el_system_residual',
                                          'orth_drift', 'indicatrix_drift')}
    tangents = np.empty((n, 2))
    cartan_terms = np.empty(n)

    for s in range(n):
        x, N = states[s, :2], states[s, 2:]
        geometry = FrameGeometry(surface, BundlePoint(tuple(x), tuple(N)), DIAGNOSTIC_ORDER)
        omega = values(geometry.omega)
        velocity = zdot[s]
        xdot, Ndot = velocity[:2], velocity[2:]

        sigma = float(omega[0] @ velocity)
        w3 = float(omega[2] @ velocity)
        k = -sigma * w3
        I1, I3 = geometry.I_a[0].value, geometry.I_a[2].value
        grad_I = np.array([geometry.I.deriv(mu).value for mu in range(4)])

        g = values(geometry.g)
        gamma = values(geometry.Gamma)
        A = values(geometry.A)
        # (D_T N)^i = Ṅ^i + Γ^i_jk ẋ^j N^k
        DN = Ndot + np.einsum('ijk,j,k->i', gamma, xdot, N)

        out['sigma'][s] = sigma
        out['k'][s] = k
        out['k_cov'][s] = -float(DN @ g @ xdot)
        out['el_residual'][s] = (I3 + 1.0) * k - I1 * sigma ** 2
        out['el_system_residual'][s] = float(grad_I @ velocity) + w3
        out['orth_drift'][s] = abs(float(omega[1] @ velocity))
        out['indicatrix_drift'][s] = abs(geometry.F.value - 1.0)
        cartan_terms[s] = float(np.einsum('ijk,i,j,k->', A, xdot, xdot, DN))

        m = values(geometry.m_up)
        tangents[s] = m / surface.norm(x, m)

    sigma = out['sigma']
    B = time_derivative(sigma, h) / sigma - cartan_terms / sigma ** 2
    series = DiagnosticSeries(B=B, T=tangents, **out)

    if attach:
        for s, sample in enumerate(trajectory.samples):
            sample.T = tangents[s]
            sample.sigma = float(series.sigma[s])
            sample.k = float(series.k[s])
            sample.k_cov = float(series.k_cov[s])
            sample.B = float(series.B[s])
            sample.el_residual = float(series.el_residual[s])
            sample.el_system_residual = float(series.el_system_residual[s])
            sample.orth_drift = float(series.orth_drift[s])
            sample.indicatrix_drift = float(series.indicatrix_drift[s])

    logger.debug(f"診斷完成: max|k|={series.max_abs('k'):.3e}, "
                 f"max|el_residual|={series.max_abs('el_residual'):.3e}")
    return series


def attach_geodesic_drift(surface: FinslerSurface, trajectory: Trajectory) -> None:
    """測地流只記錄 T = ẋ 與 |F(x, ẋ) − 1|"""
    for sample in trajectory.samples:
        sample.T = sample.fiber.copy()
        sample.indicatrix_drift = abs(surface.norm(sample.x, sample.fiber) - 1.0)
