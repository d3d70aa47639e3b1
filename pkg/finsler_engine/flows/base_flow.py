"""
曲線流基類 - 定義所有積分流的共用介面與固定步長 RK4 迴圈
"""

from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import numpy as np

from ..engine.jet import JetOrderError
from ..engine.scalar_field import ChartDomainError, EvaluationError
from ..geometry.surface import FinslerSurface
from ..utils.logging import get_logger

logger = get_logger(__name__)


class TrajectoryStatus:
    """軌跡狀態類"""
    COMPLETED = "completed"          # 完整積分到指定長度
    CHART_EXIT = "chart_exit"        # 離開座標圖，軌跡被截斷
    EL_DEGENERATE = "el_degenerate"  # 1 + I₃ 接近零，Euler-Lagrange 流退化
    FAILED = "failed"                # 其他求值失敗


class DegenerateFlowError(EvaluationError):
    """Euler-Lagrange 流在 1 + I₃ ≈ 0 處退化"""

    def __init__(self, t: float, one_plus_I3: float):
        self.t = t
        self.one_plus_I3 = one_plus_I3
        super().__init__(f"EL degenerate: I₃ ≈ −1 at t={t:.17g} (1+I₃={one_plus_I3:.3e})")


NAN = float('nan')


@dataclass
class TrajectorySample:
    """
    軌跡上的一個取樣

    fiber 在指標叢流中是法向量 N，在測地流中是速度 ẋ；
    診斷欄位在 diagnostics() 之前為 NaN。
    """

    t: float
    x: np.ndarray
    fiber: np.ndarray
    T: np.ndarray = field(default_factory=lambda: np.full(2, NAN))
    sigma: float = NAN
    k: float = NAN
    k_cov: float = NAN
    B: float = NAN
    el_residual: float = NAN
    el_system_residual: float = NAN
    orth_drift: float = NAN
    indicatrix_drift: float = NAN

    def to_row(self) -> List[float]:
        """CSV 欄位順序: t,x1,x2,N1,N2,T1,T2,sigma,k,el_residual,orth_drift,indicatrix_drift"""
        return [self.t, self.x[0], self.x[1], self.fiber[0], self.fiber[1], self.T[0], self.T[1],
                self.sigma, self.k, self.el_residual, self.orth_drift, self.indicatrix_drift]


CSV_COLUMNS = ['t', 'x1', 'x2', 'N1', 'N2', 'T1', 'T2', 'sigma', 'k',
               'el_residual', 'orth_drift', 'indicatrix_drift']


class Trajectory:
    """
    積分結果：參數、取樣序列、狀態與訊息
    """

    def __init__(self, flow: str, params: Dict[str, Any],
                 samples: Optional[List[TrajectorySample]] = None,
                 status: str = TrajectoryStatus.COMPLETED, message: str = ""):
        self.flow = flow
        self.params = params
        self.samples = samples or []
        self.status = status
        self.message = message

    def __len__(self) -> int:
        return len(self.samples)

    @property
    def aborted(self) -> bool:
        return self.status != TrajectoryStatus.COMPLETED

    @property
    def times(self) -> np.ndarray:
        return np.array([s.t for s in self.samples])

    @property
    def positions(self) -> np.ndarray:
        return np.array([s.x for s in self.samples]).reshape(-1, 2)

    @property
    def fibers(self) -> np.ndarray:
        return np.array([s.fiber for s in self.samples]).reshape(-1, 2)

    @property
    def states(self) -> np.ndarray:
        return np.hstack((self.positions, self.fibers))

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(s, name) for s in self.samples], dtype=float)

    def max_abs(self, name: str) -> float:
        """某個診斷欄位的最大絕對值，忽略 NaN"""
        values = np.abs(self.column(name))
        values = values[np.isfinite(values)]
        return float(values.max()) if values.size else NAN

    def status_line(self) -> str:
        return f"{self.status}" + (f" {self.message}" if self.message else "")

    def summary(self) -> Dict[str, Any]:
        return {
            "flow": self.flow,
            "status": self.status,
            "message": self.message,
            "n_samples": len(self.samples),
            "final_t": self.samples[-1].t if self.samples else NAN,
        }


def max_distance(first: Trajectory, second: Trajectory) -> float:
    """兩條軌跡在共同取樣上的最大位置距離"""
    n = min(len(first), len(second))
    if n == 0:
        return NAN
    gap = first.positions[:n] - second.positions[:n]
    return float(np.max(np.hypot(gap[:, 0], gap[:, 1])))


class BaseFlow(ABC):
    """
    積分流基類，所有流應繼承此類

    子類別提供右端項 rhs 與投影 project；基類負責 RK4 迴圈、
    座標圖檢查與錯誤狀態記錄。
    """

    name = "flow"

    def __init__(self, surface: FinslerSurface, length: float, step: float, renormalize: bool = True):
        """
        初始化積分流

        Args:
            surface: 曲面
            length: 積分長度
            step: 步長
            renormalize: 每步是否投影回約束面
        """
        if length <= 0.0 or step <= 0.0:
            raise ValueError(f"length 與 step 必須為正: length={length}, step={step}")
        self.surface = surface
        self.length = float(length)
        self.n_steps = max(1, int(round(self.length / step)))
        self.step = self.length / self.n_steps
        self.renormalize = renormalize
        self.logger = get_logger(f"{__name__}.{self.name}")

    @abstractmethod
    def rhs(self, t: float, state: np.ndarray) -> np.ndarray:
        """
        狀態 (x1, x2, f1, f2) 的時間導數

        Raises:
            EvaluationError: 求值失敗 (含離開座標圖與退化)
        """
        pass

    def project(self, state: np.ndarray) -> np.ndarray:
        """把狀態投影回約束面，預設不變"""
        return state

    def params(self) -> Dict[str, Any]:
        return {
            "flow": self.name,
            "method": "rk4",
            "length": self.length,
            "step": self.step,
            "n_steps": self.n_steps,
            "renormalize": self.renormalize,
        }

    def rk4_step(self, t: float, state: np.ndarray, h: float) -> np.ndarray:
        k1 = self.rhs(t, state)
        k2 = self.rhs(t + 0.5 * h, state + 0.5 * h * k1)
        k3 = self.rhs(t + 0.5 * h, state + 0.5 * h * k2)
        k4 = self.rhs(t + h, state + h * k3)
        return state + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)

    def make_sample(self, t: float, state: np.ndarray) -> TrajectorySample:
        return TrajectorySample(t=t, x=state[:2].copy(), fiber=state[2:].copy())

    def integrate(self, initial_state: np.ndarray) -> Trajectory:
        """
        以固定步長 RK4 積分，失敗時截斷軌跡並記錄狀態

        Args:
            initial_state: 初始狀態 (x1, x2, f1, f2)

        Returns:
            Trajectory
        """
        state = np.asarray(initial_state, dtype=float)
        samples = [self.make_sample(0.0, state)]
        status, message = TrajectoryStatus.COMPLETED, ""
        self.logger.info(f"開始積分 {self.name} 流: x0={tuple(state[:2])}, 長度 {self.length}, 步長 {self.step:.3g}")

        for i in range(1, self.n_steps + 1):
            t = (i - 1) * self.step
            try:
                new_state = self.rk4_step(t, state, self.step)
                if self.renormalize:
                    new_state = self.project(new_state)
                if not np.all(np.isfinite(new_state)):
                    raise EvaluationError(f"t={t + self.step:.6g} 時狀態出現非有限值")
                if not self.surface.chart.contains(new_state[:2]):
                    raise ChartDomainError(f"軌跡在 t={t + self.step:.6g} 離開座標圖 {self.surface.chart.describe()}")
            except DegenerateFlowError as e:
                status, message = TrajectoryStatus.EL_DEGENERATE, str(e)
                self.logger.warning(f"{self.name} 流退化，軌跡截斷: {e}")
                break
            except ChartDomainError as e:
                status, message = TrajectoryStatus.CHART_EXIT, str(e)
                self.logger.warning(f"{self.name} 流離開座標圖，軌跡截斷: {e}")
                break
            except (EvaluationError, JetOrderError, ArithmeticError) as e:
                status, message = TrajectoryStatus.FAILED, str(e)
                self.logger.error(f"{self.name} 流在 t={t:.6g} 求值失敗: {e}")
                break

            state = new_state
            samples.append(self.make_sample(i * self.step, state))

        trajectory = Trajectory(self.name, self.params(), samples, status, message)
        self.logger.info(f"{self.name} 流結束: 狀態 {status}, {len(samples)} 個取樣")
        return trajectory
