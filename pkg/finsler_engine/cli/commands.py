"""
命令列指令 - invariants、verify、integrate 與 compare 四個子指令的實作
"""

import math
from dataclasses import dataclass
from typing import Callable, Dict, List, Tuple

import numpy as np
from tabulate import tabulate

from ..config import ConfigurationError, RunConfig
from ..engine.scalar_field import BundlePoint
from ..flows.base_flow import CSV_COLUMNS, Trajectory, max_distance
from ..flows.extremal_flow import n_extremal_flow
from ..flows.geodesic_flow import geodesic_flow
from ..flows.normal import initial_conditions
from ..flows.parallel_flow import n_parallel_flow
from ..geometry.connection import values
from ..geometry.fixtures import surface_from_config
from ..geometry.frame import FrameGeometry, invariants
from ..geometry.surface import FinslerSurface
from ..geometry.validation import validate_surface
from ..utils.logging import get_logger
from ..utils.parallel import parallel_map
from ..verify.identities import run_suite
from .output import to_csv, to_json

logger = get_logger(__name__)

INVARIANT_COLUMNS = ['x1', 'x2', 'y1', 'y2', 'I', 'J', 'K', 'I1', 'I2', 'I3',
                     'K1', 'K2', 'K3', 'one_plus_I3']

FLOWS = ('geodesic', 'n_parallel', 'n_extremal')


@dataclass
class CommandResult:
    """指令輸出內容與結束碼"""

    content: str
    exit_code: int = 0


def prepare_surface(config: RunConfig) -> FinslerSurface:
    """
    建立並驗證曲面

    Raises:
        ConfigurationError: 曲面定義無效或未通過驗證
    """
    surface = surface_from_config(config.surface)
    report = validate_surface(surface, seed=config.seed)
    if not report.passed:
        raise ConfigurationError(f"曲面 {surface.name} 驗證失敗: {report.summary()}")
    return surface


# invariants

def _grid_points(surface: FinslerSurface, config: RunConfig) -> List[BundlePoint]:
    grid = config.grid
    positions = surface.chart.grid(grid.n_x1, grid.n_x2, config.verify.margin, grid.x1, grid.x2)
    if not positions:
        raise ConfigurationError(f"網格沒有落在座標圖 {surface.chart.describe()} 內的點")
    points = []
    for x in positions:
        for j in range(grid.n_directions):
            theta = 2.0 * math.pi * j / grid.n_directions
            y = surface.normalize(x, (math.cos(theta), math.sin(theta)))
            points.append(BundlePoint(x, (float(y[0]), float(y[1]))))
    return points


def _invariant_row(surface: FinslerSurface, point: BundlePoint) -> List[float]:
    inv = invariants(surface, point)
    return [*point.x, *point.y, inv.I, inv.J, inv.K, inv.I1, inv.I2, inv.I3,
            inv.K1, inv.K2, inv.K3, inv.one_plus_I3]


def cmd_invariants(config: RunConfig, jobs: int = 1) -> CommandResult:
    """在網格 × 方向上輸出不變量 CSV"""
    surface = prepare_surface(config)
    points = _grid_points(surface, config)
    logger.info(f"計算 {surface.name} 在 {len(points)} 個叢點上的不變量")
    rows = parallel_map(lambda p: _invariant_row(surface, p), points, jobs)

    table = np.array(rows)
    summary = [[name, f"{table[:, k].min():.6g}", f"{table[:, k].max():.6g}"]
               for k, name in enumerate(INVARIANT_COLUMNS) if k >= 4]
    logger.info("不變量範圍:\n" + tabulate(summary, headers=["欄位", "最小值", "最大值"]))
    return CommandResult(to_csv(INVARIANT_COLUMNS, rows))


# verify

def cmd_verify(config: RunConfig, jobs: int = 1) -> CommandResult:
    """執行恆等式驗證套件並輸出 JSON；全部通過時結束碼為 0"""
    surface = prepare_surface(config)
    verify = config.verify
    report = run_suite(surface, n_points=verify.n_points, seed=config.seed, margin=verify.margin,
                       n_quad=verify.n_quad, n_mean_points=verify.n_mean_points,
                       tolerances=verify.tolerances, jobs=jobs)
    logger.info(f"{surface.name} 驗證結果:\n{report.table()}")
    return CommandResult(to_json(report.to_dict()), 0 if report.passed else 1)


# integrate / compare

def _initial_data(surface: FinslerSurface, config: RunConfig) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    initial = config.initial
    if initial is None:
        raise ConfigurationError("此指令需要 initial (x0 加上 T0 或 N0)")
    if not surface.chart.contains(initial.x0):
        raise ConfigurationError(f"初始點 x0={initial.x0} 不在座標圖 {surface.chart.describe()} 內")
    return initial_conditions(surface, initial.x0, T0=initial.T0, N0=initial.N0)


def run_flow(surface: FinslerSurface, flow: str, x0, T0, N0, config: RunConfig) -> Trajectory:
    integration = config.integration
    if flow == 'geodesic':
        return geodesic_flow(surface, x0, T0, integration.length, integration.step, integration.renormalize)
    if flow == 'n_parallel':
        return n_parallel_flow(surface, x0, N0, integration.length, integration.step,
                               integration.renormalize, integration.cross_validate)
    if flow == 'n_extremal':
        return n_extremal_flow(surface, x0, N0, integration.length, integration.step, integration.renormalize)
    raise ConfigurationError(f"未知的流: {flow}")


def _trajectory_table(trajectory: Trajectory) -> str:
    rows = [[name, f"{trajectory.max_abs(name):.3e}"]
            for name in ('k', 'k_cov', 'el_residual', 'orth_drift', 'indicatrix_drift')]
    return tabulate(rows, headers=["診斷量", "最大絕對值"])


def cmd_integrate(config: RunConfig, jobs: int = 1) -> CommandResult:
    """
    積分單一曲線並輸出 CSV

    第一行為設定回顯，最後一行為狀態；軌跡中止時結束碼為 1，已積分的部分仍輸出。
    """
    surface = prepare_surface(config)
    x0, T0, N0 = _initial_data(surface, config)
    trajectory = run_flow(surface, config.integration.flow, x0, T0, N0, config)
    logger.info(f"{trajectory.flow} 軌跡診斷:\n{_trajectory_table(trajectory)}")

    after = []
    if 'cross_validation_gap' in trajectory.params:
        after.append(f"cross_validation_gap: {trajectory.params['cross_validation_gap']:.17g}")
    after.append(f"status: {trajectory.status_line()}")
    content = to_csv(CSV_COLUMNS, (s.to_row() for s in trajectory.samples),
                     comments_before=[f"config: {config.echo()}"], comments_after=after)
    return CommandResult(content, 1 if trajectory.aborted else 0)


def lift_angle(surface: FinslerSurface, x0, N0) -> float:
    """ê₁ 與 ê₂ 在 (x0, N0) 的座標夾角 (弧度)"""
    geometry = FrameGeometry(surface, BundlePoint(tuple(x0), tuple(N0)), 3)
    e1, e2 = values(geometry.ehat[0]), values(geometry.ehat[1])
    cosine = float(e1 @ e2) / (np.linalg.norm(e1) * np.linalg.norm(e2))
    return float(np.arccos(np.clip(cosine, -1.0, 1.0)))


def cmd_compare(config: RunConfig, jobs: int = 1) -> CommandResult:
    """由相同初始資料積分三種流，輸出兩兩最大位置距離與初始提升夾角"""
    surface = prepare_surface(config)
    x0, T0, N0 = _initial_data(surface, config)
    trajectories = dict(zip(FLOWS, parallel_map(
        lambda flow: run_flow(surface, flow, x0, T0, N0, config), FLOWS, jobs)))

    distances = {}
    for i, first in enumerate(FLOWS):
        for second in FLOWS[i + 1:]:
            distances[f"{first}_vs_{second}"] = max_distance(trajectories[first], trajectories[second])

    angle = lift_angle(surface, x0, N0)
    logger.info("軌跡距離:\n" + tabulate([[k, f"{v:.3e}"] for k, v in distances.items()],
                                         headers=["比較", "最大距離"]))

    result = {
        "fixture": surface.name,
        "x0": x0, "T0": T0, "N0": N0,
        "length": config.integration.length,
        "step": config.integration.step,
        "distances": distances,
        "lift_angle": angle,
        "status": {flow: t.status for flow, t in trajectories.items()},
        "final_t": {flow: t.samples[-1].t for flow, t in trajectories.items()},
    }
    aborted = any(t.aborted for t in trajectories.values())
    return CommandResult(to_json(result), 1 if aborted else 0)


COMMANDS: Dict[str, Callable[[RunConfig, int], CommandResult]] = {
    'invariants': cmd_invariants,
    'verify': cmd_verify,
    'integrate': cmd_integrate,
    'compare': cmd_compare,
}
