"""
恆等式驗證 - 結構方程、Bianchi 與 Ricci 恆等式、標架括號、指標線上 I 的平均值與非退化檢查
"""

import math
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence, Union

import numpy as np

from ..config import settings, tolerance
from ..engine.jet import Jet
from ..engine.scalar_field import BundlePoint, evaluate_field, lie_bracket_jet, pair_jet
from ..geometry.connection import values
from ..geometry.frame import FrameGeometry
from ..geometry.surface import FinslerSurface
from ..utils.logging import get_logger
from ..utils.parallel import parallel_map
from .report import IndicatrixMean, NondegeneracyReport, ResidualReport, VerificationReport

logger = get_logger(__name__)

# 每項檢查所需的最低 jet 階數；整套驗證在每點只展開一次最高階
ORDERS = {
    'duality': 3,
    'structure': 4,
    'cross_path_I': 4,
    'bracket': 4,
    'nondegeneracy': 4,
    'ricci_field': 4,
    'bianchi': 5,
    'ricci_I': 5,
    's_surface': 5,
    'ricci_K': 6,
}
SUITE_ORDER = max(ORDERS.values())

PAIRS = ((0, 1), (0, 2), (1, 2))

# 指標線梯形法則的最少節點數
MIN_QUAD = 64

Tolerances = Optional[Dict[str, float]]
FieldSpec = Union[str, Callable]


# 單點殘差 (geometry 為已展開的 FrameGeometry)

def structure_residual(geometry: FrameGeometry) -> float:
    """
    dω¹ = −I ω¹∧ω³ + ω²∧ω³，dω² = −ω¹∧ω³，dω³ = K ω¹∧ω² − J ω¹∧ω³
    在標架對 (12, 13, 23) 上的最大偏差
    """
    I, J, K = geometry.I.value, geometry.J.value, geometry.K.value
    expected = ((0.0, -I, 1.0), (0.0, -1.0, 0.0), (K, -J, 0.0))
    worst = 0.0
    for c in range(3):
        for (a, b), target in zip(PAIRS, expected[c]):
            value = geometry.two_form_on_frame(geometry.d_omega[c], a, b).value
            worst = max(worst, abs(value - target))
    return worst


def duality_residual(geometry: FrameGeometry) -> float:
    """max |ω^a(ê_b) − δ^a_b|"""
    worst = 0.0
    for c in range(3):
        for a in range(3):
            value = pair_jet(geometry.omega[c], geometry.ehat[a]).value
            worst = max(worst, abs(value - (1.0 if a == c else 0.0)))
    return worst


def cross_path_I_residual(geometry: FrameGeometry) -> float:
    """由 Cartan 張量得到的 I 與由 −dω¹(ê₁, ê₃) 得到的 I 之差"""
    return abs(geometry.I.value + geometry.two_form_on_frame(geometry.d_omega[0], 0, 2).value)


def bianchi_residual(geometry: FrameGeometry) -> tuple:
    """(|J − I₂|, |K₃ + K I + J₂|)"""
    I, K, J = geometry.I.value, geometry.K.value, geometry.J.value
    I2 = geometry.I_a[1].value
    K3 = geometry.K_a[2].value
    J2 = geometry.J_a[1].value
    return abs(J - I2), abs(K3 + K * I + J2)


def s_surface_dK_residual(geometry: FrameGeometry) -> float:
    """S-曲面情形 dK = K₁ω¹ + K₂ω² − (KI + I₂₂)ω³ 的 ω³ 分量偏差，只作診斷"""
    I, K = geometry.I.value, geometry.K.value
    K3 = geometry.K_a[2].value
    I22 = geometry.frame_derivative(geometry.I_a[1], 1).value
    return abs(K3 + K * I + I22)


def ricci_residual(geometry: FrameGeometry, f: Jet) -> float:
    """
    f_ab = ê_b(f_a) 的交換關係：
    f₂₁ − f₁₂ = −K f₃，f₃₂ − f₂₃ = −f₁，f₃₁ − f₁₃ = I f₁ + f₂ + J f₃
    """
    I, J, K = geometry.I.value, geometry.J.value, geometry.K.value
    first = geometry.derivatives(f)
    f1, f2, f3 = (jet.value for jet in first)

    def second(a: int, b: int) -> float:
        return geometry.frame_derivative(first[a - 1], b - 1).value

    residuals = (
        second(2, 1) - second(1, 2) + K * f3,
        second(3, 2) - second(2, 3) + f1,
        second(3, 1) - second(1, 3) - (I * f1 + f2 + J * f3),
    )
    return max(abs(r) for r in residuals)


def bracket_residual(geometry: FrameGeometry) -> float:
    """
    [ê₁,ê₂] = −K ê₃，[ê₂,ê₃] = −ê₁，[ê₃,ê₁] = −I ê₁ − ê₂ − J ê₃，
    以 ω^c 配對比較分量
    """
    I, J, K = geometry.I.value, geometry.J.value, geometry.K.value
    expected = {
        (0, 1): (0.0, 0.0, -K),
        (1, 2): (-1.0, 0.0, 0.0),
        (2, 0): (-I, -1.0, -J),
    }
    worst = 0.0
    for (a, b), target in expected.items():
        bracket = lie_bracket_jet(geometry.ehat[a], geometry.ehat[b])
        for c in range(3):
            value = pair_jet(geometry.omega[c], bracket).value
            worst = max(worst, abs(value - target[c]))
    return worst


def field_jet(geometry: FrameGeometry, f: FieldSpec) -> Jet:
    if isinstance(f, str):
        return geometry.scalar(f)
    return evaluate_field(f, geometry.point, geometry.order, geometry.surface.chart)


def _ricci_order(f: FieldSpec) -> int:
    if isinstance(f, str):
        key = f"ricci_{f}"
        if key not in ORDERS:
            raise ValueError(f"Ricci 恆等式只支援 I、K 或泛型純量場: {f}")
        return ORDERS[key]
    return ORDERS['ricci_field']


# 取樣

def sample_points(surface: FinslerSurface, n: int, seed: int = 0,
                  margin: Optional[float] = None) -> List[BundlePoint]:
    """
    在內縮座標圖中隨機取 n 個指標叢點，方向均勻分布並正規化到 F = 1

    Args:
        surface: 曲面
        n: 點數
        seed: 亂數種子
        margin: 內縮比例，預設取設定 verify.margin

    Returns:
        BundlePoint 列表
    """
    margin = settings.get('verify.margin', 0.05) if margin is None else margin
    rng = np.random.default_rng(seed)
    positions = surface.chart.sample(rng, n, margin)
    angles = 2.0 * np.pi * rng.random(n)
    points = []
    for x, theta in zip(positions, angles):
        x = (float(x[0]), float(x[1]))
        y = surface.normalize(x, (math.cos(theta), math.sin(theta)))
        points.append(BundlePoint(x, (float(y[0]), float(y[1]))))
    return points


def _evaluate(surface: FinslerSurface, points: Sequence[BundlePoint], order: int,
              func: Callable[[FrameGeometry], float], jobs: int = 1) -> List[float]:
    return parallel_map(lambda p: func(FrameGeometry(surface, p, order)), points, jobs)


# 各恆等式的報告

def structure_residuals(surface: FinslerSurface, points: Sequence[BundlePoint],
                        tolerances: Tolerances = None, jobs: int = 1) -> ResidualReport:
    """結構方程在取樣點上的最大殘差"""
    residuals = _evaluate(surface, points, ORDERS['structure'], structure_residual, jobs)
    return ResidualReport.from_values('structure', residuals, tolerance('structure', tolerances))


def duality_residuals(surface: FinslerSurface, points: Sequence[BundlePoint],
                      tolerances: Tolerances = None, jobs: int = 1) -> ResidualReport:
    residuals = _evaluate(surface, points, ORDERS['duality'], duality_residual, jobs)
    return ResidualReport.from_values('duality', residuals, tolerance('duality', tolerances))


def cross_path_I_residuals(surface: FinslerSurface, points: Sequence[BundlePoint],
                           tolerances: Tolerances = None, jobs: int = 1) -> ResidualReport:
    residuals = _evaluate(surface, points, ORDERS['cross_path_I'], cross_path_I_residual, jobs)
    return ResidualReport.from_values('cross_path_I', residuals, tolerance('cross_path_I', tolerances))


def bianchi_residuals(surface: FinslerSurface, points: Sequence[BundlePoint],
                      tolerances: Tolerances = None, jobs: int = 1) -> List[ResidualReport]:
    """
    Bianchi 恆等式 J = I₂ 與 K₃ + KI + J₂ = 0

    Returns:
        [bianchi_J, bianchi_K] 兩份報告
    """
    pairs = _evaluate(surface, points, ORDERS['bianchi'], bianchi_residual, jobs)
    return [
        ResidualReport.from_values('bianchi_J', [p[0] for p in pairs], tolerance('bianchi_J', tolerances)),
        ResidualReport.from_values('bianchi_K', [p[1] for p in pairs], tolerance('bianchi_K', tolerances)),
    ]


def ricci_residuals(surface: FinslerSurface, f: FieldSpec, points: Sequence[BundlePoint],
                    tolerances: Tolerances = None, jobs: int = 1) -> ResidualReport:
    """
    Ricci 恆等式

    Args:
        surface: 曲面
        f: 'I'、'K' 或 0 次齊次的泛型純量場
        points: 取樣點

    Returns:
        名稱為 ricci_<f> 的 ResidualReport
    """
    order = _ricci_order(f)
    name = f"ricci_{f}" if isinstance(f, str) else f"ricci_{getattr(f, '__name__', 'field')}"
    residuals = _evaluate(surface, points, order,
                          lambda geometry: ricci_residual(geometry, field_jet(geometry, f)), jobs)
    return ResidualReport.from_values(name, residuals, tolerance('ricci', tolerances))


def bracket_residuals(surface: FinslerSurface, points: Sequence[BundlePoint],
                      tolerances: Tolerances = None, jobs: int = 1) -> ResidualReport:
    residuals = _evaluate(surface, points, ORDERS['bracket'], bracket_residual, jobs)
    return ResidualReport.from_values('brackets', residuals, tolerance('bracket', tolerances))


# 指標線上的平均值

def indicatrix_mean_I(surface: FinslerSurface, x: Sequence[float],
                      n_quad: Optional[int] = None) -> IndicatrixMean:
    """
    ∮ I ds 沿 x 處的指標線

    以 y(θ) = d(θ)/F(x, d(θ))、d = (cosθ, sinθ) 參數化，
    弧長元 ds = sqrt(g_y(y', y')) dθ，其中
    y' = d'/F − d (F_y·d')/F²；週期梯形法則。

    Args:
        surface: 曲面
        x: 底點
        n_quad: 節點數，預設取設定 verify.n_quad

    Returns:
        IndicatrixMean，含積分值、長度 L 與 I 的範圍

    Raises:
        ValueError: n_quad 少於 MIN_QUAD
    """
    n_quad = n_quad or settings.get('verify.n_quad', 512)
    if n_quad < MIN_QUAD:
        raise ValueError(f"指標線積分至少需要 {MIN_QUAD} 個節點: n_quad={n_quad}")
    x = (float(x[0]), float(x[1]))
    thetas = 2.0 * np.pi * np.arange(n_quad) / n_quad
    I_values = np.empty(n_quad)
    speeds = np.empty(n_quad)

    for j, theta in enumerate(thetas):
        d = np.array([math.cos(theta), math.sin(theta)])
        d_prime = np.array([-d[1], d[0]])
        geometry = FrameGeometry(surface, BundlePoint(x, tuple(d)), ORDERS['duality'])
        F = geometry.F.value
        F_y = values(geometry.F_y)
        g = values(geometry.g)
        y_prime = d_prime / F - d * float(F_y @ d_prime) / F ** 2
        speeds[j] = math.sqrt(float(y_prime @ g @ y_prime))
        I_values[j] = geometry.I.value

    weight = 2.0 * np.pi / n_quad
    value = float(np.sum(I_values * speeds) * weight)
    L = float(np.sum(speeds) * weight)
    logger.debug(f"x={x} 的指標線: ∮I ds={value:.3e}, L={L:.6g}")
    return IndicatrixMean(x=x, value=value, L=L, I_min=float(I_values.min()),
                          I_max=float(I_values.max()), n_quad=n_quad)


def mean_I_residuals(surface: FinslerSurface, positions: Sequence[Sequence[float]],
                     n_quad: Optional[int] = None, tolerances: Tolerances = None,
                     jobs: int = 1):
    """
    |∮ I ds| / L 在多個底點上的最大值

    Returns:
        (ResidualReport, IndicatrixMean 列表)
    """
    means = parallel_map(lambda x: indicatrix_mean_I(surface, x, n_quad), positions, jobs)
    report = ResidualReport.from_values('mean_I', [m.relative for m in means],
                                        tolerance('mean_I', tolerances))
    return report, means


def constant_I_violations(means: Sequence[IndicatrixMean], tol: float) -> int:
    """I 沿指標線為常數時必須為零；回傳違反的指標線數目"""
    return sum(1 for m in means if m.constant and abs(0.5 * (m.I_min + m.I_max)) >= tol)


# 非退化與分類

def nondegeneracy(surface: FinslerSurface, points: Sequence[BundlePoint],
                  tolerances: Tolerances = None, jobs: int = 1) -> NondegeneracyReport:
    """標記 |1 + I₃| < tolerances.degenerate 的點"""
    tol = tolerance('degenerate', tolerances)
    one_plus = _evaluate(surface, points, ORDERS['nondegeneracy'],
                         lambda geometry: 1.0 + geometry.I_a[2].value, jobs)
    return _nondegeneracy_report(points, one_plus, tol)


def _nondegeneracy_report(points: Sequence[BundlePoint], one_plus: Sequence[float],
                          tol: float) -> NondegeneracyReport:
    magnitudes = [abs(v) for v in one_plus]
    flagged = [list(p.x + p.y) for p, v in zip(points, magnitudes) if v < tol]
    if flagged:
        logger.warning(f"{len(flagged)} 個取樣點的 |1 + I₃| 小於 {tol:g}")
    return NondegeneracyReport(len(points), min(magnitudes) if magnitudes else float('nan'), tol, flagged)


def s_surface_flag(I1_values: Sequence[float], I3_values: Sequence[float],
                   tolerances: Tolerances = None) -> bool:
    """I₁ 處處為零而 I₃ 不為零時標記為 S-曲面候選"""
    if not I1_values:
        return False
    return (max(abs(v) for v in I1_values) < tolerance('s_surface_I1', tolerances)
            and max(abs(v) for v in I3_values) > tolerance('s_surface_I3', tolerances))


def _vanishes(values: Sequence[float], tol: float) -> bool:
    return bool(values) and max(abs(v) for v in values) < tol


def classify(I_values: Sequence[float], J_values: Sequence[float], I1_values: Sequence[float],
             I2_values: Sequence[float], s_surface: bool,
             tolerances: Tolerances = None) -> Dict[str, bool]:
    """
    依取樣點上的不變量分類

    Berwald 曲率由 I₁、I₂ 決定，只需要一階標架導數。

    Returns:
        {'riemannian': I ≡ 0, 'berwald': I₁ ≡ I₂ ≡ 0, 'landsberg': J ≡ 0, 's_surface': ...}
    """
    tol = tolerance('structure', tolerances)
    return {
        'riemannian': _vanishes(I_values, tol),
        'berwald': _vanishes(I1_values, tol) and _vanishes(I2_values, tol),
        'landsberg': _vanishes(J_values, tol),
        's_surface': s_surface,
    }


# 整套驗證

@dataclass
class PointResult:
    """一個取樣點上所有檢查的結果"""

    point: BundlePoint
    I: float
    J: float
    I1: float
    I2: float
    I3: float
    structure: float
    duality: float
    cross_path_I: float
    bianchi_J: float
    bianchi_K: float
    ricci_I: float
    ricci_K: float
    brackets: float
    s_surface_dK: float


def _point_result(surface: FinslerSurface, point: BundlePoint) -> PointResult:
    geometry = FrameGeometry(surface, point, SUITE_ORDER)
    bianchi_J, bianchi_K = bianchi_residual(geometry)
    result = PointResult(
        point=point,
        I=geometry.I.value,
        J=geometry.J.value,
        I1=geometry.I_a[0].value,
        I2=geometry.I_a[1].value,
        I3=geometry.I_a[2].value,
        structure=structure_residual(geometry),
        duality=duality_residual(geometry),
        cross_path_I=cross_path_I_residual(geometry),
        bianchi_J=bianchi_J,
        bianchi_K=bianchi_K,
        ricci_I=ricci_residual(geometry, geometry.I),
        ricci_K=ricci_residual(geometry, geometry.K),
        brackets=bracket_residual(geometry),
        s_surface_dK=s_surface_dK_residual(geometry),
    )
    logger.debug(f"點 x={point.x}, y={point.y}: 結構殘差 {result.structure:.2e}, "
                 f"Ricci(K) 殘差 {result.ricci_K:.2e}")
    return result


# (報告名稱, PointResult 欄位, 容差名稱)
SUITE_IDENTITIES = (
    ('structure', 'structure', 'structure'),
    ('duality', 'duality', 'duality'),
    ('cross_path_I', 'cross_path_I', 'cross_path_I'),
    ('bianchi_J', 'bianchi_J', 'bianchi_J'),
    ('bianchi_K', 'bianchi_K', 'bianchi_K'),
    ('ricci_I', 'ricci_I', 'ricci'),
    ('ricci_K', 'ricci_K', 'ricci'),
    ('brackets', 'brackets', 'bracket'),
)


def run_suite(surface: FinslerSurface, n_points: Optional[int] = None, seed: int = 0,
              margin: Optional[float] = None, n_quad: Optional[int] = None,
              n_mean_points: Optional[int] = None, tolerances: Tolerances = None,
              jobs: int = 1) -> VerificationReport:
    """
    執行全部恆等式檢查，每個取樣點只展開一次幾何

    Args:
        surface: 曲面
        n_points: 取樣點數，預設取設定 verify.n_points
        seed: 亂數種子
        margin: 座標圖內縮比例
        n_quad: 指標線積分節點數
        n_mean_points: 計算指標線平均值的底點數
        tolerances: 容差覆寫
        jobs: 平行執行緒數

    Returns:
        VerificationReport
    """
    n_points = n_points or settings.get('verify.n_points', 100)
    n_mean_points = n_mean_points or settings.get('verify.n_mean_points', 10)
    logger.info(f"開始驗證 {surface.name}: {n_points} 個取樣點, 種子 {seed}")

    points = sample_points(surface, n_points, seed, margin)
    results = parallel_map(lambda p: _point_result(surface, p), points, jobs)

    identities = [
        ResidualReport.from_values(name, [getattr(r, attr) for r in results], tolerance(tol_name, tolerances))
        for name, attr, tol_name in SUITE_IDENTITIES
    ]

    mean_positions = [p.x for p in points[:n_mean_points]]
    mean_report, means = mean_I_residuals(surface, mean_positions, n_quad, tolerances, jobs)
    identities.append(mean_report)

    I1_values = [r.I1 for r in results]
    I3_values = [r.I3 for r in results]
    flag = s_surface_flag(I1_values, I3_values, tolerances)
    degenerate = _nondegeneracy_report(points, [1.0 + v for v in I3_values],
                                       tolerance('degenerate', tolerances))
    classification = classify([r.I for r in results], [r.J for r in results], I1_values,
                              [r.I2 for r in results], flag, tolerances)

    diagnostics = {
        's_surface_dK': max(r.s_surface_dK for r in results),
        'max_abs_I1': max(abs(v) for v in I1_values),
        'max_abs_I3': max(abs(v) for v in I3_values),
        'constant_I_violations': constant_I_violations(means, tolerance('mean_I', tolerances)),
    }

    report = VerificationReport(
        fixture=surface.name,
        identities=identities,
        mean_I=means[0] if means else None,
        s_surface_flag=flag,
        nondegeneracy=degenerate,
        classification=classification,
        diagnostics=diagnostics,
    )
    if report.passed:
        logger.info(f"{surface.name} 全部 {len(identities)} 項恆等式通過")
    else:
        names = ', '.join(r.name for r in report.failures())
        logger.warning(f"{surface.name} 有恆等式未通過: {names}")
    return report
