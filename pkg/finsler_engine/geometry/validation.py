"""
曲面驗證 - 取樣檢查正值性、正齊次性、強凸性與 Randers 條件
"""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import numpy as np

from ..config import settings
from ..engine.scalar_field import BundlePoint, EvaluationError, eval_jet, multi_index
from ..utils.logging import get_logger
from .surface import FinslerSurface, SurfaceFamily

logger = get_logger(__name__)


@dataclass(frozen=True)
class ValidationCheck:
    """單一驗證準則的結果"""

    name: str
    value: float
    passed: bool
    message: str = ""

    def to_dict(self) -> Dict[str, Any]:
        return {"name": self.name, "value": self.value, "pass": self.passed, "message": self.message}


@dataclass
class ValidationReport:
    """曲面驗證報告"""

    surface: str
    n_samples: int
    checks: List[ValidationCheck] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    def failures(self) -> List[ValidationCheck]:
        return [check for check in self.checks if not check.passed]

    def check(self, name: str) -> Optional[ValidationCheck]:
        return next((c for c in self.checks if c.name == name), None)

    def summary(self) -> str:
        if self.passed:
            return f"曲面 {self.surface} 通過全部 {len(self.checks)} 項驗證"
        return '; '.join(check.message for check in self.failures())

    def to_dict(self) -> Dict[str, Any]:
        return {"surface": self.surface, "n_samples": self.n_samples, "pass": self.passed,
                "checks": [check.to_dict() for check in self.checks]}


def _metric_eigenvalue(surface: FinslerSurface, point: BundlePoint) -> float:
    E = lambda x1, x2, y1, y2: surface.F(x1, x2, y1, y2) ** 2
    jet = eval_jet(E, point, order_x=0, order_y=2, chart=surface.chart)
    g = 0.5 * np.array([[jet[multi_index(2 + i, 2 + j)] for j in range(2)] for i in range(2)])
    return float(np.linalg.eigvalsh(g)[0])


def validate_surface(surface: FinslerSurface, n_samples: Optional[int] = None,
                     seed: int = 0) -> ValidationReport:
    """
    在座標圖 × 方向上取樣檢查 Minkowski 範數條件

    Args:
        surface: 待驗證的曲面
        n_samples: 取樣數量，預設取設定 validation.n_samples
        seed: 亂數種子

    Returns:
        逐準則的驗證報告；失敗記錄在報告中而不拋出
    """
    n_samples = n_samples or settings.get('validation.n_samples', 32)
    homogeneity_tol = settings.get('validation.homogeneity', 1e-9)
    lambdas = settings.get('validation.lambdas', [0.5, 2.0, 7.0])

    rng = np.random.default_rng(seed)
    positions = surface.chart.sample(rng, n_samples, margin=0.01)
    angles = 2.0 * np.pi * rng.random(n_samples)

    min_F = np.inf
    homogeneity = 0.0
    min_eigenvalue = np.inf
    errors = []
    for x, theta in zip(positions, angles):
        y = np.array([np.cos(theta), np.sin(theta)])
        try:
            F = surface.norm(x, y)
            if not np.isfinite(F):
                raise EvaluationError(f"F 在 x={tuple(x)} 產生非有限值")
            min_F = min(min_F, F)
            for lam in lambdas:
                scaled = surface.norm(x, lam * y)
                homogeneity = max(homogeneity, abs(scaled - lam * F) / (lam * abs(F)))
            min_eigenvalue = min(min_eigenvalue, _metric_eigenvalue(surface, BundlePoint(tuple(x), tuple(y))))
        except (EvaluationError, ZeroDivisionError, FloatingPointError) as e:
            errors.append(str(e))

    report = ValidationReport(surface.name, n_samples)
    report.checks.append(ValidationCheck(
        "evaluation", float(len(errors)), not errors,
        f"{len(errors)} 個取樣點求值失敗: {errors[0]}" if errors else ""))
    report.checks.append(ValidationCheck(
        "positivity", float(min_F), bool(min_F > 0.0),
        "" if min_F > 0.0 else f"F 非正 (最小值 {min_F:.6g})"))
    report.checks.append(ValidationCheck(
        "homogeneity", float(homogeneity), bool(homogeneity <= homogeneity_tol),
        "" if homogeneity <= homogeneity_tol else f"正齊次性殘差 {homogeneity:.3e} 超過 {homogeneity_tol:.1e}"))
    report.checks.append(ValidationCheck(
        "convexity", float(min_eigenvalue), bool(min_eigenvalue > 0.0),
        "" if min_eigenvalue > 0.0 else f"not strongly convex (最小 g 特徵值 {min_eigenvalue:.6g})"))

    if surface.family == SurfaceFamily.RANDERS:
        b_norm = max(surface.b_norm(x) for x in positions)
        report.checks.append(ValidationCheck(
            "b_norm", float(b_norm), bool(b_norm < 1.0),
            "" if b_norm < 1.0 else f"b-norm ≥ 1 (最大值 {b_norm:.6g})"))

    if report.passed:
        logger.info(report.summary())
    else:
        logger.warning(f"曲面 {surface.name} 驗證失敗: {report.summary()}")
    return report
