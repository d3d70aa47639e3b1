"""
驗證報告 - 單一恆等式的殘差報告與整體驗證結果
"""

import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

from tabulate import tabulate


@dataclass
class ResidualReport:
    """
    一個恆等式在取樣點上的最大殘差；max_residual < tolerance 才算通過，
    NaN 一律視為失敗
    """

    name: str
    n_points: int
    max_residual: float
    tolerance: float
    passed: bool = field(init=False)

    def __post_init__(self):
        self.max_residual = float(self.max_residual)
        self.passed = math.isfinite(self.max_residual) and self.max_residual < self.tolerance

    @classmethod
    def from_values(cls, name: str, residuals, tolerance: float) -> 'ResidualReport':
        residuals = [abs(float(r)) for r in residuals]
        if not residuals:
            return cls(name, 0, float('nan'), tolerance)
        worst = float('nan') if any(math.isnan(r) for r in residuals) else max(residuals)
        return cls(name, len(residuals), worst, tolerance)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "n_points": self.n_points,
            "max_residual": self.max_residual,
            "tolerance": self.tolerance,
            "pass": self.passed,
        }


@dataclass
class IndicatrixMean:
    """∮ I ds 沿一條指標線，以及其長度與 I 的範圍"""

    x: tuple
    value: float
    L: float
    I_min: float
    I_max: float
    n_quad: int

    @property
    def relative(self) -> float:
        return abs(self.value) / self.L

    @property
    def constant(self) -> bool:
        """I 沿指標線近似常數"""
        return self.I_max - self.I_min < 1e-8

    def to_dict(self) -> Dict[str, Any]:
        return {"x": list(self.x), "value": self.value, "L": self.L,
                "I_min": self.I_min, "I_max": self.I_max, "n_quad": self.n_quad}


@dataclass
class NondegeneracyReport:
    """1 + I₃ 的非退化檢查"""

    n_points: int
    min_one_plus_I3: float
    tolerance: float
    flagged: List[List[float]] = field(default_factory=list)

    @property
    def nondegenerate(self) -> bool:
        return not self.flagged

    def to_dict(self) -> Dict[str, Any]:
        return {"n_points": self.n_points, "min_abs_one_plus_I3": self.min_one_plus_I3,
                "tolerance": self.tolerance, "flagged": self.flagged,
                "nondegenerate": self.nondegenerate}


@dataclass
class VerificationReport:
    """整體驗證結果"""

    fixture: str
    identities: List[ResidualReport]
    mean_I: Optional[IndicatrixMean] = None
    s_surface_flag: bool = False
    nondegeneracy: Optional[NondegeneracyReport] = None
    classification: Dict[str, bool] = field(default_factory=dict)
    diagnostics: Dict[str, float] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(report.passed for report in self.identities)

    def identity(self, name: str) -> Optional[ResidualReport]:
        for report in self.identities:
            if report.name == name:
                return report
        return None

    def failures(self) -> List[ResidualReport]:
        return [report for report in self.identities if not report.passed]

    def to_dict(self) -> Dict[str, Any]:
        mean = None
        if self.mean_I is not None:
            mean = {"value": self.mean_I.value, "L": self.mean_I.L,
                    "x": list(self.mean_I.x), "I_min": self.mean_I.I_min, "I_max": self.mean_I.I_max}
        return {
            "fixture": self.fixture,
            "identities": [report.to_dict() for report in self.identities],
            "mean_I": mean,
            "s_surface_flag": self.s_surface_flag,
            "nondegenerate": self.nondegeneracy.nondegenerate if self.nondegeneracy else None,
            "nondegeneracy": self.nondegeneracy.to_dict() if self.nondegeneracy else None,
            "classification": dict(self.classification),
            "diagnostics": dict(self.diagnostics),
            "pass": self.passed,
        }

    def table(self) -> str:
        rows = [[r.name, r.n_points, f"{r.max_residual:.3e}", f"{r.tolerance:.1e}",
                 "通過" if r.passed else "失敗"] for r in self.identities]
        return tabulate(rows, headers=["恆等式", "點數", "最大殘差", "容差", "結果"])
