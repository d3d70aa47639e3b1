"""
配置管理模組 - 處理預設設定與每次執行的 JSON 設定檔
"""

import copy
import json
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Tuple

import yaml
from pydantic import (BaseModel, ConfigDict, Field, PositiveFloat, PositiveInt,
                      ValidationError, field_validator, model_validator)

from .utils.expressions import ExpressionError, check_expression


class ConfigurationError(Exception):
    """配置錯誤異常"""
    pass


class Settings:
    """預設設定管理類，載入套件內的 defaults.yaml"""

    _instance = None

    def __new__(cls):
        """單例模式確保只有一個設定實例"""
        if cls._instance is None:
            cls._instance = super(Settings, cls).__new__(cls)
            cls._instance._initialized = False
        return cls._instance

    def __init__(self):
        """初始化設定管理器"""
        if self._initialized:
            return

        self._settings = self._load_yaml_settings()
        self._initialized = True

    def _load_yaml_settings(self) -> Dict[str, Any]:
        """載入YAML預設設定"""
        settings_path = Path(__file__).with_name('defaults.yaml')
        try:
            with open(settings_path, 'r', encoding='utf-8') as file:
                return yaml.safe_load(file) or {}
        except (OSError, yaml.YAMLError) as e:
            raise ConfigurationError(f"無法載入預設設定 {settings_path}: {e}")

    def get(self, path: str, default: Any = None) -> Any:
        """
        從設定中獲取值，使用點標記(.)的路徑訪問嵌套鍵

        Args:
            path: 使用點標記的設定路徑，例如 'tolerances.ricci'
            default: 如果路徑不存在時的默認值

        Returns:
            設定值或默認值
        """
        parts = path.split('.')
        value = self._settings

        for part in parts:
            if isinstance(value, dict) and part in value:
                value = value[part]
            else:
                return default

        return value

    def get_all(self) -> Dict[str, Any]:
        """返回完整設定的副本"""
        return copy.deepcopy(self._settings)


# 全局設定實例
settings = Settings()


def tolerance(name: str, overrides: Optional[Dict[str, float]] = None) -> float:
    """
    取得具名容差，執行設定中的覆寫優先

    Args:
        name: 容差名稱，例如 'ricci'
        overrides: 執行設定提供的覆寫

    Returns:
        容差值
    """
    if overrides and name in overrides:
        return float(overrides[name])
    value = settings.get(f'tolerances.{name}')
    if value is None:
        raise ConfigurationError(f"未定義的容差: {name}")
    return float(value)


def _default(path: str):
    return lambda: settings.get(path)


# 執行設定 (JSON)

Pair = Tuple[float, float]


class _Strict(BaseModel):
    model_config = ConfigDict(extra='forbid', frozen=True)


class ChartConfig(_Strict):
    """自訂曲面的座標圖：矩形或圓盤"""

    kind: Literal['rectangle', 'disk'] = 'rectangle'
    x1: Optional[Pair] = None
    x2: Optional[Pair] = None
    center: Pair = (0.0, 0.0)
    radius: Optional[PositiveFloat] = None

    @model_validator(mode='after')
    def _check_shape(self):
        if self.kind == 'rectangle':
            if self.x1 is None or self.x2 is None:
                raise ValueError("矩形座標圖需要 x1 與 x2 範圍")
            for lo, hi in (self.x1, self.x2):
                if not lo < hi:
                    raise ValueError(f"座標範圍下界必須小於上界: ({lo}, {hi})")
        elif self.radius is None:
            raise ValueError("圓盤座標圖需要 radius")
        return self


FIELD_VARIABLES = ('x1', 'x2')
NORM_VARIABLES = ('y1', 'y2')


class SurfaceConfig(_Strict):
    """曲面定義：內建樣本名稱加參數覆寫，或自訂族"""

    fixture: Optional[str] = None
    params: Dict[str, float] = Field(default_factory=dict)
    family: Optional[Literal['riemannian', 'randers', 'minkowski']] = None
    name: Optional[str] = None
    a: Optional[List[List[str]]] = None
    b: Optional[List[str]] = None
    norm: Optional[str] = None
    chart: Optional[ChartConfig] = None

    @model_validator(mode='after')
    def _check_definition(self):
        if (self.fixture is None) == (self.family is None):
            raise ValueError("surface 必須恰好指定 fixture 或 family 其中之一")
        if self.family is None:
            return self
        if self.chart is None:
            raise ValueError("自訂曲面需要 chart")
        if self.family == 'riemannian' and self.a is None:
            raise ValueError("riemannian 族需要 a (2×2 表達式)")
        if self.family == 'randers' and self.b is None:
            raise ValueError("randers 族需要 b (2 個表達式)")
        if self.family == 'minkowski' and self.norm is None:
            raise ValueError("minkowski 族需要 norm 表達式")
        try:
            if self.a is not None:
                if len(self.a) != 2 or any(len(row) != 2 for row in self.a):
                    raise ValueError("a 必須是 2×2 表達式矩陣")
                if self.a[0][1].replace(' ', '') != self.a[1][0].replace(' ', ''):
                    raise ValueError("a 必須對稱 (a[0][1] 與 a[1][0] 相同)")
                for row in self.a:
                    for entry in row:
                        check_expression(entry, FIELD_VARIABLES)
            if self.b is not None:
                if len(self.b) != 2:
                    raise ValueError("b 必須有 2 個表達式")
                for entry in self.b:
                    check_expression(entry, FIELD_VARIABLES)
            if self.norm is not None:
                check_expression(self.norm, NORM_VARIABLES)
        except ExpressionError as e:
            raise ValueError(str(e))
        return self

    @property
    def label(self) -> str:
        return self.fixture or self.name or f"custom_{self.family}"


class GridConfig(_Strict):
    """不變量掃描網格；範圍省略時取座標圖內縮後的範圍"""

    x1: Optional[Pair] = None
    x2: Optional[Pair] = None
    n_x1: PositiveInt = Field(default_factory=_default('grid.n_x1'))
    n_x2: PositiveInt = Field(default_factory=_default('grid.n_x2'))
    n_directions: PositiveInt = Field(default_factory=_default('grid.n_directions'))


class VerifyConfig(_Strict):
    n_points: PositiveInt = Field(default_factory=_default('verify.n_points'))
    n_quad: int = Field(default_factory=_default('verify.n_quad'), ge=64)
    n_mean_points: PositiveInt = Field(default_factory=_default('verify.n_mean_points'))
    margin: float = Field(default_factory=_default('verify.margin'), ge=0.0, lt=0.5)
    tolerances: Dict[str, PositiveFloat] = Field(default_factory=dict)

    @field_validator('tolerances')
    @classmethod
    def _known_tolerances(cls, value):
        known = settings.get('tolerances', {})
        unknown = sorted(set(value) - set(known))
        if unknown:
            raise ValueError(f"未知的容差名稱: {', '.join(unknown)}")
        return value


class InitialConfig(_Strict):
    """初始條件：x0 加上切向量 T0 或法向量 N0"""

    x0: Pair
    T0: Optional[Pair] = None
    N0: Optional[Pair] = None

    @model_validator(mode='after')
    def _one_direction(self):
        if (self.T0 is None) == (self.N0 is None):
            raise ValueError("initial 必須恰好指定 T0 或 N0 其中之一")
        direction = self.T0 if self.T0 is not None else self.N0
        if direction == (0.0, 0.0):
            raise ValueError("初始方向不可為零向量")
        return self


class IntegrationConfig(_Strict):
    flow: Literal['geodesic', 'n_parallel', 'n_extremal'] = 'n_parallel'
    length: PositiveFloat = Field(default_factory=_default('integration.length'))
    step: PositiveFloat = Field(default_factory=_default('integration.step'))
    renormalize: bool = Field(default_factory=_default('integration.renormalize'))
    cross_validate: bool = False

    @model_validator(mode='after')
    def _step_fits(self):
        if self.step > self.length:
            raise ValueError("step 不可大於 length")
        return self


class RunConfig(_Strict):
    """一次 CLI 執行的完整設定"""

    surface: SurfaceConfig
    seed: int = Field(0, ge=0)
    grid: GridConfig = Field(default_factory=GridConfig)
    verify: VerifyConfig = Field(default_factory=VerifyConfig)
    initial: Optional[InitialConfig] = None
    integration: IntegrationConfig = Field(default_factory=IntegrationConfig)
    output: Optional[str] = None

    def echo(self) -> str:
        """單行、鍵排序的設定回顯"""
        return json.dumps(self.model_dump(mode='json'), sort_keys=True, separators=(',', ':'))


def _format_validation_error(error: ValidationError) -> str:
    parts = []
    for item in error.errors():
        location = '.'.join(str(p) for p in item['loc']) or '(root)'
        parts.append(f"{location}: {item['msg']}")
    return '; '.join(parts)


def parse_run_config(data: Any) -> RunConfig:
    """
    驗證已解析的設定內容

    Raises:
        ConfigurationError: 結構不符
    """
    try:
        return RunConfig.model_validate(data)
    except ValidationError as e:
        raise ConfigurationError(f"設定檔內容無效: {_format_validation_error(e)}")


def load_run_config(path: str) -> RunConfig:
    """
    讀取並驗證 JSON 執行設定檔

    Args:
        path: 設定檔路徑

    Returns:
        RunConfig

    Raises:
        ConfigurationError: 無法讀取、JSON 格式錯誤或內容無效
    """
    try:
        with open(path, 'r', encoding='utf-8') as file:
            data = json.load(file)
    except OSError as e:
        raise ConfigurationError(f"無法讀取設定檔 {path}: {e}")
    except json.JSONDecodeError as e:
        raise ConfigurationError(f"設定檔不是有效的 JSON ({path}): {e}")
    return parse_run_config(data)
