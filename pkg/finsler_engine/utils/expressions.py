"""
表達式工具 - 驗證並編譯自訂度量的表達式字串
"""

import ast
from typing import Callable, Sequence

import sympy as sp

from ..engine.jet import NAMESPACE

# 允許的函數名稱
FUNCTIONS = frozenset(('sqrt', 'exp', 'log', 'sin', 'cos', 'tan', 'sinh', 'cosh', 'tanh'))
CONSTANTS = frozenset(('pi',))

_ALLOWED_NODES = (
    ast.Expression, ast.BinOp, ast.UnaryOp, ast.Call, ast.Name, ast.Load, ast.Constant,
    ast.Add, ast.Sub, ast.Mult, ast.Div, ast.Pow, ast.USub, ast.UAdd,
)


class ExpressionError(ValueError):
    """表達式不符合白名單文法"""
    pass


def check_expression(text: str, variables: Sequence[str]) -> None:
    """
    檢查表達式只使用白名單文法

    Args:
        text: 表達式字串
        variables: 允許的變數名稱

    Raises:
        ExpressionError: 語法錯誤或使用了不允許的結構
    """
    try:
        tree = ast.parse(text, mode='eval')
    except SyntaxError as e:
        raise ExpressionError(f"表達式語法錯誤 '{text}': {e.msg}")

    allowed_names = set(variables) | CONSTANTS
    for node in ast.walk(tree):
        if not isinstance(node, _ALLOWED_NODES):
            raise ExpressionError(f"表達式 '{text}' 含不允許的結構 {type(node).__name__}")
        if isinstance(node, ast.Constant) and not isinstance(node.value, (int, float)):
            raise ExpressionError(f"表達式 '{text}' 只能使用數值常數")
        if isinstance(node, ast.Call):
            if not isinstance(node.func, ast.Name) or node.func.id not in FUNCTIONS:
                raise ExpressionError(f"表達式 '{text}' 呼叫了不允許的函數")
            if node.keywords or len(node.args) != 1:
                raise ExpressionError(f"表達式 '{text}' 的函數只接受單一參數")
        elif isinstance(node, ast.Name) and node.id not in allowed_names and node.id not in FUNCTIONS:
            raise ExpressionError(f"表達式 '{text}' 使用了未知名稱 '{node.id}'")


def compile_expression(text: str, variables: Sequence[str]) -> Callable:
    """
    把表達式編譯成泛型純量函數

    產生的函數接受浮點數或 Jet，數學函數由 jet 命名空間提供。

    Args:
        text: 表達式字串
        variables: 函數參數名稱 (依序)

    Returns:
        可呼叫物件 f(*variables)
    """
    check_expression(text, variables)
    symbols = sp.symbols(list(variables))
    local = {name: symbol for name, symbol in zip(variables, symbols)}
    try:
        expr = sp.sympify(text, locals=local)
    except (sp.SympifyError, TypeError) as e:
        raise ExpressionError(f"無法解析表達式 '{text}': {e}")
    return sp.lambdify(symbols, expr, modules=[NAMESPACE])
