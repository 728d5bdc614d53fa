"""Regression functions for simulations, with exact derivatives."""
from __future__ import annotations

import ast
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import InvalidArgumentError

__all__ = ["RegressionFunction", "REGISTRY", "get_function", "parse_expression"]


@dataclass(frozen=True)
class RegressionFunction:
    """A named function with an optional closed-form derivative oracle."""

    name: str
    value: Callable[[np.ndarray], np.ndarray]
    derivative: Optional[Callable[[np.ndarray, int], np.ndarray]] = None
    description: str = ""

    def __call__(self, x):
        return self.value(np.asarray(x, dtype=float))


def _f1(x):
    return np.sin(6 * np.pi * x)


def _f1_deriv(x, n):
    # Im[(6 pi i)^n exp(6 pi i x)]
    return ((6j * np.pi) ** n * np.exp(6j * np.pi * np.asarray(x))).imag


def _f2(x):
    return np.sin(2 * np.pi * x) ** 2 * np.exp(x)


def _f2_deriv(x, n):
    # sin^2(2 pi x) e^x = e^x / 2 - Re[exp((1 + 4 pi i) x)] / 2
    x = np.asarray(x, dtype=float)
    z = 1 + 4j * np.pi
    return np.exp(x) / 2 - (z ** n * np.exp(z * x)).real / 2


def _zero(x):
    return np.zeros_like(np.asarray(x, dtype=float))


REGISTRY = {
    "f1": RegressionFunction("f1", _f1, _f1_deriv, "sin(6 pi x)"),
    "f2": RegressionFunction("f2", _f2, _f2_deriv, "sin(2 pi x)^2 exp(x)"),
    "zero": RegressionFunction("zero", _zero, lambda x, n: _zero(x), "0"),
}

_ALLOWED_FUNCS = {
    "sin": np.sin, "cos": np.cos, "tan": np.tan, "exp": np.exp, "log": np.log,
    "sqrt": np.sqrt, "abs": np.abs, "sinh": np.sinh, "cosh": np.cosh, "tanh": np.tanh,
}
_ALLOWED_NAMES = {"x", "pi", "e"} | set(_ALLOWED_FUNCS)
_ALLOWED_NODES = (
    ast.Expression, ast.BinOp, ast.UnaryOp, ast.Call, ast.Name, ast.Load, ast.Constant,
    ast.Add, ast.Sub, ast.Mult, ast.Div, ast.Pow, ast.USub, ast.UAdd, ast.Mod,
)


def parse_expression(expr: str) -> RegressionFunction:
    """Compile a user expression in ``x`` such as ``"sin(2*pi*x) + x**2"``.

    Only arithmetic, numeric constants, ``pi``, ``e`` and a fixed set of
    elementary functions are accepted.
    """
    try:
        tree = ast.parse(expr, mode="eval")
    except SyntaxError as exc:
        raise InvalidArgumentError(f"cannot parse expression {expr!r}") from exc
    for node in ast.walk(tree):
        if not isinstance(node, _ALLOWED_NODES):
            raise InvalidArgumentError(f"disallowed syntax in {expr!r}: {type(node).__name__}")
        if isinstance(node, ast.Name) and node.id not in _ALLOWED_NAMES:
            raise InvalidArgumentError(f"unknown name {node.id!r} in {expr!r}")
        if isinstance(node, ast.Call) and not (
                isinstance(node.func, ast.Name) and node.func.id in _ALLOWED_FUNCS):
            raise InvalidArgumentError(f"disallowed call in {expr!r}")
        if isinstance(node, ast.Constant) and not isinstance(node.value, (int, float)):
            raise InvalidArgumentError(f"only numeric constants are allowed in {expr!r}")
    code = compile(tree, "<expression>", "eval")
    env = {"__builtins__": {}, "pi": math.pi, "e": math.e, **_ALLOWED_FUNCS}

    def value(x):
        out = eval(code, env, {"x": x})  # names and nodes are whitelisted above
        return np.broadcast_to(np.asarray(out, dtype=float), np.shape(x)).copy()

    return RegressionFunction(expr, value, None, expr)


def get_function(name: str) -> RegressionFunction:
    """Registered function by name, or a parsed expression prefixed ``expr:``."""
    if name in REGISTRY:
        return REGISTRY[name]
    if name.startswith("expr:"):
        return parse_expression(name[5:])
    raise InvalidArgumentError(
        f"unknown function {name!r}; use one of {sorted(REGISTRY)} or 'expr:<expression>'")
