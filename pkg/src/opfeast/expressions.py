"""Tiny arithmetic grammar for inline operator coefficients.

Accepts x, numeric literals, + - * / ^ (and **), unary minus, parentheses,
and the call whitelist exp/sin/cos/cosh/tanh.  Parsed through the ast module
with a strict node whitelist, evaluated vectorized, then fitted to a ChebFun;
expressions that cannot be resolved on the interval (poles, non-finite
values) surface as a resolution failure.
"""

from __future__ import annotations

import ast

import numpy as np

from .chebfun import ChebFun
from .errors import ConfigError

_FUNCS = {"exp": np.exp, "sin": np.sin, "cos": np.cos,
          "cosh": np.cosh, "tanh": np.tanh, "sinh": np.sinh}

_ALLOWED_BINOPS = (ast.Add, ast.Sub, ast.Mult, ast.Div, ast.Pow)


def _eval_node(node, x):
    if isinstance(node, ast.Expression):
        return _eval_node(node.body, x)
    if isinstance(node, ast.Constant):
        if isinstance(node.value, (int, float)):
            return float(node.value)
        raise ConfigError(f"unsupported literal {node.value!r}")
    if isinstance(node, ast.Name):
        if node.id == "x":
            return x
        if node.id == "pi":
            return np.pi
        raise ConfigError(f"unknown name '{node.id}' (only x and pi are allowed)")
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        v = _eval_node(node.operand, x)
        return -v if isinstance(node.op, ast.USub) else v
    if isinstance(node, ast.BinOp) and isinstance(node.op, _ALLOWED_BINOPS):
        a = _eval_node(node.left, x)
        b = _eval_node(node.right, x)
        if isinstance(node.op, ast.Add):
            return a + b
        if isinstance(node.op, ast.Sub):
            return a - b
        if isinstance(node.op, ast.Mult):
            return a * b
        if isinstance(node.op, ast.Div):
            with np.errstate(divide="ignore", invalid="ignore"):
                return a / b
        return a ** b
    if isinstance(node, ast.Call) and isinstance(node.func, ast.Name):
        fn = _FUNCS.get(node.func.id)
        if fn is None or node.keywords or len(node.args) != 1:
            raise ConfigError(f"unsupported function call '{node.func.id}'")
        return fn(_eval_node(node.args[0], x))
    raise ConfigError(f"unsupported expression element: {ast.dump(node)}")


def parse_coeff_expression(text: str, domain=(-1.0, 1.0),
                           tol: float = 1e-14) -> ChebFun:
    """Build a ChebFun from an expression string like "1 + x^2" or "cosh(x)"."""
    if not isinstance(text, str) or not text.strip():
        raise ConfigError("empty coefficient expression")
    source = text.replace("^", "**")
    try:
        tree = ast.parse(source, mode="eval")
    except SyntaxError as exc:
        raise ConfigError(f"cannot parse expression {text!r}: {exc.msg}") from exc

    def f(x):
        return _eval_node(tree, np.asarray(x, dtype=float))

    return ChebFun.fit(f, domain, tol=tol)
