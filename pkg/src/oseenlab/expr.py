"""A small, closed expression language for data fields.

Accepted: numbers, x1, x2, pi, e, + - * / ^ **, unary minus, and calls to
exp, log, sqrt, sin, cos, tan, sinh, cosh, tanh, asin, acos, atan, abs.
Parsing goes through the Python ``ast`` with a whitelist, then the tree is
rebuilt as a sympy expression; nothing is ever evaluated by Python itself.
"""
from __future__ import annotations

import ast

import sympy as sp

from .errors import ConfigError

X1, X2 = sp.symbols("x1 x2", real=True)

FUNCTIONS = {
    "exp": sp.exp,
    "log": sp.log,
    "sqrt": sp.sqrt,
    "sin": sp.sin,
    "cos": sp.cos,
    "tan": sp.tan,
    "sinh": sp.sinh,
    "cosh": sp.cosh,
    "tanh": sp.tanh,
    "asin": sp.asin,
    "acos": sp.acos,
    "atan": sp.atan,
    "abs": sp.Abs,
}
CONSTANTS = {"pi": sp.pi, "e": sp.E}

_BINOPS = {
    ast.Add: lambda a, b: a + b,
    ast.Sub: lambda a, b: a - b,
    ast.Mult: lambda a, b: a * b,
    ast.Div: lambda a, b: a / b,
    ast.Pow: lambda a, b: a**b,
}


class ExpressionError(ConfigError):
    pass


def parse_expression(text: str, symbols: dict | None = None) -> sp.Expr:
    """Parse ``text`` into a sympy expression in x1, x2.

    ``symbols`` maps extra names (for instance physical parameters) to
    sympy values or numbers.
    """
    if not isinstance(text, str) or not text.strip():
        raise ExpressionError("empty expression")
    names = {"x1": X1, "x2": X2, **CONSTANTS}
    for k, v in (symbols or {}).items():
        names[k] = sp.sympify(v)
    src = text.strip().replace("^", "**")
    try:
        tree = ast.parse(src, mode="eval")
    except SyntaxError as exc:
        raise ExpressionError(f"cannot parse {text!r}: {exc.msg} at column {exc.offset}") from None

    def build(node):
        if isinstance(node, ast.Expression):
            return build(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)) and not isinstance(node.value, bool):
            return sp.Integer(node.value) if isinstance(node.value, int) else sp.Float(repr(node.value))
        if isinstance(node, ast.Name):
            if node.id not in names:
                raise ExpressionError(f"unknown name {node.id!r} in {text!r} (column {node.col_offset + 1})")
            return names[node.id]
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](build(node.left), build(node.right))
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = build(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.Call):
            if not isinstance(node.func, ast.Name) or node.func.id not in FUNCTIONS:
                raise ExpressionError(f"function not allowed in {text!r} (column {node.col_offset + 1})")
            if node.keywords or len(node.args) != 1:
                raise ExpressionError(f"{node.func.id} takes exactly one argument")
            return FUNCTIONS[node.func.id](build(node.args[0]))
        col = getattr(node, "col_offset", -1) + 1
        raise ExpressionError(f"construct {type(node).__name__} not allowed in {text!r} (column {col})")

    expr = build(tree)
    extra = expr.free_symbols - {X1, X2}
    if extra:
        raise ExpressionError(f"unbound symbols {sorted(map(str, extra))} in {text!r}")
    return expr
