"""A small, safe arithmetic language for functions of ``x`` and ``y``.

Grammar: numbers, ``x``, ``y``, ``pi``, ``e``, the operators ``+ - * / **``
(``^`` is accepted as a power), and the functions ``sin cos tan exp log sqrt
abs``.  Expressions are parsed with :mod:`ast` and only whitelisted nodes are
evaluated, so no Python code ever runs.
"""

from __future__ import annotations

import ast
import operator as op

import numpy as np

FUNCTIONS = {
    "sin": np.sin, "cos": np.cos, "tan": np.tan, "exp": np.exp,
    "log": np.log, "sqrt": np.sqrt, "abs": np.abs,
}
CONSTANTS = {"pi": np.pi, "e": np.e}
VARIABLES = ("x", "y")
_BINOPS = {ast.Add: op.add, ast.Sub: op.sub, ast.Mult: op.mul, ast.Div: op.truediv, ast.Pow: op.pow}
_UNARY = {ast.USub: op.neg, ast.UAdd: op.pos}


class ExpressionError(ValueError):
    pass


class Expression:
    """A compiled expression, callable as ``expr(x, y)`` on arrays."""

    def __init__(self, source: str):
        if not isinstance(source, str) or not source.strip():
            raise ExpressionError("expression must be a non-empty string")
        self.source = source
        try:
            tree = ast.parse(source.replace("^", "**"), mode="eval")
        except SyntaxError as exc:
            raise ExpressionError(f"cannot parse {source!r}: {exc.msg}") from None
        self._check(tree.body)
        self._tree = tree.body

    def _check(self, node):
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            self._check(node.left)
            self._check(node.right)
        elif isinstance(node, ast.UnaryOp) and type(node.op) in _UNARY:
            self._check(node.operand)
        elif isinstance(node, ast.Constant) and isinstance(node.value, (int, float)) \
                and not isinstance(node.value, bool):
            pass
        elif isinstance(node, ast.Name) and (node.id in VARIABLES or node.id in CONSTANTS):
            pass
        elif (isinstance(node, ast.Call) and isinstance(node.func, ast.Name) and node.func.id in FUNCTIONS
              and len(node.args) == 1 and not node.keywords):
            self._check(node.args[0])
        else:
            raise ExpressionError(f"unsupported syntax in {self.source!r}: {ast.dump(node)[:60]}")

    def _eval(self, node, env):
        if isinstance(node, ast.BinOp):
            return _BINOPS[type(node.op)](self._eval(node.left, env), self._eval(node.right, env))
        if isinstance(node, ast.UnaryOp):
            return _UNARY[type(node.op)](self._eval(node.operand, env))
        if isinstance(node, ast.Constant):
            return float(node.value)
        if isinstance(node, ast.Name):
            return env[node.id] if node.id in env else CONSTANTS[node.id]
        return FUNCTIONS[node.func.id](self._eval(node.args[0], env))

    def __call__(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        shape = np.broadcast(x, y).shape
        return np.broadcast_to(self._eval(self._tree, {"x": x, "y": y}), shape)

    def __repr__(self):
        return f"Expression({self.source!r})"


def parse_expression(source: str) -> Expression:
    return Expression(source)
