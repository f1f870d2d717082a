"""Independent sympy view of kernel values, used only as a test oracle."""

import re

import sympy

from kha.arith import to_text

_NAME = re.compile(r"([A-Za-z]+)\[([^\]]*)\]")


def sympy_text(text: str) -> str:
    text = _NAME.sub(lambda m: m.group(1) + "_" + m.group(2).replace(",", "_"), text)
    return text.replace("^", "**")


def to_sympy(f) -> sympy.Expr:
    return sympy.sympify(sympy_text(to_text(f)))


def same(f, expr) -> bool:
    return sympy.simplify(to_sympy(f) - expr) == 0
