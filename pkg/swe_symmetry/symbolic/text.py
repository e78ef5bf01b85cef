""" plain-text serialization of expressions

Grammar (infix, the Python/sympy expression subset):

    expr   := term (('+' | '-') term)*
    term   := factor (('*' | '/') factor)*
    factor := ('-')? power
    power  := atom ('**' ('-')? integer)?
    atom   := integer | name | func '(' expr ')' | '(' expr ')'
    func   := sin | cos | sinh | cosh | exp

Names are the registered symbols (Omega, Omega_y, g, h_x, H0, ...); any other
identifier becomes a free symbol, which is how table fixtures refer to basis
labels such as Z7.
"""

import sympy as sp
from sympy.parsing.sympy_parser import parse_expr, standard_transformations

from . import symbols


_FUNCTIONS = {
    "sin": sp.sin, "cos": sp.cos,
    "sinh": sp.sinh, "cosh": sp.cosh, "exp": sp.exp,
    "pi": sp.pi,
}

_GLOBALS = {
    "Integer": sp.Integer, "Rational": sp.Rational, "Float": sp.Float,
    "Symbol": sp.Symbol, "Function": sp.Function,
}


def to_text(e):
    return sp.sstr(e)


def from_text(text, extra=None):
    local = dict(_FUNCTIONS)
    local.update(symbols.known_symbols())
    if extra:
        local.update(extra)

    return parse_expr(text, local_dict=local, global_dict=dict(_GLOBALS),
                      transformations=standard_transformations)


def try_from_text(text, extra=None):
    """ parse, returning None for cells that are not in the grammar """
    if text is None:
        return None
    try:
        return from_text(text, extra)
    except Exception:
        return None
