""" canonical-form expression kernel on top of sympy

Normal form: polynomial part fully expanded, rational functions reduced to
numerator/denominator by polynomial cancellation, and every sin(L)**n with
n >= 2 rewritten through sin(L)**2 = 1 - cos(L)**2. Powers of sin therefore
never exceed one in a normal form and denominators carry no sin at all,
which makes the zero test exact on the trigonometric atoms that occur in the
generator catalogs.
"""

import functools

import sympy as sp

from . import symbols
from ..errors import (UnsupportedFormError, SubstitutionCycleError,
                      UnboundSymbolError, PoleError)


_TRIG = (sp.sin, sp.cos)
_HYPERBOLIC = (sp.sinh, sp.cosh, sp.exp)


def as_expr(e):
    """ sympify, turning float literals into exact rationals """
    if isinstance(e, float):
        return sp.nsimplify(e, rational=True)
    e = sp.sympify(e)
    if e.has(sp.Float):
        e = e.xreplace({f: sp.nsimplify(f, rational=True) for f in e.atoms(sp.Float)})
    return e


def check_form(e, hyperbolic=False):
    for node in sp.preorder_traversal(e):
        if node.is_Atom:
            if node.is_Float:
                raise UnsupportedFormError(node, "floating point constant")
            continue
        if node.is_Add or node.is_Mul:
            continue
        if node.is_Pow:
            if not node.exp.is_Integer and not node.base.is_Atom:
                raise UnsupportedFormError(node, "non-integer exponent on a compound base")
            continue
        if isinstance(node, _TRIG) or (hyperbolic and isinstance(node, _HYPERBOLIC)):
            if not node.args[0].is_polynomial():
                raise UnsupportedFormError(node, "argument is not polynomial")
            continue
        raise UnsupportedFormError(node, "node kind {}".format(type(node).__name__))


def _is_sin_power(p):
    return (p.is_Pow and isinstance(p.base, sp.sin)
            and p.exp.is_Integer and p.exp >= 2)


def _sin_power(p):
    n = int(p.exp)
    arg = p.base.args[0]
    return sp.sin(arg)**(n % 2) * (1 - sp.cos(arg)**2)**(n // 2)


def _reduce_trig(e):
    while True:
        reduced = sp.expand(e.replace(_is_sin_power, _sin_power))
        if reduced == e:
            return reduced
        e = reduced


def _has_denominator(e):
    return any(p.exp.is_negative and not p.base.is_Number
               for p in e.atoms(sp.Pow))


def _clear_sin(num, den):
    """ multiply through by the conjugate of every sin in the denominator

    With sin of degree <= 1, den = d0 + d1*sin(L) and (d0 - d1*sin(L)) turns it
    into d0**2 - d1**2*(1 - cos(L)**2). The denominator then holds no sin and
    polynomial cancellation is taken modulo sin**2 + cos**2 - 1.
    """
    for s in sorted(den.atoms(sp.sin), key=sp.default_sort_key):
        if not den.has(s):
            continue
        conj = den.coeff(s, 0) - den.coeff(s, 1)*s
        num = _reduce_trig(sp.expand(num*conj))
        den = _reduce_trig(sp.expand(den*conj))
    return num, den


def normalize(e, hyperbolic=False):
    e = as_expr(e)
    check_form(e, hyperbolic)

    if not _has_denominator(e):
        return _reduce_trig(sp.expand(e))

    num, den = sp.fraction(sp.cancel(sp.together(e)))
    num, den = _clear_sin(_reduce_trig(sp.expand(num)), _reduce_trig(sp.expand(den)))
    num, den = sp.fraction(sp.cancel(num/den))
    num = _reduce_trig(sp.expand(num))
    den = _reduce_trig(sp.expand(den))
    if den == 1:
        return num
    return num / den


def is_zero(e):
    return normalize(e) == 0


def equals(a, b):
    return is_zero(as_expr(a) - as_expr(b))


def numerator(e):
    """ numerator of the normal form, the zero test for rational expressions """
    return sp.fraction(normalize(e))[0]


def diff(e, s):
    return normalize(sp.diff(as_expr(e), s))


def total_derivative(e, c, order=1):
    """ D_c e = de/dc + sum_J u^A_{J+c} de/du^A_J, with the result capped at jet order `order` """
    e = as_expr(e)
    if isinstance(c, str):
        c = symbols.coord(c)

    out = sp.diff(e, c)
    for s in e.free_symbols:
        i = symbols.info(s)
        if i is None or i.kind != symbols.JET:
            continue
        if i.order >= order:
            raise ValueError("{} already has jet order {} (cap {})".format(s, i.order, order))
        out += symbols.raise_index(s, c) * sp.diff(e, s)

    return normalize(out)


def _check_cycles(bindings):
    graph = {k: [s for s in v.free_symbols if s in bindings] for k, v in bindings.items()}
    state = {}

    def visit(k, path):
        state[k] = 1
        for n in graph[k]:
            if state.get(n) == 1:
                raise SubstitutionCycleError(path[path.index(n):] + [n])
            if n not in state:
                visit(n, path + [n])
        state[k] = 2

    for k in graph:
        if k not in state:
            visit(k, [k])


def substitute(e, bindings, hyperbolic=False):
    """ simultaneous substitution followed by normalize """
    bindings = {(symbols.known_symbols()[k] if isinstance(k, str) else k): as_expr(v)
                for k, v in bindings.items()}
    # k -> k is a no-op, not a cycle
    bindings = {k: v for k, v in bindings.items() if v != k}
    _check_cycles(bindings)
    return normalize(as_expr(e).xreplace(bindings), hyperbolic)


@functools.lru_cache(maxsize=4096)
def _lambdified(e, names):
    return sp.lambdify([sp.Symbol(n) for n in names], e, modules="math")


def eval_numeric(e, bindings):
    e = normalize(e, hyperbolic=True)
    values = {str(k): float(v) for k, v in bindings.items()}

    names = tuple(sorted(str(s) for s in e.free_symbols))
    missing = [n for n in names if n not in values]
    if missing:
        raise UnboundSymbolError(missing)

    try:
        return float(_lambdified(e, names)(*[values[n] for n in names]))
    except ZeroDivisionError:
        raise PoleError(e)


def compile_numeric(exprs, args, modules="numpy"):
    """ vectorized callable f(*args) -> list of values, for the numeric code paths """
    return sp.lambdify(list(args), list(exprs), modules=modules)
