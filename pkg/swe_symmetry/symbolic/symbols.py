""" symbol registry: parameters, coordinates, jet variables, integration constants """

from dataclasses import dataclass

import sympy as sp


PARAMETER = "parameter"
COORDINATE = "coordinate"
JET = "jet-variable"
CONSTANT = "integration-constant"

COORDINATES = ("t", "x", "y", "w")
DEPENDENTS = ("u", "v", "h", "H", "U", "V")


@dataclass(frozen=True)
class SymbolInfo:
    name: str
    kind: str
    dep: str = None
    index: tuple = ()

    @property
    def order(self):
        return len(self.index)


_INFO = {}
_SYMBOLS = {}


def _declare(name, kind, dep=None, index=()):
    key = (kind, name)
    if key not in _SYMBOLS:
        _SYMBOLS[key] = sp.Symbol(name)
        _INFO[name] = SymbolInfo(name, kind, dep, tuple(index))
    return _SYMBOLS[key]


def param(name):
    return _declare(name, PARAMETER)


def coord(name):
    if name not in COORDINATES:
        raise ValueError("unknown coordinate {}".format(name))
    return _declare(name, COORDINATE)


def constant(name):
    return _declare(name, CONSTANT)


def jet_name(dep, index):
    return dep if not index else "{}_{}".format(dep, "".join(index))


def jet(dep, *index):
    """ jet variable u^A_J, the multi-index is kept in coordinate order """
    if dep not in DEPENDENTS:
        raise ValueError("unknown dependent variable {}".format(dep))
    index = tuple(sorted(index, key=COORDINATES.index))
    return _declare(jet_name(dep, index), JET, dep, index)


def info(s):
    return _INFO.get(str(s))


def kind_of(s):
    i = info(s)
    return i.kind if i is not None else None


def is_jet(s):
    return kind_of(s) == JET


def jet_order(s):
    return info(s).order


def raise_index(s, c):
    """ u^A_J -> u^A_{J+c} """
    i = info(s)
    return jet(i.dep, *(i.index + (str(c),)))


def known_symbols():
    """ name -> Symbol for every declared symbol (used by the text parser) """
    return {str(s): s for s in _SYMBOLS.values()}


### the fixed vocabulary ###

t, x, y, w = (coord(c) for c in COORDINATES)

Omega = param("Omega")
Omega_y = param("Omega_y")
Omega_z = param("Omega_z")
g = param("g")
phi0 = param("phi0")
epsilon = param("epsilon")
c = param("c")

H0 = constant("H0")
U0 = constant("U0")
V0 = constant("V0")

h, u, v = jet("h"), jet("u"), jet("v")
H, U, V = jet("H"), jet("U"), jet("V")
