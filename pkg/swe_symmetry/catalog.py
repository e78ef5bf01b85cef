""" generator catalogs for the three systems, as printed """

import sympy as sp

from .lie_engine import VectorField
from .symbolic.symbols import t, x, y, u, v, h, Omega


def general_catalog():
    return [
        VectorField(label="X1", t=1),
        VectorField(label="X2", x=1),
        VectorField(label="X3", y=1),
    ]


def equator_catalog():
    return [
        VectorField(label="Y1", t=1),
        VectorField(label="Y2", x=1),
        VectorField(label="Y3", y=1),
        VectorField(label="Y4", t=t, x=x, y=y),
        # printed with d_V, read as the velocity component v
        VectorField(label="Y5", y=t, v=1),
    ]


def pole_catalog():
    s, c = sp.sin(2*Omega*t), sp.cos(2*Omega*t)

    # Z8 and Z9 keep the printed grouping so corrections can address single nodes
    Z8 = VectorField(label="Z8",
        t=s,
        x=Omega*(x*c + y*s),
        y=-Omega*(x*s - y*c),
        u=-Omega*(u*c - v*s - 2*Omega*(y*c - x*s)),
        v=-Omega*(u*s + u*c + 2*Omega*(y*s + x*c)),
        h=-2*Omega*h*c)

    Z9 = VectorField(label="Z9",
        t=c,
        x=Omega*(y*c - x*s),
        y=-Omega*(x*c + y*s),
        u=Omega*(u*s + v*c - 2*Omega*(x*c + y*s)),
        v=Omega*(-u*c + v*s + Omega*(x*s - y*c)),
        h=2*Omega*s)

    return [
        VectorField(label="Z1", t=1),
        VectorField(label="Z2", x=1),
        VectorField(label="Z3", y=1),
        VectorField(label="Z4", x=x, y=y, u=u, v=v, h=2*h),
        VectorField(label="Z5", x=y, y=-x, u=v, v=-u),
        VectorField(label="Z6", x=s, y=c, u=2*Omega*c, v=-2*Omega*s),
        VectorField(label="Z7", x=-c, y=s, u=2*Omega*s, v=2*Omega*c),
        Z8,
        Z9,
    ]


CATALOGS = {
    "general": general_catalog,
    "equator": equator_catalog,
    "pole": pole_catalog,
}


def catalog(label):
    return CATALOGS[label]()


def by_label(gens):
    return {V.label: V for V in gens}
