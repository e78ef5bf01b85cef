import sympy as sp
from dataclasses import dataclass

from .symbolic import symbols as S
from .symbolic.expr import as_expr, normalize, substitute, total_derivative
from .symbolic.text import to_text


ADVECTION = ("corrected", "literal")


@dataclass(frozen=True)
class PdeSystem:
    """ first order evolution system, time derivatives solved for """
    label: str
    solved_rhs: dict
    params: dict
    independent: tuple = (S.t, S.x, S.y)
    dependents: tuple = (S.h, S.u, S.v)
    advection: str = "corrected"

    def rhs(self, dep):
        return self.solved_rhs[S.jet(str(dep), "t")]

    def manifold(self):
        """ bindings that restrict jet expressions to solutions """
        return dict(self.solved_rhs)

    def equations(self):
        """ H^A = (time derivative) - RHS """
        return [S.jet(str(a), "t") - self.rhs(a) for a in self.dependents]

    def specialize(self, bindings, label=None):
        bindings = {_param(k): as_expr(v) for k, v in bindings.items()}
        bindings = {k: v for k, v in bindings.items() if v != k}
        rhs = {k: substitute(e, bindings) for k, e in self.solved_rhs.items()}
        params = {k: normalize(as_expr(e).xreplace(bindings)) for k, e in self.params.items()}
        return PdeSystem(label or self.label, rhs, params, self.independent,
                         self.dependents, self.advection)

    def describe(self):
        lines = {"{}_t".format(a): to_text(self.rhs(a)) for a in self.dependents}
        return {
            "label": self.label,
            "advection": self.advection,
            "params": {k: to_text(e) for k, e in sorted(self.params.items())},
            "equations": lines,
        }


def _param(k):
    return S.param(k) if isinstance(k, str) else k


def _Dx(e):
    return total_derivative(e, S.x)


def _Dy(e):
    return total_derivative(e, S.y)


def build_general(Omega_y=S.Omega_y, Omega_z=S.Omega_z, g=S.g, advection="corrected", label="general"):
    """ shallow-water system with the complete Coriolis force at a fixed latitude """
    if advection not in ADVECTION:
        raise ValueError("advection must be one of {}".format(ADVECTION))

    Oy, Oz, g = as_expr(Omega_y), as_expr(Omega_z), as_expr(g)
    h, u, v = S.h, S.u, S.v
    u_x, u_y, v_x, v_y, h_y = (S.jet(*k) for k in
        [("u", "x"), ("u", "y"), ("v", "x"), ("v", "y"), ("h", "y")])

    flux = g*h - h**2*Oy*u
    mass = _Dx(h*u) + _Dy(h*v)

    # printed momentum equation carries v*u_x
    v_adv = v*u_y if advection == "corrected" else v*u_x

    rhs = {
        S.jet("h", "t"): normalize(-mass),
        S.jet("u", "t"): normalize(-u*u_x - v_adv + (2*Oz - Oy*h_y)*v - _Dx(flux) + Oy*mass),
        S.jet("v", "t"): normalize(-u*v_x - v*v_y - (2*Oz - Oy*h_y)*u - _Dy(flux)),
    }

    params = {"Omega_y": Oy, "Omega_z": Oz, "g": g}
    return PdeSystem(label, rhs, params, advection=advection)


def build_equator(Omega=S.Omega, g=S.g, advection="corrected"):
    return build_general(advection=advection).specialize(
        {S.Omega_y: Omega, S.Omega_z: 0, S.g: g}, label="equator")


def build_pole(Omega=S.Omega, g=S.g, advection="corrected"):
    return build_general(advection=advection).specialize(
        {S.Omega_y: 0, S.Omega_z: Omega, S.g: g}, label="pole")


def build_at_latitude(phi0=S.phi0, Omega=S.Omega, g=S.g, advection="corrected"):
    """ Omega_y = Omega cos(phi0), Omega_z = Omega sin(phi0) """
    phi0, Omega = as_expr(phi0), as_expr(Omega)
    return build_general(advection=advection).specialize(
        {S.Omega_y: Omega*sp.cos(phi0), S.Omega_z: Omega*sp.sin(phi0), S.g: g},
        label="latitude")


BUILDERS = {
    "general": build_general,
    "equator": build_equator,
    "pole": build_pole,
}


def build(label, advection="corrected", **params):
    if label not in BUILDERS:
        raise KeyError(label)
    return BUILDERS[label](advection=advection, **params)


def printed_form(sys):
    """ the balance-law form of the three equations, time derivatives not solved for """
    Oy, Oz, g = sys.params["Omega_y"], sys.params["Omega_z"], sys.params["g"]
    h, u, v = S.h, S.u, S.v
    J = S.jet

    flux = g*h - h**2*Oy*u
    v_adv = v*J("u", "y") if sys.advection == "corrected" else v*J("u", "x")
    coriolis = 2*Oz - Oy*J("h", "y")

    return [
        normalize(J("h", "t") + _Dx(h*u) + _Dy(h*v)),
        normalize(J("u", "t") + u*J("u", "x") + v_adv - coriolis*v + _Dx(flux)
                  - Oy*(_Dx(h*u) + _Dy(h*v))),
        normalize(J("v", "t") + u*J("v", "x") + v*J("v", "y") + coriolis*u + _Dy(flux)),
    ]
