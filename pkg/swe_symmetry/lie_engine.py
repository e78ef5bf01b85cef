import numpy as np
import sympy as sp
from dataclasses import dataclass, field

from .symbolic import symbols as S
from .symbolic.expr import as_expr, normalize, substitute, total_derivative, compile_numeric
from .symbolic.text import to_text


COORDS = (S.t, S.x, S.y)
DEPS = (S.u, S.v, S.h)
SLOTS = COORDS + DEPS


class VectorField:
    """ X = xi^i d_i + eta^A d_A on (t, x, y, u, v, h) """

    def __init__(self, components=None, label=None, **kwargs):
        comps = {}
        for k, e in list((components or {}).items()) + list(kwargs.items()):
            comps[_slot(k)] = as_expr(e)
        self.components = {s: comps.get(s, sp.Integer(0)) for s in SLOTS}
        self.label = label

        for s, e in self.components.items():
            for z in e.free_symbols:
                i = S.info(z)
                if i is not None and i.kind == S.JET and i.order > 0:
                    raise ValueError("component {} of {} contains {}".format(s, label, z))

    def __getitem__(self, slot):
        return self.components[_slot(slot)]

    @property
    def xi(self):
        return {s: self.components[s] for s in COORDS}

    @property
    def eta(self):
        return {s: self.components[s] for s in DEPS}

    def normalized(self):
        return VectorField({s: normalize(e) for s, e in self.components.items()}, self.label)

    def __add__(self, other):
        return VectorField({s: self[s] + other[s] for s in SLOTS})

    def __neg__(self):
        return VectorField({s: -e for s, e in self.components.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, k):
        k = as_expr(k)
        return VectorField({s: k*e for s, e in self.components.items()})

    def __rmul__(self, k):
        return self.scale(k)

    def is_zero(self):
        return all(normalize(e) == 0 for e in self.components.values())

    def equals(self, other):
        return (self - other).is_zero()

    def apply(self, f):
        """ X(f) """
        f = as_expr(f)
        return normalize(sum(e*sp.diff(f, s) for s, e in self.components.items()))

    def to_json(self):
        return {str(s): to_text(normalize(e)) for s, e in self.components.items()}

    def __repr__(self):
        terms = ["({})*d_{}".format(to_text(e), s) for s, e in self.components.items() if e != 0]
        return "{}: {}".format(self.label or "X", " + ".join(terms) or "0")


def _slot(k):
    name = str(k)
    for s in SLOTS:
        if str(s) == name:
            return s
    raise KeyError("unknown slot {}".format(k))


def vf_commutator(V, W):
    """ [V, W]^k = V(W^k) - W(V^k) """
    return VectorField({s: V.apply(W[s]) - W.apply(V[s]) for s in SLOTS})


### prolongation and the symmetry condition ###

def _deps(sys):
    return [S.jet(str(a)) for a in sys.dependents]


def prolong1(V, sys):
    """ eta^{A[1]}_i = D_i eta^A - u^A_j D_i xi^j, keyed by (dependent name, coordinate name) """
    Dxi = {(j, i): total_derivative(V[j], i) for j in COORDS for i in COORDS}

    out = {}
    for a in _deps(sys):
        for i in COORDS:
            e = total_derivative(V[a], i)
            e -= sum(S.jet(str(a), str(j)) * Dxi[(j, i)] for j in COORDS)
            out[(str(a), str(i))] = normalize(e)
    return out


def symmetry_residuals(V, sys):
    """ X^[1](H^A) restricted to the solution manifold, one residual per equation """
    pro = prolong1(V, sys)
    manifold = sys.manifold()

    residuals = []
    for H in sys.equations():
        r = sum(V[s]*sp.diff(H, s) for s in SLOTS)
        r += sum(e*sp.diff(H, S.jet(a, i)) for (a, i), e in pro.items())
        residuals.append(substitute(r, manifold))
    return residuals


@dataclass
class SymmetryReport:
    label: str
    system: str
    verdict: bool
    residuals: list
    corrections: list = field(default_factory=list)

    def __bool__(self):
        return self.verdict

    def to_json(self):
        return {
            "verdict": self.verdict,
            "residuals": [to_text(r) for r in self.residuals],
            "corrections": [c.to_json() for c in self.corrections],
        }


def is_symmetry(V, sys):
    residuals = symmetry_residuals(V, sys)
    return SymmetryReport(V.label, sys.label, all(r == 0 for r in residuals), residuals)


### numeric oracle ###

class NumericCondition:
    """ evaluates X^[1](H^A) on the solution manifold at sample points without symbolic prolongation

    The condition is linear in the components of X, so residual vectors of
    several fields can be added afterwards.
    """

    def __init__(self, sys, params):
        self.sys = sys
        self.params = {str(k): float(val) for k, val in params.items()}
        self.deps = _deps(sys)
        self.jets = [S.jet(str(a), str(i)) for a in self.deps for i in COORDS]
        self.base = list(COORDS) + self.deps
        self.args = self.base + [j for j in self.jets if S.info(j).index != ("t",)]
        self.param_syms = [sp.Symbol(k) for k in sorted(self.params)]

        eqs = sys.equations()
        allvars = self.base + self.jets
        self._rhs = compile_numeric([sys.rhs(a) for a in self.deps], self.args + self.param_syms)
        self._grad = compile_numeric([sp.diff(H, z) for H in eqs for z in allvars],
                                     allvars + self.param_syms)

    def sample(self, n, seed=0):
        rng = np.random.default_rng(seed)
        points = []
        for _ in range(n):
            p = {str(z): rng.uniform(0.3, 1.7) for z in self.args}
            points.append(p)
        return points

    def _values(self, p):
        pv = [self.params[k] for k in sorted(self.params)]
        vals = dict(p)
        rhs = self._rhs(*[p[str(z)] for z in self.args], *pv)
        for a, r in zip(self.deps, rhs):
            vals["{}_t".format(a)] = float(r)
        return vals, pv

    def compile_field(self, V):
        comps = [V[s] for s in SLOTS]
        args = self.base + self.param_syms
        f = compile_numeric(comps, args)
        df = compile_numeric([sp.diff(e, z) for e in comps for z in self.base], args)
        return f, df

    def residual(self, V, points, compiled=None):
        nvar = len(self.base) + len(self.jets)
        f, df = compiled or self.compile_field(V)

        out = []
        for p in points:
            vals, pv = self._values(p)
            base = [vals[str(z)] for z in self.base]
            comp = np.array(f(*base, *pv), dtype=float)
            dcomp = np.array(df(*base, *pv), dtype=float).reshape(len(SLOTS), len(self.base))

            # total derivatives of each component along t, x, y
            D = np.zeros((len(SLOTS), len(COORDS)))
            for ci, i in enumerate(COORDS):
                D[:, ci] = dcomp[:, ci]
                for ai, a in enumerate(self.deps):
                    D[:, ci] += dcomp[:, len(COORDS) + ai] * vals["{}_{}".format(a, i)]

            prolonged = []
            for a in self.deps:
                ka = SLOTS.index(a)
                for ci, i in enumerate(COORDS):
                    e = D[ka, ci]
                    for cj, j in enumerate(COORDS):
                        e -= vals["{}_{}".format(a, j)] * D[cj, ci]
                    prolonged.append(e)

            allv = base + [vals[str(j)] for j in self.jets]
            grad = np.array(self._grad(*allv, *pv), dtype=float).reshape(len(self.deps), nvar)
            vec = [comp[SLOTS.index(z)] for z in self.base] + prolonged
            out.extend(grad @ np.array(vec))
        return np.array(out)
