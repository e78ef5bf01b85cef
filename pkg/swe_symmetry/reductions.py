""" similarity reductions of the shallow-water systems to ordinary differential equations """

import logging
from dataclasses import dataclass, field

import numpy as np
import sympy as sp

from .errors import AnsatzInconsistencyError, DerivationError
from .lie_engine import VectorField
from .symbolic import symbols as S
from .symbolic.expr import as_expr, normalize, compile_numeric
from .symbolic.text import to_text, try_from_text

logger = logging.getLogger(__name__)

STATES = (S.H, S.U, S.V)


@dataclass
class SimilarityAnsatz:
    """ h, u, v written through states H, U, V of one similarity variable """
    name: str
    variable: sp.Symbol
    w_expr: sp.Expr
    fields: dict
    generators: list = field(default_factory=list)

    def derivative(self, state):
        return S.jet(str(state), str(self.variable))

    def elimination(self):
        """ coordinate binding that expresses (t, x, y) through the similarity variable """
        if self.w_expr == self.variable:
            return {}
        sol = sp.solve(sp.Eq(self.variable, self.w_expr), S.x, dict=True)
        if len(sol) != 1:
            raise DerivationError("cannot eliminate x from {} = {}".format(self.variable, self.w_expr))
        return {S.x: sol[0][S.x]}

    def partial(self, F, coord):
        """ D_coord F with the states carried along the similarity variable """
        out = sp.diff(F, coord)
        dz = sp.diff(self.w_expr, coord)
        if dz != 0:
            out += sum(sp.diff(F, s)*self.derivative(s)*dz for s in STATES)
        return out

    def jet_bindings(self):
        """ h, u, v and all their first partials in terms of the states """
        out = {}
        for dep, F in self.fields.items():
            out[dep] = F
            for c in (S.t, S.x, S.y):
                out[S.jet(str(dep), str(c))] = self.partial(F, c)
        return out

    def invariance_defects(self, gens=None):
        """ X(w) and eta^A - X(F^A) on the ansatz, for every generating field X """
        out = {}
        for X in (gens if gens is not None else self.generators):
            defects = [X.apply(self.w_expr)]
            for dep, F in self.fields.items():
                eta = as_expr(X[dep]).xreplace(self.fields)
                defects.append(normalize(eta - X.apply(F)))
            out[X.label] = [d for d in defects if d != 0]
        return out

    def to_json(self):
        return {"name": self.name, "variable": str(self.variable),
                "w": to_text(self.w_expr),
                "fields": {str(k): to_text(e) for k, e in self.fields.items()}}


@dataclass
class ReducedOde:
    """ solved first order system dS/dz = rhs(S, z) with the loci where the solved form breaks down """
    name: str
    independent: sp.Symbol
    rhs: dict
    singular_locus: list
    states: tuple = STATES
    matrix: sp.Matrix = None

    def derivative(self, state):
        return S.jet(str(state), str(self.independent))

    def params(self):
        out = set()
        for e in list(self.rhs.values()) + [e for _, e in self.singular_locus]:
            out |= {s for s in e.free_symbols if S.kind_of(s) == S.PARAMETER}
        return sorted(out, key=str)

    def locus(self, name):
        for k, e in self.singular_locus:
            if k == name:
                return e
        raise KeyError(name)

    def is_autonomous(self):
        return all(self.independent not in e.free_symbols for e in self.rhs.values())

    def specialize(self, bindings, name=None):
        bindings = {(S.param(k) if isinstance(k, str) else k): as_expr(v) for k, v in bindings.items()}
        sub = lambda e: normalize(e.xreplace(bindings))
        return ReducedOde(name or self.name, self.independent,
                          {s: sub(e) for s, e in self.rhs.items()},
                          [(k, sub(e)) for k, e in self.singular_locus], self.states)

    def residuals(self, solution):
        """ d/dz sol - rhs(sol) for a closed form, normalized """
        sol = solution.states
        out = {}
        for s in self.states:
            e = sp.diff(sol[s], self.independent) - self.rhs[s].xreplace(sol)
            out[s] = normalize(e)
        return out

    def compile(self, args=None):
        """ f(z, H, U, V, *params) and the locus callables, numpy-vectorized """
        params = self.params() if args is None else args
        sig = [self.independent] + list(self.states) + list(params)
        f = compile_numeric([self.rhs[s] for s in self.states], sig)
        loci = compile_numeric([e for _, e in self.singular_locus], sig)
        return f, loci, params

    def to_json(self):
        return {
            "name": self.name,
            "independent": str(self.independent),
            "rhs": {str(self.derivative(s)): to_text(self.rhs[s]) for s in self.states},
            "singular_locus": {k: to_text(e) for k, e in self.singular_locus},
            "autonomous": self.is_autonomous(),
        }


@dataclass
class ClosedFormSolution:
    independent: sp.Symbol
    states: dict
    constants: tuple = (S.H0, S.U0, S.V0)

    def evaluate(self, z, values):
        env = {str(k): float(v) for k, v in values.items()}
        exprs = [as_expr(self.states[s]) for s in STATES]
        args = [self.independent] + sorted(set().union(*(e.free_symbols for e in exprs))
                                           - {self.independent}, key=str)
        f = compile_numeric(exprs, args)
        return np.array(f(z, *[env[str(a)] for a in args[1:]]), dtype=float)

    def to_json(self):
        return {str(s): to_text(e) for s, e in self.states.items()}


### derivation ###

def _linear_system(equations, unknowns):
    """ split rows E = M d + r, each row cleared of its denominator """
    rows = []
    for E in equations:
        num, _ = sp.fraction(normalize(E))
        rows.append(sp.expand(num))

    M = sp.Matrix([[normalize(sp.diff(E, d)) for d in unknowns] for E in rows])
    r = sp.Matrix([normalize(E.xreplace({d: 0 for d in unknowns})) for E in rows])
    for E in rows:
        if any(sp.diff(E, d, 2) != 0 for d in unknowns):
            raise DerivationError("reduced equations are not linear in the derivatives")
    return M, r


def _solve(M, r, unknowns, name):
    det = normalize(M.det(method="berkowitz"))
    if det == 0:
        raise DerivationError("coefficient matrix of {} is singular".format(name))
    sol = M.LUsolve(-r)
    return [normalize(e) for e in sol], det


def reduce_system(ansatz, sys, name=None):
    """ substitute the ansatz into sys and solve for the state derivatives """
    name = name or ansatz.name
    bindings = ansatz.jet_bindings()
    elim = ansatz.elimination()

    equations = []
    for H in sys.equations():
        E = as_expr(H).xreplace(bindings)
        if elim:
            E = E.xreplace(elim)
        equations.append(normalize(E))

    unknowns = [ansatz.derivative(s) for s in STATES]
    M, r = _linear_system(equations, unknowns)
    sol, det = _solve(M, r, unknowns, name)

    allowed = {ansatz.variable}
    leftover = set()
    for e in sol:
        leftover |= {z for z in e.free_symbols
                     if S.kind_of(z) == S.COORDINATE and z not in allowed}
    if leftover:
        raise AnsatzInconsistencyError(name, leftover)

    rhs = dict(zip(STATES, sol))
    return ReducedOde(name, ansatz.variable, rhs, [("det", det)], matrix=M)


def _drop_constant_factors(e):
    """ e with numeric and pure-parameter factors removed """
    _, factors = sp.factor_list(e)
    keep = [f for f, k in factors
            if any(S.kind_of(z) != S.PARAMETER for z in f.free_symbols)]
    return normalize(sp.Mul(*keep)) if keep else sp.Integer(1)


### the three printed reductions ###

def travelling_wave_ansatz(c=2):
    c = as_expr(c)
    return SimilarityAnsatz(
        "travelling-wave", S.w, S.x + S.y - c*S.t,
        {S.h: S.H, S.u: S.U, S.v: S.V},
        [VectorField(label="X1+c/2(X2+X3)", t=1, x=c/2, y=c/2), VectorField(label="X2-X3", x=1, y=-1)])


def derive_travelling_wave(sys, c=2):
    """ w = x + y - c t; the singular locus is the determinant of the linear system (G up to a constant) """
    if sys.params["Omega_z"] == 0:
        logger.warning("travelling-wave reduction of %s with Omega_z = 0", sys.label)
    ode = reduce_system(travelling_wave_ansatz(c), sys)
    ode.singular_locus = [("G", ode.singular_locus[0][1])]
    return ode


def y2y5_ansatz():
    return SimilarityAnsatz(
        "equator-y2y5", S.t, S.t,
        {S.h: S.H, S.u: S.U, S.v: S.y/S.t + S.V},
        [VectorField(label="Y2", x=1), VectorField(label="Y5", y=S.t, v=1)])


def equator_y2y5():
    """ tH_t + H = 0, tU_t - Omega H = 0, tV_t + V = 0 and the closed forms solving them """
    Ht, Ut, Vt = (S.jet(str(s), "t") for s in STATES)
    printed = [S.t*Ht + S.H, S.t*Ut - S.Omega*S.H, S.t*Vt + S.V]

    M, r = _linear_system(printed, [Ht, Ut, Vt])
    sol, det = _solve(M, r, [Ht, Ut, Vt], "equator-y2y5")
    ode = ReducedOde("equator-y2y5", S.t, dict(zip(STATES, sol)), [("t", S.t)], matrix=M)

    closed = ClosedFormSolution(S.t, {
        S.H: S.H0/S.t,
        S.U: -S.H0*S.Omega/S.t + S.U0,
        S.V: S.V0/S.t,
    })
    return ode, closed


def derive_equator_y2y5(sys):
    ode = reduce_system(y2y5_ansatz(), sys)
    ode.singular_locus = [("t", _drop_constant_factors(ode.singular_locus[0][1]))]
    return ode


def y4y5_ansatz():
    return SimilarityAnsatz(
        "equator-y4y5", S.w, S.x/S.t,
        {S.h: S.H, S.u: S.U, S.v: S.y/S.t + S.V},
        [VectorField(label="Y4", t=S.t, x=S.x, y=S.y), VectorField(label="Y5", y=S.t, v=1)])


def derive_equator_y4y5(sys):
    """ w = x/t; singular where L(w) or U - w vanishes """
    ode = reduce_system(y4y5_ansatz(), sys)
    det = ode.singular_locus[0][1]

    crossing = S.U - S.w
    L = normalize(sp.cancel(det/crossing))
    if sp.fraction(L)[1] != 1:
        raise DerivationError("U - w does not divide the determinant of {}".format(ode.name))

    L = _drop_constant_factors(L)
    if sp.Poly(L, S.w).LC().could_extract_minus_sign():
        L = normalize(-L)

    ode.singular_locus = [("L", L), ("U-w", crossing)]
    return ode


### comparison with printed forms ###

def compare_forms(derived, printed):
    """ match, negated, proportional (constant ratio) or differs """
    if printed is None:
        return "unparseable"
    if normalize(derived - printed) == 0:
        return "match"
    if normalize(derived + printed) == 0:
        return "negated"
    if printed != 0:
        ratio = normalize(derived/printed)
        if not any(S.kind_of(z) in (S.JET, S.COORDINATE) for z in ratio.free_symbols):
            return "proportional"
    return "differs"


def term_diff(derived, printed):
    """ monomials of the printed form missing from the derived one, and the extra ones """
    a = set(sp.Add.make_args(sp.expand(derived)))
    b = set(sp.Add.make_args(sp.expand(printed)))
    return {"missing": sorted(to_text(e) for e in b - a), "extra": sorted(to_text(e) for e in a - b)}


def parse_printed(entry):
    """ printed right-hand sides of a reduction fixture, auxiliary symbols (G, L) expanded """
    extra = {}
    aux = {}
    for k, text in entry.get("aux", {}).items():
        e = try_from_text(text, extra)
        aux[k] = e
        if e is not None:
            extra[k] = e
    rhs = {}
    for k, text in entry.get("rhs", {}).items():
        rhs[k] = try_from_text(text, extra) if text is not None else None
    return aux, rhs


def compare_with_printed(ode, entry):
    """ per-equation verdicts against a reduction fixture, optionally at restricted parameters """
    aux, printed = parse_printed(entry)
    restrict = {S.param(k): as_expr(v) for k, v in entry.get("compare_at", {}).items()}
    at = (lambda e: normalize(e.xreplace(restrict))) if restrict else (lambda e: e)

    out = {"compare_at": {str(k): to_text(v) for k, v in restrict.items()}, "equations": {}, "loci": {}}
    for s in ode.states:
        key = str(ode.derivative(s))
        p = printed.get(key)
        out["equations"][key] = compare_forms(at(ode.rhs[s]), at(p) if p is not None else None)

    for name, e in ode.singular_locus:
        p = aux.get(name)
        if name not in aux:
            continue
        verdict = compare_forms(at(e), at(p) if p is not None else None)
        out["loci"][name] = {"verdict": verdict}
        if p is not None:
            out["loci"][name]["terms"] = term_diff(at(e), at(p))

    for key, text in entry.get("full", {}).items():
        extra = {k: v for k, v in aux.items() if v is not None}
        p = try_from_text(text, extra) if text is not None else None
        s = next(s for s in ode.states if str(ode.derivative(s)) == key)
        out["equations"][key + " (all parameters)"] = compare_forms(ode.rhs[s], p)

    return out
