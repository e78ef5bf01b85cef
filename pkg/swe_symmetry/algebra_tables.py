import itertools
import logging
from dataclasses import dataclass, field

import numpy as np
import sympy as sp
import torch

from .errors import ClosureError
from .lie_engine import SLOTS, vf_commutator
from .symbolic import symbols as S
from .symbolic.expr import normalize, eval_numeric
from .symbolic.text import to_text, try_from_text

logger = logging.getLogger(__name__)


@dataclass
class LieAlgebra:
    """ basis labels and structure constants, c[i][j][k] = C^k_{ij} """
    basis: list
    c: list
    name: str = None
    fields: list = None

    @property
    def dim(self):
        return len(self.basis)

    def label_symbols(self):
        return [sp.Symbol(b) for b in self.basis]

    def bracket_expr(self, i, j):
        """ [e_i, e_j] written over the basis labels """
        return normalize(sum(ck*L for ck, L in zip(self.c[i][j], self.label_symbols())))

    def params(self):
        out = set()
        for i, j in itertools.product(range(self.dim), repeat=2):
            for e in self.c[i][j]:
                out |= e.free_symbols
        return sorted(out, key=str)

    def numeric(self, values):
        """ C as a float64 tensor of shape (i, j, k) """
        n = self.dim
        C = np.zeros((n, n, n))
        for i, j, k in itertools.product(range(n), repeat=3):
            e = self.c[i][j][k]
            if e != 0:
                C[i, j, k] = eval_numeric(e, values)
        return torch.as_tensor(C, dtype=torch.float64)

    def to_json(self):
        return {
            "name": self.name,
            "basis": list(self.basis),
            "brackets": {"[{},{}]".format(a, b): to_text(self.bracket_expr(i, j))
                         for (i, a), (j, b) in itertools.product(enumerate(self.basis), repeat=2)},
            "flags": structure_flags(self),
        }


### structure constants ###

def _atomize(e):
    """ trig atoms -> independent dummies; valid on normal forms where sin has degree <= 1 """
    atoms = sorted(e.atoms(sp.sin, sp.cos), key=str)
    return e.xreplace({a: sp.Dummy(str(a.func)) for a in atoms})


def decompose(W, basis, names=("?", "?")):
    """ exact coefficients k with W = sum_k k_k basis_k """
    ks = sp.symbols("k0:{}".format(len(basis)), cls=sp.Dummy)

    eqs = []
    for s in SLOTS:
        e = _atomize(normalize(W[s] - sum(k*B[s] for k, B in zip(ks, basis))))
        gens = [z for z in e.free_symbols if z not in ks and S.kind_of(z) != S.PARAMETER]
        if gens:
            eqs.extend(sp.Poly(e, *gens).coeffs())
        elif e != 0:
            eqs.append(e)

    sol = sp.linsolve(eqs, ks)
    if not sol:
        raise ClosureError(*names)

    coeffs = list(next(iter(sol)))
    if any(e.free_symbols & set(ks) for e in coeffs):
        raise ClosureError(*names, detail="basis is linearly dependent")
    return [normalize(e) for e in coeffs]


def structure_constants(gens, name=None, progress=None):
    n = len(gens)
    zero = [sp.Integer(0)]*n
    c = [[list(zero) for _ in range(n)] for _ in range(n)]

    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    for i, j in (progress(pairs) if progress else pairs):
        W = vf_commutator(gens[i], gens[j])
        if W.is_zero():
            continue
        ks = decompose(W, gens, (gens[i].label, gens[j].label))
        c[i][j] = ks
        c[j][i] = [normalize(-k) for k in ks]

    return LieAlgebra([V.label for V in gens], c, name, list(gens))


def antisymmetry_defects(alg):
    n = alg.dim
    return [(i, j, k) for i, j, k in itertools.product(range(n), repeat=3)
            if normalize(alg.c[i][j][k] + alg.c[j][i][k]) != 0]


def jacobi_residuals(alg):
    """ nonzero entries of sum_m C^m_ij C^l_mk + C^m_jk C^l_mi + C^m_ki C^l_mj """
    n, C = alg.dim, alg.c
    out = []
    for i, j, k in itertools.combinations(range(n), 3):
        for l in range(n):
            e = sum(C[i][j][m]*C[m][k][l] + C[j][k][m]*C[m][i][l] + C[k][i][m]*C[m][j][l]
                    for m in range(n))
            e = normalize(e)
            if e != 0:
                out.append(((i, j, k, l), e))
    return out


def _bracket_vectors(alg, A, B):
    n, C = alg.dim, alg.c
    out = []
    for a in A:
        for b in B:
            out.append([sum(a[i]*b[j]*C[i][j][k] for i in range(n) for j in range(n))
                        for k in range(n)])
    return out


def _span(vectors):
    """ a maximal independent subset of the vectors """
    basis = []
    for vec in vectors:
        row = [normalize(e) for e in vec]
        if all(e == 0 for e in row):
            continue
        trial = basis + [row]
        if sp.Matrix(trial).rank(simplify=True) == len(trial):
            basis = trial
    return basis


def structure_flags(alg):
    """ abelian, derived-series dimensions, solvable, centre dimension """
    n = alg.dim
    current = [[sp.Integer(int(i == k)) for k in range(n)] for i in range(n)]

    series = [n]
    while current:
        nxt = _span(_bracket_vectors(alg, current, current))
        series.append(len(nxt))
        if len(nxt) == len(current):
            break
        current = nxt

    # centre: x with sum_i x_i C^k_ij = 0 for all j, k
    xs = sp.symbols("z0:{}".format(n), cls=sp.Dummy)
    eqs = [normalize(sum(xs[i]*alg.c[i][j][k] for i in range(n))) for j in range(n) for k in range(n)]
    eqs = [e for e in eqs if e != 0]
    rank = sp.Matrix([[sp.diff(e, z) for z in xs] for e in eqs]).rank(simplify=True) if eqs else 0

    return {
        "abelian": series[1] == 0,
        "derived_series": series,
        "solvable": series[-1] == 0,
        "centre_dim": int(n - rank),
    }


### adjoint representation ###

def ad_matrices(alg, Omega_val=1.0):
    """ A[i] with A[i][k, j] = C^k_{ij} """
    C = alg.numeric({"Omega": Omega_val})
    return C.permute(0, 2, 1).contiguous()


def adjoint_numeric(alg, i, eps, Omega_val=1.0):
    """ matrix of Ad(e^{eps e_i}) on the basis, column j is the image of e_j

    Ad(e^{eps X}) Y = Y - eps [X, Y] + eps^2/2 [X, [X, Y]] - ..., the
    orientation under which Ad(e^{eps Y4}) Y1 = e^eps Y1.
    """
    A = ad_matrices(alg, Omega_val)[i]
    return torch.linalg.matrix_exp(-eps*A).numpy()


def adjoint_batch(alg, eps_grid, Omega_val=1.0):
    """ all single-generator maps, shape (dim, len(eps_grid), dim, dim) """
    A = ad_matrices(alg, Omega_val)
    eps = torch.as_tensor(np.asarray(eps_grid, dtype=float), dtype=torch.float64)
    M = torch.linalg.matrix_exp(-eps[None, :, None, None]*A[:, None])
    return M.numpy()


def exp_identity_defect(alg, i, eps, Omega_val=1.0):
    P = adjoint_numeric(alg, i, eps, Omega_val) @ adjoint_numeric(alg, i, -eps, Omega_val)
    return float(np.abs(P - np.eye(alg.dim)).max())


def adjoint_automorphism_defect(alg, i, eps, Omega_val=1.0):
    """ max over basis pairs of |Ad[e_a, e_b] - [Ad e_a, Ad e_b]| """
    C = alg.numeric({"Omega": Omega_val}).numpy()
    M = adjoint_numeric(alg, i, eps, Omega_val)

    worst = 0.0
    for a, b in itertools.product(range(alg.dim), repeat=2):
        lhs = M @ C[a, b]
        rhs = np.einsum("i,j,ijk->k", M[:, a], M[:, b], C)
        worst = max(worst, float(np.abs(lhs - rhs).max()))
    return worst


### comparison with transcribed tables ###

@dataclass
class TableCell:
    row: str
    col: str
    computed: str
    printed: str
    match: bool
    detail: str = ""

    def __post_init__(self):
        if self.match is not None:
            self.match = bool(self.match)

    def to_json(self):
        return {"row": self.row, "col": self.col, "computed": self.computed,
                "printed": self.printed, "match": self.match, "detail": self.detail}


@dataclass
class TableReport:
    name: str
    cells: list = field(default_factory=list)

    def summary(self):
        return {
            "cells": len(self.cells),
            "match": sum(1 for c in self.cells if c.match is True),
            "mismatch": sum(1 for c in self.cells if c.match is False),
            "unparseable": sum(1 for c in self.cells if c.match is None),
        }

    def mismatches(self):
        return [c for c in self.cells if c.match is not True]

    def cell(self, row, col):
        for c in self.cells:
            if c.row == row and c.col == col:
                return c
        raise KeyError((row, col))

    def to_json(self):
        return {"name": self.name, "summary": self.summary(),
                "cells": [c.to_json() for c in self.cells]}

    def to_text(self):
        rows = sorted({c.row for c in self.cells}, key=_label_key)
        cols = sorted({c.col for c in self.cells}, key=_label_key)
        grid = [[""] + cols]
        for r in rows:
            line = [r]
            for cl in cols:
                try:
                    c = self.cell(r, cl)
                except KeyError:
                    line.append("")
                    continue
                mark = {True: "", False: " !", None: " ?"}[c.match]
                line.append(c.computed + mark)
            grid.append(line)
        widths = [max(len(line[k]) for line in grid) for k in range(len(grid[0]))]
        out = ["  ".join(s.ljust(wd) for s, wd in zip(line, widths)) for line in grid]
        out.append("{}: {}".format(self.name, self.summary()))
        return "\n".join(out)


def _label_key(label):
    return (label[0], int(label[1:]) if label[1:].isdigit() else 0)


def _label_dict(fixture, alg):
    extra = {b: sp.Symbol(b) for b in alg.basis}
    for alias, target in fixture.get("aliases", {}).items():
        extra[alias] = sp.Symbol(target)
    return extra


def commutator_compare(alg, fixture):
    """ cell-by-cell symbolic comparison of [e_i, e_j] against a transcribed table """
    extra = _label_dict(fixture, alg)
    report = TableReport(fixture["name"])

    for i, a in enumerate(alg.basis):
        for j, b in enumerate(alg.basis):
            computed = alg.bracket_expr(i, j)
            text = fixture["rows"].get(a, {}).get(b)
            printed = try_from_text(text, extra)
            if printed is None:
                report.cells.append(TableCell(a, b, to_text(computed), text, None, "unparseable"))
                continue
            ok = normalize(computed - printed) == 0
            report.cells.append(TableCell(a, b, to_text(computed), text, ok,
                                          "" if ok else "computed is ground truth"))
    return report


def _coefficients(printed, labels):
    e = sp.expand(printed)
    coeffs = [e.coeff(L) for L in labels]
    rest = sp.expand(e - sum(k*L for k, L in zip(coeffs, labels)))
    return coeffs, rest


def adjoint_compare(alg, fixture, samples, tol=1e-9):
    """ numeric comparison of transcribed Ad(e^{eps e_i}) e_j cells at (eps, Omega) samples """
    extra = _label_dict(fixture, alg)
    labels = alg.label_symbols()
    report = TableReport(fixture["name"])

    maps = {(i, s): adjoint_numeric(alg, i, s[0], s[1])
            for i in range(alg.dim) for s in samples}

    for i, a in enumerate(alg.basis):
        for j, b in enumerate(alg.basis):
            text = fixture["rows"].get(a, {}).get(b)
            if a not in fixture["rows"] or b not in fixture.get("columns", alg.basis):
                continue

            computed = maps[(i, samples[0])][:, j]
            shown = " + ".join("{:.6g}*{}".format(v, L) for v, L in zip(computed, alg.basis)
                               if abs(v) > 1e-14)

            printed = try_from_text(text, extra)
            if printed is None:
                report.cells.append(TableCell(a, b, shown, text, None, "unparseable"))
                continue

            coeffs, rest = _coefficients(printed, labels)
            worst, where = 0.0, None
            for s in samples:
                env = {"epsilon": s[0], "Omega": s[1]}
                col = maps[(i, s)][:, j]
                vals = [eval_numeric(k, env) for k in coeffs]
                stray = abs(eval_numeric(rest, env)) if rest != 0 else 0.0
                err = max([abs(p - q)/(1.0 + abs(q)) for p, q in zip(vals, col)] + [stray])
                if err > worst:
                    worst, where = err, s

            ok = bool(worst <= tol)
            detail = "" if ok else "max deviation {:.3e} at (eps, Omega) = {}".format(worst, where)
            report.cells.append(TableCell(a, b, shown, text, ok, detail))
    return report


### optimal-system screening ###

@dataclass
class ScreenFinding:
    source: str
    target: str
    source_params: dict
    target_params: dict
    path: list
    scale: float

    def to_json(self):
        return {"source": self.source, "target": self.target,
                "source_params": self.source_params, "target_params": self.target_params,
                "path": [[l, float(e)] for l, e in self.path], "scale": self.scale}


@dataclass
class ScreenReport:
    algebra: str
    findings: list
    self_scalings: dict
    pairs_screened: int

    @property
    def verdict(self):
        return "refuted" if self.findings else "not refuted at sampled depth"

    def refuted(self, a, b):
        return any({f.source, f.target} == {a, b} for f in self.findings)

    def to_json(self):
        return {"algebra": self.algebra, "verdict": self.verdict,
                "pairs_screened": self.pairs_screened,
                "findings": [f.to_json() for f in self.findings],
                "self_scalings": self.self_scalings}


def representative_samples(rep, alg, values=(1.0, 2.0)):
    """ numeric coefficient vectors of a representative family over its constant grid """
    consts = rep.get("params", [])
    out = []
    for combo in itertools.product(values, repeat=len(consts)):
        env = dict(zip(consts, combo))
        vec = np.zeros(alg.dim)
        for label, text in rep["coefficients"].items():
            expr = try_from_text(text, {k: sp.Symbol(k) for k in consts})
            vec[alg.basis.index(label)] = float(expr.subs({sp.Symbol(k): val for k, val in env.items()}))
        out.append((env, vec))
    return out


def _proportional(images, b, tol):
    bn = b/np.linalg.norm(b)
    lam = images @ bn
    resid = np.linalg.norm(images - lam[..., None]*bn, axis=-1)
    norms = np.linalg.norm(images, axis=-1)
    return resid <= tol*norms, lam/np.linalg.norm(b)


def optimal_system_screen(alg, reps, eps_grid=None, values=(1.0, 2.0), Omega_val=1.0,
                          depth=2, tol=1e-8, progress=None):
    """ sampled necessary-condition check that no representative is conjugate to another

    Adjoint maps of single generators over the eps grid are composed up to
    `depth`; an image proportional to another family's sample is a finding.
    """
    eps_grid = np.linspace(-2.0, 2.0, 41) if eps_grid is None else np.asarray(eps_grid)
    singles = adjoint_batch(alg, eps_grid, Omega_val)
    n, m = alg.dim, len(eps_grid)
    flat = singles.reshape(n*m, n, n)

    def path(idx):
        return [(alg.basis[k // m], eps_grid[k % m]) for k in idx]

    samples = {r["name"]: representative_samples(r, alg, values) for r in reps}

    # images of every sample under depth-1 and depth-2 maps
    images = {}
    for name, ss in samples.items():
        for s, (env, a) in enumerate(ss):
            one = flat @ a
            two = np.einsum("pij,qj->pqi", flat, one) if depth >= 2 else None
            images[(name, s)] = (one, two)

    findings = []
    pairs = [(p, q) for p in samples for q in samples if p != q]
    for p, q in (progress(pairs) if progress else pairs):
        hit = None
        for s, (env_a, a) in enumerate(samples[p]):
            one, two = images[(p, s)]
            for env_b, b in samples[q]:
                ok, lam = _proportional(one, b, tol)
                if ok.any():
                    k = int(np.flatnonzero(ok)[0])
                    hit = ScreenFinding(p, q, env_a, env_b, path([k]), float(lam[k]))
                    break
                if two is not None:
                    ok, lam = _proportional(two, b, tol)
                    if ok.any():
                        k1, k2 = (int(z) for z in np.argwhere(ok)[0])
                        hit = ScreenFinding(p, q, env_a, env_b, path([k2, k1]), float(lam[k1, k2]))
                        break
            if hit:
                break
        if hit:
            findings.append(hit)

    # depth-1 rescalings of each representative onto itself
    self_scalings = {}
    for name, ss in samples.items():
        env, a = ss[0]
        one = images[(name, 0)][0]
        ok, lam = _proportional(one, a, tol)
        labels = sorted({alg.basis[k // m] for k in np.flatnonzero(ok & (np.abs(lam - 1.0) > 1e-6))},
                        key=_label_key)
        self_scalings[name] = labels

    for f in findings:
        logger.info("%s maps onto %s via %s", f.source, f.target, f.path)

    return ScreenReport(alg.name, findings, self_scalings, len(pairs))
