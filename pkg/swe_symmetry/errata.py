""" documented discrepancies, and the correction search for misprinted generators """

import logging
from dataclasses import dataclass

import numpy as np
import sympy as sp

from .lie_engine import SLOTS, VectorField, NumericCondition, is_symmetry
from .symbolic import symbols as S
from .symbolic.expr import as_expr, normalize
from .symbolic.text import to_text

logger = logging.getLogger(__name__)


# readings fixed once and referenced from every report
STATIC_ERRATA = (
    {"id": "advection", "where": "momentum equations of the general and pole systems",
     "printed": "v*u_x", "adopted": "v*u_y",
     "evidence": "rotation and rotating-boost generators verify only with v*u_y"},
    {"id": "y5-d-V", "where": "equator generator Y5",
     "printed": "t*d_y + d_V", "adopted": "t*d_y + d_v",
     "evidence": "the {Y2,Y5} ansatz v = y/t + V(t) is the invariant of t*d_y + d_v"},
    {"id": "dimension-general", "where": "optimal system of the general algebra",
     "printed": "four-dimensional", "adopted": "three-dimensional",
     "evidence": "only X1, X2, X3 are admitted"},
    {"id": "duplicate-y1-a5y5", "where": "equator optimal system",
     "printed": "{Y1 + a5*Y5} listed twice", "adopted": "one copy",
     "evidence": "identical entries"},
    {"id": "table4-labels", "where": "equator adjoint table",
     "printed": "X1, X2, X3 inside Y rows", "adopted": "Y1, Y2, Y3",
     "evidence": "Y1..Y3 coincide with X1..X3"},
    {"id": "table6-ch22", "where": "pole adjoint table, row Z9 column Z1",
     "printed": "ch^{22}(2*Omega*epsilon)", "adopted": "cell marked unparseable",
     "evidence": "exponent 22 has no counterpart in the neighbouring cells"},
    {"id": "duplicate-pair", "where": "list of reductions",
     "printed": "{Y2,Y5}, {Y2,Y5}, {Y4,Y5}", "adopted": "{Y2,Y5} and {Y4,Y5}",
     "evidence": "the repeated pair has no separate reduction"},
    {"id": "omega-equator", "where": "equator reductions",
     "printed": "Omega", "adopted": "Omega_y (= Omega at the equator)",
     "evidence": "derived reductions of the equator system"},
    {"id": "figure-equation", "where": "caption of the {Y4,Y5} figure",
     "printed": "a fifth reduced equation", "adopted": "the three reduced equations for H_w, U_w, V_w",
     "evidence": "no fifth equation exists"},
)


class Errata:
    """ ledger of every discrepancy a run has found """

    def __init__(self):
        self.entries = [dict(e) for e in STATIC_ERRATA]

    def add(self, id, where, printed, adopted, evidence):
        self.entries.append({"id": id, "where": where, "printed": printed,
                             "adopted": adopted, "evidence": evidence})

    def ids(self):
        return [e["id"] for e in self.entries]

    def to_json(self):
        return sorted(self.entries, key=lambda e: e["id"])


### correction search ###

KINDS = ("swap-uv", "insert-h", "flip-sign", "double", "halve")


@dataclass(frozen=True)
class Correction:
    kind: str
    slot: str
    before: str
    after: str

    def to_json(self):
        return {"kind": self.kind, "slot": self.slot, "before": self.before, "after": self.after}


def _nodes(e, path=()):
    """ editable nodes: everything except numbers and the insides of trig arguments """
    if e.is_Number:
        return
    yield path, e
    if isinstance(e, (sp.sin, sp.cos)):
        return
    for k, a in enumerate(e.args):
        yield from _nodes(a, path + (k,))


def _replace_at(e, path, new):
    if not path:
        return new
    args = list(e.args)
    args[path[0]] = _replace_at(args[path[0]], path[1:], new)
    return e.func(*args)


def _edits(slot, e):
    for path, node in _nodes(e):
        if node in (S.u, S.v):
            yield "swap-uv", path, node, (S.v if node == S.u else S.u)
        if str(slot) == "h":
            yield "insert-h", path, node, S.h*node
        yield "flip-sign", path, node, -node
        yield "double", path, node, 2*node
        yield "halve", path, node, node/2


def candidate_edits(V):
    out = []
    for slot in SLOTS:
        e = V[slot]
        if e == 0:
            continue
        for kind, path, node, new in _edits(slot, e):
            changed = _replace_at(e, path, new)
            delta = VectorField({slot: changed - e})
            if delta.is_zero():
                continue
            out.append((Correction(kind, str(slot), to_text(node), to_text(new)), slot, changed, delta))
    return out


def _parameter_names(V, sys):
    names = set()
    for e in list(sys.params.values()) + list(V.components.values()):
        names |= {str(s) for s in as_expr(e).free_symbols if S.kind_of(s) == S.PARAMETER}
    return sorted(names)


def apply_corrections(V, edits):
    comps = dict(V.components)
    for corr, slot, changed, delta in edits:
        comps[slot] = changed
    return VectorField(comps, label=V.label)


def search_corrections(V, sys, max_depth=2, points=6, tol=1e-9, confirm=8, seed=0):
    """ smallest set of node edits that turns V into a verified symmetry, or None

    Residuals are linear in the field, so every edit is screened numerically
    through the residual of its difference field; only the survivors are
    confirmed symbolically.
    """
    rng = np.random.default_rng(seed)
    names = _parameter_names(V, sys)

    conds = []
    for _ in range(2):
        params = {n: rng.uniform(0.4, 1.9) for n in names}
        cond = NumericCondition(sys, params)
        conds.append((cond, cond.sample(points, seed=int(rng.integers(1 << 30)))))

    def numeric(vf):
        compiled = conds[0][0].compile_field(vf)
        return np.concatenate([c.residual(vf, p, compiled) for c, p in conds])

    r0 = numeric(V)
    scale = 1.0 + np.abs(r0).max()

    edits = candidate_edits(V)
    if not edits:
        return None
    R = np.stack([numeric(d) for _, _, _, d in edits])

    found = []
    single = np.abs(r0[None, :] + R).max(axis=1) < tol*scale
    found += [(k,) for k in np.flatnonzero(single)]

    if max_depth >= 2 and not found:
        pair = np.abs(r0[None, None, :] + R[:, None, :] + R[None, :, :]).max(axis=2) < tol*scale
        for k, l in zip(*np.nonzero(np.triu(pair, 1))):
            if edits[k][1] == edits[l][1]:
                continue
            found.append((k, l))

    found.sort(key=lambda combo: (len(combo), [KINDS.index(edits[k][0].kind) for k in combo]))

    seen = set()
    for combo in found[:confirm]:
        chosen = [edits[k] for k in combo]
        W = apply_corrections(V, chosen)
        key = tuple(to_text(normalize(e)) for e in W.components.values())
        if key in seen:
            continue
        seen.add(key)

        report = is_symmetry(W, sys)
        if report:
            report.corrections = [c[0] for c in chosen]
            logger.info("%s verifies after %s", V.label, ", ".join(c[0].kind for c in chosen))
            return W, report

    return None


### catalog verification ###

@dataclass
class GeneratorResult:
    label: str
    literal: object
    corrected: object = None
    field: object = None

    @property
    def verified(self):
        return bool(self.literal) or bool(self.corrected)

    def to_json(self):
        out = {"literal": self.literal.to_json(), "verified": self.verified}
        if self.corrected is not None:
            out["corrected"] = self.corrected.to_json()
            out["corrected_field"] = self.field.to_json()
        return out


def verify_catalog(gens, sys, search=True, errata=None, progress=None):
    results = []
    for V in (progress(gens) if progress else gens):
        rep = is_symmetry(V, sys)
        res = GeneratorResult(V.label, rep)

        if not rep and search:
            hit = search_corrections(V, sys)
            if hit is not None:
                res.field, res.corrected = hit
                if errata is not None:
                    errata.add("correction-{}".format(V.label.lower()),
                               "generator {}".format(V.label),
                               "; ".join(c.before for c in res.corrected.corrections),
                               "; ".join(c.after for c in res.corrected.corrections),
                               "literal residuals nonzero, corrected field verifies symbolically")
            else:
                logger.warning("%s fails on the %s system and no correction was found", V.label, sys.label)

        results.append(res)
    return results


def advection_readings(gens, corrected_sys, literal_sys):
    """ which generators verify under each reading of the momentum advection term """
    out = {}
    for V in gens:
        out[V.label] = {"corrected": bool(is_symmetry(V, corrected_sys)),
                        "literal": bool(is_symmetry(V, literal_sys))}
    return out


def verified_fields(results, gens):
    """ the catalog with corrected fields substituted where a correction was adopted """
    fixed = {r.label: r.field for r in results if r.field is not None}
    return [fixed.get(V.label, V) for V in gens]
