""" finite-difference residuals of reconstructed fields in the full PDE system """

import itertools
import logging
from dataclasses import dataclass, field

import numpy as np

from .errors import RangeError, UnboundSymbolError
from .ode_num import Trajectory, fit_order
from .reductions import ClosedFormSolution, STATES
from .symbolic import symbols as S
from .symbolic.expr import as_expr, compile_numeric

logger = logging.getLogger(__name__)

COORDS = (S.t, S.x, S.y)
FIELDS = (S.h, S.u, S.v)


@dataclass
class ResidualReport:
    spacing: float
    max: float
    rms: float
    per_equation: list
    probes: int
    excluded: list = field(default_factory=list)

    def to_json(self):
        return {"spacing": self.spacing, "max": self.max, "rms": self.rms,
                "per_equation": self.per_equation, "probes": self.probes,
                "excluded": self.excluded}


def _free_params(exprs):
    out = set()
    for e in exprs:
        out |= {s for s in as_expr(e).free_symbols if S.kind_of(s) == S.PARAMETER}
    return sorted(out, key=str)


def _bind(names, values):
    missing = [str(p) for p in names if str(p) not in values]
    if missing:
        raise UnboundSymbolError(missing)
    return [values[str(p)] for p in names]


def state_function(solution, values):
    """ z -> (H, U, V) for a closed form or a trajectory, with its valid range """
    if isinstance(solution, ClosedFormSolution):
        return (lambda z: solution.evaluate(z, values)), (-np.inf, np.inf)
    if isinstance(solution, Trajectory):
        spline = solution.dense()
        return spline, (float(solution.z.min()), float(solution.z.max()))
    return solution, (-np.inf, np.inf)


class FieldReconstruction:
    """ h, u, v at (t, x, y) through an ansatz and a solution of its reduced system """

    def __init__(self, ansatz, solution, values):
        self.ansatz = ansatz
        self.values = {str(k): float(v) for k, v in values.items()}
        self.states, self.range = state_function(solution, self.values)

        exprs = [ansatz.fields[f] for f in FIELDS]
        self._wp = _free_params([ansatz.w_expr])
        self._fp = _free_params(exprs)
        self._w = compile_numeric([ansatz.w_expr], list(COORDS) + self._wp)
        self._f = compile_numeric(exprs, list(COORDS) + list(STATES) + self._fp)

    def similarity(self, p):
        return float(self._w(*p, *_bind(self._wp, self.values))[0])

    def __call__(self, p):
        z = self.similarity(p)
        lo, hi = self.range
        if not lo <= z <= hi:
            raise RangeError("{} = {:.6g} outside the solution range [{:.6g}, {:.6g}]".format(
                self.ansatz.variable, z, lo, hi))
        st = np.asarray(self.states(z), dtype=float)
        return np.array(self._f(*p, *st, *_bind(self._fp, self.values)), dtype=float)


class PdeEvaluator:
    """ H^A of a system from field values and first partials """

    def __init__(self, sys, values):
        eqs = sys.equations()
        self.jets = [S.jet(str(a), str(c)) for a in FIELDS for c in COORDS]
        self.params = _free_params(eqs)
        self._pv = _bind(self.params, {str(k): float(v) for k, v in values.items()})
        self._f = compile_numeric(eqs, list(COORDS) + list(FIELDS) + self.jets + self.params)

    def __call__(self, p, vals, grads):
        """ grads[a][c] = d field_a / d coord_c """
        return np.array(self._f(*p, *vals, *grads.reshape(-1), *self._pv), dtype=float)


def _near_locus(ode, values, z, st, tol):
    if ode is None or not ode.singular_locus:
        return None
    _, loci, names = ode.compile()
    pv = _bind(names, values)
    vals = np.array(loci(z, *st, *pv), dtype=float).reshape(-1)
    for (name, _), v in zip(ode.singular_locus, vals):
        if not abs(v) > tol:
            return "{} = {:.3e}".format(name, v)
    return None


def reconstruct_residual(ansatz, solution, sys, spacing, probes, values=None, ode=None, locus_tol=1e-6):
    """ central-difference residuals of sys at the probe points for one grid spacing """
    values = {str(k): float(v) for k, v in (values or {}).items()}
    fields = FieldReconstruction(ansatz, solution, values)
    pde = PdeEvaluator(sys, values)

    res, excluded = [], []
    for p in probes:
        p = np.asarray(p, dtype=float)
        z = fields.similarity(p)
        note = _near_locus(ode, values, z, fields.states(z), locus_tol)
        if note is not None:
            excluded.append({"probe": p.tolist(), "note": note})
            logger.info("probe %s excluded, %s", p.tolist(), note)
            continue

        grads = np.zeros((3, 3))
        for c in range(3):
            e = np.zeros(3)
            e[c] = spacing
            grads[:, c] = (fields(p + e) - fields(p - e))/(2*spacing)
        res.append(pde(p, fields(p), grads))

    if not res:
        return ResidualReport(spacing, float("nan"), float("nan"), [], 0, excluded)

    R = np.abs(np.array(res))
    return ResidualReport(spacing, float(R.max()), float(np.sqrt(np.mean(R**2))),
                          R.max(axis=0).tolist(), len(res), excluded)


def residual_convergence(ansatz, solution, sys, spacings, probes, values=None, ode=None):
    """ residual reports over the spacings and the fitted order of the max residual """
    reports = [reconstruct_residual(ansatz, solution, sys, d, probes, values, ode) for d in spacings]
    order, monotone = fit_order([r.spacing for r in reports], [r.max for r in reports])
    return reports, order, monotone


def probe_grid(**axes):
    """ cartesian product of per-coordinate probe values, in (t, x, y) order """
    return [np.array(p, dtype=float) for p in itertools.product(*(axes.get(str(c), [0.0]) for c in COORDS))]
