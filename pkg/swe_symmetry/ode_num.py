""" explicit Runge-Kutta integration of reduced systems with singular-locus events """

import json
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicHermiteSpline
from tqdm import tqdm

from .errors import IntegrationError, UnboundSymbolError

logger = logging.getLogger(__name__)


### Butcher tableaus (c, A, b, b_err) ###

TABLEAUS = {
    "euler": ([0.0], [[]], [1.0], None),
    "rk4": ([0.0, 0.5, 0.5, 1.0],
            [[], [0.5], [0.0, 0.5], [0.0, 0.0, 1.0]],
            [1/6, 1/3, 1/3, 1/6], None),
    # Dormand-Prince 5(4), first-same-as-last
    "dopri5": ([0.0, 1/5, 3/10, 4/5, 8/9, 1.0, 1.0],
               [[],
                [1/5],
                [3/40, 9/40],
                [44/45, -56/15, 32/9],
                [19372/6561, -25360/2187, 64448/6561, -212/729],
                [9017/3168, -355/33, 46732/5247, 49/176, -5103/18656],
                [35/384, 0.0, 500/1113, 125/192, -2187/6784, 11/84]],
               [35/384, 0.0, 500/1113, 125/192, -2187/6784, 11/84, 0.0],
               [5179/57600, 0.0, 7571/16695, 393/640, -92097/339200, 187/2100, 1/40]),
}

ORDER = {"euler": 1, "rk4": 4, "dopri5": 5}


class NumericOde:
    """ a ReducedOde bound to numeric parameters """

    def __init__(self, ode, params=None):
        values = {str(k): float(v) for k, v in (params or {}).items()}
        f, loci, names = ode.compile()

        missing = [str(p) for p in names if str(p) not in values]
        if missing:
            raise UnboundSymbolError(missing)
        bad = [k for k, v in values.items() if not math.isfinite(v)]
        if bad:
            raise ValueError("non-finite parameters: {}".format(", ".join(bad)))

        self.name = ode.name
        self.independent = str(ode.independent)
        self.labels = [str(s) for s in ode.states]
        self.locus_names = [k for k, _ in ode.singular_locus]
        self._f, self._loci = f, loci
        self._pv = [values[str(p)] for p in names]

    def __call__(self, z, y):
        with np.errstate(all="ignore"):
            return np.array(self._f(z, *y, *self._pv), dtype=float)

    def loci(self, z, y):
        if not self.locus_names:
            return np.zeros(0)
        with np.errstate(all="ignore"):
            return np.array(self._loci(z, *y, *self._pv), dtype=float).reshape(-1)


def as_numeric(ode, params=None):
    return ode if isinstance(ode, NumericOde) else NumericOde(ode, params)


@dataclass
class Event:
    locus: str
    location: float
    state: list
    value: float
    kind: str = "crossing"

    def to_json(self):
        return {"locus": self.locus, "location": self.location, "state": list(self.state),
                "value": self.value, "kind": self.kind}


@dataclass
class Trajectory:
    """ samples of the independent variable with states and derivatives, and the event log """
    z: np.ndarray
    states: np.ndarray
    derivs: np.ndarray
    events: list = field(default_factory=list)
    meta: dict = field(default_factory=dict)
    labels: tuple = ("H", "U", "V")
    independent: str = "w"

    def __len__(self):
        return len(self.z)

    @property
    def final(self):
        return self.z[-1], self.states[-1]

    @property
    def terminated(self):
        return bool(self.events)

    def dense(self):
        """ cubic Hermite interpolant on the stored (value, derivative) pairs """
        order = np.argsort(self.z)
        return CubicHermiteSpline(self.z[order], self.states[order], self.derivs[order], axis=0)

    def covers(self, lo, hi):
        zmin, zmax = self.z.min(), self.z.max()
        return zmin <= lo and hi <= zmax

    def to_csv(self, path):
        header = ",".join([self.independent] + list(self.labels) + ["d" + l for l in self.labels])
        data = np.column_stack([self.z, self.states, self.derivs])
        np.savetxt(path, data, delimiter=",", header=header, comments="", fmt="%.17g")

        with open(str(path) + ".events.json", "w") as fp:
            json.dump({"events": [e.to_json() for e in self.events], "meta": self.meta},
                      fp, indent=2, sort_keys=True)

    def to_json(self):
        return {"samples": len(self), "final": {"z": float(self.z[-1]),
                "state": [float(s) for s in self.states[-1]]},
                "events": [e.to_json() for e in self.events], "meta": self.meta}


### stepping ###

def _stages(F, z, y, h, c, A):
    k = []
    for ci, row in zip(c, A):
        yi = y + h*sum(a*kj for a, kj in zip(row, k)) if row else y
        k.append(F(z + ci*h, yi))
    return k


def _step(F, z, y, h, method):
    c, A, b, _ = TABLEAUS[method]
    k = _stages(F, z, y, h, c, A)
    return y + h*sum(bi*ki for bi, ki in zip(b, k))


def _finite(*arrays):
    return all(np.all(np.isfinite(a)) for a in arrays)


def _check_start(F, z, y, event_tol):
    l0 = F.loci(z, y)
    near = np.flatnonzero(~(np.abs(l0) > event_tol))
    if near.size:
        raise IntegrationError("initial state lies on singular locus {}".format(F.locus_names[near[0]]),
                               location=z, state=y)
    f0 = F(z, y)
    if not _finite(f0):
        raise IntegrationError("non-finite right-hand side at the initial state", location=z, state=y)
    return np.sign(l0), f0


def _bisect(F, advance, z, h, sign0, crossed, tol, iters=200):
    """ earliest crossing inside the step; advance(theta) is the state at z + theta h """
    best = None
    for i in crossed:
        lo, hi = 0.0, 1.0
        theta, val = 1.0, None
        for _ in range(iters):
            mid = 0.5*(lo + hi)
            val = F.loci(z + mid*h, advance(mid))[i]
            theta = mid
            if abs(val) < tol:
                break
            if np.sign(val) == sign0[i]:
                lo = mid
            else:
                hi = mid
        if best is None or theta < best[0]:
            best = (theta, i, val)

    theta, i, val = best
    return Event(F.locus_names[i], float(z + theta*h),
                 [float(s) for s in advance(theta)], float(val))


def _secant(F, advance, z, h_prev, l_prev, l_now, i, tol, iters=60):
    """ locus approach from the last valid state, secant in the step length """
    d0, g0 = -h_prev, l_prev
    d1, g1 = 0.0, l_now
    for _ in range(iters):
        if g1 == g0:
            break
        d2 = d1 - g1*(d1 - d0)/(g1 - g0)
        g2 = F.loci(z + d2, advance(d2))[i]
        if not math.isfinite(g2):
            break
        d0, g0, d1, g1 = d1, g1, d2, g2
        if abs(g1) < tol:
            break
    return Event(F.locus_names[i], float(z + d1), [float(s) for s in advance(d1)],
                 float(g1), kind="locus approach")


def integrate_fixed(ode, y0, start, end, step, params=None, method="rk4", event_tol=1e-10):
    """ fixed-step explicit RK from start to end (end < start integrates backwards) """
    if step <= 0:
        raise ValueError("step must be positive")
    if method not in ("euler", "rk4"):
        raise ValueError("unknown fixed-step method {}".format(method))

    F = as_numeric(ode, params)
    z, y = float(start), np.asarray(y0, dtype=float)
    sign0, f = _check_start(F, z, y, event_tol)
    direction = 1.0 if end >= start else -1.0

    zs, ys, fs, events = [z], [y], [f], []
    n = int(math.ceil(abs(end - start)/step - 1e-9))
    for k in range(n):
        h = direction*min(step, abs(end - z))
        y1 = _step(F, z, y, h, method)
        l1 = F.loci(z + h, y1)

        crossed = np.flatnonzero(np.sign(l1) != sign0)
        if crossed.size:
            events.append(_bisect(F, lambda th: _step(F, z, y, th*h, method), z, h,
                                  sign0, crossed, event_tol))
            break

        f1 = F(z + h, y1)
        if not _finite(y1, f1):
            raise IntegrationError("non-finite state at {} = {}".format(F.independent, z + h),
                                   location=z + h, state=y1)

        z, y = (start + (k + 1)*direction*step if k + 1 < n else float(end)), y1
        zs.append(z); ys.append(y); fs.append(f1)

    meta = {"method": method, "step": step, "steps": len(zs) - 1}
    return Trajectory(np.array(zs), np.array(ys), np.array(fs), events, meta,
                      tuple(F.labels), F.independent)


def integrate_adaptive(ode, y0, start, end, params=None, rel_tol=1e-8, abs_tol=1e-10,
                       h0=None, event_tol=1e-10, max_steps=200000, safety=0.9):
    """ Dormand-Prince 5(4) with PI step control; stops at the first singular-locus event """
    F = as_numeric(ode, params)
    z, y = float(start), np.asarray(y0, dtype=float)
    sign0, f = _check_start(F, z, y, event_tol)
    direction = 1.0 if end >= start else -1.0
    span = abs(end - start)

    c, A, b, be = TABLEAUS["dopri5"]
    h = direction*(h0 or min(1e-3*span, 1e-2))
    h_min = 1e-14*max(1.0, abs(start), abs(end))
    err_prev = 1.0
    accepted = rejected = 0

    zs, ys, fs, events = [z], [y], [f], []
    l_prev = l_now = F.loci(z, y)
    h_prev = 0.0

    def advance_from(z0, y0_, dz):
        k = _stages(F, z0, y0_, dz, c, A)
        return y0_ + dz*sum(bi*ki for bi, ki in zip(b, k))

    while direction*(end - z) > 0:
        if accepted + rejected >= max_steps:
            raise IntegrationError("maximum number of steps exceeded", location=z, state=y)
        if abs(end - z) < abs(h):
            h = end - z

        k = _stages(F, z, y, h, c, A)
        y5 = y + h*sum(bi*ki for bi, ki in zip(b, k))
        y4 = y + h*sum(bi*ki for bi, ki in zip(be, k))

        # locus sign is checked before the error estimate
        l1 = F.loci(z + h, y5)
        crossed = np.flatnonzero(np.sign(l1) != sign0)
        if crossed.size and _finite(l1):
            z0, y0_, h0_ = z, y, h
            events.append(_bisect(F, lambda th: advance_from(z0, y0_, th*h0_), z0, h0_,
                                  sign0, crossed, event_tol))
            break

        scale = abs_tol + rel_tol*np.maximum(np.abs(y), np.abs(y5))
        err = np.sqrt(np.mean(((y5 - y4)/scale)**2)) if _finite(y5, y4) else np.inf

        if err <= 1.0:
            f1 = F(z + h, y5)
            if not _finite(f1):
                err = np.inf
        if err <= 1.0:
            h_prev = h
            z, y = z + h, y5
            zs.append(z); ys.append(y); fs.append(f1)
            accepted += 1
            l_prev, l_now = l_now, l1

            near = np.flatnonzero(np.abs(l1) < event_tol)
            if near.size:
                i = int(near[0])
                events.append(Event(F.locus_names[i], float(z), [float(s) for s in y],
                                    float(l1[i]), kind="locus approach"))
                break

            fac = safety*err**(-0.7/5)*err_prev**(0.4/5) if err > 0 else 5.0
            h *= min(5.0, max(0.2, fac))
            err_prev = max(err, 1e-4)
        else:
            rejected += 1
            fac = safety*err**(-1/5) if math.isfinite(err) else 0.2
            h *= min(1.0, max(0.1, fac))

        if abs(h) < h_min:
            if not len(F.locus_names):
                raise IntegrationError("step size underflow", location=z, state=y)
            i = int(np.argmin(np.abs(l_now)))
            z0, y0_ = z, y
            events.append(_secant(F, lambda d: advance_from(z0, y0_, d), z0, h_prev,
                                  l_prev[i], l_now[i], i, event_tol))
            break

    meta = {"method": "dopri5", "rel_tol": rel_tol, "abs_tol": abs_tol,
            "accepted": accepted, "rejected": rejected}
    return Trajectory(np.array(zs), np.array(ys), np.array(fs), events, meta,
                      tuple(F.labels), F.independent)


### diagnostics ###

@dataclass
class ConvergenceResult:
    order: float
    steps: list
    errors: list
    monotone: bool

    @property
    def confident(self):
        return self.monotone

    def to_json(self):
        return {"order": self.order, "steps": self.steps, "errors": self.errors,
                "monotone": self.monotone}


def fit_order(steps, errors):
    """ least-squares slope of log error against log step """
    steps, errors = np.asarray(steps, dtype=float), np.asarray(errors, dtype=float)
    slope, _ = np.polyfit(np.log(steps), np.log(errors), 1)
    order = np.argsort(steps)
    monotone = bool(np.all(np.diff(errors[order]) > 0))
    if not monotone:
        logger.warning("error sequence is not monotone in the step size: %s", errors.tolist())
    return float(slope), monotone


def convergence_order(ode, y0, start, end, steps, params=None, method="rk4", exact=None):
    """ endpoint error against `exact` or against a run at an eighth of the finest step """
    F = as_numeric(ode, params)
    if exact is None:
        ref = integrate_fixed(F, y0, start, end, min(steps)/8, method=method).final[1]
    else:
        ref = np.asarray(exact, dtype=float)

    errors = []
    for s in steps:
        traj = integrate_fixed(F, y0, start, end, s, method=method)
        if traj.terminated:
            raise IntegrationError("singular event inside the convergence range",
                                   location=traj.events[0].location)
        errors.append(float(np.abs(traj.final[1] - ref).max()))

    order, monotone = fit_order(steps, errors)
    return ConvergenceResult(order, list(steps), errors, monotone)


def time_reversal(ode, y0, start, end, params=None, rel_tol=1e-10, abs_tol=1e-12):
    """ max |y_back(start) - y0| after integrating to end and back """
    F = as_numeric(ode, params)
    fwd = integrate_adaptive(F, y0, start, end, rel_tol=rel_tol, abs_tol=abs_tol)
    if fwd.terminated:
        raise IntegrationError("singular event on the forward leg", location=fwd.events[0].location)
    z1, y1 = fwd.final
    back = integrate_adaptive(F, y1, z1, start, rel_tol=rel_tol, abs_tol=abs_tol)
    return float(np.abs(back.final[1] - np.asarray(y0, dtype=float)).max())


def tolerance_sweep(ode, y0, start, end, params=None, tols=(1e-6, 1e-9)):
    """ endpoint state per relative tolerance, and the spread against the tightest """
    F = as_numeric(ode, params)
    finals = {}
    for tol in tols:
        traj = integrate_adaptive(F, y0, start, end, rel_tol=tol, abs_tol=tol*1e-2)
        finals[tol] = traj.final[1]
    tight = finals[min(tols)]
    return {tol: (finals[tol], float(np.abs(finals[tol] - tight).max())) for tol in tols}


def integrate_batch(ode, runs, params=None, workers=4, progress=True, **kwargs):
    """ independent adaptive runs, runs = [(y0, start, end), ...] """
    F = as_numeric(ode, params)

    def one(run):
        y0, start, end = run
        return integrate_adaptive(F, y0, start, end, **kwargs)

    with ThreadPoolExecutor(max_workers=workers) as pool:
        results = pool.map(one, runs)
        if progress:
            results = tqdm(results, total=len(runs), desc=ode.name if hasattr(ode, "name") else None)
        return list(results)
