""" command-line driver: verify, tables, reduce, integrate, residual """

import argparse
import json
import math
import os
import os.path as osp
import re
import sys

import numpy as np
from tqdm import tqdm

from . import algebra_tables as at
from . import reductions as red
from .catalog import catalog
from .config import UsageError, from_args, load_fixture, SYSTEMS, COMMANDS
from .errata import Errata, verify_catalog, verified_fields, advection_readings
from .errors import FixtureError, SweSymmetryError
from .lie_engine import VectorField
from .logger import Logger
from .ode_num import integrate_fixed, integrate_batch
from .residuals import reconstruct_residual, residual_convergence, probe_grid
from .swe_models import build
from .symbolic import symbols as S

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_UNCORRECTED = 2
EXIT_USAGE = 64
EXIT_NOINPUT = 66

TABLES = {
    "general": ("table1", ["table2"]),
    "equator": ("table3", ["table4"]),
    "pole": ("table5", ["table6", "table6b"]),
}

ADJOINT_SAMPLES = {
    "general": [(e, 1.0) for e in (0.1, 0.5, 1.0)],
    "equator": [(e, 1.0) for e in (0.1, 0.5, 1.0)],
    "pole": [(e, o) for e in (0.1, 0.3) for o in (0.5, 1.0)],
}


### output ###

_FLOAT = "\u0000F:"


def _prepare(obj):
    if isinstance(obj, dict):
        return {str(k): _prepare(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_prepare(v) for v in obj]
    if isinstance(obj, (np.floating, float)) and not isinstance(obj, bool):
        x = float(obj)
        return _FLOAT + ("{:.17g}".format(x) if math.isfinite(x) else "null")
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.ndarray):
        return _prepare(obj.tolist())
    return obj


def dumps(obj):
    """ JSON with sorted keys and 17 significant digits for every float """
    text = json.dumps(_prepare(obj), indent=2, sort_keys=True)
    return re.sub(r'"\\u0000F:([^"]*)"', r"\1", text)


def emit(obj, path=None):
    text = dumps(obj)
    if path is None:
        sys.stdout.write(text + "\n")
    else:
        with open(path, "w") as fp:
            fp.write(text + "\n")


def status(msg):
    print(msg, file=sys.stderr)


def _progress(desc):
    return lambda it: tqdm(it, desc=desc, disable=None, file=sys.stderr)


### shared setup ###

def _system(cfg, advection=None):
    advection = advection or cfg.advection
    b = cfg.bindings()
    if cfg.system == "general":
        return build("general", advection, g=b.get("g", S.g))
    return build(cfg.system, advection, Omega=b.get("Omega", S.Omega), g=b.get("g", S.g))


def _bind_fields(gens, cfg):
    b = {S.param(k): v for k, v in cfg.bindings().items()}
    if not b:
        return gens
    return [VectorField({s: e.xreplace(b) for s, e in V.components.items()}, V.label) for V in gens]


def _verified(cfg, errata):
    gens = _bind_fields(catalog(cfg.system), cfg)
    sys_ = _system(cfg)
    results = verify_catalog(gens, sys_, search=cfg.search, errata=errata,
                             progress=_progress("verify " + cfg.system))
    return gens, sys_, results


### subcommands ###

def cmd_verify(cfg):
    errata = Errata()
    gens, sys_, results = _verified(cfg, errata)

    report = {
        "system": sys_.describe(),
        "generators": {r.label: r.to_json() for r in results},
        "verified": all(r.verified for r in results),
    }
    if cfg.advection == "corrected" and cfg.system != "equator":
        report["advection_readings"] = advection_readings(gens, sys_, _system(cfg, "literal"))
    report["errata"] = errata.to_json()

    emit(report, cfg.out)
    failed = [r.label for r in results if not r.verified]
    if failed:
        status("unexplained failures: {}".format(", ".join(failed)))
        return EXIT_UNCORRECTED
    status("all {} generators verify on the {} system".format(len(results), cfg.system))
    return EXIT_OK


def cmd_tables(cfg):
    errata = Errata()
    comm_name, adj_names = TABLES[cfg.system]
    comm_fix = load_fixture(comm_name, cfg.fixtures)
    adj_fix = [load_fixture(n, cfg.fixtures) for n in adj_names]

    gens, _, results = _verified(cfg, errata)
    alg = at.structure_constants(verified_fields(results, gens), name=cfg.system,
                                 progress=_progress("brackets"))

    reports = [at.commutator_compare(alg, comm_fix)]
    omega = cfg.bindings().get("Omega")
    samples = ADJOINT_SAMPLES[cfg.system] if omega is None else \
        [(e, omega) for e, _ in ADJOINT_SAMPLES[cfg.system]]
    reports += [at.adjoint_compare(alg, f, samples, tol=cfg.tol) for f in adj_fix]

    for rep in reports:
        for c in rep.mismatches():
            errata.add("{}-{}-{}".format(rep.name, c.row, c.col), "{} row {} column {}".format(rep.name, c.row, c.col),
                       c.printed, c.computed, c.detail or "unparseable cell")

    eps, om = samples[0]
    checks = {
        "antisymmetry_defects": len(at.antisymmetry_defects(alg)),
        "jacobi_residuals": len(at.jacobi_residuals(alg)),
        "exp_identity_defect": max(at.exp_identity_defect(alg, i, eps, om) for i in range(alg.dim)),
        "automorphism_defect": max(at.adjoint_automorphism_defect(alg, i, eps, om) for i in range(alg.dim)),
    }

    out = {"algebra": alg.to_json(), "checks": checks,
           "tables": {r.name: r.to_json() for r in reports}}

    if cfg.system in ("general", "equator"):
        reps = load_fixture("optimal_systems", cfg.fixtures)[cfg.system]["representatives"]
        screen = at.optimal_system_screen(alg, reps, Omega_val=om, progress=_progress("screen"))
        out["optimal_system"] = screen.to_json()
        for f in screen.findings:
            errata.add("optimal-{}-{}".format(f.source, f.target), "optimal system of the {} algebra".format(cfg.system),
                       "{} and {} listed as inequivalent".format(f.source, f.target),
                       "conjugate under the adjoint action", "path {}".format(f.path))

    out["errata"] = errata.to_json()

    if cfg.out:
        os.makedirs(cfg.out, exist_ok=True)
        for r in reports:
            with open(osp.join(cfg.out, r.name + ".txt"), "w") as fp:
                fp.write(r.to_text() + "\n")
        emit(out, osp.join(cfg.out, "tables_{}.json".format(cfg.system)))
    else:
        emit(out)

    for r in reports:
        status("{}: {}".format(r.name, r.summary()))
    return EXIT_OK


def cmd_reduce(cfg):
    fix = load_fixture("reductions", cfg.fixtures)
    # always symbolic, numeric --omega/--g are ignored here
    sys_ = build(cfg.system, cfg.advection)
    out = {"system": sys_.label}

    if cfg.system in ("general", "pole"):
        ode = red.derive_travelling_wave(sys_)
        out["travelling_wave"] = {
            "ansatz": red.travelling_wave_ansatz().to_json(),
            "reduced": ode.to_json(),
            "comparison": red.compare_with_printed(ode, fix["travelling_wave"]),
        }
    else:
        ode, closed = red.equator_y2y5()
        derived = red.derive_equator_y2y5(sys_)
        out["equator_y2y5"] = {
            "ansatz": red.y2y5_ansatz().to_json(),
            "reduced": derived.to_json(),
            "printed": ode.to_json(),
            "agreement": {str(derived.derivative(s)): red.compare_forms(derived.rhs[s], ode.rhs[s])
                          for s in red.STATES},
            "closed_form": closed.to_json(),
            "closed_form_residuals": {str(k): str(v) for k, v in ode.residuals(closed).items()},
        }
        y45 = red.derive_equator_y4y5(sys_)
        out["equator_y4y5"] = {
            "ansatz": red.y4y5_ansatz().to_json(),
            "reduced": y45.to_json(),
            "comparison": red.compare_with_printed(y45, fix["equator_y4y5"]),
        }

    emit(out, cfg.out)
    return EXIT_OK


REDUCTIONS = {
    "travelling_wave": lambda sys_: red.derive_travelling_wave(sys_),
    "equator_y4y5": red.derive_equator_y4y5,
}


def cmd_integrate(cfg):
    if cfg.figure:
        figs = load_fixture("figure_ics", cfg.fixtures)
        if cfg.figure not in figs or cfg.figure == "notes":
            raise UsageError("unknown figure {}".format(cfg.figure))
        fig = figs[cfg.figure]
        key, system, params, span = fig["reduction"], fig["system"], fig["params"], fig["span"]
        runs = [[r["H"], r["U"], r["V"]] for r in fig["runs"]]
    else:
        if cfg.ic is None or cfg.span is None:
            raise UsageError("integrate needs --figure or both --ic and --span")
        key = "equator_y4y5" if cfg.system == "equator" else "travelling_wave"
        system, span, runs = cfg.system, cfg.span, [list(cfg.ic)]
        b = cfg.bindings()
        if "Omega" not in b or "g" not in b:
            raise UsageError("custom integration needs numeric --omega and --g")
        params = {"Omega": b["Omega"], "g": b["g"]} if system == "equator" else \
            {"Omega_y": b["Omega"] if system == "general" else 0.0, "Omega_z": b["Omega"], "g": b["g"]}

    sys_ = build("general" if key == "travelling_wave" else "equator", cfg.advection)
    ode = REDUCTIONS[key](sys_)

    out_dir = cfg.out or "."
    os.makedirs(out_dir, exist_ok=True)
    logger = Logger("integrate_" + key, logdir=cfg.logdir, freq=1)

    if cfg.step:
        trajs = [integrate_fixed(ode, y0, span[0], span[1], cfg.step, params=params) for y0 in runs]
    else:
        trajs = integrate_batch(ode, [(y0, span[0], span[1]) for y0 in runs], params=params,
                                workers=cfg.workers, rel_tol=cfg.rel_tol, abs_tol=cfg.abs_tol)

    summary = {"reduction": key, "params": params, "span": span, "runs": []}
    for k, traj in enumerate(trajs):
        path = osp.join(out_dir, "{}_{:02d}.csv".format(key, k))
        traj.to_csv(path)
        logger.push({"samples": len(traj), "events": len(traj.events)})
        summary["runs"].append(dict(traj.to_json(), csv=path))
        if traj.terminated:
            ev = traj.events[0]
            status("run {}: {} event at {} = {:.10g}".format(k, ev.locus, traj.independent, ev.location))

    logger.close()
    emit(summary)
    return EXIT_OK


def cmd_residual(cfg):
    b = cfg.bindings()
    omega, g = b.get("Omega", 1.0), b.get("g", 10.0)
    out = {}

    # closed-form {Y2, Y5} solution
    eq = build("equator", cfg.advection, Omega=S.Omega, g=S.g)
    ode, closed = red.equator_y2y5()
    values = {"Omega": omega, "g": g, "H0": 1.0, "U0": 0.0, "V0": 1.0}
    probes = probe_grid(t=[1.0, 2.0], y=[0.0, 1.0])
    reports, order, monotone = residual_convergence(red.y2y5_ansatz(), closed, eq, cfg.spacings,
                                                    probes, values, ode)
    out["equator_y2y5_closed_form"] = {"reports": [r.to_json() for r in reports],
                                       "order": order, "monotone": monotone}

    # constant state of the pole system
    pole = build("pole", cfg.advection, Omega=S.Omega, g=S.g)
    const = red.ClosedFormSolution(S.t, {S.H: 1, S.U: 0, S.V: 0})
    trivial = red.SimilarityAnsatz("constant", S.t, S.t, {S.h: S.H, S.u: S.U, S.v: S.V})
    rep = reconstruct_residual(trivial, const, pole, cfg.spacings[0], probe_grid(t=[0.5, 1.0], x=[0.0, 1.0]),
                               {"Omega": omega, "g": g})
    out["constant_state"] = rep.to_json()

    # travelling-wave trajectory
    fig = load_fixture("figure_ics", cfg.fixtures)["travelling_wave"]
    general = build("general", cfg.advection)
    tw = red.derive_travelling_wave(general)
    y0 = [fig["runs"][0][k] for k in ("H", "U", "V")]
    traj = integrate_fixed(tw, y0, 0.0, 1.0, 1e-3, params=fig["params"])
    probes = [np.array([0.1, 0.3, 0.2]), np.array([0.2, 0.5, 0.3])]
    reports, order, monotone = residual_convergence(red.travelling_wave_ansatz(), traj, general,
                                                    cfg.spacings, probes, fig["params"], tw)
    out["travelling_wave_trajectory"] = {"reports": [r.to_json() for r in reports],
                                         "order": order, "monotone": monotone}

    emit(out, cfg.out)
    return EXIT_OK


COMMAND_TABLE = {
    "verify": cmd_verify,
    "tables": cmd_tables,
    "reduce": cmd_reduce,
    "integrate": cmd_integrate,
    "residual": cmd_residual,
}


### argument parsing ###

class ArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def make_parser():
    parser = ArgumentParser(prog="swe-symmetry")
    sub = parser.add_subparsers(dest="command")

    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="YAML file with RunConfig fields")
        p.add_argument("--system", help="one of {}".format(", ".join(SYSTEMS)))
        p.add_argument("--omega", help="numeric rotation rate or 'symbolic'")
        p.add_argument("--g", help="numeric gravity or 'symbolic'")
        p.add_argument("--out")
        p.add_argument("--fixtures")
        p.add_argument("--tol", type=float)
        p.add_argument("--advection", help="corrected or literal")

        if name in ("verify", "tables"):
            p.add_argument("--no_search", dest="search", action="store_false", default=None)
        if name == "integrate":
            p.add_argument("--figure")
            p.add_argument("--ic", type=float, nargs=3, metavar=("H", "U", "V"))
            p.add_argument("--span", type=float, nargs=2)
            p.add_argument("--step", type=float)
            p.add_argument("--rel_tol", type=float)
            p.add_argument("--abs_tol", type=float)
            p.add_argument("--workers", type=int)
            p.add_argument("--logdir")
        if name == "residual":
            p.add_argument("--spacings", type=float, nargs="+")

    return parser


def main(argv=None):
    try:
        args = make_parser().parse_args(argv)
        if args.command is None:
            raise UsageError("a subcommand is required: {}".format(", ".join(COMMANDS)))
        cfg = from_args(args)
        return COMMAND_TABLE[cfg.command](cfg)

    except UsageError as e:
        status("usage error: {}".format(e))
        return EXIT_USAGE
    except FixtureError as e:
        status(str(e))
        return EXIT_NOINPUT
    except SweSymmetryError as e:
        status("error: {}".format(e))
        return EXIT_ERROR


if __name__ == '__main__':
    sys.exit(main())
