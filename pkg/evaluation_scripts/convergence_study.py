import argparse

import numpy as np

from swe_symmetry import reductions as red
from swe_symmetry.config import load_fixture, FIXTURES
from swe_symmetry.ode_num import convergence_order, integrate_fixed, tolerance_sweep, time_reversal
from swe_symmetry.residuals import residual_convergence, probe_grid
from swe_symmetry.swe_models import build


def integrator_study(omega, fixtures):
    """ accuracy on the closed-form {Y2, Y5} system, orders on the travelling wave

    RK4 reproduces the reciprocal decay of {Y2, Y5} to rounding, so its order
    is measured against a fine reference run of the travelling-wave reduction.
    """
    ode, closed = red.equator_y2y5()
    params = {"Omega": omega}
    consts = {"H0": 1.0, "U0": omega, "V0": 1.0, "Omega": omega}
    exact = closed.evaluate(2.0, consts)
    y0 = closed.evaluate(1.0, consts)

    for method, step in [("rk4", 0.05), ("euler", 0.0025)]:
        traj = integrate_fixed(ode, y0, 1.0, 2.0, step, params=params, method=method)
        err = np.abs(traj.final[1] - exact).max()
        print("{:6s} {{Y2, Y5}} error {:.2e} at step {}".format(method, err, step))

    fig = load_fixture("figure_ics", fixtures)["travelling_wave"]
    run = fig["runs"][0]
    wave = red.derive_travelling_wave(build("general"))
    for method, steps in [("rk4", [0.04, 0.02, 0.01]), ("euler", [0.004, 0.002, 0.001])]:
        res = convergence_order(wave, [run["H"], run["U"], run["V"]], 0.0, 0.6, steps,
                                params=fig["params"], method=method)
        print("{:6s} order {:.3f}  errors {}".format(method, res.order, np.array(res.errors)))

    for tol, (state, spread) in tolerance_sweep(ode, y0, 1.0, 2.0, params=params).items():
        print("rel_tol {:.0e}: spread {:.2e}".format(tol, spread))
    print("time reversal defect {:.2e}".format(time_reversal(ode, y0, 1.0, 3.0, params=params)))


def residual_study(omega, g, spacings):
    ode, closed = red.equator_y2y5()
    values = {"Omega": omega, "g": g, "H0": 1.0, "U0": 0.0, "V0": 1.0}
    reports, order, monotone = residual_convergence(
        red.y2y5_ansatz(), closed, build("equator"), spacings,
        probe_grid(t=[1.0, 2.0], y=[0.0, 1.0]), values, ode)

    for r in reports:
        print("spacing {:.2e}: max {:.3e} rms {:.3e}".format(r.spacing, r.max, r.rms))
    print("finite-difference order {:.3f} (monotone: {})".format(order, monotone))


if __name__ == '__main__':
    parser = argparse.ArgumentParser()
    parser.add_argument("--omega", type=float, default=1.0)
    parser.add_argument("--g", type=float, default=10.0)
    parser.add_argument("--spacings", type=float, nargs="+", default=[1e-2, 5e-3, 2.5e-3])
    parser.add_argument("--fixtures", default=FIXTURES)
    args = parser.parse_args()

    print("fixtures: {}".format(sorted(load_fixture("figure_ics", args.fixtures))))
    integrator_study(args.omega, args.fixtures)
    residual_study(args.omega, args.g, args.spacings)
