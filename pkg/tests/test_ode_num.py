import json

import numpy as np
import pytest
import sympy as sp

from swe_symmetry import reductions as red
from swe_symmetry.errors import IntegrationError, UnboundSymbolError
from swe_symmetry.ode_num import (NumericOde, integrate_fixed, integrate_adaptive, convergence_order,
                                  fit_order, time_reversal, tolerance_sweep, integrate_batch)
from swe_symmetry.swe_models import build_equator
from swe_symmetry.symbolic import symbols as S


PARAMS = {"Omega": 1.0}


@pytest.fixture(scope="module")
def decay():
    """ H' = -H/t, U' = Omega H/t, V' = -V/t """
    ode, _ = red.equator_y2y5()
    return ode


def exact_decay(t, H0=1.0, U0=0.0, V0=1.0, Omega=1.0):
    return np.array([H0/t, -H0*Omega/t + U0 + H0*Omega, V0/t])


@pytest.fixture(scope="module")
def rotation():
    """ H' = cos(w), U' = -V, V' = U; RK4 is not exact on it, unlike the reciprocal decay """
    return red.ReducedOde("rotation", S.w, {S.H: sp.cos(S.w), S.U: -S.V, S.V: S.U}, [])


def exact_rotation(w):
    return np.array([np.sin(w), np.cos(w), np.sin(w)])


@pytest.fixture
def ramp():
    """ H' = 1 from H = 1, with a locus at H = 3/2 """
    return red.ReducedOde("ramp", S.w, {S.H: sp.Integer(1), S.U: sp.Integer(0), S.V: sp.Integer(0)},
                          [("H-3/2", S.H - sp.Rational(3, 2))])


class TestFixedStep:
    def test_reciprocal_decay(self, decay):
        traj = integrate_fixed(decay, [1.0, 0.0, 1.0], 1.0, 2.0, 1e-3, params=PARAMS)
        z, y = traj.final
        assert z == 2.0
        assert y[2] == pytest.approx(0.5, abs=1e-9)
        assert y[0] == pytest.approx(0.5, abs=1e-9)
        assert y[1] == pytest.approx(exact_decay(2.0)[1], abs=1e-9)

    def test_rk4_reproduces_reciprocal_decay(self, decay):
        for step in (0.05, 0.0125):
            traj = integrate_fixed(decay, [1.0, 0.0, 1.0], 1.0, 2.0, step, params=PARAMS)
            np.testing.assert_allclose(traj.final[1], exact_decay(2.0), atol=1e-12)

    def test_halving_step(self, rotation):
        errs = []
        for step in (0.05, 0.025):
            traj = integrate_fixed(rotation, [0.0, 1.0, 0.0], 0.0, 2.0, step)
            errs.append(np.abs(traj.final[1] - exact_rotation(2.0)).max())
        assert errs[0]/errs[1] == pytest.approx(16.0, rel=0.1)

    def test_rk4_order(self, rotation):
        res = convergence_order(rotation, [0.0, 1.0, 0.0], 0.0, 2.0, [0.1, 0.05, 0.025],
                                method="rk4", exact=exact_rotation(2.0))
        assert res.order == pytest.approx(4.0, abs=0.2)
        assert res.confident

    def test_euler_order(self, decay):
        res = convergence_order(decay, [1.0, 0.0, 1.0], 1.0, 2.0, [0.01, 0.005, 0.0025], params=PARAMS,
                                method="euler", exact=exact_decay(2.0))
        assert res.order == pytest.approx(1.0, abs=0.2)
        assert res.confident

    def test_backwards(self, decay):
        traj = integrate_fixed(decay, exact_decay(2.0), 2.0, 1.0, 1e-3, params=PARAMS)
        np.testing.assert_allclose(traj.final[1], [1.0, 0.0, 1.0], atol=1e-9)
        assert np.all(np.diff(traj.z) < 0)

    def test_crossing_event(self, ramp):
        traj = integrate_fixed(ramp, [1.0, 0.0, 0.0], 0.0, 1.0, 0.03)
        assert traj.terminated
        ev = traj.events[0]
        assert ev.locus == "H-3/2" and ev.kind == "crossing"
        assert ev.location == pytest.approx(0.5, abs=1e-9)
        assert abs(ev.value) < 1e-10
        assert traj.z[-1] < 0.5

    def test_invalid_arguments(self, decay):
        with pytest.raises(ValueError):
            integrate_fixed(decay, [1.0, 0.0, 1.0], 1.0, 2.0, -0.1, params=PARAMS)
        with pytest.raises(ValueError):
            integrate_fixed(decay, [1.0, 0.0, 1.0], 1.0, 2.0, 0.1, params=PARAMS, method="rk45")


class TestNumericOde:
    def test_unbound_parameter(self, decay):
        with pytest.raises(UnboundSymbolError):
            NumericOde(decay, {})

    def test_non_finite_parameter(self, decay):
        with pytest.raises(ValueError):
            NumericOde(decay, {"Omega": float("nan")})

    def test_start_on_locus(self, decay):
        with pytest.raises(IntegrationError):
            integrate_adaptive(decay, [1.0, 0.0, 1.0], 0.0, 1.0, params=PARAMS)

    def test_call(self, decay):
        F = NumericOde(decay, PARAMS)
        np.testing.assert_allclose(F(2.0, np.array([1.0, 0.0, 4.0])), [-0.5, 0.5, -2.0])
        np.testing.assert_allclose(F.loci(2.0, np.zeros(3)), [2.0])


class TestAdaptive:
    def test_reciprocal_decay(self, decay):
        traj = integrate_adaptive(decay, [1.0, 0.0, 1.0], 1.0, 2.0, params=PARAMS)
        np.testing.assert_allclose(traj.final[1], exact_decay(2.0), atol=1e-7)
        assert traj.meta["accepted"] > 0

    def test_tolerance_sweep(self, decay):
        out = tolerance_sweep(decay, [1.0, 0.0, 1.0], 1.0, 2.0, params=PARAMS)
        assert out[1e-6][1] < 10*1e-6
        assert out[1e-9][1] == 0.0

    def test_time_reversal(self, decay):
        assert time_reversal(decay, [1.0, 0.0, 1.0], 1.0, 3.0, params=PARAMS) < 100*1e-10

    def test_crossing_event(self, ramp):
        traj = integrate_adaptive(ramp, [1.0, 0.0, 0.0], 0.0, 2.0)
        ev = traj.events[-1]
        assert ev.locus == "H-3/2"
        assert ev.location == pytest.approx(0.5, abs=1e-9)

    def test_equator_y4y5_reaches_crossing(self, fixtures):
        fig = fixtures("figure_ics")["equator_y4y5"]
        ode = red.derive_equator_y4y5(build_equator())
        run = fig["runs"][0]
        traj = integrate_adaptive(ode, [run["H"], run["U"], run["V"]], *fig["span"], params=fig["params"])

        assert traj.terminated
        ev = traj.events[-1]
        assert ev.locus == "U-w"
        assert abs(ev.value) < 1e-10
        assert fig["span"][0] < ev.location < fig["span"][1]
        assert np.all(traj.states[:, 0] > 0)

    def test_batch(self, decay):
        runs = [([1.0, 0.0, 1.0], 1.0, 2.0), ([2.0, 0.0, 2.0], 1.0, 2.0)]
        trajs = integrate_batch(decay, runs, params=PARAMS, workers=2, progress=False)
        np.testing.assert_allclose(trajs[1].final[1][2], 1.0, atol=1e-7)
        assert len(trajs) == 2


class TestTrajectory:
    def test_dense_output(self, decay):
        traj = integrate_fixed(decay, [1.0, 0.0, 1.0], 1.0, 2.0, 0.01, params=PARAMS)
        spline = traj.dense()
        np.testing.assert_allclose(spline(1.505), exact_decay(1.505), atol=1e-8)
        assert traj.covers(1.0, 2.0)
        assert not traj.covers(0.5, 2.0)

    def test_csv(self, decay, tmp_path):
        traj = integrate_fixed(decay, [1.0, 0.0, 1.0], 1.0, 1.1, 0.05, params=PARAMS)
        path = tmp_path / "run.csv"
        traj.to_csv(path)

        lines = path.read_text().splitlines()
        assert lines[0] == "t,H,U,V,dH,dU,dV"
        data = np.loadtxt(path, delimiter=",", skiprows=1)
        assert data.shape == (3, 7)
        np.testing.assert_array_equal(data[:, 1:4], traj.states)

        sidecar = json.loads((tmp_path / "run.csv.events.json").read_text())
        assert sidecar["events"] == []
        assert sidecar["meta"]["method"] == "rk4"


class TestFitOrder:
    def test_slope(self):
        steps = [0.1, 0.05, 0.025]
        order, monotone = fit_order(steps, [3*s**2 for s in steps])
        assert order == pytest.approx(2.0)
        assert monotone

    def test_non_monotone(self):
        order, monotone = fit_order([0.1, 0.05, 0.025], [1e-3, 2e-3, 1e-4])
        assert not monotone
