import math

import numpy as np
import pytest
import sympy as sp

from swe_symmetry.errors import (UnsupportedFormError, SubstitutionCycleError,
                                 UnboundSymbolError, PoleError)
from swe_symmetry.symbolic import symbols as S
from swe_symmetry.symbolic.expr import (normalize, is_zero, equals, total_derivative,
                                        substitute, eval_numeric, diff)
from swe_symmetry.symbolic.text import from_text, try_from_text, to_text


class TestSymbols:
    def test_jet_index_is_kept_in_coordinate_order(self):
        assert S.jet("u", "x", "t") is S.jet("u", "t", "x")
        assert str(S.jet("u", "x", "t")) == "u_tx"

    def test_kinds(self):
        assert S.kind_of(S.Omega) == S.PARAMETER
        assert S.kind_of(S.t) == S.COORDINATE
        assert S.kind_of(S.jet("h", "y")) == S.JET
        assert S.kind_of(S.H0) == S.CONSTANT
        assert S.jet_order(S.jet("h", "y")) == 1

    def test_unknown_names_are_rejected(self):
        with pytest.raises(ValueError):
            S.jet("q")
        with pytest.raises(ValueError):
            S.coord("z")

    def test_raise_index(self):
        assert S.raise_index(S.u, S.x) is S.jet("u", "x")
        assert S.raise_index(S.jet("u", "x"), S.t) is S.jet("u", "t", "x")


class TestNormalize:
    t, u = S.t, S.u

    def test_pythagorean_identity(self):
        assert normalize(sp.sin(self.t)**2 + sp.cos(self.t)**2) == 1

    def test_sin_power_reduced(self):
        e = normalize(sp.sin(2*S.Omega*self.t)**3)
        assert all(p.exp < 2 for p in e.atoms(sp.Pow) if isinstance(p.base, sp.sin))

    def test_rational_cancellation(self):
        assert normalize((self.u**2 - 1)/(self.u - 1)) == self.u + 1
        assert is_zero(1/self.u - self.u/self.u**2)

    def test_float_literals_become_rationals(self):
        assert normalize(0.5*self.u) == sp.Rational(1, 2)*self.u

    @pytest.mark.parametrize("e", [sp.sqrt(S.u + S.v), sp.log(S.t), sp.Abs(S.h)])
    def test_unsupported_forms(self, e):
        with pytest.raises(UnsupportedFormError):
            normalize(e)

    def test_equals(self):
        a = sp.cos(self.t)*(1 + sp.sin(self.t))
        b = sp.cos(self.t) + sp.sin(self.t)*sp.cos(self.t)
        assert equals(a, b)
        assert not equals(a, b + self.u)


SIN, COS = sp.sin(2*S.Omega*S.t), sp.cos(2*S.Omega*S.t)
ATOMS = [S.u, S.v, S.h, S.t, S.Omega, SIN, COS]
VARIABLES = [S.u, S.v, S.h, S.t, S.Omega]


def random_poly(rng, terms=3):
    out = sp.Integer(0)
    for _ in range(terms):
        k = int(rng.choice([-3, -2, -1, 1, 2, 3]))
        mono = sp.Integer(1)
        for i in rng.choice(len(ATOMS), size=int(rng.integers(1, 3))):
            mono *= ATOMS[i]**int(rng.integers(1, 3))
        out += k*mono
    return out


def random_expr(rng):
    e = random_poly(rng)
    if rng.random() < 0.5:
        e = e/(random_poly(rng, terms=2)**2 + 1 + S.h**2)
    return e


def raw_values(e, points):
    """ evaluation without normalize, so the zero test is checked independently """
    f = sp.lambdify(VARIABLES, e, modules="math")
    return np.array([f(*p) for p in points])


@pytest.fixture(scope="module")
def rng():
    return np.random.default_rng(2024)


class TestNormalForm:
    def test_idempotent(self, rng):
        for _ in range(20):
            e = normalize(random_expr(rng))
            assert normalize(e) == e

    def test_ring_axioms(self, rng):
        for _ in range(10):
            a, b, c = (random_expr(rng) for _ in range(3))
            assert normalize((a + b)*c) == normalize(a*c + b*c)
            assert normalize(a*b) == normalize(b*a)
            assert normalize((a + b) + c) == normalize(a + (b + c))
            assert normalize(a - a) == 0

    @pytest.mark.parametrize("a,b", [
        ((1 - COS**2)/SIN, SIN),
        (SIN*COS/(1 - COS**2), COS/SIN),
        (SIN**3/(1 + COS), SIN*(1 - COS)),
        ((S.u**2 - 1)/(S.u + 1), S.u - 1),
    ])
    def test_equal_expressions_normalize_identically(self, a, b):
        assert normalize(a) == normalize(b)

    def test_zero_test_is_sound(self, rng):
        points = rng.uniform(0.5, 1.5, size=(100, len(VARIABLES)))
        zeros = [
            SIN**2 + COS**2 - 1,
            (S.u**2 - S.v**2)/(S.u - S.v) - S.u - S.v,
            (1 - COS**2)/SIN - SIN,
        ]
        for _ in range(5):
            a, b = random_expr(rng), random_expr(rng)
            zeros.append((a + b)**2 - a**2 - 2*a*b - b**2)

        for e in zeros:
            assert is_zero(e)
            np.testing.assert_allclose(raw_values(e, points), 0.0, atol=1e-8)

        for _ in range(10):
            e = random_expr(rng)
            if not is_zero(e):
                assert np.abs(raw_values(e, points)).max() > 1e-8


class TestDerivatives:
    def test_total_derivative_product(self):
        h, u = S.h, S.u
        D = total_derivative(h*u, "x")
        assert equals(D, S.jet("h", "x")*u + h*S.jet("u", "x"))

    def test_total_derivative_explicit_dependence(self):
        e = S.t*S.u
        assert equals(total_derivative(e, "t"), S.u + S.t*S.jet("u", "t"))

    def test_order_cap(self):
        with pytest.raises(ValueError):
            total_derivative(S.jet("u", "x"), "t")

    def test_diff_matches_central_difference(self):
        rng = np.random.default_rng(3)
        e = sp.sin(S.Omega*S.t)*S.u**2 + S.t**3/(1 + S.h**2)
        d = diff(e, S.t)
        for _ in range(5):
            env = {"Omega": rng.uniform(0.5, 2), "t": rng.uniform(-1, 1),
                   "u": rng.uniform(-1, 1), "h": rng.uniform(0.5, 1.5)}
            dt = 1e-5
            up = eval_numeric(e, dict(env, t=env["t"] + dt))
            dn = eval_numeric(e, dict(env, t=env["t"] - dt))
            fd = (up - dn)/(2*dt)
            exact = eval_numeric(d, env)
            assert fd == pytest.approx(exact, rel=1e-6, abs=1e-9)


class TestSubstitute:
    def test_bindings(self):
        e = substitute(S.x + 2*S.y, {S.x: S.t, S.y: S.t**2})
        assert e == S.t + 2*S.t**2

    def test_cycle(self):
        with pytest.raises(SubstitutionCycleError):
            substitute(S.x, {S.x: S.y + 1, S.y: S.x})

    def test_string_keys(self):
        assert substitute(S.Omega*S.u, {"Omega": 2}) == 2*S.u

    def test_identity_binding_is_not_a_cycle(self):
        assert substitute(S.g*S.h + S.Omega, {S.g: S.g, S.Omega: 1}) == S.g*S.h + 1


class TestEvalNumeric:
    def test_value(self):
        assert eval_numeric(sp.exp(S.epsilon)*S.g, {"epsilon": 0.5, "g": 2.0}) == \
            pytest.approx(2*math.exp(0.5))

    def test_unbound(self):
        with pytest.raises(UnboundSymbolError) as err:
            eval_numeric(S.g*S.h, {"g": 1.0})
        assert err.value.symbols == ["h"]

    def test_pole(self):
        with pytest.raises(PoleError):
            eval_numeric(1/S.t, {"t": 0})


class TestText:
    def test_registered_names(self):
        e = from_text("2*Omega*h_x - g")
        assert e == 2*S.Omega*S.jet("h", "x") - S.g

    def test_unparseable_cells(self):
        assert try_from_text("ch^{22}(2*Omega*epsilon)") is None
        assert try_from_text(None) is None

    def test_text_form_reparses(self):
        e = normalize(S.Omega*(S.x*sp.cos(2*S.Omega*S.t) + S.y))
        assert equals(from_text(to_text(e)), e)
