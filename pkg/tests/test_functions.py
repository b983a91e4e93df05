import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from finpart import AnalyticFunction, BranchSpec, ContourHitsSingularity, UnknownFunction, cauchy_taylor, make_builtin, user_function
from finpart.functions import cut_arg, log_cut, pow_cut


@pytest.mark.parametrize(
    "name, k, expected",
    [
        ("one", 0, 1.0),
        ("one", 3, 0.0),
        ("exp_neg", 3, -1.0 / 6.0),
        ("cos", 4, 1.0 / 24.0),
        ("cos", 5, 0.0),
        ("geom(2)", 3, -0.125),
        ("poly(1,2,3)", 2, 3.0),
        ("poly(1,2,3)", 3, 0.0),
        ("power1p(0.5)", 2, 0.375),
    ],
)
def test_builtin_taylor_coefficients(name, k, expected):
    assert make_builtin(name).coefficient(k) == pytest.approx(expected, abs=1e-15)


def test_geom_singularity_data():
    f = make_builtin("geom(2)")
    assert f.zeta0 == 2.0
    assert f.poles == ((-2 + 0j, 1),)
    assert f.nearest_singularity_is_pole()
    assert not make_builtin("power1p(0.3)").nearest_singularity_is_pole()


def test_entire_builtins_have_infinite_radius():
    for name in ("one", "exp_neg", "cos", "poly(1,2,3)"):
        assert make_builtin(name).is_entire


@pytest.mark.parametrize("name", ["sin", "geom()", "geom(1,2)", "poly()", "geom(x)", "", "geom(-1)"])
def test_unknown_names_rejected(name):
    with pytest.raises(UnknownFunction):
        make_builtin(name)


def test_evaluation_on_complex_points():
    z = np.array([0.3 + 0.4j, -1.0 + 0.0j])
    np.testing.assert_allclose(make_builtin("exp_neg")(z), np.exp(-z))
    np.testing.assert_allclose(make_builtin("geom(2)")(z), 1 / (1 + z / 2))
    np.testing.assert_allclose(make_builtin("poly(1,2,3)")(z), 1 + 2 * z + 3 * z**2)


@pytest.mark.parametrize("name", ["exp_neg", "cos", "geom(2)", "power1p(0.25)"])
def test_cauchy_coefficients_match_exact(name):
    f = make_builtin(name)
    r = min(0.5, f.zeta0 / 2)
    for k in range(8):
        assert cauchy_taylor(f, k, r) == pytest.approx(f.coefficient(k), abs=1e-13)


def test_cauchy_radius_must_avoid_singularity():
    with pytest.raises(ContourHitsSingularity):
        cauchy_taylor(make_builtin("geom(2)"), 1, 2.0)


@settings(max_examples=30, deadline=None)
@given(r=st.floats(0.2, 1.8), k=st.integers(0, 10))
def test_cauchy_coefficient_independent_of_radius(r, k):
    f = make_builtin("geom(2)")
    assert abs(cauchy_taylor(f, k, r) - (-0.5) ** k) <= 1e-12 * max(1.0, r ** (-k))


def test_user_function_without_taylor_uses_cauchy():
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        f = user_function(lambda z: np.exp(2 * z), zeta0=math.inf, label="exp2")
    for k in range(6):
        assert f.coefficient(k) == pytest.approx(2.0**k / math.factorial(k), rel=1e-12)


def test_user_function_warns_when_radius_unknown():
    with pytest.warns(UserWarning, match="zeta0"):
        f = user_function(lambda z: z, label="lin")
    assert f.is_entire
    assert f.diagnostics


def test_poles_tighten_radius():
    f = AnalyticFunction(eval=lambda z: 1 / (z - 3), zeta0=10.0, poles=((3, 1),))
    assert f.zeta0 == 3.0


def test_sum_and_product_keep_taylor_data():
    e, g = make_builtin("exp_neg"), make_builtin("geom(2)")
    s, p = e + g, e * g
    for k in range(6):
        assert s.coefficient(k) == pytest.approx(e.coefficient(k) + g.coefficient(k))
        assert p.coefficient(k) == pytest.approx(sum(e.coefficient(i) * g.coefficient(k - i) for i in range(k + 1)))
    assert p.zeta0 == 2.0
    assert p.decay == math.inf
    x = np.array([0.1, 0.7])
    np.testing.assert_allclose(p(x), np.exp(-x) / (1 + x / 2))


def test_scaled():
    f = make_builtin("cos").scaled(3.0)
    assert f.coefficient(2) == pytest.approx(-1.5)
    assert (2 * make_builtin("one")).coefficient(0) == 2.0


class TestBranchConventions:
    def test_cut_arg_range(self):
        z = np.array([1j, -1 + 0j, -1j, 1 - 1e-12j])
        np.testing.assert_allclose(cut_arg(z), [math.pi / 2, math.pi, 1.5 * math.pi, 2 * math.pi], atol=1e-11)

    def test_log_jump_across_cut(self):
        assert log_cut(2.0, 2 * math.pi) - log_cut(2.0, 0.0) == pytest.approx(2j * math.pi)

    def test_power_positive_on_top(self):
        b = BranchSpec(0.25)
        assert b.power(4.0, 0.0) == pytest.approx(4.0**-0.25)
        assert b.power(4.0, 2 * math.pi) == pytest.approx(4.0**-0.25 * b.lower_edge_factor())

    def test_pow_cut_on_negative_axis(self):
        assert pow_cut(-4.0, math.pi, 0.5) == pytest.approx(2j)

    def test_nu_range(self):
        with pytest.raises(ValueError):
            BranchSpec(1.0)
        assert BranchSpec(0.0).is_pole
