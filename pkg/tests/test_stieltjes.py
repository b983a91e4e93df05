import math

import mpmath
import numpy as np
import pytest

from finpart import (
    DegenerateBranch,
    ExpansionInvalid,
    StieltjesProblem,
    TailDivergent,
    expand_origin,
    expand_origin_branch,
    expand_origin_pole,
    make_builtin,
    max_modulus,
    naive_vs_corrected,
    pole_exclusion_audit,
    remainder_bounds,
    stieltjes_direct,
)
from finpart.stieltjes import correction_term

INF = math.inf


def P(name, nu, omega, a):
    return StieltjesProblem(make_builtin(name), nu, omega, a)


class TestDirect:
    def test_sqrt_full_line(self):
        assert stieltjes_direct(P("one", 0.5, 1.0, INF)) == pytest.approx(math.pi, rel=1e-11)

    def test_log_two(self):
        assert stieltjes_direct(P("one", 0.0, 1.0, 1.0)) == pytest.approx(math.log(2), rel=1e-14)

    def test_exponential_integral(self):
        assert stieltjes_direct(P("exp_neg", 0.0, 1.0, INF)) == pytest.approx(math.e * float(mpmath.e1(1)), rel=1e-12)

    @pytest.mark.parametrize("name, nu, w, a", [("geom(2)", 0.5, 0.3, 4.0), ("cos", 0.25, 2.0, 3.0), ("exp_neg", 0.75, 0.1, 10.0)])
    def test_vs_mpmath(self, name, nu, w, a):
        f = make_builtin(name)
        g = lambda x: x ** (-nu) * float(np.real(f(np.array([float(x)]))[0])) / (w + x)  # noqa: E731
        # x = a t^4 removes the endpoint singularity for nu <= 3/4
        expected = float(mpmath.quad(lambda t: 4 * a * t**3 * g(a * t**4), [0, 0.5, 1]))
        assert stieltjes_direct(StieltjesProblem(f, nu, w, a)) == pytest.approx(expected, rel=1e-10)

    def test_power_decay_tail(self):
        # ∫_0^∞ (1+x)^-1/2 / (2+x) dx = 2 arctan(1) · 2 / 2 = π/2
        f = make_builtin("power1p(0.5)")
        assert stieltjes_direct(StieltjesProblem(f, 0.0, 2.0, INF)) == pytest.approx(math.pi / 2, rel=1e-11)

    def test_divergent_tail(self):
        with pytest.raises(TailDivergent):
            stieltjes_direct(P("one", 0.0, 1.0, INF))
        with pytest.raises(TailDivergent):
            stieltjes_direct(P("poly(1,1)", 0.5, 1.0, INF))

    def test_problem_validation(self):
        with pytest.raises(ValueError):
            P("one", 0.0, -1.0, 1.0)
        with pytest.raises(ValueError):
            P("one", 1.0, 1.0, 1.0)
        assert P("one", 1e-10, 1.0, 1.0).is_pole


class TestOriginExpansion:
    def test_one_pole(self):
        r = expand_origin_pole(P("one", 0.0, 0.5, 2.0), 30)
        assert r.value == pytest.approx(math.log(5), abs=r.remainder_bounds[-1] + 1e-14)
        assert r.reference == pytest.approx(math.log(5), rel=1e-14)
        # per-term check: Σ_{j>=1} (-1)^(j+1) (ω/a)^j / j + ln a - ln ω
        series = math.fsum((-1) ** (j + 1) * 0.25**j / j for j in range(1, 30)) + math.log(2) - math.log(0.5)
        assert r.value == pytest.approx(series, abs=1e-14)

    def test_exp_neg_pole(self):
        r = expand_origin_pole(P("exp_neg", 0.0, 0.5, 5.0), 25)
        assert r.remainder_bounds[-1] <= 1e-6
        assert abs(r.value - r.reference) <= r.remainder_bounds[-1] + 1e-12

    def test_geom_pole(self):
        r = expand_origin_pole(P("geom(2)", 0.0, 0.5, 1.0), 30)
        assert r.correction_term == pytest.approx(-math.log(0.5) / (1 - 0.25), rel=1e-15)
        assert abs(r.value - r.reference) <= r.remainder_bounds[-1]

    def test_one_branch(self):
        r = expand_origin_branch(P("one", 0.5, 0.25, 2.0), 40)
        assert abs(r.value - r.reference) <= r.remainder_bounds[-1] + 1e-12
        # ∫_0^2 x^-1/2/(ω+x) = 2 ω^-1/2 arctan(sqrt(2/ω))
        assert r.reference == pytest.approx(2 / math.sqrt(0.25) * math.atan(math.sqrt(8)), rel=1e-13)

    def test_exp_neg_branch(self):
        r = expand_origin_branch(P("exp_neg", 0.5, 0.5, 10.0), 30)
        assert abs(r.value - r.reference) <= r.remainder_bounds[-1] + 1e-12

    def test_small_omega_dominated_by_correction(self):
        r = expand_origin_branch(P("one", 0.5, 1e-3, 1.0))
        assert r.correction_term == pytest.approx(math.pi / math.sqrt(1e-3), rel=1e-15)
        assert r.value == pytest.approx(r.reference, rel=1e-6)

    def test_holomorphic_case_uses_rho(self):
        r = expand_origin_pole(P("geom(2)", 0.0, 1.5, 3.0))
        assert r.rho_used == pytest.approx(1.75)
        assert r.ratio == pytest.approx(1.5 / 1.75)
        assert r.remainder_bounds[-1] < 1e-10
        assert abs(r.value - r.reference) <= r.remainder_bounds[-1]

    def test_default_terms_meet_target(self):
        r = expand_origin(P("exp_neg", 0.0, 0.5, 2.0))
        assert r.remainder_bounds[-1] < 1e-10
        assert r.N == 1 or r.remainder_bounds[-2] >= 1e-10

    def test_bounds_geometric(self):
        b = remainder_bounds(P("exp_neg", 0.5, 0.25, 1.0), 20)[0]
        ratios = np.array(b[1:]) / np.array(b[:-1])
        np.testing.assert_allclose(ratios, 0.25, rtol=1e-13)

    def test_infinite_upper_limit(self):
        r = expand_origin(P("exp_neg", 0.0, 1.0, INF))
        assert r.value == pytest.approx(math.e * float(mpmath.e1(1)), rel=1e-13)
        assert all(math.isinf(b) for b in r.remainder_bounds)
        rb = expand_origin(P("exp_neg", 0.5, 1.0, INF))
        expected = math.e * float(mpmath.gammainc(0.5, 1)) * math.gamma(0.5)
        assert rb.value == pytest.approx(expected, rel=1e-12)

    def test_infinite_upper_limit_needs_closed_form(self):
        with pytest.raises(ExpansionInvalid):
            expand_origin(P("geom(2)", 0.0, 1.0, INF))

    @pytest.mark.parametrize("name, w, a", [("one", 2.0, 1.0), ("geom(2)", 2.5, 4.0), ("one", 1.0, 1.0)])
    def test_invalid_omega(self, name, w, a):
        with pytest.raises(ExpansionInvalid):
            expand_origin(P(name, 0.0, w, a))

    def test_wrong_case(self):
        with pytest.raises(DegenerateBranch):
            expand_origin_branch(P("one", 0.0, 0.5, 1.0))
        with pytest.raises(ValueError):
            expand_origin_pole(P("one", 0.5, 0.5, 1.0))


def test_max_modulus():
    assert max_modulus(make_builtin("exp_neg"), 2.0) == pytest.approx(1.01 * math.exp(2.0), rel=1e-6)
    assert max_modulus(make_builtin("geom(2)"), 1.0) == pytest.approx(1.01 * 2.0, rel=1e-6)


class TestAudit:
    def test_n_independent(self):
        p = P("one", 0.5, 0.25, 1.0)
        assert pole_exclusion_audit(p, 5)[0] == pytest.approx(pole_exclusion_audit(p, 10)[0], abs=1e-12)

    def test_equals_correction(self):
        p = P("exp_neg", 0.5, 0.25, 1.0)
        assert pole_exclusion_audit(p, 7)[0] == pytest.approx(correction_term(p), abs=1e-10)

    def test_decay(self):
        assert pole_exclusion_audit(P("one", 0.5, 0.25, 1.0), 20)[1] == pytest.approx(0.25**20, rel=1e-14)

    def test_branch_only(self):
        with pytest.raises(DegenerateBranch):
            pole_exclusion_audit(P("one", 0.0, 0.25, 1.0), 3)


class TestNaiveVsCorrected:
    def test_one_pole(self):
        naive, corrected, missing = naive_vs_corrected(P("one", 0.0, 0.5, 2.0), 30)
        assert missing == pytest.approx(math.log(2), rel=1e-15)
        assert corrected - naive == missing

    def test_exp_neg_pole(self):
        p = P("exp_neg", 0.0, 0.5, 5.0)
        naive, corrected, missing = naive_vs_corrected(p)
        assert missing == pytest.approx(math.exp(0.5) * math.log(2), rel=1e-15)
        assert abs(corrected - stieltjes_direct(p)) <= 1e-10

    def test_one_branch(self):
        _, _, missing = naive_vs_corrected(P("one", 0.5, 0.25, 2.0))
        assert missing == pytest.approx(2 * math.pi, rel=1e-15)
