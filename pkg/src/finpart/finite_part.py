"""Hadamard finite-part integrals ``FPI ∫_0^a f(x) / x**(m+nu) dx``.

Two independent routes are provided:

* the limit definition, evaluated in Taylor-subtracted form so that only a
  convergent remainder integral is left for quadrature;
* the contour representation, ``(1/2πi) ∫_C f(z)(log z - iπ) z^-(n+1) dz``
  for integer orders and ``(e^{-2πiν} - 1)^-1 ∫_C f(z) z^-(m+ν) dz`` otherwise,
  with ``C`` running from ``a`` around the origin back to ``a``.

A third, purely diagnostic route extrapolates the raw ``ε``-regularised
integral with Richardson steps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from .contour import Contour, QuadResult, enclosed_poles, integrate_contour, quad_power_weight, real_quad
from .errors import DegenerateBranch, InvalidContour, NotDivergent
from .functions import TWO_PI, AnalyticFunction, BranchSpec, pow_cut

_EPS = np.finfo(float).eps
NU_SNAP = 1e-8
TAIL_TERMS = 60
DEFAULT_TOL = 1e-12


@dataclass(frozen=True)
class Divergence:
    """One dropped term of ``D_ε``: ``coefficient * ε**(-exponent)`` or, for
    ``kind == "log"``, ``coefficient * ln ε``."""

    kind: str
    exponent: Optional[float]
    coefficient: float

    def as_dict(self):
        return {"kind": self.kind, "exponent": self.exponent, "coefficient": self.coefficient}


@dataclass(frozen=True)
class FpiResult:
    value: float
    dropped_divergences: Tuple[Divergence, ...] = ()
    method: str = "limit"
    error_estimate: float = 0.0
    diagnostics: Tuple[str, ...] = field(default=(), compare=False)

    def as_dict(self):
        return {
            "value": self.value,
            "method": self.method,
            "dropped_divergences": [d.as_dict() for d in self.dropped_divergences],
            "error_estimate": self.error_estimate,
        }


@dataclass(frozen=True)
class FpiProblem:
    """``FPI ∫_0^a f(x) x^-(n+1) dx`` (``nu == 0``) or ``f(x) x^-(m+nu)``.

    ``n_or_m`` is ``n >= 0`` in the pole case and ``m >= 1`` in the branch
    case. Use :meth:`pole`, :meth:`branch_case` or :meth:`from_power` rather than
    filling the fields by hand.
    """

    f: AnalyticFunction
    a: float
    n_or_m: int
    branch: BranchSpec = BranchSpec()

    def __post_init__(self):
        if not (self.a > 0 and math.isfinite(self.a)):
            raise ValueError(f"upper limit must be finite and positive, got {self.a}")
        nu = self.branch.nu
        if 0 < nu < NU_SNAP:
            object.__setattr__(self, "branch", BranchSpec(0.0))
        elif nu > 1 - NU_SNAP:
            raise DegenerateBranch(f"nu={nu} is too close to 1")
        if self.is_pole and self.n_or_m < 0:
            raise ValueError("pole order n must be >= 0")
        if not self.is_pole and self.n_or_m < 1:
            raise ValueError("branch case needs m >= 1")

    @classmethod
    def pole(cls, f, a, n) -> "FpiProblem":
        return cls(f, a, int(n), BranchSpec(0.0))

    @classmethod
    def branch_case(cls, f, a, m, nu) -> "FpiProblem":
        if nu <= NU_SNAP:
            raise DegenerateBranch(f"nu={nu} selects the pole case")
        if nu >= 1 - NU_SNAP:
            raise DegenerateBranch(f"nu={nu} is too close to 1")
        return cls(f, a, int(m), BranchSpec(float(nu)))

    @classmethod
    def make(cls, f, a, n_or_m, nu=0.0) -> "FpiProblem":
        """Pole case if ``nu`` is (within 1e-8 of) zero, branch case otherwise."""
        if nu < NU_SNAP:
            return cls.pole(f, a, n_or_m)
        return cls.branch_case(f, a, n_or_m, nu)

    @classmethod
    def from_power(cls, f, a, power: float) -> "FpiProblem":
        """Problem for the integrand ``f(x) / x**power`` with ``power >= 1``."""
        m = math.floor(power + NU_SNAP)
        nu = power - m
        if abs(nu) < NU_SNAP:
            return cls.pole(f, a, m - 1)
        return cls.branch_case(f, a, m, nu)

    @property
    def nu(self) -> float:
        return self.branch.nu

    @property
    def is_pole(self) -> bool:
        return self.branch.is_pole

    @property
    def power(self) -> float:
        return self.n_or_m + 1 if self.is_pole else self.n_or_m + self.nu


# ---------------------------------------------------------------------------
# Taylor-subtracted remainder
# ---------------------------------------------------------------------------


def taylor_quotient(f: AnalyticFunction, x, j: int, extra: int = TAIL_TERMS):
    """``(f(x) - sum_{k<=j} c_k x^k) / x^(j+1)`` for real ``x > 0``.

    Near the origin the subtraction cancels catastrophically, so each point
    uses whichever of two forms has the smaller error estimate: the direct
    difference, or the Taylor tail ``sum_{k>j} c_k x^(k-j-1)``.
    """
    x = np.asarray(x, dtype=float)
    c = f.coefficients(j + extra)
    head = c[: j + 1]
    tail = c[j + 1 :]
    with np.errstate(all="ignore"):
        # tail form, Horner in x
        t_val = np.zeros_like(x, dtype=c.dtype)
        for ck in tail[::-1]:
            t_val = t_val * x + ck
        powers = x[..., None] ** np.arange(len(tail))
        mags = np.abs(tail) * powers
        t_round = _EPS * mags.sum(axis=-1)
        t_trunc = 10 * np.maximum(mags[..., -1], mags[..., -2]) if len(tail) > 1 else 0.0
        t_err = t_round + t_trunc

        # direct form, Horner in 1/x
        y = 1.0 / x
        fx = f.eval(x)
        if np.iscomplexobj(fx):
            fx = fx.real
        h_val = np.zeros_like(x, dtype=c.dtype)
        h_abs = np.zeros_like(x)
        for ck in head:
            h_val = (h_val + ck) * y
            h_abs = (h_abs + abs(ck)) * y
        yj = y ** (j + 1)
        d_val = fx * yj - h_val
        d_err = _EPS * (np.abs(fx) * yj + h_abs)
        d_err = np.where(np.isfinite(d_val), d_err, np.inf)

        use_tail = t_err <= d_err
        out = np.where(use_tail, t_val, d_val)
    return np.real(out) if not np.iscomplexobj(c) else out


def _pole_divergences(c, n) -> Tuple[Divergence, ...]:
    out = [Divergence("power", float(n - k), float(np.real(c[k])) / (n - k)) for k in range(n) if c[k] != 0]
    if c[n] != 0:
        out.append(Divergence("log", None, -float(np.real(c[n]))))
    return tuple(out)


def _branch_divergences(c, m, nu) -> Tuple[Divergence, ...]:
    return tuple(
        Divergence("power", m + nu - j - 1, float(np.real(c[j])) / (m + nu - j - 1))
        for j in range(m)
        if c[j] != 0
    )


def _clean_coeffs(f, order):
    c = np.array(f.coefficients(order), dtype=complex if np.iscomplexobj(f.coefficients(order)) else float)
    if f.taylor is None:
        # coefficients recovered numerically: snap rounding noise to zero
        scale = max(1.0, float(np.max(np.abs(c))))
        c[np.abs(c) <= 1e-13 * scale] = 0
    return np.real(c)


def fpi_limit_pole(p: FpiProblem, tol: float = DEFAULT_TOL, atol: float = 0.0) -> FpiResult:
    """Limit-definition FPI for ``f(x)/x^(n+1)``.

    Uses ``-sum_{k<n} c_k / ((n-k) a^(n-k)) + c_n ln a + ∫_0^a R_{n+1}(x)/x^(n+1) dx``.
    """
    if not p.is_pole:
        raise ValueError("fpi_limit_pole needs nu == 0")
    n, a, f = p.n_or_m, p.a, p.f
    c = _clean_coeffs(f, n)
    parts = [-c[k] / ((n - k) * a ** (n - k)) for k in range(n)] + [c[n] * math.log(a)]
    const = math.fsum(parts)
    atol = max(atol, tol * math.fsum(abs(t) for t in parts))
    rem = real_quad(lambda x: taylor_quotient(f, x, n), 0.0, a, rtol=tol, atol=atol)
    return FpiResult(
        value=const + rem.value,
        dropped_divergences=_pole_divergences(c, n),
        method="limit",
        error_estimate=rem.abs_error_estimate,
    )


def fpi_limit_branch(p: FpiProblem, tol: float = DEFAULT_TOL, atol: float = 0.0) -> FpiResult:
    """Limit-definition FPI for ``f(x)/x^(m+nu)``, ``0 < nu < 1``."""
    if p.is_pole:
        raise ValueError("fpi_limit_branch needs nu > 0")
    m, nu, a, f = p.n_or_m, p.nu, p.a, p.f
    c = _clean_coeffs(f, m - 1)
    parts = [-c[j] / ((m + nu - j - 1) * a ** (m + nu - j - 1)) for j in range(m)]
    const = math.fsum(parts)
    # the remainder cannot usefully be resolved below the rounding of the constant part
    atol = max(atol, tol * math.fsum(abs(t) for t in parts))
    rem = quad_power_weight(lambda x: taylor_quotient(f, x, m - 1), a, nu, rtol=tol, atol=atol)
    return FpiResult(
        value=const + rem.value,
        dropped_divergences=_branch_divergences(c, m, nu),
        method="limit",
        error_estimate=rem.abs_error_estimate,
    )


def fpi_limit(p: FpiProblem, tol: float = DEFAULT_TOL, atol: float = 0.0) -> FpiResult:
    """Limit-definition FPI; ``atol`` caps the absolute accuracy requested."""
    return fpi_limit_pole(p, tol, atol) if p.is_pole else fpi_limit_branch(p, tol, atol)


# ---------------------------------------------------------------------------
# contour route
# ---------------------------------------------------------------------------


def default_contour(f: AnalyticFunction, a: float) -> Contour:
    """Circle of radius ``a`` when it stays clear of ``f``'s singularities,
    otherwise a circle of radius ``zeta0/2`` with a two-edge tail out to ``a``."""
    if a < 0.8 * f.zeta0:
        return Contour.circle(a)
    return Contour.keyhole(0.5 * f.zeta0, a)


def default_rectangle(f: AnalyticFunction, a: float) -> Contour:
    """Rectangle counterpart of :func:`default_contour`."""
    if math.isinf(f.zeta0):
        return Contour.rectangle(a, 0.75 * a)
    r = min(a, 0.5 * f.zeta0)
    if r >= a:
        return Contour.rectangle(a, 0.5 * a)
    return Contour("rect", a, h=r, rho=r)


def check_contour(c: Contour, f: AnalyticFunction, a: float) -> None:
    """Reject contours that do not represent the FPI over ``[0, a]``."""
    if abs(c.a - a) > 1e-12 * a:
        raise InvalidContour(f"contour ends at {c.a}, problem has a = {a}")
    inside = enclosed_poles(c, f)
    if inside:
        raise InvalidContour(f"contour encloses poles of f at {inside}")
    if not f.nearest_singularity_is_pole() and c.closed_max_modulus >= f.zeta0:
        raise InvalidContour("contour reaches a non-pole singularity of f")


def _finish_contour(value: complex, err: float, p: FpiProblem, divergences, method="contour") -> FpiResult:
    limit = 1e-9 * (1 + abs(value.real))
    if abs(value.imag) > max(limit, 10 * err):
        raise InvalidContour(f"contour value has imaginary part {value.imag:.3e}; f is not analytic inside C")
    return FpiResult(
        value=float(value.real),
        dropped_divergences=divergences,
        method=method,
        error_estimate=float(err),
    )


def fpi_contour_pole(p: FpiProblem, c: Optional[Contour] = None, tol: float = DEFAULT_TOL) -> FpiResult:
    """``(1/2πi) ∫_C f(z) (log z - iπ) / z^(n+1) dz``."""
    if not p.is_pole:
        raise ValueError("fpi_contour_pole needs nu == 0")
    f, n = p.f, p.n_or_m
    c = c or default_contour(f, p.a)
    check_contour(c, f, p.a)

    def g(z, arg):
        return f.eval(z) * (np.log(np.abs(z)) + 1j * (arg - math.pi)) / z ** (n + 1)

    res = integrate_contour(g, c, tol=tol, lifted=True)
    value = res.value / (2j * math.pi)
    divergences = _pole_divergences(_clean_coeffs(f, n), n)
    return _finish_contour(value, res.abs_error_estimate / TWO_PI, p, divergences)


def fpi_contour_branch(p: FpiProblem, c: Optional[Contour] = None, tol: float = DEFAULT_TOL) -> FpiResult:
    """``(e^{-2πiν} - 1)^-1 ∫_C f(z) z^-(m+ν) dz``, ``z^-ν`` positive on top of the cut."""
    if p.is_pole:
        raise ValueError("fpi_contour_branch needs nu > 0")
    f, m, nu = p.f, p.n_or_m, p.nu
    c = c or default_contour(f, p.a)
    check_contour(c, f, p.a)

    def g(z, arg):
        return f.eval(z) * pow_cut(z, arg, -(m + nu))

    res = integrate_contour(g, c, tol=tol, lifted=True)
    factor = 1.0 / (np.exp(-2j * math.pi * nu) - 1.0)
    value = res.value * factor
    divergences = _branch_divergences(_clean_coeffs(f, m - 1), m, nu)
    return _finish_contour(value, res.abs_error_estimate * abs(factor), p, divergences)


def fpi_contour(p: FpiProblem, c: Optional[Contour] = None, tol: float = DEFAULT_TOL) -> FpiResult:
    return fpi_contour_pole(p, c, tol) if p.is_pole else fpi_contour_branch(p, c, tol)


# ---------------------------------------------------------------------------
# closed form and diagnostics
# ---------------------------------------------------------------------------


def fpi_monomial_closed(n_or_m: int, nu: float, a: float) -> float:
    """``FPI ∫_0^a x^-(n+nu) dx = -1 / ((n+nu-1) a^(n+nu-1))``; ``ln a`` when ``n+nu == 1``."""
    if a <= 0:
        raise ValueError("a must be positive")
    if not 0 <= nu < 1:
        raise ValueError("nu must lie in [0, 1)")
    if n_or_m <= 0 and nu == 0:
        raise NotDivergent("x**0 is integrable; there is nothing to regularise")
    s = n_or_m + nu - 1
    if s == 0:
        return math.log(a)
    return -1.0 / (s * a**s)


def _divergent_part(divs, eps):
    out = 0.0
    for d in divs:
        out += d.coefficient * (math.log(eps) if d.kind == "log" else eps ** (-d.exponent))
    return out


def fpi_epsilon_limit(p: FpiProblem, k_min: int = 4, k_max: int = 20, tol: float = 1e-13) -> FpiResult:
    """Diagnostic: ``lim_{ε→0} [∫_ε^a f/x^s dx - D_ε]`` on ``ε = a 2^-k``.

    The regularised values are Richardson-extrapolated using the known error
    exponents (``1, 2, ...`` for poles, ``1-ν, 2-ν, ...`` for branch points).
    Levels whose divergent part would swamp double precision are skipped, so
    only low orders extrapolate well.
    """
    f, a, s = p.f, p.a, p.power
    c = _clean_coeffs(f, p.n_or_m)
    divs = _pole_divergences(c, p.n_or_m) if p.is_pole else _branch_divergences(c, p.n_or_m, p.nu)

    def integrand(x):
        fx = f.eval(x)
        return (fx.real if np.iscomplexobj(fx) else fx) / x**s

    levels = []
    cum = 0.0
    err = 0.0
    for k in range(k_max + 1):
        hi = a * 2.0**-k
        if k > 0:
            piece = real_quad(integrand, hi, 2 * hi, rtol=tol, atol=0.0)
            cum += piece.value
            err += piece.abs_error_estimate
        if k < k_min:
            continue
        d = sum(abs(dv.coefficient) * (abs(math.log(hi)) if dv.kind == "log" else hi ** (-dv.exponent)) for dv in divs)
        if len(levels) > 2 and _EPS * d > 1e-11 * (1 + abs(levels[-1])):
            break
        levels.append(cum - _divergent_part(divs, hi))

    gammas = [float(i) for i in range(1, len(levels))] if p.is_pole else [i - p.nu for i in range(1, len(levels))]
    table = [levels]
    for g in gammas:
        prev = table[-1]
        if len(prev) < 2:
            break
        r = 2.0**g
        table.append([(r * prev[i + 1] - prev[i]) / (r - 1) for i in range(len(prev) - 1)])
    best, best_err = table[0][-1], abs(table[0][-1] - table[0][-2]) if len(table[0]) > 1 else math.inf
    for col_prev, col in zip(table, table[1:]):
        e = abs(col[-1] - col_prev[-1])
        if e < best_err:
            best, best_err = col[-1], e
    return FpiResult(
        value=float(best),
        dropped_divergences=divs,
        method="epsilon",
        error_estimate=float(best_err + err),
        diagnostics=(f"levels used: {len(levels)}",),
    )


def fpi_limit_at_infinity(f: AnalyticFunction, n_or_m: int, nu: float = 0.0, a_values=(10.0, 20.0, 40.0)) -> Tuple[float, float]:
    """Large-``a`` limit of the finite-part integral, for rapidly decaying ``f``.

    Returns the value at the largest ``a`` and the change from the previous
    one, which bounds the truncation when ``f`` decays exponentially.
    """
    vals: List[float] = [fpi_limit(FpiProblem.make(f, a, n_or_m, nu)).value for a in a_values]
    return vals[-1], abs(vals[-1] - vals[-2]) if len(vals) > 1 else math.inf
