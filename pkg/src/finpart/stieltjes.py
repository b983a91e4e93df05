"""Incomplete Stieltjes transforms ``∫_0^a x^-ν f(x) / (ω + x) dx``.

Besides direct quadrature, the transform is expanded about ``ω = 0`` by
term-by-term integration of ``1/(ω+x) = Σ (-ω)^j / x^(j+1)``. Each term is a
divergent integral and is replaced by its finite part; the expansion is then
completed by the contribution of the pole at ``z = -ω``:

* ``ν = 0``: ``Σ_j (-ω)^j FPI_j - f(-ω) ln ω``
* ``ν > 0``: ``Σ_j (-ω)^j FPI_j + π f(-ω) / (ω^ν sin πν)``

Dropping that last term gives the naive (wrong) expansion.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .contour import QuadResult, quad_power_weight, real_quad
from .errors import DegenerateBranch, ExpansionInvalid, TailDivergent
from .finite_part import DEFAULT_TOL, NU_SNAP, FpiProblem, fpi_limit
from .functions import AnalyticFunction
from .reference import fpi_exp_branch_infinite, fpi_exp_pole_infinite

BOUND_TARGET = 1e-10
MAX_TERMS = 200
_GRID = 1024


@dataclass(frozen=True)
class StieltjesProblem:
    """``∫_0^a x^-nu f(x) / (omega + x) dx`` with ``a`` finite or ``inf``."""

    f: AnalyticFunction
    nu: float
    omega: float
    a: float

    def __post_init__(self):
        if not self.omega > 0:
            raise ValueError(f"omega must be positive, got {self.omega}")
        if not self.a > 0:
            raise ValueError(f"a must be positive, got {self.a}")
        if not 0.0 <= self.nu < 1.0:
            raise ValueError(f"nu must lie in [0, 1), got {self.nu}")
        if 0.0 < self.nu < NU_SNAP:
            object.__setattr__(self, "nu", 0.0)

    @property
    def is_pole(self) -> bool:
        return self.nu == 0.0

    @property
    def infinite(self) -> bool:
        return math.isinf(self.a)


@dataclass(frozen=True)
class ExpansionResult:
    """Partial sums ``S_n`` (``n = 1..N``) and their certified error bounds.

    ``partial_sums[i]`` and ``remainder_bounds[i]`` refer to ``n = i + 1``
    terms. A bound of ``inf`` means no certified bound is available.
    """

    partial_sums: Tuple[float, ...]
    correction_term: float
    fpi_terms: Tuple[float, ...]
    remainder_bounds: Tuple[float, ...]
    reference: Optional[float]
    rho_used: Optional[float] = None
    ratio: Optional[float] = None

    @property
    def N(self) -> int:
        return len(self.partial_sums)

    @property
    def totals(self) -> Tuple[float, ...]:
        return tuple(s + self.correction_term for s in self.partial_sums)

    @property
    def value(self) -> float:
        return self.totals[-1]


# ---------------------------------------------------------------------------
# direct evaluation
# ---------------------------------------------------------------------------


def _real_eval(f: AnalyticFunction, x):
    v = f.eval(np.asarray(x, dtype=float))
    return np.real(v)


def _estimate_decay(f: AnalyticFunction) -> float:
    lo, hi = 1e4, 1e8
    with np.errstate(all="ignore"):
        flo, fhi = abs(float(_real_eval(f, lo))), abs(float(_real_eval(f, hi)))
    if fhi == 0.0 or not math.isfinite(fhi):
        return math.inf if fhi == 0.0 else -math.inf
    if flo == 0.0:
        return 0.0
    return -math.log(fhi / flo) / math.log(hi / lo)


def _tail(h, s: float, delta: float, tol: float) -> QuadResult:
    """``∫_s^∞ h(x) dx`` for ``|h| ~ x^-(1+delta)``, via ``x = s v^-q``."""
    q = 1.0 if math.isinf(delta) else min(max(1.0 / delta, 0.05), 20.0)

    def g(v):
        v = np.asarray(v, dtype=float)
        out = np.zeros_like(v)
        ok = v > 0
        with np.errstate(all="ignore"):
            x = s * v[ok] ** (-q)
            val = h(x) * q * s * v[ok] ** (-q - 1.0)
        out[ok] = np.where(np.isfinite(val), val, 0.0)
        return out

    return real_quad(g, 0.0, 1.0, rtol=tol, atol=0.0)


def stieltjes_direct(p: StieltjesProblem, tol: float = DEFAULT_TOL) -> float:
    """Evaluate the transform by adaptive quadrature.

    The ``x^-ν`` endpoint singularity is removed by substitution. For
    ``a = inf`` the range is split at ``max(1, ω)`` and the tail mapped onto
    ``(0, 1]`` with an exponent matched to the decay of the integrand.

    Raises
    ------
    TailDivergent
        If ``a = inf`` and ``x^-ν |f(x)|`` does not decay.
    """
    f, nu, w = p.f, p.nu, p.omega

    def h(x):
        return _real_eval(f, x) / (w + x)

    if not p.infinite:
        return quad_power_weight(h, p.a, nu, rtol=tol, atol=0.0).value

    decay = f.decay if f.decay is not None else _estimate_decay(f)
    delta = nu + decay
    if not delta > 1e-9:
        raise TailDivergent(f"x^-{nu:g} {f.label}(x)/(omega+x) is not integrable at infinity")
    s = max(1.0, w)
    head = quad_power_weight(h, s, nu, rtol=tol, atol=0.0)
    tail = _tail(lambda x: x ** (-nu) * h(x), s, delta, tol)
    return head.value + tail.value


# ---------------------------------------------------------------------------
# bounds
# ---------------------------------------------------------------------------


def max_modulus(f: AnalyticFunction, r: float, points: int = _GRID) -> float:
    """Estimate ``M(f, r) = max |f(r e^{iθ})|``.

    The grid maximum is refined once on a fine grid around the best node and
    inflated by 1% to cover what the sampling might miss.
    """
    theta = 2 * math.pi * np.arange(points) / points
    vals = np.abs(f.eval(r * np.exp(1j * theta)))
    k = int(np.argmax(vals))
    step = 2 * math.pi / points
    fine = theta[k] + np.linspace(-step, step, 65)
    best = max(float(vals[k]), float(np.max(np.abs(f.eval(r * np.exp(1j * fine))))))
    return 1.01 * best


def _bound_constants(p: StieltjesProblem) -> Tuple[float, float, Optional[float]]:
    """Return ``(K, ratio, rho)`` with ``B_n = K * ratio**n``."""
    f, nu, w, a = p.f, p.nu, p.omega, p.a
    if p.infinite:
        return math.inf, 0.0, None
    sin_term = abs(math.sin(math.pi * nu))
    if f.zeta0 > a:
        M = max_modulus(f, a)
        if p.is_pole:
            K = a * M * (abs(math.log(a)) + math.pi / 2) / (a - w)
        else:
            K = math.pi * a ** (1 - nu) * M / ((a - w) * sin_term)
        return K, w / a, None
    rho = min(0.5 * (w + a), 0.5 * (w + f.zeta0))
    M = max_modulus(f, rho)
    seg_val = _rho_tail(f, nu, w, rho, a) if rho < a else 0.0
    if p.is_pole:
        K = rho * M * (abs(math.log(rho)) + math.pi / 2) / (rho - w) + seg_val
    else:
        K = math.pi * rho ** (1 - nu) * M / ((rho - w) * sin_term) + seg_val
    return K, w / rho, rho


def _rho_tail(f, nu, w, rho, a) -> float:
    """``∫_ρ^a x^-ν |f(x)| / (ω + x) dx``."""
    res = real_quad(lambda x: x ** (-nu) * np.abs(_real_eval(f, x)) / (w + x), rho, a, rtol=1e-10, atol=0.0)
    return res.value


def remainder_bounds(p: StieltjesProblem, N: int) -> Tuple[Tuple[float, ...], Optional[float], float]:
    """``(B_1..B_N, rho, ratio)`` for the origin expansion of ``p``."""
    K, ratio, rho = _bound_constants(p)
    if math.isinf(K):
        return (math.inf,) * N, rho, ratio
    return tuple(K * ratio**n for n in range(1, N + 1)), rho, ratio


# ---------------------------------------------------------------------------
# origin expansions
# ---------------------------------------------------------------------------


def _check_expandable(p: StieltjesProblem) -> None:
    if p.omega >= p.a:
        raise ExpansionInvalid(f"omega={p.omega} must be below a={p.a}")
    if p.omega >= p.f.zeta0:
        raise ExpansionInvalid(f"omega={p.omega} must be below the singularity radius {p.f.zeta0}")
    if p.nu > 1 - NU_SNAP:
        raise DegenerateBranch(f"nu={p.nu} is too close to 1")


def correction_term(p: StieltjesProblem) -> float:
    """Contribution of the pole at ``z = -ω`` missed by term-by-term integration."""
    fw = float(np.real(p.f.eval(np.array([-p.omega], dtype=float))[0]))
    if p.is_pole:
        return -fw * math.log(p.omega)
    return math.pi * fw / (p.omega**p.nu * math.sin(math.pi * p.nu))


def _fpi_term(p: StieltjesProblem, j: int, tol: float, scale: float = 0.0) -> float:
    """``FPI ∫_0^a f(x) x^-(j+1+ν) dx``.

    The term enters the sum multiplied by ``ω^j``, so it is only resolved to
    an absolute accuracy of ``tol * scale / ω^j``.
    """
    if p.infinite:
        if p.f.label != "exp_neg":
            raise ExpansionInvalid("a = inf expansions need a closed form for the finite parts (exp_neg only)")
        return fpi_exp_pole_infinite(j) if p.is_pole else fpi_exp_branch_infinite(j, p.nu)
    atol = tol * scale / p.omega**j if scale > 0 else 0.0
    return fpi_limit(FpiProblem.make(p.f, p.a, j if p.is_pole else j + 1, p.nu), tol, atol).value


def _default_terms(p: StieltjesProblem, tol: float) -> int:
    if p.infinite:
        # terms decay like omega^j / j!; stop once they vanish against the sum
        total, n = 0.0, 0
        quiet = 0
        while n < MAX_TERMS and quiet < 3:
            t = (-p.omega) ** n * _fpi_term(p, n, tol)
            total += t
            quiet = quiet + 1 if abs(t) <= 1e-17 * max(abs(total), 1e-300) else 0
            n += 1
        return n
    K, ratio, _ = _bound_constants(p)
    if K <= BOUND_TARGET:
        return 1
    if ratio <= 0:
        return MAX_TERMS
    n = math.ceil(math.log(BOUND_TARGET / K) / math.log(ratio))
    while n > 1 and K * ratio ** (n - 1) < BOUND_TARGET:
        n -= 1
    while K * ratio**n >= BOUND_TARGET and n < MAX_TERMS:
        n += 1
    return max(1, min(n, MAX_TERMS))


def _expand(p: StieltjesProblem, N: Optional[int], tol: float, with_reference: bool) -> ExpansionResult:
    _check_expandable(p)
    if N is None:
        N = _default_terms(p, tol)
    if N < 1:
        raise ValueError("N must be at least 1")
    first = _fpi_term(p, 0, tol)
    scale = max(abs(first), abs(correction_term(p))) or 1.0
    fpis = [first] + [_fpi_term(p, j, tol, scale) for j in range(1, N)]
    terms = [(-p.omega) ** j * v for j, v in enumerate(fpis)]
    partial = []
    acc = []
    for t in terms:
        acc.append(t)
        partial.append(math.fsum(acc))
    bounds, rho, ratio = remainder_bounds(p, N)
    ref = None
    if with_reference:
        try:
            ref = stieltjes_direct(p, tol)
        except TailDivergent:
            ref = None
    return ExpansionResult(
        partial_sums=tuple(partial),
        correction_term=correction_term(p),
        fpi_terms=tuple(fpis),
        remainder_bounds=bounds,
        reference=ref,
        rho_used=rho,
        ratio=ratio,
    )


def expand_origin_pole(p: StieltjesProblem, N: Optional[int] = None, tol: float = DEFAULT_TOL, with_reference: bool = True) -> ExpansionResult:
    """Origin expansion for ``ν = 0``: ``Σ (-ω)^j FPI_j - f(-ω) ln ω``.

    Parameters
    ----------
    p : StieltjesProblem
        Must have ``nu == 0`` and ``omega`` below both ``a`` and ``f.zeta0``.
    N : int, optional
        Number of finite-part terms. Defaults to the smallest ``n`` with
        ``B_n < 1e-10`` (at most 200).
    tol : float
        Relative tolerance of each finite-part quadrature.
    with_reference : bool
        Also evaluate :func:`stieltjes_direct` for comparison.

    Raises
    ------
    ExpansionInvalid
        If ``omega >= a`` or ``omega >= f.zeta0``.
    """
    if not p.is_pole:
        raise ValueError("expand_origin_pole needs nu == 0")
    return _expand(p, N, tol, with_reference)


def expand_origin_branch(p: StieltjesProblem, N: Optional[int] = None, tol: float = DEFAULT_TOL, with_reference: bool = True) -> ExpansionResult:
    """Origin expansion for ``0 < ν < 1``: ``Σ (-ω)^j FPI_j + π f(-ω)/(ω^ν sin πν)``.

    Arguments and errors as in :func:`expand_origin_pole`.
    """
    if p.is_pole:
        raise DegenerateBranch("expand_origin_branch needs nu > 0")
    return _expand(p, N, tol, with_reference)


def expand_origin(p: StieltjesProblem, N: Optional[int] = None, tol: float = DEFAULT_TOL, with_reference: bool = True) -> ExpansionResult:
    if p.is_pole:
        return expand_origin_pole(p, N, tol, with_reference)
    return expand_origin_branch(p, N, tol, with_reference)


def pole_exclusion_audit(p: StieltjesProblem, n: int) -> Tuple[float, float]:
    """Residue carried by the remainder after ``n`` terms, and its decay factor.

    With the contour kept off ``z = -ω``, the remainder after ``n`` terms still
    contains ``-2πi Res_{z=-ω}`` of
    ``(-1)^n ω^n f(z) / ((e^{-2πiν} - 1) z^(n+ν) (ω + z))``. Every factor is
    evaluated with its explicit ``n`` dependence so that the cancellation
    can be observed. Returns ``(residue_term, (ω/a)^n)``.
    """
    if p.is_pole:
        raise DegenerateBranch("the audit applies to the branch case nu > 0")
    _check_expandable(p)
    w, nu = p.omega, p.nu
    fw = complex(p.f.eval(np.array([-w], dtype=complex))[0])
    # (-w)^(n+nu) on the cut plane: arg = pi
    zpow = w ** (n + nu) * np.exp(1j * math.pi * (n + nu))
    res = (-1.0) ** n * w**n * fw / ((np.exp(-2j * math.pi * nu) - 1.0) * zpow)
    residue_term = float(np.real(-2j * math.pi * res))
    decay = 0.0 if p.infinite else (w / p.a) ** n
    return residue_term, decay


def naive_vs_corrected(p: StieltjesProblem, N: Optional[int] = None, tol: float = DEFAULT_TOL) -> Tuple[float, float, float]:
    """``(naive, corrected, missing)``: the expansion without and with the pole term."""
    r = expand_origin(p, N, tol, with_reference=False)
    naive = r.partial_sums[-1]
    missing = r.correction_term
    return naive, naive + missing, missing
