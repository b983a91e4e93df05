"""Special functions and closed-form targets.

Gamma values come from :func:`math.gamma`/:func:`math.lgamma`; the digamma
function is implemented here (recurrence, reflection and the Stirling-type
asymptotic series). The remaining functions evaluate known series: the
origin expansions of ``E1`` and ``Γ(ν, ω)`` and the large-``ω`` expansion of
``∫_0^∞ (1+x)^-ν (ω+x)^-1 dx``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Optional, Tuple

from .contour import quad_power_weight
from .errors import DegenerateBranch, ExpansionInvalid, GammaPole

EULER_GAMMA = 0.57721566490153286061

# B_{2k} / (2k) for k = 1..8
_DIGAMMA_ASYMPTOTIC = (
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32760.0,
    1.0 / 12.0,
    -3617.0 / 8160.0,
)


def _check_gamma_arg(x: float) -> None:
    if x <= 0 and x == math.floor(x):
        raise GammaPole(f"gamma has a pole at {x}")


def digamma(x: float) -> float:
    """Logarithmic derivative of the gamma function for real ``x``."""
    _check_gamma_arg(x)
    if x < 0.5:
        # psi(1-x) - psi(x) = pi cot(pi x)
        return digamma(1.0 - x) - math.pi / math.tan(math.pi * x)
    shift = 0.0
    while x < 10.0:
        shift -= 1.0 / x
        x += 1.0
    inv2 = 1.0 / (x * x)
    series = 0.0
    p = inv2
    for coef in _DIGAMMA_ASYMPTOTIC:
        series += coef * p
        p *= inv2
    return shift + math.log(x) - 0.5 / x - series


def gamma_digamma(x: float) -> Tuple[float, float]:
    """Return ``(Γ(x), ψ(x))``."""
    _check_gamma_arg(x)
    return math.gamma(x), digamma(x)


def binom_neg(nu: float, s: int) -> float:
    """Generalised binomial ``C(-nu, s)`` by the product recurrence."""
    b = 1.0
    for i in range(s):
        b *= (-nu - i) / (i + 1)
    return b


def _check_nu(nu: float) -> None:
    if not (0.0 < nu < 1.0) or min(nu, 1.0 - nu) < 1e-8:
        raise DegenerateBranch(f"nu must lie strictly inside (0, 1), got {nu}")


# ---------------------------------------------------------------------------
# finite-part integrals of e^-x over (0, inf)
# ---------------------------------------------------------------------------


def fpi_exp_pole_infinite(j: int) -> float:
    """``FPI ∫_0^∞ e^-x x^-(j+1) dx = (-1)^j ψ(j+1) / j!``."""
    if j < 0:
        raise ValueError("j must be non-negative")
    return (-1.0) ** j * digamma(j + 1.0) / math.factorial(j)


def fpi_exp_branch_infinite(j: int, nu: float) -> float:
    """``FPI ∫_0^∞ e^-x x^-(j+1+ν) dx = (-1)^(j+1) Γ(1-ν)Γ(ν) / Γ(j+ν+1)``."""
    if j < 0:
        raise ValueError("j must be non-negative")
    _check_nu(nu)
    mag = math.exp(math.lgamma(1.0 - nu) + math.lgamma(nu) - math.lgamma(j + nu + 1.0))
    return (-1.0) ** (j + 1) * mag


def power_stieltjes(mu: float, omega: float) -> float:
    """``∫_0^∞ x^-μ / (ω + x) dx = π / (sin(πμ) ω^μ)`` for ``0 < μ < 1``."""
    return math.pi / (math.sin(math.pi * mu) * omega**mu)


def fpi_power_stieltjes_infinite(s: int, nu: float, omega: float) -> float:
    """``FPI ∫_0^∞ x^-(s+ν) / (ω + x) dx = (-1)^s π / (ω^(s+ν) sin πν)``."""
    _check_nu(nu)
    return (-1.0) ** s * math.pi / (omega ** (s + nu) * math.sin(math.pi * nu))


# ---------------------------------------------------------------------------
# series
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SeriesTerm:
    power: float
    coeff: float


@dataclass(frozen=True)
class SeriesExpansion:
    """Terms ``coeff * variable**power`` with strictly increasing powers.

    ``variable`` is ``"omega"`` for expansions about the origin and
    ``"1/omega"`` for expansions at infinity.
    """

    kind: str
    terms: Tuple[SeriesTerm, ...]
    variable: str = "omega"

    def __post_init__(self):
        powers = [t.power for t in self.terms]
        if any(b <= a for a, b in zip(powers, powers[1:])):
            raise ValueError("series powers must be strictly increasing")
        if not all(math.isfinite(t.coeff) for t in self.terms):
            raise ValueError("series coefficients must be finite")

    def evaluate(self, omega: float) -> float:
        v = omega if self.variable == "omega" else 1.0 / omega
        return math.fsum(t.coeff * v**t.power for t in self.terms)

    def partial_sums(self, omega: float) -> List[float]:
        v = omega if self.variable == "omega" else 1.0 / omega
        vals = [t.coeff * v**t.power for t in self.terms]
        return [math.fsum(vals[: i + 1]) for i in range(len(vals))]


def e1_series(n_terms: int) -> SeriesExpansion:
    """Coefficients ``ψ(j+1)/j!`` of the inner series of the ``E1`` expansion."""
    terms = []
    psi = -EULER_GAMMA
    inv_fact = 1.0
    for j in range(n_terms):
        if j > 0:
            psi += 1.0 / j
            inv_fact /= j
        terms.append(SeriesTerm(float(j), psi * inv_fact))
    return SeriesExpansion("E1_origin", tuple(terms))


def e1_expansion(omega: float, N: Optional[int] = None) -> float:
    """``E1(ω) = -ln ω + e^-ω Σ_j ψ(j+1) ω^j / j!`` truncated after ``N`` terms.

    With ``N=None`` the sum runs until the terms fall below double precision.
    """
    if omega <= 0:
        raise ValueError("omega must be positive")
    if N is None:
        # terms shrink like omega**j / j!; stop well past the peak at j ~ omega
        N = 5
        t = 1.0
        while N < 2000 and (N <= omega or t > 1e-18):
            t *= omega / N
            N += 1
    inner = e1_series(N).evaluate(omega)
    return -math.log(omega) + math.exp(-omega) * inner


def igamma_series(nu: float, omega: float, N: Optional[int] = None) -> List[float]:
    """Terms ``ω^(j+ν) / Γ(j+ν+1)`` by the ratio recurrence."""
    t = math.exp(nu * math.log(omega) - math.lgamma(nu + 1.0))
    out = []
    j = 0
    while True:
        out.append(t)
        if N is not None and len(out) >= N:
            break
        if N is None and j > omega and t <= 1e-18 * math.fsum(out):
            break
        t *= omega / (j + nu + 1.0)
        j += 1
        if j > 5000:
            break
    return out


def igamma_expansion(nu: float, omega: float, N: Optional[int] = None) -> float:
    """``Γ(ν, ω) = Γ(ν) [1 - e^-ω Σ_j ω^(j+ν) / Γ(j+ν+1)]``."""
    _check_nu(nu)
    if omega <= 0:
        raise ValueError("omega must be positive")
    s = math.fsum(igamma_series(nu, omega, N))
    return math.gamma(nu) * (1.0 - math.exp(-omega) * s)


def canonical_branch_coefficients(nu: float, N: int) -> List[float]:
    """``-Γ(s+1)Γ(1-ν)/Γ(s-ν+2)`` for ``s = 0..N-1`` (coefficient of ``ω^-(s+1)``)."""
    out = []
    b = 1.0 / (1.0 - nu)
    for s in range(N):
        out.append(-b)
        b *= (s + 1.0) / (s + 2.0 - nu)
    return out


def canonical_naive_coefficients(nu: float, N: int) -> List[float]:
    """``(π/sin πν)(-1)^s C(-ν, s)`` for ``s = 0..N-1`` (coefficient of ``ω^-(s+ν)``)."""
    pref = math.pi / math.sin(math.pi * nu)
    out = []
    b = 1.0
    for s in range(N):
        out.append(pref * (-1.0) ** s * b)
        b *= (-nu - s) / (s + 1)
    return out


def third_root_coefficient(s: int) -> float:
    """``3^s (s-1)! / (2·5···(3s-1))``, the ``ω^-s`` coefficient at ``ν = 1/3``."""
    if s < 1:
        raise ValueError("s starts at 1")
    num = 3.0**s * math.factorial(s - 1)
    den = 1.0
    for i in range(1, s + 1):
        den *= 3 * i - 1
    return num / den


def canonical_infinity(nu: float, omega: float, N: int, corrected: bool = True) -> Tuple[SeriesExpansion, float]:
    """Large-``ω`` expansion of ``∫_0^∞ (1+x)^-ν (ω+x)^-1 dx``, ``N`` terms per series.

    The naive variant keeps only the term-by-term series
    ``(π/sin πν) Σ (-1)^s C(-ν,s) ω^-(s+ν)``; the corrected one adds the
    branch-point series ``-Σ Γ(s+1)Γ(1-ν)/Γ(s-ν+2) ω^-(s+1)``.
    """
    _check_nu(nu)
    if omega <= 1:
        raise ExpansionInvalid(f"expansion at infinity needs omega > 1, got {omega}")
    terms = [SeriesTerm(s + nu, c) for s, c in enumerate(canonical_naive_coefficients(nu, N))]
    kind = "infinity_canonical_naive"
    if corrected:
        kind = "infinity_canonical_corrected"
        terms += [SeriesTerm(s + 1.0, c) for s, c in enumerate(canonical_branch_coefficients(nu, N))]
    terms.sort(key=lambda t: t.power)
    series = SeriesExpansion(kind, tuple(terms), variable="1/omega")
    return series, series.evaluate(omega)


def canonical_branch_integral(nu: float, omega: float, tol: float = 1e-12) -> float:
    """Branch-point contribution ``-∫_0^1 (1-x)^-ν (ω-x)^-1 dx`` by quadrature."""
    _check_nu(nu)
    if omega <= 1:
        raise ExpansionInvalid(f"omega={omega} puts the pole inside [0, 1]")
    # u = 1 - x moves the endpoint singularity to the origin
    res = quad_power_weight(lambda u: 1.0 / (omega - 1.0 + u), 1.0, nu, rtol=tol, atol=0.0)
    return -res.value
