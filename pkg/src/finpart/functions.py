"""Integrand model: complex extension, Taylor data at the origin, singularities.

Every finite-part and Stieltjes routine consumes an :class:`AnalyticFunction`.
Built-ins carry exact Taylor coefficients; user functions may omit them, in
which case coefficients are recovered numerically from the Cauchy integral.
"""

from __future__ import annotations

import math
import re
import warnings
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Tuple

import numpy as np

from .errors import ContourHitsSingularity, UnknownFunction

TWO_PI = 2.0 * math.pi

Pole = Tuple[complex, int]


# ---------------------------------------------------------------------------
# branch conventions: cut on the positive real axis, arg z in [0, 2*pi)
# ---------------------------------------------------------------------------


def cut_arg(z):
    """Argument of ``z`` in ``[0, 2*pi)``; only meaningful off the cut."""
    return np.mod(np.angle(z), TWO_PI)


def log_cut(z, arg):
    """``log z`` with the cut on the positive real axis.

    ``arg`` is supplied by the caller (usually a contour) so that the two
    edges of the cut can be told apart: ``arg = 0`` on top, ``2*pi`` below.
    """
    return np.log(np.abs(z)) + 1j * np.asarray(arg)


def pow_cut(z, arg, exponent):
    """``z**exponent`` on the same branch as :func:`log_cut`."""
    return np.abs(z) ** exponent * np.exp(1j * exponent * np.asarray(arg))


@dataclass(frozen=True)
class BranchSpec:
    """Exponent ``nu`` of ``x**(-nu)`` plus the fixed branch conventions.

    ``log z`` and ``z**(-nu)`` both use ``arg z`` in ``[0, 2*pi)``: real on the
    upper edge of the positive axis, while the lower edge picks up ``+2*pi*i``
    in the logarithm and a factor ``exp(-2*pi*i*nu)`` in the power.
    """

    nu: float = 0.0

    def __post_init__(self):
        if not (0.0 <= self.nu < 1.0):
            raise ValueError(f"nu must lie in [0, 1), got {self.nu!r}")

    @property
    def is_pole(self) -> bool:
        return self.nu == 0.0

    def log(self, z, arg):
        return log_cut(z, arg)

    def power(self, z, arg):
        """``z**(-nu)`` on the cut plane."""
        return pow_cut(z, arg, -self.nu)

    def lower_edge_factor(self) -> complex:
        return complex(np.exp(-2j * math.pi * self.nu))


# ---------------------------------------------------------------------------
# AnalyticFunction
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AnalyticFunction:
    """An integrand ``f`` with a known complex extension.

    Parameters
    ----------
    eval : callable
        Vectorised evaluation of ``f(z)``; must accept real or complex arrays.
    taylor : callable, optional
        ``k -> f^(k)(0)/k!``. When omitted, coefficients come from
        :func:`cauchy_taylor` at radius ``min(0.5, zeta0/2)``.
    zeta0 : float
        Distance from the origin to the nearest singularity (``inf`` if entire).
    poles : sequence of (location, order)
    label : str
    decay : float, optional
        Exponent ``d`` with ``|f(x)| ~ x**(-d)`` as ``x -> inf`` (``inf`` for
        exponential decay). Used to admit infinite upper limits.
    """

    eval: Callable
    taylor: Optional[Callable[[int], complex]] = None
    zeta0: float = math.inf
    poles: Tuple[Pole, ...] = ()
    label: str = "f"
    decay: Optional[float] = None
    diagnostics: Tuple[str, ...] = ()
    _cache: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        poles = tuple((complex(p), int(o)) for p, o in self.poles)
        object.__setattr__(self, "poles", poles)
        if poles:
            nearest = min(abs(p) for p, _ in poles)
            if self.zeta0 > nearest:
                object.__setattr__(self, "zeta0", nearest)
        if self.zeta0 <= 0:
            raise ValueError("zeta0 must be positive")

    def __call__(self, z):
        return self.eval(z)

    @property
    def is_entire(self) -> bool:
        return math.isinf(self.zeta0)

    def coefficients(self, order: int) -> np.ndarray:
        """Taylor coefficients ``c_0 .. c_order`` as a float array."""
        cached = self._cache.get("coeffs")
        if cached is not None and len(cached) > order:
            return cached[: order + 1]
        n = max(order + 1, 2 * len(cached) if cached is not None else 32)
        if self.taylor is not None:
            c = np.array([complex(self.taylor(k)) for k in range(n)])
        else:
            c = _cauchy_block(self, n, min(0.5, self.zeta0 / 2))
        c = c.real if np.all(np.abs(c.imag) <= 1e-14 * (1 + np.abs(c.real))) else c
        self._cache["coeffs"] = c
        return c[: order + 1]

    def coefficient(self, k: int):
        return self.coefficients(k)[k]

    def nearest_singularity_is_pole(self) -> bool:
        if math.isinf(self.zeta0):
            return True
        return any(abs(abs(p) - self.zeta0) <= 1e-12 * self.zeta0 for p, _ in self.poles)

    # -- combinators -------------------------------------------------------

    def __add__(self, other: "AnalyticFunction") -> "AnalyticFunction":
        a, b = self, other
        taylor = None
        if a.taylor is not None and b.taylor is not None:
            taylor = lambda k: a.taylor(k) + b.taylor(k)  # noqa: E731
        return AnalyticFunction(
            eval=lambda z: a.eval(z) + b.eval(z),
            taylor=taylor,
            zeta0=min(a.zeta0, b.zeta0),
            poles=_merge_poles(a.poles, b.poles, add_orders=False),
            label=f"({a.label} + {b.label})",
            decay=_min_opt(a.decay, b.decay),
        )

    def __mul__(self, other):
        if isinstance(other, (int, float)):
            return self.scaled(float(other))
        a, b = self, other
        taylor = None
        if a.taylor is not None and b.taylor is not None:

            def taylor(k):
                ca = a.coefficients(k)
                cb = b.coefficients(k)
                return np.dot(ca[: k + 1], cb[k::-1])

        return AnalyticFunction(
            eval=lambda z: a.eval(z) * b.eval(z),
            taylor=taylor,
            zeta0=min(a.zeta0, b.zeta0),
            poles=_merge_poles(a.poles, b.poles, add_orders=True),
            label=f"{a.label}*{b.label}",
            decay=_sum_opt(a.decay, b.decay),
        )

    __rmul__ = __mul__

    def scaled(self, alpha: float) -> "AnalyticFunction":
        f = self
        taylor = None if f.taylor is None else (lambda k: alpha * f.taylor(k))
        return AnalyticFunction(
            eval=lambda z: alpha * f.eval(z),
            taylor=taylor,
            zeta0=f.zeta0,
            poles=f.poles if alpha != 0 else (),
            label=f"{alpha:g}*{f.label}",
            decay=f.decay if alpha != 0 else math.inf,
        )


def _merge_poles(pa, pb, add_orders):
    out = {}
    for p, o in list(pa) + list(pb):
        key = (round(p.real, 14), round(p.imag, 14))
        if key in out:
            out[key] = (p, out[key][1] + o if add_orders else max(out[key][1], o))
        else:
            out[key] = (p, o)
    return tuple(out.values())


def _min_opt(x, y):
    if x is None or y is None:
        return None
    return min(x, y)


def _sum_opt(x, y):
    if x is None or y is None:
        return None
    return x + y


def user_function(
    eval: Callable,
    taylor: Optional[Callable[[int], complex]] = None,
    zeta0: Optional[float] = None,
    poles: Sequence[Pole] = (),
    label: str = "user",
    decay: Optional[float] = None,
) -> AnalyticFunction:
    """Wrap a user callable, warning when the singularity radius is unknown."""
    diagnostics = ()
    if zeta0 is None:
        zeta0 = min((abs(complex(p)) for p, _ in poles), default=math.inf)
        if not poles:
            msg = f"{label}: zeta0 not given; assuming an entire function"
            warnings.warn(msg, stacklevel=2)
            diagnostics = (msg,)
    return AnalyticFunction(
        eval=eval,
        taylor=taylor,
        zeta0=zeta0,
        poles=tuple(poles),
        label=label,
        decay=decay,
        diagnostics=diagnostics,
    )


# ---------------------------------------------------------------------------
# built-ins
# ---------------------------------------------------------------------------


def _inv_factorial(k: int) -> float:
    return 1.0 / math.factorial(k)


def _one():
    return AnalyticFunction(
        eval=lambda z: np.zeros_like(z) + 1.0,
        taylor=lambda k: 1.0 if k == 0 else 0.0,
        label="one",
        decay=0.0,
    )


def _exp_neg():
    return AnalyticFunction(
        eval=lambda z: np.exp(-z),
        taylor=lambda k: (-1.0) ** k * _inv_factorial(k),
        label="exp_neg",
        decay=math.inf,
    )


def _cos():
    def taylor(k):
        if k % 2:
            return 0.0
        return (-1.0) ** (k // 2) * _inv_factorial(k)

    return AnalyticFunction(eval=np.cos, taylor=taylor, label="cos", decay=0.0)


def _geom(p: float):
    if p <= 0:
        raise UnknownFunction(f"geom(p) needs p > 0, got {p}")
    return AnalyticFunction(
        eval=lambda z: 1.0 / (1.0 + z / p),
        taylor=lambda k: (-1.0 / p) ** k,
        zeta0=p,
        poles=((-p, 1),),
        label=f"geom({p:g})",
        decay=1.0,
    )


def _poly(*coeffs: float):
    if not coeffs:
        raise UnknownFunction("poly() needs at least one coefficient")
    c = tuple(float(x) for x in coeffs)

    def ev(z):
        out = np.zeros_like(z) + c[-1]
        for ck in c[-2::-1]:
            out = out * z + ck
        return out

    deg = max((k for k, ck in enumerate(c) if ck != 0.0), default=0)
    return AnalyticFunction(
        eval=ev,
        taylor=lambda k: c[k] if k < len(c) else 0.0,
        label="poly(" + ",".join(f"{x:g}" for x in c) + ")",
        decay=-float(deg),
    )


def _power1p(nu: float):
    """(1 + z)**(-nu), principal branch with the cut on (-inf, -1]."""

    def taylor(k):
        # binom(-nu, k) by the product recurrence
        b = 1.0
        for i in range(k):
            b *= (-nu - i) / (i + 1)
        return b

    return AnalyticFunction(
        eval=lambda z: (1.0 + np.asarray(z)) ** (-nu),
        taylor=taylor,
        zeta0=1.0,
        label=f"power1p({nu:g})",
        decay=float(nu),
    )


_BUILTINS = {
    "one": (_one, 0),
    "exp_neg": (_exp_neg, 0),
    "cos": (_cos, 0),
    "geom": (_geom, 1),
    "poly": (_poly, None),
    "power1p": (_power1p, 1),
}

_NAME_RE = re.compile(r"^\s*([A-Za-z_]\w*)\s*(?:\((.*)\))?\s*$")


def make_builtin(name: str) -> AnalyticFunction:
    """Build a named integrand.

    Accepted names: ``one``, ``exp_neg``, ``cos``, ``geom(p)``,
    ``poly(c0,c1,...)`` and ``power1p(nu)`` for ``(1+x)**(-nu)``.

    >>> make_builtin("geom(2)").poles
    ((-2+0j, 1),)
    """
    m = _NAME_RE.match(name)
    if not m or m.group(1) not in _BUILTINS:
        raise UnknownFunction(f"unknown function {name!r}")
    factory, arity = _BUILTINS[m.group(1)]
    raw = m.group(2)
    args = []
    if raw is not None and raw.strip():
        try:
            args = [float(tok) for tok in raw.split(",")]
        except ValueError as exc:
            raise UnknownFunction(f"bad arguments in {name!r}") from exc
    if arity is not None and len(args) != arity:
        raise UnknownFunction(f"{m.group(1)} takes {arity} argument(s), got {len(args)}")
    return factory(*args)


# ---------------------------------------------------------------------------
# Cauchy coefficients
# ---------------------------------------------------------------------------


def _cauchy_block(f: AnalyticFunction, n: int, r: float, points: int = 0) -> np.ndarray:
    points = points or max(64, 2 * n)
    theta = TWO_PI * np.arange(points) / points
    vals = np.asarray(f.eval(r * np.exp(1j * theta)), dtype=complex)
    c = np.fft.fft(vals)[:n] / points
    return c / r ** np.arange(n)


def cauchy_taylor(f: AnalyticFunction, k: int, r: float) -> complex:
    """Taylor coefficient ``c_k`` from ``(1/2 pi i) ∮ f(z) z^(-k-1) dz``.

    The circle of radius ``r`` is sampled with the periodic trapezoidal rule
    (spectrally accurate for analytic integrands); the sample count is doubled
    until two successive estimates agree.
    """
    if k < 0:
        raise ValueError("k must be non-negative")
    if not r > 0:
        raise ValueError("radius must be positive")
    if r >= f.zeta0:
        raise ContourHitsSingularity(f"radius {r} reaches the singularity at distance {f.zeta0}")
    points = 32
    while points < 2 * (k + 1):
        points *= 2
    prev = _cauchy_block(f, k + 1, r, points)[k]
    while points < 1 << 16:
        points *= 2
        cur = _cauchy_block(f, k + 1, r, points)[k]
        scale = r ** (-k)
        if abs(cur - prev) <= 1e-15 * max(abs(cur), scale):
            return complex(cur)
        prev = cur
    return complex(prev)
