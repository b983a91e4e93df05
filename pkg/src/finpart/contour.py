"""Contours straddling the positive-real-axis cut, and adaptive quadrature.

The quadrature engine is a globally adaptive bisection scheme on a real
parameter: each panel is integrated with a 20-point Gauss-Legendre rule and
the 10-point rule on the same panel supplies the error estimate. The same
engine backs the real-line integrals used elsewhere in the package.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence

import numpy as np

from .errors import PoleOnContour, QuadratureFailure
from .functions import TWO_PI, AnalyticFunction

_EPS = np.finfo(float).eps
_X10, _W10 = np.polynomial.legendre.leggauss(10)
_X20, _W20 = np.polynomial.legendre.leggauss(20)
_NODES = np.concatenate([_X10, _X20])

DEFAULT_TOL = 1e-10
MAX_PANELS = 5000


@dataclass(frozen=True)
class QuadResult:
    value: complex
    abs_error_estimate: float
    evaluations: int

    def __add__(self, other: "QuadResult") -> "QuadResult":
        return QuadResult(
            self.value + other.value,
            self.abs_error_estimate + other.abs_error_estimate,
            self.evaluations + other.evaluations,
        )

    def scaled(self, factor) -> "QuadResult":
        return QuadResult(self.value * factor, self.abs_error_estimate * abs(factor), self.evaluations)


def _eval_panels(func, los, his):
    los = np.asarray(los, dtype=float)
    his = np.asarray(his, dtype=float)
    mid = 0.5 * (los + his)
    half = 0.5 * (his - los)
    t = (mid[:, None] + half[:, None] * _NODES[None, :]).ravel()
    y = np.asarray(func(t)).reshape(len(los), -1)
    y10, y20 = y[:, :10], y[:, 10:]
    g = half * (y10 @ _W10)
    k = half * (y20 @ _W20)
    floor = 50 * _EPS * half * (np.abs(y20) @ _W20)
    err = np.maximum(np.abs(k - g), floor)
    return k, err, floor


def adaptive_quad(
    func: Callable[[np.ndarray], np.ndarray],
    lo: float,
    hi: float,
    rtol: float = DEFAULT_TOL,
    atol: float = DEFAULT_TOL,
    breakpoints: Sequence[float] = (),
    max_panels: int = MAX_PANELS,
) -> QuadResult:
    """Integrate a vectorised ``func`` over ``[lo, hi]``.

    Stops once the summed panel error is below ``max(atol, rtol*|value|)`` or
    every remaining panel is limited by rounding.
    """
    if hi == lo:
        return QuadResult(0.0, 0.0, 0)
    if hi < lo:
        return adaptive_quad(func, hi, lo, rtol, atol, breakpoints, max_panels).scaled(-1)
    edges = np.unique(np.concatenate([[lo, hi], [b for b in breakpoints if lo < b < hi]]))
    los, his = edges[:-1], edges[1:]
    vals, errs, floors = _eval_panels(func, los, his)
    evaluations = 30 * len(los)
    heap = []
    for i in range(len(los)):
        heap.append((-errs[i], i, los[i], his[i], vals[i], errs[i], floors[i]))
    heapq.heapify(heap)
    counter = len(heap)
    total = complex(np.sum(vals))
    total_err = float(np.sum(errs))

    while total_err > max(atol, rtol * abs(total)):
        worst = heap[0]
        if worst[5] <= worst[6] or len(heap) >= max_panels:
            if worst[5] <= worst[6]:
                break
            raise QuadratureFailure(
                f"no convergence after {len(heap)} panels (error {total_err:.3g})",
                best=total,
                abs_error_estimate=total_err,
            )
        heapq.heappop(heap)
        _, _, a, b, v, e, _ = worst
        m = 0.5 * (a + b)
        if not (a < m < b):
            break
        cv, ce, cf = _eval_panels(func, [a, m], [m, b])
        evaluations += 60
        total += complex(cv[0] + cv[1] - v)
        total_err += float(ce[0] + ce[1] - e)
        for lo_, hi_, v_, e_, f_ in ((a, m, cv[0], ce[0], cf[0]), (m, b, cv[1], ce[1], cf[1])):
            counter += 1
            heapq.heappush(heap, (-e_, counter, lo_, hi_, v_, e_, f_))

    pieces = [item[4] for item in heap]
    value = complex(math.fsum(np.real(pieces)), math.fsum(np.imag(pieces)))
    err = math.fsum(item[5] for item in heap)
    return QuadResult(value, err, evaluations)


def real_quad(func, lo, hi, rtol=1e-12, atol=1e-14, breakpoints=()) -> QuadResult:
    """:func:`adaptive_quad` for real integrands, returning a real value."""
    res = adaptive_quad(func, lo, hi, rtol=rtol, atol=atol, breakpoints=breakpoints)
    return QuadResult(res.value.real, res.abs_error_estimate, res.evaluations)


def quad_power_weight(g, a: float, nu: float, rtol=1e-12, atol=1e-14) -> QuadResult:
    """``∫_0^a x**(-nu) g(x) dx`` for smooth ``g``.

    Substituting ``x = a t**p`` with ``p = 1/(1-nu)`` cancels the endpoint
    singularity exactly: the integrand becomes ``a**(1-nu) p g(a t**p)``.
    """
    if nu == 0.0:
        return real_quad(g, 0.0, a, rtol=rtol, atol=atol)
    p = 1.0 / (1.0 - nu)
    scale = a ** (1.0 - nu) * p
    res = real_quad(lambda t: g(a * t**p), 0.0, 1.0, rtol=rtol, atol=atol / scale)
    return QuadResult(res.value * scale, res.abs_error_estimate * scale, res.evaluations)


# ---------------------------------------------------------------------------
# contours
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class _Segment:
    """Path piece ``t -> (z, dz/dt, arg)``; ``paired`` marks a two-edge tail."""

    path: Callable
    t0: float
    t1: float
    paired: bool = False


@dataclass(frozen=True)
class Contour:
    """Closed path from ``a`` (upper edge of the cut) around 0 back to ``a``.

    ``kind`` is ``"circle"`` or ``"rect"``. The closed part has radius (or
    right edge) ``rho`` when given, joined to ``a`` by both edges of the cut
    over ``[rho, a]``; otherwise it reaches ``a`` directly. Rectangles span
    ``[-left, right] x [-h, h]`` with ``left`` defaulting to ``h``.
    Orientation is counterclockwise.
    """

    kind: str
    a: float
    h: Optional[float] = None
    rho: Optional[float] = None
    left: Optional[float] = None

    def __post_init__(self):
        if self.kind not in ("circle", "rect"):
            raise ValueError(f"unknown contour kind {self.kind!r}")
        if not self.a > 0:
            raise ValueError("contour endpoint a must be positive")
        if self.rho is not None and not (0 < self.rho <= self.a):
            raise ValueError("need 0 < rho <= a")
        if self.kind == "rect":
            if self.h is None or self.h <= 0:
                raise ValueError("rectangle needs a positive half-height h")
            if self.left is not None and self.left <= 0:
                raise ValueError("rectangle left extent must be positive")

    @classmethod
    def circle(cls, a: float) -> "Contour":
        return cls("circle", a)

    @classmethod
    def rectangle(cls, a: float, h: float, left: Optional[float] = None) -> "Contour":
        return cls("rect", a, h=h, left=left)

    @classmethod
    def keyhole(cls, rho: float, a: float, kind: str = "circle", h: Optional[float] = None) -> "Contour":
        return cls(kind, a, h=h, rho=rho)

    @classmethod
    def parse(cls, text: str) -> "Contour":
        """Parse ``circle:a``, ``rect:a,h`` or ``rho:rho,a``."""
        kind, _, rest = text.partition(":")
        try:
            nums = [float(x) for x in rest.split(",")] if rest else []
        except ValueError as exc:
            raise ValueError(f"bad contour spec {text!r}") from exc
        if kind == "circle" and len(nums) == 1:
            return cls.circle(nums[0])
        if kind == "rect" and len(nums) == 2:
            return cls.rectangle(nums[0], nums[1])
        if kind == "rho" and len(nums) == 2:
            return cls.keyhole(nums[0], nums[1])
        raise ValueError(f"bad contour spec {text!r}")

    @property
    def closed_radius(self) -> float:
        return self.a if self.rho is None else self.rho

    @property
    def has_tail(self) -> bool:
        return self.rho is not None and self.rho < self.a

    @property
    def closed_max_modulus(self) -> float:
        """Largest ``|z|`` on the closed part (the tail edges excluded)."""
        r = self.closed_radius
        if self.kind == "circle":
            return r
        left = self.left if self.left is not None else self.h
        return max(abs(complex(r, self.h)), abs(complex(-left, self.h)))

    @property
    def max_modulus(self) -> float:
        return max(self.closed_max_modulus, self.a)

    def _corners(self):
        r = self.closed_radius
        h = self.h
        left = self.left if self.left is not None else h
        return [complex(r, 0), complex(r, h), complex(-left, h), complex(-left, -h), complex(r, -h), complex(r, 0)]

    def segments(self) -> List[_Segment]:
        segs = []
        r = self.closed_radius
        if self.kind == "circle":

            def arc(t, r=r):
                z = r * np.exp(1j * t)
                return z, 1j * z, t

            segs.append(_Segment(arc, 0.0, TWO_PI))
        else:
            corners = self._corners()
            for z0, z1 in zip(corners[:-1], corners[1:]):

                def line(t, z0=z0, z1=z1):
                    z = z0 + t * (z1 - z0)
                    return z, np.full_like(t, z1 - z0, dtype=complex), np.mod(np.angle(z), TWO_PI)

                segs.append(_Segment(line, 0.0, 1.0))
        if self.has_tail:

            def tail(t, r=r):
                return t + 0j, np.ones_like(t, dtype=complex), None

            segs.append(_Segment(tail, r, self.a, paired=True))
        return segs

    def distance_to_path(self, p: complex) -> float:
        p = complex(p)
        r = self.closed_radius
        if self.kind == "circle":
            d = abs(abs(p) - r)
        else:
            corners = self._corners()
            d = min(_seg_dist(p, z0, z1) for z0, z1 in zip(corners[:-1], corners[1:]))
        if self.has_tail:
            d = min(d, _seg_dist(p, complex(r, 0), complex(self.a, 0)))
        return d

    def encloses(self, p: complex) -> bool:
        p = complex(p)
        r = self.closed_radius
        if self.kind == "circle":
            return abs(p) < r
        left = self.left if self.left is not None else self.h
        return -left < p.real < r and abs(p.imag) < self.h


def _seg_dist(p, z0, z1):
    d = z1 - z0
    t = ((p - z0) * d.conjugate()).real / abs(d) ** 2
    t = min(1.0, max(0.0, t))
    return abs(p - (z0 + t * d))


def integrate_contour(
    g: Callable,
    c: Contour,
    tol: float = DEFAULT_TOL,
    lifted: bool = False,
) -> QuadResult:
    """``∫_C g(z) dz`` along contour ``c``.

    With ``lifted=True`` the integrand is called as ``g(z, arg)`` where
    ``arg`` is the continuous argument of ``z`` in ``[0, 2*pi]`` along the
    path (``0`` on the upper edge of the cut, ``2*pi`` on the lower edge),
    which is what multivalued factors such as ``log z`` need.
    """
    if tol < 1e-13:
        raise ValueError("tol must be at least 1e-13")
    segs = c.segments()
    total = QuadResult(0j, 0.0, 0)
    for seg in segs:
        if seg.paired:

            def integrand(t, path=seg.path):
                z, dz, _ = path(t)
                if lifted:
                    below = g(z, np.full_like(t, TWO_PI))
                    above = g(z, np.zeros_like(t))
                else:
                    below = above = g(z)
                return (below - above) * dz

        else:

            def integrand(t, path=seg.path):
                z, dz, arg = path(t)
                return (g(z, arg) if lifted else g(z)) * dz

        breaks = np.linspace(seg.t0, seg.t1, 5)[1:-1] if not seg.paired else ()
        total = total + adaptive_quad(
            integrand, seg.t0, seg.t1, rtol=tol, atol=tol / len(segs), breakpoints=breaks
        )
    return total


def enclosed_poles(c: Contour, f: AnalyticFunction, omega: Optional[float] = None) -> List[complex]:
    """Poles of ``f(z)/(omega+z)`` strictly inside ``c``.

    Raises :class:`PoleOnContour` if any pole sits on the path.
    """
    candidates = [p for p, _ in f.poles]
    if omega is not None:
        candidates.append(complex(-omega))
    scale = max(1.0, c.max_modulus)
    inside = []
    for p in candidates:
        if c.distance_to_path(p) <= 1e-9 * scale:
            raise PoleOnContour(f"pole at {p} lies on the contour")
        if c.encloses(p):
            inside.append(p)
    return inside
