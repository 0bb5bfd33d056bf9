"""The renormalisation maps of the Cayley-tree recursion and their dynamics.

For parameters ``(z, t, q)`` the rooted-tree map is::

    R(w) = z * ((t + w + (q-2) t w) / (1 + (q-1) t w)) ** 2

and the unrooted map ``R_hat`` uses a cube.  Both are squared/cubed Moebius
maps ``w -> (a w + b) / (c w + d)`` with ``a = 1 + (q-2) t``, ``b = t``,
``c = (q-1) t``, ``d = 1``.  Points of the Riemann sphere are complex numbers
or the marker ``INF``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple, Union

import numpy as np

from .complexpoly import ComplexPoly, find_roots

TOL_NEUTRAL = 1e-6
MERGE_TOL = 1e-5


class _Infinity:
    """The point at infinity of the Riemann sphere."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INF"

    def __reduce__(self):
        return (_Infinity, ())


INF = _Infinity()
Point = Union[complex, _Infinity]


class DegenerateMap(ValueError):
    """The map loses degree at these parameters (t = 1 or t = 1/(1-q))."""


@dataclass(frozen=True)
class Params:
    z: complex
    t: float
    q: int

    def __post_init__(self):
        object.__setattr__(self, "z", complex(self.z))
        object.__setattr__(self, "t", float(self.t))
        if int(self.q) != self.q or self.q < 2:
            raise ValueError("q must be an integer >= 2")
        object.__setattr__(self, "q", int(self.q))
        if not self.t >= 0:
            raise ValueError("t must be >= 0")

    @property
    def mobius(self) -> tuple[float, float, float, float]:
        """``(a, b, c, d)`` with ``R(w) = z ((a w + b) / (c w + d)) ** 2``."""
        t, q = self.t, self.q
        return 1 + (q - 2) * t, t, (q - 1) * t, 1.0

    @property
    def pole(self) -> Point:
        """Pole of ``R``; at ``t = 0`` the map is ``z w**2`` and the pole is ``INF``."""
        if self.t == 0:
            return INF
        return complex(-1.0 / ((self.q - 1) * self.t))

    def check_dynamic(self):
        """Raise unless the map has full degree and ``z != 0``."""
        if self.z == 0:
            raise DegenerateMap("z = 0 collapses the map")
        if self.t == 0:
            raise DegenerateMap("t = 0 is outside the dynamical range t > 0")
        if math.isclose(self.t, 1.0, rel_tol=0, abs_tol=1e-14):
            raise DegenerateMap("t = 1 makes the map constant")
        if math.isclose(self.t, 1.0 / (1 - self.q), rel_tol=0, abs_tol=1e-14):
            raise DegenerateMap("t = 1/(1-q) drops the degree")


def _apply(p: Params, w: Point, power: int) -> Point:
    a, b, c, d = p.mobius
    if w is INF:
        return p.z * (a / c) ** power
    den = c * w + d
    if den == 0:
        return INF
    return p.z * ((a * w + b) / den) ** power


def renorm_eval(p: Params, w: Point) -> Point:
    """``R(w)`` on the Riemann sphere: the pole maps to ``INF``, ``INF`` to the asymptote."""
    return _apply(p, w, 2)


def renorm_unrooted_eval(p: Params, w: Point) -> Point:
    """``R_hat(w)``, the cubed map used for the centre of the unrooted tree."""
    return _apply(p, w, 3)


def renorm_dw(p: Params, w: complex) -> complex:
    """Closed form of ``dR/dw``."""
    if w is INF:
        raise ValueError("derivative at infinity needs the reciprocal chart")
    z, t, q = p.z, p.t, p.q
    den = (q - 1) * t * w + 1
    if den == 0:
        raise ZeroDivisionError("derivative requested at the pole")
    return 2 * z * (1 - t) * ((q - 1) * t + 1) * ((q - 2) * t * w + t + w) / den**3


def iterate(p: Params, w0: Point, n: int) -> Point:
    """``R`` applied ``n`` times to ``w0``."""
    if n < 0:
        raise ValueError("n must be >= 0")
    w = w0 if w0 is INF else complex(w0)
    for _ in range(n):
        w = renorm_eval(p, w)
    return w


# ---------------------------------------------------------------------------
# fixed points and cycles


class Stability(str, enum.Enum):
    ATTRACTING = "attracting"
    REPELLING = "repelling"
    NEUTRAL = "neutral"


def classify_multiplier(m: complex, tol: float = TOL_NEUTRAL) -> Stability:
    a = abs(m)
    if a < 1 - tol:
        return Stability.ATTRACTING
    if a > 1 + tol:
        return Stability.REPELLING
    return Stability.NEUTRAL


@dataclass(frozen=True)
class FixedPointReport:
    point: complex
    multiplier: complex
    stability: Stability
    period: int
    multiplicity: int = 1


def fixed_point_poly(p: Params, order: int) -> ComplexPoly:
    """Polynomial in ``w`` whose roots are the fixed points of ``R**order``.

    Order 1 is ``z N^2 - w D^2`` with ``N = a w + b`` and ``D = c w + d``.
    Order 2 composes numerator and denominator once more:
    ``z (a z N^2 + b D^2)^2 - w (c z N^2 + d D^2)^2``.
    """
    a, b, c, d = p.mobius
    z = p.z
    N = ComplexPoly([b, a])
    D = ComplexPoly([d, c])
    W = ComplexPoly([0, 1])
    if order == 1:
        return z * N**2 - W * D**2
    if order == 2:
        N2 = z * N**2
        D2 = D**2
        return z * (a * N2 + b * D2) ** 2 - W * (c * N2 + d * D2) ** 2
    raise ValueError("order must be 1 or 2")


def _merge(roots: np.ndarray) -> list[tuple[complex, int]]:
    """Group numerically coincident roots (multiple roots split at ~eps^(1/k))."""
    out: list[list] = []
    for r in sorted(roots, key=lambda x: (x.real, x.imag)):
        for group in out:
            centre = group[0] / group[1]
            if abs(r - centre) < MERGE_TOL * max(1.0, abs(centre)):
                group[0] += r
                group[1] += 1
                break
        else:
            out.append([r, 1])
    return [(complex(s / k), k) for s, k in out]


def _polish(p: Params, w: complex, period: int, steps: int = 3) -> complex:
    """Newton steps on ``R^period(w) - w``, kept only while the residual drops."""
    def residual(v):
        u = v
        for _ in range(period):
            u = renorm_eval(p, u)
        return None if u is INF else u - v

    g = residual(w)
    for _ in range(steps):
        if g is None or g == 0:
            break
        m, u = 1.0 + 0j, w
        for _ in range(period):
            if u is INF or u == p.pole:
                return w
            m *= renorm_dw(p, u)
            u = renorm_eval(p, u)
        if abs(m - 1) < 1e-3:
            break  # near-neutral: Newton is ill-conditioned there
        cand = w - g / (m - 1)
        gc = residual(cand)
        if gc is None or abs(gc) >= abs(g):
            break
        w, g = cand, gc
    return w


def fixed_points(p: Params, order: int = 1) -> list[FixedPointReport]:
    """Fixed points of ``R`` (order 1) or of ``R o R`` (order 2), classified.

    For order 2 the fixed points of ``R`` are found from the order-1
    polynomial, which divides the order-2 one; each takes the nearest root of
    the order-2 polynomial out of the pool, and is reported with period 1 and
    multiplier ``R'(w)``.  A fixed tolerance cannot do this matching: close to
    the pole ``|R'|`` is large and a root that is exact to rounding still
    leaves a visible ``|R(w) - w|``.  The roots left over are paired into
    2-cycles by nearest image, and both members carry the cycle multiplier
    ``R'(w1) R'(w2)``.  Numerically coincident roots (a multiple root) are
    merged into one report.
    """
    if order not in (1, 2):
        raise ValueError("order must be 1 or 2")
    p.check_dynamic()
    roots1 = find_roots(fixed_point_poly(p, 1))
    reports = []
    for w, k in _merge(roots1):
        if k == 1:
            w = _polish(p, w, 1)
        m = renorm_dw(p, w)
        reports.append(FixedPointReport(w, m, classify_multiplier(m), 1, k))
    if order == 2:
        pool = list(find_roots(fixed_point_poly(p, 2)))
        for w in roots1:
            j = int(np.argmin([abs(w - v) for v in pool]))
            pool.pop(j)
        a, _, c, _ = p.mobius
        if abs(p.z * a * a + c) <= 1e-12 * (abs(p.z) * a * a + c):
            # R(INF) is the pole, so {pole, INF} is a 2-cycle and the order-2
            # polynomial loses its top degree.  The pole is a double pole,
            # hence critical, and the cycle is superattracting.  INF has no
            # complex coordinate and is not listed.
            j = int(np.argmin([abs(p.pole - v) for v in pool]))
            pool.pop(j)
            if len(pool) % 2:
                # rounding left the top coefficient nonzero: drop its huge root
                pool.pop(int(np.argmax(np.abs(pool))))
            reports.append(FixedPointReport(p.pole, 0j, Stability.ATTRACTING, 2, 1))
        cycle = _merge(np.array(pool))
        while cycle:
            w1, k1 = cycle.pop(0)
            if k1 == 1:
                w1 = _polish(p, w1, 2)
            image = renorm_eval(p, w1)
            if cycle:
                j = int(np.argmin([abs(image - w2) for w2, _ in cycle]))
                w2, k2 = cycle.pop(j)
                if k2 == 1:
                    w2 = _polish(p, w2, 2)
            else:
                # the partner merged into w1 (a cycle collapsing onto itself)
                w2, k2 = w1, 0
            m = renorm_dw(p, w1) * renorm_dw(p, w2)
            st = classify_multiplier(m)
            reports.append(FixedPointReport(w1, m, st, 2, k1))
            if k2:
                reports.append(FixedPointReport(w2, m, st, 2, k2))
    return sorted(reports, key=lambda r: (r.period, r.point.real, r.point.imag))


# ---------------------------------------------------------------------------
# orbits


class OrbitKind(str, enum.Enum):
    CONVERGED_FIXED = "converged_fixed"
    CONVERGED_TWO_CYCLE = "converged_two_cycle"
    NO_CONVERGENCE = "no_convergence"


class OrbitReport(NamedTuple):
    kind: OrbitKind
    points: tuple
    iterations: int
    slow: bool = False
    multiplier: complex | None = None

    @property
    def attracting(self) -> bool:
        return self.multiplier is not None and abs(self.multiplier) < 1 - TOL_NEUTRAL


def _cycle_multiplier(p: Params, pts) -> complex | None:
    if any(w is INF for w in pts):
        return None
    m = 1.0 + 0j
    for w in pts:
        m *= renorm_dw(p, w)
    return m


def _close(u: Point, v: Point, tol: float) -> bool:
    if u is INF or v is INF:
        return u is v
    return abs(u - v) < tol * max(1.0, abs(v))


def _parabolic_limit(history: list[complex]) -> complex | None:
    """Extrapolate ``w_k ~ w* + C/k`` from the tail of a slowly converging orbit.

    With ``d_k = w_{k+1} - w_k`` the ratio ``rho = d_{k+1}/d_k`` is close to
    ``k/(k+2)``, which recovers the effective index and then the limit
    ``w* = w_{k+1} + d_{k+1} (k+2)``.
    """
    if len(history) < 3:
        return None
    w0, w1, w2 = history[-3:]
    d0, d1 = w1 - w0, w2 - w1
    if d0 == 0:
        return None
    rho = d1 / d0
    if not (abs(rho.imag) < 1e-3 and 0.9 < rho.real < 1.0):
        return None
    k = 2 * rho.real / (1 - rho.real)
    return w2 + d1 * (k + 2)


def orbit_limit(p: Params, w0: Point, max_iter: int = 100_000, tol: float = 1e-10) -> OrbitReport:
    """Follow the orbit of ``w0`` until it settles on a fixed point or 2-cycle.

    Differences are compared relative to ``max(1, |w|)``.  When the budget runs
    out while successive steps shrink at an algebraic rate (a neutral fixed
    point), the limit is extrapolated and flagged ``slow``.
    """
    if max_iter < 2:
        raise ValueError("max_iter must be >= 2")
    w_prev2: Point | None = None
    w_prev: Point = w0 if w0 is INF else complex(w0)
    tail: list[complex] = []
    for k in range(1, max_iter + 1):
        w = renorm_eval(p, w_prev)
        if _close(w, w_prev, tol):
            return OrbitReport(OrbitKind.CONVERGED_FIXED, (w,), k, False, _cycle_multiplier(p, (w,)))
        # a 2-cycle needs two distinct points; an orbit spiralling into a fixed
        # point with multiplier near -1 also passes the alternating test
        if (
            w_prev2 is not None
            and _close(w, w_prev2, tol)
            and not _close(w, w_prev, math.sqrt(tol))
        ):
            pts = tuple(sorted((w_prev, w), key=lambda x: (x.real, x.imag)))
            return OrbitReport(OrbitKind.CONVERGED_TWO_CYCLE, pts, k, False, _cycle_multiplier(p, pts))
        if w is not INF:
            tail.append(w)
            if len(tail) > 3:
                tail.pop(0)
        w_prev2, w_prev = w_prev, w
    limit = _parabolic_limit(tail) if len(tail) == 3 else None
    if limit is not None:
        return OrbitReport(
            OrbitKind.CONVERGED_FIXED, (limit,), max_iter, True, _cycle_multiplier(p, (limit,))
        )
    return OrbitReport(OrbitKind.NO_CONVERGENCE, tuple(tail[-2:]), max_iter)
