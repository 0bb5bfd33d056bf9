"""Closed-form critical temperatures, accumulation points and discriminants.

Temperatures are in the variable ``t = exp(-J/T)`` and fields in
``z = exp(-h/T)``.  Ferromagnetic couplings have ``0 < t < 1`` and
antiferromagnetic ones ``t > 1``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

# a radicand factor this small relative to its own terms is treated as zero
RADICAL_CLAMP = 1e-12


class OutOfRange(ValueError):
    """The requested closed form does not exist at these parameters."""


def _check_q(q: int):
    if q < 2:
        raise ValueError("q must be >= 2")


def _clamped(value: float, magnitude: float) -> float:
    """``value`` with rounding-level noise around zero replaced by an exact 0."""
    if abs(value) <= RADICAL_CLAMP * magnitude:
        return 0.0
    return value


def t1(q: int) -> float:
    """Lower ferromagnetic threshold ``1/(1+q)``; equals the Bethe-Peierls value."""
    _check_q(q)
    return 1.0 / (1 + q)


def t2(q: int) -> float:
    """Upper ferromagnetic threshold above which zeros avoid the positive axis."""
    _check_q(q)
    return (q - 2 + math.sqrt(q * q + 32 * q - 32)) / (18 * (q - 1))


def t3(q: int) -> float:
    """Antiferromagnetic threshold at which the pair ``zc_pm`` is born."""
    _check_q(q)
    return 3 * (3 * q - 6 + math.sqrt(9 * q * q - 32 * q + 32)) / (2 * (q - 1))


def t_wangwu(q: int) -> float:
    """Critical temperature from the free-energy analysis, ``(sqrt2-1)/(q+sqrt2-1)``."""
    _check_q(q)
    s = math.sqrt(2.0) - 1
    return s / (q + s)


def t_bethe_peierls(q: int) -> float:
    return t1(q)


def _ferro_factor(t: float, q: int) -> float:
    # 9(q-1)t^2 - (q-2)t - 1, positive exactly when t > t2(q)
    f = 9 * (q - 1) * t * t - (q - 2) * t - 1
    return _clamped(f, 9 * (q - 1) * t * t + abs(q - 2) * t + 1)


def _n_branches(t: float, q: int) -> tuple[float, float]:
    _check_q(q)
    if not t > 0:
        raise OutOfRange("N+- need t > 0")
    f = _ferro_factor(t, q)
    radicand = (t - 1) * ((q - 1) * t + 1) * f**3
    if radicand < 0:
        raise OutOfRange(f"t={t} exceeds t2({q})={t2(q)}; N+- are not real")
    root = math.sqrt(radicand)
    head = (
        -27 * (q - 1) ** 2 * t**4
        + 18 * (q * q - 3 * q + 2) * t**3
        + (q * q + 14 * q - 14) * t**2
        + 2 * (q - 2) * t
        + 1
    )
    den = 8 * t * ((q - 2) * t + 1) ** 3
    return (head + root) / den, (head - root) / den


def n_plus(t: float, q: int) -> float:
    """Larger real parameter with a neutral fixed point, for ``0 < t <= t2(q)``."""
    return _n_branches(t, q)[0]


def n_minus(t: float, q: int) -> float:
    """Smaller real parameter with a neutral fixed point, for ``0 < t <= t2(q)``."""
    return _n_branches(t, q)[1]


def zc_ferro(t: float, q: int) -> float:
    """The single positive accumulation point for ``0 <= t <= t2(q)``.

    Equal to 1 up to ``t1(q)`` and to ``n_minus`` between ``t1`` and ``t2``.
    """
    _check_q(q)
    if t < 0:
        raise OutOfRange("t must be >= 0")
    if t <= t1(q):
        return 1.0
    if t > t2(q) and _ferro_factor(t, q) > 0:
        raise OutOfRange(f"no accumulation point on (0, inf) for t={t} > t2({q})")
    return n_minus(t, q)


def _antiferro_factor(t: float, q: int) -> float:
    # (q-1)t^2 - 9(q-2)t - 9, nonnegative exactly when t >= t3(q)
    f = (q - 1) * t * t - 9 * (q - 2) * t - 9
    return _clamped(f, (q - 1) * t * t + 9 * abs(q - 2) * t + 9)


def _vieta_pair(head: float, root: float, den: float, product: float) -> tuple[float, float]:
    """Sorted roots ``(head -+ root) / den`` of a quadratic with root product ``product``.

    The root where ``head`` and ``root`` cancel is recovered from the other
    one through the product, which keeps its relative accuracy.
    """
    big = (head + math.copysign(root, head)) / den
    small = product / big
    return (small, big) if small <= big else (big, small)


def zc_pm(t: float, q: int) -> tuple[float, float]:
    """The antiferromagnetic accumulation pair ``(zc-, zc+)`` for ``t >= t3(q)``."""
    _check_q(q)
    f = _antiferro_factor(t, q)
    if t <= 1 or f < 0:
        raise OutOfRange(f"zc+- need t >= t3({q})={t3(q)}")
    s = 1 - t + q * t
    radicand = (t - 1) ** 3 * s**3 * f
    root = math.sqrt(radicand)
    head = (
        -3
        - 6 * (q - 2) * t
        - 3 * (2 + (q - 2) * q) * t**2
        - 6 * (q - 2) * (q - 1) * t**3
        + (q - 1) ** 2 * t**4
    )
    den = 8 * t * (1 - 2 * t + q * t) ** 3
    return _vieta_pair(head, root, den, (q - 1) / (1 - 2 * t + q * t) ** 3)


def zc_pm_ising(t: float) -> tuple[float, float]:
    """The ``q = 2`` specialisation ``(t^4 - 6t^2 - 3 -+ sqrt((t^2-1)^3 (t^2-9))) / 8t``."""
    f = _clamped(t * t - 9, t * t + 9)
    if t <= 1 or f < 0:
        raise OutOfRange("zc+- need t >= 3 when q = 2")
    root = math.sqrt((t * t - 1) ** 3 * f)
    head = t**4 - 6 * t * t - 3
    return _vieta_pair(head, root, 8 * t, 1.0)


def zc_at_t3(q: int) -> float:
    """Closed form of the double point ``zc- = zc+`` at ``t = t3(q)``."""
    _check_q(q)
    s = math.sqrt(9 * q * q - 32 * q + 32)
    num = -27 * q**3 + 153 * q * q - 297 * q + 198 + (9 * q * q - 35 * q + 35) * s
    return num / (2 * (q - 1))


# ---------------------------------------------------------------------------
# discriminant factors


def _order1_linear(t, q):
    return (
        t
        * (
            27 * (q - 1) ** 2 * t**3
            - 18 * (q - 2) * (q - 1) * t**2
            - q * (q + 14) * t
            - 2 * q
            + 14 * t
            + 4
        )
        - 1
    )


def q_ferro(z, t, q):
    """Quadratic in ``z`` whose roots are ``N+-(t, q)``.

    This is the factor left after removing ``-(t-1)^2 (1-t+qt)^2 z`` from the
    discriminant in ``w`` of ``z N(w)^2 - w D(w)^2``, i.e. the locus of fixed
    points with multiplier 1.  As a polynomial it coincides with
    ``q1_antiferro``; the two names reflect where each is used.
    """
    return z * _order1_linear(t, q) + 4 * t * z * z * ((q - 2) * t + 1) ** 3 + 4 * (q - 1) * t


def q1_antiferro(z, t, q):
    """Discriminant factor that stays positive for ``z > 0, t > 1``."""
    return q_ferro(z, t, q)


def q2_antiferro(z, t, q):
    """Quadratic in ``z`` whose roots are ``zc+-(t, q)``."""
    lin = (
        -((q - 1) ** 2) * t**4
        + 6 * (q - 2) * (q - 1) * t**3
        + 3 * ((q - 2) * q + 2) * t**2
        + 6 * (q - 2) * t
        + 3
    )
    return z * lin + 4 * t * z * z * ((q - 2) * t + 1) ** 3 + 4 * (q - 1) * t


def poly_scale_at(f, z, t, q) -> float:
    """``sum |c_k| |z|^k`` for a quadratic-in-z discriminant ``f``."""
    c0 = f(0.0, t, q)
    p, m = f(1.0, t, q), f(-1.0, t, q)
    c1, c2 = (p - m) / 2, (p + m) / 2 - c0
    return abs(c0) + abs(c1) * abs(z) + abs(c2) * abs(z) ** 2


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AccumulationSet:
    q: int
    t: float
    points: tuple[float, ...] = field(default_factory=tuple)

    def __post_init__(self):
        pts = tuple(sorted(float(p) for p in self.points))
        if any(p <= 0 for p in pts):
            raise ValueError("accumulation points must be positive")
        object.__setattr__(self, "points", pts)

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)


def _dedupe(points, rtol=1e-9):
    out: list[float] = []
    for p in sorted(points):
        if not out or abs(p - out[-1]) > rtol * max(1.0, abs(p)):
            out.append(p)
    return out


def accumulation_points(t: float, q: int) -> AccumulationSet:
    """Positive real limit points of Lee-Yang zeros as the tree depth grows.

    At ``t = 1`` every zero sits at ``1/(1-q) < 0``, so the set is empty.
    """
    _check_q(q)
    if t < 0:
        raise ValueError("t must be >= 0")
    if t == 1:
        return AccumulationSet(q, t, ())
    if t < 1:
        try:
            return AccumulationSet(q, t, (zc_ferro(t, q),))
        except OutOfRange:
            return AccumulationSet(q, t, ())
    try:
        lo, hi = zc_pm(t, q)
    except OutOfRange:
        return AccumulationSet(q, t, ())
    pts = [lo, hi] + ([1.0] if q == 2 else [])
    return AccumulationSet(q, t, tuple(_dedupe(pts)))
