"""Exact partition polynomials of the Potts model on binary Cayley trees.

Everything is kept in cleared-denominator form: the stored polynomial is
``z**|V| * Z(z, t, q)``, which has the same nonzero zeros as ``Z``.  With
``A = z**|V| Z^0`` and ``B = z**|V| Z^1`` (root spin 0, resp. a fixed nonzero
root spin) the tree recursion reads::

    A_0 = 1,  B_0 = z
    A_{k+1} = (A_k + (q-1) t B_k)**2
    B_{k+1} = z (t A_k + (1 + (q-2) t) B_k)**2

and the unrooted tree of depth n glues three depth n-1 branches to a centre
vertex, giving cubes instead of squares.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .complexpoly import ComplexPoly, poly_add, poly_scale

RENORMALIZE_FROM = 8
_RESCALE_ABOVE = 1e100


class TreeKind(str, enum.Enum):
    ROOTED = "rooted"
    UNROOTED = "unrooted"


@dataclass(frozen=True)
class TreeSpec:
    depth: int
    kind: TreeKind = TreeKind.ROOTED

    def __post_init__(self):
        object.__setattr__(self, "kind", TreeKind(self.kind))
        if self.depth < 0:
            raise ValueError("tree depth must be >= 0")
        if self.kind is TreeKind.UNROOTED and self.depth < 1:
            raise ValueError("unrooted trees need depth >= 1")

    @property
    def n_vertices(self) -> int:
        if self.kind is TreeKind.ROOTED:
            return 2 ** (self.depth + 1) - 1
        return 3 * 2**self.depth - 2

    @property
    def n_edges(self) -> int:
        return self.n_vertices - 1


class ConditionalPair(NamedTuple):
    """``A = z**|V| Z^0`` and ``B = z**|V| Z^1`` for a rooted tree."""

    A: ComplexPoly
    B: ComplexPoly


def _check(t: float, q: int):
    if q < 2:
        raise ValueError("q must be >= 2")
    if t < 0:
        raise ValueError("t must be >= 0")


def _step(a: np.ndarray, b: np.ndarray, t: float, q: int, power: int):
    m = max(a.size, b.size)
    a = np.pad(a, (0, m - a.size))
    b = np.pad(b, (0, m - b.size))
    u = a + (q - 1) * t * b
    v = t * a + (1 + (q - 2) * t) * b
    new_a, new_v = u, v
    for _ in range(power - 1):
        new_a = np.convolve(new_a, u)
        new_v = np.convolve(new_v, v)
    new_b = np.concatenate([[0.0], new_v])
    return new_a, new_b


def _pair_arrays(n: int, t: float, q: int):
    a = np.array([1.0])
    b = np.array([0.0, 1.0])
    for level in range(n):
        a, b = _step(a, b, t, q, 2)
        s = max(np.abs(a).max(), np.abs(b).max())
        if level + 1 >= RENORMALIZE_FROM or s > _RESCALE_ABOVE:
            a, b = a / s, b / s
    return a, b


def conditional_pair(n: int, t: float, q: int) -> ConditionalPair:
    """Cleared conditional partition polynomials of the rooted tree of depth ``n``.

    From depth 8 on (or earlier once coefficients pass 1e100), both polynomials
    are divided by their joint largest coefficient after every level; zeros and
    the ratio B/A are unaffected.
    """
    _check(t, q)
    if n < 0:
        raise ValueError("depth must be >= 0")
    a, b = _pair_arrays(n, t, q)
    return ConditionalPair(ComplexPoly(a), ComplexPoly(b))


def partition_poly(spec: TreeSpec, t: float, q: int) -> ComplexPoly:
    """``z**|V| Z(z, t, q)`` for the tree described by ``spec``."""
    _check(t, q)
    if spec.kind is TreeKind.ROOTED:
        a, b = _pair_arrays(spec.depth, t, q)
    else:
        a, b = _pair_arrays(spec.depth - 1, t, q)
        a, b = _step(a, b, t, q, 3)
    if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
        raise OverflowError("partition coefficients left the floating range")
    a = np.pad(a, (0, max(0, b.size - a.size)))
    total = a.copy()
    total[: b.size] += (q - 1) * b
    return ComplexPoly(total)


class ScaledValue(NamedTuple):
    """A complex number stored as ``mantissa * 2**exponent``."""

    mantissa: complex
    exponent: int

    def to_complex(self) -> complex:
        return complex(
            math.ldexp(self.mantissa.real, self.exponent),
            math.ldexp(self.mantissa.imag, self.exponent),
        )

    def log_abs(self) -> float:
        if self.mantissa == 0:
            return -math.inf
        return math.log(abs(self.mantissa)) + self.exponent * math.log(2.0)


def _renorm(a: complex, b: complex) -> tuple[complex, complex, int]:
    m = max(abs(a.real), abs(a.imag), abs(b.real), abs(b.imag))
    if m == 0 or not math.isfinite(m):
        return a, b, 0
    _, e = math.frexp(m)
    s = math.ldexp(1.0, -e)
    return a * s, b * s, e


def partition_eval(spec: TreeSpec, t: float, q: int, z: complex) -> ScaledValue:
    """Evaluate the cleared partition function at one point without overflow.

    The pair (A, B) is carried as mantissas with a shared power-of-two scale,
    renormalised after every level; depths far beyond the polynomial route
    (n around 20) stay finite.
    """
    _check(t, q)
    if spec.depth > 20:
        raise ValueError("partition_eval supports depth <= 20")
    z = complex(z)
    c1 = (q - 1) * t
    c2 = 1 + (q - 2) * t
    a, b, e = complex(1.0), z, 0
    levels = spec.depth if spec.kind is TreeKind.ROOTED else spec.depth - 1
    for _ in range(levels):
        u = a + c1 * b
        v = t * a + c2 * b
        a, b = u * u, z * v * v
        e *= 2
        a, b, de = _renorm(a, b)
        e += de
    if spec.kind is TreeKind.UNROOTED:
        u = a + c1 * b
        v = t * a + c2 * b
        a, b = u * u * u, z * v * v * v
        e *= 3
        a, b, de = _renorm(a, b)
        e += de
    total = a + (q - 1) * b
    m = max(abs(total.real), abs(total.imag))
    if m > 0:
        _, de = math.frexp(m)
        total *= math.ldexp(1.0, -de)
        e += de
    return ScaledValue(total, e)


def partition_newton(spec: TreeSpec, t: float, q: int, z):
    """Newton ratio ``P/P'`` and scaled residual of the cleared partition function.

    ``P`` and ``dP/dz`` are carried through the tree recursion as dual numbers
    (value, derivative) for an array of points at once.  Each level is divided
    by its largest entry, which changes neither output.  The residual is
    ``|P|`` over the same recursion run on absolute values (every term taken
    with its modulus), the tree analogue of ``sum |c_k| |z|^k``.  Rounding in
    the recursion is a small multiple of eps on that scale, and unlike the
    expanded coefficients it does not suffer from cancellation.
    """
    _check(t, q)
    z = np.asarray(z, dtype=complex)
    az = np.abs(z)
    c1 = (q - 1) * t
    c2 = 1 + (q - 2) * t
    a = np.ones_like(z)
    da = np.zeros_like(z)
    b = z.copy()
    db = np.ones_like(z)
    am = np.ones(z.shape)
    bm = az.copy()
    # log of (scale removed from the values) - (scale removed from the bound)
    shift = np.zeros(z.shape)

    def level(a, da, b, db, am, bm, shift, power):
        u = a + c1 * b
        du = da + c1 * db
        v = t * a + c2 * b
        dv = t * da + c2 * db
        up = u ** (power - 1)
        vp = v ** (power - 1)
        na = up * u
        nda = power * up * du
        vv = vp * v
        nb = z * vv
        ndb = vv + power * z * vp * dv
        s = np.maximum(np.abs(na), np.abs(nb))
        s = np.where(s > 0, s, 1.0)
        nam = (am + c1 * bm) ** power
        nbm = az * (t * am + abs(c2) * bm) ** power
        sm = np.maximum(nam, nbm)
        sm = np.where(sm > 0, sm, 1.0)
        shift = shift + np.log(s) - np.log(sm)
        return na / s, nda / s, nb / s, ndb / s, nam / sm, nbm / sm, shift

    levels = spec.depth if spec.kind is TreeKind.ROOTED else spec.depth - 1
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        state = (a, da, b, db, am, bm, shift)
        for _ in range(levels):
            state = level(*state, 2)
        if spec.kind is TreeKind.UNROOTED:
            state = level(*state, 3)
        a, da, b, db, am, bm, shift = state
        p = a + (q - 1) * b
        dp = da + (q - 1) * db
        ratio = np.where(p == 0, 0, p / dp)
        bound = am + (q - 1) * bm
        resid = np.abs(p) / np.where(bound > 0, bound, 1.0) * np.exp(shift)
    return ratio, resid


def pair_poly_total(pair: ConditionalPair, q: int) -> ComplexPoly:
    """``A + (q-1) B`` for a conditional pair."""
    return poly_add(pair.A, poly_scale(pair.B, q - 1))
