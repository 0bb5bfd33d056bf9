"""Dense univariate polynomials with complex coefficients.

Coefficients are stored in ascending order, ``coeffs[k]`` multiplying ``x**k``.
The zero polynomial has no coefficients.  All functions are pure.
"""
from __future__ import annotations

import numpy as np

TRIM_RTOL = 1e-14
_EPS = np.finfo(float).eps


class NonConvergence(RuntimeError):
    """The root finder ran out of sweeps before every root met the residual test."""

    def __init__(self, iterations: int, worst_residual: float):
        super().__init__(
            f"root finder did not converge after {iterations} sweeps "
            f"(worst scaled residual {worst_residual:.3e})"
        )
        self.iterations = iterations
        self.worst_residual = worst_residual


def _trim(c: np.ndarray, scale: float = 0.0) -> np.ndarray:
    """Drop trailing coefficients with magnitude <= TRIM_RTOL * scale (exact zeros if 0)."""
    if c.size == 0:
        return c
    keep = np.nonzero(np.abs(c) > TRIM_RTOL * scale)[0]
    if keep.size == 0:
        return c[:0]
    return c[: keep[-1] + 1]


class ComplexPoly:
    """Immutable dense polynomial in canonical form (nonzero leading coefficient)."""

    __slots__ = ("_c",)

    def __init__(self, coeffs=()):
        c = np.array(coeffs, dtype=complex).ravel()
        c = _trim(c).copy()
        c.flags.writeable = False
        self._c = c

    @property
    def coeffs(self) -> np.ndarray:
        return self._c

    @property
    def degree(self) -> int:
        """Degree, with -1 for the zero polynomial."""
        return self._c.size - 1

    def __len__(self):
        return self._c.size

    def __iter__(self):
        return iter(self._c)

    def __eq__(self, other):
        if not isinstance(other, ComplexPoly):
            return NotImplemented
        return np.array_equal(self._c, other._c)

    def __hash__(self):
        return hash(self._c.tobytes())

    def __repr__(self):
        return f"ComplexPoly({self._c.tolist()!r})"

    def __call__(self, x):
        return poly_eval(self, x)

    def __add__(self, other):
        return poly_add(self, _as_poly(other))

    __radd__ = __add__

    def __sub__(self, other):
        return poly_add(self, poly_scale(_as_poly(other), -1))

    def __mul__(self, other):
        if isinstance(other, ComplexPoly):
            return poly_mul(self, other)
        return poly_scale(self, other)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative powers are not polynomials")
        result = ComplexPoly([1])
        base = self
        while k:
            if k & 1:
                result = poly_mul(result, base)
            k >>= 1
            if k:
                base = poly_mul(base, base)
        return result


def _as_poly(p) -> ComplexPoly:
    if isinstance(p, ComplexPoly):
        return p
    return ComplexPoly([p])


def poly_eval(p: ComplexPoly, x):
    """Evaluate ``p`` at ``x`` (scalar or array) by Horner's scheme."""
    c = _as_poly(p).coeffs
    x = np.asarray(x, dtype=complex)
    acc = np.zeros_like(x)
    for ck in c[::-1]:
        acc = acc * x + ck
    return acc[()] if acc.ndim == 0 else acc


def poly_mul(a: ComplexPoly, b: ComplexPoly) -> ComplexPoly:
    if len(a) == 0 or len(b) == 0:
        return ComplexPoly()
    return ComplexPoly(np.convolve(a.coeffs, b.coeffs))


def poly_add(a: ComplexPoly, b: ComplexPoly) -> ComplexPoly:
    ca, cb = a.coeffs, b.coeffs
    if ca.size < cb.size:
        ca, cb = cb, ca
    out = ca.copy()
    out[: cb.size] += cb
    # cancellation noise is judged against the operands, not the result
    scale = max(np.abs(ca).max(initial=0.0), np.abs(cb).max(initial=0.0))
    return ComplexPoly(_trim(out, scale))


def poly_scale(a: ComplexPoly, c: complex) -> ComplexPoly:
    return ComplexPoly(a.coeffs * complex(c))


def poly_derivative(a: ComplexPoly) -> ComplexPoly:
    c = a.coeffs
    if c.size <= 1:
        return ComplexPoly()
    return ComplexPoly(c[1:] * np.arange(1, c.size))


# ---------------------------------------------------------------------------
# all-roots solver


def initial_guesses(c: np.ndarray) -> np.ndarray:
    """Starting points on circles read off the upper convex hull of log|c_k|.

    Each hull edge from k_i to k_j contributes k_j - k_i points on a circle whose
    radius is the geometric slope of that edge.
    """
    n = c.size - 1
    mags = np.abs(c)
    with np.errstate(divide="ignore"):
        logs = np.log(mags)
    ks = [k for k in range(n + 1) if mags[k] > 0]

    hull: list[int] = []
    for k in ks:
        while len(hull) >= 2:
            k1, k2 = hull[-2], hull[-1]
            # drop k2 if it lies on or below the chord k1 -> k
            if (logs[k2] - logs[k1]) * (k - k1) <= (logs[k] - logs[k1]) * (k2 - k1):
                hull.pop()
            else:
                break
        hull.append(k)

    guesses = np.empty(n, dtype=complex)
    sigma = 0.7
    pos = 0
    for k1, k2 in zip(hull[:-1], hull[1:]):
        m = k2 - k1
        radius = np.exp((logs[k1] - logs[k2]) / m)
        ang = 2 * np.pi * np.arange(m) / m + 2 * np.pi * k1 / n + sigma
        guesses[pos : pos + m] = radius * np.exp(1j * ang)
        pos += m
    return guesses


def _newton_terms(c: np.ndarray, x: np.ndarray):
    """Newton ratio p/p' and scaled residual |p| / sum|c_k||x|^k at each point.

    Points outside the unit disc are handled through the reversed polynomial in
    1/x so that no power of x is ever formed.
    """
    n = c.size - 1
    ratio = np.empty_like(x)
    resid = np.empty(x.shape, dtype=float)

    inner = np.abs(x) <= 1.0
    for mask, coeffs, pts in (
        (inner, c, x[inner]),
        (~inner, c[::-1], 1.0 / x[~inner]),
    ):
        if pts.size == 0:
            continue
        p = np.zeros_like(pts)
        dp = np.zeros_like(pts)
        ab = np.zeros(pts.shape, dtype=float)
        apts = np.abs(pts)
        for ck in coeffs[::-1]:
            dp = dp * pts + p
            p = p * pts + ck
            ab = ab * apts + abs(ck)
        with np.errstate(divide="ignore", invalid="ignore"):
            if coeffs is c:
                r = p / dp
            else:
                xr = 1.0 / pts
                r = xr / (n - pts * dp / p)
        r = np.where(p == 0, 0, r)
        ratio[mask] = r
        resid[mask] = np.abs(p) / np.where(ab > 0, ab, 1.0)
    return ratio, resid


def simultaneous_roots(newton_terms, guesses, tol=1e-10, max_iter=200, stop_level=None):
    """Ehrlich-Aberth iteration driven by a caller-supplied evaluator.

    ``newton_terms(x)`` must return the Newton ratio ``f(x)/f'(x)`` and a scaled
    residual for every point of the array ``x``.  A point is frozen once its
    residual is at ``stop_level`` (after taking that sweep's correction); the
    others keep iterating for up to ``max_iter`` sweeps.
    """
    z = np.array(guesses, dtype=complex)
    n = z.size
    if stop_level is None:
        stop_level = 4 * n * _EPS
    polished = np.zeros(n, dtype=bool)
    rng = np.random.default_rng(12345)

    for _ in range(max_iter):
        idx = np.nonzero(~polished)[0]
        ratio, r = newton_terms(z[idx])
        # roots at rounding level take this last correction and are then frozen
        polished[idx[r <= stop_level]] = True
        diff = z[idx, None] - z[None, :]
        diff[np.arange(idx.size), idx] = np.inf
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            s = (1.0 / diff).sum(axis=1)
            step = ratio / (1.0 - ratio * s)
            new = z[idx] - step
        bad = ~np.isfinite(new)
        if bad.any():
            # a blown-up correction: nudge the point instead
            kick = 1e-3 * (1 + np.abs(z[idx][bad]))
            new[bad] = z[idx][bad] + kick * np.exp(2j * np.pi * rng.random(bad.sum()))
        z[idx] = new
        if polished.all():
            break

    _, resid = newton_terms(z)
    worst = float(resid.max())
    if not worst < tol:
        raise NonConvergence(max_iter, worst)
    return z


def find_roots(p: ComplexPoly, tol: float = 1e-10, max_iter: int = 200) -> np.ndarray:
    """All roots of ``p`` with multiplicity, by Ehrlich-Aberth simultaneous iteration.

    A root is accepted once its scaled residual ``|p(x)| / sum |c_k| |x|^k``
    is below ``tol``; iteration carries on to rounding level where possible so
    simple roots come out fully polished.

    Raises
    ------
    NonConvergence
        If some root still has scaled residual >= ``tol`` after ``max_iter`` sweeps.
    """
    p = _as_poly(p)
    if p.degree < 1:
        raise ValueError("find_roots needs a polynomial of degree >= 1")
    c = p.coeffs / np.abs(p.coeffs).max()
    # subnormal parts overflow complex division and carry no information
    tiny = np.finfo(float).tiny
    c = np.where(np.abs(c.real) < tiny, 0, c.real) + 1j * np.where(np.abs(c.imag) < tiny, 0, c.imag)

    nz = 0
    while c[nz] == 0:
        nz += 1
    c = c[nz:]
    n = c.size - 1
    zeros = np.zeros(nz, dtype=complex)
    if n == 0:
        return zeros
    if n == 1:
        return np.concatenate([zeros, [-c[0] / c[1]]])

    roots = simultaneous_roots(
        lambda x: _newton_terms(c, x), initial_guesses(c), tol=tol, max_iter=max_iter
    )
    return np.concatenate([zeros, roots])
