"""Lee-Yang zero sets of the tree partition functions and their diagnostics."""
from __future__ import annotations

import csv
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .complexpoly import initial_guesses, simultaneous_roots
from .criticality import accumulation_points
from .partition import TreeKind, TreeSpec, partition_newton, partition_poly
from .renorm import INF, Params, renorm_eval, renorm_unrooted_eval

POLE_GUARD = 1e-8
# above this depth antiferromagnetic zero sets are numerically fragile
ILL_CONDITIONED_DEPTH = 6
CSV_HEADER = ["n", "t", "q", "tree", "re", "im", "residual"]


@dataclass(frozen=True, eq=False)
class ZeroSet:
    """Zeros of the cleared partition polynomial, sorted by argument then modulus.

    ``residuals[i]`` is ``|F(z_i) - 1/(1-q)|`` where ``F`` is ``R^n`` (rooted)
    or ``R_hat o R^(n-1)`` (unrooted) started from the marked point ``w = z_i``.
    ``scaled_residuals[i]`` divides it by ``max(1, |z F'(z)|)``, so a zero
    sitting where ``F`` is steep (next to a pole of ``F``) is not penalised
    for the steepness.  ``pole_adjacent[i]`` marks zeros whose orbit passes
    within ``POLE_GUARD`` of the pole of ``R``; their residual is not
    meaningful.
    """

    spec: TreeSpec
    t: float
    q: int
    zeros: np.ndarray
    residuals: np.ndarray
    pole_adjacent: np.ndarray = field(repr=False)
    scaled_residuals: np.ndarray = field(default=None, repr=False)

    def __len__(self):
        return self.zeros.size

    @property
    def ill_conditioned(self) -> bool:
        return self.t > 1 and self.spec.depth > ILL_CONDITIONED_DEPTH

    def __eq__(self, other):
        if not isinstance(other, ZeroSet):
            return NotImplemented
        return (
            self.spec == other.spec
            and self.t == other.t
            and self.q == other.q
            and np.array_equal(self.zeros, other.zeros)
            and np.array_equal(self.residuals, other.residuals, equal_nan=True)
        )


def _sort_zeros(zs: np.ndarray) -> np.ndarray:
    return zs[np.lexsort((np.abs(zs), np.angle(zs)))]


def _orbit_with_derivative(p: Params, powers) -> tuple[complex, complex] | None:
    """Follow ``w -> z M(w)^k`` from ``w = z`` for each ``k`` in ``powers``.

    Returns ``(F(z), dF/dz)``, the derivative counting both the marked point
    and the explicit ``z`` in the map, or ``None`` if the orbit hits the pole.
    """
    a, b, c, d = p.mobius
    det = a * d - b * c
    z = p.z
    w, dw = z, 1.0 + 0j
    for k in powers:
        den = c * w + d
        if den == 0:
            return None
        m = (a * w + b) / den
        dm = det / den**2
        w, dw = z * m**k, m**k + z * k * m ** (k - 1) * dm * dw
    return w, dw


def renorm_certificate(spec: TreeSpec, t: float, q: int, zeros) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Per-zero certificate: raw residuals, scaled residuals and pole flags.

    The scaled residual divides the raw one by ``max(1, |z F'(z)|)``, the
    sensitivity of ``F`` to a relative change of ``z``; it measures how far
    (relatively) ``z`` is from a solution rather than how steep ``F`` is there.
    """
    target = 1.0 / (1 - q)
    steps = spec.depth if spec.kind is TreeKind.ROOTED else spec.depth - 1
    powers = [2] * steps + ([3] if spec.kind is TreeKind.UNROOTED else [])
    res = np.empty(len(zeros))
    scaled = np.empty(len(zeros))
    near_pole = np.zeros(len(zeros), dtype=bool)
    for i, z in enumerate(zeros):
        p = Params(complex(z), t, q)
        pole = p.pole

        def near(w):
            return w is INF or (pole is not INF and abs(w - pole) < POLE_GUARD)

        w = complex(z)
        hit = False
        for _ in range(steps):
            hit |= near(w)
            w = renorm_eval(p, w)
        if spec.kind is TreeKind.UNROOTED:
            hit |= near(w)
            w = renorm_unrooted_eval(p, w)
        near_pole[i] = hit or w is INF
        res[i] = math.inf if w is INF else abs(w - target)
        fd = None if near_pole[i] else _orbit_with_derivative(p, powers)
        scaled[i] = res[i] if fd is None else res[i] / max(1.0, abs(z * fd[1]))
    return res, scaled, near_pole


def compute_zeros(spec: TreeSpec, t: float, q: int, tol: float = 1e-10, max_iter: int = 500) -> ZeroSet:
    """All Lee-Yang zeros for one tree, certified by the renormalisation residual.

    The zeros are the roots of ``partition_poly``.  The simultaneous iteration
    starts from the coefficient hull of that polynomial but evaluates it (and
    its derivative) through the tree recursion, which avoids the huge
    cancellation hidden in the expanded coefficients.
    """
    if spec.kind is TreeKind.ROOTED and spec.depth == 0:
        zeros = np.array([1.0 / (1 - q)], dtype=complex)
    else:
        coeffs = partition_poly(spec, t, q).coeffs
        c = coeffs / np.abs(coeffs).max()
        zeros = simultaneous_roots(
            lambda x: partition_newton(spec, t, q, x),
            initial_guesses(c),
            tol=tol,
            max_iter=max_iter,
        )
    zeros = _sort_zeros(zeros)
    res, scaled, flags = renorm_certificate(spec, t, q, zeros)
    return ZeroSet(spec, float(t), int(q), zeros, res, flags, scaled)


def min_dist_to_point(zs: ZeroSet, z0: complex) -> float:
    if len(zs) == 0:
        raise ValueError("empty zero set")
    return float(np.abs(zs.zeros - z0).min())


def min_dist_to_positive_ray(zs: ZeroSet) -> float:
    """Distance from the zero set to ``[0, inf)``."""
    if len(zs) == 0:
        raise ValueError("empty zero set")
    proj = np.maximum(zs.zeros.real, 0.0)
    return float(np.abs(zs.zeros - proj).min())


@dataclass(frozen=True)
class AccumulationReport:
    q: int
    t: float
    depths: tuple[int, ...]
    predicted: tuple[float, ...]
    # distances[j][i]: distance from predicted[j] to the zero set at depths[i]
    distances: tuple[tuple[float, ...], ...]
    ray_distances: tuple[float, ...]

    def strictly_decreasing(self, j: int) -> bool:
        d = self.distances[j]
        return all(b < a for a, b in zip(d, d[1:]))

    @property
    def min_ray_distance(self) -> float:
        return min(self.ray_distances)


def accumulation_check(q: int, t: float, n_range, kind=TreeKind.ROOTED, workers: int = 1) -> AccumulationReport:
    """Zero sets over ``n_range`` measured against the predicted accumulation points.

    Depths may be computed concurrently; results are collected in depth order
    so the report does not depend on scheduling.
    """
    if t == 1:
        raise ValueError("t = 1 has no renormalisation dynamics")
    depths = tuple(int(n) for n in n_range)
    specs = [TreeSpec(n, kind) for n in depths]
    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        sets = list(pool.map(lambda s: compute_zeros(s, t, q), specs))
    pred = accumulation_points(t, q).points
    dists = tuple(tuple(min_dist_to_point(zs, p) for zs in sets) for p in pred)
    ray = tuple(min_dist_to_positive_ray(zs) for zs in sets)
    return AccumulationReport(q, t, depths, pred, dists, ray)


# ---------------------------------------------------------------------------
# CSV


def write_zeros_rows(zs: ZeroSet, fh) -> None:
    """Write the CSV (header included) to an open text stream."""
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for z, r in zip(zs.zeros, zs.residuals):
        w.writerow([zs.spec.depth, repr(zs.t), zs.q, zs.spec.kind.value, repr(float(z.real)), repr(float(z.imag)), repr(float(r))])


def write_zeros_csv(zs: ZeroSet, path) -> None:
    with open(path, "w", newline="") as fh:
        write_zeros_rows(zs, fh)


def read_zeros_csv(path) -> ZeroSet:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0] != CSV_HEADER:
        raise ValueError(f"{path}: expected header {','.join(CSV_HEADER)}")
    body = rows[1:]
    if not body:
        raise ValueError(f"{path}: no zeros")
    n, t, q, tree = body[0][:4]
    spec = TreeSpec(int(n), TreeKind(tree))
    t, q = float(t), int(q)
    zeros = np.array([complex(float(r[4]), float(r[5])) for r in body])
    res = np.array([float(r[6]) for r in body])
    _, scaled, flags = renorm_certificate(spec, t, q, zeros)
    return ZeroSet(spec, t, q, zeros, res, flags, scaled)
