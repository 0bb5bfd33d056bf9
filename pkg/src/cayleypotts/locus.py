"""Active/passive classification of the marked point ``a(z) = z`` over a pixel grid.

For each pixel centre ``z0`` the orbit ``F_m(z) = R_z^m(a(z))`` is followed
together with two exact derivatives, both carried forward by the chain rule:

* the parameter derivative ``dF_m/dz``, advanced by ``R_w * dF + R/z``;
* the orbit multiplier ``d R^m / dw`` at ``a(z0)``, advanced by ``R_w * mult``.

At every step ``m``:

1. if ``|F_m(z0) - z0| < r theta |dF_m/dz - 1|`` the pixel probably contains a
   parameter where the marked point is periodic, and the pixel is **Active**.
   The one exception: if the Newton step ``z* = z0 - G/G'`` (with
   ``G = F_m - z``) is confirmed, ``|G(z*)| <= |G(z0)|/4``, and the m-cycle
   of the marked point at ``z*`` is attracting, the hit is the centre of a
   passive component and the test is skipped;
2. otherwise, if ``|mult| < eps`` the marked point is in an attracting basin:
   **Passive**;
3. at ``m = m0`` the pixel is **Undecided**.

Derivatives are stored as a complex mantissa with a power-of-two exponent so
that exponential growth or decay never overflows.  The map is evaluated in the
chart ``w`` when ``|w| <= 1`` and in ``u = 1/w`` otherwise, so orbits passing
close to the pole stay finite.
"""
from __future__ import annotations

import enum
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np
from numba import njit

PASSIVE = 0
ACTIVE = 1
UNDECIDED = 2

COLORS = {
    ACTIVE: (0, 0, 0),
    PASSIVE: (255, 255, 255),
    UNDECIDED: (255, 0, 0),
}


class PixelClass(enum.IntEnum):
    PASSIVE = PASSIVE
    ACTIVE = ACTIVE
    UNDECIDED = UNDECIDED


STEP2_VARIANTS = ("orbit", "parameter")


@dataclass(frozen=True)
class RenderSettings:
    t: float
    q: int
    center: complex
    width: float
    nx: int
    ny: int = 1
    theta: float = 0.5
    eps: float = 1e-12
    m0: int = 2000
    power: int = 1
    step2: str = "orbit"

    def __post_init__(self):
        object.__setattr__(self, "center", complex(self.center))
        if self.nx < 1 or self.ny < 1:
            raise ValueError("resolution must be at least 1x1")
        if not 0 < self.theta < 1:
            raise ValueError("theta must lie in (0, 1)")
        if not self.eps > 0:
            raise ValueError("eps must be > 0")
        if self.m0 < 1:
            raise ValueError("m0 must be >= 1")
        if not self.width > 0:
            raise ValueError("width must be > 0")
        if self.q < 2:
            raise ValueError("q must be >= 2")
        if not self.t > 0 or self.t == 1:
            raise ValueError("t must be > 0 and != 1")
        if self.power not in (1, 2):
            raise ValueError("power must be 1 or 2")
        if self.step2 not in STEP2_VARIANTS:
            raise ValueError(f"step2 must be one of {STEP2_VARIANTS}")

    @property
    def r(self) -> float:
        """Side length of a (square) pixel."""
        return self.width / self.nx

    @property
    def height(self) -> float:
        return self.r * self.ny

    def pixel_center(self, i: int, j: int) -> complex:
        """Centre of the pixel in row ``i`` (top row first) and column ``j``."""
        x = self.center.real - self.width / 2 + (j + 0.5) * self.r
        y = self.center.imag + self.height / 2 - (i + 0.5) * self.r
        return complex(x, y)

    def to_json(self) -> dict:
        d = asdict(self)
        d["center"] = [self.center.real, self.center.imag]
        d["r"] = self.r
        d["height"] = self.height
        return d

    @classmethod
    def ray(cls, t: float, q: int, lo: float, hi: float, nx: int = 500, **kw) -> "RenderSettings":
        """A one-pixel-high strip covering ``[lo, hi]`` on the positive real axis."""
        return cls(t=t, q=q, center=complex((lo + hi) / 2, 0.0), width=hi - lo, nx=nx, ny=1, **kw)


# ---------------------------------------------------------------------------
# kernel


@njit(cache=True, nogil=True)
def _max_part(m):
    return max(abs(m.real), abs(m.imag))


@njit(cache=True, nogil=True)
def _normalize(m, e):
    s = _max_part(m)
    if s == 0.0 or not math.isfinite(s):
        return m, e
    _, k = math.frexp(s)
    return complex(math.ldexp(m.real, -k), math.ldexp(m.imag, -k)), e + k


@njit(cache=True, nogil=True)
def _log_abs(m, e):
    a = abs(m)
    if a == 0.0:
        return -np.inf
    return math.log(a) + e * math.log(2.0)


@njit(cache=True, nogil=True)
def _step(w, z0, a, b, c, d, det):
    """One application of R in the chart suited to ``w``: ``(R(w), R'(w), ok)``."""
    if abs(w) <= 1.0:
        den = c * w + d
        if den == 0:
            return w, 0j, False
        ratio = (a * w + b) / den
        rw = 2.0 * z0 * ratio * det / (den * den)
    else:
        u = 1.0 / w
        den = c + d * u
        if den == 0:
            return w, 0j, False
        ratio = (a + b * u) / den
        rw = 2.0 * z0 * ratio * det * (u * u) / (den * den)
    return z0 * ratio * ratio, rw, True


@njit(cache=True, nogil=True)
def _periodic_check(lam, a, b, c, d, det, n):
    """``(|F_n(lam) - lam|, log |(R_lam^n)'(lam)|)`` for the marked point ``lam``."""
    w = lam
    acc = 0.0
    for _ in range(n):
        w2, rw, ok = _step(w, lam, a, b, c, d, det)
        if not ok or rw == 0:
            return np.inf, np.inf
        acc += math.log(abs(rw))
        w = w2
    return abs(w - lam), acc


@njit(cache=True, nogil=True)
def _classify(z0, t, q, r, theta, eps, m0, power, step2_orbit):
    """Return ``(class, m, w, log|mult|)`` for one parameter."""
    if z0 == 0:
        return UNDECIDED, 0, z0, 0.0
    a = 1.0 + (q - 2) * t
    b = t
    c = (q - 1) * t
    d = 1.0
    det = a * d - b * c
    log_rt = math.log(r * theta)
    log_eps = math.log(eps)

    w = z0
    df, df_e = 1.0 + 0j, 0
    mult, mult_e = 1.0 + 0j, 0
    for m in range(1, m0 + 1):
        for _ in range(power):
            w_next, rw, ok = _step(w, z0, a, b, c, d, det)
            if not ok:
                return UNDECIDED, m, w, 0.0
            # dF <- R_w dF + R/z, in mantissa/exponent form
            rz = w_next / z0
            shift = complex(math.ldexp(rz.real, -df_e), math.ldexp(rz.imag, -df_e))
            df, df_e = _normalize(rw * df + shift, df_e)
            mult, mult_e = _normalize(rw * mult, mult_e)
            w = w_next
            if not (math.isfinite(w.real) and math.isfinite(w.imag)):
                return UNDECIDED, m, w, 0.0

        log_mult = _log_abs(mult, mult_e)
        gc = w - z0
        g = abs(gc)
        # |dF/dz - 1|, exact unless dF is so large that the 1 is invisible
        if df_e > 60:
            log_dg = _log_abs(df, df_e)
            step = 0j
        else:
            dgc = complex(math.ldexp(df.real, df_e), math.ldexp(df.imag, df_e)) - 1.0
            dg = abs(dgc)
            log_dg = math.log(dg) if dg > 0 else -np.inf
            step = gc / dgc if dg > 0 else 0j
        near = g == 0.0 or math.log(g) < log_rt + log_dg
        if near:
            # When the Newton step really lands on a parameter whose marked
            # point is m-periodic and that cycle attracts, the hit is a passive
            # centre (e.g. z = 1 above t1), not activity.
            g_star, lm_star = _periodic_check(z0 - step, a, b, c, d, det, m * power)
            if not (g_star <= 0.25 * g and lm_star < 0.0):
                return ACTIVE, m, w, log_mult

        if step2_orbit:
            if log_mult < log_eps:
                return PASSIVE, m, w, log_mult
        else:
            if _log_abs(df, df_e) < log_eps:
                return PASSIVE, m, w, log_mult
    return UNDECIDED, m0, w, _log_abs(mult, mult_e)


@njit(cache=True, nogil=True)
def _classify_row(zs, t, q, r, theta, eps, m0, power, step2_orbit, out):
    for j in range(zs.size):
        out[j] = _classify(zs[j], t, q, r, theta, eps, m0, power, step2_orbit)[0]


def _args(s: RenderSettings):
    return (float(s.t), int(s.q), float(s.r), float(s.theta), float(s.eps), int(s.m0), int(s.power), s.step2 == "orbit")


@dataclass(frozen=True)
class PixelDetail:
    cls: PixelClass
    steps: int
    final_w: complex
    log_multiplier: float


def classify_pixel_detail(z0: complex, s: RenderSettings) -> PixelDetail:
    z0 = complex(z0)
    if z0 == 0:
        raise ValueError("z0 must be nonzero")
    k, m, w, lm = _classify(z0, *_args(s))
    return PixelDetail(PixelClass(int(k)), int(m), complex(w), float(lm))


def classify_pixel(z0: complex, s: RenderSettings) -> PixelClass:
    """Active, Passive or Undecided for the parameter ``z0``."""
    return classify_pixel_detail(z0, s).cls


# ---------------------------------------------------------------------------
# images


@dataclass(frozen=True, eq=False)
class LocusImage:
    settings: RenderSettings
    pixels: np.ndarray  # (ny, nx) int8, row 0 is the top edge

    @property
    def stats(self) -> dict[str, int]:
        counts = np.bincount(self.pixels.ravel(), minlength=3)
        return {c.name.lower(): int(counts[c.value]) for c in PixelClass}

    def centers(self) -> np.ndarray:
        s = self.settings
        xs = s.center.real - s.width / 2 + (np.arange(s.nx) + 0.5) * s.r
        ys = s.center.imag + s.height / 2 - (np.arange(s.ny) + 0.5) * s.r
        return xs[None, :] + 1j * ys[:, None]


def render(s: RenderSettings, workers: int = 1) -> LocusImage:
    """Classify every pixel centre.  The result does not depend on ``workers``."""
    grid = np.empty((s.ny, s.nx), dtype=np.int8)
    xs = s.center.real - s.width / 2 + (np.arange(s.nx) + 0.5) * s.r
    args = _args(s)

    def row(i):
        y = s.center.imag + s.height / 2 - (i + 0.5) * s.r
        zs = (xs + 1j * y).astype(np.complex128)
        _classify_row(zs, *args, grid[i])

    if workers <= 1:
        for i in range(s.ny):
            row(i)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(row, range(s.ny)))
    return LocusImage(s, grid)


def image_bytes(img: LocusImage) -> bytes:
    """Binary portable pixmap (P6) encoding of the classification."""
    s = img.settings
    palette = np.zeros((3, 3), dtype=np.uint8)
    for k, rgb in COLORS.items():
        palette[k] = rgb
    header = f"P6\n{s.nx} {s.ny}\n255\n".encode("ascii")
    return header + palette[img.pixels].tobytes()


def write_image(img: LocusImage, path) -> str:
    """Write the P6 image and a JSON sidecar of the settings; return the sidecar path."""
    with open(path, "wb") as fh:
        fh.write(image_bytes(img))
    sidecar = f"{path}.json"
    with open(sidecar, "w") as fh:
        json.dump({"settings": img.settings.to_json(), "stats": img.stats}, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return sidecar


def read_ppm(path) -> tuple[int, int, np.ndarray]:
    """Parse a P6 file written by ``write_image`` into ``(nx, ny, rgb)``."""
    with open(path, "rb") as fh:
        data = fh.read()
    magic, dims, maxval, rest = data.split(b"\n", 3)
    if magic != b"P6" or maxval != b"255":
        raise ValueError("not an 8-bit P6 file")
    nx, ny = (int(v) for v in dims.split())
    rgb = np.frombuffer(rest, dtype=np.uint8).reshape(ny, nx, 3)
    return nx, ny, rgb
