import json

import numpy as np
import pytest

from cayleypotts import criticality as cr
from cayleypotts.locus import (
    ACTIVE,
    PASSIVE,
    UNDECIDED,
    PixelClass,
    RenderSettings,
    classify_pixel,
    classify_pixel_detail,
    image_bytes,
    read_ppm,
    render,
    write_image,
)
from cayleypotts.renorm import OrbitKind, Params, orbit_limit


def _dilate(mask, k):
    """Pixels within Chebyshev distance ``k`` of a True pixel."""
    h, w = mask.shape
    out = mask.copy()
    for di in range(-k, k + 1):
        for dj in range(-k, k + 1):
            src = mask[max(-di, 0) : h + min(-di, 0), max(-dj, 0) : w + min(-dj, 0)]
            out[max(di, 0) : h + min(di, 0), max(dj, 0) : w + min(dj, 0)] |= src
    return out


def _ray_outliers(t, q, lo, hi, px=2):
    s = RenderSettings.ray(t, q, lo, hi)
    img = render(s)
    xs = img.centers()[0].real
    act = xs[img.pixels[0] == ACTIVE]
    pred = cr.accumulation_points(t, q).points
    return [x for x in act if not any(abs(x - p) <= px * s.r for p in pred)], act


# ---------------------------------------------------------------------------
# settings


@pytest.mark.parametrize(
    "kw",
    [
        dict(nx=0),
        dict(ny=0),
        dict(theta=0.0),
        dict(theta=1.0),
        dict(eps=0.0),
        dict(m0=0),
        dict(width=0.0),
        dict(q=1),
        dict(t=1.0),
        dict(t=0.0),
        dict(power=3),
        dict(step2="newton"),
    ],
)
def test_settings_validation(kw):
    base = dict(t=0.5, q=3, center=0.5, width=1.0, nx=10)
    with pytest.raises(ValueError):
        RenderSettings(**{**base, **kw})


def test_pixel_geometry():
    s = RenderSettings(t=0.5, q=3, center=1 + 1j, width=2.0, nx=4, ny=2)
    assert s.r == 0.5 and s.height == 1.0
    assert s.pixel_center(0, 0) == pytest.approx(0.25 + 1.25j)
    assert s.pixel_center(1, 3) == pytest.approx(1.75 + 0.75j)
    img = render(s)
    c = img.centers()
    assert c.shape == (2, 4)
    assert c[1, 3] == pytest.approx(s.pixel_center(1, 3))
    ray = RenderSettings.ray(0.5, 3, 0.0, 10.0, nx=100)
    assert ray.ny == 1 and ray.pixel_center(0, 0) == pytest.approx(0.05)


# ---------------------------------------------------------------------------
# single pixels


def test_classify_examples():
    s = RenderSettings(t=0.26, q=3, center=2.0, width=0.01, nx=100)
    assert classify_pixel(2.0, s) is PixelClass.PASSIVE
    s = RenderSettings(t=0.5, q=3, center=1.0, width=0.01, nx=100)
    det = classify_pixel_detail(1.0, s)
    assert det.cls is PixelClass.PASSIVE
    # at t = 0.5 the marked point z = 1 is fixed: 1 = ((t + 1 + t)/(1 + 2t))^2
    assert det.final_w == pytest.approx(1.0)
    assert det.log_multiplier < np.log(s.eps)


@pytest.mark.parametrize("r, m0", [(1e-2, 2000), (1e-3, 2000), (1e-4, 20000)])
def test_accumulation_point_is_active(r, m0):
    # the ferromagnetic accumulation point is parabolic: the orbit creeps, and
    # Step 1 needs a number of steps growing like 1/r before it fires
    z = cr.accumulation_points(0.26, 3).points[0]
    s = RenderSettings(t=0.26, q=3, center=z, width=100 * r, nx=100, m0=m0)
    assert classify_pixel(z, s) is PixelClass.ACTIVE


def test_small_pixel_at_parabolic_point_needs_larger_budget():
    z = cr.accumulation_points(0.26, 3).points[0]
    s = RenderSettings(t=0.26, q=3, center=z, width=1e-2, nx=100)
    assert classify_pixel(z, s) is PixelClass.UNDECIDED


def test_zero_parameter_rejected():
    s = RenderSettings(t=0.5, q=3, center=0.0, width=1.0, nx=10)
    with pytest.raises(ValueError):
        classify_pixel(0.0, s)


def test_single_pixel_image():
    img = render(RenderSettings(t=0.26, q=3, center=2.0, width=0.01, nx=1))
    assert img.pixels.tolist() == [[PASSIVE]]
    assert img.stats == {"passive": 1, "active": 0, "undecided": 0}


# ---------------------------------------------------------------------------
# rays


@pytest.mark.parametrize("t", [0.1, 0.2, 0.26])
@pytest.mark.parametrize("lo, hi", [(0.01, 100.0), (0.0, 2.0)])
def test_ferro_ray_active_only_at_accumulation_points(t, lo, hi):
    bad, _ = _ray_outliers(t, 3, lo, hi)
    assert bad == []


@pytest.mark.parametrize("t", [0.3, 0.5, 0.9])
def test_ferro_ray_above_t2_has_no_activity(t):
    for lo, hi in [(0.01, 100.0), (0.0, 2.0)]:
        bad, act = _ray_outliers(t, 3, lo, hi)
        assert act.size == 0


@pytest.mark.parametrize("t", [6.0, 8.0])
def test_antiferro_ray_active_only_at_accumulation_points(t):
    bad, _ = _ray_outliers(t, 3, 0.0, 0.5)
    assert bad == []


def test_nonpassive_ray_pixels_cluster_at_critical_parameters():
    lo, hi = cr.zc_pm(8.0, 3)
    img = render(RenderSettings.ray(8.0, 3, 0.0, 0.5))
    xs = img.centers()[0].real[img.pixels[0] != PASSIVE]
    assert xs.size > 0
    # slow (parabolic) convergence leaves an undecided band around zc+
    assert np.min(np.abs(xs[:, None] - np.array([lo, hi])), axis=1).max() < 0.05


@pytest.mark.parametrize("which, width", [(0, 0.004), (1, 0.05)])
def test_active_curves_pass_by_critical_parameters(which, width):
    z0 = cr.zc_pm(8.0, 3)[which]
    s = RenderSettings(t=8.0, q=3, center=z0, width=width, nx=41, ny=41)
    img = render(s)
    act = img.centers()[img.pixels == ACTIVE]
    assert act.size > 0
    assert np.abs(act - z0).min() <= 4 * s.r


# ---------------------------------------------------------------------------
# agreement with the dynamics


WINDOW = RenderSettings(t=8.0, q=3, center=0.25 + 0.1j, width=0.8, nx=80, ny=60)


def test_passive_pixels_have_attracting_orbits():
    img = render(WINDOW)
    passive = img.centers()[img.pixels == PASSIVE]
    rng = np.random.default_rng(0)
    for z in rng.choice(passive, 100, replace=False):
        rep = orbit_limit(Params(z, WINDOW.t, WINDOW.q), z)
        assert rep.kind in (OrbitKind.CONVERGED_FIXED, OrbitKind.CONVERGED_TWO_CYCLE)
        assert rep.attracting


@pytest.mark.parametrize(
    "t, center, width",
    [(8.0, 0.25 + 0.1j, 0.8), (6.0, 0.3, 1.0), (3.0, 1 + 1j, 4.0), (0.2, 0.5 + 0.5j, 2.0)],
)
def test_second_iterate_agrees_away_from_activity(t, center, width):
    # R o R with half the step budget sees the same orbit
    s1 = RenderSettings(t=t, q=3, center=center, width=width, nx=80, ny=60)
    s2 = RenderSettings(t=t, q=3, center=center, width=width, nx=80, ny=60, power=2, m0=s1.m0 // 2)
    a, b = render(s1).pixels, render(s2).pixels
    near = _dilate((a == ACTIVE) | (b == ACTIVE), 3)
    assert ((a != b) & ~near).sum() == 0


# ---------------------------------------------------------------------------
# determinism and output


def test_render_independent_of_workers():
    s = RenderSettings(t=6.0, q=3, center=0.25, width=1.0, nx=48, ny=32)
    ref = image_bytes(render(s, workers=1))
    for w in (2, 4, 8):
        assert image_bytes(render(s, workers=w)) == ref


def test_ppm_all_passive(tmp_path):
    s = RenderSettings(t=0.26, q=3, center=2.0, width=0.01, nx=2, ny=2)
    img = render(s)
    path = tmp_path / "x.ppm"
    sidecar = write_image(img, path)
    raw = path.read_bytes()
    assert raw.startswith(b"P6\n2 2\n255\n")
    nx, ny, rgb = read_ppm(path)
    assert (nx, ny) == (2, 2)
    assert (rgb == 255).all()
    meta = json.loads(open(sidecar).read())
    assert meta["stats"] == {"passive": 4, "active": 0, "undecided": 0}
    assert meta["settings"]["center"] == [2.0, 0.0]
    assert meta["settings"]["r"] == pytest.approx(0.005)
    write_image(img, tmp_path / "y.ppm")
    assert (tmp_path / "y.ppm").read_bytes() == raw


def test_ppm_colours(tmp_path):
    img = render(WINDOW)
    path = tmp_path / "w.ppm"
    write_image(img, path)
    nx, ny, rgb = read_ppm(path)
    assert (nx, ny) == (WINDOW.nx, WINDOW.ny)
    assert (rgb[img.pixels == PASSIVE] == 255).all()
    assert (rgb[img.pixels == ACTIVE] == 0).all()
    assert (rgb[img.pixels == UNDECIDED] == [255, 0, 0]).all()


def test_read_ppm_rejects_other_formats(tmp_path):
    path = tmp_path / "p3.ppm"
    path.write_bytes(b"P3\n1 1\n255\n0 0 0\n")
    with pytest.raises(ValueError):
        read_ppm(path)
