"""Sphere <-> equirectangular (ERP) coordinates, latitude weights and viewports.

Conventions used throughout the package:

* ``theta`` is longitude in ``[0, 2*pi)``, increasing with the column index.
* ``phi`` is latitude measured from the equator, in ``[-pi/2, pi/2]``;
  row 0 is the north-pole edge.
* Pixel index ``i`` has its center at continuous coordinate ``i``, so the
  frame spans ``[-0.5, W - 0.5)`` horizontally and ``[-0.5, H - 0.5]``
  vertically.
"""

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from ._validation import check_frame, check_frame_size
from .kernels import bilinear_sample

TWO_PI = 2.0 * math.pi


class SphericalCoord(NamedTuple):
    theta: float
    phi: float


class ErpCoord(NamedTuple):
    u: float
    v: float


class FrameSize(NamedTuple):
    height: int
    width: int


@dataclass(frozen=True)
class ViewportSpec:
    """Pinhole view of the sphere.

    ``center`` is the viewing direction, ``fov_h``/``fov_v`` are full angles
    in radians and ``out_size`` is the output raster ``(height, width)``.
    """

    center: SphericalCoord
    fov_h: float
    fov_v: float
    out_size: FrameSize
    roll: float = 0.0

    def __post_init__(self):
        for name in ("fov_h", "fov_v"):
            fov = getattr(self, name)
            if not (0.0 < fov < math.pi):
                raise ValueError(f"{name} must lie strictly inside (0, pi), got {fov}")
        h, w = self.out_size
        if h < 1 or w < 1:
            raise ValueError(f"out_size must be positive, got {tuple(self.out_size)}")
        object.__setattr__(self, "center", SphericalCoord(*self.center))
        object.__setattr__(self, "out_size", FrameSize(int(h), int(w)))


def erp_to_sphere(u, v, height, width):
    """Map continuous ERP pixel coordinates to ``(theta, phi)``.

    Works elementwise on scalars or arrays. ``u`` wraps modulo the width;
    ``v`` is clamped to the frame's latitude range.
    """
    height, width = check_frame_size(height, width)
    u = np.asarray(u, dtype=np.float64)
    v = np.clip(np.asarray(v, dtype=np.float64), -0.5, height - 0.5)
    theta = np.mod(TWO_PI * (u + 0.5) / width, TWO_PI)
    phi = -math.pi * (v + 0.5 - height / 2.0) / height
    if theta.ndim == 0:
        return SphericalCoord(float(theta), float(phi))
    return SphericalCoord(theta, phi)


def sphere_to_erp(theta, phi, height, width):
    """Inverse of :func:`erp_to_sphere`; ``theta`` is reduced modulo 2*pi first."""
    height, width = check_frame_size(height, width)
    theta = np.mod(np.asarray(theta, dtype=np.float64), TWO_PI)
    phi = np.asarray(phi, dtype=np.float64)
    u = theta * width / TWO_PI - 0.5
    v = height / 2.0 - 0.5 - phi * height / math.pi
    if u.ndim == 0:
        return ErpCoord(float(u), float(v))
    return ErpCoord(u, v)


def stretching_ratio(phi):
    """Area ratio between a sphere patch and its ERP image, ``cos(phi)``."""
    phi = np.asarray(phi, dtype=np.float64)
    if np.any(np.abs(phi) > math.pi / 2 + 1e-12):
        raise ValueError("latitude must satisfy |phi| <= pi/2")
    out = np.cos(phi)
    # cos(pi/2) is 6e-17 in floating point; the pole is exactly zero
    out = np.where(np.abs(phi) >= math.pi / 2, 0.0, out)
    return float(out) if out.ndim == 0 else out


def latitude_weights(height):
    """Per-row latitude weight, ``cos((v - H/2 + 0.5) * pi / H)``."""
    (height, _) = check_frame_size(height, 1)
    rows = np.arange(height, dtype=np.float64)
    return stretching_ratio(erp_to_sphere(np.zeros(height), rows, height, 1).phi)


def latitude_weight_map(height, width):
    """Column-constant ``(H, W)`` map of :func:`latitude_weights`."""
    height, width = check_frame_size(height, width)
    return np.repeat(latitude_weights(height)[:, None], width, axis=1)


def _rotation(center, roll):
    """Columns are the world-frame right, up and forward axes of the camera."""
    theta, phi = center
    forward = np.array([math.cos(phi) * math.cos(theta), math.cos(phi) * math.sin(theta), math.sin(phi)])
    right = np.array([-math.sin(theta), math.cos(theta), 0.0])
    up = np.array([-math.sin(phi) * math.cos(theta), -math.sin(phi) * math.sin(theta), math.cos(phi)])
    if roll:
        c, s = math.cos(roll), math.sin(roll)
        right, up = c * right + s * up, -s * right + c * up
    return np.stack([right, up, forward], axis=1)


def viewport_directions(vp):
    """Spherical direction ``(theta, phi)`` of every output pixel of ``vp``."""
    h, w = vp.out_size
    tx = math.tan(vp.fov_h / 2.0)
    ty = math.tan(vp.fov_v / 2.0)
    x = (2.0 * (np.arange(w) + 0.5) / w - 1.0) * tx
    y = (1.0 - 2.0 * (np.arange(h) + 0.5) / h) * ty
    xx, yy = np.meshgrid(x, y)
    cam = np.stack([xx, yy, np.ones_like(xx)], axis=-1)
    rays = cam @ _rotation(vp.center, vp.roll).T
    rays /= np.linalg.norm(rays, axis=-1, keepdims=True)
    theta = np.mod(np.arctan2(rays[..., 1], rays[..., 0]), TWO_PI)
    phi = np.arcsin(np.clip(rays[..., 2], -1.0, 1.0))
    return theta, phi


def viewport_project(frame, vp):
    """Render the rectilinear view ``vp`` from an ERP ``frame``.

    Output has shape ``vp.out_size``. Sampling is bilinear with horizontal
    wrap and vertical clamp.
    """
    frame = check_frame(frame)
    if not isinstance(vp, ViewportSpec):
        raise TypeError("vp must be a ViewportSpec")
    height, width = frame.shape
    theta, phi = viewport_directions(vp)
    u, v = sphere_to_erp(theta, phi, height, width)
    return bilinear_sample(frame, u, v, h_mode="wrap")[0]


def seam_viewport(fov, out_size):
    """Square-pixel viewport looking at the ERP left/right boundary."""
    h, w = out_size
    fov_v = 2.0 * math.atan(math.tan(fov / 2.0) * h / w)
    return ViewportSpec(SphericalCoord(0.0, 0.0), fov, fov_v, FrameSize(h, w))


def seam_stitch(frame, fov, out_size):
    """Project the region around longitude 0 so the ERP seam lands on the output midline."""
    return viewport_project(frame, seam_viewport(fov, out_size))


def seam_discontinuity_score(frame, baseline="local", band=2, eps=1e-12):
    """Ratio of the wrap-around step ``|f[:, 0] - f[:, -1]|`` to typical horizontal steps.

    About 1 for content that is continuous across the seam, much larger
    for a hard seam.

    ``baseline="local"`` compares against the mean step over ``band``
    column pairs on each side of the seam, skipping the pairs that touch
    the boundary columns so a one-column artifact at the edge is not
    absorbed into its own baseline. ``baseline="global"`` uses the mean
    over every interior column pair.
    """
    frame = check_frame(frame)
    width = frame.shape[1]
    if width < 2:
        raise ValueError("seam score needs at least two columns")
    seam = np.mean(np.abs(frame[:, 0] - frame[:, -1]))
    steps = np.abs(np.diff(frame, axis=1))
    if baseline == "global":
        interior = steps.mean()
    elif baseline == "local":
        if width < 2 * band + 4:
            raise ValueError(f"local baseline with band={band} needs width >= {2 * band + 4}")
        left = steps[:, 1 : 1 + band]
        right = steps[:, width - 2 - band : width - 2]
        interior = np.concatenate([left, right], axis=1).mean()
    else:
        raise ValueError(f"unknown baseline {baseline!r}")
    return float(seam / (interior + eps))


def midline_discontinuity_score(view, **kwargs):
    """:func:`seam_discontinuity_score` across the vertical midline of ``view``.

    Intended for :func:`seam_stitch` output of even width, where the ERP
    seam sits between the two middle columns.
    """
    view = check_frame(view)
    return seam_discontinuity_score(np.roll(view, view.shape[1] // 2, axis=1), **kwargs)
