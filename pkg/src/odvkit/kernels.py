"""Resampling primitives: bilinear/deformable sampling, pixel shuffle, warping, bicubic resize.

Feature maps are ``(C, H, W)`` arrays; 2-D frames are accepted wherever a
feature map is and are treated as a single channel. Horizontal coordinates
may wrap around the ERP seam; vertical coordinates always clamp at the
pole rows.
"""

import math
from fractions import Fraction

import numpy as np

from ._validation import ShapeError, check_feature_map, check_frame, check_positive_int


def _wrap_or_clamp(idx, size, mode):
    if mode == "wrap":
        return np.mod(idx, size)
    if mode == "clamp":
        return np.clip(idx, 0, size - 1)
    raise ValueError(f"unknown boundary mode {mode!r}")


def bilinear_sample(src, u, v, h_mode="wrap", v_mode="clamp"):
    """Sample ``src`` at continuous positions ``(u, v)``.

    Parameters
    ----------
    src : array_like, shape (C, H, W) or (H, W)
    u, v : array_like
        Horizontal and vertical pixel coordinates, broadcast together.
        Integer values hit pixel centers.
    h_mode : {"wrap", "clamp"}
        Horizontal boundary handling. ``"wrap"`` reduces ``u`` modulo W.
    v_mode : {"clamp"}
        Vertical boundary handling.

    Returns
    -------
    ndarray, shape (C,) + broadcast shape of ``u`` and ``v``
    """
    src = check_feature_map(src, "src")
    if v_mode != "clamp":
        raise ValueError("only v_mode='clamp' is supported")
    _, height, width = src.shape
    u, v = np.broadcast_arrays(np.asarray(u, dtype=np.float64), np.asarray(v, dtype=np.float64))
    if h_mode == "wrap":
        u = np.mod(u, width)
    elif h_mode == "clamp":
        u = np.clip(u, 0.0, width - 1)
    else:
        raise ValueError(f"unknown h_mode {h_mode!r}")
    v = np.clip(v, 0.0, height - 1)

    u0 = np.floor(u)
    v0 = np.floor(v)
    fu = u - u0
    fv = v - v0
    u0 = u0.astype(np.intp)
    v0 = v0.astype(np.intp)
    u1 = _wrap_or_clamp(u0 + 1, width, h_mode)
    u0 = _wrap_or_clamp(u0, width, h_mode)
    v1 = np.minimum(v0 + 1, height - 1)

    top = src[:, v0, u0] * (1.0 - fu) + src[:, v0, u1] * fu
    bottom = src[:, v1, u0] * (1.0 - fu) + src[:, v1, u1] * fu
    return top * (1.0 - fv) + bottom * fv


def regular_taps(kernel_size=3):
    """Row-major ``(K, 2)`` grid of ``(du, dv)`` tap displacements centered on zero."""
    kernel_size = check_positive_int(kernel_size, "kernel_size")
    r = np.arange(kernel_size) - (kernel_size - 1) / 2.0
    dv, du = np.meshgrid(r, r, indexing="ij")
    return np.stack([du.ravel(), dv.ravel()], axis=1)


def deformable_sample(src, weights, offsets, masks, base_taps=None):
    """Forward pass of modulated deformable convolution with given parameters.

    ``out[o, y, x] = sum_k sum_c weights[o, c, k] * masks[k, y, x]
    * src_c(x + base_taps[k, 0] + offsets[k, 0, y, x],
    y + base_taps[k, 1] + offsets[k, 1, y, x])``

    Samples wrap horizontally so taps near the ERP seam reach across it.

    Parameters
    ----------
    src : array_like, shape (C, H, W)
    weights : array_like, shape (C_out, C, K)
    offsets : array_like, shape (K, 2, H, W)
        Per-tap ``(du, dv)`` displacements in pixels.
    masks : array_like, shape (K, H, W)
        Modulation scalars in [0, 1].
    base_taps : array_like, shape (K, 2), optional
        Regular tap grid; defaults to the square grid with K taps.
    """
    src = check_feature_map(src, "src")
    channels, height, width = src.shape
    weights = np.asarray(weights, dtype=np.float64)
    offsets = np.asarray(offsets, dtype=np.float64)
    masks = np.asarray(masks, dtype=np.float64)
    if weights.ndim != 3 or weights.shape[1] != channels:
        raise ShapeError(f"weights must be (C_out, {channels}, K), got {weights.shape}")
    taps = weights.shape[2]
    if offsets.shape != (taps, 2, height, width):
        raise ShapeError(f"offsets must be {(taps, 2, height, width)}, got {offsets.shape}")
    if masks.shape != (taps, height, width):
        raise ShapeError(f"masks must be {(taps, height, width)}, got {masks.shape}")
    if masks.size and (masks.min() < 0.0 or masks.max() > 1.0):
        raise ValueError("masks must lie in [0, 1]")
    if base_taps is None:
        side = math.isqrt(taps)
        if side * side != taps:
            raise ShapeError(f"cannot infer a square tap grid for K={taps}; pass base_taps")
        base_taps = regular_taps(side)
    base_taps = np.asarray(base_taps, dtype=np.float64)
    if base_taps.shape != (taps, 2):
        raise ShapeError(f"base_taps must be ({taps}, 2), got {base_taps.shape}")

    yy, xx = np.mgrid[0:height, 0:width].astype(np.float64)
    out = np.zeros((weights.shape[0], height, width))
    for k in range(taps):
        u = xx + base_taps[k, 0] + offsets[k, 0]
        v = yy + base_taps[k, 1] + offsets[k, 1]
        sampled = bilinear_sample(src, u, v, h_mode="wrap") * masks[k]
        out += np.tensordot(weights[:, :, k], sampled, axes=(1, 0))
    return out


def pixel_shuffle(src, r):
    """Rearrange ``(C*r*r, H, W)`` into ``(C, r*H, r*W)``.

    Input channel ``c*r*r + i*r + j`` lands at sub-pixel row ``i``, column ``j``.
    """
    src = check_feature_map(src, "src")
    r = check_positive_int(r, "r")
    channels, height, width = src.shape
    if channels % (r * r):
        raise ShapeError(f"channel count {channels} is not divisible by r^2={r * r}")
    out = src.reshape(channels // (r * r), r, r, height, width)
    return out.transpose(0, 3, 1, 4, 2).reshape(channels // (r * r), height * r, width * r)


def pixel_unshuffle(src, r):
    """Inverse of :func:`pixel_shuffle`."""
    src = check_feature_map(src, "src")
    r = check_positive_int(r, "r")
    channels, height, width = src.shape
    if height % r or width % r:
        raise ShapeError(f"spatial size {height}x{width} is not divisible by r={r}")
    out = src.reshape(channels, height // r, r, width // r, r)
    return out.transpose(0, 2, 4, 1, 3).reshape(channels * r * r, height // r, width // r)


def warp(src, flow):
    """Backward warp: ``out[y, x] = src(x + flow[0, y, x], y + flow[1, y, x])``."""
    src = check_frame(src, "src")
    flow = np.asarray(flow, dtype=np.float64)
    if flow.shape != (2,) + src.shape:
        raise ShapeError(f"flow must be {(2,) + src.shape}, got {flow.shape}")
    if not np.all(np.isfinite(flow)):
        raise ValueError("flow contains non-finite values")
    yy, xx = np.mgrid[0 : src.shape[0], 0 : src.shape[1]].astype(np.float64)
    return bilinear_sample(src, xx + flow[0], yy + flow[1], h_mode="wrap")[0]


def cubic_kernel(x, a=-0.5):
    """Keys cubic convolution kernel."""
    x = np.abs(np.asarray(x, dtype=np.float64))
    x2 = x * x
    x3 = x2 * x
    near = (a + 2.0) * x3 - (a + 3.0) * x2 + 1.0
    far = a * x3 - 5.0 * a * x2 + 8.0 * a * x - 4.0 * a
    return np.where(x <= 1.0, near, np.where(x < 2.0, far, 0.0))


def resize_matrix(n_in, n_out, scale, mode, a=-0.5):
    """Dense ``(n_out, n_in)`` bicubic interpolation matrix along one axis.

    Output sample ``i`` sits at input coordinate ``(i + 0.5) / scale - 0.5``.
    For ``scale < 1`` the kernel is stretched by ``1 / scale`` so it also
    low-pass filters. Rows are normalized to sum to one.
    """
    stretch = min(float(scale), 1.0)
    support = 2.0 / stretch
    centers = (np.arange(n_out) + 0.5) / float(scale) - 0.5
    first = np.floor(centers - support).astype(np.intp) + 1
    span = int(math.ceil(2 * support)) + 1
    idx = first[:, None] + np.arange(span)[None, :]
    coeff = cubic_kernel((centers[:, None] - idx) * stretch, a) * stretch
    coeff /= coeff.sum(axis=1, keepdims=True)
    idx = _wrap_or_clamp(idx, n_in, mode)
    mat = np.zeros((n_out, n_in))
    np.add.at(mat, (np.repeat(np.arange(n_out), span), idx.ravel()), coeff.ravel())
    return mat


def output_size(height, width, scale):
    out = (int(round(height * float(scale))), int(round(width * float(scale))))
    if min(out) < 1:
        raise ValueError(f"scale {scale} gives a degenerate {out[0]}x{out[1]} output")
    return out


def parse_scale(scale):
    if isinstance(scale, str):
        scale = Fraction(scale)
    if not scale > 0:
        raise ValueError(f"scale must be positive, got {scale}")
    return scale


def bicubic_resize(src, scale, a=-0.5):
    """Resize an ERP frame by ``scale`` with an anti-aliased bicubic filter.

    Horizontal taps wrap around the seam, vertical taps clamp at the poles.
    ``scale`` may be a float, a :class:`fractions.Fraction` or a string such
    as ``"1/4"``.
    """
    src = check_frame(src, "src")
    scale = parse_scale(scale)
    height, width = src.shape
    out_h, out_w = output_size(height, width, scale)
    rows = resize_matrix(height, out_h, scale, "clamp", a)
    cols = resize_matrix(width, out_w, scale, "wrap", a)
    return rows @ src @ cols.T
