"""Full-reference quality metrics for ERP frames and sequences.

All frames are luma planes scaled to ``[0, 1]`` unless a different
``peak`` is given. Identical inputs give a PSNR of ``math.inf``.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.ndimage import correlate1d

from ._validation import ShapeError, check_frame, check_positive_int, check_same_shape, check_sequence
from .geometry import FrameSize, SphericalCoord, ViewportSpec, latitude_weights, viewport_project
from .kernels import warp

SSIM_WINDOW = 11
SSIM_SIGMA = 1.5
SSIM_K1 = 0.01
SSIM_K2 = 0.03
E_WARP_SCALE = 1e5


def _pair(x, y, min_size=1):
    x = check_frame(x, "x", min_size)
    y = check_frame(y, "y", min_size)
    check_same_shape(x, y, names=["x", "y"])
    return x, y


def _psnr_from_mse(mse, peak):
    if mse == 0:
        return math.inf
    return float(10.0 * np.log10(peak * peak / mse))


def psnr(x, y, peak=1.0):
    x, y = _pair(x, y)
    return _psnr_from_mse(float(np.mean((x - y) ** 2)), peak)


def ws_psnr(x, y, peak=1.0, weights=None):
    """PSNR with the squared error averaged under latitude weights.

    ``weights`` overrides the default latitude map; it must broadcast to the
    frame shape.
    """
    x, y = _pair(x, y)
    if weights is None:
        weights = latitude_weights(x.shape[0])[:, None]
    w = np.broadcast_to(np.asarray(weights, dtype=np.float64), x.shape)
    wmse = float(np.sum(w * (x - y) ** 2) / np.sum(w))
    return _psnr_from_mse(wmse, peak)


def gaussian_window(size=SSIM_WINDOW, sigma=SSIM_SIGMA):
    r = np.arange(size) - (size - 1) / 2.0
    g = np.exp(-(r * r) / (2.0 * sigma * sigma))
    return g / g.sum()


def _filter_valid(img, g):
    half = len(g) // 2
    out = correlate1d(correlate1d(img, g, axis=0, mode="constant"), g, axis=1, mode="constant")
    return out[half : img.shape[0] - half, half : img.shape[1] - half]


def ssim_map(x, y, peak=1.0):
    """SSIM map over the window-valid region, shape ``(H - 10, W - 10)``."""
    x, y = _pair(x, y, SSIM_WINDOW)
    g = gaussian_window()
    c1 = (SSIM_K1 * peak) ** 2
    c2 = (SSIM_K2 * peak) ** 2
    mu_x = _filter_valid(x, g)
    mu_y = _filter_valid(y, g)
    sxx = _filter_valid(x * x, g) - mu_x * mu_x
    syy = _filter_valid(y * y, g) - mu_y * mu_y
    sxy = _filter_valid(x * y, g) - mu_x * mu_y
    num = (2.0 * mu_x * mu_y + c1) * (2.0 * sxy + c2)
    den = (mu_x * mu_x + mu_y * mu_y + c1) * (sxx + syy + c2)
    return num / den


def ssim(x, y, peak=1.0):
    return float(np.mean(ssim_map(x, y, peak)))


def ws_ssim(x, y, peak=1.0, weights=None):
    """SSIM map averaged under latitude weights of the rows at each window center."""
    smap = ssim_map(x, y, peak)
    half = SSIM_WINDOW // 2
    if weights is None:
        weights = latitude_weights(np.shape(x)[0])[:, None]
    w = np.broadcast_to(np.asarray(weights, dtype=np.float64), np.shape(x))
    w = w[half : half + smap.shape[0], half : half + smap.shape[1]]
    return float(np.sum(w * smap) / np.sum(w))


def block_matching_flow(a, b, block=8, radius=4):
    """Blockwise integer flow such that ``warp(a, flow)`` approximates ``b``.

    For each ``block x block`` tile of ``b`` (edge tiles may be smaller), the
    displacement ``(du, dv)`` with ``|du|, |dv| <= radius`` minimizing the sum
    of absolute differences against ``a`` is chosen. Horizontal lookups wrap,
    vertical ones clamp. Ties go to the smaller ``du**2 + dv**2``, then to the
    lexicographically smaller ``(du, dv)``.
    """
    a, b = _pair(a, b)
    block = check_positive_int(block, "block")
    radius = check_positive_int(radius, "radius", minimum=0)
    h, w = a.shape
    rows = np.minimum(np.arange(h)[:, None] + np.arange(-radius, radius + 1)[None, :], h - 1)
    rows = np.maximum(rows, 0)
    by = np.arange(h) // block
    bx = np.arange(w) // block
    nby, nbx = by[-1] + 1, bx[-1] + 1
    starts_y = np.arange(0, h, block)
    starts_x = np.arange(0, w, block)

    candidates = sorted(
        ((du, dv) for du in range(-radius, radius + 1) for dv in range(-radius, radius + 1)),
        key=lambda d: (d[0] ** 2 + d[1] ** 2, d[0], d[1]),
    )
    best = np.full((nby, nbx), np.inf)
    best_d = np.zeros((2, nby, nbx))
    for du, dv in candidates:
        shifted = np.roll(a[rows[:, dv + radius]], -du, axis=1)
        sad = np.add.reduceat(np.add.reduceat(np.abs(b - shifted), starts_y, axis=0), starts_x, axis=1)
        # strict improvement only, so earlier (preferred) candidates keep ties
        better = sad < best
        best[better] = sad[better]
        best_d[0][better] = du
        best_d[1][better] = dv
    return best_d[:, by[:, None], bx[None, :]]


def warping_error(seq, flows=None, masks=None, scale=E_WARP_SCALE, block=8, radius=4):
    """Mean masked squared error between each frame and its flow-warped predecessor.

    ``flows[t]`` maps frame ``t`` onto frame ``t + 1`` (backward convention
    of :func:`odvkit.kernels.warp`); missing flows come from
    :func:`block_matching_flow`. The result is multiplied by ``scale``
    (default ``1e5``). Returns the scaled value and the per-pair values.
    """
    seq = check_sequence(seq, "seq", min_length=2)
    n = seq.shape[0]
    if flows is not None and len(flows) != n - 1:
        raise ShapeError(f"expected {n - 1} flows, got {len(flows)}")
    if masks is not None and len(masks) != n - 1:
        raise ShapeError(f"expected {n - 1} masks, got {len(masks)}")
    per_pair = []
    for t in range(n - 1):
        flow = flows[t] if flows is not None else block_matching_flow(seq[t], seq[t + 1], block, radius)
        mask = np.ones(seq.shape[1:]) if masks is None else np.asarray(masks[t], dtype=np.float64)
        if mask.shape != seq.shape[1:]:
            raise ShapeError(f"mask {t} has shape {mask.shape}, expected {seq.shape[1:]}")
        total = mask.sum()
        if total <= 0:
            raise ValueError(f"mask {t} has no positive weight")
        err = (seq[t + 1] - warp(seq[t], flow)) ** 2
        per_pair.append(float(np.sum(mask * err) / total) * scale)
    return float(np.mean(per_pair)), per_pair


@dataclass
class ViewpointList:
    """Viewing directions to evaluate, best first; ``k`` of them are averaged."""

    centers: list
    k: int = 5
    scores: list = None

    def __post_init__(self):
        self.centers = [SphericalCoord(*c) for c in self.centers]
        if not self.centers:
            raise ValueError("viewpoint list is empty")
        self.k = check_positive_int(self.k, "k")
        if self.k > len(self.centers):
            raise ValueError(f"k={self.k} exceeds the {len(self.centers)} viewpoints")


@dataclass
class ViewportResult:
    psnr: list
    ssim: list
    top_k_psnr: float
    top_k_ssim: float


def viewport_metrics(hr, sr, viewpoints, fov=math.pi / 2, out_size=(480, 480), fov_v=None):
    """PSNR/SSIM of rectilinear views rendered identically from ``hr`` and ``sr``."""
    hr, sr = _pair(hr, sr)
    out_size = FrameSize(*out_size)
    fov_v = fov if fov_v is None else fov_v
    p, s = [], []
    for center in viewpoints.centers:
        vp = ViewportSpec(center, fov, fov_v, out_size)
        a = viewport_project(hr, vp)
        b = viewport_project(sr, vp)
        p.append(psnr(a, b))
        s.append(ssim(a, b))
    k = viewpoints.k
    return ViewportResult(p, s, float(np.mean(p[:k])), float(np.mean(s[:k])))


@dataclass
class MetricReport:
    """Per-frame and sequence-level metrics for one HR/SR pair of sequences."""

    psnr: list
    ssim: list
    ws_psnr: list
    ws_ssim: list
    e_warp: float = None
    e_warp_pairs: list = None
    viewports: list = None
    params: dict = field(default_factory=dict)

    @property
    def frames(self):
        return len(self.psnr)

    def mean(self, name):
        return float(np.mean(getattr(self, name)))

    @property
    def top_k_psnr(self):
        if not self.viewports:
            return None
        return float(np.mean([v.top_k_psnr for v in self.viewports]))

    @property
    def top_k_ssim(self):
        if not self.viewports:
            return None
        return float(np.mean([v.top_k_ssim for v in self.viewports]))


def evaluate_sequence(
    hr,
    sr,
    viewpoints=None,
    flows=None,
    masks=None,
    fov=math.pi / 2,
    viewport_size=(480, 480),
    block=8,
    radius=4,
    peak=1.0,
):
    """Compute every metric for an SR sequence against its HR reference.

    The warping error is measured on ``sr`` and only when there are at
    least two frames.
    """
    hr = check_sequence(hr, "hr")
    sr = check_sequence(sr, "sr")
    check_same_shape(hr, sr, names=["hr", "sr"])
    report = MetricReport(
        psnr=[psnr(a, b, peak) for a, b in zip(hr, sr)],
        ssim=[ssim(a, b, peak) for a, b in zip(hr, sr)],
        ws_psnr=[ws_psnr(a, b, peak) for a, b in zip(hr, sr)],
        ws_ssim=[ws_ssim(a, b, peak) for a, b in zip(hr, sr)],
        params={
            "peak": peak,
            "flow_block": block,
            "flow_radius": radius,
            "e_warp_scale": E_WARP_SCALE,
            "flow_source": "external" if flows is not None else "block_matching",
        },
    )
    if len(sr) >= 2:
        report.e_warp, report.e_warp_pairs = warping_error(sr, flows, masks, block=block, radius=radius)
    if viewpoints is not None:
        report.viewports = [viewport_metrics(a, b, viewpoints, fov, viewport_size) for a, b in zip(hr, sr)]
        report.params.update(
            {"viewport_fov_deg": math.degrees(fov), "viewport_size": list(viewport_size), "top_k": viewpoints.k}
        )
    return report
