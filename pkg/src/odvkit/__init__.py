"""Omnidirectional (360 degree) video toolkit.

Equirectangular geometry and latitude weights, seam-aware resampling
kernels, omni-positional encoding, interlaced multi-frame fusion, the
latitude-saliency adaptive loss and spherically weighted quality metrics.
"""

from .estimators import (
    BicubicDegrader,
    ErpQualityEvaluator,
    InterlacedFuser,
    OmniPositionalEncoder,
    ViewportProjector,
)
from .geometry import (
    ErpCoord,
    FrameSize,
    SphericalCoord,
    ViewportSpec,
    erp_to_sphere,
    latitude_weight_map,
    latitude_weights,
    seam_discontinuity_score,
    seam_stitch,
    sphere_to_erp,
    stretching_ratio,
    viewport_project,
)
from .imfr import ImfrConfig, fuse, imfr_pipeline
from .kernels import bicubic_resize, bilinear_sample, deformable_sample, pixel_shuffle, pixel_unshuffle, warp
from .loss import LossBreakdown, LossConfig, charbonnier, lsa_gradient, lsa_total, weighted_l1
from .metrics import (
    MetricReport,
    ViewpointList,
    block_matching_flow,
    evaluate_sequence,
    psnr,
    ssim,
    viewport_metrics,
    warping_error,
    ws_psnr,
    ws_ssim,
)
from .ope import horizontal_pe, ope_map, vertical_pe

__version__ = "0.1.0"
