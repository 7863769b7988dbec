"""scikit-learn style wrappers around the functional API.

Frame stacks are ``(n, H, W)`` arrays and feature stacks ``(n, C, H, W)``.
Hyper-parameters are stored verbatim in ``__init__`` and validated in
``fit`` so the estimators clone and grid-search like any sklearn object.
"""

import math

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import ShapeError, check_sequence
from .geometry import FrameSize, SphericalCoord, ViewportSpec, viewport_project
from .imfr import ImfrConfig, imfr_pipeline
from .kernels import bicubic_resize, output_size, parse_scale
from .metrics import ViewpointList, evaluate_sequence
from .ope import ope_map


def _feature_stack(X, name="X"):
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 4:
        raise ShapeError(f"{name} must be (n, C, H, W), got shape {X.shape}")
    if not np.all(np.isfinite(X)):
        raise ValueError(f"{name} contains non-finite values")
    return X


class BicubicDegrader(TransformerMixin, BaseEstimator):
    """Resize every frame with the seam-aware anti-aliased bicubic filter.

    Parameters
    ----------
    scale : float, Fraction or str, default=0.25
        Resize factor; the default produces the x4 low-resolution input.
    """

    def __init__(self, scale=0.25):
        self.scale = scale

    def fit(self, X, y=None):
        X = check_sequence(X, "X")
        self.scale_ = parse_scale(self.scale)
        self.frame_shape_ = X.shape[1:]
        self.output_shape_ = output_size(*self.frame_shape_, self.scale_)
        return self

    def transform(self, X):
        check_is_fitted(self)
        X = check_sequence(X, "X")
        if X.shape[1:] != self.frame_shape_:
            raise ShapeError(f"fitted on {self.frame_shape_} frames, got {X.shape[1:]}")
        return np.stack([bicubic_resize(f, self.scale_) for f in X])


class OmniPositionalEncoder(TransformerMixin, BaseEstimator):
    """Append the omni-positional encoding channels to a feature stack.

    Parameters
    ----------
    d : int, default=8
        Number of horizontal sin/cos pairs.
    mode : {"cyclic", "literal"}, default="cyclic"
    """

    def __init__(self, d=8, mode="cyclic"):
        self.d = d
        self.mode = mode

    def fit(self, X, y=None):
        X = _feature_stack(X)
        self.frame_shape_ = X.shape[2:]
        self.encoding_ = ope_map(self.d, *self.frame_shape_, mode=self.mode)
        return self

    def transform(self, X):
        check_is_fitted(self)
        X = _feature_stack(X)
        if X.shape[2:] != self.frame_shape_:
            raise ShapeError(f"fitted on {self.frame_shape_} maps, got {X.shape[2:]}")
        enc = np.broadcast_to(self.encoding_, (X.shape[0],) + self.encoding_.shape)
        return np.concatenate([X, enc], axis=1)


class ViewportProjector(TransformerMixin, BaseEstimator):
    """Render a fixed set of rectilinear views from each ERP frame.

    ``transform`` returns ``(n, n_views, out_h, out_w)``.

    Parameters
    ----------
    centers : sequence of (theta, phi), default=((pi, 0),)
        View directions in radians.
    fov_h, fov_v : float
        Full fields of view in radians; ``fov_v=None`` copies ``fov_h``.
    out_size : (int, int), default=(480, 480)
    roll : float, default=0.0
    """

    def __init__(self, centers=((math.pi, 0.0),), fov_h=math.pi / 2, fov_v=None, out_size=(480, 480), roll=0.0):
        self.centers = centers
        self.fov_h = fov_h
        self.fov_v = fov_v
        self.out_size = out_size
        self.roll = roll

    def fit(self, X=None, y=None):
        fov_v = self.fov_h if self.fov_v is None else self.fov_v
        self.viewports_ = [
            ViewportSpec(SphericalCoord(*c), self.fov_h, fov_v, FrameSize(*self.out_size), self.roll)
            for c in self.centers
        ]
        if not self.viewports_:
            raise ValueError("centers is empty")
        return self

    def transform(self, X):
        check_is_fitted(self)
        X = check_sequence(X, "X")
        return np.stack([np.stack([viewport_project(f, vp) for vp in self.viewports_]) for f in X])


class InterlacedFuser(TransformerMixin, BaseEstimator):
    """Interlaced reconstruction fusion of a ``(n, 3C, H, W)`` feature stack.

    Parameters
    ----------
    alpha1, beta1 : float, default=0.01
        Weights of the previous-group feature of frame ``i + 1`` and the
        next-group feature of frame ``i - 1``.
    normalize : bool, default=True
    upscale : int, default=1
        Pixel-shuffle factor.
    """

    def __init__(self, alpha1=0.01, beta1=0.01, normalize=True, upscale=1):
        self.alpha1 = alpha1
        self.beta1 = beta1
        self.normalize = normalize
        self.upscale = upscale

    def fit(self, X=None, y=None):
        self.config_ = ImfrConfig(self.alpha1, self.beta1, self.normalize)
        return self

    def transform(self, X, raw_weights=None):
        check_is_fitted(self)
        return imfr_pipeline(_feature_stack(X), raw_weights, self.config_, self.upscale)


class ErpQualityEvaluator(BaseEstimator):
    """Score SR sequences against a fitted HR reference.

    ``fit`` stores the reference; ``evaluate`` returns a full
    :class:`~odvkit.metrics.MetricReport` and ``score`` its mean WS-PSNR
    (higher is better, as sklearn expects).

    Parameters
    ----------
    viewpoints : sequence of (theta, phi), optional
        Viewing directions for the top-k viewport metrics, best first.
    k : int, default=5
    fov : float, default=pi/2
    viewport_size : int, default=480
    flow_block, flow_radius : int
        Block-matching parameters for the warping error.
    """

    def __init__(self, viewpoints=None, k=5, fov=math.pi / 2, viewport_size=480, flow_block=8, flow_radius=4):
        self.viewpoints = viewpoints
        self.k = k
        self.fov = fov
        self.viewport_size = viewport_size
        self.flow_block = flow_block
        self.flow_radius = flow_radius

    def fit(self, X, y=None):
        self.reference_ = check_sequence(X, "X")
        self.viewpoint_list_ = None
        if self.viewpoints is not None:
            self.viewpoint_list_ = ViewpointList(list(self.viewpoints), min(self.k, len(self.viewpoints)))
        return self

    def evaluate(self, X, flows=None, masks=None):
        check_is_fitted(self)
        return evaluate_sequence(
            self.reference_,
            X,
            viewpoints=self.viewpoint_list_,
            flows=flows,
            masks=masks,
            fov=self.fov,
            viewport_size=(self.viewport_size, self.viewport_size),
            block=self.flow_block,
            radius=self.flow_radius,
        )

    def score(self, X, y=None):
        return self.evaluate(X).mean("ws_psnr")
