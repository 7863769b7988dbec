"""Latitude-saliency adaptive loss and its analytic gradient."""

from dataclasses import dataclass

import numpy as np

from ._validation import check_frame, check_same_shape, check_weight_map


@dataclass(frozen=True)
class LossConfig:
    epsilon: float = 1e-3
    alpha2: float = 0.1
    beta2: float = 0.1
    charbonnier_mode: str = "pixel"

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")
        if self.alpha2 < 0 or self.beta2 < 0:
            raise ValueError("alpha2 and beta2 must be non-negative")
        if self.charbonnier_mode not in ("pixel", "global"):
            raise ValueError(f"unknown charbonnier_mode {self.charbonnier_mode!r}")


@dataclass(frozen=True)
class LossBreakdown:
    charbonnier: float
    l_lat: float
    l_sal: float
    total: float


def _pair(hr, sr):
    hr = check_frame(hr, "hr")
    sr = check_frame(sr, "sr")
    check_same_shape(hr, sr, names=["hr", "sr"])
    return hr, sr


def charbonnier(hr, sr, epsilon=1e-3, mode="pixel"):
    """Mean of ``sqrt((hr - sr)**2 + eps**2)``.

    ``mode="global"`` instead returns ``sqrt(||hr - sr||_2**2 + eps**2)``
    over the whole frame.
    """
    hr, sr = _pair(hr, sr)
    diff = hr - sr
    if mode == "pixel":
        return float(np.mean(np.sqrt(diff * diff + epsilon * epsilon)))
    if mode == "global":
        return float(np.sqrt(np.sum(diff * diff) + epsilon * epsilon))
    raise ValueError(f"unknown mode {mode!r}")


def weighted_l1(hr, sr, w):
    """Mean of ``w * |hr - sr|``."""
    hr, sr = _pair(hr, sr)
    w = check_weight_map(w, hr.shape)
    return float(np.mean(w * np.abs(hr - sr)))


def normalize_saliency(sal):
    """Scale a non-negative saliency map so its maximum is 1; an all-zero map stays zero."""
    sal = np.asarray(sal, dtype=np.float64)
    if not np.all(np.isfinite(sal)) or (sal.size and sal.min() < 0):
        raise ValueError("saliency must be finite and non-negative")
    peak = sal.max() if sal.size else 0.0
    return sal / peak if peak > 0 else np.zeros_like(sal)


def lsa_total(hr, sr, w_lat, w_sal, cfg=LossConfig()):
    char = charbonnier(hr, sr, cfg.epsilon, cfg.charbonnier_mode)
    l_lat = weighted_l1(hr, sr, w_lat)
    l_sal = weighted_l1(hr, sr, w_sal)
    return LossBreakdown(char, l_lat, l_sal, char + cfg.alpha2 * l_lat + cfg.beta2 * l_sal)


def lsa_gradient(hr, sr, w_lat, w_sal, cfg=LossConfig()):
    """Gradient of ``lsa_total(...).total`` with respect to ``sr``.

    ``sign(0)`` is taken as 0, so the gradient vanishes where ``sr == hr``.
    """
    hr, sr = _pair(hr, sr)
    w_lat = check_weight_map(w_lat, hr.shape)
    w_sal = check_weight_map(w_sal, hr.shape)
    diff = sr - hr
    n = diff.size
    if cfg.charbonnier_mode == "pixel":
        char = diff / np.sqrt(diff * diff + cfg.epsilon**2) / n
    else:
        char = diff / np.sqrt(np.sum(diff * diff) + cfg.epsilon**2)
    return char + (cfg.alpha2 * w_lat + cfg.beta2 * w_sal) * np.sign(diff) / n
