"""Omni-positional encoding for ERP feature maps.

The horizontal part is a ladder of sinusoids in longitude whose
frequencies are rounded to whole cycles per revolution, so the encoding
closes exactly around the cylinder: column ``u`` and column ``u + W`` get
identical codes. The vertical part is a single cosine-of-latitude channel.
"""

import math

import numpy as np

from ._validation import check_frame_size, check_positive_int
from .geometry import latitude_weights


def cyclic_frequencies(d, width):
    """Integer cycles per revolution for each of the ``d`` frequency pairs."""
    d = check_positive_int(d, "d")
    (_, width) = check_frame_size(1, width)
    k = np.arange(d)
    ladder = 10000.0 ** (-2.0 * k / d) * width / (2.0 * math.pi)
    return np.maximum(np.rint(ladder), 1).astype(np.int64)


def horizontal_pe_at(u, d, width, mode="cyclic"):
    """Horizontal encoding at continuous column positions ``u``.

    Returns an array of shape ``(2 * d,) + np.shape(u)`` ordered
    ``[sin_0, cos_0, sin_1, cos_1, ...]``.

    ``mode="cyclic"`` (default) uses :func:`cyclic_frequencies` and is
    periodic in ``u`` with period ``width``. ``mode="literal"`` evaluates
    ``sin(u / 10000**(2k/d))`` directly on the pixel coordinate, which is
    not periodic; it exists for comparison with transformer-style encodings.
    """
    d = check_positive_int(d, "d")
    u = np.asarray(u, dtype=np.float64)
    if mode == "cyclic":
        freqs = cyclic_frequencies(d, width)
        # reduce the phase modulo W before scaling so u and u + W agree exactly
        phase = [2.0 * math.pi * np.mod(f * (u + 0.5), width) / width for f in freqs]
    elif mode == "literal":
        phase = [u / 10000.0 ** (2.0 * k / d) for k in range(d)]
    else:
        raise ValueError(f"unknown mode {mode!r}")
    out = np.empty((2 * d,) + u.shape)
    for k, p in enumerate(phase):
        out[2 * k] = np.sin(p)
        out[2 * k + 1] = np.cos(p)
    return out


def horizontal_pe(d, height, width, mode="cyclic"):
    """``(2d, H, W)`` horizontal encoding on the pixel grid."""
    height, width = check_frame_size(height, width)
    row = horizontal_pe_at(np.arange(width, dtype=np.float64), d, width, mode)
    return np.repeat(row[:, None, :], height, axis=1)


def vertical_pe(height, width):
    """``(1, H, W)`` cosine-of-latitude channel (same values as the latitude weights)."""
    height, width = check_frame_size(height, width)
    return np.repeat(latitude_weights(height)[None, :, None], width, axis=2)


def ope_map(d, height, width, mode="cyclic"):
    """Full encoding: ``2d`` horizontal channels followed by one vertical channel."""
    return np.concatenate([horizontal_pe(d, height, width, mode), vertical_pe(height, width)], axis=0)
