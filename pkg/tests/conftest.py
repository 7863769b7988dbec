import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20241016)


def longitude_sinusoid(height, width):
    """ERP frame ``0.5 + 0.5 sin(theta)``: one cycle per revolution, continuous across the seam."""
    u = np.arange(width)
    row = 0.5 + 0.5 * np.sin(2 * np.pi * (u + 0.5) / width)
    return np.tile(row, (height, 1))


def textured(rng, height, width):
    """Smooth random texture that still makes block matching unambiguous."""
    base = rng.random((height, width))
    return 0.5 * base + 0.5 * np.roll(base, 1, axis=1)


def band_limited(height, width, max_cycles_per_pixel=1 / 16):
    """Sum of sinusoids with a 1/f amplitude spectrum, all at or below the band edge.

    Horizontal components have whole cycles per revolution; vertical
    components are cosines with zero slope at both poles.
    """
    yy, xx = np.mgrid[0:height, 0:width].astype(float)
    img = np.full((height, width), 0.5)
    for cycles in (1, 2, 4, 8):
        f = cycles / width
        if f <= max_cycles_per_pixel:
            img += 0.16 / cycles * np.sin(2 * np.pi * f * xx + cycles)
    for half_cycles in (1, 2, 4, 8):
        f = half_cycles / (2 * height)
        if f <= max_cycles_per_pixel:
            img += 0.08 / half_cycles * np.cos(np.pi * half_cycles * (yy + 0.5) / height)
    return img
