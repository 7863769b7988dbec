import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from odvkit._validation import ShapeError
from odvkit.geometry import latitude_weight_map
from odvkit.loss import (
    LossConfig,
    charbonnier,
    lsa_gradient,
    lsa_total,
    normalize_saliency,
    weighted_l1,
)


def central_difference(f, x, h=1e-3):
    g = np.zeros_like(x)
    for idx in np.ndindex(x.shape):
        xp = x.copy()
        xm = x.copy()
        xp[idx] += h
        xm[idx] -= h
        g[idx] = (f(xp) - f(xm)) / (2 * h)
    return g


def separated_pair(rng, shape=(8, 8), min_gap=0.05):
    hr = rng.random(shape)
    gap = rng.uniform(min_gap, 0.5, shape) * rng.choice([-1.0, 1.0], shape)
    return hr, hr + gap


class TestCharbonnier:
    def test_equal_inputs(self, rng):
        x = rng.random((5, 5))
        assert charbonnier(x, x) == pytest.approx(1e-3, abs=1e-18)

    def test_uniform_gap(self):
        got = charbonnier(np.zeros((3, 3)), np.full((3, 3), 0.1))
        assert got == pytest.approx(math.sqrt(0.01 + 1e-6), abs=1e-15)
        assert got == pytest.approx(0.1000050, abs=1e-7)

    @settings(max_examples=50, deadline=None)
    @given(st.integers(0, 2**32 - 1))
    def test_lower_bound(self, seed):
        r = np.random.default_rng(seed)
        assert charbonnier(r.random((4, 4)), r.random((4, 4))) >= 1e-3

    def test_global_mode(self):
        got = charbonnier(np.zeros((2, 2)), np.full((2, 2), 0.5), mode="global")
        assert got == pytest.approx(math.sqrt(1.0 + 1e-6))


class TestWeightedL1:
    def test_zero_when_equal(self, rng):
        x = rng.random((3, 4))
        assert weighted_l1(x, x, np.ones((3, 4))) == 0.0

    def test_unit_weights(self):
        assert weighted_l1(np.zeros((2, 3)), np.full((2, 3), 0.2), np.ones((2, 3))) == pytest.approx(0.2)

    def test_hand_case(self):
        hr = np.zeros((2, 2))
        sr = np.array([[0.4, 9.0], [9.0, 0.4]])
        assert weighted_l1(hr, sr, np.eye(2)) == pytest.approx(0.2)

    def test_rejects_out_of_range_weights(self):
        with pytest.raises(ValueError):
            weighted_l1(np.zeros((2, 2)), np.zeros((2, 2)), np.full((2, 2), 1.5))
        with pytest.raises(ShapeError):
            weighted_l1(np.zeros((2, 2)), np.zeros((2, 2)), np.ones((3, 2)))


class TestTotal:
    def test_degenerate_weights(self, rng):
        hr, sr = rng.random((2, 6, 6))
        b = lsa_total(hr, sr, latitude_weight_map(6, 6), rng.random((6, 6)), LossConfig(alpha2=0, beta2=0))
        assert b.total == b.charbonnier

    def test_equal_inputs(self, rng):
        x = rng.random((6, 6))
        b = lsa_total(x, x, latitude_weight_map(6, 6), rng.random((6, 6)))
        assert b.total == 1e-3
        assert b.l_lat == 0.0 and b.l_sal == 0.0

    def test_matches_scalar_oracle(self, rng):
        hr, sr = rng.random((2, 8, 8))
        w_lat = latitude_weight_map(8, 8)
        w_sal = rng.random((8, 8))
        got = lsa_total(hr, sr, w_lat, w_sal).total
        expected = oracles.lsa_total(hr.tolist(), sr.tolist(), w_lat.tolist(), w_sal.tolist())
        assert got == pytest.approx(expected, abs=1e-10)

    def test_breakdown_additivity(self, rng):
        hr, sr = rng.random((2, 8, 8))
        cfg = LossConfig(2e-3, 0.3, 0.7)
        b = lsa_total(hr, sr, latitude_weight_map(8, 8), rng.random((8, 8)), cfg)
        assert abs(b.total - (b.charbonnier + 0.3 * b.l_lat + 0.7 * b.l_sal)) <= 1e-12
        assert min(b.charbonnier, b.l_lat, b.l_sal) >= 0

    def test_roll_invariance(self, rng):
        hr, sr = rng.random((2, 8, 16))
        w_lat = latitude_weight_map(8, 16)
        w_sal = rng.random((8, 16))
        a = lsa_total(hr, sr, w_lat, w_sal).total
        r = [np.roll(x, 5, axis=1) for x in (hr, sr, w_lat, w_sal)]
        assert lsa_total(*r).total == pytest.approx(a, abs=1e-15)

    def test_monotone_in_weights(self, rng):
        hr, sr = rng.random((2, 5, 5))
        w_lat = latitude_weight_map(5, 5)
        w_sal = rng.uniform(0, 0.9, (5, 5))
        base = lsa_total(hr, sr, w_lat, w_sal).total
        for idx in [(0, 0), (2, 3), (4, 4)]:
            bumped = w_sal.copy()
            bumped[idx] += 0.1
            assert lsa_total(hr, sr, w_lat, bumped).total >= base

    def test_config_validation(self):
        with pytest.raises(ValueError):
            LossConfig(epsilon=0)
        with pytest.raises(ValueError):
            LossConfig(alpha2=-1)


class TestGradient:
    def test_zero_at_equality(self, rng):
        x = rng.random((4, 4))
        g = lsa_gradient(x, x, latitude_weight_map(4, 4), np.ones((4, 4)))
        assert np.all(g == 0)

    def test_l1_asymptote(self, rng):
        hr, sr = separated_pair(rng, min_gap=0.3)
        g = lsa_gradient(hr, sr, np.ones((8, 8)), np.ones((8, 8)), LossConfig(alpha2=0, beta2=0))
        np.testing.assert_allclose(g, np.sign(sr - hr) / 64, rtol=1e-4)

    @pytest.mark.parametrize("mode", ["pixel", "global"])
    def test_finite_differences(self, rng, mode):
        hr, sr = separated_pair(rng)
        w_lat = latitude_weight_map(8, 8)
        w_sal = rng.random((8, 8))
        cfg = LossConfig(charbonnier_mode=mode)
        fd = central_difference(lambda s: lsa_total(hr, s, w_lat, w_sal, cfg).total, sr)
        g = lsa_gradient(hr, sr, w_lat, w_sal, cfg)
        assert np.max(np.abs(g - fd) / np.abs(fd)) < 1e-3


def test_normalize_saliency():
    np.testing.assert_allclose(normalize_saliency([[0.0, 2.0], [1.0, 4.0]]), [[0, 0.5], [0.25, 1]])
    assert np.all(normalize_saliency(np.zeros((2, 2))) == 0)
    with pytest.raises(ValueError):
        normalize_saliency([[-1.0]])
