import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dftsotfs import make_constellation, max_symbol_power, qam_demodulate, qam_modulate


def test_max_symbol_power_16qam_is_1p8():
    assert max_symbol_power(16) == pytest.approx(1.8, abs=1e-15)
    assert 10 * np.log10(max_symbol_power(16)) == pytest.approx(2.5527, abs=5e-4)


def test_max_symbol_power_4qam_is_unity():
    assert max_symbol_power(4) == pytest.approx(1.0, abs=1e-15)


def test_max_symbol_power_64qam_matches_enumeration():
    # independent oracle: enumerate all 64 normalized points
    c = make_constellation(64)
    enumerated = np.max(np.abs(c.points) ** 2)
    assert enumerated == pytest.approx(7.0 / 3.0, abs=1e-12)
    assert max_symbol_power(64) == pytest.approx(enumerated, abs=1e-12)


@pytest.mark.parametrize("bad", [3, 8, 15, 2, 0, -4])
def test_max_symbol_power_rejects_non_square(bad):
    with pytest.raises(ValueError):
        max_symbol_power(bad)


@pytest.mark.parametrize("order", [4, 16, 64, 256])
def test_constellation_moments(order):
    c = make_constellation(order)
    assert abs(np.mean(c.points)) < 1e-12
    assert np.mean(np.abs(c.points) ** 2) == pytest.approx(1.0, abs=1e-12)
    assert np.max(np.abs(c.points) ** 2) == pytest.approx(max_symbol_power(order), abs=1e-12)


def test_4qam_all_zeros_label_first_quadrant(qam4):
    sym = qam_modulate(np.array([0, 0]), qam4)
    assert sym[0] == pytest.approx((1 + 1j) / np.sqrt(2))


@pytest.mark.parametrize("order", [4, 16, 64])
def test_gray_neighbors_differ_in_one_bit(order):
    c = make_constellation(order)
    side = int(np.sqrt(order))
    spacing = 2.0 / np.sqrt(2.0 * (order - 1) / 3.0)
    for v in range(order):
        for w in range(v + 1, order):
            if abs(c.points[v] - c.points[w]) < spacing * 1.0001:
                assert np.sum(c.bit_map[v] != c.bit_map[w]) == 1, (v, w)


def test_modulate_rejects_ragged_bits(qam16):
    with pytest.raises(ValueError, match="divisible"):
        qam_modulate(np.array([0, 1, 0]), qam16)


@given(st.integers(0, 2**32 - 1), st.sampled_from([4, 16, 64]))
@settings(max_examples=30, deadline=None)
def test_roundtrip_random_bits(seed, order):
    c = make_constellation(order)
    rng = np.random.default_rng(seed)
    bits = rng.integers(0, 2, 64 * c.bits_per_symbol)
    assert np.array_equal(qam_demodulate(qam_modulate(bits, c), c), bits)


def test_roundtrip_large_block(qam16):
    rng = np.random.default_rng(42)
    bits = rng.integers(0, 2, 10_000 * 4)
    assert np.array_equal(qam_demodulate(qam_modulate(bits, qam16), qam16), bits)


def test_noise_below_half_spacing_is_corrected(qam16):
    rng = np.random.default_rng(7)
    bits = rng.integers(0, 2, 500 * 4)
    syms = qam_modulate(bits, qam16)
    half_min_dist = 0.5 * (2.0 / np.sqrt(10.0))
    phase = rng.uniform(0, 2 * np.pi, syms.size)
    noisy = syms + 0.99 * half_min_dist * np.exp(1j * phase) * rng.uniform(0, 1, syms.size)
    assert np.array_equal(qam_demodulate(noisy, qam16), bits)


def test_demodulate_matches_exhaustive_search(qam16):
    # oracle: full nearest-point search per sample
    rng = np.random.default_rng(3)
    z = rng.standard_normal(200) + 1j * rng.standard_normal(200)
    got = qam_demodulate(z, qam16).reshape(-1, 4)
    for i, s in enumerate(z):
        best = min(range(16), key=lambda v: (abs(s - qam16.points[v]), v))
        assert np.array_equal(got[i], qam16.bit_map[best])


def test_demodulate_tie_breaks_to_smallest_label(qam4):
    # the origin is equidistant from all four points
    bits = qam_demodulate(np.array([0.0 + 0.0j]), qam4)
    assert np.array_equal(bits, [0, 0])
