"""Square-QAM constellations with Gray bit mapping, normalized to unit average power."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


def max_symbol_power(order: int) -> float:
    """Largest |symbol|^2 of a unit-average-power square QAM constellation.

    Equals 3*(sqrt(M)-1)^2/(M-1): 1.0 for 4-QAM, 1.8 for 16-QAM, 7/3 for 64-QAM.
    """
    side = math.isqrt(int(order))
    if order < 4 or side * side != order:
        raise ValueError(f"order must be a perfect square >= 4, got {order}")
    return 3.0 * (side - 1) ** 2 / (order - 1)


def _gray(i: int) -> int:
    return i ^ (i >> 1)


def _gray_inverse(code: int) -> int:
    i = code
    shift = 1
    while code >> shift:
        i ^= code >> shift
        shift += 1
    return i


@dataclass(frozen=True)
class QamConstellation:
    """Gray-labeled M-QAM alphabet.

    ``points[v]`` is the symbol whose bit label is the integer ``v`` (MSB
    first, I-axis bits before Q-axis bits).  Per axis, bits Gray-decode to a
    level index counted downward from the most positive amplitude, so the
    all-zeros label sits in the first quadrant: 4-QAM bits 00 -> (1+1j)/sqrt(2).
    """

    order: int
    points: np.ndarray = field(repr=False)
    bit_map: np.ndarray = field(repr=False)  # bit_map[v] = bits of points[v]

    @property
    def bits_per_symbol(self) -> int:
        return int(np.log2(self.order))


def make_constellation(order: int) -> QamConstellation:
    """Build the unit-average-power Gray-mapped constellation for M in {4,16,64,...}."""
    k = int(round(math.log2(order)))
    if order < 4 or 2**k != order or k % 2 != 0:
        raise ValueError(f"order must be a power of 4 (square QAM), got {order}")
    side = math.isqrt(order)
    b = k // 2  # bits per axis
    scale = math.sqrt(2.0 * (order - 1) / 3.0)
    amplitudes = np.array([(side - 1) - 2 * _gray_inverse(c) for c in range(side)], float)
    points = np.empty(order, complex)
    bit_map = np.empty((order, k), np.int8)
    for v in range(order):
        ci, cq = v >> b, v & (side - 1)
        points[v] = (amplitudes[ci] + 1j * amplitudes[cq]) / scale
        bit_map[v] = [(v >> (k - 1 - j)) & 1 for j in range(k)]
    return QamConstellation(order=order, points=points, bit_map=bit_map)


def qam_modulate(bits: np.ndarray, constellation: QamConstellation) -> np.ndarray:
    """Map a flat 0/1 array to complex symbols, bits_per_symbol bits each."""
    bits = np.asarray(bits)
    k = constellation.bits_per_symbol
    if bits.size % k != 0:
        raise ValueError(f"bit count {bits.size} not divisible by {k} bits/symbol")
    b = bits.reshape(-1, k).astype(np.int64)
    labels = b @ (1 << np.arange(k - 1, -1, -1))
    return constellation.points[labels]


def qam_demodulate(symbols: np.ndarray, constellation: QamConstellation) -> np.ndarray:
    """Hard-decision nearest-point demapper, inverse of :func:`qam_modulate`.

    Distance ties resolve to the lexicographically smallest bit label.
    """
    sym = np.asarray(symbols).reshape(-1)
    d2 = np.abs(sym[:, None] - constellation.points[None, :]) ** 2
    labels = d2.argmin(axis=1)  # argmin takes the first (= smallest label) on ties
    return constellation.bit_map[labels].reshape(-1)
