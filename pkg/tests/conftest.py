"""Shared brute-force oracles, kept independent of the library's fast paths."""

import numpy as np
import pytest

from dftsotfs import make_constellation


def naive_dft_spread(symbols: np.ndarray) -> np.ndarray:
    """Direct double-loop K-point DFT along axis 1 with 1/sqrt(K) scaling."""
    M, K = symbols.shape
    out = np.zeros((M, K), complex)
    for m in range(M):
        for n in range(K):
            out[m, n] = sum(
                symbols[m, k] * np.exp(-2j * np.pi * k * n / K) for k in range(K)
            ) / np.sqrt(K)
    return out


def naive_idft_doppler(mapped: np.ndarray) -> np.ndarray:
    """Direct double-loop N-point IDFT along axis 1 with 1/sqrt(N) scaling."""
    M, N = mapped.shape
    out = np.zeros((M, N), complex)
    for m in range(M):
        for l in range(N):
            out[m, l] = sum(
                mapped[m, n] * np.exp(2j * np.pi * n * l / N) for n in range(N)
            ) / np.sqrt(N)
    return out


def naive_block_double_sum(frame) -> np.ndarray:
    """Block-allocation delay-time samples evaluated term by term from the
    spread symbols placed at the user's occupied bins."""
    g = frame.plan.grid
    M, N, K = g.M, g.N, g.K
    start = int(frame.plan.occupied[0])
    out = np.zeros((M, N), complex)
    for m in range(M):
        for l in range(N):
            acc = 0.0j
            for kappa in range(K):
                inner = sum(
                    np.exp(2j * np.pi * k * (l - g.Q * kappa) / N) for k in range(K)
                )
                acc += frame.symbols[m, kappa] / np.sqrt(K) * inner
            out[m, l] = acc * np.exp(2j * np.pi * start * l / N) / np.sqrt(N)
    return out


@pytest.fixture(scope="session")
def qam16():
    return make_constellation(16)


@pytest.fixture(scope="session")
def qam4():
    return make_constellation(4)
