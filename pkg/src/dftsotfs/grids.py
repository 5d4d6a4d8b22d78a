"""Delay-Doppler grid geometry, per-user Doppler allocations, and user frames."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .qam import QamConstellation, qam_modulate

INTERLEAVED = "interleaved"
BLOCK = "block"
SCHEMES = (INTERLEAVED, BLOCK)


@dataclass(frozen=True)
class GridConfig:
    """Delay-Doppler grid: M delay bins x N Doppler bins shared by Q users."""

    M: int
    N: int
    Q: int
    delta_tau: float = 1.0 / 7.68e6  # delay spacing [s], LTE-like default

    def __post_init__(self):
        if self.M < 1 or self.N < 1 or self.Q < 1:
            raise ValueError("M, N, Q must be positive")
        if self.N % self.Q != 0:
            raise ValueError(f"Q={self.Q} must divide N={self.N}")
        if self.delta_tau <= 0:
            raise ValueError("delta_tau must be positive")

    @property
    def K(self) -> int:
        """Doppler bins per user."""
        return self.N // self.Q

    @property
    def frame_duration(self) -> float:
        """Frame length T = M*N*delta_tau [s]."""
        return self.M * self.N * self.delta_tau

    @property
    def delta_nu(self) -> float:
        """Doppler spacing 1/T [Hz]."""
        return 1.0 / self.frame_duration


@dataclass(frozen=True)
class AllocationPlan:
    """One user's Doppler subcarrier allocation within a grid."""

    scheme: str
    q: int
    grid: GridConfig

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ValueError(f"scheme must be one of {SCHEMES}, got {self.scheme!r}")
        if not 0 <= self.q < self.grid.Q:
            raise ValueError(f"user index q={self.q} out of range for Q={self.grid.Q}")

    @property
    def occupied(self) -> np.ndarray:
        """Occupied Doppler bin indices, in spreading order k=0..K-1.

        Interleaved: stride-Q comb Q*k + q. Block: K consecutive bins
        K*q + k, so the Q users partition the N bins in both schemes.
        """
        k = np.arange(self.grid.K)
        if self.scheme == INTERLEAVED:
            return self.grid.Q * k + self.q
        return self.grid.K * self.q + k


@dataclass(frozen=True)
class UserFrame:
    """One user's M x K grid of QAM symbols plus the bits that produced it."""

    symbols: np.ndarray = field(repr=False)  # (M, K) complex
    bits: np.ndarray = field(repr=False)
    plan: AllocationPlan

    def __post_init__(self):
        g = self.plan.grid
        if self.symbols.shape != (g.M, g.K):
            raise ValueError(f"symbols shape {self.symbols.shape} != ({g.M}, {g.K})")


def random_user_frame(
    plan: AllocationPlan,
    constellation: QamConstellation,
    rng: np.random.Generator,
) -> UserFrame:
    """Draw i.i.d. bits and fill the user's grid row-major (symbol [m,k] <- bit block m*K+k)."""
    g = plan.grid
    bits = rng.integers(0, 2, g.M * g.K * constellation.bits_per_symbol, dtype=np.int8)
    symbols = qam_modulate(bits, constellation).reshape(g.M, g.K)
    return UserFrame(symbols=symbols, bits=bits, plan=plan)
