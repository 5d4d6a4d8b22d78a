"""DFT-s-OTFS transmitter: Doppler-domain DFT spreading, subcarrier mapping,
IDFT back to delay-time, and serialization with a cyclic prefix.

All transforms are unitary (1/sqrt scaling) so frame energy is preserved
end to end regardless of the FFT library convention.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .grids import INTERLEAVED, AllocationPlan, GridConfig, UserFrame

# Fault-injection hook for the self-test negative control: scales the DFT
# spreading output, deliberately breaking unitarity when != 1.
_dft_scale_hook = 1.0


@dataclass(frozen=True)
class DelayTimeFrame:
    """M x N delay-time samples of one OTFS frame."""

    samples: np.ndarray = field(repr=False)  # (M, N) complex
    grid: GridConfig

    def __post_init__(self):
        if self.samples.shape != (self.grid.M, self.grid.N):
            raise ValueError(f"samples shape {self.samples.shape} != ({self.grid.M}, {self.grid.N})")


@dataclass(frozen=True)
class SerialFrame:
    """Serialized delay-time stream with a cyclic prefix of cp_len samples."""

    samples: np.ndarray = field(repr=False)
    cp_len: int
    grid: GridConfig

    @property
    def body(self) -> np.ndarray:
        """Samples excluding the cyclic prefix."""
        return self.samples[self.cp_len:]


def dft_spread(frame: UserFrame) -> np.ndarray:
    """K-point unitary DFT along the Doppler axis of each delay row."""
    return np.fft.fft(frame.symbols, axis=1) / np.sqrt(frame.plan.grid.K) * _dft_scale_hook


def map_dodma(spread: np.ndarray, plan: AllocationPlan) -> np.ndarray:
    """Place M x K spread columns onto the user's occupied bins of the M x N grid."""
    g = plan.grid
    if spread.shape != (g.M, g.K):
        raise ValueError(f"spread shape {spread.shape} != ({g.M}, {g.K})")
    mapped = np.zeros((g.M, g.N), complex)
    mapped[:, plan.occupied] = spread
    return mapped


def idft_doppler(mapped: np.ndarray, grid: GridConfig) -> DelayTimeFrame:
    """N-point unitary IDFT along the Doppler axis, yielding delay-time samples."""
    if mapped.shape != (grid.M, grid.N):
        raise ValueError(f"mapped shape {mapped.shape} != ({grid.M}, {grid.N})")
    samples = np.fft.ifft(mapped, axis=1) * np.sqrt(grid.N)
    return DelayTimeFrame(samples=samples, grid=grid)


def serialize_with_cp(frame: DelayTimeFrame, cp_len: int) -> SerialFrame:
    """Column-major serialization (stream index i = m + l*M) with the last
    cp_len body samples copied to the front as a cyclic prefix."""
    g = frame.grid
    if not 0 <= cp_len <= g.M * g.N:
        raise ValueError(f"cp_len={cp_len} out of range [0, {g.M * g.N}]")
    body = frame.samples.flatten(order="F")
    samples = np.concatenate([body[len(body) - cp_len:], body])
    return SerialFrame(samples=samples, cp_len=cp_len, grid=g)


def deserialize(serial: SerialFrame) -> DelayTimeFrame:
    """Inverse of :func:`serialize_with_cp` (drops the cyclic prefix)."""
    g = serial.grid
    samples = serial.body.reshape((g.M, g.N), order="F")
    return DelayTimeFrame(samples=samples, grid=g)


def modulate_user(frame: UserFrame, spreading: bool = True) -> DelayTimeFrame:
    """Full per-user transmitter to the delay-time domain.

    With spreading this is DFT-s-OTFS; without, the raw QAM symbols sit
    directly on the allocated Doppler bins (plain OTFS).
    """
    data = dft_spread(frame) if spreading else frame.symbols
    return idft_doppler(map_dodma(data, frame.plan), frame.plan.grid)


def interleaved_fast_path(frame: UserFrame, strip_phase_ramp: bool = False) -> DelayTimeFrame:
    """Transform-free interleaved transmitter: Q periodic repetitions of the
    QAM symbols scaled by 1/sqrt(Q) under a per-user phase ramp.

    ``strip_phase_ramp`` drops the ramp exp(j*2*pi*q*l/N) (it only shifts the
    carrier and can be absorbed by the RF stage); by default it is kept so the
    output matches :func:`modulate_user` exactly.
    """
    plan = frame.plan
    if plan.scheme != INTERLEAVED:
        raise ValueError(f"fast path requires an interleaved plan, got {plan.scheme!r}")
    g = plan.grid
    l = np.arange(g.N)
    samples = frame.symbols[:, l % g.K] / np.sqrt(g.Q)
    if not strip_phase_ramp and plan.q != 0:
        samples = samples * np.exp(2j * np.pi * plan.q * l / g.N)[None, :]
    return DelayTimeFrame(samples=np.ascontiguousarray(samples), grid=g)
