"""Transmit pulse shaping: rectangular and root-raised-cosine filters,
oversampled waveform synthesis, and the peak factor g0 of the shifted-pulse
train that scales the RRC PAPR bounds.

The RRC uses the peak-amplitude convention g(0) = 1 - beta + 4*beta/pi
(continuous-time pulse energy = delta_tau), not a unit-energy discrete
rescaling; the analytic bounds assume this convention.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.signal import fftconvolve

from .transmitter import SerialFrame

RECT = "rect"
RRC = "rrc"


@dataclass(frozen=True)
class PulseSpec:
    """Transmit filter description.

    oversample is the number of waveform samples per delay spacing; span is
    the RRC truncation in symbol intervals per side (rect ignores beta/span).
    """

    kind: str = RECT
    beta: float = 0.5
    span: int = 10
    oversample: int | None = None  # default: 1 for rect, 16 for rrc

    def __post_init__(self):
        if self.kind not in (RECT, RRC):
            raise ValueError(f"pulse kind must be 'rect' or 'rrc', got {self.kind!r}")
        if self.kind == RRC and not 0.0 <= self.beta <= 1.0:
            raise ValueError(f"roll-off beta must be in [0, 1], got {self.beta}")
        if self.span < 1:
            raise ValueError("span must be >= 1")
        if self.oversample is None:
            object.__setattr__(self, "oversample", 1 if self.kind == RECT else 16)
        if self.oversample < 1:
            raise ValueError("oversample must be >= 1")


def rrc_time(tau, beta: float):
    """RRC impulse response at time tau (in units of delta_tau).

    The removable singularities at tau = 0 and |tau| = 1/(4*beta) take their
    analytic limits; beta = 0 degenerates to sinc.
    """
    tau = np.asarray(tau, dtype=float)
    if beta == 0.0:
        return np.sinc(tau)
    out = np.empty_like(tau)
    den = 1.0 - (4.0 * beta * tau) ** 2
    at_zero = np.abs(tau) < 1e-10
    at_quarter = ~at_zero & (np.abs(den) < 1e-9)
    regular = ~(at_zero | at_quarter)
    out[at_zero] = 1.0 - beta + 4.0 * beta / np.pi
    out[at_quarter] = (beta / np.sqrt(2.0)) * (
        (1.0 + 2.0 / np.pi) * np.sin(np.pi / (4.0 * beta))
        + (1.0 - 2.0 / np.pi) * np.cos(np.pi / (4.0 * beta))
    )
    t = tau[regular]
    num = np.sin((1.0 - beta) * np.pi * t) + 4.0 * beta * t * np.cos((1.0 + beta) * np.pi * t)
    out[regular] = num / (np.pi * t * den[regular])
    return out


def eval_pulse(spec: PulseSpec, tau):
    """Pulse amplitude at time tau in units of delta_tau (rect: 1 on [0,1))."""
    tau = np.asarray(tau, dtype=float)
    if spec.kind == RECT:
        return np.where((tau >= 0.0) & (tau < 1.0), 1.0, 0.0)
    return rrc_time(tau, spec.beta)


def rrc_freq_response(beta: float, f, delta_tau: float):
    """RRC frequency response: flat at delta_tau in-band, cosine transition of
    width beta/delta_tau, zero beyond (1+beta)/(2*delta_tau)."""
    if not 0.0 <= beta <= 1.0:
        raise ValueError(f"beta must be in [0, 1], got {beta}")
    af = np.abs(np.asarray(f, dtype=float))
    f1 = (1.0 - beta) / (2.0 * delta_tau)
    f2 = (1.0 + beta) / (2.0 * delta_tau)
    out = np.zeros_like(af)
    out[af <= f1] = delta_tau
    if beta > 0.0:
        mid = (af > f1) & (af <= f2)
        out[mid] = (delta_tau / np.sqrt(2.0)) * np.sqrt(
            1.0 + np.cos(np.pi * delta_tau / beta * (af[mid] - f1))
        )
    return out


@lru_cache(maxsize=64)
def _taps_cached(kind: str, beta: float, span: int, oversample: int):
    if kind == RECT:
        return np.ones(oversample), 0
    n_side = span * oversample
    k = np.arange(-n_side, n_side + 1)
    return rrc_time(k / oversample, beta), n_side


def pulse_taps(spec: PulseSpec) -> tuple[np.ndarray, int]:
    """Sampled filter taps and the index of the t=0 tap.

    Rect taps cover [0, delta_tau); RRC taps cover [-span, span] delta_tau.
    """
    return _taps_cached(spec.kind, spec.beta, spec.span, spec.oversample)


@dataclass(frozen=True)
class Waveform:
    """Oversampled complex baseband samples of one serialized frame.

    frame_span marks the samples covering 0 <= t < T (the frame body); the
    cyclic prefix and any filter edge transients lie outside it.
    """

    samples: np.ndarray = field(repr=False)
    oversample: int
    delta_tau: float
    frame_start: int
    frame_len: int
    cp_len: int = 0

    @property
    def sample_rate(self) -> float:
        return self.oversample / self.delta_tau

    @property
    def frame_span(self) -> slice:
        return slice(self.frame_start, self.frame_start + self.frame_len)

    @property
    def frame(self) -> np.ndarray:
        """Samples of the frame window 0 <= t < T."""
        return self.samples[self.frame_span]


def shape_waveform(serial: SerialFrame, spec: PulseSpec) -> Waveform:
    """Filter the impulse train of serialized samples with the transmit pulse,
    sampled at delta_tau/oversample."""
    if serial.samples.size == 0:
        raise ValueError("cannot shape an empty serial frame")
    g = serial.grid
    L = spec.oversample
    taps, n_neg = pulse_taps(spec)
    up = np.zeros(serial.samples.size * L, complex)
    up[::L] = serial.samples
    if up.size * taps.size > 1 << 20:
        shaped = fftconvolve(up, taps)
    else:
        shaped = np.convolve(up, taps)
    return Waveform(
        samples=shaped,
        oversample=L,
        delta_tau=g.delta_tau,
        frame_start=n_neg + serial.cp_len * L,
        frame_len=g.M * g.N * L,
        cp_len=serial.cp_len,
    )


def _abs_pulse_train(beta: float, span: int, grid_points: int) -> tuple[np.ndarray, np.ndarray]:
    """Sum of |g(t - i*delta_tau)| over the truncated support, for t in [0, 1)."""
    t = np.arange(grid_points) / grid_points
    i = np.arange(-span, span + 1)
    args = t[:, None] - i[None, :]
    vals = np.abs(rrc_time(args.ravel(), beta)).reshape(args.shape)
    vals[np.abs(args) > span] = 0.0  # outside the truncated filter
    return t, vals.sum(axis=1)


def g0_numeric(beta: float, span: int = 10, grid_points: int = 16384) -> float:
    """Dense-grid maximum of the shifted-|pulse| train (the sum is
    delta_tau-periodic, so t scans a single interval)."""
    if grid_points < 1000:
        raise ValueError("grid_points must be >= 1000")
    _, sums = _abs_pulse_train(beta, span, grid_points)
    return float(sums.max())


def g0_argmax(beta: float, span: int = 10, grid_points: int = 16384) -> float:
    """Location (in units of delta_tau, within [0,1)) of the g0 maximum."""
    t, sums = _abs_pulse_train(beta, span, grid_points)
    return float(t[np.argmax(sums)])


def g0_analytic(beta: float, span: int = 10) -> float:
    """Closed-form series for g0, truncated at span terms.

    For beta <= 0.4 the train peaks at t = delta_tau/2, so the series sums the
    pulse magnitudes on the half-integer lattice (each offset appears on both
    sides, hence the factor 2); for beta > 0.4 it peaks at t = 0, giving the
    center value 1 - beta + 4*beta/pi plus the integer-lattice tail.

    beta = 0 is covered by neither branch (sinc tails); the numeric oracle
    value is returned with a warning.
    """
    if not 0.0 <= beta <= 1.0:
        raise ValueError(f"beta must be in [0, 1], got {beta}")
    if beta == 0.0:
        warnings.warn("g0 series is undefined at beta=0; returning the numeric oracle value")
        return g0_numeric(0.0, span)
    if beta <= 0.4:
        offsets = np.arange(span) + 0.5
        return float(2.0 * np.abs(rrc_time(offsets, beta)).sum())
    offsets = np.arange(1, span + 1, dtype=float)
    return float(1.0 - beta + 4.0 * beta / np.pi + 2.0 * np.abs(rrc_time(offsets, beta)).sum())
