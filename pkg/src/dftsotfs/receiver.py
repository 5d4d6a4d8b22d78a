"""Receive front-end, effective delay-Doppler channel matrix, MMSE
equalization, despreading, and BER measurement.

The matrix model and the direct simulation share one batched linear chain,
so the effective channel is consistent with the sample-level simulation to
floating-point accuracy.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import cho_factor, cho_solve, LinAlgError
from scipy.signal import fftconvolve

from .channel import ChannelRealization, _apply_taps, awgn_variance, sample_eva_channel
from .grids import AllocationPlan, GridConfig, random_user_frame
from .pulses import PulseSpec, Waveform, pulse_taps
from .qam import QamConstellation, qam_demodulate
from .transmitter import dft_spread, map_dodma

_BITS_TAG = 0xB175
_BERCHAN_TAG = 0xCE
_BERNOISE_TAG = 0x0E


class NumericalError(RuntimeError):
    """Raised when a solve is too ill-conditioned to trust."""


def _vec(grid: np.ndarray) -> np.ndarray:
    return grid.flatten(order="F")  # index i = m + n*M


def _unvec(v: np.ndarray, M: int, N: int) -> np.ndarray:
    return v.reshape((M, N), order="F")


def _tx_batch(mapped: np.ndarray, grid: GridConfig, pulse: PulseSpec, cp_len: int) -> np.ndarray:
    """Mapped delay-Doppler grids (B, M, N) -> shaped waveforms (B, S)."""
    dt = np.fft.ifft(mapped, axis=2) * np.sqrt(grid.N)
    body = dt.transpose(0, 2, 1).reshape(mapped.shape[0], grid.M * grid.N)
    serial = np.concatenate([body[:, body.shape[1] - cp_len:], body], axis=1)
    L = pulse.oversample
    taps, _ = pulse_taps(pulse)
    up = np.zeros((serial.shape[0], serial.shape[1] * L), complex)
    up[:, ::L] = serial
    return fftconvolve(up, taps[None, :], axes=1)


def _frame_start(pulse: PulseSpec, cp_len: int) -> int:
    _, n_neg = pulse_taps(pulse)
    return n_neg + cp_len * pulse.oversample


def _rx_batch(received: np.ndarray, grid: GridConfig, pulse: PulseSpec, cp_len: int) -> np.ndarray:
    """Received waveforms (B, S) -> matched-filtered delay-Doppler grids (B, M, N)."""
    L = pulse.oversample
    taps, n_neg = pulse_taps(pulse)
    corr = fftconvolve(received, np.conj(taps[::-1])[None, :], axes=1)
    idx = _frame_start(pulse, cp_len) + np.arange(grid.M * grid.N) * L - n_neg + taps.size - 1
    if idx[-1] >= corr.shape[1]:
        raise ValueError(
            f"received array too short: need index {idx[-1]}, have {corr.shape[1]} samples"
        )
    z = corr[:, idx] / L
    dt = z.reshape(received.shape[0], grid.N, grid.M).transpose(0, 2, 1)
    return np.fft.fft(dt, axis=2) / np.sqrt(grid.N)


def tx_waveform(mapped: np.ndarray, grid: GridConfig, pulse: PulseSpec, cp_len: int) -> Waveform:
    """Shape one mapped delay-Doppler grid into its transmit waveform."""
    samples = _tx_batch(mapped[None, :, :], grid, pulse, cp_len)[0]
    return Waveform(
        samples=samples,
        oversample=pulse.oversample,
        delta_tau=grid.delta_tau,
        frame_start=_frame_start(pulse, cp_len),
        frame_len=grid.M * grid.N * pulse.oversample,
        cp_len=cp_len,
    )


def receive_frontend(received, grid: GridConfig, pulse: PulseSpec, cp_len: int) -> np.ndarray:
    """Matched filter, symbol-rate downsampling, CP removal, and DFT along
    time back to the delay-Doppler domain.

    Accepts a Waveform (oversampled chain) or a plain symbol-rate sample
    array as produced by passing a SerialFrame through the channel.
    """
    if isinstance(received, Waveform):
        if received.oversample != pulse.oversample:
            raise ValueError("waveform oversampling does not match the pulse spec")
        samples = received.samples
    else:
        samples = np.asarray(received)
        if pulse.oversample != 1:
            raise ValueError("plain sample arrays are symbol-rate; pulse.oversample must be 1")
        expected = cp_len + grid.M * grid.N
        if samples.size != expected:
            raise ValueError(f"expected {expected} symbol-rate samples, got {samples.size}")
        taps, _ = pulse_taps(pulse)
        samples = np.concatenate([samples, np.zeros(taps.size - 1, complex)])
    return _rx_batch(samples[None, :], grid, pulse, cp_len)[0]


@dataclass(frozen=True)
class EffectiveChannel:
    """Delay-Doppler input -> delay-Doppler output linear model y = H x + w."""

    matrix: np.ndarray = field(repr=False)  # (M*N, M*N)
    noise_var: float = 0.0


def build_effective_channel(
    grid: GridConfig,
    pulse: PulseSpec,
    channel: ChannelRealization,
    cp_len: int,
) -> EffectiveChannel:
    """Columns are the noiseless received grids for unit impulses on each
    delay-Doppler input index (vectorized m + n*M)."""
    mn = grid.M * grid.N
    basis = np.eye(mn).reshape(mn, grid.N, grid.M).transpose(0, 2, 1)
    tx = _tx_batch(basis, grid, pulse, cp_len)
    rx = _apply_taps(tx, channel, grid.delta_tau / pulse.oversample)
    grids = _rx_batch(rx, grid, pulse, cp_len)
    h = grids.transpose(0, 2, 1).reshape(mn, mn).T
    return EffectiveChannel(matrix=h)


def mmse_equalize(rx_grid: np.ndarray, h_eff, noise_var: float) -> np.ndarray:
    """Linear MMSE estimate (H^H H + noise_var I)^-1 H^H y on the vectorized
    grid; noise_var = 0 reduces to zero-forcing."""
    h = h_eff.matrix if isinstance(h_eff, EffectiveChannel) else np.asarray(h_eff)
    if noise_var < 0:
        raise ValueError("noise_var must be >= 0")
    M, N = rx_grid.shape
    y = _vec(rx_grid)
    gram = h.conj().T @ h + noise_var * np.eye(h.shape[1])
    try:
        factor = cho_factor(gram)
    except LinAlgError as exc:
        raise NumericalError(f"effective channel too ill-conditioned to equalize: {exc}") from exc
    return _unvec(cho_solve(factor, h.conj().T @ y), M, N)


def despread_and_detect(
    eq_grid: np.ndarray,
    plan: AllocationPlan,
    constellation: QamConstellation,
    spreading: bool = True,
) -> np.ndarray:
    """Extract one user's Doppler bins, undo the DFT spreading, and
    hard-detect to bits (row-major over the M x K symbol grid)."""
    cols = eq_grid[:, plan.occupied]
    syms = np.fft.ifft(cols, axis=1) * np.sqrt(plan.grid.K) if spreading else cols
    return qam_demodulate(syms.reshape(-1), constellation)


@dataclass(frozen=True)
class BerResult:
    snr_db: np.ndarray
    ber: np.ndarray
    n_bits: np.ndarray
    config: dict = field(default_factory=dict)


def default_cp_len(profile_delays_s: np.ndarray, delta_tau: float) -> int:
    """One sample beyond the quantized channel delay spread."""
    return int(round(float(np.max(profile_delays_s)) / delta_tau)) + 1


def ber_simulate(
    grid: GridConfig,
    scheme: str,
    spreading: bool,
    pulse: PulseSpec,
    constellation: QamConstellation,
    snr_db_list,
    n_frames: int = 100,
    seed: int = 0,
    channel_factory=None,
    carrier_hz: float = 4e9,
    velocity_mps: float = 500.0 / 3.6,
    cp_len: int | None = None,
) -> BerResult:
    """Uncoded BER vs SNR with perfect channel knowledge and MMSE detection.

    A fresh channel realization is drawn per frame (shared by all SNR points
    and by all Q users, whose signals superpose into one received frame).
    Channel and noise seeds derive from (seed, frame) and (seed, frame, snr)
    only, so runs differing in scheme see identical channels.
    """
    if n_frames < 10:
        raise ValueError("n_frames must be >= 10")
    snrs = np.asarray(snr_db_list, float)
    if channel_factory is None:
        def channel_factory(s):
            return sample_eva_channel(carrier_hz, velocity_mps, grid.delta_tau, seed=s)
    plans = [AllocationPlan(scheme, q, grid) for q in range(grid.Q)]
    taps, _ = pulse_taps(pulse)
    mf_gain = float(np.sum(np.abs(taps) ** 2)) / pulse.oversample**2  # noise variance through the front-end
    errors = np.zeros(snrs.size, dtype=np.int64)
    total = np.zeros(snrs.size, dtype=np.int64)
    for f in range(n_frames):
        ch = channel_factory(_mix(seed, _BERCHAN_TAG, f))
        cp = default_cp_len(np.array([ch.max_delay_s]), grid.delta_tau) if cp_len is None else cp_len
        frames = []
        mapped = np.zeros((grid.M, grid.N), complex)
        for q, plan in enumerate(plans):
            rng = np.random.default_rng(np.random.SeedSequence((seed, _BITS_TAG, f, q)))
            uf = random_user_frame(plan, constellation, rng)
            frames.append(uf)
            mapped += map_dodma(dft_spread(uf) if spreading else uf.symbols, plan)
        tx = _tx_batch(mapped[None], grid, pulse, cp)
        y_clean = _apply_taps(tx, ch, grid.delta_tau / pulse.oversample)
        h = build_effective_channel(grid, pulse, ch, cp).matrix
        hh = h.conj().T @ h
        eye = np.eye(hh.shape[0])
        start = _frame_start(pulse, cp)
        sig_power = float(np.mean(np.abs(y_clean[0, start:start + grid.M * grid.N * pulse.oversample]) ** 2))
        for si, snr in enumerate(snrs):
            if np.isfinite(snr):
                var = awgn_variance(sig_power, float(snr))
                nrng = np.random.default_rng(np.random.SeedSequence((seed, _BERNOISE_TAG, f, si)))
                noise = np.sqrt(var / 2.0) * (
                    nrng.standard_normal(y_clean.shape) + 1j * nrng.standard_normal(y_clean.shape)
                )
                rx = y_clean + noise
            else:
                var = 0.0
                rx = y_clean
            y_grid = _rx_batch(rx, grid, pulse, cp)[0]
            try:
                factor = cho_factor(hh + var * mf_gain * eye)
            except LinAlgError as exc:
                raise NumericalError(f"MMSE system singular at SNR {snr} dB: {exc}") from exc
            eq = _unvec(cho_solve(factor, h.conj().T @ _vec(y_grid)), grid.M, grid.N)
            for uf, plan in zip(frames, plans):
                bits = despread_and_detect(eq, plan, constellation, spreading)
                errors[si] += int(np.sum(bits != uf.bits))
                total[si] += uf.bits.size
    config = {
        "M": grid.M, "N": grid.N, "Q": grid.Q, "scheme": scheme, "spreading": spreading,
        "order": constellation.order, "pulse": pulse.kind, "beta": pulse.beta,
        "n_frames": n_frames, "seed": seed,
    }
    return BerResult(snr_db=snrs, ber=errors / total, n_bits=total, config=config)


def _mix(*parts: int) -> int:
    """Stable scalar seed from components (for factories that take one int)."""
    return int(np.random.SeedSequence(parts).generate_state(1, np.uint64)[0])
