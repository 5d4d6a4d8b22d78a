"""Doubly dispersive tapped-delay-line channel with per-tap Doppler shifts.

Tap delays/powers come from a plain-text power-delay profile (bundled EVA by
default); each realization draws complex Gaussian tap gains and a fixed
per-tap Doppler f_d_max*cos(theta) with theta uniform, i.e. the gains are
quasi-static within a frame apart from the linear Doppler phase ramp.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from importlib import resources
from pathlib import Path

import numpy as np

from .pulses import Waveform
from .transmitter import SerialFrame

SPEED_OF_LIGHT = 2.998e8  # m/s

_CHAN_TAG = 0xC4A  # seed-domain tag for channel realizations
_NOISE_TAG = 0x107E  # seed-domain tag for receiver noise


@dataclass(frozen=True)
class ChannelTap:
    delay_s: float
    power: float  # linear gain variance, profile-normalized
    doppler_hz: float
    gain: complex


@dataclass(frozen=True)
class ChannelRealization:
    taps: tuple[ChannelTap, ...]
    f_d_max: float
    carrier_hz: float
    seed: int | None = None

    @property
    def max_delay_s(self) -> float:
        return max(tap.delay_s for tap in self.taps)


def load_profile(path) -> tuple[np.ndarray, np.ndarray]:
    """Read a `delay_ns power_db` profile file; returns delays in seconds and
    linear powers normalized to sum to 1."""
    delays, powers_db = [], []
    text = Path(path).read_text()
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ValueError(f"{path}:{ln}: expected `delay_ns power_db`, got {raw!r}")
        delays.append(float(parts[0]) * 1e-9)
        powers_db.append(float(parts[1]))
    if not delays:
        raise ValueError(f"{path}: no taps found")
    powers = 10.0 ** (np.asarray(powers_db) / 10.0)
    return np.asarray(delays), powers / powers.sum()


def eva_profile() -> tuple[np.ndarray, np.ndarray]:
    """The bundled 9-tap EVA power-delay profile."""
    with resources.as_file(resources.files("dftsotfs.data") / "eva.txt") as p:
        return load_profile(p)


def sample_channel(
    delays_s: np.ndarray,
    powers: np.ndarray,
    carrier_hz: float,
    velocity_mps: float,
    delta_tau: float,
    seed: int = 0,
) -> ChannelRealization:
    """Draw one channel realization from a power-delay profile.

    Tap delays are rounded to the delta_tau sample grid; each tap gets an
    i.i.d. CN(0, power) gain and Doppler f_d_max*cos(theta), theta uniform.
    """
    if velocity_mps < 0:
        raise ValueError("velocity must be >= 0")
    rng = np.random.default_rng(np.random.SeedSequence((int(seed), _CHAN_TAG)))
    f_d_max = velocity_mps * carrier_hz / SPEED_OF_LIGHT
    thetas = rng.uniform(0.0, 2.0 * np.pi, len(delays_s))
    gains = (rng.standard_normal(len(delays_s)) + 1j * rng.standard_normal(len(delays_s))) / np.sqrt(2.0)
    taps = tuple(
        ChannelTap(
            delay_s=round(d / delta_tau) * delta_tau,
            power=float(p),
            doppler_hz=float(f_d_max * np.cos(th)),
            gain=complex(g * np.sqrt(p)),
        )
        for d, p, th, g in zip(delays_s, powers, thetas, gains)
    )
    return ChannelRealization(taps=taps, f_d_max=f_d_max, carrier_hz=carrier_hz, seed=int(seed))


def sample_eva_channel(
    carrier_hz: float,
    velocity_mps: float,
    delta_tau: float,
    seed: int = 0,
    profile_path=None,
) -> ChannelRealization:
    """EVA realization at the given carrier and speed (profile_path overrides
    the bundled table)."""
    delays, powers = load_profile(profile_path) if profile_path else eva_profile()
    return sample_channel(delays, powers, carrier_hz, velocity_mps, delta_tau, seed)


def identity_channel() -> ChannelRealization:
    """Single unit-gain tap, zero delay, zero Doppler."""
    return ChannelRealization(taps=(ChannelTap(0.0, 1.0, 0.0, 1.0 + 0.0j),), f_d_max=0.0, carrier_hz=0.0)


def _apply_taps(x: np.ndarray, channel: ChannelRealization, sample_period: float) -> np.ndarray:
    """y[n] = sum_p gain_p * exp(j*2*pi*nu_p*n*Ts) * x[n - l_p], batched over
    leading axes of x."""
    n = np.arange(x.shape[-1])
    y = np.zeros_like(x)
    for tap in channel.taps:
        shift = int(round(tap.delay_s / sample_period))
        shifted = np.zeros_like(x)
        if shift == 0:
            shifted[...] = x
        else:
            shifted[..., shift:] = x[..., :-shift]
        y += tap.gain * np.exp(2j * np.pi * tap.doppler_hz * n * sample_period) * shifted
    return y


def _check_cp(channel: ChannelRealization, cp_len: int, delta_tau: float):
    max_shift = int(round(channel.max_delay_s / delta_tau))
    if cp_len < max_shift:
        raise ValueError(
            f"cyclic prefix of {cp_len} samples is shorter than the channel delay spread ({max_shift} samples)"
        )


def awgn_variance(signal_power: float, snr_db: float) -> float:
    return signal_power / 10.0 ** (snr_db / 10.0)


def apply_ltv_channel(signal, channel: ChannelRealization, snr_db: float | None = None, seed: int = 0):
    """Pass a SerialFrame or Waveform through the channel, optionally adding
    complex Gaussian noise at the given SNR (relative to the received frame
    power, per complex sample).

    SerialFrame input returns a plain sample array at symbol rate; Waveform
    input returns a Waveform on the same oversampled grid.
    """
    if isinstance(signal, SerialFrame):
        _check_cp(channel, signal.cp_len, signal.grid.delta_tau)
        y = _apply_taps(signal.samples, channel, signal.grid.delta_tau)
        body = y[signal.cp_len:]
    elif isinstance(signal, Waveform):
        period = signal.delta_tau / signal.oversample
        _check_cp(channel, signal.cp_len, signal.delta_tau)
        y = _apply_taps(signal.samples, channel, period)
        body = y[signal.frame_span]
    else:
        raise TypeError(f"expected SerialFrame or Waveform, got {type(signal).__name__}")
    if snr_db is not None and np.isfinite(snr_db):
        rng = np.random.default_rng(np.random.SeedSequence((int(seed), _NOISE_TAG)))
        var = awgn_variance(float(np.mean(np.abs(body) ** 2)), snr_db)
        noise = np.sqrt(var / 2.0) * (rng.standard_normal(y.shape) + 1j * rng.standard_normal(y.shape))
        y = y + noise
    if isinstance(signal, Waveform):
        return replace(signal, samples=y)
    return y
