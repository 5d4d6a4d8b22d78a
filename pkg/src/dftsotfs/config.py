"""Experiment configuration: flat `key = value` text files with dotted
section prefixes, strict key checking, and typed coercion.

Grammar: one `key = value` per line; `#` starts a comment; blank lines are
ignored. Unknown keys are rejected. Lists are comma-separated. Booleans are
true/false. `pulse.oversample = auto` and `cp_len = auto` defer to the
library defaults.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .grids import SCHEMES, GridConfig
from .pulses import PulseSpec
from .qam import QamConstellation, make_constellation


class ConfigError(Exception):
    """Invalid or unknown configuration input."""


def _to_bool(s: str) -> bool:
    if s.lower() in ("true", "1", "yes"):
        return True
    if s.lower() in ("false", "0", "no"):
        return False
    raise ValueError(f"not a boolean: {s!r}")


def _to_float_list(s: str):
    return tuple(float(x) for x in s.split(",") if x.strip())


def _to_int_list(s: str):
    return tuple(int(x) for x in s.split(",") if x.strip())


@dataclass(frozen=True)
class ExperimentConfig:
    grid_m: int = 128
    grid_n: int = 32
    grid_q: int = 4
    grid_delta_tau: float = 1.0 / 7.68e6
    scheme: str = "interleaved"
    spreading: bool = True
    user_index: int = 0
    constellation_order: int = 16
    pulse_kind: str = "rect"
    pulse_beta: float = 0.5
    pulse_span: int = 10
    pulse_oversample: int | None = None
    cp_len: int | None = None  # None = auto (0 for PAPR runs, delay spread for BER)
    channel_profile: str = "eva"
    channel_carrier_hz: float = 4e9
    channel_velocity_kmh: float = 500.0
    n_frames: int = 10_000
    seed: int = 0
    snr_db: tuple = (0.0, 3.0, 6.0, 9.0, 12.0, 15.0, 18.0)
    sweep_betas: tuple = ()
    normalization: str = "ensemble"
    output: str | None = None

    def grid(self) -> GridConfig:
        return GridConfig(M=self.grid_m, N=self.grid_n, Q=self.grid_q, delta_tau=self.grid_delta_tau)

    def pulse(self) -> PulseSpec:
        return PulseSpec(
            kind=self.pulse_kind,
            beta=self.pulse_beta,
            span=self.pulse_span,
            oversample=self.pulse_oversample,
        )

    def constellation(self) -> QamConstellation:
        return make_constellation(self.constellation_order)

    def velocity_mps(self) -> float:
        return self.channel_velocity_kmh / 3.6

    def profile_path(self) -> str | None:
        return None if self.channel_profile == "eva" else self.channel_profile

    def as_items(self) -> list[tuple[str, str]]:
        """Resolved (config key, value) pairs for the CSV echo header.

        The output path is omitted so reruns of one configuration produce
        byte-identical files regardless of where they are written.
        """
        out = []
        for key, attr in sorted(_KEYS.items()):
            if key == "output":
                continue
            val = getattr(self, attr)
            if isinstance(val, tuple):
                val = ",".join(repr(v) for v in val)
            out.append((key, str(val)))
        return out


# config-file key -> (attribute, parser)
_SPEC: dict[str, tuple[str, callable]] = {
    "grid.M": ("grid_m", int),
    "grid.N": ("grid_n", int),
    "grid.Q": ("grid_q", int),
    "grid.delta_tau": ("grid_delta_tau", float),
    "scheme": ("scheme", str),
    "spreading": ("spreading", _to_bool),
    "user_index": ("user_index", int),
    "constellation.order": ("constellation_order", int),
    "pulse.kind": ("pulse_kind", str),
    "pulse.beta": ("pulse_beta", float),
    "pulse.span": ("pulse_span", int),
    "pulse.oversample": ("pulse_oversample", lambda s: None if s == "auto" else int(s)),
    "cp_len": ("cp_len", lambda s: None if s == "auto" else int(s)),
    "channel.profile": ("channel_profile", str),
    "channel.carrier_hz": ("channel_carrier_hz", float),
    "channel.velocity_kmh": ("channel_velocity_kmh", float),
    "montecarlo.n_frames": ("n_frames", int),
    "montecarlo.seed": ("seed", int),
    "snr_db": ("snr_db", _to_float_list),
    "sweep.betas": ("sweep_betas", _to_float_list),
    "normalization": ("normalization", str),
    "output": ("output", str),
}
_KEYS = {key: attr for key, (attr, _) in _SPEC.items()}


def parse_config_text(text: str, base: ExperimentConfig | None = None) -> ExperimentConfig:
    cfg = base or ExperimentConfig()
    updates = {}
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {ln}: expected `key = value`, got {raw!r}")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if key not in _SPEC:
            raise ConfigError(f"line {ln}: unknown key {key!r}")
        attr, parser = _SPEC[key]
        try:
            updates[attr] = parser(value)
        except (ValueError, TypeError) as exc:
            raise ConfigError(f"line {ln}: bad value for {key!r}: {exc}") from exc
    return replace(cfg, **updates)


def load_config(path, base: ExperimentConfig | None = None) -> ExperimentConfig:
    p = Path(path)
    if not p.exists():
        raise ConfigError(f"config file not found: {p}")
    return parse_config_text(p.read_text(), base)


def validate(cfg: ExperimentConfig) -> ExperimentConfig:
    """Cross-field checks; raises ConfigError naming the offending key."""
    try:
        cfg.grid()
    except ValueError as exc:
        raise ConfigError(f"grid.M/grid.N/grid.Q/grid.delta_tau: {exc}") from exc
    if cfg.scheme not in SCHEMES:
        raise ConfigError(f"scheme: must be one of {SCHEMES}, got {cfg.scheme!r}")
    try:
        cfg.pulse()
    except ValueError as exc:
        raise ConfigError(f"pulse.*: {exc}") from exc
    try:
        cfg.constellation()
    except ValueError as exc:
        raise ConfigError(f"constellation.order: {exc}") from exc
    if not 0 <= cfg.user_index < cfg.grid_q:
        raise ConfigError(f"user_index: must be in [0, {cfg.grid_q}), got {cfg.user_index}")
    if cfg.normalization not in ("ensemble", "empirical"):
        raise ConfigError(f"normalization: must be ensemble or empirical, got {cfg.normalization!r}")
    if cfg.n_frames < 1:
        raise ConfigError("montecarlo.n_frames: must be >= 1")
    if any(not np.isfinite(b) or not 0 < b <= 1 for b in cfg.sweep_betas):
        raise ConfigError("sweep.betas: values must lie in (0, 1]")
    if cfg.channel_profile != "eva" and not Path(cfg.channel_profile).exists():
        raise ConfigError(f"channel.profile: file not found: {cfg.channel_profile}")
    return cfg
