"""PAPR measurement, Monte Carlo CCDF estimation, analytical upper bounds,
and the roll-off / spreading-size sweeps.

Monte Carlo statistics normalize each frame's peak by the ensemble average
power 1/Q (the value entering the analytical bound denominators), so every
simulated frame is guaranteed to respect the bounds; ``normalization=
"empirical"`` switches to the per-frame measured mean instead.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .grids import BLOCK, SCHEMES, AllocationPlan, GridConfig, random_user_frame
from .pulses import RRC, PulseSpec, Waveform, g0_numeric, shape_waveform
from .qam import QamConstellation, max_symbol_power
from .transmitter import modulate_user, serialize_with_cp

_FRAME_TAG = 0xF0A  # seed-domain tag for Monte Carlo frame streams


def frame_rng(master_seed: int, stream: int, frame_index: int) -> np.random.Generator:
    """Per-frame generator mixed from (seed, stream, frame), so results do not
    depend on worker count or scheduling."""
    return np.random.default_rng(np.random.SeedSequence((master_seed, _FRAME_TAG, stream, frame_index)))


def papr_db(waveform: Waveform, window: str = "frame") -> float:
    """Peak-to-average power ratio in dB over the frame window (or the whole
    sample array with window="all", which includes CP and filter edges)."""
    x = waveform.frame if window == "frame" else waveform.samples
    if x.size == 0:
        raise ValueError("empty waveform window")
    p = np.abs(x) ** 2
    peak, avg = p.max(), p.mean()
    if peak == 0.0:
        raise ValueError("PAPR undefined for an all-zero waveform")
    return float(10.0 * np.log10(peak / avg))


def _frame_stats(
    grid: GridConfig,
    scheme: str,
    pulse: PulseSpec,
    constellation: QamConstellation,
    spreading: bool,
    q: int,
    seed: int,
    stream: int,
    frame_indices: np.ndarray,
) -> tuple[np.ndarray, np.ndarray]:
    """Frame-window (peak power, mean power) for each requested frame index."""
    plan = AllocationPlan(scheme, q, grid)
    peaks = np.empty(len(frame_indices))
    means = np.empty(len(frame_indices))
    for j, fi in enumerate(frame_indices):
        rng = frame_rng(seed, stream, int(fi))
        frame = random_user_frame(plan, constellation, rng)
        serial = serialize_with_cp(modulate_user(frame, spreading), 0)
        p = np.abs(shape_waveform(serial, pulse).frame) ** 2
        peaks[j] = p.max()
        means[j] = p.mean()
    return peaks, means


def _stats_parallel(args, n_frames: int, workers: int) -> tuple[np.ndarray, np.ndarray]:
    indices = np.arange(n_frames)
    if workers <= 1:
        return _frame_stats(*args, indices)
    chunks = np.array_split(indices, workers * 4)
    with ProcessPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(_frame_stats, *zip(*[args + (c,) for c in chunks if c.size])))
    return np.concatenate([p for p, _ in parts]), np.concatenate([m for _, m in parts])


def simulate_papr_frames(
    grid: GridConfig,
    scheme: str,
    pulse: PulseSpec,
    constellation: QamConstellation,
    spreading: bool = True,
    n_frames: int = 10_000,
    seed: int = 0,
    q: int = 0,
    normalization: str = "ensemble",
    stream: int = 0,
    workers: int = 1,
) -> np.ndarray:
    """Per-frame PAPR (dB) over independent random frames of one user."""
    if normalization not in ("ensemble", "empirical"):
        raise ValueError(f"unknown normalization {normalization!r}")
    args = (grid, scheme, pulse, constellation, spreading, q, seed, stream)
    peaks, means = _stats_parallel(args, n_frames, workers)
    ref = 1.0 / grid.Q if normalization == "ensemble" else means
    return 10.0 * np.log10(peaks / ref)


def mean_frame_power(
    grid: GridConfig,
    scheme: str,
    pulse: PulseSpec,
    constellation: QamConstellation,
    spreading: bool = True,
    n_frames: int = 1000,
    seed: int = 0,
    q: int = 0,
    stream: int = 0,
    workers: int = 1,
) -> float:
    """Average per-sample power over the frame window, across random frames."""
    args = (grid, scheme, pulse, constellation, spreading, q, seed, stream)
    _, means = _stats_parallel(args, n_frames, workers)
    return float(means.mean())


@dataclass(frozen=True)
class CcdfCurve:
    """Empirical exceedance curve Pr{PAPR > threshold}."""

    thresholds_db: np.ndarray = field(repr=False)
    probabilities: np.ndarray = field(repr=False)
    n_frames: int
    config: dict = field(default_factory=dict)

    @classmethod
    def from_samples(cls, papr_db_samples: np.ndarray, config: dict | None = None) -> "CcdfCurve":
        s = np.sort(np.asarray(papr_db_samples, float))
        exceed = 1.0 - np.searchsorted(s, s, side="right") / s.size
        return cls(thresholds_db=s, probabilities=exceed, n_frames=s.size, config=config or {})

    def papr_at(self, probability: float) -> float:
        """Smallest threshold whose exceedance probability is <= the given level."""
        idx = np.searchsorted(-self.probabilities, -probability, side="left")
        return float(self.thresholds_db[min(idx, self.thresholds_db.size - 1)])

    def probability_at(self, threshold_db: float) -> float:
        idx = np.searchsorted(self.thresholds_db, threshold_db, side="right")
        return float(self.probabilities[idx - 1]) if idx > 0 else 1.0


def ccdf_estimate(
    grid: GridConfig,
    scheme: str,
    pulse: PulseSpec,
    constellation: QamConstellation,
    spreading: bool = True,
    n_frames: int = 10_000,
    seed: int = 0,
    q: int = 0,
    normalization: str = "ensemble",
    workers: int = 1,
) -> CcdfCurve:
    """Monte Carlo CCDF of the PAPR for one user's transmit chain."""
    if n_frames < 100:
        raise ValueError("n_frames must be >= 100 for a meaningful CCDF")
    paprs = simulate_papr_frames(
        grid, scheme, pulse, constellation, spreading, n_frames, seed, q, normalization, workers=workers
    )
    config = {
        "M": grid.M, "N": grid.N, "Q": grid.Q, "scheme": scheme,
        "spreading": spreading, "order": constellation.order,
        "pulse": pulse.kind, "beta": pulse.beta if pulse.kind == RRC else None,
        "seed": seed, "q": q, "normalization": normalization,
    }
    return CcdfCurve.from_samples(paprs, config)


@dataclass(frozen=True)
class BoundQuery:
    """Selector for the analytical PAPR upper bound."""

    scheme: str
    pulse: PulseSpec
    order: int
    K: int

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ValueError(f"scheme must be one of {SCHEMES}, got {self.scheme!r}")
        if self.K < 1:
            raise ValueError("K must be >= 1")
        max_symbol_power(self.order)  # validates the constellation order


def papr_upper_bound(query: BoundQuery) -> float:
    """Analytical PAPR upper bound in dB.

    Interleaved/rect is set by the constellation peak power alone; block
    multiplies by K; an RRC pulse multiplies by g0^2 (numeric oracle value).
    """
    p = max_symbol_power(query.order)
    if query.scheme == BLOCK:
        p *= query.K
    if query.pulse.kind == RRC:
        p *= g0_numeric(query.pulse.beta, query.pulse.span) ** 2
    return float(10.0 * np.log10(p))


@dataclass(frozen=True)
class RolloffSweepResult:
    betas: np.ndarray
    max_papr_db: np.ndarray  # simulated maximum per roll-off
    bound_db: np.ndarray


def rolloff_sweep(
    grid: GridConfig,
    scheme: str,
    constellation: QamConstellation,
    betas,
    n_frames: int = 1000,
    seed: int = 0,
    span: int = 10,
    oversample: int = 16,
    q: int = 0,
    workers: int = 1,
) -> RolloffSweepResult:
    """Simulated maximum PAPR and analytic bound across RRC roll-off factors."""
    betas = np.asarray(betas, float)
    if np.any(betas <= 0.0) or np.any(betas > 1.0):
        raise ValueError("betas must lie in (0, 1]")
    max_papr = np.empty(betas.size)
    bound = np.empty(betas.size)
    for bi, beta in enumerate(betas):
        pulse = PulseSpec(RRC, beta=float(beta), span=span, oversample=oversample)
        paprs = simulate_papr_frames(
            grid, scheme, pulse, constellation, True, n_frames, seed, q, stream=bi, workers=workers
        )
        max_papr[bi] = paprs.max()
        bound[bi] = papr_upper_bound(BoundQuery(scheme, pulse, constellation.order, grid.K))
    return RolloffSweepResult(betas=betas, max_papr_db=max_papr, bound_db=bound)


def k_sweep(
    grid: GridConfig,
    Ks,
    scheme: str,
    pulse: PulseSpec,
    constellation: QamConstellation,
    n_frames: int = 10_000,
    seed: int = 0,
    workers: int = 1,
) -> dict[int, CcdfCurve]:
    """CCDF per spreading size K at fixed N (Q = N/K users)."""
    curves: dict[int, CcdfCurve] = {}
    for K in Ks:
        if grid.N % K != 0:
            raise ValueError(f"K={K} does not divide N={grid.N}")
        sub = GridConfig(M=grid.M, N=grid.N, Q=grid.N // K, delta_tau=grid.delta_tau)
        paprs = simulate_papr_frames(
            sub, scheme, pulse, constellation, True, n_frames, seed, stream=int(K), workers=workers
        )
        curves[int(K)] = CcdfCurve.from_samples(
            paprs, {"K": int(K), "N": grid.N, "M": grid.M, "scheme": scheme, "seed": seed}
        )
    return curves
