"""Fast invariant suite runnable from the CLI: transform round trips,
closed-form transmitter structure, Parseval, g0 agreement, bound dominance,
and receiver loopbacks. Each check prints one PASS/FAIL line."""

from __future__ import annotations

import time

import numpy as np

from . import transmitter
from .channel import apply_ltv_channel, identity_channel, sample_eva_channel
from .grids import BLOCK, INTERLEAVED, AllocationPlan, GridConfig, random_user_frame
from .papr import BoundQuery, papr_upper_bound, simulate_papr_frames
from .pulses import RECT, RRC, PulseSpec, g0_analytic, g0_argmax, g0_numeric
from .qam import make_constellation, qam_demodulate, qam_modulate, max_symbol_power
from .receiver import build_effective_channel, receive_frontend, tx_waveform, _vec
from .transmitter import (
    dft_spread,
    idft_doppler,
    interleaved_fast_path,
    map_dodma,
    modulate_user,
    serialize_with_cp,
)


def _check_constellations():
    for order in (4, 16, 64, 256):
        c = make_constellation(order)
        if abs(c.points.mean()) > 1e-12:
            return False, f"order {order}: nonzero mean"
        if abs(np.mean(np.abs(c.points) ** 2) - 1.0) > 1e-12:
            return False, f"order {order}: average power != 1"
        if abs(np.max(np.abs(c.points) ** 2) - max_symbol_power(order)) > 1e-12:
            return False, f"order {order}: peak power mismatch"
    return True, "orders 4..256: zero mean, unit power, analytic peak"


def _check_qam_roundtrip():
    rng = np.random.default_rng(1)
    for order in (4, 16, 64):
        c = make_constellation(order)
        bits = rng.integers(0, 2, 3 * 1024 * c.bits_per_symbol)
        if not np.array_equal(qam_demodulate(qam_modulate(bits, c), c), bits):
            return False, f"order {order}: round trip failed"
    return True, "modulate/demodulate round trip exact"


def _naive_chain(frame, spreading):
    g = frame.plan.grid
    X = dft_spread(frame) if spreading else frame.symbols
    mapped = map_dodma(X, frame.plan)
    out = np.zeros((g.M, g.N), complex)
    for m in range(g.M):
        for l in range(g.N):
            out[m, l] = sum(
                mapped[m, n] * np.exp(2j * np.pi * n * l / g.N) for n in range(g.N)
            ) / np.sqrt(g.N)
    return out


def _check_transform_oracle():
    rng = np.random.default_rng(2)
    c = make_constellation(4)
    for M in (1, 2):
        for N in (2, 4):
            for Q in (1, 2):
                for scheme in (INTERLEAVED, BLOCK):
                    plan = AllocationPlan(scheme, Q - 1, GridConfig(M, N, Q))
                    frame = random_user_frame(plan, c, rng)
                    fast = modulate_user(frame).samples
                    naive = _naive_chain(frame, True)
                    if np.max(np.abs(fast - naive)) > 1e-10:
                        return False, f"M={M} N={N} Q={Q} {scheme}: transform != naive sum"
    return True, "fft path matches naive DFT sums on all small dims"


def _check_interleaved_closed_form():
    rng = np.random.default_rng(3)
    grid = GridConfig(16, 32, 4)
    for q in (0, 1, 3):
        plan = AllocationPlan(INTERLEAVED, q, grid)
        frame = random_user_frame(plan, make_constellation(16), rng)
        err = np.max(np.abs(modulate_user(frame).samples - interleaved_fast_path(frame).samples))
        if err > 1e-10:
            return False, f"q={q}: fast path deviates by {err:.2e}"
    return True, "periodic-repetition fast path matches transform path"


def _check_block_closed_form():
    rng = np.random.default_rng(4)
    grid = GridConfig(4, 32, 4)
    plan = AllocationPlan(BLOCK, 2, grid)
    frame = random_user_frame(plan, make_constellation(16), rng)
    dt = modulate_user(frame).samples
    K, Q, N = grid.K, grid.Q, grid.N
    start = int(plan.occupied[0])
    for kappa in range(K):
        phase = np.exp(2j * np.pi * start * Q * kappa / N)
        expect = frame.symbols[:, kappa] / np.sqrt(Q) * phase
        if np.max(np.abs(dt[:, Q * kappa] - expect)) > 1e-10:
            return False, f"closed form off at l=Q*{kappa}"
    return True, "block samples at l=Q*kappa match the scaled/phase-shifted symbols"


def _check_parseval():
    rng = np.random.default_rng(5)
    grid = GridConfig(8, 16, 2)
    plan = AllocationPlan(INTERLEAVED, 1, grid)
    for _ in range(20):
        frame = random_user_frame(plan, make_constellation(16), rng)
        e_in = np.sum(np.abs(frame.symbols) ** 2)
        e_out = np.sum(np.abs(modulate_user(frame).samples) ** 2)
        if abs(e_out - e_in) > 1e-10 * e_in:
            return False, f"energy {e_in:.6f} -> {e_out:.6f}"
    return True, "spread->map->idft preserves frame energy"


def _check_g0():
    for beta in (0.1, 0.2, 0.3, 0.4, 0.5, 0.7, 0.9):
        gn, ga = g0_numeric(beta, 10), g0_analytic(beta, 10)
        if abs(ga - gn) / gn > 1e-3:
            return False, f"beta={beta}: numeric {gn:.6f} vs analytic {ga:.6f}"
        am = g0_argmax(beta, 10)
        target = 0.5 if beta <= 0.4 else 0.0
        if abs(am - target) > 1e-3:
            return False, f"beta={beta}: argmax {am} != {target}"
    return True, "series and dense-grid g0 agree; peak at the predicted offsets"


def _check_bound_dominance():
    c16 = make_constellation(16)
    grid = GridConfig(128, 32, 4)
    for scheme in (INTERLEAVED, BLOCK):
        pulse = PulseSpec(RECT)
        paprs = simulate_papr_frames(grid, scheme, pulse, c16, True, 1000, seed=6)
        bound = papr_upper_bound(BoundQuery(scheme, pulse, 16, grid.K))
        if paprs.max() > bound + 0.01:
            return False, f"{scheme}/rect: {paprs.max():.3f} dB > bound {bound:.3f} dB"
    pulse = PulseSpec(RRC, beta=0.5)
    small = GridConfig(32, 32, 4)
    paprs = simulate_papr_frames(small, INTERLEAVED, pulse, c16, True, 200, seed=7)
    bound = papr_upper_bound(BoundQuery(INTERLEAVED, pulse, 16, small.K))
    if paprs.max() > bound + 0.01:
        return False, f"interleaved/rrc: {paprs.max():.3f} dB > bound {bound:.3f} dB"
    return True, "every simulated frame respects its analytic bound"


def _check_frontend_loopback():
    rng = np.random.default_rng(8)
    grid = GridConfig(8, 8, 2)
    plan = AllocationPlan(INTERLEAVED, 0, grid)
    frame = random_user_frame(plan, make_constellation(16), rng)
    mapped = map_dodma(dft_spread(frame), plan)
    serial = serialize_with_cp(idft_doppler(mapped, grid), 2)
    rect = PulseSpec(RECT)
    rx = receive_frontend(serial.samples, grid, rect, 2)
    if np.max(np.abs(rx - mapped)) > 1e-10:
        return False, "rect loopback does not recover the mapped grid"
    rrc = PulseSpec(RRC, beta=0.5, oversample=8)
    wf = tx_waveform(mapped, grid, rrc, 2)
    rx2 = receive_frontend(wf, grid, rrc, 2)
    err = np.max(np.abs(rx2 - mapped))
    if err > 1e-3:
        return False, f"rrc matched-filter loopback error {err:.2e}"
    return True, "rect exact and rrc Nyquist-accurate grid recovery"


def _check_effective_channel():
    rng = np.random.default_rng(9)
    grid = GridConfig(8, 8, 2)
    pulse = PulseSpec(RECT)
    ch = sample_eva_channel(4e9, 500 / 3.6, grid.delta_tau, seed=11)
    cp = 20
    h = build_effective_channel(grid, pulse, ch, cp).matrix
    x = rng.standard_normal((8, 8)) + 1j * rng.standard_normal((8, 8))
    serial = serialize_with_cp(idft_doppler(x, grid), cp)
    rx = receive_frontend(apply_ltv_channel(serial, ch), grid, pulse, cp)
    err = np.linalg.norm(_vec(rx) - h @ _vec(x)) / np.linalg.norm(h @ _vec(x))
    if err > 1e-8:
        return False, f"matrix model mismatch {err:.2e}"
    h_id = build_effective_channel(grid, pulse, identity_channel(), 0).matrix
    if np.max(np.abs(h_id - np.eye(64))) > 1e-10:
        return False, "identity channel does not give the identity matrix"
    return True, "H_eff consistent with direct simulation and identity channel"


CHECKS = [
    ("constellation", _check_constellations),
    ("qam-roundtrip", _check_qam_roundtrip),
    ("transform-oracle", _check_transform_oracle),
    ("interleaved-closed-form", _check_interleaved_closed_form),
    ("block-closed-form", _check_block_closed_form),
    ("parseval", _check_parseval),
    ("g0-agreement", _check_g0),
    ("bound-dominance", _check_bound_dominance),
    ("frontend-loopback", _check_frontend_loopback),
    ("effective-channel", _check_effective_channel),
]


def run_selftest(break_dft_scale: float | None = None, out=None) -> bool:
    """Run all checks, printing one line each; returns overall success.

    ``break_dft_scale`` feeds the fault-injection hook that corrupts the DFT
    spreading normalization, a negative control that must trip the Parseval
    check.
    """
    import sys

    out = out or sys.stderr
    old_hook = transmitter._dft_scale_hook
    if break_dft_scale is not None:
        transmitter._dft_scale_hook = break_dft_scale
    ok_all = True
    try:
        for name, fn in CHECKS:
            t0 = time.perf_counter()
            try:
                ok, detail = fn()
            except Exception as exc:  # a crash is a failure, keep going
                ok, detail = False, f"raised {type(exc).__name__}: {exc}"
            ok_all &= ok
            status = "PASS" if ok else "FAIL"
            print(f"{status} {name:24s} {detail} ({time.perf_counter() - t0:.2f}s)", file=out)
    finally:
        transmitter._dft_scale_hook = old_hook
    return ok_all
